# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Jeff Culverhouse
"""Lipschitz constants of convex functions from finitely many function values.

For convex f, parameters lambda in (0, 1) and alpha > max(1, lambda / (1 - lambda)), and a
finite S whose convex hull contains B(x0, alpha * r),

    L = (max_S f - f(x0)) / (r * lambda * (alpha - 1))

is a Lipschitz constant of f on B(x0, r). The global modulus of a convex f equals
limsup |f(x)| / ||x|| as ||x|| grows, which the radial profile samples.
"""
from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from concurrent.futures import Executor
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Any

import numpy as np
import numpy.typing as npt
from json_logging import get_logger
from jsonschema import Draft202012Validator
from jsonschema.exceptions import best_match

from lipcert.chunks import DEFAULT_CHUNK_SIZE, map_rows
from lipcert.errors import InsufficientProfile, InvalidParams, ParseError, ValidationError
from lipcert.geometry import DEFAULT_SHELL_MAX_GRID_POINTS, Ball, CoverKind, Points, Vector, as_points, as_vector, build_cover, random_directions, unit_vector
from lipcert.zoo import EvaluableFunction, as_function, json_path

DEFAULT_DELTA = 1e-3
DEFAULT_ALPHA_GRID = (2.0, 5.0, 10.0, 50.0, 100.0)
DEFAULT_SHELL_SLACK = 1.0
DEFAULT_GROWTH_FACTOR = 10.0
DEFAULT_PLATEAU_TOL = 0.01
MIN_PROFILE_RADII = 4
MIN_PROFILE_DECADES = 3.0

logger = get_logger(__name__)

Function = EvaluableFunction | Callable[[Vector], float]


@dataclass(frozen=True)
class EstimatorParams:
    lam: float
    alpha: float

    def __post_init__(self) -> None:
        lam, alpha = float(self.lam), float(self.alpha)
        if not 0.0 < lam < 1.0:
            raise InvalidParams(f"lambda must lie in (0, 1), got {lam}", "lambda")
        if not alpha > 1.0:
            raise InvalidParams(f"alpha must exceed 1, got {alpha}", "alpha")
        if not alpha > lam / (1.0 - lam):
            raise InvalidParams(f"alpha must exceed lambda/(1-lambda) = {lam / (1.0 - lam):.17g}, got {alpha}", "alpha")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "alpha", alpha)

    @classmethod
    def for_alpha(cls, alpha: float, delta: float) -> EstimatorParams:
        """lambda = (1 - delta) * alpha / (alpha + 1), the largest feasible lambda up to delta."""
        check_delta(delta)
        if not alpha > 1.0:
            raise InvalidParams(f"alpha must exceed 1, got {alpha}", "alpha")
        return cls((1.0 - delta) * alpha / (alpha + 1.0), alpha)

    def to_dict(self) -> dict[str, float]:
        return {"lambda": self.lam, "alpha": self.alpha}


def check_delta(delta: float) -> None:
    if delta == 0.0:
        raise InvalidParams("delta must be positive: lambda = alpha/(alpha+1) violates alpha > lambda/(1-lambda)", "delta")
    if not 0.0 < delta < 1.0:
        raise InvalidParams(f"delta must lie in (0, 1), got {delta}", "delta")


CERTIFICATE_SCHEMA: dict[str, Any] = {
    "type": "object",
    "properties": {
        "L": {"type": "number"},
        "ball": {
            "type": "object",
            "properties": {"center": {"type": "array", "items": {"type": "number"}, "minItems": 1}, "radius": {"type": "number"}},
            "required": ["center", "radius"],
            "additionalProperties": False,
        },
        "params": {
            "type": "object",
            "properties": {"lambda": {"type": "number"}, "alpha": {"type": "number"}},
            "required": ["lambda", "alpha"],
            "additionalProperties": False,
        },
        "cover_kind": {"enum": [str(k) for k in CoverKind]},
        "M": {"type": "number"},
        "f_at_center": {"type": "number"},
        "eval_count": {"type": "integer", "minimum": 1},
        "function_id": {"type": "string"},
        "slack": {"type": ["number", "null"]},
        "argmax_point": {"type": ["array", "null"], "items": {"type": "number"}},
    },
    "required": ["L", "ball", "params", "cover_kind", "M", "f_at_center", "eval_count", "function_id"],
    "additionalProperties": False,
}
_certificate_validator = Draft202012Validator(CERTIFICATE_SCHEMA)


@dataclass(frozen=True, eq=False)
class LipschitzCertificate:
    L: float
    ball: Ball
    params: EstimatorParams
    cover_kind: CoverKind
    M: float
    f_at_center: float
    eval_count: int
    function_id: str
    slack: float | None = None
    argmax_point: Vector | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "L": self.L,
            "ball": self.ball.to_dict(),
            "params": self.params.to_dict(),
            "cover_kind": str(self.cover_kind),
            "M": self.M,
            "f_at_center": self.f_at_center,
            "eval_count": self.eval_count,
            "function_id": self.function_id,
            "slack": self.slack,
            "argmax_point": None if self.argmax_point is None else [float(c) for c in self.argmax_point],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> LipschitzCertificate:
        error = best_match(_certificate_validator.iter_errors(data))
        if error is not None:
            raise ParseError(error.message, json_path(error.absolute_path))
        argmax = data.get("argmax_point")
        return cls(
            L=float(data["L"]),
            ball=Ball.from_dict(data["ball"]),
            params=EstimatorParams(data["params"]["lambda"], data["params"]["alpha"]),
            cover_kind=CoverKind(data["cover_kind"]),
            M=float(data["M"]),
            f_at_center=float(data["f_at_center"]),
            eval_count=int(data["eval_count"]),
            function_id=data["function_id"],
            slack=data.get("slack"),
            argmax_point=None if argmax is None else as_vector(argmax, "argmax_point"),
        )


def ball_lipschitz_constant(
    f: Function,
    ball: Ball,
    params: EstimatorParams,
    cover_kind: CoverKind | str = CoverKind.CROSS,
    slack: float = DEFAULT_SHELL_SLACK,
    max_grid_points: int = DEFAULT_SHELL_MAX_GRID_POINTS,
    executor: Executor | None = None,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> LipschitzCertificate:
    """Certified Lipschitz constant of convex `f` on `ball` from values on a cover of the alpha-scaled ball."""
    fn = as_function(f)
    kind = CoverKind(cover_kind)
    cover = build_cover(kind, ball.scaled(params.alpha), slack, max_grid_points)
    values = map_rows(fn.evaluate_many, cover.points, executor, chunk_size)
    best = int(np.argmax(values))
    M = float(values[best])
    f0 = fn.evaluate(ball.center)
    L = (M - f0) / (ball.radius * params.lam * (params.alpha - 1.0))
    logger.debug(f"{fn.function_id}: {kind} cover of {cover.size} points, M={M!r}, f(x0)={f0!r}, L={L!r}")
    return LipschitzCertificate(
        L=L,
        ball=ball,
        params=params,
        cover_kind=kind,
        M=M,
        f_at_center=f0,
        eval_count=cover.size + 1,
        function_id=fn.function_id,
        slack=slack if kind == CoverKind.SHELL else None,
        argmax_point=as_vector(cover.points[best]),
    )


@dataclass(frozen=True, eq=False)
class TuningResult:
    best: LipschitzCertificate
    certificates: list[LipschitzCertificate]
    delta: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "best": self.best.to_dict(),
            "delta": self.delta,
            "grid": [cert.to_dict() for cert in self.certificates],
        }


def tune_parameters(
    f: Function,
    ball: Ball,
    alpha_grid: Sequence[float] = DEFAULT_ALPHA_GRID,
    delta: float = DEFAULT_DELTA,
    cover_kind: CoverKind | str = CoverKind.CROSS,
    slack: float = DEFAULT_SHELL_SLACK,
    max_grid_points: int = DEFAULT_SHELL_MAX_GRID_POINTS,
    executor: Executor | None = None,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> TuningResult:
    """Certificates over `alpha_grid` with lambda(alpha) = (1 - delta) * alpha / (alpha + 1); the smallest L wins.

    Ties go to the smaller alpha, then to fewer evaluations.
    """
    if len(alpha_grid) == 0:
        raise InvalidParams("alpha grid must not be empty", "alpha_grid")
    check_delta(delta)
    certificates = []
    for i, alpha in enumerate(alpha_grid):
        if not alpha > 1.0:
            raise InvalidParams(f"alpha grid values must exceed 1, got {alpha}", f"alpha_grid[{i}]")
        params = EstimatorParams.for_alpha(alpha, delta)
        certificates.append(ball_lipschitz_constant(f, ball, params, cover_kind, slack, max_grid_points, executor, chunk_size))
    best = min(certificates, key=lambda cert: (cert.L, cert.params.alpha, cert.eval_count))
    logger.debug(f"tuned over {len(certificates)} alphas: best alpha={best.params.alpha}, L={best.L!r}")
    return TuningResult(best, certificates, delta)


# Radial growth -------------------------------------------------------------------------------

PROFILE_SCHEMA: dict[str, Any] = {
    "type": "object",
    "properties": {
        "center": {"type": "array", "items": {"type": "number"}, "minItems": 1},
        "radii": {"type": "array", "items": {"type": "number"}},
        "ratios": {"type": "array", "items": {"type": "number"}},
        "signed_ratios": {"type": "array", "items": {"type": "number"}},
        "directions_used": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer"},
    },
    "required": ["center", "radii", "ratios", "signed_ratios", "directions_used", "seed"],
    "additionalProperties": False,
}
_profile_validator = Draft202012Validator(PROFILE_SCHEMA)


@dataclass(frozen=True, eq=False)
class RadialProfile:
    center: Vector
    radii: list[float]
    ratios: list[float]
    signed_ratios: list[float]
    directions_used: int
    seed: int

    def __post_init__(self) -> None:
        if not len(self.radii) == len(self.ratios) == len(self.signed_ratios):
            raise ValidationError("radii, ratios and signed_ratios must have the same length", "profile")
        check_radii(self.radii)
        for i, (ratio, signed) in enumerate(zip(self.ratios, self.signed_ratios)):
            if not (math.isfinite(ratio) and math.isfinite(signed)):
                raise ValidationError("ratios must be finite", f"ratios[{i}]")
            if ratio < 0:
                raise ValidationError(f"ratio must not be negative, got {ratio!r}", f"ratios[{i}]")
            if signed > ratio:
                raise ValidationError(f"signed ratio {signed!r} exceeds ratio {ratio!r}", f"signed_ratios[{i}]")

    def rows(self) -> list[tuple[float, float, float]]:
        return list(zip(self.radii, self.ratios, self.signed_ratios))

    def to_dict(self) -> dict[str, Any]:
        return {
            "center": [float(c) for c in self.center],
            "radii": list(self.radii),
            "ratios": list(self.ratios),
            "signed_ratios": list(self.signed_ratios),
            "directions_used": self.directions_used,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> RadialProfile:
        error = best_match(_profile_validator.iter_errors(data))
        if error is not None:
            raise ParseError(error.message, json_path(error.absolute_path))
        return cls(
            as_vector(data["center"], "center"),
            [float(r) for r in data["radii"]],
            [float(r) for r in data["ratios"]],
            [float(r) for r in data["signed_ratios"]],
            int(data["directions_used"]),
            int(data["seed"]),
        )


def check_radii(radii: Sequence[float] | npt.ArrayLike, name: str = "radii") -> npt.NDArray[np.float64]:
    arr = np.asarray(radii, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValidationError("must be a non-empty list of radii", name)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise ValidationError("radii must be positive and finite", name)
    if np.any(np.diff(arr) <= 0):
        raise ValidationError("radii must be strictly increasing", name)
    return arr


def decade_schedule(rmin: float, rmax: float, points_per_decade: int = 1) -> list[float]:
    """Radii spaced evenly in log10 from rmin to rmax, both included."""
    if not (0 < rmin < rmax):
        raise ValidationError(f"need 0 < rmin < rmax, got {rmin} and {rmax}", "radii")
    if points_per_decade < 1:
        raise ValidationError(f"points_per_decade must be positive, got {points_per_decade}", "points_per_decade")
    steps = max(1, round(math.log10(rmax / rmin) * points_per_decade))
    radii = np.logspace(math.log10(rmin), math.log10(rmax), steps + 1)
    radii[0], radii[-1] = rmin, rmax
    return [float(r) for r in radii]


def probe_directions(dim: int, num_random_directions: int, hints: Sequence[npt.ArrayLike], seed: int) -> Points:
    """+-e_i, then the hints, then seeded uniform unit vectors."""
    if num_random_directions < 0:
        raise ValidationError(f"num_random_directions must be nonnegative, got {num_random_directions}", "num_random_directions")
    axes = np.eye(dim)
    blocks: list[Points] = [axes, -axes]
    for i, hint in enumerate(hints):
        u = unit_vector(hint, f"hints[{i}]")
        if u.size != dim:
            raise ValidationError(f"hint has dimension {u.size}, expected {dim}", f"hints[{i}]")
        blocks.append(u.reshape(1, -1))
    rng = np.random.default_rng(seed)
    blocks.append(random_directions(rng, num_random_directions, dim))
    return np.vstack(blocks)


def radial_growth_profile(
    f: Function,
    dim: int,
    radii: Sequence[float],
    num_random_directions: int,
    hints: Sequence[npt.ArrayLike] = (),
    seed: int = 0,
    executor: Executor | None = None,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> RadialProfile:
    """Per radius R, the largest |f(R u)| / R and f(R u) / R over a fixed direction set about the origin."""
    fn = as_function(f)
    schedule = check_radii(radii)
    directions = probe_directions(dim, num_random_directions, hints, seed)
    ratios: list[float] = []
    signed: list[float] = []
    for radius in schedule:
        values = map_rows(fn.evaluate_many, radius * directions, executor, chunk_size)
        ratios.append(float(np.max(np.abs(values)) / radius))
        signed.append(float(np.max(values) / radius))
        logger.debug(f"{fn.function_id}: radius {radius:.6g} ratio {ratios[-1]!r} signed {signed[-1]!r}")
    return RadialProfile(as_vector(np.zeros(dim)), [float(r) for r in schedule], ratios, signed, len(directions), seed)


class VerdictKind(StrEnum):
    GLOBALLY_LIPSCHITZ = "globally_lipschitz"
    DIVERGING = "diverging"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    modulus_estimate: float | None = None
    reason: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "verdict": str(self.kind),
            "modulus_estimate": self.modulus_estimate,
            "estimate_kind": "sampled lower approximation (not certified)",
            "reason": self.reason,
        }


def _tail_rises(radii: Sequence[float], ratios: Sequence[float]) -> list[float]:
    """Relative increase per decade between consecutive entries of the last three radii."""
    rises = []
    for i in range(len(radii) - 3, len(radii) - 1):
        decades = math.log10(radii[i + 1] / radii[i])
        step = ratios[i + 1] - ratios[i]
        if ratios[i] > 0:
            rises.append(step / ratios[i] / decades)
        else:
            rises.append(math.inf if step > 0 else 0.0)
    return rises


def classify_global_lipschitz(
    profile: RadialProfile,
    growth_factor_threshold: float = DEFAULT_GROWTH_FACTOR,
    plateau_rel_tol: float = DEFAULT_PLATEAU_TOL,
) -> Verdict:
    """Diverging, GloballyLipschitz (with a sampled estimate) or Inconclusive.

    The tail counts as a plateau when it rises by at most `plateau_rel_tol` per decade; a
    falling tail is bounded above by its own values and counts as a plateau too.
    """
    radii, ratios = profile.radii, profile.ratios
    if len(radii) < MIN_PROFILE_RADII:
        raise InsufficientProfile(f"need at least {MIN_PROFILE_RADII} radii, got {len(radii)}", "radii")
    span = math.log10(radii[-1] / radii[0])
    if span < MIN_PROFILE_DECADES - 1e-9:
        raise InsufficientProfile(f"radii must span at least {MIN_PROFILE_DECADES:g} decades, got {span:.3g}", "radii")

    if ratios[0] > 0:
        growth = ratios[-1] / ratios[0]
    else:
        growth = math.inf if ratios[-1] > 0 else 1.0
    rises = _tail_rises(radii, ratios)

    if growth > growth_factor_threshold and min(rises) > plateau_rel_tol:
        return Verdict(
            VerdictKind.DIVERGING,
            None,
            f"ratios grew by a factor {growth:.6g} and still rise {min(rises):.6g} per decade; the ball moduli l(r) grow without bound",
        )
    if max(rises) <= plateau_rel_tol:
        estimate = max(ratios[-3:])
        return Verdict(VerdictKind.GLOBALLY_LIPSCHITZ, estimate, f"tail rises at most {max(rises):.6g} per decade")

    verdict = Verdict(
        VerdictKind.INCONCLUSIVE,
        None,
        f"ratios grew by a factor {growth:.6g} (threshold {growth_factor_threshold:g}) and the tail rises up to {max(rises):.6g} per decade (tolerance {plateau_rel_tol:g})",
    )
    logger.warning(f"inconclusive classification: {verdict.reason}")
    return verdict


# Certificate asymptotics ---------------------------------------------------------------------


def asymptotic_bound(alpha: float, lam: float, modulus: float) -> float:
    """alpha / (lambda * (alpha - 1)) * modulus, the large-radius limit bound on shell certificates."""
    if modulus == 0.0:
        return 0.0
    return alpha / (lam * (alpha - 1.0)) * modulus


@dataclass(frozen=True, eq=False)
class CertificateSequence:
    params: EstimatorParams
    delta: float
    certificates: list[LipschitzCertificate]
    reference_modulus: float | None = None
    reference_bound: float | None = None

    @property
    def radii(self) -> list[float]:
        return [cert.ball.radius for cert in self.certificates]

    @property
    def values(self) -> list[float]:
        return [cert.L for cert in self.certificates]

    def rows(self) -> list[tuple[float, float, float | None]]:
        return [(cert.ball.radius, cert.L, self.reference_bound) for cert in self.certificates]

    def to_dict(self) -> dict[str, Any]:
        return {
            "params": self.params.to_dict(),
            "delta": self.delta,
            "reference_modulus": self.reference_modulus,
            "reference_bound": self.reference_bound,
            "sequence": [{"r": r, "L": L, "eval_count": cert.eval_count} for (r, L, _), cert in zip(self.rows(), self.certificates)],
        }


def certificate_sequence(
    f: Function,
    x0: npt.ArrayLike,
    alpha: float,
    delta: float,
    radii: Sequence[float],
    reference_modulus: float | None = None,
    slack: float = DEFAULT_SHELL_SLACK,
    max_grid_points: int = DEFAULT_SHELL_MAX_GRID_POINTS,
    executor: Executor | None = None,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> CertificateSequence:
    """Shell-cover certificates on B(x0, r) for growing r; they approach at most alpha / (lambda (alpha - 1)) * modulus."""
    center = as_vector(x0, "x0")
    schedule = check_radii(radii)
    params = EstimatorParams.for_alpha(alpha, delta)
    certificates = [
        ball_lipschitz_constant(f, Ball(center, float(r)), params, CoverKind.SHELL, slack, max_grid_points, executor, chunk_size) for r in schedule
    ]
    bound = None if reference_modulus is None else asymptotic_bound(params.alpha, params.lam, reference_modulus)
    return CertificateSequence(params, delta, certificates, reference_modulus, bound)


# Subgradients --------------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SubgradientBound:
    value: float
    witness: Vector
    samples: int
    lower_bound_claimed: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "value": self.value,
            "witness": [float(c) for c in self.witness],
            "samples": self.samples,
            "lower_bound_claimed": self.lower_bound_claimed,
        }


def subgradient_lower_bound(f: Function, sample_points: Any) -> SubgradientBound:
    """Largest gradient (or subgradient) norm over the samples.

    Every subgradient norm of a convex function is at most its global modulus, so for convex
    `f` this is a lower bound; for anything else the number is reported without that claim.
    """
    fn = as_function(f)
    points = as_points(sample_points, fn.dim)
    norms = np.array([float(np.linalg.norm(fn.gradient(p))) for p in points])
    best = int(np.argmax(norms))
    if not fn.convex:
        logger.warning(f"{fn.function_id} is not convex: gradient norms do not bound its modulus")
    return SubgradientBound(float(norms[best]), as_vector(points[best]), len(points), fn.convex)
