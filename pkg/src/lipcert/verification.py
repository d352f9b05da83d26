# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Jeff Culverhouse
"""Sampling oracles that try to falsify what the estimator claims.

Every check is seeded and deterministic, and none of them proves anything: a passing check
means no counterexample was found among the samples.
"""
from __future__ import annotations

from collections.abc import Sequence
from concurrent.futures import Executor
from dataclasses import dataclass
from enum import StrEnum
from typing import Any

import numpy as np
import numpy.typing as npt
from json_logging import get_logger

from lipcert.chunks import DEFAULT_CHUNK_SIZE, map_rows
from lipcert.errors import ValidationError
from lipcert.estimator import Function, LipschitzCertificate, check_radii, probe_directions
from lipcert.geometry import Ball, Points, Vector, as_points, as_vector, random_directions, unit_vector
from lipcert.zoo import as_function

RELATIVE_TOLERANCE = 1e-9
# near-boundary diameter pairs sit in the outer 2% of the radius
BOUNDARY_BAND = 0.02
DEFAULT_FD_STEP = 1e-6

logger = get_logger(__name__)


def _vec(v: Vector) -> list[float]:
    return [float(c) for c in v]


def sample_ball(rng: np.random.Generator, ball: Ball, count: int) -> Points:
    """Uniform points in the ball: Gaussian direction times radius * U^(1/n)."""
    n = ball.dim
    directions = random_directions(rng, count, n)
    radii = ball.radius * rng.random(count) ** (1.0 / n)
    return ball.center + directions * radii[:, None]


def pair_ratio(f: Function, x: npt.ArrayLike, y: npt.ArrayLike) -> float:
    """|f(x) - f(y)| / ||x - y||, 0 for coincident points."""
    fn = as_function(f)
    xv, yv = as_vector(x, "x"), as_vector(y, "y")
    distance = float(np.linalg.norm(xv - yv))
    if distance == 0.0:
        return 0.0
    return abs(fn.evaluate(xv) - fn.evaluate(yv)) / distance


@dataclass(frozen=True, eq=False)
class RatioReport:
    max_ratio: float
    witness_pair: tuple[Vector, Vector]
    pairs_tested: int
    seed: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "max_ratio": self.max_ratio,
            "witness_pair": [_vec(self.witness_pair[0]), _vec(self.witness_pair[1])],
            "pairs_tested": self.pairs_tested,
            "seed": self.seed,
        }


def _diameter_pairs(rng: np.random.Generator, ball: Ball, count: int, hints: Sequence[Vector]) -> tuple[Points, Points]:
    n = ball.dim
    # a quarter of the diameters follow the hints in turn
    hinted = count // 4 if hints else 0
    blocks = []
    if hinted:
        blocks.append(np.array([hints[i % len(hints)] for i in range(hinted)], dtype=np.float64).reshape(hinted, n))
    blocks.append(random_directions(rng, count - hinted, n))
    directions = np.vstack(blocks)

    # half the pairs anywhere on the diameter, half near its ends
    s = rng.uniform(-1.0, 1.0, size=(count, 2))
    near = rng.random(count) < 0.5
    sides = np.where(rng.random((count, 2)) < 0.5, -1.0, 1.0)
    band = sides * (1.0 - BOUNDARY_BAND * rng.random((count, 2)))
    s[near] = band[near]
    xs = ball.center + ball.radius * s[:, :1] * directions
    ys = ball.center + ball.radius * s[:, 1:] * directions
    return xs, ys


def empirical_lipschitz_ratio(
    f: Function,
    ball: Ball,
    num_pairs: int,
    seed: int,
    hints: Sequence[npt.ArrayLike] | None = None,
    executor: Executor | None = None,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> RatioReport:
    """Largest sampled |f(x) - f(y)| / ||x - y|| over pairs in the ball, a lower bound on its modulus there.

    Half the pairs are uniform in the ball, half lie on diameters (random or hinted directions).
    Hints default to the function's analytic direction hints.
    """
    if num_pairs < 1:
        raise ValidationError(f"num_pairs must be positive, got {num_pairs}", "num_pairs")
    fn = as_function(f)
    if hints is None:
        hints = list(fn.analytic_info().direction_hints)
    unit_hints = [unit_vector(h, "hints") for h in hints]
    unit_hints = [h for h in unit_hints if h.size == ball.dim]

    rng = np.random.default_rng(seed)
    uniform = num_pairs // 2
    xs_u, ys_u = sample_ball(rng, ball, uniform), sample_ball(rng, ball, uniform)
    xs_d, ys_d = _diameter_pairs(rng, ball, num_pairs - uniform, unit_hints)
    xs, ys = np.vstack([xs_u, xs_d]), np.vstack([ys_u, ys_d])

    fx = map_rows(fn.evaluate_many, xs, executor, chunk_size)
    fy = map_rows(fn.evaluate_many, ys, executor, chunk_size)
    distances = np.linalg.norm(xs - ys, axis=1)
    ratios = np.zeros(num_pairs)
    np.divide(np.abs(fx - fy), distances, out=ratios, where=distances > 0)
    best = int(np.argmax(ratios))

    x, y = as_vector(xs[best]), as_vector(ys[best])
    # re-evaluate the witness one point at a time so the report reproduces exactly
    max_ratio = pair_ratio(fn, x, y)
    logger.debug(f"{fn.function_id}: max ratio {max_ratio!r} over {num_pairs} pairs in ball of radius {ball.radius}")
    return RatioReport(max_ratio, (x, y), num_pairs, seed)


# Convexity -----------------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ConvexityViolation:
    x: Vector
    y: Vector
    lam: float
    violation: float

    def to_dict(self) -> dict[str, Any]:
        return {"x": _vec(self.x), "y": _vec(self.y), "lambda": self.lam, "violation": self.violation}


def convexity_gap(f: Function, x: npt.ArrayLike, y: npt.ArrayLike, lam: float) -> float:
    """f(lam x + (1 - lam) y) - (lam f(x) + (1 - lam) f(y)); positive means the chord lies below f."""
    fn = as_function(f)
    xv, yv = as_vector(x, "x"), as_vector(y, "y")
    return fn.evaluate(lam * xv + (1.0 - lam) * yv) - (lam * fn.evaluate(xv) + (1.0 - lam) * fn.evaluate(yv))


@dataclass(frozen=True, eq=False)
class ConvexityReport:
    counterexample: ConvexityViolation | None
    triples_tested: int
    seed: int

    @property
    def ok(self) -> bool:
        return self.counterexample is None

    def to_dict(self) -> dict[str, Any]:
        return {
            "ok": self.ok,
            "counterexample": None if self.counterexample is None else self.counterexample.to_dict(),
            "triples_tested": self.triples_tested,
            "seed": self.seed,
        }


def convexity_check(
    f: Function,
    region: Ball,
    num_triples: int,
    seed: int,
    executor: Executor | None = None,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> ConvexityReport:
    """Worst sampled violation of the convexity inequality beyond 1e-9 * (1 + |f(x)| + |f(y)|), if any."""
    if num_triples < 1:
        raise ValidationError(f"num_triples must be positive, got {num_triples}", "num_triples")
    fn = as_function(f)
    rng = np.random.default_rng(seed)
    xs, ys = sample_ball(rng, region, num_triples), sample_ball(rng, region, num_triples)
    lams = rng.random(num_triples)
    zs = lams[:, None] * xs + (1.0 - lams)[:, None] * ys

    fx = map_rows(fn.evaluate_many, xs, executor, chunk_size)
    fy = map_rows(fn.evaluate_many, ys, executor, chunk_size)
    fz = map_rows(fn.evaluate_many, zs, executor, chunk_size)
    excess = fz - (lams * fx + (1.0 - lams) * fy) - RELATIVE_TOLERANCE * (1.0 + np.abs(fx) + np.abs(fy))
    worst = int(np.argmax(excess))
    if excess[worst] <= 0:
        return ConvexityReport(None, num_triples, seed)

    x, y, lam = as_vector(xs[worst]), as_vector(ys[worst]), float(lams[worst])
    violation = ConvexityViolation(x, y, lam, convexity_gap(fn, x, y, lam))
    logger.warning(f"{fn.function_id} violates convexity by {violation.violation:.6g} at lambda={lam:.6g}")
    return ConvexityReport(violation, num_triples, seed)


# Certificates --------------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SoundnessReport:
    passed: bool
    L: float
    ratio: RatioReport

    def to_dict(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "L": self.L,
            "tolerance": RELATIVE_TOLERANCE,
            "ratio": self.ratio.to_dict(),
        }


def certificate_soundness_suite(
    f: Function,
    certificate: LipschitzCertificate,
    num_pairs: int,
    seed: int,
    executor: Executor | None = None,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> SoundnessReport:
    """Passes iff no sampled pair in the certificate's ball beats L * (1 + 1e-9)."""
    report = empirical_lipschitz_ratio(f, certificate.ball, num_pairs, seed, executor=executor, chunk_size=chunk_size)
    passed = report.max_ratio <= certificate.L * (1.0 + RELATIVE_TOLERANCE)
    if not passed:
        logger.warning(f"certificate L={certificate.L!r} for {certificate.function_id} beaten by sampled ratio {report.max_ratio!r}")
    return SoundnessReport(passed, certificate.L, report)


# Constancy -----------------------------------------------------------------------------------


class ConstancyVerdict(StrEnum):
    CONSISTENT_WITH_CONSTANT = "consistent_with_constant"
    UNBOUNDED_ABOVE = "unbounded_above"
    BOUNDED_WITNESSED = "bounded_witnessed"


@dataclass(frozen=True, eq=False)
class ConstancyReport:
    verdict: ConstancyVerdict
    f_at_origin: float
    maxima: list[float]
    minima: list[float]
    radii: list[float]
    bound: float | None = None

    @property
    def summary(self) -> str:
        match self.verdict:
            case ConstancyVerdict.CONSISTENT_WITH_CONSTANT:
                return "sampled values are consistent with a constant function (evidence, not proof)"
            case ConstancyVerdict.UNBOUNDED_ABOVE:
                return "sampled maxima keep growing with the radius: not bounded above, hence not constant"
            case ConstancyVerdict.BOUNDED_WITNESSED:
                return f"sampled values stay below {self.bound!r} yet vary; a convex function bounded above is constant, so f is not convex"

    def to_dict(self) -> dict[str, Any]:
        return {
            "verdict": str(self.verdict),
            "summary": self.summary,
            "bound": self.bound,
            "f_at_origin": self.f_at_origin,
            "radii": list(self.radii),
            "maxima": list(self.maxima),
            "minima": list(self.minima),
        }


def corollary_constancy_check(
    f: Function,
    dim: int,
    probe_radii: Sequence[float],
    directions: int,
    seed: int,
    executor: Executor | None = None,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> ConstancyReport:
    """Probe f on growing spheres: constant, unbounded above, or bounded but varying."""
    fn = as_function(f)
    radii = check_radii(probe_radii, "probe_radii")
    hints = [h for h in fn.analytic_info().direction_hints if h.size == dim]
    probes = probe_directions(dim, directions, hints, seed)
    f0 = fn.evaluate(np.zeros(dim))

    maxima, minima = [], []
    for radius in radii:
        values = map_rows(fn.evaluate_many, radius * probes, executor, chunk_size)
        maxima.append(float(np.max(values)))
        minima.append(float(np.min(values)))

    top, bottom = max(f0, *maxima), min(f0, *minima)
    tolerance = RELATIVE_TOLERANCE * (1.0 + abs(f0))
    tail = maxima[-3:]
    schedule = [float(r) for r in radii]
    if top - bottom <= tolerance:
        return ConstancyReport(ConstancyVerdict.CONSISTENT_WITH_CONSTANT, f0, maxima, minima, schedule)
    # rising maxima only imply unbounded above for convex f
    if fn.convex and len(tail) >= 2 and all(b > a for a, b in zip(tail, tail[1:])) and maxima[-1] > f0 + tolerance:
        return ConstancyReport(ConstancyVerdict.UNBOUNDED_ABOVE, f0, maxima, minima, schedule)
    return ConstancyReport(ConstancyVerdict.BOUNDED_WITNESSED, f0, maxima, minima, schedule, top)


# Gradients -----------------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GradientCheckReport:
    max_rel_error: float
    worst_point: Vector
    points_tested: int

    def to_dict(self) -> dict[str, Any]:
        return {"max_rel_error": self.max_rel_error, "worst_point": _vec(self.worst_point), "points_tested": self.points_tested}


def finite_difference_gradient(f: Function, x: npt.ArrayLike, h: float = DEFAULT_FD_STEP) -> Vector:
    fn = as_function(f)
    point = as_vector(x, "x")
    steps = h * np.eye(point.size)
    forward = fn.evaluate_many(point + steps)
    backward = fn.evaluate_many(point - steps)
    return as_vector((forward - backward) / (2.0 * h))


def gradient_check(f: Function, points: Any, h: float = DEFAULT_FD_STEP) -> GradientCheckReport:
    """Largest ||fd - grad||_inf / max(1, ||grad||_inf) over the points, fd being central differences."""
    fn = as_function(f)
    rows = as_points(points, fn.dim)
    errors = []
    for row in rows:
        analytic = fn.gradient(row)
        numeric = finite_difference_gradient(fn, row, h)
        errors.append(float(np.max(np.abs(numeric - analytic))) / max(1.0, float(np.max(np.abs(analytic)))))
    worst = int(np.argmax(errors))
    return GradientCheckReport(errors[worst], as_vector(rows[worst]), len(rows))
