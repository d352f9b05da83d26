# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Jeff Culverhouse
"""Balls in R^n and finite point sets whose convex hull contains them.

Containment is checked through support functions: for convex sets A and B, A is a subset
of B exactly when h_B(u) >= h_A(u) for every unit direction u, and the support function of
a ball of radius R about the base point is the constant R.
"""
from __future__ import annotations

import math
from collections.abc import Iterable
from concurrent.futures import Executor
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Any

import numpy as np
import numpy.typing as npt
from json_logging import get_logger

from lipcert.chunks import DEFAULT_CHUNK_SIZE, map_rows
from lipcert.errors import CoverConstructionFailed, DimensionUnsupported, EmptyPointSet, ValidationError

Vector = npt.NDArray[np.float64]
Points = npt.NDArray[np.float64]

UNIT_TOLERANCE = 1e-12
SHELL_DIMENSIONS = (2, 3, 4)
DEFAULT_SHELL_MAX_GRID_POINTS = 60_000
# keeps the greedy acceptance angle strictly inside delta - eta despite dot-product rounding
ANGLE_GUARD = 1e-9

logger = get_logger(__name__)


def as_vector(values: Iterable[float] | npt.ArrayLike, name: str = "vector") -> Vector:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1 or arr.size < 1:
        raise ValidationError("must be a non-empty list of numbers", name)
    if not np.all(np.isfinite(arr)):
        raise ValidationError("coordinates must be finite", name)
    arr.flags.writeable = False
    return arr


def as_points(values: Any, dim: int | None = None, name: str = "points") -> Points:
    arr = np.array(values, dtype=np.float64)
    if arr.size == 0:
        raise EmptyPointSet("point set is empty", name)
    if arr.ndim == 1 and dim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ValidationError("must be a list of points", name)
    if dim is not None and arr.shape[1] != dim:
        raise ValidationError(f"points have dimension {arr.shape[1]}, expected {dim}", name)
    if not np.all(np.isfinite(arr)):
        raise ValidationError("coordinates must be finite", name)
    arr.flags.writeable = False
    return arr


def unit_vector(values: Iterable[float] | npt.ArrayLike, name: str = "direction") -> Vector:
    vec = np.array(as_vector(values, name))
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        raise ValidationError("direction must be nonzero", name)
    return as_vector(vec / norm, name)


@dataclass(frozen=True, eq=False)
class Ball:
    center: Vector
    radius: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "center", as_vector(self.center, "center"))
        radius = float(self.radius)
        if not (math.isfinite(radius) and radius > 0):
            raise ValidationError(f"radius must be positive, got {self.radius}", "radius")
        object.__setattr__(self, "radius", radius)

    @property
    def dim(self) -> int:
        return int(self.center.size)

    def scaled(self, factor: float) -> Ball:
        return Ball(self.center, self.radius * factor)

    def to_dict(self) -> dict[str, Any]:
        return {"center": [float(c) for c in self.center], "radius": self.radius}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Ball:
        return cls(as_vector(data["center"], "center"), data["radius"])


class CoverKind(StrEnum):
    CROSS = "cross"
    SIMPLEX = "simplex"
    SHELL = "shell"


@dataclass(frozen=True, eq=False)
class Cover:
    kind: CoverKind
    points: Points
    target: Ball
    outer_radius: float
    slack: float | None = None
    details: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", CoverKind(self.kind))
        object.__setattr__(self, "points", as_points(self.points, self.target.dim))

    @property
    def dim(self) -> int:
        return self.target.dim

    @property
    def size(self) -> int:
        return int(self.points.shape[0])

    def to_dict(self, include_points: bool = True) -> dict[str, Any]:
        data: dict[str, Any] = {
            "kind": str(self.kind),
            "target": self.target.to_dict(),
            "outer_radius": self.outer_radius,
            "size": self.size,
        }
        if self.slack is not None:
            data["slack"] = self.slack
        if self.details:
            data["details"] = dict(self.details)
        if include_points:
            data["points"] = [[float(c) for c in row] for row in self.points]
        return data


def _make_cover(kind: CoverKind, target: Ball, points: Points, slack: float | None = None, details: dict[str, float] | None = None) -> Cover:
    outer = float(np.max(np.linalg.norm(points - target.center, axis=1)))
    return Cover(kind, points, target, outer, slack, details or {})


# Cross-polytope and simplex ------------------------------------------------------------------


def build_cross_polytope_cover(ball_to_cover: Ball) -> Cover:
    """The 2n points x0 +- n*R*e_i, ordered +e_1, -e_1, +e_2, ..."""
    n = ball_to_cover.dim
    axes = np.eye(n) * (n * ball_to_cover.radius)
    offsets = np.stack([axes, -axes], axis=1).reshape(2 * n, n)
    return _make_cover(CoverKind.CROSS, ball_to_cover, ball_to_cover.center + offsets)


def simplex_frame(n: int) -> Points:
    """Unit vertices of a regular n-simplex centred at the origin.

    The first vertex is the all-ones direction 1/sqrt(n); vertex i+1 is
    sqrt(1 + 1/n) e_i - (sqrt(n+1) + 1) / n^(3/2) * 1. Pairwise inner products are -1/n.
    """
    if n < 1:
        raise ValidationError(f"dimension must be positive, got {n}", "dim")
    if n == 1:
        return np.array([[1.0], [-1.0]])
    top = np.full((1, n), 1.0 / math.sqrt(n))
    shift = (math.sqrt(n + 1) + 1) / n**1.5
    rest = math.sqrt(1 + 1 / n) * np.eye(n) - shift
    return np.vstack([top, rest])


def build_simplex_cover(ball_to_cover: Ball) -> Cover:
    # a regular n-simplex with circumradius n*R has inradius R
    n = ball_to_cover.dim
    points = ball_to_cover.center + (n * ball_to_cover.radius) * simplex_frame(n)
    return _make_cover(CoverKind.SIMPLEX, ball_to_cover, points)


# Shell covers --------------------------------------------------------------------------------


def polygon_vertex_count(radius: float, outer: float) -> int:
    """Smallest m >= 3 with outer * cos(pi / m) >= radius."""
    m = max(3, math.ceil(math.pi / math.acos(radius / outer)))
    while outer * math.cos(math.pi / m) < radius:
        m += 1
    while m > 3 and outer * math.cos(math.pi / (m - 1)) >= radius:
        m -= 1
    return m


def cube_grid_directions(n: int, resolution: int) -> Points:
    """Nodes of a (resolution+1)^(n-1) grid on every face of [-1, 1]^n, pushed onto the sphere."""
    ticks = np.linspace(-1.0, 1.0, resolution + 1)
    mesh = np.meshgrid(*([ticks] * (n - 1)), indexing="ij")
    free = np.column_stack([g.ravel() for g in mesh])
    faces = []
    for axis in range(n):
        for sign in (1.0, -1.0):
            face = np.insert(free, axis, sign, axis=1)
            faces.append(face)
    nodes = np.unique(np.vstack(faces), axis=0)
    return nodes / np.linalg.norm(nodes, axis=1, keepdims=True)


def grid_covering_angle(n: int, resolution: int) -> float:
    # every point of a face lies within sqrt(n-1)/resolution of a node, and radial
    # projection from outside the unit ball does not increase distances
    chord = math.sqrt(n - 1) / resolution
    return 2.0 * math.asin(min(1.0, chord / 2.0))


def greedy_sphere_covering(n: int, delta: float, max_grid_points: int = DEFAULT_SHELL_MAX_GRID_POINTS) -> tuple[Points, dict[str, float]]:
    """Unit directions such that every unit vector is within angle `delta` of one of them.

    The candidate grid has covering angle eta <= delta/2; greedily chosen grid nodes must
    reach every node within delta - eta, which then covers the whole sphere within delta.
    """
    resolution = max(2, math.ceil(math.sqrt(n - 1) / (2.0 * math.sin(delta / 4.0))))
    expected = 2 * n * (resolution + 1) ** (n - 1)
    if expected > max_grid_points:
        raise CoverConstructionFailed(
            f"shell cover in dimension {n} needs a {resolution}-step grid (~{expected} points) for angle {delta:.6g}, limit is {max_grid_points}"
        )

    grid = cube_grid_directions(n, resolution)
    eta = grid_covering_angle(n, resolution)
    reach = delta - eta - ANGLE_GUARD
    if reach <= 0:
        raise CoverConstructionFailed(f"grid covering angle {eta:.6g} leaves no room inside delta {delta:.6g}")
    cos_reach = math.cos(reach)

    covered = np.zeros(len(grid), dtype=bool)
    chosen: list[int] = []
    for i in range(len(grid)):
        if covered[i]:
            continue
        chosen.append(i)
        covered |= grid @ grid[i] >= cos_reach
    directions = grid[chosen]

    # independent re-check of every node against the final direction set
    best = map_rows(lambda block: np.max(block @ directions.T, axis=1), grid, chunk_size=1024)
    if np.any(best < cos_reach):
        raise CoverConstructionFailed(f"greedy covering left {int(np.sum(best < cos_reach))} grid nodes uncovered")

    logger.debug(f"greedy covering in dimension {n}: {len(directions)} directions from {len(grid)} grid nodes (delta={delta:.6g}, eta={eta:.6g})")
    return directions, {"delta": delta, "eta": eta, "grid_points": float(len(grid)), "grid_resolution": float(resolution)}


def build_shell_cover(ball_to_cover: Ball, slack: float, max_grid_points: int = DEFAULT_SHELL_MAX_GRID_POINTS) -> Cover:
    n = ball_to_cover.dim
    if n not in SHELL_DIMENSIONS:
        raise DimensionUnsupported(f"shell covers are available in dimensions 2 to 4, got {n}", "dim")
    slack = float(slack)
    if not (math.isfinite(slack) and slack > 0):
        raise ValidationError(f"slack must be positive, got {slack}", "slack")

    radius = ball_to_cover.radius
    # all points sit on the outermost allowed sphere, which allows the widest angular gap
    outer = radius + slack
    delta = math.acos(radius / outer)

    if n == 2:
        m = polygon_vertex_count(radius, outer)
        angles = 2.0 * math.pi * np.arange(m) / m
        directions = np.column_stack([np.cos(angles), np.sin(angles)])
        details = {"delta": math.pi / m, "vertices": float(m)}
    else:
        directions, details = greedy_sphere_covering(n, delta, max_grid_points)

    points = ball_to_cover.center + outer * directions
    return _make_cover(CoverKind.SHELL, ball_to_cover, points, slack=slack, details=details)


def build_cover(kind: CoverKind | str, ball_to_cover: Ball, slack: float = 1.0, max_grid_points: int = DEFAULT_SHELL_MAX_GRID_POINTS) -> Cover:
    match CoverKind(kind):
        case CoverKind.CROSS:
            return build_cross_polytope_cover(ball_to_cover)
        case CoverKind.SIMPLEX:
            return build_simplex_cover(ball_to_cover)
        case CoverKind.SHELL:
            return build_shell_cover(ball_to_cover, slack, max_grid_points)


# Support functions ---------------------------------------------------------------------------


def support_function(points: Any, base: Any, direction: Any) -> float:
    base_vec = as_vector(base, "base")
    pts = as_points(points, base_vec.size)
    u = as_vector(direction, "direction")
    if u.size != base_vec.size:
        raise ValidationError(f"direction has dimension {u.size}, expected {base_vec.size}", "direction")
    if abs(float(np.linalg.norm(u)) - 1.0) > UNIT_TOLERANCE:
        raise ValidationError("direction must have unit norm", "direction")
    return float(np.max((pts - base_vec) @ u))


def support_values(points: Points, base: Vector, directions: Points) -> npt.NDArray[np.float64]:
    """Support function of `points` about `base` for each row of `directions`."""
    return np.max((points - base) @ directions.T, axis=0)


def random_directions(rng: np.random.Generator, count: int, dim: int) -> Points:
    raw = rng.standard_normal((count, dim))
    norms = np.linalg.norm(raw, axis=1, keepdims=True)
    # a zero Gaussian draw has probability zero; map it to e_1 rather than divide by zero
    raw[norms[:, 0] == 0.0, 0] = 1.0
    norms[norms == 0.0] = 1.0
    return raw / norms


@dataclass(frozen=True, eq=False)
class ContainmentReport:
    margin: float
    worst_direction: Vector
    num_directions: int
    seed: int
    kind: CoverKind

    @property
    def contained(self) -> bool:
        return self.margin >= -UNIT_TOLERANCE

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": str(self.kind),
            "margin": self.margin,
            "worst_direction": [float(c) for c in self.worst_direction],
            "num_directions": self.num_directions,
            "seed": self.seed,
            "contained": self.contained,
        }


def cover_containment_check(
    cover: Cover,
    num_directions: int,
    seed: int,
    executor: Executor | None = None,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> ContainmentReport:
    """Smallest sampled value of support_S(u) - target.radius.

    A negative margin disproves containment; a nonnegative one is only evidence.
    """
    if num_directions < 1:
        raise ValidationError(f"num_directions must be positive, got {num_directions}", "num_directions")
    rng = np.random.default_rng(seed)
    directions = random_directions(rng, num_directions, cover.dim)
    base = cover.target.center
    supports = map_rows(lambda block: support_values(cover.points, base, block), directions, executor, chunk_size)
    margins = supports - cover.target.radius
    worst = int(np.argmin(margins))
    logger.debug(f"{cover.kind} cover with {cover.size} points: min margin {margins[worst]:.6g} over {num_directions} directions")
    return ContainmentReport(float(margins[worst]), as_vector(directions[worst]), num_directions, seed, cover.kind)
