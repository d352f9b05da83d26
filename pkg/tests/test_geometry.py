# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Jeff Culverhouse
import math
import pytest

import numpy as np

from lipcert.errors import CoverConstructionFailed, DimensionUnsupported, EmptyPointSet, ValidationError
from lipcert.geometry import (
    Ball,
    CoverKind,
    as_points,
    build_cover,
    build_cross_polytope_cover,
    build_shell_cover,
    build_simplex_cover,
    cover_containment_check,
    greedy_sphere_covering,
    polygon_vertex_count,
    simplex_frame,
    support_function,
    support_values,
)


class TestBall:
    @pytest.mark.parametrize("radius", [0.0, -1.0, math.inf, math.nan])
    def test_rejects_bad_radius(self, radius):
        with pytest.raises(ValidationError, match="radius must be positive"):
            Ball([0.0, 0.0], radius)

    def test_center_is_read_only(self):
        ball = Ball([1.0, 2.0], 3.0)
        with pytest.raises(ValueError):
            ball.center[0] = 5.0

    def test_scaled_keeps_center(self):
        ball = Ball([1.0, 2.0], 3.0).scaled(2.0)
        assert ball.radius == 6.0
        assert ball.center.tolist() == [1.0, 2.0]

    def test_empty_point_set(self):
        with pytest.raises(EmptyPointSet):
            as_points([], 2)


class TestCrossPolytope:
    def test_points_and_order(self):
        cover = build_cross_polytope_cover(Ball([1.0, -1.0], 0.5))
        assert cover.size == 4
        assert cover.points.tolist() == [[2.0, -1.0], [0.0, -1.0], [1.0, 0.0], [1.0, -2.0]]
        assert cover.outer_radius == 1.0

    def test_margin_along_diagonal(self):
        """Support of conv{+-2e_1, +-2e_2} along the diagonal is sqrt(2)."""
        cover = build_cover("cross", Ball([0.0, 0.0], 1.0))
        report = cover_containment_check(cover, 100_000, seed=3)
        assert report.contained
        assert report.margin == pytest.approx(math.sqrt(2.0) - 1.0, abs=1e-3)
        assert abs(report.worst_direction[0]) == pytest.approx(abs(report.worst_direction[1]), abs=1e-2)


class TestSimplex:
    @pytest.mark.parametrize("n", [1, 2, 3, 4, 7])
    def test_frame_is_regular(self, n):
        frame = simplex_frame(n)
        assert frame.shape == (n + 1, n)
        np.testing.assert_allclose(np.linalg.norm(frame, axis=1), 1.0, atol=1e-12)
        gram = frame @ frame.T
        off_diagonal = gram[~np.eye(n + 1, dtype=bool)]
        np.testing.assert_allclose(off_diagonal, -1.0 / n, atol=1e-12)

    def test_inradius_matches_ball(self):
        cover = build_simplex_cover(Ball([0.5, 0.5, 0.5], 2.0))
        assert cover.size == 4
        assert cover.outer_radius == pytest.approx(6.0)
        report = cover_containment_check(cover, 100_000, seed=11)
        assert report.contained
        assert 0.0 <= report.margin < 0.1


class TestShell:
    def test_octagon_for_unit_ball(self):
        """R=1 and slack 0.1 need exactly eight vertices: 1.1 cos(pi/7) < 1 <= 1.1 cos(pi/8)."""
        assert polygon_vertex_count(1.0, 1.1) == 8
        cover = build_shell_cover(Ball([0.0, 0.0], 1.0), slack=0.1)
        assert cover.size == 8
        assert cover.details["vertices"] == 8
        np.testing.assert_allclose(np.linalg.norm(cover.points, axis=1), 1.1, rtol=1e-15)

    def test_octagon_margin(self):
        cover = build_shell_cover(Ball([0.0, 0.0], 1.0), slack=0.1)
        report = cover_containment_check(cover, 100_000, seed=5)
        assert report.contained
        assert report.margin == pytest.approx(1.1 * math.cos(math.pi / 8) - 1.0, abs=1e-3)

    @pytest.mark.parametrize("n", [3, 4])
    def test_greedy_shell_contains_ball(self, n):
        cover = build_shell_cover(Ball(np.zeros(n), 1.0), slack=1.0)
        assert cover.details["eta"] <= cover.details["delta"] / 2
        np.testing.assert_allclose(np.linalg.norm(cover.points, axis=1), 2.0, rtol=1e-12)
        report = cover_containment_check(cover, 100_000, seed=7)
        assert report.margin >= -1e-12

    def test_shell_points_scale_with_center(self):
        cover = build_shell_cover(Ball([10.0, -10.0, 3.0], 2.0), slack=1.0)
        np.testing.assert_allclose(np.linalg.norm(cover.points - cover.target.center, axis=1), 3.0, rtol=1e-12)

    def test_unsupported_dimension(self):
        with pytest.raises(DimensionUnsupported):
            build_shell_cover(Ball(np.zeros(5), 1.0), slack=1.0)
        with pytest.raises(DimensionUnsupported):
            build_shell_cover(Ball([0.0], 1.0), slack=1.0)

    def test_bad_slack(self):
        with pytest.raises(ValidationError, match="slack"):
            build_shell_cover(Ball([0.0, 0.0], 1.0), slack=0.0)

    def test_grid_limit(self):
        with pytest.raises(CoverConstructionFailed, match="limit"):
            greedy_sphere_covering(3, 0.01, max_grid_points=1000)

    def test_large_radius_exceeds_grid(self):
        with pytest.raises(CoverConstructionFailed):
            build_cover(CoverKind.SHELL, Ball(np.zeros(3), 1e4), slack=1.0, max_grid_points=60_000)


class TestContainmentAllKinds:
    @pytest.mark.parametrize("kind", list(CoverKind))
    @pytest.mark.parametrize("n", [2, 3])
    def test_every_kind_contains_ball(self, kind, n):
        cover = build_cover(kind, Ball(np.arange(n, dtype=float), 1.5), slack=1.0)
        report = cover_containment_check(cover, 100_000, seed=42)
        assert report.margin >= -1e-12
        assert report.to_dict()["contained"] is True

    def test_missing_point_is_caught(self):
        cover = build_cross_polytope_cover(Ball([0.0, 0.0], 1.0))
        # dropping +2e_1 leaves the ball poking out along e_1
        lopsided = cover.points[1:]
        support = support_values(lopsided, np.zeros(2), np.array([[1.0, 0.0]]))
        assert support[0] < 1.0


class TestCoverEquivariance:
    """Covers move with the center and stretch with the radius.

    Built about the origin, shifting or scaling by a power of two is exact in floating
    point. About a general center, (x0 + t) + o and (x0 + o) + t may round differently,
    so those cases agree to within an ulp of the coordinates.
    """

    CASES = [(CoverKind.CROSS, n) for n in (1, 2, 3, 4)] + [(CoverKind.SIMPLEX, n) for n in (1, 2, 3, 4)] + [(CoverKind.SHELL, 2), (CoverKind.SHELL, 3)]

    @pytest.mark.parametrize("kind, n", CASES)
    def test_translation_from_origin_is_exact(self, rng, kind, n):
        shift = rng.uniform(-10.0, 10.0, size=n)
        here = build_cover(kind, Ball(np.zeros(n), 1.3), slack=1.3)
        there = build_cover(kind, Ball(shift, 1.3), slack=1.3)
        assert np.array_equal(here.points + shift, there.points)

    @pytest.mark.parametrize("kind, n", CASES)
    def test_translation_within_an_ulp(self, rng, kind, n):
        center = rng.uniform(-1.0, 1.0, size=n)
        shift = rng.uniform(-1.0, 1.0, size=n)
        here = build_cover(kind, Ball(center, 1.3), slack=1.3)
        there = build_cover(kind, Ball(center + shift, 1.3), slack=1.3)
        magnitude = max(np.max(np.abs(here.points)), np.max(np.abs(there.points)))
        np.testing.assert_allclose(here.points + shift, there.points, rtol=0, atol=4 * np.spacing(magnitude))

    @pytest.mark.parametrize("kind, n", CASES)
    @pytest.mark.parametrize("scale", [0.25, 4.0, 1024.0])
    def test_dyadic_scaling_is_exact(self, kind, n, scale):
        small = build_cover(kind, Ball(np.zeros(n), 0.75), slack=0.75)
        large = build_cover(kind, Ball(np.zeros(n), 0.75 * scale), slack=0.75 * scale)
        assert np.array_equal(small.points * scale, large.points)

    @pytest.mark.parametrize("kind, n", CASES)
    def test_scaling_about_a_center(self, kind, n):
        center = np.linspace(-0.5, 0.5, n)
        small = build_cover(kind, Ball(center, 0.6), slack=0.6)
        large = build_cover(kind, Ball(center, 1.8), slack=1.8)
        np.testing.assert_allclose(3.0 * (small.points - center), large.points - center, rtol=1e-14, atol=1e-14)


class TestSupportFunction:
    def test_value(self):
        points = [[1.0, 0.0], [0.0, 3.0], [-2.0, -2.0]]
        assert support_function(points, [0.0, 0.0], [0.0, 1.0]) == 3.0
        assert support_function(points, [1.0, 1.0], [-1.0, 0.0]) == 3.0

    def test_requires_unit_direction(self):
        with pytest.raises(ValidationError, match="unit norm"):
            support_function([[1.0, 0.0]], [0.0, 0.0], [2.0, 0.0])

    def test_dimension_mismatch(self):
        with pytest.raises(ValidationError):
            support_function([[1.0, 0.0]], [0.0, 0.0], [1.0, 0.0, 0.0])
