import math

import numpy as np
import pytest

from biharm.kernels import (axisym_kernel, kernel_row, legendre_mode_kernel,
                            mc_kernel_oracle, mode_kernel_table, radial_kernel)
from biharm.model import RadialGrid


class TestRadialKernel:
    def test_closed_form_values(self):
        # K(r, s) = r_> + r_<^2 / (3 r_>)
        assert radial_kernel(1.0, 1.0) == pytest.approx(4.0 / 3.0)
        assert radial_kernel(2.0, 1.0) == pytest.approx(13.0 / 6.0)
        assert radial_kernel(5.0, 1.0) == pytest.approx(5.0 + 1.0 / 15.0)

    def test_degenerate_radii(self):
        assert radial_kernel(3.0, 0.0) == pytest.approx(3.0)
        assert radial_kernel(0.0, 2.0) == pytest.approx(2.0)
        assert radial_kernel(0.0, 0.0) == 0.0

    def test_symmetry_and_bounds(self):
        rng = np.random.default_rng(7)
        r = rng.uniform(0, 10, 200)
        s = rng.uniform(0, 10, 200)
        k = radial_kernel(r, s)
        np.testing.assert_allclose(k, radial_kernel(s, r), rtol=1e-15)
        assert np.all(k >= np.maximum(r, s) - 1e-12)
        assert np.all(k <= r + s + 1e-12)

    def test_quadrature_oracle(self):
        # direct angular integral of |x - y| over the source sphere
        t, wt = np.polynomial.legendre.leggauss(200)
        r, s = 1.3, 2.7
        vals = np.sqrt(r * r + s * s - 2 * r * s * t)
        assert 0.5 * np.sum(wt * vals) == pytest.approx(radial_kernel(r, s),
                                                        rel=1e-12)


class TestLegendreModes:
    def test_mode_zero_matches_spherical_mean(self):
        r = np.linspace(0.1, 5, 40)
        s = 1.7
        np.testing.assert_allclose(legendre_mode_kernel(0, r, s),
                                   radial_kernel(r, s), rtol=1e-14)

    def test_telescoping_at_aligned_points(self):
        # sum_l K_l P_l(1) = |r - s|, alternating sum = r + s
        r, s = 2.0, 1.0
        total_plus = sum(legendre_mode_kernel(l, r, s) for l in range(80))
        total_minus = sum((-1) ** l * legendre_mode_kernel(l, r, s)
                          for l in range(80))
        assert total_plus == pytest.approx(abs(r - s), abs=1e-10)
        assert total_minus == pytest.approx(r + s, abs=1e-10)

    def test_mode_projection_oracle(self):
        # numerically project |x - y| onto P_l and compare
        t, wt = np.polynomial.legendre.leggauss(400)
        r, s = 1.9, 0.8
        vals = np.sqrt(r * r + s * s - 2 * r * s * t)
        for l in (1, 2, 5, 10):
            pl = np.polynomial.legendre.Legendre.basis(l)(t)
            proj = (2 * l + 1) / 2.0 * np.sum(wt * pl * vals)
            assert proj == pytest.approx(legendre_mode_kernel(l, r, s),
                                         rel=1e-10)

    def test_even_modes_decay_geometrically(self):
        r, s = 3.0, 1.0
        xi = 1.0 / 3.0
        k2 = abs(legendre_mode_kernel(2, r, s))
        k8 = abs(legendre_mode_kernel(8, r, s))
        assert k8 < k2 * xi**5


class TestAxisymKernel:
    def test_coincident_circles_closed_form(self):
        # both points on the unit circle in the same plane: mean chord 4/pi
        assert axisym_kernel(0.0, 1.0, 0.0, 1.0, order=400) == pytest.approx(
            4.0 / math.pi, rel=1e-5)

    def test_degenerate_circle_is_point_distance(self):
        # rho_y = 0 collapses the mean to a single distance
        assert axisym_kernel(1.0, 2.0, -1.0, 0.0) == pytest.approx(
            math.sqrt(4.0 + 4.0), rel=1e-13)

    def test_matches_mc_oracle(self):
        # average over the full source sphere assembled from circles
        t, wt = np.polynomial.legendre.leggauss(64)
        s = 1.4
        x = np.array([0.9, 1.1, 0.0])
        rho_x = math.hypot(x[1], x[2])
        circ = axisym_kernel(x[0], rho_x, s * t, s * np.sqrt(1 - t * t))
        sphere_mean = 0.5 * np.sum(wt * circ)
        mc, se = mc_kernel_oracle(x, s, 200_000, seed=5)
        assert abs(sphere_mean - mc) < 4.0 * se


class TestMCOracle:
    def test_hundred_random_pairs_within_four_sigma(self):
        rng = np.random.default_rng(123)
        worst = 0.0
        for i in range(100):
            r = rng.uniform(0.05, 6.0)
            s = rng.uniform(0.05, 6.0)
            x = rng.standard_normal(3)
            x *= r / np.linalg.norm(x)
            mc, se = mc_kernel_oracle(x, s, 40_000, seed=1000 + i)
            dev = abs(mc - radial_kernel(r, s)) / se
            worst = max(worst, dev)
        assert worst < 4.0

    def test_deterministic_for_fixed_seed(self):
        a = mc_kernel_oracle([1.0, 0, 0], 2.0, 10_000, seed=42)
        b = mc_kernel_oracle([1.0, 0, 0], 2.0, 10_000, seed=42)
        assert a == b


class TestModeTables:
    def test_rows_match_kernel_row(self):
        g = RadialGrid.graded(64, 10.0)
        tables = mode_kernel_table(g, [0, 2, 4], shifted=True)
        for i, l in enumerate([0, 2, 4]):
            row = kernel_row(g.r[17], g, l=l, shifted=True)
            np.testing.assert_allclose(tables[i][17], row, rtol=1e-13)

    def test_shifted_subtracts_source_radius_only_in_mode_zero(self):
        g = RadialGrid.graded(32, 5.0)
        plain = mode_kernel_table(g, [0, 2], shifted=False)
        shifted = mode_kernel_table(g, [0, 2], shifted=True)
        sw = g.r**2 * g.line_w / 2.0
        np.testing.assert_allclose(plain[0] - shifted[0],
                                   np.tile(g.r * sw, (g.n, 1)), rtol=1e-12)
        np.testing.assert_array_equal(plain[1], shifted[1])

    def test_table_applies_the_quadrature(self):
        # mode-0 action on a gaussian density against direct quadrature
        g = RadialGrid.graded(400, 20.0)
        dens = np.exp(-g.r**2)
        tables = mode_kernel_table(g, [0], shifted=False)
        v = tables[0] @ dens
        j = 123
        direct = 0.5 * np.sum(radial_kernel(g.r[j], g.r) * g.r**2
                              * g.line_w * dens)
        assert v[j] == pytest.approx(direct, rel=1e-12)

    def test_shifted_row_vanishes_at_origin_limit(self):
        # K_0(r, s) - s -> 0 as r -> 0
        g = RadialGrid.graded(64, 10.0)
        row = kernel_row(1e-9, g, l=0, shifted=True)
        assert np.max(np.abs(row)) < 1e-9
