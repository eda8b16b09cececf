import json
import math

import numpy as np
import pytest

from biharm.model import (AxisymmetricGrid, ConfigError, GridSpec, Profile,
                          QuadraticPolynomial, RadialGrid, SolveConfig,
                          load_profile_csv, report_json, save_profile_csv,
                          validate_config, x_norm)


def _cfg(**over):
    base = {
        "q": 2.0,
        "poly": {"a": [1.0, 2.0, 2.0], "b": [0.0, 0.0, 0.0], "c": 1.0,
                 "eps_quartic": 0.0},
        "kernel_variant": "shifted",
        "grid": {"kind": "axisymmetric", "n_r": 32, "n_angle": 8,
                 "r_max": 10.0},
    }
    base.update(over)
    return SolveConfig.from_dict(base)


class TestPolynomial:
    def test_cartesian_and_spherical_evaluations_agree(self):
        p = QuadraticPolynomial((1.0, 2.0, 2.0), (0, 0, 0), 0.7, 0.05)
        rng = np.random.default_rng(1)
        r = rng.uniform(0.1, 5.0, 40)
        t = rng.uniform(-1.0, 1.0, 40)
        pts = np.stack([r * t, r * np.sqrt(1 - t**2), np.zeros(40)], axis=-1)
        np.testing.assert_allclose(p(pts), p.value_rt(r, t), rtol=1e-13)

    def test_radial_evaluation(self):
        p = QuadraticPolynomial((3.0, 3.0, 3.0), (0, 0, 0), 2.0, 0.1)
        r = np.array([0.0, 1.0, 2.0])
        np.testing.assert_allclose(p.value_radial(r),
                                   2.0 + 3.0 * r**2 + 0.1 * r**4)

    def test_value_rt_rejects_non_axisymmetric(self):
        p = QuadraticPolynomial((1.0, 2.0, 3.0), (0, 0, 0), 1.0)
        with pytest.raises(ConfigError):
            p.value_rt(np.ones(3), np.zeros(3))

    def test_growth_order(self):
        flat = QuadraticPolynomial((0, 0, 0), (0, 0, 0), 1.0)
        degenerate = QuadraticPolynomial((0, 1, 1), (0, 0, 0), 1.0)
        quad = QuadraticPolynomial((1, 2, 2), (0, 0, 0), 1.0)
        quartic = QuadraticPolynomial((1, 2, 2), (0, 0, 0), 1.0, 0.5)
        assert flat.growth_order() == 0
        assert degenerate.growth_order() == 0
        assert quad.growth_order() == 2
        assert quartic.growth_order() == 4
        assert quartic.tail_leading_coeff() == 0.5
        assert quad.tail_leading_coeff() == 1.0

    def test_pohozaev_weight_matches_finite_differences(self):
        # 2 x . grad P - P, checked against a directional derivative
        p = QuadraticPolynomial((1.0, 2.0, 2.0), (0, 0, 0), 0.9, 0.02)
        r, t = 1.7, 0.4
        h = 1e-6
        dil = (p.value_rt(np.array(r * (1 + h)), np.array(t))
               - p.value_rt(np.array(r * (1 - h)), np.array(t))) / (2 * h)
        expect = 2.0 * dil - p.value_rt(np.array(r), np.array(t))
        got = p.pohozaev_weight_rt(np.array(r), np.array(t))
        assert got == pytest.approx(expect, rel=1e-8)

    def test_with_eps_variants(self):
        p = QuadraticPolynomial((0, 1, 1), (0, 0, 0), 1.0)
        assert p.with_eps("quartic", 0.3).eps_quartic == 0.3
        assert p.with_eps("axis1", 0.3).a == (0.3, 1.0, 1.0)
        assert p.with_eps("isotropic", 0.3).a == (0.3, 0.3, 0.3)
        with pytest.raises(ConfigError):
            p.with_eps("nope", 0.3)


class TestGrids:
    def test_radial_quadrature_integrates_gaussian(self):
        g = RadialGrid.graded(800, 30.0)
        val = g.integrate(np.exp(-g.r**2))
        assert val == pytest.approx(math.pi**1.5, rel=1e-6)

    def test_axisymmetric_quadrature_integrates_gaussian(self):
        g = AxisymmetricGrid.build(400, 16, 30.0)
        f = np.exp(-(g.x1**2 + g.rho**2))
        assert g.integrate(f) == pytest.approx(math.pi**1.5, rel=1e-6)

    def test_angular_nodes_mirror_bit_exactly(self):
        g = AxisymmetricGrid.build(16, 64, 5.0)
        assert np.all(g.t == -g.t[::-1])
        assert np.all(g.wt == g.wt[::-1])

    def test_grading_clusters_nodes_at_origin(self):
        g = RadialGrid.graded(100, 10.0, 2.0)
        assert g.r[0] == pytest.approx(10.0 / 100**2)
        assert np.all(np.diff(g.r) > 0)

    def test_grid_spec_roundtrip(self):
        spec = GridSpec("axisymmetric", 32, 10.0, 2.0, 8)
        again = GridSpec.from_dict(spec.to_dict())
        assert again == spec
        assert isinstance(again.build(), AxisymmetricGrid)


class TestProfileIO:
    def test_radial_roundtrip(self, tmp_path):
        g = RadialGrid.graded(64, 8.0)
        prof = Profile(grid=g, values=np.cos(g.r), symmetry="radial")
        path = tmp_path / "p.csv"
        save_profile_csv(prof, path)
        back = load_profile_csv(path, g)
        np.testing.assert_array_equal(back.values, prof.values)

    def test_axisymmetric_roundtrip(self, tmp_path):
        g = AxisymmetricGrid.build(16, 8, 5.0)
        vals = np.cos(g.x1) + g.rho
        prof = Profile(grid=g, values=vals, symmetry="even")
        path = tmp_path / "p.csv"
        save_profile_csv(prof, path)
        back = load_profile_csv(path, g)
        np.testing.assert_array_equal(back.values, vals)

    def test_grid_mismatch_is_config_error(self, tmp_path):
        g = RadialGrid.graded(64, 8.0)
        save_profile_csv(Profile(grid=g, values=np.ones(64),
                                 symmetry="radial"), tmp_path / "p.csv")
        other = RadialGrid.graded(64, 9.0)
        with pytest.raises(ConfigError):
            load_profile_csv(tmp_path / "p.csv", other)

    def test_shape_mismatch_is_config_error(self):
        g = RadialGrid.graded(64, 8.0)
        with pytest.raises(ConfigError):
            Profile(grid=g, values=np.ones(65), symmetry="radial")


class TestXNorm:
    def test_weighted_sup(self):
        g = RadialGrid.graded(50, 10.0)
        v = 3.0 * (1.0 + g.r)
        prof = Profile(grid=g, values=v, symmetry="radial")
        assert x_norm(prof) == pytest.approx(3.0)


class TestValidation:
    def test_clean_config_passes(self):
        # q m > 4 with growth order 2 needs q > 2
        res = validate_config(_cfg(q=3.0))
        assert res.ok and not res.warnings

    def test_q_at_most_one_hits_the_gate(self):
        res = validate_config(_cfg(q=1.0))
        assert not res.ok
        assert res.nonexistence_regime
        assert "nonexistence" in res.gate_failures[0]

    def test_negative_q_is_hard_error(self):
        res = validate_config(_cfg(q=-2.0))
        assert res.hard_errors

    def test_quadratic_gate_needs_mq_above_four(self):
        # growth order 2 with q = 2 leaves the first moment divergent
        cfg = _cfg(q=2.0, poly={"a": [1.0, 1.0, 1.0], "b": [0, 0, 0],
                                "c": 1.0},
                   grid={"kind": "radial", "n_r": 32, "r_max": 10.0})
        res = validate_config(cfg)
        assert not res.ok and res.gate_failures
        ok = validate_config(_cfg(q=3.0, poly={"a": [1.0, 1.0, 1.0],
                                               "b": [0, 0, 0], "c": 1.0},
                                  grid={"kind": "radial", "n_r": 32,
                                        "r_max": 10.0}))
        assert ok.ok

    def test_quartic_term_opens_the_gate(self):
        cfg = _cfg(q=2.0, poly={"a": [1.0, 1.0, 1.0], "b": [0, 0, 0],
                                "c": 1.0, "eps_quartic": 0.1},
                   grid={"kind": "radial", "n_r": 32, "r_max": 10.0})
        assert validate_config(cfg).ok

    def test_continuation_gates_the_stage_not_the_limit(self):
        cfg = _cfg(q=2.0, continuation={"eps_sequence": [0.1, 0.03],
                                        "eps_param": "quartic"})
        assert validate_config(cfg).ok

    def test_flat_polynomial_warns_for_large_q(self):
        cfg = _cfg(q=5.0, poly={"a": [0.0, 0.0, 0.0], "b": [0, 0, 0],
                                "c": 1.0},
                   grid={"kind": "radial", "n_r": 32, "r_max": 10.0})
        res = validate_config(cfg)
        assert res.ok and res.warnings

    def test_flat_polynomial_small_q_fails_gate(self):
        cfg = _cfg(q=2.5, poly={"a": [0.0, 0.0, 0.0], "b": [0, 0, 0],
                                "c": 1.0},
                   grid={"kind": "radial", "n_r": 32, "r_max": 10.0})
        res = validate_config(cfg)
        assert not res.ok and res.gate_failures

    def test_nonpositive_polynomial_is_hard_error(self):
        res = validate_config(_cfg(poly={"a": [1.0, 2.0, 2.0], "b": [0, 0, 0],
                                         "c": -1.0}))
        assert res.hard_errors

    def test_odd_polynomial_is_hard_error(self):
        res = validate_config(_cfg(poly={"a": [1.0, 2.0, 2.0],
                                         "b": [0.5, 0, 0], "c": 1.0}))
        assert res.hard_errors

    def test_increasing_eps_sequence_is_hard_error(self):
        res = validate_config(_cfg(continuation={"eps_sequence": [0.01, 0.1]}))
        assert res.hard_errors

    def test_malformed_config_raises(self):
        with pytest.raises(ConfigError):
            SolveConfig.from_dict({"q": 2.0})


class TestReportJson:
    def test_fixed_precision_and_sorted_keys(self, tmp_path):
        doc = {"b": 1.0 / 3.0, "a": {"x": np.float64(2.5)},
               "nanval": float("nan")}
        text1 = report_json(doc, tmp_path / "r.json")
        text2 = report_json(doc)
        assert text1 == text2
        loaded = json.loads(text1)
        assert loaded["nanval"] is None
        assert abs(loaded["b"] - 1.0 / 3.0) < 1e-11
        assert text1.index('"a"') < text1.index('"b"')
