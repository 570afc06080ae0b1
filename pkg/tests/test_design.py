"""Tests for photon-budget optima, noise minimization, and sweeps."""

import math

import numpy as np
import pytest

import sqznoise as sq
from sqznoise.design import _added_noise


def design_params(c_thr=0.1, omega_m=0.1, n_ratio=1.0):
    nu, gamma = 1e-3, 1e-3
    return sq.DeviceParams(
        sigma=0.0,
        omega_m=omega_m,
        gamma_m=gamma,
        nu=nu,
        g0=nu * math.sqrt(c_thr * gamma),
        n_total=n_ratio * 0.25 / nu**2,
    )


class TestSqlBudget:
    @pytest.mark.parametrize(
        "sigma,omega_m,expected",
        [(0.0, 0.1, 2.6), (0.6, 0.2, 1.16), (5 / 7, 0.1, 0.8142857)],
    )
    def test_required_photon_number(self, sigma, omega_m, expected):
        params = design_params(omega_m=omega_m)
        assert sq.n_sql_of_sigma(sigma, params) == pytest.approx(expected, abs=1e-7)

    def test_rejects_sigma_outside_range(self):
        with pytest.raises(ValueError):
            sq.n_sql_of_sigma(1.0, design_params())


class TestOptimalPoint:
    def test_reference_optimum(self):
        report = sq.optimal_point(design_params())
        assert report.sigma_star == pytest.approx(5 / 7, abs=1e-15)
        assert report.n_star == pytest.approx(0.8142857, abs=1e-7)
        assert report.suppression == pytest.approx(3.1930, abs=1e-3)
        assert report.method_tag == "analytic"

    def test_suppression_is_photon_ratio(self):
        report = sq.optimal_point(design_params())
        ratio = sq.n_sql_of_sigma(0.0, design_params()) / report.n_star
        assert report.suppression == pytest.approx(ratio, rel=1e-12)

    def test_large_cooperativity(self):
        report = sq.optimal_point(design_params(c_thr=10.0))
        assert report.sigma_star == pytest.approx(1 / 41, rel=1e-12)
        assert report.suppression == pytest.approx(1.024, abs=1e-3)

    def test_bad_cavity_extreme(self):
        # formal Omega -> 0 limit: saving approaches 1 / (1 - sigma*)
        params = design_params(omega_m=1e-9)
        report = sq.optimal_point(params)
        assert report.suppression == pytest.approx(
            1 / (1 - report.sigma_star), rel=1e-9
        )

    def test_suppression_monotone_in_cooperativity(self):
        values = [
            sq.optimal_point(design_params(c_thr=c)).suppression
            for c in np.geomspace(1e-4, 10.0, 30)
        ]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_curve_ends_at_sigma_star(self):
        report = sq.optimal_point(design_params())
        n_last, sigma_last = report.sigma_opt_curve[-1]
        assert n_last == pytest.approx(report.n_star, rel=1e-12)
        assert sigma_last == pytest.approx(report.sigma_star, abs=1e-9)


class TestSigmaOpt:
    def test_matches_sigma_star_at_n_star(self):
        params = design_params()
        report = sq.optimal_point(params)
        assert sq.sigma_opt(report.n_star, params) == pytest.approx(5 / 7, abs=1e-9)

    def test_vanishes_with_photon_budget(self):
        params = design_params()
        assert sq.sigma_opt(1e-12, params) == pytest.approx(0.0, abs=1e-11)

    def test_half_threshold_budget(self):
        params = design_params()
        expected = 0.77 - math.sqrt(0.5929 - 0.5)
        assert sq.sigma_opt(0.5, params) == pytest.approx(expected, abs=1e-6)

    def test_monotone_in_photon_number(self):
        params = design_params()
        grid = np.linspace(0.01, 0.8142857, 60)
        values = [sq.sigma_opt(float(n), params) for n in grid]
        assert all(a < b for a, b in zip(values, values[1:]))


class TestMinimizeAddedNoise:
    @pytest.mark.parametrize("n_ratio", [0.1, 0.3, 0.5, 0.8142857])
    def test_matches_analytic_optimum(self, n_ratio):
        params = design_params()
        sigma_min, s_min = sq.minimize_added_noise(params, n_ratio, "ideal")
        assert sigma_min == pytest.approx(sq.sigma_opt(n_ratio, params), abs=1e-6)

    def test_reaches_sql_at_n_star(self):
        params = design_params()
        _, s_min = sq.minimize_added_noise(params, 0.8142857, "ideal")
        assert s_min == pytest.approx(1.0, abs=1e-6)

    def test_stationarity_of_analytic_optimum(self):
        params = design_params()
        for n_ratio in (0.1, 0.3, 0.5, 0.8142857):
            s_opt = sq.sigma_opt(n_ratio, params)
            h = 1e-5
            derivative = (
                _added_noise(s_opt + h, n_ratio, params, "ideal")
                - _added_noise(s_opt - h, n_ratio, params, "ideal")
            ) / (2 * h)
            assert abs(derivative) < 1e-6

    def test_standard_scheme_budget_reaches_sql(self):
        # sigma pinned at zero with the photon number of the unsqueezed SQL
        params = design_params()
        assert _added_noise(0.0, 2.6, params, "ideal") == pytest.approx(1.0, rel=1e-12)

    def test_lossy_minimum_sits_between_ideal_and_standard(self):
        params = sq.DeviceParams(
            sigma=0.0, omega_m=0.1, gamma_m=1e-3, nu=1e-3,
            g0=1e-3 * math.sqrt(0.1 * 1e-3),
            kappa_p=20.0, kappa_abs=0.01, n_total=0.25e6,
        )
        _, ideal_min = sq.minimize_added_noise(params, 1.0, "ideal")
        _, lossy_min = sq.minimize_added_noise(params, 1.0, "lossy")
        no_squeeze = _added_noise(0.0, 1.0, params, "ideal")
        assert ideal_min < lossy_min < no_squeeze

    def test_empty_budget_rejected(self):
        with pytest.raises(sq.errors.InfeasibleError):
            sq.minimize_added_noise(design_params(), 0.0, "ideal")


class TestNoiseMap:
    def test_sql_cell(self):
        params = design_params(omega_m=0.2)
        noise_map = sq.sweep_noise_map(params, [1.16], [0.6])
        assert noise_map.s_add[0, 0] == pytest.approx(1.0, rel=1e-12)
        assert noise_map.feasible[0, 0]

    def test_single_cell_has_no_extracted_curves(self):
        params = design_params()
        noise_map = sq.sweep_noise_map(params, [1.0], [0.5])
        assert noise_map.s_add.shape == (1, 1)
        assert np.isnan(noise_map.sql_contour_extracted).all()

    def test_infeasible_cells_masked(self):
        params = design_params()
        noise_map = sq.sweep_noise_map(params, [0.25, 1.0], [0.4, 0.9])
        assert not noise_map.feasible[0, 1]  # 0.25 < 0.81
        assert np.isnan(noise_map.s_add[0, 1])
        assert noise_map.feasible[1, 1]

    def test_extracted_curves_match_analytic_within_grid_cell(self):
        params = design_params()
        n_grid = np.linspace(0.05, 3.0, 120)
        s_grid = np.linspace(0.0, 0.95, 96)
        noise_map = sq.sweep_noise_map(params, n_grid, s_grid)
        dn = n_grid[1] - n_grid[0]
        ds = s_grid[1] - s_grid[0]
        ok = np.isfinite(noise_map.sql_contour_extracted)
        assert ok.sum() > 40
        assert np.all(
            np.abs(
                noise_map.sql_contour_extracted[ok]
                - noise_map.sql_contour_analytic[ok]
            )
            <= dn + 1e-12
        )
        ok = np.isfinite(noise_map.ridge_analytic)
        assert np.all(
            np.abs(noise_map.ridge_extracted[ok] - noise_map.ridge_analytic[ok])
            <= ds + 1e-12
        )

    def test_below_n_star_noise_exceeds_sql(self):
        params = design_params()
        n_star = sq.optimal_point(params).n_star
        n_grid = np.linspace(0.05, n_star * 0.98, 40)
        s_grid = np.linspace(0.0, 0.95, 40)
        noise_map = sq.sweep_noise_map(params, n_grid, s_grid)
        feasible_values = noise_map.s_add[noise_map.feasible]
        assert np.all(feasible_values > 1.0)


class TestCooperativitySweep:
    def test_reference_no_squeezing_point(self):
        params = design_params()
        sweep = sq.sweep_cooperativity(params, [0.13])
        assert sweep.s_add_nosqueeze[0] == pytest.approx(1.25, rel=1e-12)

    def test_scenario_ordering(self):
        params = design_params()
        sweep = sq.sweep_cooperativity(params, np.geomspace(0.01, 10.0, 9))
        assert np.all(sweep.s_add_ideal <= sweep.s_add_nosqueeze + 1e-12)
        assert np.all(sweep.s_add_lossy >= sweep.s_add_ideal - 1e-12)

    def test_lossy_scenario_uses_absorption_scale(self):
        # kappa_abs defaults to Omega^2 / kappa_s for the lossy curve
        params = design_params()
        sweep_default = sq.sweep_cooperativity(params, [0.1])
        sweep_custom = sq.sweep_cooperativity(params, [0.1], lossy_kappa_abs=0.01)
        assert sweep_default.s_add_lossy[0] == pytest.approx(
            sweep_custom.s_add_lossy[0], rel=1e-12
        )
