"""Tests for the generic frequency-domain Langevin engine."""

import dataclasses

import numpy as np
import pytest

import sqznoise as sq
from sqznoise.errors import ResonantDegenerateError, UnstableSystemError
from sqznoise.lti import QUADRATURE_UNITS, LinearLangevinSystem, OutputTap


def single_pole_system(rate=0.5, weight=1.0):
    return LinearLangevinSystem(
        state_labels=("v",),
        drift=[[-rate]],
        input_coupling=[[weight]],
        port_labels=("in",),
        port_density=[0.5],
        output_taps=(OutputTap("out", weights=[weight], feedthrough=[1.0]),),
    )


class TestFrequencyResponse:
    def test_static_limit_of_single_pole(self):
        system = single_pole_system()
        resp = sq.frequency_response(system, 0.0)
        assert resp.states[0, 0] == pytest.approx(2.0, abs=1e-15)

    def test_ideal_dpa_phase_response_dc(self, fig2_params):
        system = sq.build_ideal_dpa(fig2_params)
        resp = sq.frequency_response(system, 0.0)
        j = system.port_labels.index("Y_in")
        i = system.state_labels.index("Y")
        assert resp.states[i, j] == pytest.approx(1.25, abs=1e-14)

    def test_ideal_dpa_output_tap_dc(self, fig2_params):
        system = sq.build_ideal_dpa(fig2_params)
        resp = sq.frequency_response(system, 0.0)
        j = system.port_labels.index("Y_in")
        out = resp.outputs[system.tap_index("Y_out"), j]
        assert out == pytest.approx(-0.25, abs=1e-14)
        assert abs(out) ** 2 == pytest.approx(1.0 / 16.0, abs=1e-14)

    @pytest.mark.parametrize("sigma", [0.0, 0.3, 0.6, 0.9])
    def test_output_tap_matches_susceptibility(self, sigma):
        params = sq.DeviceParams(
            sigma=sigma, omega_m=0.2, gamma_m=1e-3, nu=1e-3, g0=0.0, n_signal=1.0
        )
        system = sq.build_ideal_dpa(params)
        resp = sq.frequency_response(system, 0.0)
        out = resp.outputs[0, system.port_labels.index("Y_in")]
        assert abs(out) == pytest.approx((1 - sigma) / (1 + sigma), abs=1e-13)

    def test_solver_residual_on_random_stable_systems(self, rng):
        for _ in range(25):
            n = int(rng.integers(2, 7))
            a = rng.normal(size=(n, n))
            a -= (np.max(np.linalg.eigvals(a).real) + 0.2) * np.eye(n)
            b = rng.normal(size=(n, n))
            system = LinearLangevinSystem(
                state_labels=tuple(f"s{i}" for i in range(n)),
                drift=a,
                input_coupling=b,
                port_labels=tuple(f"p{i}" for i in range(n)),
                port_density=np.full(n, 0.5),
                output_taps=(OutputTap("out", weights=b[:, 0], feedthrough=np.eye(n)[0]),),
            )
            for w in rng.uniform(-5, 5, size=4):
                resp = sq.frequency_response(system, float(w))
                residual = (-1j * w * np.eye(n) - a) @ resp.states - b
                assert np.max(np.abs(residual)) < 1e-10

    def test_singular_solve_reports_offending_frequency(self):
        system = LinearLangevinSystem(
            state_labels=("x", "p"),
            drift=[[0.0, 1.0], [-1.0, 0.0]],
            input_coupling=np.eye(2),
            port_labels=("a", "b"),
            port_density=[0.5, 0.5],
            output_taps=(OutputTap("out", weights=[1.0, 0.0], feedthrough=[1.0, 0.0]),),
        )
        with pytest.raises(ResonantDegenerateError, match="omega = 1.0"):
            sq.frequency_response(system, 1.0)


class TestOutputSpectrum:
    def test_decoupled_reflection_is_shot_noise(self):
        # feedthrough-only tap: vacuum reflected off a far-detuned port
        system = LinearLangevinSystem(
            state_labels=("v",),
            drift=[[-1.0]],
            input_coupling=[[0.0]],
            port_labels=("in",),
            port_density=[0.5],
            output_taps=(OutputTap("out", weights=[0.0], feedthrough=[1.0]),),
        )
        series = sq.output_spectrum(system, 0, np.linspace(-4, 4, 101))
        assert series.units == QUADRATURE_UNITS
        np.testing.assert_allclose(series.values, 0.5, atol=1e-15)

    def test_dpa_floor_dc_value(self):
        params = sq.DeviceParams(
            sigma=0.6, omega_m=0.2, gamma_m=1e-3, nu=1e-3, g0=0.0, n_signal=1.0
        )
        system = sq.build_ideal_dpa(params)
        series = sq.output_spectrum(system, 0, [0.0])
        assert series.values[0] == pytest.approx(0.03125, abs=1e-14)

    def test_floor_reverts_to_shot_noise_far_out(self):
        params = sq.DeviceParams(
            sigma=0.6, omega_m=0.2, gamma_m=1e-3, nu=1e-3, g0=0.0, n_signal=1.0
        )
        system = sq.build_ideal_dpa(params)
        series = sq.output_spectrum(system, 0, [-1000.0, 1000.0])
        np.testing.assert_allclose(series.values, 0.5, atol=1e-6)

    def test_spectra_are_even(self, fig2_params):
        grid = np.linspace(-4.0, 4.0, 801)
        for build in (sq.build_ideal_dpa, sq.build_adiabatic_model):
            series = sq.output_spectrum(build(fig2_params), 0, grid)
            np.testing.assert_allclose(
                series.values, series.values[::-1], rtol=0, atol=1e-12
            )
        full = sq.build_full_model(dataclasses.replace(fig2_params, kappa_p=30.0))
        series = sq.output_spectrum(full, 0, grid)
        np.testing.assert_allclose(series.values, series.values[::-1], rtol=0, atol=1e-12)

    def test_refuses_unstable_system(self, fig2_params):
        above = dataclasses.replace(fig2_params, sigma=1.2)
        system = sq.build_ideal_dpa(above, allow_above_threshold=True)
        with pytest.raises(UnstableSystemError) as err:
            sq.output_spectrum(system, 0, [0.0])
        assert err.value.max_real_part == pytest.approx(0.1, abs=1e-12)

    def test_empty_grid_rejected(self, fig2_params):
        system = sq.build_ideal_dpa(fig2_params)
        with pytest.raises(ValueError, match="empty"):
            sq.output_spectrum(system, 0, [])

    def test_closed_form_floor_matches_lti(self, fig2_params):
        # dual path at the spectrum level, mechanics decoupled
        params = dataclasses.replace(fig2_params, g0=0.0)
        grid = np.linspace(-3, 3, 601)
        lti_vals = sq.output_spectrum(sq.build_ideal_dpa(params), 0, grid).values
        chi_y = sq.phase_susceptibility(grid, params.sigma)
        closed = 0.5 * np.abs(1 - chi_y) ** 2
        np.testing.assert_allclose(lti_vals, closed, rtol=0, atol=1e-12)


class TestStability:
    def test_ideal_dpa_eigenvalues(self):
        params = sq.DeviceParams(
            sigma=0.5, omega_m=0.3, gamma_m=1e-3, nu=1e-3, g0=1e-5, n_signal=100.0
        )
        report = sq.stability_eigenvalues(sq.build_ideal_dpa(params))
        assert report.stable
        real_only = sorted(e.real for e in report.eigenvalues if abs(e.imag) < 1e-12)
        assert real_only == pytest.approx([-0.75, -0.25], abs=1e-12)
        mech = sorted(e for e in report.eigenvalues if abs(e.imag) > 1e-12,
                      key=lambda z: z.imag)
        assert mech[1] == pytest.approx(-5e-4 + 0.3j, abs=1e-12)
        assert report.min_decay_rate == pytest.approx(2 * 5e-4, abs=1e-12)

    def test_above_threshold_is_unstable(self, fig2_params):
        above = dataclasses.replace(fig2_params, sigma=1.2)
        report = sq.stability_eigenvalues(
            sq.build_ideal_dpa(above, allow_above_threshold=True)
        )
        assert not report.stable
        assert np.max(report.eigenvalues.real) == pytest.approx(0.1, abs=1e-12)

    def test_full_model_stable_slightly_above_threshold(self):
        # pump-signal admixture pushes the instability to 1 + 4 (nu sqrt(ns))^2 / kp
        params = sq.DeviceParams(
            sigma=1.05, omega_m=0.2, gamma_m=1e-3, nu=0.03, g0=1e-5,
            kappa_p=5.0, n_signal=100.0,
        )
        report = sq.stability_eigenvalues(sq.build_full_model(params))
        assert report.stable


class TestSpectrumArea:
    def test_constant_series(self):
        width = 6.0
        grid = np.linspace(-width, width, 301)
        series = sq.SpectrumSeries(
            omega=grid, values=np.full(grid.size, 0.3), units=QUADRATURE_UNITS
        )
        with pytest.warns(UserWarning, match="unconverged-area"):
            area = sq.spectrum_area(series)
        assert area == pytest.approx(0.3 * width / np.pi, rel=1e-12)

    @pytest.mark.parametrize("n_th,expected", [(0.0, 1.0), (10.0, 21.0)])
    def test_thermal_variance(self, n_th, expected):
        # oracle: Lyapunov equilibrium of the damped oscillator, <x~^2> = 2 n_th + 1
        params = sq.DeviceParams(
            sigma=0.4, omega_m=0.2, gamma_m=1e-3, nu=1e-3, g0=0.0,
            n_signal=10.0, n_th=n_th,
        )
        grid = sq.variance_grid(params.omega_m, params.gamma_m)
        series = sq.output_spectrum(sq.build_ideal_dpa(params), 1, grid)
        assert series.units == "x_zpf2_per_kappa"
        area = sq.spectrum_area(series)
        assert area == pytest.approx(expected, rel=1e-3)

    def test_narrow_grid_warns(self):
        params = sq.DeviceParams(
            sigma=0.0, omega_m=0.2, gamma_m=1e-3, nu=1e-3, g0=0.0, n_signal=1.0
        )
        grid = sq.mechanical_zoom_grid(0.2, 1e-3, span_gammas=50, points=401)
        series = sq.output_spectrum(sq.build_ideal_dpa(params), 1, grid)
        with pytest.warns(UserWarning, match="unconverged-area"):
            sq.spectrum_area(series)


class TestValidation:
    def test_port_density_must_be_nonnegative(self):
        with pytest.raises(ValueError, match="non-negative"):
            LinearLangevinSystem(
                state_labels=("v",),
                drift=[[-1.0]],
                input_coupling=[[1.0]],
                port_labels=("in",),
                port_density=[-0.5],
                output_taps=(),
            )

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError, match="drift"):
            LinearLangevinSystem(
                state_labels=("a", "b"),
                drift=[[-1.0]],
                input_coupling=[[1.0]],
                port_labels=("in",),
                port_density=[0.5],
                output_taps=(),
            )

    def test_spectrum_series_requires_sorted_grid(self):
        with pytest.raises(ValueError, match="strictly increasing"):
            sq.SpectrumSeries(omega=[0.0, 0.0], values=[1.0, 1.0], units="quadrature")
