"""Closed-form susceptibilities, output spectra, and measurement noise budgets.

Every quantity here has a dual evaluation path: these closed forms on one
side and the generic LTI solver on the other.  Thermal and backaction
position spectra use the split-damping mechanical form (Gamma/2 on both
quadratures) so the two paths agree exactly; the textbook mechanical
susceptibility is exposed separately and differs from the split form by
bounded O(Gamma/Omega) terms.

Spectral conventions: symmetrized densities, vacuum quadrature floor 1/2,
position spectra in x_ZPF^2 / kappa_s units, SQL density 2 / Gamma in those
units.  All rates in kappa_s = 1 units.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from . import lti
from .devices import DeviceParams, build_model
from .errors import (
    AboveThresholdError,
    LossExceedsLinewidthError,
    PhotonBudgetError,
)
from .lti import (
    POSITION_UNITS,
    PRODUCT_UNITS,
    QUADRATURE_UNITS,
    SQL_UNITS,
    SpectrumSeries,
)


@dataclass(frozen=True)
class NoiseBudget:
    """Imprecision, backaction, and added noise in SQL units."""

    s_imp: float
    s_back: float
    s_add: float
    eval_frequency: float
    model_tag: str  # "ideal" | "adiabatic" | "full-numeric"


# --- susceptibilities -------------------------------------------------------


def phase_susceptibility(omega, sigma: float):
    """Intracavity response of the de-amplified phase quadrature.

    chi_Y(w) = 1 / (-i w + (1 + sigma) / 2); the DC magnitude is suppressed
    by at most a factor of two relative to the bare cavity.
    """
    w = np.asarray(omega, dtype=float)
    out = 1.0 / (-1j * w + (1.0 + sigma) / 2.0)
    return out if w.ndim else complex(out)


def amplitude_susceptibility(omega, sigma: float):
    """chi_X(w) = 1 / (-i w + (1 - sigma) / 2) for the amplified quadrature."""
    w = np.asarray(omega, dtype=float)
    out = 1.0 / (-1j * w + (1.0 - sigma) / 2.0)
    return out if w.ndim else complex(out)


def mechanical_susceptibility(omega, omega_m: float, gamma_m: float):
    """Zero-point mechanical response, 2 Omega / (Omega^2 - w^2 + i w Gamma).

    Normalized so the resonant magnitude is 2 / Gamma: the position response
    in x_ZPF units to a force in zero-point force units.
    """
    if omega_m <= 0 or gamma_m <= 0:
        raise ValueError("omega_m and gamma_m must be positive")
    w = np.asarray(omega, dtype=float)
    out = 2.0 * omega_m / (omega_m**2 - w**2 + 1j * w * gamma_m)
    return out if w.ndim else complex(out)


def mechanical_susceptibility_split(omega, omega_m: float, gamma_m: float):
    """Split-damping variant matching the LTI mechanical block exactly."""
    if omega_m <= 0 or gamma_m <= 0:
        raise ValueError("omega_m and gamma_m must be positive")
    w = np.asarray(omega, dtype=float)
    out = 2.0 * omega_m / ((-1j * w + gamma_m / 2.0) ** 2 + omega_m**2)
    return out if w.ndim else complex(out)


# --- position-side spectra (x_ZPF^2 / kappa_s units) ------------------------


def position_spectrum_thermal(omega, omega_m: float, gamma_m: float, n_th: float):
    """Thermal position spectrum of the split-damping oscillator.

    Integrates (over dw / 2 pi) to the equilibrium variance 2 n_th + 1.
    """
    w = np.asarray(omega, dtype=float)
    denom = np.abs((-1j * w + gamma_m / 2.0) ** 2 + omega_m**2) ** 2
    return gamma_m * (2.0 * n_th + 1.0) * (w**2 + gamma_m**2 / 4.0 + omega_m**2) / denom


def force_spectrum(omega, params: DeviceParams):
    """Radiation-pressure force spectrum in zero-point units.

    S_FF(w) = g0^2 n_s kappa_s |chi_X|^2; unchanged by internal loss because
    the amplitude quadrature sees the full linewidth of vacuum noise.
    """
    chi_x = amplitude_susceptibility(omega, params.sigma)
    return params.g0**2 * params.n_signal_resolved * np.abs(chi_x) ** 2


def position_spectrum_backaction(omega, params: DeviceParams):
    """Backaction position spectrum, split-damping form."""
    w = np.asarray(omega, dtype=float)
    om = params.omega_m
    denom = np.abs((-1j * w + params.gamma_m / 2.0) ** 2 + om**2) ** 2
    return 4.0 * om**2 * force_spectrum(w, params) / denom


def _position_spectrum_total(omega, params: DeviceParams):
    return position_spectrum_thermal(
        omega, params.omega_m, params.gamma_m, params.n_th
    ) + position_spectrum_backaction(omega, params)


# --- output phase spectra ---------------------------------------------------


def _require_below_threshold(params: DeviceParams) -> None:
    if params.sigma >= 1.0:
        raise AboveThresholdError(
            f"sigma = {params.sigma:g} is at or above the oscillation threshold"
        )
    if params.n_signal_resolved < 0:
        raise PhotonBudgetError(
            f"negative signal photon number {params.n_signal_resolved:g}"
        )


def shot_floor_spectrum(omega, params: DeviceParams, lossy: bool = False):
    """Mechanics-free output phase noise (the imprecision floor), quadrature units.

    Lossless: (1/2) |1 - kappa_s chi_Y|^2.  With loss the detected port sees
    the interference term through kappa_in plus vacuum leaking in from the
    loss port: (1/2) [|1 - kappa_in chi_Y|^2 + kappa_in kappa_loss |chi_Y|^2].
    """
    chi_y = phase_susceptibility(omega, params.sigma)
    kl = params.kappa_loss if lossy else 0.0
    kin = 1.0 - kl
    if kin <= 0:
        raise LossExceedsLinewidthError(
            f"kappa_loss = {kl:g} reaches the total linewidth kappa_s = 1"
        )
    return 0.5 * (np.abs(1.0 - kin * chi_y) ** 2 + kin * kl * np.abs(chi_y) ** 2)


def output_phase_spectrum_ideal(params: DeviceParams, omega_grid) -> SpectrumSeries:
    """Closed-form detected phase spectrum of the lossless model."""
    _require_below_threshold(params)
    w = np.asarray(omega_grid, dtype=float)
    chi_y = phase_susceptibility(w, params.sigma)
    gain = 2.0 * params.n_signal_resolved * params.g0**2 * np.abs(chi_y) ** 2
    values = shot_floor_spectrum(w, params) + gain * _position_spectrum_total(w, params)
    return SpectrumSeries(omega=w, values=values, units=QUADRATURE_UNITS)


def output_phase_spectrum_lossy(params: DeviceParams, omega_grid) -> SpectrumSeries:
    """Closed-form detected phase spectrum of the adiabatic lossy model.

    Reduces to the ideal spectrum when kappa_loss = 0 and matches the LTI
    evaluation of the adiabatic system at machine precision.
    """
    _require_below_threshold(params)
    kin = params.kappa_in
    w = np.asarray(omega_grid, dtype=float)
    chi_y = phase_susceptibility(w, params.sigma)
    gain = kin * 2.0 * params.n_signal_resolved * params.g0**2 * np.abs(chi_y) ** 2
    values = shot_floor_spectrum(w, params, lossy=True) + gain * _position_spectrum_total(
        w, params
    )
    return SpectrumSeries(omega=w, values=values, units=QUADRATURE_UNITS)


def refer_to_input(series: SpectrumSeries, params: DeviceParams) -> SpectrumSeries:
    """Convert a detected phase spectrum to apparent position units.

    Divides by the lossless transduction gain 2 kappa_s n_s g0^2 |chi_Y|^2,
    turning quadrature units into x_ZPF^2 / kappa_s.
    """
    if series.units != QUADRATURE_UNITS:
        raise ValueError("refer_to_input expects a spectrum in quadrature units")
    if params.n_signal_resolved <= 0 or params.g0 <= 0:
        raise ValueError("back-referral requires n_signal > 0 and g0 > 0")
    chi_y = phase_susceptibility(series.omega, params.sigma)
    gain = 2.0 * params.n_signal_resolved * params.g0**2 * np.abs(chi_y) ** 2
    return SpectrumSeries(
        omega=series.omega, values=series.values / gain, units=POSITION_UNITS
    )


def imprecision_spectrum(omega, params: DeviceParams, lossy: bool = False):
    """Frequency-resolved imprecision in x_ZPF^2 / kappa_s units.

    Uses the actual transduction gain of the detected port (kappa_in-weighted
    when lossy), so the mechanical signal appears with unit weight.
    """
    if params.n_signal_resolved <= 0 or params.g0 <= 0:
        raise ValueError("imprecision requires n_signal > 0 and g0 > 0")
    kin = params.kappa_in if lossy else 1.0
    chi_y = phase_susceptibility(omega, params.sigma)
    gain = kin * 2.0 * params.n_signal_resolved * params.g0**2 * np.abs(chi_y) ** 2
    return shot_floor_spectrum(omega, params, lossy=lossy) / gain


def sql_reference(params: DeviceParams) -> float:
    """Minimum added-noise density 2 / Gamma in x_ZPF^2 / kappa_s units."""
    return 2.0 / params.gamma_m


def to_sql_units(series: SpectrumSeries, params: DeviceParams) -> SpectrumSeries:
    """Express a position spectrum as a ratio to the SQL density."""
    if series.units != POSITION_UNITS:
        raise ValueError("to_sql_units expects a position spectrum")
    return SpectrumSeries(
        omega=series.omega, values=series.values / sql_reference(params), units=SQL_UNITS
    )


# --- scalar noise budgets ---------------------------------------------------


def _check_budget_feasible(sigma: float, u: float, label: str) -> None:
    if sigma >= 1.0:
        raise AboveThresholdError(
            f"sigma = {sigma:g} is at or above the oscillation threshold"
        )
    if u <= 0:
        raise PhotonBudgetError(
            f"photon budget leaves no signal photons for {label}: "
            f"n_ratio - sigma^2 = {u:g} must be positive"
        )


def _imp_ideal(sigma: float, omega: float, c_thr: float, u: float) -> float:
    return ((1.0 - sigma) ** 2 + 4.0 * omega**2) / (8.0 * c_thr * u)


def _imp_lossy(
    sigma: float, omega: float, c_thr: float, u: float, kappa_loss: float
) -> float:
    kin = 1.0 - kappa_loss
    numer = ((1.0 - sigma) - kappa_loss) ** 2 + 4.0 * (kin * kappa_loss + omega**2)
    return numer / (8.0 * c_thr * u)


def noise_budget_ideal(params: DeviceParams, omega: float | None = None) -> NoiseBudget:
    """Imprecision/backaction budget of the lossless model at frequency Omega.

    The backaction satisfies s_back = 1 / (4 s_imp), so the product is pinned
    at 1/4 in SQL^2 units for every parameter choice.
    """
    w = params.omega_m if omega is None else omega
    u = params.n_ratio - params.sigma**2
    _check_budget_feasible(params.sigma, u, "the ideal budget")
    s_imp = _imp_ideal(params.sigma, w, params.c_threshold, u)
    s_back = 1.0 / (4.0 * s_imp)
    return NoiseBudget(
        s_imp=s_imp,
        s_back=s_back,
        s_add=s_imp + s_back,
        eval_frequency=w,
        model_tag="ideal",
    )


def noise_budget_lossy(params: DeviceParams, omega: float | None = None) -> NoiseBudget:
    """Adiabatic-approximation budget with absorption and up-conversion loss.

    The imprecision is degraded by the loss port while the backaction keeps
    its lossless value; at kappa_loss = 0 this reduces exactly to the ideal
    budget.
    """
    w = params.omega_m if omega is None else omega
    u = params.n_ratio - params.sigma**2
    _check_budget_feasible(params.sigma, u, "the lossy budget")
    kl = params.kappa_loss
    if kl >= 1.0:
        raise LossExceedsLinewidthError(
            f"kappa_loss = {kl:g} reaches the total linewidth kappa_s = 1"
        )
    s_imp = _imp_lossy(params.sigma, w, params.c_threshold, u, kl)
    s_back = (
        2.0 * params.c_threshold * u / ((1.0 - params.sigma) ** 2 + 4.0 * w**2)
    )
    return NoiseBudget(
        s_imp=s_imp,
        s_back=s_back,
        s_add=s_imp + s_back,
        eval_frequency=w,
        model_tag="adiabatic",
    )


def noise_budget_numeric(
    params: DeviceParams, model: str = "full", omega: float | None = None
) -> NoiseBudget:
    """Budget extracted from an LTI model by floor/mechanical decomposition.

    The floor is evaluated with the optomechanical coupling switched off; the
    transduction gain is measured from the model's own position tap, and the
    backaction is the position spectrum in excess of the pure thermal part.
    """
    w = params.omega_m if omega is None else omega
    _require_below_threshold(params)
    if params.g0 <= 0 or params.n_signal_resolved <= 0:
        raise ValueError("numeric budget requires g0 > 0 and n_signal > 0")

    grid = np.array([w])
    system = build_model(params, model)
    decoupled = build_model(
        dataclasses.replace(params, g0=0.0, n_total=None,
                            n_signal=params.n_signal_resolved),
        model,
    )
    tap_y = system.tap_index("Y_out")
    tap_x = system.tap_index("position")

    s_total = lti.output_spectrum(system, tap_y, grid).values[0]
    s_floor = lti.output_spectrum(decoupled, tap_y, grid).values[0]
    sxx_total = lti.output_spectrum(system, tap_x, grid).values[0]
    sxx_thermal = position_spectrum_thermal(
        w, params.omega_m, params.gamma_m, params.n_th
    )

    gain = (s_total - s_floor) / sxx_total
    sql = sql_reference(params)
    s_imp = s_floor / gain / sql
    s_back = (sxx_total - float(sxx_thermal)) / sql
    return NoiseBudget(
        s_imp=float(s_imp),
        s_back=float(s_back),
        s_add=float(s_imp + s_back),
        eval_frequency=w,
        model_tag=f"{model}-numeric",
    )


def quantum_limit_product(params: DeviceParams, omega_grid) -> SpectrumSeries:
    """Pointwise product of imprecision and force spectra, hbar^2 units.

    Equals 1/4 at every frequency and every pump parameter for the lossless
    model; internal loss lifts it above 1/4.
    """
    _require_below_threshold(params)
    w = np.asarray(omega_grid, dtype=float)
    lossy = params.kappa_loss > 0
    product = imprecision_spectrum(w, params, lossy=lossy) * force_spectrum(w, params)
    return SpectrumSeries(omega=w, values=product, units=PRODUCT_UNITS)
