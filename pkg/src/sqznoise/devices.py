"""Physical device parameters and Langevin-system builders.

Translates the physical rates of a pumped nonlinear cavity coupled to a
mechanical mode into LinearLangevinSystem instances for three descriptions:

* ideal below-threshold amplifier (pump eliminated, no losses),
* adiabatic lossy model (input port plus a combined absorption/up-conversion
  loss port),
* full six-variable model with explicit pump-quadrature dynamics.

Unit conventions: kappa_s = 1 and hbar = 1 throughout.  Optical quadratures
and internal mechanical states both carry vacuum variance 1/2; exported
position spectra are converted to x_ZPF^2 units (x_ZPF = sqrt(hbar/2 m Omega)),
where the thermal equilibrium variance is 2 n_th + 1.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AboveThresholdError,
    LossExceedsLinewidthError,
    PhotonBudgetError,
)
from .lti import POSITION_UNITS, LinearLangevinSystem, OutputTap, stability_eigenvalues

VACUUM_DENSITY = 0.5


def thermal_occupancy(temperature_ratio: float) -> float:
    """Bose occupancy n_th from the temperature ratio k_B T / (hbar Omega)."""
    if temperature_ratio < 0:
        raise ValueError("temperature ratio must be non-negative")
    if temperature_ratio == 0.0:
        return 0.0
    return 1.0 / math.expm1(1.0 / temperature_ratio)


@dataclass(frozen=True)
class DeviceParams:
    """All physical rates and photon numbers, in units of kappa_s = 1.

    Exactly one of ``n_total`` (total circulating photons, signal + pump) or
    ``n_signal`` must be given.  ``kappa_p = inf`` means the pump decay is so
    fast that up-conversion losses vanish.
    """

    sigma: float                 # pump drive relative to oscillation threshold
    omega_m: float               # mechanical frequency Omega
    gamma_m: float               # mechanical damping Gamma
    nu: float                    # single-photon optical nonlinearity
    g0: float                    # single-photon optomechanical coupling
    kappa_p: float = math.inf    # pump linewidth
    kappa_abs: float = 0.0       # signal absorption rate
    kappa_p_abs: float = 0.0     # pump absorption rate
    n_total: float | None = None
    n_signal: float | None = None
    n_th: float = 0.0            # mechanical thermal occupancy

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")
        if self.omega_m <= 0 or self.gamma_m <= 0:
            raise ValueError("omega_m and gamma_m must be positive")
        if self.nu <= 0:
            raise ValueError("nu must be positive")
        if self.g0 < 0:
            raise ValueError("g0 must be non-negative")
        if self.kappa_p <= 0:
            raise ValueError("kappa_p must be positive")
        if not 0 <= self.kappa_abs < 1:
            raise ValueError("kappa_abs must lie in [0, 1) in kappa_s units")
        if not 0 <= self.kappa_p_abs <= self.kappa_p:
            raise ValueError("kappa_p_abs must lie in [0, kappa_p]")
        if self.n_th < 0:
            raise ValueError("n_th must be non-negative")
        if (self.n_total is None) == (self.n_signal is None):
            raise ValueError("exactly one of n_total or n_signal must be set")
        if self.n_total is not None:
            if self.n_total < 0:
                raise ValueError("n_total must be non-negative")
            deficit = self.n_pump - self.n_total
            if deficit > 0:
                raise PhotonBudgetError(
                    f"photon budget n_total = {self.n_total:g} cannot cover the "
                    f"pump occupation {self.n_pump:g} (deficit {deficit:g})"
                )
        elif self.n_signal < 0:
            raise ValueError("n_signal must be non-negative")

    # -- derived photon bookkeeping --

    @property
    def n_p_threshold(self) -> float:
        """Pump photons at the oscillation threshold, (kappa_s / 2 nu)^2."""
        return 1.0 / (4.0 * self.nu**2)

    @property
    def n_pump(self) -> float:
        return self.sigma**2 * self.n_p_threshold

    @property
    def n_signal_resolved(self) -> float:
        if self.n_signal is not None:
            return self.n_signal
        return self.n_total - self.n_pump

    @property
    def n_total_resolved(self) -> float:
        if self.n_total is not None:
            return self.n_total
        return self.n_signal + self.n_pump

    @property
    def n_ratio(self) -> float:
        """Total circulating photons over the threshold pump number."""
        return self.n_total_resolved / self.n_p_threshold

    @property
    def c_threshold(self) -> float:
        """Threshold cooperativity g0^2 kappa_s / (Gamma nu^2)."""
        return self.g0**2 / (self.gamma_m * self.nu**2)

    @property
    def kappa_loss(self) -> float:
        """Absorption plus photon up-conversion loss, kappa_abs + 4 nu^2 n_s / kappa_p."""
        if math.isinf(self.kappa_p):
            return self.kappa_abs
        return self.kappa_abs + 4.0 * self.nu**2 * self.n_signal_resolved / self.kappa_p

    @property
    def kappa_in(self) -> float:
        """Detected-port coupling at fixed total linewidth, kappa_s - kappa_loss."""
        return 1.0 - self.kappa_loss

    @property
    def kappa_p_in(self) -> float:
        return self.kappa_p - self.kappa_p_abs

    # -- convenient re-parametrizations --

    def at_sigma(self, sigma: float) -> "DeviceParams":
        """Same device and photon budget, different pump parameter."""
        return dataclasses.replace(self, sigma=sigma)

    def with_fixed_signal(self, sigma: float) -> "DeviceParams":
        """Vary sigma while pinning the currently resolved signal photons."""
        return dataclasses.replace(
            self, sigma=sigma, n_total=None, n_signal=self.n_signal_resolved
        )


@dataclass(frozen=True)
class WorkingPoint:
    """Classical stationary amplitudes and the drives required to hold them."""

    alpha_p: float               # pump amplitude, sigma kappa_s / 2 nu
    alpha_s: float               # signal amplitude, sqrt(n_s)
    beta: float                  # static mechanical displacement in quanta
    alpha_p_in: float            # pump drive amplitude, kappa_s^{1/2}
    alpha_s_in: complex          # seed drive amplitude; Im part cancels the detuning
    detuning_ratio: float        # 2 g0^2 n_s / (Omega kappa_s)
    fluct_photons: float | None  # <X^2 + Y^2>/2, undefined at sigma >= 1


@dataclass(frozen=True)
class ValidityCheck:
    name: str
    ratio: float
    threshold: float
    passed: bool
    detail: str


def pump_threshold(params: DeviceParams) -> float:
    """Threshold pump photon number (kappa_s / 2 nu)^2."""
    return params.n_p_threshold


def threshold_cooperativity(params: DeviceParams) -> float:
    """Threshold cooperativity; both algebraic forms are computed and compared."""
    direct = params.g0**2 / (params.gamma_m * params.nu**2)
    via_threshold = 4.0 * params.g0**2 * params.n_p_threshold / params.gamma_m
    if not math.isclose(direct, via_threshold, rel_tol=1e-12, abs_tol=0.0):
        raise AssertionError(
            f"cooperativity forms disagree: {direct!r} vs {via_threshold!r}"
        )
    return direct


def loss_rate(params: DeviceParams) -> float:
    """Overall signal loss rate kappa_abs + 4 nu^2 n_s / kappa_p."""
    return params.kappa_loss


def _mechanical_rows(params: DeviceParams, drift: np.ndarray, ix: int, ip: int) -> None:
    om, gm = params.omega_m, params.gamma_m
    drift[ix, ix] = -gm / 2.0
    drift[ix, ip] = om
    drift[ip, ix] = -om
    drift[ip, ip] = -gm / 2.0


def _coupling(params: DeviceParams) -> float:
    # shared radiation-pressure coefficient; its symmetry between the optical
    # phase row and the mechanical momentum row is what fixes the
    # imprecision-backaction product at 1/4.
    return 2.0 * params.g0 * math.sqrt(max(params.n_signal_resolved, 0.0))


def _check_below_threshold(params: DeviceParams, allow_above_threshold: bool) -> None:
    if params.sigma >= 1.0 and not allow_above_threshold:
        raise AboveThresholdError(
            f"sigma = {params.sigma:g} is at or above the oscillation threshold"
        )
    if params.n_signal_resolved < 0:
        raise PhotonBudgetError(
            f"negative signal photon number {params.n_signal_resolved:g}"
        )


def build_ideal_dpa(
    params: DeviceParams, allow_above_threshold: bool = False
) -> LinearLangevinSystem:
    """Four-state (X, Y, x, p) model of the lossless amplifier plus mechanics.

    X is amplified at rate (1 - sigma) kappa_s / 2, Y de-amplified at
    (1 + sigma) kappa_s / 2; the mechanical block uses the split-damping form
    with Gamma/2 on both quadratures.  One quadrature output tap
    (Y_out = Y_in - sqrt(kappa_s) Y) and one position tap in x_ZPF^2 units.
    """
    _check_below_threshold(params, allow_above_threshold)
    sigma, gm = params.sigma, params.gamma_m
    c = _coupling(params)

    drift = np.zeros((4, 4))
    drift[0, 0] = -(1.0 - sigma) / 2.0
    drift[1, 1] = -(1.0 + sigma) / 2.0
    drift[1, 2] = c
    drift[3, 0] = c
    _mechanical_rows(params, drift, 2, 3)

    coupling = np.diag([1.0, 1.0, math.sqrt(gm), math.sqrt(gm)])
    density = np.array([VACUUM_DENSITY, VACUUM_DENSITY] + [params.n_th + 0.5] * 2)

    taps = (
        OutputTap("Y_out", weights=[0.0, 1.0, 0.0, 0.0], feedthrough=[0.0, 1.0, 0.0, 0.0]),
        OutputTap(
            "position",
            weights=[0.0, 0.0, -math.sqrt(2.0), 0.0],
            feedthrough=[0.0, 0.0, 0.0, 0.0],
            units=POSITION_UNITS,
        ),
    )
    return LinearLangevinSystem(
        state_labels=("X", "Y", "x", "p"),
        drift=drift,
        input_coupling=coupling,
        port_labels=("X_in", "Y_in", "x_th", "p_th"),
        port_density=density,
        output_taps=taps,
    )


def build_adiabatic_model(
    params: DeviceParams, allow_above_threshold: bool = False
) -> LinearLangevinSystem:
    """Lossy four-state model: pump adiabatically eliminated into a loss port.

    Each optical quadrature couples to the detected input port with weight
    sqrt(kappa_in) and to a vacuum loss port with weight sqrt(kappa_loss),
    with kappa_in + kappa_loss = kappa_s so total damping is unchanged.
    The output tap is built from the input port only.
    """
    _check_below_threshold(params, allow_above_threshold)
    kl = params.kappa_loss
    kin = 1.0 - kl
    if kin <= 0:
        raise LossExceedsLinewidthError(
            f"kappa_loss = {kl:g} reaches the total linewidth kappa_s = 1"
        )
    sigma, gm = params.sigma, params.gamma_m
    c = _coupling(params)

    drift = np.zeros((4, 4))
    drift[0, 0] = -(1.0 - sigma) / 2.0
    drift[1, 1] = -(1.0 + sigma) / 2.0
    drift[1, 2] = c
    drift[3, 0] = c
    _mechanical_rows(params, drift, 2, 3)

    sk_in, sk_loss, sg = math.sqrt(kin), math.sqrt(kl), math.sqrt(gm)
    coupling = np.zeros((4, 6))
    coupling[0, 0], coupling[0, 1] = sk_in, sk_loss
    coupling[1, 2], coupling[1, 3] = sk_in, sk_loss
    coupling[2, 4] = sg
    coupling[3, 5] = sg
    density = np.array([VACUUM_DENSITY] * 4 + [params.n_th + 0.5] * 2)

    taps = (
        OutputTap(
            "Y_out",
            weights=[0.0, sk_in, 0.0, 0.0],
            feedthrough=[0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
        ),
        OutputTap(
            "position",
            weights=[0.0, 0.0, -math.sqrt(2.0), 0.0],
            feedthrough=[0.0] * 6,
            units=POSITION_UNITS,
        ),
    )
    return LinearLangevinSystem(
        state_labels=("X", "Y", "x", "p"),
        drift=drift,
        input_coupling=coupling,
        port_labels=("X_in", "X_loss", "Y_in", "Y_loss", "x_th", "p_th"),
        port_density=density,
        output_taps=taps,
    )


def build_full_model(params: DeviceParams) -> LinearLangevinSystem:
    """Six-state model (Y_p, X_p, Y, X, x, p) with explicit pump fluctuations.

    The pump-signal beam-splitter coupling is nu sqrt(n_s); the
    radiation-pressure detuning is omitted (negligible-detuning regime).
    Permits sigma >= 1 for stability studies.
    """
    if math.isinf(params.kappa_p):
        raise ValueError("full model requires a finite kappa_p")
    if params.kappa_p_in < 0:
        raise ValueError("kappa_p_abs must not exceed kappa_p")
    if params.n_signal_resolved < 0:
        raise PhotonBudgetError(
            f"negative signal photon number {params.n_signal_resolved:g}"
        )
    sigma, gm, kp = params.sigma, params.gamma_m, params.kappa_p
    ns = params.n_signal_resolved
    vs = params.nu * math.sqrt(ns)
    c = _coupling(params)
    ks_in = 1.0 - params.kappa_abs

    drift = np.zeros((6, 6))
    drift[0, 0] = -kp / 2.0
    drift[0, 2] = -vs
    drift[1, 1] = -kp / 2.0
    drift[1, 3] = -vs
    drift[2, 0] = vs
    drift[2, 2] = -(1.0 + sigma) / 2.0
    drift[2, 4] = c
    drift[3, 1] = vs
    drift[3, 3] = -(1.0 - sigma) / 2.0
    drift[5, 3] = c
    _mechanical_rows(params, drift, 4, 5)

    skp_in, skp_abs = math.sqrt(params.kappa_p_in), math.sqrt(params.kappa_p_abs)
    sks_in, sks_abs = math.sqrt(ks_in), math.sqrt(params.kappa_abs)
    sg = math.sqrt(gm)
    coupling = np.zeros((6, 10))
    coupling[0, 0], coupling[0, 1] = skp_in, skp_abs
    coupling[1, 2], coupling[1, 3] = skp_in, skp_abs
    coupling[2, 4], coupling[2, 5] = sks_in, sks_abs
    coupling[3, 6], coupling[3, 7] = sks_in, sks_abs
    coupling[4, 8] = sg
    coupling[5, 9] = sg
    density = np.array([VACUUM_DENSITY] * 8 + [params.n_th + 0.5] * 2)

    taps = (
        OutputTap(
            "Y_out",
            weights=[0.0, 0.0, sks_in, 0.0, 0.0, 0.0],
            feedthrough=[0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        ),
        OutputTap(
            "position",
            weights=[0.0, 0.0, 0.0, 0.0, -math.sqrt(2.0), 0.0],
            feedthrough=[0.0] * 10,
            units=POSITION_UNITS,
        ),
    )
    return LinearLangevinSystem(
        state_labels=("Y_p", "X_p", "Y", "X", "x", "p"),
        drift=drift,
        input_coupling=coupling,
        port_labels=(
            "Y_p_in", "Y_p_abs", "X_p_in", "X_p_abs",
            "Y_in", "Y_abs", "X_in", "X_abs", "x_th", "p_th",
        ),
        port_density=density,
        output_taps=taps,
    )


def working_point(params: DeviceParams) -> WorkingPoint:
    """Stationary amplitudes and the drive strengths that sustain them.

    Inverts the classical stationary equations: given (sigma, n_s) it returns
    the required pump and seed drive amplitudes.  The imaginary part of the
    seed drive compensates the radiation-pressure detuning.
    """
    if math.isinf(params.kappa_p):
        raise ValueError("working point requires a finite kappa_p")
    if params.kappa_p_in <= 0:
        raise ValueError("pump input coupling must be positive")
    ks_in = 1.0 - params.kappa_abs
    if ks_in <= 0:
        raise ValueError("signal input coupling must be positive")

    sigma = params.sigma
    ns = params.n_signal_resolved
    alpha_p = sigma / (2.0 * params.nu)
    alpha_s = math.sqrt(max(ns, 0.0))
    beta = params.g0 * ns / params.omega_m
    detuning = 2.0 * params.g0**2 * ns / params.omega_m  # frequency shift, kappa_s units

    alpha_p_in = (params.kappa_p * alpha_p + params.nu * alpha_s**2) / (
        2.0 * math.sqrt(params.kappa_p_in)
    )
    alpha_s_in = (alpha_s * (1.0 - sigma) / 2.0 - 1j * detuning * alpha_s) / math.sqrt(
        ks_in
    )

    if sigma < 1.0:
        fluct = 0.5 * (0.5 / (1.0 - sigma) + 0.5 / (1.0 + sigma))
    else:
        fluct = None
    return WorkingPoint(
        alpha_p=alpha_p,
        alpha_s=alpha_s,
        beta=beta,
        alpha_p_in=alpha_p_in,
        alpha_s_in=alpha_s_in,
        detuning_ratio=detuning,
        fluct_photons=fluct,
    )


def classical_residuals(
    params: DeviceParams, point: WorkingPoint
) -> tuple[float, float, float]:
    """Residuals of the stationary equations, scaled by the largest term in each.

    Used to verify that working_point inverted the classical equations.
    """
    nu, kp, g0, om = params.nu, params.kappa_p, params.g0, params.omega_m
    ns = params.n_signal_resolved
    a_p, a_s = point.alpha_p, point.alpha_s

    pump_terms = (kp * a_p / 2.0, nu * a_s**2 / 2.0,
                  math.sqrt(params.kappa_p_in) * point.alpha_p_in)
    pump_res = -pump_terms[0] - pump_terms[1] + pump_terms[2]

    ks_in = 1.0 - params.kappa_abs
    sig_terms = (
        1j * 2.0 * g0**2 * ns * a_s / om,
        (a_s - 2.0 * nu * a_s * a_p) / 2.0,
        math.sqrt(ks_in) * point.alpha_s_in,
    )
    sig_res = sig_terms[0] - sig_terms[1] + sig_terms[2]

    mech_terms = (om * point.beta, g0 * ns)
    mech_res = -mech_terms[0] + mech_terms[1]

    def scaled(res, terms) -> float:
        scale = max(1.0, *(abs(t) for t in terms))
        return abs(res) / scale

    return (scaled(pump_res, pump_terms), scaled(sig_res, sig_terms),
            scaled(mech_res, mech_terms))


DETUNING_THRESHOLD = 0.01
LINEARIZATION_THRESHOLD = 0.01
NONLINEARITY_THRESHOLD = 0.1


def validity_report(params: DeviceParams) -> tuple[ValidityCheck, ...]:
    """Regime checks with margins; annotates analyses, never aborts them."""
    ns = params.n_signal_resolved
    detuning = 2.0 * params.g0**2 * ns / params.omega_m
    checks = [
        ValidityCheck(
            name="detuning",
            ratio=detuning,
            threshold=DETUNING_THRESHOLD,
            passed=detuning <= DETUNING_THRESHOLD,
            detail="radiation-pressure frequency shift over kappa_s",
        )
    ]

    if params.sigma < 1.0:
        fluct = 0.5 * (0.5 / (1.0 - params.sigma) + 0.5 / (1.0 + params.sigma))
        ratio = fluct / ns if ns > 0 else math.inf
        detail = "fluctuation photons over circulating signal photons"
    else:
        ratio = math.inf
        detail = "fluctuation photons diverge at or above threshold"
    checks.append(
        ValidityCheck(
            name="linearization",
            ratio=ratio,
            threshold=LINEARIZATION_THRESHOLD,
            passed=ratio <= LINEARIZATION_THRESHOLD,
            detail=detail,
        )
    )

    nl = params.nu / params.omega_m
    checks.append(
        ValidityCheck(
            name="nonlinearity",
            ratio=nl,
            threshold=NONLINEARITY_THRESHOLD,
            passed=nl <= NONLINEARITY_THRESHOLD,
            detail="optical nonlinearity over mechanical frequency",
        )
    )
    return tuple(checks)


_BUILDERS = {
    "ideal": build_ideal_dpa,
    "adiabatic": build_adiabatic_model,
    "full": build_full_model,
}


def build_model(
    params: DeviceParams, model: str, allow_above_threshold: bool = False
):
    """Dispatch to one of the three system builders by name."""
    try:
        builder = _BUILDERS[model]
    except KeyError:
        raise ValueError(f"unknown model {model!r}") from None
    if model == "full":
        return builder(params)
    return builder(params, allow_above_threshold=allow_above_threshold)


def instability_threshold(
    params: DeviceParams,
    model: str = "ideal",
    tol: float = 1e-9,
    sigma_max: float = 8.0,
) -> float:
    """Bisect the pump parameter at which the chosen model loses stability.

    The signal photon number is held fixed while sigma varies, so the
    pump-signal coupling stays constant during the scan.
    """
    base = params.with_fixed_signal(params.sigma)

    def is_stable(sigma: float) -> bool:
        system = build_model(base.with_fixed_signal(sigma), model,
                             allow_above_threshold=True)
        return stability_eigenvalues(system).stable

    lo = 0.0
    if not is_stable(lo):
        raise ValueError("system is unstable even at sigma = 0")
    hi = 1.5
    while is_stable(hi):
        hi *= 1.5
        if hi > sigma_max:
            raise ValueError(f"no instability found below sigma = {sigma_max:g}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if is_stable(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
