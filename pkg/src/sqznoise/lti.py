"""Frequency-domain engine for linear time-invariant quantum Langevin systems.

A system is specified by a real drift matrix A and a real input-coupling
matrix B over labelled white-noise ports,

    dv/dt = A v + B xi,

together with the symmetrized spectral density of each port and a list of
output taps with direct feedthrough, ``out = feedthrough . xi - tap . v``
(input-output boundary).  All rates are expressed in units of the signal
linewidth kappa_s = 1; vacuum quadrature ports carry density 1/2.

Evaluations at distinct frequencies are independent; results are assembled
in grid order so output is deterministic.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import (
    EigenSolverError,
    ResonantDegenerateError,
    UnstableSystemError,
)

Array = NDArray[np.float64]

QUADRATURE_UNITS = "quadrature"          # shot floor at 1/2
POSITION_UNITS = "x_zpf2_per_kappa"      # position spectrum in x_ZPF^2 / kappa_s
SQL_UNITS = "sql"                        # ratio to the standard-quantum-limit density
PRODUCT_UNITS = "hbar_squared"           # imprecision-force products, hbar^2 units

ALLOWED_UNITS = (QUADRATURE_UNITS, POSITION_UNITS, SQL_UNITS, PRODUCT_UNITS)


def _readonly(a, dtype=float) -> Array:
    out = np.array(a, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class OutputTap:
    """One detected output: ``out = feedthrough . xi - weights . v``."""

    name: str
    weights: Array        # row over states, units kappa_s^{1/2}
    feedthrough: Array    # row over ports, dimensionless
    units: str = QUADRATURE_UNITS

    def __post_init__(self):
        object.__setattr__(self, "weights", _readonly(self.weights))
        object.__setattr__(self, "feedthrough", _readonly(self.feedthrough))
        if self.units not in ALLOWED_UNITS:
            raise ValueError(f"unknown tap units {self.units!r}")


@dataclass(frozen=True)
class LinearLangevinSystem:
    """Drift/input-coupling description of a linear Langevin system."""

    state_labels: tuple[str, ...]
    drift: Array
    input_coupling: Array
    port_labels: tuple[str, ...]
    port_density: Array
    output_taps: tuple[OutputTap, ...]

    def __post_init__(self):
        object.__setattr__(self, "state_labels", tuple(self.state_labels))
        object.__setattr__(self, "port_labels", tuple(self.port_labels))
        object.__setattr__(self, "output_taps", tuple(self.output_taps))
        object.__setattr__(self, "drift", _readonly(self.drift))
        object.__setattr__(self, "input_coupling", _readonly(self.input_coupling))
        object.__setattr__(self, "port_density", _readonly(self.port_density))

        n, m = len(self.state_labels), len(self.port_labels)
        if self.drift.shape != (n, n):
            raise ValueError(f"drift must be {n}x{n}, got {self.drift.shape}")
        if self.input_coupling.shape != (n, m):
            raise ValueError(
                f"input coupling must be {n}x{m}, got {self.input_coupling.shape}"
            )
        if self.port_density.shape != (m,):
            raise ValueError("one symmetrized density required per port")
        if not np.all(np.isfinite(self.drift)):
            raise ValueError("drift matrix must be finite")
        if not np.all(np.isfinite(self.input_coupling)):
            raise ValueError("input coupling must be finite")
        if np.any(self.port_density < 0) or not np.all(np.isfinite(self.port_density)):
            raise ValueError("port densities must be finite and non-negative")
        for tap in self.output_taps:
            if tap.weights.shape != (n,):
                raise ValueError(f"tap {tap.name!r} weight row must have length {n}")
            if tap.feedthrough.shape != (m,):
                raise ValueError(f"tap {tap.name!r} feedthrough row must have length {m}")

    @property
    def n_states(self) -> int:
        return len(self.state_labels)

    @property
    def n_ports(self) -> int:
        return len(self.port_labels)

    def tap_index(self, name: str) -> int:
        for i, tap in enumerate(self.output_taps):
            if tap.name == name:
                return i
        raise KeyError(f"no output tap named {name!r}")

    def tap_matrix(self) -> Array:
        return np.vstack([t.weights for t in self.output_taps])

    def feedthrough_matrix(self) -> Array:
        return np.vstack([t.feedthrough for t in self.output_taps])


@dataclass(frozen=True)
class TransferResponse:
    """Port-to-state (T) and port-to-output (O) transfer matrices at one frequency."""

    omega: float
    states: NDArray[np.complex128]   # T(w) = (-i w I - A)^{-1} B
    outputs: NDArray[np.complex128]  # O(w) = feedthrough - tap . T(w)


@dataclass(frozen=True)
class SpectrumSeries:
    """Real spectral values on a strictly increasing frequency grid."""

    omega: Array
    values: Array
    units: str

    def __post_init__(self):
        object.__setattr__(self, "omega", _readonly(self.omega))
        object.__setattr__(self, "values", _readonly(self.values))
        if self.omega.ndim != 1 or self.values.shape != self.omega.shape:
            raise ValueError("omega and values must be 1-d arrays of equal length")
        if not np.all(np.isfinite(self.omega)):
            raise ValueError("frequency grid must be finite")
        if np.any(np.diff(self.omega) <= 0):
            raise ValueError("frequency grid must be strictly increasing")
        if not np.all(np.isfinite(self.values)) or np.any(self.values < 0):
            raise ValueError("spectral values must be finite and non-negative")
        if self.units not in ALLOWED_UNITS:
            raise ValueError(f"unknown spectrum units {self.units!r}")

    def __len__(self) -> int:
        return self.omega.size


@dataclass(frozen=True)
class StabilityReport:
    """Drift-matrix eigenvalues with a stability verdict."""

    eigenvalues: NDArray[np.complex128]
    stable: bool
    min_decay_rate: float  # -2 max Re(lambda): intensity decay of the slowest excitation


def _transfer_stack(
    system: LinearLangevinSystem, omegas: Array
) -> NDArray[np.complex128]:
    """Output transfer matrices O(w) for every w, shape (n_w, n_taps, n_ports)."""
    n = system.n_states
    eye = np.eye(n)
    mats = -1j * omegas[:, None, None] * eye - system.drift
    rhs = np.broadcast_to(
        system.input_coupling.astype(complex), (omegas.size, n, system.n_ports)
    )
    try:
        t = np.linalg.solve(mats, rhs)
    except np.linalg.LinAlgError as exc:
        raise ResonantDegenerateError(_first_singular(system, omegas)) from exc
    taps = system.tap_matrix()
    feed = system.feedthrough_matrix()
    return feed[None, :, :] - np.einsum("ts,wsp->wtp", taps, t)


def _first_singular(system: LinearLangevinSystem, omegas: Array) -> float:
    eye = np.eye(system.n_states)
    for w in omegas:
        m = -1j * w * eye - system.drift
        if abs(np.linalg.det(m)) == 0.0:
            return float(w)
    return float(omegas.flat[0])


def frequency_response(system: LinearLangevinSystem, omega: float) -> TransferResponse:
    """Solve ``(-i w I - A) T = B`` and form the output responses at one frequency.

    Raises ResonantDegenerateError when the solve is singular (the drift has an
    eigenvalue at -i w, impossible for stable systems at real w).
    """
    if not np.isfinite(omega):
        raise ValueError("omega must be finite")
    mat = -1j * float(omega) * np.eye(system.n_states) - system.drift
    try:
        t = np.linalg.solve(mat, system.input_coupling.astype(complex))
    except np.linalg.LinAlgError as exc:
        raise ResonantDegenerateError(float(omega)) from exc
    if not np.all(np.isfinite(t)):
        raise ResonantDegenerateError(float(omega))
    o = system.feedthrough_matrix() - system.tap_matrix() @ t
    return TransferResponse(omega=float(omega), states=t, outputs=o)


def stability_eigenvalues(system: LinearLangevinSystem) -> StabilityReport:
    """Eigenvalues of the drift matrix plus a strict-stability verdict."""
    try:
        eigenvalues = np.linalg.eigvals(system.drift)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"eigenvalue solver failed: {exc}") from exc
    max_real = float(np.max(eigenvalues.real))
    return StabilityReport(
        eigenvalues=eigenvalues,
        stable=bool(max_real < 0.0),
        min_decay_rate=-2.0 * max_real,
    )


def output_spectrum(
    system: LinearLangevinSystem,
    tap_index: int,
    omega_grid,
) -> SpectrumSeries:
    """Symmetrized output spectrum S(w) = sum_k |O_k(w)|^2 density_k.

    Ports are mutually uncorrelated white noise by the module contract.
    Refuses unstable systems, reporting the offending eigenvalue real part.
    """
    grid = np.asarray(omega_grid, dtype=float)
    if grid.size == 0:
        raise ValueError("frequency grid must not be empty")
    if not (0 <= tap_index < len(system.output_taps)):
        raise ValueError(f"tap index {tap_index} out of range")
    report = stability_eigenvalues(system)
    if not report.stable:
        raise UnstableSystemError(float(np.max(report.eigenvalues.real)))
    outputs = _transfer_stack(system, grid)[:, tap_index, :]
    values = np.einsum("wp,p->w", np.abs(outputs) ** 2, system.port_density)
    return SpectrumSeries(
        omega=grid, values=values, units=system.output_taps[tap_index].units
    )


def spectrum_area(series: SpectrumSeries, floor: float = 0.0) -> float:
    """Trapezoidal integral of (S - floor) over the grid, divided by 2 pi.

    The grid must be wide enough that the boundary values sit on the
    asymptote (the supplied floor); otherwise an ``unconverged-area``
    warning is attached to the result.
    """
    excess = series.values - floor
    boundary = max(abs(float(excess[0])), abs(float(excess[-1])))
    if boundary > 1e-6:
        warnings.warn(
            f"unconverged-area: boundary value {boundary:.3g} above the asymptote",
            UserWarning,
            stacklevel=2,
        )
    return float(np.trapezoid(excess, series.omega) / (2.0 * np.pi))


# --- frequency grids -------------------------------------------------------


def linear_grid(lo: float = -5.0, hi: float = 5.0, points: int = 4001) -> Array:
    """Default linear frequency grid, [-5, 5] kappa_s at 4001 points."""
    if points < 2 or hi <= lo:
        raise ValueError("need at least two points and hi > lo")
    return np.linspace(lo, hi, points)


def mechanical_zoom_grid(
    omega_m: float,
    gamma_m: float,
    span_gammas: float = 50.0,
    points: int = 2001,
    inner_gammas: float = 1e-3,
) -> Array:
    """Log-spaced windows of half-width ``span_gammas * gamma_m`` around +/-omega_m."""
    half = max((points - 1) // 2, 4)
    offsets = np.geomspace(inner_gammas * gamma_m, span_gammas * gamma_m, half)
    window = np.concatenate([-offsets[::-1], [0.0], offsets])
    grid = np.concatenate([omega_m + window, -omega_m + window])
    return np.unique(grid)


def variance_grid(
    omega_m: float,
    gamma_m: float,
    span_gammas: float = 2.0e5,
    points: int = 6001,
    base_points: int = 2001,
) -> Array:
    """Grid dense enough for equal-time variances of mechanical spectra.

    Combines wide log-spaced windows around the mechanical doublet with a
    linear base grid, so the trapezoid rule captures the Gamma-scale peaks
    while the 1/omega^2 tails decay below the area-convergence tolerance
    before the grid edge.
    """
    zoom = mechanical_zoom_grid(
        omega_m, gamma_m, span_gammas=span_gammas, points=points, inner_gammas=1e-4
    )
    width = omega_m + span_gammas * gamma_m
    base = np.linspace(-width, width, base_points)
    return np.unique(np.concatenate([zoom, base]))
