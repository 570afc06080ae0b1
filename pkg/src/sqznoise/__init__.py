"""Quantum measurement-noise budgets for intracavity-squeezed position detection.

A cavity with a chi^(2) medium, pumped below the parametric-oscillation
threshold, de-amplifies the phase quadrature that carries the mechanical
signal while squeezing its output noise even harder.  This package computes
the resulting imprecision/backaction budgets, output spectra, stability, and
photon-budget optima, both from closed forms and from a generic
frequency-domain Langevin solver that must agree with them.
"""

__version__ = "0.1.0"

from .devices import (
    DeviceParams,
    WorkingPoint,
    build_adiabatic_model,
    build_full_model,
    build_ideal_dpa,
    build_model,
    instability_threshold,
    loss_rate,
    pump_threshold,
    thermal_occupancy,
    threshold_cooperativity,
    validity_report,
    working_point,
)
from .design import (
    CooperativitySweep,
    NoiseMap,
    OptimumReport,
    minimize_added_noise,
    n_sql_of_sigma,
    optimal_point,
    sigma_opt,
    sweep_cooperativity,
    sweep_noise_map,
)
from .lti import (
    LinearLangevinSystem,
    OutputTap,
    SpectrumSeries,
    StabilityReport,
    TransferResponse,
    frequency_response,
    linear_grid,
    mechanical_zoom_grid,
    output_spectrum,
    spectrum_area,
    stability_eigenvalues,
    variance_grid,
)
from .metrics import (
    NoiseBudget,
    amplitude_susceptibility,
    force_spectrum,
    imprecision_spectrum,
    mechanical_susceptibility,
    mechanical_susceptibility_split,
    noise_budget_ideal,
    noise_budget_lossy,
    noise_budget_numeric,
    output_phase_spectrum_ideal,
    output_phase_spectrum_lossy,
    phase_susceptibility,
    position_spectrum_backaction,
    position_spectrum_thermal,
    quantum_limit_product,
    refer_to_input,
    shot_floor_spectrum,
    sql_reference,
    to_sql_units,
)

__all__ = [name for name in dir() if not name.startswith("_")]
