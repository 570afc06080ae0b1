import numpy as np
import pytest

import sqznoise as sq


@pytest.fixture()
def fig2_params():
    """Squeezed detection working point: imprecision = backaction at Omega.

    C_thr = 0.1, n_s = 0.8 n_p_thr, so the added noise sits exactly at the SQL.
    """
    return sq.DeviceParams(
        sigma=0.6,
        omega_m=0.2,
        gamma_m=1e-3,
        nu=1e-3,
        g0=1e-5,
        n_signal=2e5,
        n_th=sq.thermal_occupancy(1.0),
    )


@pytest.fixture()
def sql_point_params():
    """Same working point with a high-Q mechanical mode.

    Gamma = 1e-5 keeps the split-damping bias (~Gamma^2/16 Omega^2) far below
    the dual-path tolerances.
    """
    return sq.DeviceParams(
        sigma=0.6,
        omega_m=0.2,
        gamma_m=1e-5,
        nu=1e-3,
        g0=1e-6,
        n_signal=2e5,
        n_th=0.0,
    )


@pytest.fixture()
def lossy_params():
    """Absorption plus up-conversion at sigma = 0.5, n = n_p_threshold."""
    return sq.DeviceParams(
        sigma=0.5,
        omega_m=0.1,
        gamma_m=1e-3,
        nu=1e-3,
        g0=1e-5,
        kappa_p=20.0,
        kappa_abs=0.01,
        n_total=250000.0,
        n_th=0.0,
    )


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
