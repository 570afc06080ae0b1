"""Design-space analysis: photon budgets to reach the SQL and noise minima.

Works at fixed total circulating photon number n = n_signal + n_pump.  All
photon numbers are expressed as ratios to the threshold pump occupation, and
the added noise in SQL units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .devices import DeviceParams
from .errors import InfeasibleError
from .metrics import _imp_ideal, _imp_lossy

INFEASIBLE = float("nan")


@dataclass(frozen=True)
class OptimumReport:
    """SQL-reachability optimum for one device."""

    sigma_star: float          # pump parameter minimizing the photon budget
    n_star: float              # minimal photon budget over threshold pump number
    suppression: float         # photon-number saving relative to sigma = 0
    sigma_opt_curve: tuple[tuple[float, float], ...]  # (n_ratio, sigma_opt) pairs
    method_tag: str


@dataclass(frozen=True)
class NoiseMap:
    """Added noise over an (n_ratio, sigma) grid plus reference curves."""

    n_ratios: np.ndarray
    sigmas: np.ndarray
    s_add: np.ndarray            # shape (n, sigma); NaN where infeasible
    feasible: np.ndarray         # boolean mask, same shape
    sql_contour_analytic: np.ndarray    # n_ratio reaching the SQL, per sigma
    sql_contour_extracted: np.ndarray   # per-sigma argmin over n (NaN at edges)
    ridge_analytic: np.ndarray          # optimal sigma per n_ratio (NaN past n_star)
    ridge_extracted: np.ndarray         # per-n argmin over sigma


@dataclass(frozen=True)
class CooperativitySweep:
    """Minimum added noise versus threshold cooperativity for three scenarios."""

    c_values: np.ndarray
    s_add_ideal: np.ndarray
    s_add_lossy: np.ndarray
    s_add_nosqueeze: np.ndarray
    sigma_min_ideal: np.ndarray
    sigma_min_lossy: np.ndarray


def n_sql_of_sigma(sigma: float, params: DeviceParams) -> float:
    """Photon budget (over the threshold pump number) that reaches the SQL."""
    if not 0.0 <= sigma < 1.0:
        raise ValueError("sigma must lie in [0, 1)")
    c = params.c_threshold
    om = params.omega_m
    return ((1.0 - sigma) ** 2 + 4.0 * om**2) / (4.0 * c) + sigma**2


def sigma_opt(n_ratio: float, params: DeviceParams) -> float:
    """Optimal pump parameter at a fixed photon budget below n_star.

    Root of sigma^2 - B sigma + n_ratio with B = 1 + n_ratio + 4 Omega^2,
    evaluated in the rationalized form that stays accurate as n_ratio -> 0.
    """
    if n_ratio <= 0:
        raise ValueError("n_ratio must be positive")
    b = 1.0 + n_ratio + 4.0 * params.omega_m**2
    disc = b**2 / 4.0 - n_ratio
    if disc < 0:  # impossible: B >= 1 + n implies B^2/4 >= n
        raise AssertionError(f"negative discriminant {disc!r} for n_ratio={n_ratio!r}")
    return n_ratio / (b / 2.0 + math.sqrt(disc))


def optimal_point(params: DeviceParams, curve_points: int = 41) -> OptimumReport:
    """Minimal photon budget n_star, its pump parameter sigma_star, and the saving.

    The suppression factor is cross-checked against the independently computed
    ratio n_sql(0) / n_star.
    """
    c = params.c_threshold
    if c <= 0:
        raise ValueError("threshold cooperativity must be positive")
    om2 = 4.0 * params.omega_m**2
    sigma_star = 1.0 / (1.0 + 4.0 * c)
    n_star = n_sql_of_sigma(sigma_star, params)
    suppression = (1.0 + om2) / (1.0 - sigma_star + om2)
    ratio = n_sql_of_sigma(0.0, params) / n_star
    if not math.isclose(suppression, ratio, rel_tol=1e-12):
        raise AssertionError(
            f"suppression formula {suppression!r} disagrees with photon ratio {ratio!r}"
        )
    n_grid = np.linspace(n_star / curve_points, n_star, curve_points)
    curve = tuple((float(n), sigma_opt(float(n), params)) for n in n_grid)
    return OptimumReport(
        sigma_star=sigma_star,
        n_star=n_star,
        suppression=suppression,
        sigma_opt_curve=curve,
        method_tag="analytic",
    )


# --- added noise at fixed photon budget --------------------------------------


def _added_noise(
    sigma: float, n_ratio: float, params: DeviceParams, budget: str
) -> float:
    """s_add(sigma) at fixed n_ratio; +inf outside the feasible range."""
    u = n_ratio - sigma**2
    if u <= 0 or sigma >= 1.0:
        return math.inf
    c = params.c_threshold
    om = params.omega_m
    if budget == "ideal":
        s_imp = _imp_ideal(sigma, om, c, u)
    elif budget == "lossy":
        # up-conversion loss recomputed self-consistently: n_s = (n_ratio - sigma^2) n_thr
        kl = params.kappa_abs
        if not math.isinf(params.kappa_p):
            kl = kl + u / params.kappa_p
        if kl >= 1.0:
            return math.inf
        s_imp = _imp_lossy(sigma, om, c, u, kl)
    else:
        raise ValueError(f"unknown budget {budget!r}")
    s_back = 2.0 * c * u / ((1.0 - sigma) ** 2 + 4.0 * om**2)
    return s_imp + s_back


def _golden_section(f, lo: float, hi: float, tol: float) -> float:
    """Golden-section minimum of a unimodal scalar function on [lo, hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = f(x2)
    return 0.5 * (a + b)


def minimize_added_noise(
    params: DeviceParams,
    n_ratio: float,
    budget: str = "ideal",
    eps: float = 1e-9,
    coarse_points: int = 64,
    tol: float = 1e-9,
) -> tuple[float, float]:
    """Minimize s_add over the pump parameter at a fixed photon budget.

    A coarse scan brackets the minimum before golden-section refinement, which
    guards against boundary traps near sigma_max and against the double-well
    shape that appears once the budget exceeds n_star.
    Returns (sigma_min, s_add_min).
    """
    if n_ratio <= 0:
        raise InfeasibleError("photon budget must be positive")
    sigma_max = min(1.0 - eps, math.sqrt(n_ratio))
    if sigma_max <= 0:
        raise InfeasibleError("empty feasible pump-parameter range")

    def f(sigma: float) -> float:
        return _added_noise(sigma, n_ratio, params, budget)

    grid = np.linspace(0.0, sigma_max, coarse_points)
    values = np.array([f(s) for s in grid])
    k = int(np.argmin(values))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, coarse_points - 1)]
    sigma_min = _golden_section(f, lo, hi, tol)
    candidates = [(f(s), s) for s in (sigma_min, 0.0, sigma_max)]
    best, sigma_best = min(candidates)
    if math.isinf(best):
        raise InfeasibleError("added noise is unbounded on the feasible range")
    return sigma_best, best


def sweep_noise_map(params: DeviceParams, n_ratios, sigmas) -> NoiseMap:
    """Dense s_add(n, sigma) map with the SQL contour and the optimal-sigma ridge.

    Cells with n < sigma^2 (pump photons exceeding the budget) are masked with
    NaN and flagged infeasible.
    """
    n_arr = np.asarray(n_ratios, dtype=float)
    s_arr = np.asarray(sigmas, dtype=float)
    if n_arr.size == 0 or s_arr.size == 0:
        raise ValueError("grids must not be empty")

    s_add = np.full((n_arr.size, s_arr.size), INFEASIBLE)
    feasible = np.zeros((n_arr.size, s_arr.size), dtype=bool)
    for i, n in enumerate(n_arr):
        for j, s in enumerate(s_arr):
            value = _added_noise(float(s), float(n), params, "ideal")
            if math.isfinite(value):
                s_add[i, j] = value
                feasible[i, j] = True

    om2 = 4.0 * params.omega_m**2
    c = params.c_threshold
    n_star = n_sql_of_sigma(1.0 / (1.0 + 4.0 * c), params)

    sql_analytic = np.array([n_sql_of_sigma(float(s), params) for s in s_arr])
    sql_extracted = np.full(s_arr.size, INFEASIBLE)
    for j in range(s_arr.size):
        column = s_add[:, j]
        good = np.isfinite(column)
        if good.sum() < 3:
            continue
        idx = np.flatnonzero(good)
        k = idx[np.argmin(column[idx])]
        if idx[0] < k < idx[-1]:  # interior minimum only
            sql_extracted[j] = n_arr[k]

    ridge_analytic = np.array(
        [sigma_opt(float(n), params) if 0 < n <= n_star else INFEASIBLE for n in n_arr]
    )
    ridge_extracted = np.full(n_arr.size, INFEASIBLE)
    for i in range(n_arr.size):
        row = s_add[i, :]
        good = np.isfinite(row)
        if not good.any():
            continue
        idx = np.flatnonzero(good)
        k = idx[np.argmin(row[idx])]
        ridge_extracted[i] = s_arr[k]

    return NoiseMap(
        n_ratios=n_arr,
        sigmas=s_arr,
        s_add=s_add,
        feasible=feasible,
        sql_contour_analytic=sql_analytic,
        sql_contour_extracted=sql_extracted,
        ridge_analytic=ridge_analytic,
        ridge_extracted=ridge_extracted,
    )


def sweep_cooperativity(
    params: DeviceParams,
    c_grid,
    lossy_kappa_abs: float | None = None,
    lossy_kappa_p: float = 20.0,
) -> CooperativitySweep:
    """Minimum added noise versus C_thr at n = n_p_threshold, three scenarios.

    Scenarios: squeezing with no loss (kappa_abs = 0, kappa_p -> inf),
    squeezing with absorption Omega^2/kappa_s and finite pump linewidth, and
    the passive cavity (sigma = 0, no loss).  The cooperativity is swept by
    rescaling g0 at fixed Gamma and nu.
    """
    c_arr = np.asarray(c_grid, dtype=float)
    if np.any(c_arr <= 0):
        raise ValueError("cooperativity grid must be positive")
    if lossy_kappa_abs is None:
        lossy_kappa_abs = params.omega_m**2

    n_ratio = 1.0
    ideal_vals = np.empty(c_arr.size)
    lossy_vals = np.empty(c_arr.size)
    nosqueeze_vals = np.empty(c_arr.size)
    sigma_ideal = np.empty(c_arr.size)
    sigma_lossy = np.empty(c_arr.size)

    for i, c in enumerate(c_arr):
        g0 = params.nu * math.sqrt(c * params.gamma_m)
        base = DeviceParams(
            sigma=0.0,
            omega_m=params.omega_m,
            gamma_m=params.gamma_m,
            nu=params.nu,
            g0=g0,
            kappa_p=math.inf,
            kappa_abs=0.0,
            n_total=n_ratio * 0.25 / params.nu**2,
        )
        sigma_ideal[i], ideal_vals[i] = minimize_added_noise(base, n_ratio, "ideal")
        lossy = DeviceParams(
            sigma=0.0,
            omega_m=params.omega_m,
            gamma_m=params.gamma_m,
            nu=params.nu,
            g0=g0,
            kappa_p=lossy_kappa_p,
            kappa_abs=lossy_kappa_abs,
            n_total=n_ratio * 0.25 / params.nu**2,
        )
        sigma_lossy[i], lossy_vals[i] = minimize_added_noise(lossy, n_ratio, "lossy")
        nosqueeze_vals[i] = _added_noise(0.0, n_ratio, base, "ideal")

    return CooperativitySweep(
        c_values=c_arr,
        s_add_ideal=ideal_vals,
        s_add_lossy=lossy_vals,
        s_add_nosqueeze=nosqueeze_vals,
        sigma_min_ideal=sigma_ideal,
        sigma_min_lossy=sigma_lossy,
    )
