"""Command-line interface: reproducible CSV/JSON emission for all analyses.

Exit codes: 0 success, 2 configuration error, 3 infeasible physics,
4 numerical failure.  Outputs are computed fully in memory before any file
is written, so a failing run leaves no partial artifacts.  The --threads
flag is a parallelism hint only; results are independent of it.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import design, devices, lti, metrics
from .config import COMMANDS, RunConfig, load_config
from .errors import ConfigError, InfeasibleError, NumericalError
from .output import attach_files, build_manifest, write_csv, write_manifest


def _outdir(cfg: RunConfig) -> Path:
    path = Path(cfg.output.directory)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _finish(cfg: RunConfig, manifest: dict, written: list[Path]) -> Path:
    attach_files(manifest, written)
    manifest_path = _outdir(cfg) / f"{cfg.output.prefix}_manifest.json"
    write_manifest(manifest_path, manifest)
    return manifest_path


def _spectrum_values(params: devices.DeviceParams, model: str, grid) -> np.ndarray:
    system = devices.build_model(params, model)
    series = lti.output_spectrum(system, system.tap_index("Y_out"), grid)
    return series.values


def cmd_spectrum(cfg: RunConfig) -> dict:
    """Detected phase spectrum, pumped versus unpumped at equal signal photons."""
    params = cfg.device
    model = cfg.analysis["model"]
    ospec = cfg.analysis["omega"]
    grid = np.linspace(ospec["min"], ospec["max"], ospec["points"])

    unpumped = dataclasses.replace(
        params, sigma=0.0, n_total=None, n_signal=params.n_signal_resolved
    )
    scale = 2.0 if cfg.analysis["normalize_shot_floor"] else 1.0
    floor = 0.5 * scale

    def rows_for(omegas) -> list[tuple]:
        pumped_vals = _spectrum_values(params, model, omegas) * scale
        unpumped_vals = _spectrum_values(unpumped, model, omegas) * scale
        return [
            (w, p, u, floor)
            for w, p, u in zip(omegas, pumped_vals, unpumped_vals)
        ]

    header = ["omega_over_kappa", "S_YY_pumped", "S_YY_unpumped", "shot_floor"]
    out = _outdir(cfg)
    digits = cfg.output.precision
    main_path = out / f"{cfg.output.prefix}_spectrum.csv"
    written = [main_path]
    main_rows = rows_for(grid)

    zoom_rows = None
    zoom_path = out / f"{cfg.output.prefix}_spectrum_zoom.csv"
    if cfg.analysis["zoom"] is not None:
        zoom_grid = lti.mechanical_zoom_grid(
            params.omega_m,
            params.gamma_m,
            span_gammas=cfg.analysis["zoom"]["span_gamma"],
            points=cfg.analysis["zoom"]["points"],
        )
        zoom_rows = rows_for(zoom_grid)
        written.append(zoom_path)

    write_csv(main_path, header, main_rows, digits)
    if zoom_rows is not None:
        write_csv(zoom_path, header, zoom_rows, digits)

    manifest = build_manifest(cfg.echo, cfg.command, params)
    _finish(cfg, manifest, written)
    return manifest


def cmd_noise_map(cfg: RunConfig) -> dict:
    """Added-noise map over (n_ratio, sigma) plus SQL contour and optimal ridge."""
    params = cfg.device
    nspec, sspec = cfg.analysis["n_ratio"], cfg.analysis["sigma"]
    n_grid = np.linspace(nspec["min"], nspec["max"], nspec["points"])
    s_grid = np.linspace(sspec["min"], sspec["max"], sspec["points"])
    noise_map = design.sweep_noise_map(params, n_grid, s_grid)

    rows = []
    for i, n in enumerate(noise_map.n_ratios):
        for j, s in enumerate(noise_map.sigmas):
            rows.append(
                (n, s, noise_map.s_add[i, j], int(noise_map.feasible[i, j]))
            )

    contour_rows = []
    if len(noise_map.n_ratios) > 1 and len(noise_map.sigmas) > 1:
        for j, s in enumerate(noise_map.sigmas):
            contour_rows.append(
                ("sql_contour", s, noise_map.sql_contour_analytic[j],
                 noise_map.sql_contour_extracted[j])
            )
        for i, n in enumerate(noise_map.n_ratios):
            contour_rows.append(
                ("sigma_opt", n, noise_map.ridge_analytic[i],
                 noise_map.ridge_extracted[i])
            )

    out = _outdir(cfg)
    digits = cfg.output.precision
    map_path = out / f"{cfg.output.prefix}_noise_map.csv"
    contour_path = out / f"{cfg.output.prefix}_noise_map_contours.csv"
    write_csv(map_path, ["n_ratio", "sigma", "s_add", "feasible"], rows, digits)
    write_csv(contour_path, ["curve", "coordinate", "analytic", "extracted"],
              contour_rows, digits)

    manifest = build_manifest(cfg.echo, cfg.command, params)
    _finish(cfg, manifest, [map_path, contour_path])
    return manifest


def cmd_sweep(cfg: RunConfig) -> dict:
    """Minimum added noise versus threshold cooperativity, three scenarios."""
    params = cfg.device
    cspec = cfg.analysis["c_thr"]
    c_grid = np.geomspace(cspec["min"], cspec["max"], cspec["points"])
    sweep = design.sweep_cooperativity(
        params,
        c_grid,
        lossy_kappa_abs=cfg.analysis["lossy_kappa_abs"],
        lossy_kappa_p=cfg.analysis["lossy_kappa_p"],
    )
    rows = [
        (
            sweep.c_values[i],
            sweep.s_add_ideal[i],
            sweep.s_add_lossy[i],
            sweep.s_add_nosqueeze[i],
            sweep.sigma_min_ideal[i],
            sweep.sigma_min_lossy[i],
        )
        for i in range(sweep.c_values.size)
    ]
    out = _outdir(cfg)
    path = out / f"{cfg.output.prefix}_sweep.csv"
    write_csv(
        path,
        ["c_thr", "s_add_ideal", "s_add_lossy", "s_add_nosqueeze",
         "sigma_min_ideal", "sigma_min_lossy"],
        rows,
        cfg.output.precision,
    )
    manifest = build_manifest(cfg.echo, cfg.command, params)
    _finish(cfg, manifest, [path])
    return manifest


def cmd_optimize(cfg: RunConfig) -> dict:
    """SQL-reachability optimum as a JSON report."""
    params = cfg.device
    report = design.optimal_point(params, curve_points=cfg.analysis["curve_points"])
    payload = {
        "sigma_star": report.sigma_star,
        "n_star": report.n_star,
        "suppression": report.suppression,
        "method_tag": report.method_tag,
        "sigma_opt_curve": [[n, s] for n, s in report.sigma_opt_curve],
    }
    out = _outdir(cfg)
    path = out / f"{cfg.output.prefix}_optimum.json"
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    manifest = build_manifest(cfg.echo, cfg.command, params)
    _finish(cfg, manifest, [path])
    return manifest


def _mechanical_decay(eigenvalues: np.ndarray, omega_m: float) -> float:
    """Intensity decay rate of the eigenvalue pair nearest +/- i Omega."""
    idx = int(np.argmin(np.abs(np.abs(eigenvalues.imag) - omega_m)))
    return -2.0 * float(eigenvalues[idx].real)


def cmd_stability(cfg: RunConfig) -> dict:
    """Eigenvalue scan over sigma plus a bisected instability threshold."""
    params = cfg.device
    model = cfg.analysis["model"]
    sspec = cfg.analysis["sigma"]
    sigmas = np.linspace(sspec["min"], sspec["max"], sspec["points"])

    rows = []
    for s in sigmas:
        system = devices.build_model(
            params.with_fixed_signal(float(s)), model, allow_above_threshold=True
        )
        report = lti.stability_eigenvalues(system)
        rows.append(
            (
                float(s),
                float(np.max(report.eigenvalues.real)),
                int(report.stable),
                _mechanical_decay(report.eigenvalues, params.omega_m),
            )
        )
    threshold = devices.instability_threshold(params, model)

    out = _outdir(cfg)
    path = out / f"{cfg.output.prefix}_stability.csv"
    write_csv(
        path,
        ["sigma", "max_real_eigenvalue", "stable", "mech_decay_rate"],
        rows,
        cfg.output.precision,
    )
    manifest = build_manifest(
        cfg.echo, cfg.command, params,
        extra_derived={"instability_threshold": threshold},
    )
    _finish(cfg, manifest, [path])
    return manifest


def cmd_validate(cfg: RunConfig) -> dict:
    """Regime-validity checks as a JSON report."""
    params = cfg.device
    checks = devices.validity_report(params)
    payload = {
        "checks": [
            {
                "name": c.name,
                "ratio": None if math.isinf(c.ratio) else c.ratio,
                "threshold": c.threshold,
                "passed": c.passed,
                "detail": c.detail,
            }
            for c in checks
        ],
        "all_passed": all(c.passed for c in checks),
    }
    out = _outdir(cfg)
    path = out / f"{cfg.output.prefix}_validity.json"
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    manifest = build_manifest(cfg.echo, cfg.command, params)
    _finish(cfg, manifest, [path])
    return manifest


_HANDLERS = {
    "spectrum": cmd_spectrum,
    "noise-map": cmd_noise_map,
    "sweep": cmd_sweep,
    "optimize": cmd_optimize,
    "stability": cmd_stability,
    "validate": cmd_validate,
}


def run_command(command: str, config_path: str, out_dir: str | None = None,
                precision: int | None = None) -> dict:
    """Load a config, apply CLI overrides, and execute one command."""
    cfg = load_config(config_path, command)
    if out_dir is not None or precision is not None:
        output = cfg.output
        if out_dir is not None:
            output = dataclasses.replace(output, directory=out_dir)
        if precision is not None:
            if not 2 <= precision <= 17:
                raise ConfigError("output.precision: at most 17 significant digits")
            output = dataclasses.replace(output, precision=precision)
        echo = dict(cfg.echo)
        echo["output"] = {
            "directory": output.directory,
            "prefix": output.prefix,
            "precision": output.precision,
        }
        cfg = dataclasses.replace(cfg, output=output, echo=echo)
    return _HANDLERS[command](cfg)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sqznoise",
        description="Measurement-noise budgets for intracavity-squeezed "
                    "optomechanical position detection.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON configuration file")
        p.add_argument("--out", default=None, help="output directory override")
        p.add_argument("--precision", type=int, default=None,
                       help="significant digits in CSV output")
        p.add_argument("--threads", type=int, default=1,
                       help="parallelism hint; output is independent of it")
    args = parser.parse_args(argv)

    if args.threads is not None and args.threads < 1:
        print("config error: --threads must be >= 1", file=sys.stderr)
        return 2
    try:
        run_command(args.command, args.config, args.out, args.precision)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except InfeasibleError as exc:
        print(f"infeasible configuration: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4
    return 0


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
