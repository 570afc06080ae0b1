"""Deterministic CSV and manifest emission.

Numbers are written with a fixed count of significant digits (default 12),
decimal point, no locale dependence; scientific notation outside
[1e-3, 1e6).  Manifests carry the resolved configuration, derived device
quantities, validity checks, and SHA-256 hashes of every emitted file, so a
run can be re-executed and byte-compared from its manifest alone.
"""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path

from . import __version__
from .devices import DeviceParams, validity_report


def format_number(value, digits: int = 12) -> str:
    """Fixed-significant-digit decimal representation of one CSV cell."""
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    x = float(value)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0.0:
        return "0"
    ax = abs(x)
    if 1e-3 <= ax < 1e6:
        decimals = digits - 1 - math.floor(math.log10(ax))
        return f"{x:.{max(decimals, 0)}f}"
    return f"{x:.{digits - 1}e}"


def write_csv(path: Path, header, rows, digits: int = 12) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_number(cell, digits) for cell in row))
    path.write_text("\n".join(lines) + "\n")


def file_sha256(path: Path) -> str:
    digest = hashlib.sha256(path.read_bytes())
    return digest.hexdigest()


def derived_quantities(params: DeviceParams) -> dict:
    """Derived device numbers echoed into every manifest."""
    from .design import optimal_point

    out = {
        "c_thr": params.c_threshold,
        "n_p_threshold": params.n_p_threshold,
        "n_signal": params.n_signal_resolved,
        "n_pump": params.n_pump,
        "n_total": params.n_total_resolved,
        "kappa_loss": params.kappa_loss,
        "kappa_in": params.kappa_in,
    }
    if params.c_threshold > 0:
        report = optimal_point(params, curve_points=2)
        out["sigma_star"] = report.sigma_star
        out["n_star"] = report.n_star
        out["suppression"] = report.suppression
    return out


def build_manifest(config_echo: dict, command: str, params: DeviceParams,
                   extra_derived: dict | None = None) -> dict:
    derived = derived_quantities(params)
    if extra_derived:
        derived.update(extra_derived)
    checks = [
        {
            "name": c.name,
            "ratio": None if math.isinf(c.ratio) else c.ratio,
            "threshold": c.threshold,
            "passed": c.passed,
            "detail": c.detail,
        }
        for c in validity_report(params)
    ]
    return {
        "artifact": {"name": "sqznoise", "version": __version__},
        "command": command,
        "config": config_echo,
        "derived": derived,
        "validity": checks,
        "files": {},
    }


def write_manifest(path: Path, manifest: dict) -> None:
    path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")


def attach_files(manifest: dict, paths) -> None:
    for p in paths:
        manifest["files"][p.name] = f"sha256:{file_sha256(p)}"


def verify_manifest(path: Path) -> bool:
    """Re-hash the files listed in a manifest and re-derive device quantities."""
    from .config import parse_config

    manifest = json.loads(Path(path).read_text())
    base = Path(path).parent
    for name, stored in manifest["files"].items():
        actual = f"sha256:{file_sha256(base / name)}"
        if actual != stored:
            return False
    echo = manifest["config"]
    command = manifest["command"]
    rebuilt = parse_config(
        {"device": echo["device"], "output": echo["output"]}, command
    )
    fresh = derived_quantities(rebuilt.device)
    for key, value in fresh.items():
        if key in manifest["derived"] and not math.isclose(
            manifest["derived"][key], value, rel_tol=1e-12, abs_tol=1e-300
        ):
            return False
    return True
