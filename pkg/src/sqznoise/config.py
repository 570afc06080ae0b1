"""Run-configuration parsing and strict validation.

Configurations are single JSON documents with three blocks: ``device``,
``analysis`` (command-specific), and ``output``.  Unknown keys are errors so
typos cannot silently change a run; every rejection message names the exact
offending field path.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .devices import DeviceParams, thermal_occupancy
from .errors import ConfigError

COMMANDS = ("spectrum", "noise-map", "sweep", "optimize", "stability", "validate")


@dataclass(frozen=True)
class OutputOptions:
    directory: str
    prefix: str
    precision: int


@dataclass(frozen=True)
class RunConfig:
    command: str
    device: DeviceParams
    analysis: dict
    output: OutputOptions
    echo: dict  # fully resolved config, reproducible input for a re-run


def _require_mapping(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(f"{path}: expected an object")
    return value


def _check_keys(block: dict, allowed, path: str) -> None:
    unknown = sorted(set(block) - set(allowed))
    if unknown:
        raise ConfigError(f"{path}.{unknown[0]}: unknown key")


def _number(block: dict, key: str, path: str, *, default=None, required=False,
            nullable=False):
    if key not in block:
        if required:
            raise ConfigError(f"{path}.{key}: required field is missing")
        return default
    value = block[key]
    if value is None and nullable:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}.{key}: expected a number")
    return float(value)


def _integer(block: dict, key: str, path: str, *, default=None, minimum=1):
    if key not in block:
        return default
    value = block[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}.{key}: expected an integer")
    if value < minimum:
        raise ConfigError(f"{path}.{key}: must be >= {minimum}")
    return value


def _grid(block: dict, key: str, path: str, default: dict) -> dict:
    raw = block.get(key, default)
    spec = _require_mapping(raw, f"{path}.{key}")
    _check_keys(spec, ("min", "max", "points"), f"{path}.{key}")
    lo = _number(spec, "min", f"{path}.{key}", required=True)
    hi = _number(spec, "max", f"{path}.{key}", required=True)
    points = _integer(spec, "points", f"{path}.{key}", default=None, minimum=1)
    if points is None:
        raise ConfigError(f"{path}.{key}.points: required field is missing")
    if hi < lo:
        raise ConfigError(f"{path}.{key}.max: must be >= min")
    if points > 1 and hi == lo:
        raise ConfigError(f"{path}.{key}.points: more than one point needs max > min")
    return {"min": lo, "max": hi, "points": points}


DEVICE_KEYS = (
    "sigma", "omega_m", "gamma_m", "nu", "g0", "kappa_p", "kappa_abs",
    "kappa_p_abs", "n_total", "n_signal", "n_th", "temperature_ratio",
)


def _parse_device(raw: dict) -> tuple[DeviceParams, dict]:
    block = _require_mapping(raw, "device")
    _check_keys(block, DEVICE_KEYS, "device")

    sigma = _number(block, "sigma", "device", required=True)
    omega_m = _number(block, "omega_m", "device", required=True)
    gamma_m = _number(block, "gamma_m", "device", required=True)
    nu = _number(block, "nu", "device", required=True)
    g0 = _number(block, "g0", "device", required=True)
    kappa_p = _number(block, "kappa_p", "device", default=None, nullable=True)
    kappa_abs = _number(block, "kappa_abs", "device", default=0.0)
    kappa_p_abs = _number(block, "kappa_p_abs", "device", default=0.0)

    if ("n_total" in block) == ("n_signal" in block):
        raise ConfigError("device.n_total: set exactly one of n_total or n_signal")
    n_total = _number(block, "n_total", "device", default=None)
    n_signal = _number(block, "n_signal", "device", default=None)

    if ("n_th" in block) == ("temperature_ratio" in block):
        raise ConfigError("device.n_th: set exactly one of n_th or temperature_ratio")
    if "temperature_ratio" in block:
        ratio = _number(block, "temperature_ratio", "device")
        if ratio < 0:
            raise ConfigError("device.temperature_ratio: must be non-negative")
        n_th = thermal_occupancy(ratio)
    else:
        n_th = _number(block, "n_th", "device")

    try:
        params = DeviceParams(
            sigma=sigma,
            omega_m=omega_m,
            gamma_m=gamma_m,
            nu=nu,
            g0=g0,
            kappa_p=math.inf if kappa_p is None else kappa_p,
            kappa_abs=kappa_abs,
            kappa_p_abs=kappa_p_abs,
            n_total=n_total,
            n_signal=n_signal,
            n_th=n_th,
        )
    except ValueError as exc:
        raise ConfigError(f"device: {exc}") from exc

    echo = {
        "sigma": sigma,
        "omega_m": omega_m,
        "gamma_m": gamma_m,
        "nu": nu,
        "g0": g0,
        "kappa_p": kappa_p,
        "kappa_abs": kappa_abs,
        "kappa_p_abs": kappa_p_abs,
        "n_th": n_th,
    }
    if n_total is not None:
        echo["n_total"] = n_total
    else:
        echo["n_signal"] = n_signal
    return params, echo


_MODELS = ("ideal", "adiabatic", "full")


def _parse_analysis(raw, command: str) -> dict:
    path = "analysis"
    block = _require_mapping(raw if raw is not None else {}, path)

    if command == "spectrum":
        _check_keys(block, ("model", "omega", "zoom", "normalize_shot_floor"), path)
        model = block.get("model", "ideal")
        if model not in _MODELS:
            raise ConfigError(f"{path}.model: must be one of {_MODELS}")
        omega = _grid(block, "omega", path,
                      {"min": -5.0, "max": 5.0, "points": 4001})
        zoom_raw = block.get("zoom", {"span_gamma": 50.0, "points": 2001})
        zoom = None
        if zoom_raw is not None:
            zoom_spec = _require_mapping(zoom_raw, f"{path}.zoom")
            _check_keys(zoom_spec, ("span_gamma", "points"), f"{path}.zoom")
            zoom = {
                "span_gamma": _number(zoom_spec, "span_gamma", f"{path}.zoom",
                                      default=50.0),
                "points": _integer(zoom_spec, "points", f"{path}.zoom",
                                   default=2001, minimum=5),
            }
        normalize = block.get("normalize_shot_floor", False)
        if not isinstance(normalize, bool):
            raise ConfigError(f"{path}.normalize_shot_floor: expected a boolean")
        return {"model": model, "omega": omega, "zoom": zoom,
                "normalize_shot_floor": normalize}

    if command == "noise-map":
        _check_keys(block, ("n_ratio", "sigma"), path)
        return {
            "n_ratio": _grid(block, "n_ratio", path,
                             {"min": 0.05, "max": 3.0, "points": 61}),
            "sigma": _grid(block, "sigma", path,
                           {"min": 0.0, "max": 0.95, "points": 60}),
        }

    if command == "sweep":
        _check_keys(block, ("c_thr", "lossy_kappa_abs", "lossy_kappa_p"), path)
        grid = _grid(block, "c_thr", path, {"min": 0.01, "max": 10.0, "points": 25})
        if grid["min"] <= 0:
            raise ConfigError(f"{path}.c_thr.min: must be positive")
        lossy_abs = _number(block, "lossy_kappa_abs", path, default=None,
                            nullable=True)
        lossy_kp = _number(block, "lossy_kappa_p", path, default=20.0)
        return {"c_thr": grid, "lossy_kappa_abs": lossy_abs,
                "lossy_kappa_p": lossy_kp}

    if command == "optimize":
        _check_keys(block, ("curve_points",), path)
        return {"curve_points": _integer(block, "curve_points", path,
                                         default=41, minimum=2)}

    if command == "stability":
        _check_keys(block, ("model", "sigma"), path)
        model = block.get("model", "ideal")
        if model not in _MODELS:
            raise ConfigError(f"{path}.model: must be one of {_MODELS}")
        return {
            "model": model,
            "sigma": _grid(block, "sigma", path,
                           {"min": 0.0, "max": 1.5, "points": 61}),
        }

    if command == "validate":
        _check_keys(block, (), path)
        return {}

    raise ConfigError(f"unknown command {command!r}")


def _parse_output(raw, command: str) -> OutputOptions:
    block = _require_mapping(raw if raw is not None else {}, "output")
    _check_keys(block, ("directory", "prefix", "precision"), "output")
    directory = block.get("directory", ".")
    if not isinstance(directory, str):
        raise ConfigError("output.directory: expected a string")
    prefix = block.get("prefix", command.replace("-", "_"))
    if not isinstance(prefix, str) or not prefix:
        raise ConfigError("output.prefix: expected a non-empty string")
    precision = _integer(block, "precision", "output", default=12, minimum=2)
    if precision > 17:
        raise ConfigError("output.precision: at most 17 significant digits")
    return OutputOptions(directory=directory, prefix=prefix, precision=precision)


def parse_config(data: dict, command: str) -> RunConfig:
    """Validate a raw configuration mapping for the given command."""
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    top = _require_mapping(data, "config")
    _check_keys(top, ("device", "analysis", "output"), "config")
    if "device" not in top:
        raise ConfigError("config.device: required block is missing")

    device, device_echo = _parse_device(top["device"])
    analysis = _parse_analysis(top.get("analysis"), command)
    output = _parse_output(top.get("output"), command)

    echo = {
        "device": device_echo,
        "analysis": analysis,
        "output": {
            "directory": output.directory,
            "prefix": output.prefix,
            "precision": output.precision,
        },
    }
    return RunConfig(command=command, device=device, analysis=analysis,
                     output=output, echo=echo)


def load_config(path: str | Path, command: str) -> RunConfig:
    """Read and validate a JSON configuration file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    return parse_config(data, command)
