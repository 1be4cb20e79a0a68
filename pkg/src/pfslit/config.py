"""JSON run configuration files and the bundled electron/neon setups."""

from __future__ import annotations

import json
import math
from importlib import resources
from pathlib import Path

from .core import BeamSpec, SlitGeometry
from .experiment import DEFAULT_BINS, ConfigError, RunConfig
from .trajectory import PAPER
from .wavefield import APPROXIMATE, FieldParams

# c_F default as a fraction of lambda0; keeps p0^2 4 c_F^2 / hbar^2 ~ 4e-7 (weak field)
DEFAULT_CF_FRACTION = 5e-5

REQUIRED_KEYS = ("lambda0_m", "mass_kg", "a0", "slit_width_m", "slit_separation_m",
                 "screen_distance_m", "theta_max_rad", "n_particles", "seed")
OPTIONAL_KEYS = ("c_f_m", "bins", "density_mode", "propagation_mode")
BUNDLED = ("electron", "neon")


def _line_of(text: str, key: str) -> int | None:
    needle = f'"{key}"'
    for no, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return no
    return None


def _fail(text: str, key: str, message: str):
    line = _line_of(text, key)
    where = f" (line {line})" if line else ""
    raise ConfigError(f"{key}{where}: {message}")


def _number(text, raw, key, positive=True, allow_zero=False):
    value = raw[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        _fail(text, key, f"expected a finite number, got {value!r}")
    if positive and not (value > 0 or (allow_zero and value == 0)):
        _fail(text, key, f"must be {'non-negative' if allow_zero else 'positive'}, got {value!r}")
    return float(value)


def _integer(text, raw, key, minimum):
    value = raw[key]
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(text, key, f"expected an integer, got {value!r}")
    if value < minimum:
        _fail(text, key, f"must be >= {minimum}, got {value!r}")
    return value


def parse_config(text: str, seed: int | None = None, particles: int | None = None) -> RunConfig:
    """Build a :class:`RunConfig` from JSON text; ``seed``/``particles`` override the file."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    unknown = sorted(set(raw) - set(REQUIRED_KEYS) - set(OPTIONAL_KEYS))
    if unknown:
        _fail(text, unknown[0], "unknown key")
    missing = [k for k in REQUIRED_KEYS if k not in raw]
    if missing:
        raise ConfigError(f"missing required key(s): {', '.join(missing)}")

    if seed is not None:
        raw["seed"] = seed
    if particles is not None:
        raw["n_particles"] = particles

    lambda0 = _number(text, raw, "lambda0_m")
    c_f = _number(text, raw, "c_f_m", allow_zero=True) if "c_f_m" in raw \
        else DEFAULT_CF_FRACTION * lambda0
    seed_value = _integer(text, raw, "seed", 0)
    if seed_value >= 2 ** 64:
        _fail(text, "seed", "must fit in 64 bits")
    for key in ("density_mode", "propagation_mode"):
        if key in raw and not isinstance(raw[key], str):
            _fail(text, key, f"expected a string, got {raw[key]!r}")
    try:
        beam = BeamSpec(lambda0=lambda0, mass=_number(text, raw, "mass_kg"),
                        a0=_number(text, raw, "a0"))
        geometry = SlitGeometry.symmetric(
            width=_number(text, raw, "slit_width_m"),
            separation=_number(text, raw, "slit_separation_m", allow_zero=True),
            screen_distance=_number(text, raw, "screen_distance_m"))
        return RunConfig(
            beam=beam, geometry=geometry, field=FieldParams(c_f),
            theta_max=_number(text, raw, "theta_max_rad"),
            n_particles=_integer(text, raw, "n_particles", 1),
            seed=seed_value,
            density_mode=raw.get("density_mode", APPROXIMATE),
            propagation_mode=raw.get("propagation_mode", PAPER),
            bins=_integer(text, raw, "bins", 10) if "bins" in raw else DEFAULT_BINS,
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path, seed: int | None = None, particles: int | None = None) -> RunConfig:
    return parse_config(Path(path).read_text(), seed=seed, particles=particles)


def bundled_config_text(name: str) -> str:
    if name not in BUNDLED:
        raise KeyError(name)
    return resources.files("pfslit").joinpath("configs", f"{name}.json").read_text()


def bundled_config(name: str, seed: int | None = None, particles: int | None = None) -> RunConfig:
    return parse_config(bundled_config_text(name), seed=seed, particles=particles)
