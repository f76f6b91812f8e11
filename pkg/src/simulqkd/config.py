"""Run configuration: flat ``key = value`` files merged with command-line overrides.

Unknown keys are rejected; a typo in a physics parameter must never pass
silently.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .phase_space import ParameterError, SystemParams

MODES = ("budget", "alpha-sweep", "keyrate-sweep", "simulate")
PARAM_KEYS = tuple(f.name for f in dataclasses.fields(SystemParams))
RUN_KEYS = (
    "sweep",
    "sigma_phi_list",
    "n_pulses",
    "master_seed",
    "workers",
    "chunk_size",
    "strict_noise_mode",
    "floor_rate",
    "output",
    "records",
)
ALL_KEYS = PARAM_KEYS + RUN_KEYS
DEFAULT_SIGMA_PHI_LIST = (1e-3, 1e-4, 1e-5, 1e-6)


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


@dataclass(frozen=True)
class SweepAxis:
    name: str
    values: tuple[float, ...]

    @classmethod
    def parse(cls, text: str) -> SweepAxis:
        """``name:start:stop:step`` (inclusive range) or ``name:v1,v2,...``."""
        name, sep, rest = text.partition(":")
        name = name.strip()
        if not sep or name not in PARAM_KEYS or name == "M":
            raise ConfigError(f"sweep: axis must name a numeric SystemParams field, got {text!r}")
        parts = rest.split(":")
        try:
            if len(parts) == 3:
                start, stop, step = (float(v) for v in parts)
                if not step > 0:
                    raise ConfigError(f"sweep: step must be > 0, got {step}")
                if stop < start:
                    raise ConfigError("sweep: stop must be >= start")
                count = int(math.floor((stop - start) / step + 1e-9)) + 1
                values = np.round(start + step * np.arange(count), 12)
            elif len(parts) == 1:
                values = [float(v) for v in parts[0].split(",") if v.strip()]
            else:
                raise ConfigError(f"sweep: cannot parse {text!r}")
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"sweep: cannot parse {text!r}") from exc
        if len(values) == 0:
            raise ConfigError("sweep: no values")
        return cls(name, tuple(float(v) for v in values))

    @property
    def column(self) -> str:
        return "L_km" if self.name == "L" else self.name


@dataclass(frozen=True)
class RunConfig:
    mode: str
    params: SystemParams = SystemParams()
    sweep: SweepAxis | None = None
    sigma_phi_list: tuple[float, ...] = DEFAULT_SIGMA_PHI_LIST
    n_pulses: int = 1_000_000
    master_seed: int = 1
    workers: int = 1
    chunk_size: int = 1 << 18
    strict_noise_mode: bool = False
    floor_rate: bool = False
    output: str | None = None
    records: str | None = None
    raw: dict = field(default_factory=dict, compare=False)


def read_config_file(path: str | Path) -> dict[str, str]:
    """Parse a ``key = value`` file; ``#`` starts a comment."""
    entries: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            raise ConfigError(f"config line {lineno}: expected 'key = value', got {line!r}")
        if key not in ALL_KEYS:
            raise ConfigError(f"config line {lineno}: unknown key {key!r}")
        entries[key] = value
    return entries


def _as_bool(key: str, value: str) -> bool:
    v = value.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {value!r}")


def _as_int(key: str, value: str) -> int:
    try:
        return int(value)
    except ValueError as exc:
        raise ConfigError(f"{key}: expected an integer, got {value!r}") from exc


def _as_float(key: str, value: str) -> float:
    try:
        out = float(value)
    except ValueError as exc:
        raise ConfigError(f"{key}: expected a number, got {value!r}") from exc
    if not math.isfinite(out):
        raise ConfigError(f"{key}: must be finite, got {value!r}")
    return out


def build_run_config(mode: str, entries: dict[str, str]) -> RunConfig:
    """Validate raw string entries and assemble a :class:`RunConfig`."""
    if mode not in MODES:
        raise ConfigError(f"mode: unknown mode {mode!r}")
    unknown = set(entries) - set(ALL_KEYS)
    if unknown:
        raise ConfigError(f"unknown key(s): {', '.join(sorted(unknown))}")

    overrides = {}
    for key in PARAM_KEYS:
        if key in entries:
            value = entries[key]
            if key == "alpha" and value.lower() in ("auto", "none"):
                overrides[key] = None
            elif key == "M":
                overrides[key] = _as_int(key, value)
            else:
                overrides[key] = _as_float(key, value)
    try:
        params = SystemParams(**overrides)
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc

    kw: dict = {}
    if "sweep" in entries:
        kw["sweep"] = SweepAxis.parse(entries["sweep"])
    if "sigma_phi_list" in entries:
        values = tuple(_as_float("sigma_phi_list", v) for v in entries["sigma_phi_list"].split(",") if v.strip())
        if not values:
            raise ConfigError("sigma_phi_list: empty list")
        if any(v < 0 for v in values):
            raise ConfigError("sigma_phi_list: values must be >= 0")
        kw["sigma_phi_list"] = values
    for key in ("n_pulses", "master_seed", "workers", "chunk_size"):
        if key in entries:
            kw[key] = _as_int(key, entries[key])
    for key in ("strict_noise_mode", "floor_rate"):
        if key in entries:
            kw[key] = _as_bool(key, entries[key])
    for key in ("output", "records"):
        if key in entries:
            kw[key] = entries[key]

    cfg = RunConfig(mode=mode, params=params, raw=dict(entries), **kw)
    _check_mode(cfg)
    return cfg


def _check_mode(cfg: RunConfig) -> None:
    if cfg.mode in ("alpha-sweep", "keyrate-sweep"):
        if cfg.sweep is None:
            raise ConfigError(f"sweep: required for {cfg.mode} (e.g. sweep = L:0:50:1)")
        if cfg.sweep.name == "alpha":
            raise ConfigError("sweep: alpha is derived per point and cannot be swept")
        if cfg.mode == "keyrate-sweep" and cfg.sweep.name == "sigma_phi":
            raise ConfigError("sweep: use sigma_phi_list for phase noise in keyrate-sweep")
    if cfg.n_pulses < 1:
        raise ConfigError(f"n_pulses: must be >= 1, got {cfg.n_pulses}")
    if cfg.workers < 1:
        raise ConfigError(f"workers: must be >= 1, got {cfg.workers}")
    if cfg.chunk_size < 1:
        raise ConfigError(f"chunk_size: must be >= 1, got {cfg.chunk_size}")
    if not 0 <= cfg.master_seed < 2**64:
        raise ConfigError("master_seed: must be a 64-bit unsigned integer")
