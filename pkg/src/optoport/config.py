"""Run configuration: flat ``key = value`` files with ``#`` comments."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .dynamics import PhysicalParams, nbar_from_temperature
from .protocol import SELECTED_VARIANT, SignVariant


class ConfigError(ValueError):
    pass


# config key -> PhysicalParams field
PHYSICAL_KEYS = {
    "power_w": "power",
    "omega0_rad_s": "carrier",
    "omega_m_rad_s": "mech_freq",
    "phi0_rad": "incidence",
    "mass_kg": "mass",
    "dnu_det_rad_s": "det_bandwidth",
    "dnu_mode_rad_s": "mode_bandwidth",
    "gamma_m_hz": "damping",
}


@dataclass(frozen=True)
class GridSpec:
    start: float = 0.0
    stop: float = 2 * math.pi
    points: int = 2001

    def __post_init__(self):
        if self.points < 2:
            raise ConfigError("grid needs at least 2 points")
        if not (0 <= self.start < self.stop) or not math.isfinite(self.stop):
            raise ConfigError(f"grid bounds must satisfy 0 <= start < stop, got {self.start}:{self.stop}")

    def values(self):
        import numpy as np

        return np.linspace(self.start, self.stop, self.points)

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid must be START:STOP:POINTS, got {text!r}")
        try:
            return cls(_number(parts[0]), _number(parts[1]), int(parts[2]))
        except ValueError as exc:
            raise ConfigError(f"bad grid {text!r}: {exc}") from None


def _number(text: str) -> float:
    """Float, optionally written as a multiple of pi (``2pi``, ``0.5*pi``)."""
    t = text.strip().lower().replace(" ", "")
    if t.endswith("pi"):
        head = t[:-2].rstrip("*")
        return (float(head) if head else 1.0) * math.pi
    return float(t)


def _number_list(text: str) -> tuple[float, ...]:
    items = [s for s in text.replace(";", ",").split(",") if s.strip()]
    if not items:
        raise ConfigError("empty list")
    return tuple(_number(s) for s in items)


@dataclass(frozen=True)
class RunConfig:
    physical: PhysicalParams = field(default_factory=PhysicalParams)
    nbars: tuple[float, ...] = (0.0, 1.0, 10.0, 1000.0)
    grid: GridSpec = field(default_factory=GridSpec)
    n_traj: int = 10_000
    seed: int = 20260101
    alpha_in: complex = 1 + 1j
    mc_chi_t: tuple[float, ...] = (0.5, 1.0, math.sqrt(2.0), 2.0, 2.5)
    mc_nbar: tuple[float, ...] = (0.0, 10.0)
    out: str | None = None
    sign_variant: SignVariant = SELECTED_VARIANT
    readout_sigma: int = 1
    readout_points: int = 201
    jobs: int = 1

    def __post_init__(self):
        if not self.nbars:
            raise ConfigError("nbar list must be nonempty")
        if any(n < 0 for n in self.nbars):
            raise ConfigError("nbar values must be >= 0")
        if self.n_traj < 100:
            raise ConfigError("n_traj must be >= 100")
        if self.readout_sigma not in (1, -1):
            raise ConfigError("readout_sigma must be +1 or -1")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")

    def with_updates(self, **kw) -> "RunConfig":
        return replace(self, **kw)


def _parse_lines(text: str, source: str) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{lineno}: empty key")
        out[key.lower()] = value
    return out


_RUN_KEYS = {
    "nbar", "temperature_k", "grid", "n_traj", "seed", "alpha_in", "mc_chi_t", "mc_nbar",
    "out", "sign_variant", "readout_sigma", "readout_points", "jobs",
}


def config_from_mapping(values: dict[str, str], base: RunConfig | None = None) -> RunConfig:
    """Apply string-valued settings on top of ``base`` (defaults when omitted)."""
    cfg = base or RunConfig()
    unknown = set(values) - set(PHYSICAL_KEYS) - _RUN_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if "nbar" in values and "temperature_k" in values:
        raise ConfigError("give either nbar or temperature_k, not both")
    try:
        phys = {PHYSICAL_KEYS[k]: _number(v) for k, v in values.items() if k in PHYSICAL_KEYS}
        physical = replace(cfg.physical, **phys) if phys else cfg.physical
        kw: dict = {"physical": physical}
        if "temperature_k" in values:
            T = _number(values["temperature_k"])
            physical = replace(physical, temperature=T, nbar=None)
            kw.update(physical=physical, nbars=(nbar_from_temperature(T, physical.mech_freq),))
        if "nbar" in values:
            kw["nbars"] = _number_list(values["nbar"])
        if "grid" in values:
            kw["grid"] = GridSpec.parse(values["grid"])
        for key in ("n_traj", "seed", "readout_points", "jobs"):
            if key in values:
                kw[key] = int(values[key])
        if "readout_sigma" in values:
            kw["readout_sigma"] = int(values["readout_sigma"])
        if "alpha_in" in values:
            kw["alpha_in"] = complex(values["alpha_in"].replace(" ", ""))
        if "mc_chi_t" in values:
            kw["mc_chi_t"] = _number_list(values["mc_chi_t"])
        if "mc_nbar" in values:
            kw["mc_nbar"] = _number_list(values["mc_nbar"])
        if "out" in values:
            kw["out"] = values["out"]
        if "sign_variant" in values:
            kw["sign_variant"] = SignVariant.parse(values["sign_variant"])
        return replace(cfg, **kw)
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path: str | Path | None, overrides: dict[str, str] | None = None) -> RunConfig:
    """Read a config file (optional) and then apply command-line overrides."""
    values: dict[str, str] = {}
    if path is not None:
        p = Path(path)
        try:
            text = p.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {p}: {exc.strerror}") from None
        values.update(_parse_lines(text, str(p)))
    if overrides:
        if "nbar" in overrides:
            values.pop("temperature_k", None)
        if "temperature_k" in overrides:
            values.pop("nbar", None)
        values.update(overrides)
    return config_from_mapping(values)


def dump_config(cfg: RunConfig) -> str:
    """Inverse of :func:`load_config` for the fields a file can set."""
    inv = {v: k for k, v in PHYSICAL_KEYS.items()}
    lines = [f"{inv[f.name]} = {getattr(cfg.physical, f.name)!r}" for f in fields(cfg.physical) if f.name in inv]
    lines += [
        f"nbar = {', '.join(repr(n) for n in cfg.nbars)}",
        f"grid = {cfg.grid.start!r}:{cfg.grid.stop!r}:{cfg.grid.points}",
        f"n_traj = {cfg.n_traj}",
        f"seed = {cfg.seed}",
        f"alpha_in = {cfg.alpha_in!r}".replace("(", "").replace(")", ""),
        f"mc_chi_t = {', '.join(repr(x) for x in cfg.mc_chi_t)}",
        f"mc_nbar = {', '.join(repr(x) for x in cfg.mc_nbar)}",
        f"sign_variant = {cfg.sign_variant.label}",
        f"readout_sigma = {cfg.readout_sigma}",
        f"readout_points = {cfg.readout_points}",
    ]
    return "\n".join(lines) + "\n"
