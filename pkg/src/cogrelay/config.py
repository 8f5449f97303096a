"""Run configuration files.

A config is a YAML mapping with the sections::

    channel:            # exactly one of
      direct: {pbar.sd_s.0: 0.7, ...}   # or nested {pbar: {sd_s: {0: 0.7}}}
      physical: {bits: ..., slot_s: ..., noise_w: {...}, sigma: {...}}
    arrivals:   {lambda_p: 0.1, lambda_e: 0.9}
    policy-grid: {grid: 41}
    simulation: {replicas: 20, slots: 100000, seed: 0, warmup: 0.1}

Only ``channel`` is required.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

import yaml

from .channel import ConfigError, PhysicalConfig, build_table, flatten_keys, physical_from_mapping
from .optimize import DEFAULT_GRID
from .presets import Preset, get_preset

SECTIONS = ("channel", "arrivals", "policy-grid", "simulation")


@dataclass(frozen=True)
class SimSettings:
    replicas: int = 20
    slots: int = 100_000
    seed: int = 0
    warmup: float = 0.1

    def __post_init__(self):
        if self.replicas < 1:
            raise ConfigError(f"simulation.replicas must be >= 1, got {self.replicas}")
        if not 0.0 <= self.warmup < 1.0:
            raise ConfigError(f"simulation.warmup must lie in [0, 1), got {self.warmup}")
        if self.slots < 1 or self.slots <= round(self.warmup * self.slots):
            raise ConfigError(f"simulation.slots must exceed the warm-up length, got {self.slots}")


@dataclass(frozen=True)
class RunConfig:
    """Everything a sweep needs besides the swept axis."""

    scenario: Preset
    lam_p: float = 0.0
    lam_e: float = 1.0
    grid: int = DEFAULT_GRID
    sim: SimSettings = field(default_factory=SimSettings)


def _section(d: Mapping, name: str) -> Mapping:
    v = d.get(name, {}) or {}
    if not isinstance(v, Mapping):
        raise ConfigError(f"section {name!r} must be a mapping")
    return v


def _check_keys(section: str, d: Mapping, allowed) -> None:
    extra = sorted(set(d) - set(allowed))
    if extra:
        raise ConfigError(f"{section} has unknown keys: {', '.join(map(str, extra))}")


def _prob(section: str, key: str, v: Any) -> float:
    try:
        x = float(v)
    except (TypeError, ValueError):
        raise ConfigError(f"{section}.{key} must be a number, got {v!r}") from None
    if not 0.0 <= x <= 1.0:
        raise ConfigError(f"{section}.{key} must lie in [0, 1], got {x!r}")
    return x


def _int(section: str, key: str, v: Any) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{section}.{key} must be an integer, got {v!r}")
    return v


def from_mapping(d: Mapping, name: str = "config") -> RunConfig:
    if not isinstance(d, Mapping):
        raise ConfigError("configuration must be a mapping of sections")
    _check_keys("config", d, SECTIONS)
    if "channel" not in d:
        raise ConfigError("configuration needs a 'channel' section")
    ch = _section(d, "channel")
    _check_keys("channel", ch, ("direct", "physical"))
    if ("direct" in ch) == ("physical" in ch):
        raise ConfigError("channel needs exactly one of 'direct' or 'physical'")
    if "direct" in ch:
        direct = {str(k): v for k, v in flatten_keys(_section(ch, "direct")).items()}
        build_table(direct)  # validate eagerly
        scenario = Preset(name=name, description="from config", lam_e=1.0, direct=direct,
                          free=("lambda_p", "lambda_e", "X"))
    else:
        phys = physical_from_mapping(_section(ch, "physical"))
        build_table(phys)
        scenario = Preset(name=name, description="from config", lam_e=1.0,
                          physical=_physical_kwargs(phys), free=("lambda_p", "lambda_e", "B"))

    arr = _section(d, "arrivals")
    _check_keys("arrivals", arr, ("lambda_p", "lambda_e"))
    lam_p = _prob("arrivals", "lambda_p", arr.get("lambda_p", 0.0))
    lam_e = _prob("arrivals", "lambda_e", arr.get("lambda_e", 1.0))

    pg = _section(d, "policy-grid")
    _check_keys("policy-grid", pg, ("grid",))
    grid = _int("policy-grid", "grid", pg.get("grid", DEFAULT_GRID))
    if grid < 2:
        raise ConfigError(f"policy-grid.grid must be >= 2, got {grid}")

    sm = _section(d, "simulation")
    _check_keys("simulation", sm, ("replicas", "slots", "seed", "warmup"))
    sim = SimSettings(
        replicas=_int("simulation", "replicas", sm.get("replicas", 20)),
        slots=_int("simulation", "slots", sm.get("slots", 100_000)),
        seed=_int("simulation", "seed", sm.get("seed", 0)),
        warmup=_prob("simulation", "warmup", sm.get("warmup", 0.1)),
    )
    return RunConfig(scenario=scenario, lam_p=lam_p, lam_e=lam_e, grid=grid, sim=sim)


def _physical_kwargs(cfg: PhysicalConfig) -> dict:
    return dict(
        bits=cfg.bits,
        slot_s=cfg.slot_s,
        bandwidth_hz=cfg.bandwidth_hz,
        tau_s=cfg.tau_s,
        energy_j=cfg.energy_j,
        p_primary_w=cfg.p_primary_w,
        noise_w=dict(cfg.noise_w),
        sigma=dict(cfg.sigma),
    )


def load(path: str) -> RunConfig:
    try:
        with open(path) as fh:
            d = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}") from None
    return from_mapping(d, name=path)


def from_preset(name: str) -> RunConfig:
    p = get_preset(name)
    return RunConfig(scenario=p, lam_e=p.lam_e)
