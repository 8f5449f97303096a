"""Named parameter sets: the reference channel scenarios and an illustrative link budget."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .channel import ChannelTable, ConfigError, PhysicalConfig, build_table

# fig2 / fig3 share every channel value; P_pd_p,0 = 0 makes delta_pd_p irrelevant
_FIG23 = {
    "pbar.sd_p.0": 0.8,
    "delta.sd_p.00": 0.3,
    "pbar.sd_s.0": 0.7,
    "pbar.ps.0": 0.8,
    "delta.sd_s.00": 0.3,
    "pbar.pd_p.0": 0.0,
    "delta.pd_p.00": 0.0,
    "delta.pd_p.01": 0.0,
    "dhat.sd_p": 0.7,
    "dhat.sd_s": 0.7,
    "delta.sd_p.10": 0.2,
    "delta.sd_s.10": 0.2,
}

_FIG5_BASE = {
    "pbar.sd_p.0": 0.8,
    "pbar.sd_s.0": 0.7,
    "pbar.ps.0": 0.8,
    "pbar.pd_p.0": 0.6,
    "dhat.sd_p": 0.5,
    "dhat.sd_s": 0.5,
}
_FIG5_MPR_KEYS = (
    "delta.pd_p.00",
    "delta.pd_p.01",
    "delta.sd_s.00",
    "delta.sd_p.00",
    "delta.sd_s.10",
    "delta.sd_p.10",
)

# illustrative physical set for packet-size (B) sweeps
PHYSICAL_DEFAULT = dict(
    bits=1000.0,
    slot_s=1e-3,
    bandwidth_hz=1e6,
    tau_s=1e-4,
    energy_j=1e-3 * 0.2,
    p_primary_w=0.2,
    noise_w={"d_p": 0.01, "s": 0.01, "d_s": 0.01},
    sigma={"pd_p": 0.1, "ps": 1.0, "sd_s": 1.0, "sd_p": 1.0, "pd_s": 0.1},
)


@dataclass(frozen=True)
class Preset:
    name: str
    description: str
    lam_e: float
    direct: Optional[dict] = None
    physical: Optional[dict] = None
    free: tuple = ()
    mpr: Optional[float] = None
    lam_e_family: tuple = ()
    extra: dict = field(default_factory=dict)

    def table(self, mpr: Optional[float] = None, bits: Optional[float] = None) -> ChannelTable:
        """Channel table, with the MPR strength or packet size substituted when the preset is swept on it."""
        if self.physical is not None:
            phys = dict(self.physical)
            if mpr is not None:
                raise ConfigError(f"preset {self.name} is physical; X cannot be swept")
            if bits is not None:
                phys["bits"] = bits
            return build_table(PhysicalConfig(**phys))
        probs = dict(self.direct)
        x = self.mpr if mpr is None else mpr
        if x is not None:
            if "X" not in self.free:
                raise ConfigError(f"preset {self.name} has no MPR-strength axis")
            if not 0.0 <= x <= 1.0:
                raise ConfigError(f"MPR strength X must lie in [0, 1], got {x!r}")
            probs.update({k: x for k in _FIG5_MPR_KEYS})
        if bits is not None:
            raise ConfigError(f"preset {self.name} is stated in probabilities; B cannot be swept")
        return build_table(probs)


PRESETS = {
    "fig2": Preset(
        name="fig2",
        description="S1/S2/S3 versus lambda_p, lambda_e = 0.9",
        lam_e=0.9,
        direct=_FIG23,
        free=("lambda_p",),
    ),
    "fig3": Preset(
        name="fig3",
        description="S2/S3 and conventional cooperation versus lambda_p for several lambda_e",
        lam_e=1.0,
        direct=_FIG23,
        free=("lambda_p", "lambda_e"),
        lam_e_family=(0.4, 0.7, 0.9, 1.0),
    ),
    "fig5": Preset(
        name="fig5",
        description="secondary throughput versus lambda_p for several MPR strengths X",
        lam_e=0.8,
        direct=_FIG5_BASE,
        free=("X", "lambda_p"),
        mpr=0.5,
        extra={"X_family": (0.1, 0.5, 1.0)},
    ),
    "physical": Preset(
        name="physical",
        description="Rayleigh-fading link budget; sweep the packet size B",
        lam_e=0.8,
        physical=PHYSICAL_DEFAULT,
        free=("B", "lambda_p"),
    ),
}


def presets() -> dict[str, Preset]:
    return dict(PRESETS)


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}") from None


def describe(name: str) -> str:
    """Human-readable listing of one preset."""
    p = get_preset(name)
    lines = [f"{p.name}: {p.description}", f"  lambda_e = {p.lam_e}"]
    if p.direct is not None:
        for k, v in sorted(p.direct.items()):
            lines.append(f"  {k} = {v}")
        if "X" in p.free:
            lines.append(f"  {', '.join(_FIG5_MPR_KEYS)} = X (default {p.mpr})")
    else:
        for k, v in p.physical.items():
            lines.append(f"  {k} = {v}")
    lines.append(f"  free sweep variables: {', '.join(p.free)}")
    if p.lam_e_family:
        lines.append(f"  lambda_e family: {', '.join(map(str, p.lam_e_family))}")
    for k, v in p.extra.items():
        lines.append(f"  {k}: {', '.join(map(str, v))}")
    return "\n".join(lines)
