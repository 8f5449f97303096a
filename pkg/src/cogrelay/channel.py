"""Per-slot packet success probabilities for the four PU/SU links.

Links are named by transmitter and receiver: ``pd_p`` (PU to its destination),
``ps`` (PU to the SU), ``sd_s`` (SU to its destination) and ``sd_p`` (SU to
the primary destination, used for relayed packets).  A transmitter starting at
instant ``i = 1`` begins ``tau`` seconds into the slot; only the SU can do so.

Two ways to build a :class:`ChannelTable`:

* from a :class:`PhysicalConfig` (Rayleigh block fading, outage closed forms);
* from a flat mapping of probabilities (``pbar.sd_s.0``, ``delta.pd_p.01``,
  ``dhat.sd_p`` ...), which is how published parameter sets are stated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from typing import Mapping, Union

LINKS = ("pd_p", "ps", "sd_s", "sd_p")
SECONDARY_LINKS = ("sd_s", "sd_p")
# the PU -> d_s gain only enters as interference on sd_s
GAIN_LINKS = ("pd_p", "ps", "sd_s", "sd_p", "pd_s")
RECEIVERS = {"pd_p": "d_p", "ps": "s", "sd_s": "d_s", "sd_p": "d_p", "pd_s": "d_s"}

CONSISTENCY_TOL = 1e-12


class ConfigError(ValueError):
    """Invalid channel or run configuration; the message names the entry."""


@dataclass(frozen=True)
class PhysicalConfig:
    """Physical parameters of the two-user network.

    ``noise_w`` is keyed by receiver (``d_p``, ``s``, ``d_s``) and ``sigma`` by
    link (``pd_p``, ``ps``, ``sd_s``, ``sd_p``, ``pd_s``).
    """

    bits: float
    slot_s: float
    bandwidth_hz: float
    tau_s: float
    energy_j: float
    p_primary_w: float
    noise_w: Mapping[str, float]
    sigma: Mapping[str, float]

    def __post_init__(self):
        for name in ("bits", "slot_s", "bandwidth_hz", "energy_j", "p_primary_w"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"physical.{name} must be > 0, got {getattr(self, name)!r}")
        if not 0 <= self.tau_s < self.slot_s:
            raise ConfigError(f"physical.tau_s must satisfy 0 <= tau_s < slot_s, got {self.tau_s!r}")
        for rx in ("d_p", "s", "d_s"):
            if rx not in self.noise_w or not self.noise_w[rx] > 0:
                raise ConfigError(f"physical.noise_w.{rx} must be given and > 0")
        for link in GAIN_LINKS:
            if link not in self.sigma or not self.sigma[link] > 0:
                raise ConfigError(f"physical.sigma.{link} must be given and > 0")

    @property
    def tau_frac(self) -> float:
        return self.tau_s / self.slot_s

    def airtime(self, i: int) -> float:
        return self.slot_s - i * self.tau_s

    def spectral_efficiency(self, tx: str, i: int) -> float:
        """Bits/s/Hz needed to fit one packet in the available airtime."""
        _check_instant(tx, i)
        return self.bits / (self.bandwidth_hz * self.airtime(i))

    def snr(self, tx: str, rx: str, i: int) -> float:
        """Transmit SNR gamma at receiver ``rx``; the SU spends ``e`` over its airtime."""
        _check_instant(tx, i)
        power = self.p_primary_w if tx == "p" else self.energy_j / self.airtime(i)
        return power / self.noise_w[rx]


def _check_instant(tx: str, i: int) -> None:
    if i not in (0, 1):
        raise ConfigError(f"start instant must be 0 or 1, got {i!r}")
    if tx == "p" and i != 0:
        raise ConfigError("the primary transmitter always starts at t=0 (i=0)")


def _split(link: str) -> tuple[str, str]:
    if link not in RECEIVERS:
        raise ConfigError(f"unknown link {link!r}; expected one of {GAIN_LINKS}")
    return link[0], RECEIVERS[link]


def solo_success(cfg: PhysicalConfig, link: str, i: int = 0) -> float:
    """Probability that a packet on ``link`` started at instant ``i`` decodes without interference."""
    tx, rx = _split(link)
    gs = cfg.snr(tx, rx, i) * cfg.sigma[link]
    if not gs > 0:
        raise ConfigError(f"non-positive gamma*sigma on {link}")
    threshold = math.expm1(cfg.spectral_efficiency(tx, i) * math.log(2.0))
    return math.exp(-threshold / gs)


def _interferer_link(link: str) -> str:
    # the only interferer at d_p is the SU, at d_s the PU; p -> s is never interfered
    return {"pd_p": "sd_p", "sd_p": "pd_p", "sd_s": "pd_s"}[link]


def interference_reduction(cfg: PhysicalConfig, link: str, i: int, n: int) -> float:
    """Factor delta by which concurrent transmission from the other user scales success.

    ``i`` is the start instant of the wanted transmitter and ``n`` that of the
    interferer.  The PU interferes on secondary links with ``n = 0``; the SU
    interferes on ``pd_p`` with ``n`` in {0, 1}.
    """
    tx, rx = _split(link)
    if link in ("ps", "pd_s"):
        raise ConfigError(f"link {link} never carries a wanted packet under interference")
    itx = "s" if tx == "p" else "p"
    if itx == "p" and n != 0:
        raise ConfigError(f"interferer on {link} is the PU, which only starts at n=0")
    _check_instant(itx, n)
    ilink = _interferer_link(link)
    wanted = cfg.snr(tx, rx, i) * cfg.sigma[link]
    interf = cfg.snr(itx, rx, n) * cfg.sigma[ilink]
    threshold = math.expm1(cfg.spectral_efficiency(tx, i) * math.log(2.0))
    return 1.0 / (1.0 + threshold * interf / wanted)


def rho_from_a(a: float, tau_frac: float) -> float:
    return (1.0 + a) / (1.0 + a / (1.0 - tau_frac))


def rho_ratio(cfg: PhysicalConfig) -> float:
    """Ratio of primary success with SU access at tau to SU access at t=0.

    Roughly ``1 - tau/T`` once the SU interference dominates the PU signal.
    """
    threshold = math.expm1(cfg.spectral_efficiency("p", 0) * math.log(2.0))
    a = threshold * (cfg.snr("s", "d_p", 0) * cfg.sigma["sd_p"]) / (
        cfg.snr("p", "d_p", 0) * cfg.sigma["pd_p"]
    )
    return rho_from_a(a, cfg.tau_frac)


@dataclass(frozen=True)
class ChannelTable:
    """Immutable success-probability table read by the rate formulas and the simulator.

    Attribute names: ``p_<link>`` is the solo success at i=0, ``d_<link>_<i><n>``
    an interference reduction, ``dh_<link>`` the delayed-access ratio.
    """

    p_pd: float
    p_ps: float
    p_sds: float
    p_sdp: float
    d_pd_00: float
    d_pd_01: float
    d_sds_00: float
    d_sds_10: float
    d_sdp_00: float
    d_sdp_10: float
    dh_sds: float
    dh_sdp: float
    source: str = field(default="direct", compare=False)

    def __post_init__(self):
        for f in fields(self):
            if f.name == "source":
                continue
            v = getattr(self, f.name)
            if not (isinstance(v, (int, float)) and 0.0 <= v <= 1.0):
                raise ConfigError(f"{_ATTR_TO_KEY[f.name]} must lie in [0, 1], got {v!r}")

    def pbar(self, link: str, i: int = 0) -> float:
        if link not in LINKS:
            raise KeyError(link)
        base = {"pd_p": self.p_pd, "ps": self.p_ps, "sd_s": self.p_sds, "sd_p": self.p_sdp}[link]
        if i == 0:
            return base
        if link not in SECONDARY_LINKS:
            raise KeyError(f"{link} has no delayed-access entry")
        return base * self.dhat(link)

    def delta(self, link: str, i: int, n: int) -> float:
        return getattr(self, _KEY_TO_ATTR[f"delta.{link}.{i}{n}"])

    def dhat(self, link: str) -> float:
        return getattr(self, _KEY_TO_ATTR[f"dhat.{link}"])

    def as_dict(self) -> dict[str, float]:
        """Flat ``pbar.<link>.<i>`` / ``delta.<link>.<i><n>`` / ``dhat.<link>`` view."""
        out = {key: getattr(self, attr) for key, attr in _KEY_TO_ATTR.items()}
        for link in SECONDARY_LINKS:
            out[f"pbar.{link}.1"] = self.pbar(link, 1)
        return out

    def replace(self, **changes) -> "ChannelTable":
        from dataclasses import replace

        return replace(self, **changes)


_KEY_TO_ATTR = {
    "pbar.pd_p.0": "p_pd",
    "pbar.ps.0": "p_ps",
    "pbar.sd_s.0": "p_sds",
    "pbar.sd_p.0": "p_sdp",
    "delta.pd_p.00": "d_pd_00",
    "delta.pd_p.01": "d_pd_01",
    "delta.sd_s.00": "d_sds_00",
    "delta.sd_s.10": "d_sds_10",
    "delta.sd_p.00": "d_sdp_00",
    "delta.sd_p.10": "d_sdp_10",
    "dhat.sd_s": "dh_sds",
    "dhat.sd_p": "dh_sdp",
}
_ATTR_TO_KEY = {v: k for k, v in _KEY_TO_ATTR.items()}

DirectProbabilities = Mapping[str, float]


def flatten_keys(d: Mapping, prefix: str = "") -> dict[str, float]:
    """Turn nested ``{"pbar": {"sd_s": {0: 0.7}}}`` into ``{"pbar.sd_s.0": 0.7}``."""
    out: dict[str, float] = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, Mapping):
            out.update(flatten_keys(v, key + "."))
        else:
            out[key] = v
    return out


def _from_direct(probs: DirectProbabilities) -> ChannelTable:
    probs = flatten_keys(probs)
    known = set(_KEY_TO_ATTR) | {f"pbar.{link}.1" for link in SECONDARY_LINKS}
    unknown = sorted(set(probs) - known)
    if unknown:
        raise ConfigError(f"unknown channel entries: {', '.join(unknown)}")
    values: dict[str, float] = {}
    for key in probs:
        try:
            values[key] = float(probs[key])
        except (TypeError, ValueError):
            raise ConfigError(f"{key} must be a number, got {probs[key]!r}") from None
        if not 0.0 <= values[key] <= 1.0:
            raise ConfigError(f"{key} must lie in [0, 1], got {values[key]!r}")

    for link in SECONDARY_LINKS:
        p0 = values.get(f"pbar.{link}.0")
        p1 = values.get(f"pbar.{link}.1")
        dh = values.get(f"dhat.{link}")
        if p1 is not None and p0 is not None and p1 > p0 + CONSISTENCY_TOL:
            raise ConfigError(f"pbar.{link}.1 = {p1} exceeds pbar.{link}.0 = {p0}")
        if dh is None and p1 is not None and p0 is not None:
            values[f"dhat.{link}"] = p1 / p0 if p0 > 0 else 1.0
        elif dh is not None and p1 is not None and p0 is not None:
            if abs(dh * p0 - p1) > CONSISTENCY_TOL:
                raise ConfigError(f"dhat.{link} * pbar.{link}.0 != pbar.{link}.1")
        values.pop(f"pbar.{link}.1", None)

    missing = [k for k in _KEY_TO_ATTR if k not in values]
    if missing:
        raise ConfigError(f"missing channel entries: {', '.join(missing)}")
    return ChannelTable(**{_KEY_TO_ATTR[k]: v for k, v in values.items()}, source="direct")


def _from_physical(cfg: PhysicalConfig) -> ChannelTable:
    p = {link: solo_success(cfg, link, 0) for link in LINKS}
    p1 = {link: solo_success(cfg, link, 1) for link in SECONDARY_LINKS}
    dh = {}
    for link in SECONDARY_LINKS:
        dh[link] = p1[link] / p[link] if p[link] > 0 else 1.0
        if p1[link] > p[link] + CONSISTENCY_TOL:
            raise ConfigError(f"delayed access increased success on {link}")
    return ChannelTable(
        p_pd=p["pd_p"],
        p_ps=p["ps"],
        p_sds=p["sd_s"],
        p_sdp=p["sd_p"],
        d_pd_00=interference_reduction(cfg, "pd_p", 0, 0),
        d_pd_01=interference_reduction(cfg, "pd_p", 0, 1),
        d_sds_00=interference_reduction(cfg, "sd_s", 0, 0),
        d_sds_10=interference_reduction(cfg, "sd_s", 1, 0),
        d_sdp_00=interference_reduction(cfg, "sd_p", 0, 0),
        d_sdp_10=interference_reduction(cfg, "sd_p", 1, 0),
        dh_sds=dh["sd_s"],
        dh_sdp=dh["sd_p"],
        source="physical",
    )


def build_table(source: Union[PhysicalConfig, DirectProbabilities]) -> ChannelTable:
    """Build a validated :class:`ChannelTable` from physical parameters or direct probabilities."""
    if isinstance(source, PhysicalConfig):
        return _from_physical(source)
    if isinstance(source, Mapping):
        return _from_direct(source)
    raise ConfigError(f"cannot build a channel table from {type(source).__name__}")


def physical_from_mapping(d: Mapping) -> PhysicalConfig:
    """Parse the ``channel.physical`` config section."""
    required = ("bits", "slot_s", "bandwidth_hz", "tau_s", "energy_j", "p_primary_w", "noise_w", "sigma")
    missing = [k for k in required if k not in d]
    if missing:
        raise ConfigError(f"channel.physical is missing: {', '.join(missing)}")
    extra = sorted(set(d) - set(required))
    if extra:
        raise ConfigError(f"channel.physical has unknown keys: {', '.join(extra)}")
    noise = d["noise_w"]
    if not isinstance(noise, Mapping):
        noise = {rx: noise for rx in ("d_p", "s", "d_s")}
    try:
        return PhysicalConfig(
            bits=float(d["bits"]),
            slot_s=float(d["slot_s"]),
            bandwidth_hz=float(d["bandwidth_hz"]),
            tau_s=float(d["tau_s"]),
            energy_j=float(d["energy_j"]),
            p_primary_w=float(d["p_primary_w"]),
            noise_w={k: float(v) for k, v in noise.items()},
            sigma={k: float(v) for k, v in d["sigma"].items()},
        )
    except (TypeError, ValueError, AttributeError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"channel.physical: {exc}") from None
