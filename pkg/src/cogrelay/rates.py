"""Closed-form mean rates of the three decoupled systems and the conventional baseline.

* S1: the PU always transmits (dummy packets when its queue is empty).
* S2: one energy token is drained every slot, so the energy queue is empty
  with probability ``1 - lambda_e``.
* S3: the energy queue is never empty.

Every ``*_arrays`` function broadcasts over numpy arrays so the optimizer can
evaluate a whole policy grid at once; the public ``rates_*`` wrappers return a
:class:`RateVector` for a single policy.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass

import numpy as np

from .channel import ChannelTable
from .queues import BernoulliQueueSpec, energy_empty_prob

logger = logging.getLogger(__name__)

# slack on the stability comparisons, absorbs round-off only
FEAS_TOL = 1e-12


@dataclass(frozen=True)
class PolicyParams:
    """SU decision probabilities.

    f: listen at t=0 instead of accessing (energy available).
    omega: keep receiving at t=tau when the PU turns out to be busy.
    alpha: receive when the energy queue is empty.
    beta: admit a decoded, undelivered primary packet to the relay queue.
    gamma: serve the relay queue (when nonempty) instead of the own queue.
    """

    f: float = 0.0
    omega: float = 0.0
    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        for name in ("f", "omega", "alpha", "beta", "gamma"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"policy parameter {name} must lie in [0, 1], got {v!r}")

    def replace(self, **changes) -> "PolicyParams":
        from dataclasses import replace

        return replace(self, **changes)


@dataclass(frozen=True)
class RateVector:
    """Mean rates (packets/slot) and occupancy probabilities of one evaluated system."""

    mu_p: float
    mu_s: float
    mu_r: float
    mu_e: float
    lambda_r: float
    pi_p: float
    pi_r: float
    nu0: float
    stable_p: bool
    stable_r: bool
    system: str = ""

    @property
    def stable(self) -> bool:
        return self.stable_p and self.stable_r

    def as_dict(self) -> dict:
        return asdict(self)


def occupancy_array(lam, mu):
    """Vectorised ``min(1, lam/mu)`` with 0/0 -> 0 and x/0 -> 1."""
    lam = np.asarray(lam, dtype=float)
    mu = np.asarray(mu, dtype=float)
    with np.errstate(over="ignore"):  # subnormal mu: the ratio saturates at 1 anyway
        ratio = np.divide(lam, mu, out=np.ones(np.broadcast(lam, mu).shape), where=mu > 0)
    return np.where(lam <= 0.0, 0.0, np.minimum(1.0, ratio))


def _split_access(t: ChannelTable, f, omega, pi_p, link: str):
    """Per-slot success weight of an SU transmission, averaged over PU activity.

    Access at t=0 (prob 1-f) and at t=tau after listening (prob f: always when
    the PU is idle, with prob 1-omega when it is busy).
    """
    if link == "sd_s":
        d00, d10, dh = t.d_sds_00, t.d_sds_10, t.dh_sds
    else:
        d00, d10, dh = t.d_sdp_00, t.d_sdp_10, t.dh_sdp
    return (1.0 - f) * (pi_p * d00 + (1.0 - pi_p)) + f * dh * (
        (1.0 - omega) * pi_p * d10 + (1.0 - pi_p)
    )


def s1_arrays(t: ChannelTable, lam_e, lam_p, f, alpha, beta, gamma):
    """S1 rates; omega is pinned to 1 since listening at t=0 always finds the PU busy."""
    f = np.asarray(f, dtype=float)
    mu_e = 1.0 - f
    lam_e = np.asarray(lam_e, dtype=float)
    # energy_empty_prob, vectorised: 1 when no arrivals, 0 when saturated
    ratio = np.divide(lam_e, mu_e, out=np.full(np.broadcast(lam_e, mu_e).shape, np.inf), where=mu_e > 0)
    nu0 = np.where(lam_e <= 0.0, 1.0, np.where(ratio >= 1.0, 0.0, 1.0 - ratio))
    nub = 1.0 - nu0
    coop = (1.0 - t.p_pd) * t.p_ps
    mu_r = t.p_sdp * gamma * (1.0 - f) * nub * t.d_sdp_00
    lam_r = coop * (alpha * nu0 + f * nub) * beta
    pi_r = occupancy_array(lam_r, mu_r)
    mu_s = t.p_sds * (1.0 - f) * nub * t.d_sds_00 * ((1.0 - gamma) * pi_r + (1.0 - pi_r))
    mu_p = t.p_pd * ((1.0 - nub * (1.0 - f)) + t.d_pd_00 * (1.0 - f) * nub) + coop * (
        alpha * nu0 + f * nub
    ) * beta
    pi_p = np.ones_like(mu_p)
    return dict(mu_p=mu_p, mu_s=mu_s, mu_r=mu_r, mu_e=mu_e, lambda_r=lam_r, pi_p=pi_p, pi_r=pi_r, nu0=nu0)


def s2_arrays(t: ChannelTable, lam_e, lam_p, f, omega, alpha, beta, gamma):
    """S2 rates, evaluated in the order mu_p -> pi_p -> (mu_r, lambda_r) -> pi_r -> mu_s."""
    lam_e = np.asarray(lam_e, dtype=float)
    le_bar = 1.0 - lam_e
    coop = (1.0 - t.p_pd) * t.p_ps
    listen = alpha * le_bar + f * lam_e * omega
    mu_p = t.p_pd * (
        (le_bar + f * lam_e * omega) + lam_e * (t.d_pd_00 * (1.0 - f) + t.d_pd_01 * f * (1.0 - omega))
    ) + coop * listen * beta
    pi_p = occupancy_array(lam_p, mu_p)
    mu_r = lam_e * t.p_sdp * gamma * _split_access(t, f, omega, pi_p, "sd_p")
    lam_r = coop * listen * beta * pi_p
    pi_r = occupancy_array(lam_r, mu_r)
    mu_s = t.p_sds * lam_e * _split_access(t, f, omega, pi_p, "sd_s") * (
        (1.0 - gamma) * pi_r + (1.0 - pi_r)
    )
    nu0 = le_bar * np.ones_like(mu_p)
    mu_e = np.ones_like(mu_p)
    return dict(mu_p=mu_p, mu_s=mu_s, mu_r=mu_r, mu_e=mu_e, lambda_r=lam_r, pi_p=pi_p, pi_r=pi_r, nu0=nu0)


def s3_arrays(t: ChannelTable, lam_p, f, omega, beta, gamma):
    """S3 rates; equal to S2 at lambda_e = 1 except for the energy bookkeeping."""
    out = s2_arrays(t, 1.0, lam_p, f, omega, 0.0, beta, gamma)
    # tokens are spent only on transmissions: every slot except "busy PU, keep listening"
    out["mu_e"] = 1.0 - out["pi_p"] * f * omega
    out["nu0"] = np.zeros_like(out["mu_p"])
    return out


def _to_vector(arrs: dict, lam_p: float, system: str) -> RateVector:
    vals = {k: float(v) for k, v in arrs.items()}
    return RateVector(
        **vals,
        stable_p=bool(lam_p <= vals["mu_p"] + FEAS_TOL),
        stable_r=bool(vals["lambda_r"] <= vals["mu_r"] + FEAS_TOL),
        system=system,
    )


def rates_s1(table: ChannelTable, lam_e: float, lam_p: float, pol: PolicyParams) -> RateVector:
    if pol.omega != 1.0:
        logger.debug("S1 pins omega to 1; supplied omega=%s ignored", pol.omega)
    arrs = s1_arrays(table, lam_e, lam_p, pol.f, pol.alpha, pol.beta, pol.gamma)
    arrs["nu0"] = energy_empty_prob(BernoulliQueueSpec(lam_e, 1.0 - pol.f))
    return _to_vector(arrs, lam_p, "S1")


def rates_s2(table: ChannelTable, lam_e: float, lam_p: float, pol: PolicyParams) -> RateVector:
    arrs = s2_arrays(table, lam_e, lam_p, pol.f, pol.omega, pol.alpha, pol.beta, pol.gamma)
    return _to_vector(arrs, lam_p, "S2")


def rates_s3(table: ChannelTable, lam_p: float, pol: PolicyParams) -> RateVector:
    if pol.alpha not in (0.0, 1.0):
        logger.debug("S3 never runs out of energy; alpha=%s ignored", pol.alpha)
    arrs = s3_arrays(table, lam_p, pol.f, pol.omega, pol.beta, pol.gamma)
    return _to_vector(arrs, lam_p, "S3")


def conventional_policy(gamma: float, omega: float = 1.0) -> PolicyParams:
    """Conventional cooperation: always sense, relay every decodable failure."""
    return PolicyParams(f=1.0, omega=omega, alpha=1.0, beta=1.0, gamma=gamma)


def rates_conventional(
    table: ChannelTable,
    lam_e: float,
    lam_p: float,
    gamma: float,
    bound: str = "outer",
    omega: float = 1.0,
) -> RateVector:
    """Conventional scheme; ``bound='outer'`` evaluates it with a never-empty energy queue (S3),
    ``'inner'`` with the per-slot drain of S2 at ``lam_e``."""
    pol = conventional_policy(gamma, omega)
    if bound == "outer":
        rv = rates_s3(table, lam_p, pol)
    elif bound == "inner":
        rv = rates_s2(table, lam_e, lam_p, pol)
    else:
        raise ValueError(f"bound must be 'outer' or 'inner', got {bound!r}")
    return RateVector(**{**rv.as_dict(), "system": "Sc"})
