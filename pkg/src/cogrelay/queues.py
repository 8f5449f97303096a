"""Stationary quantities of decoupled discrete-time Bernoulli queues.

The energy queue chain (state = queue length when the slot's decision is
taken): from 0 it moves up with probability lambda; from k >= 1 it moves up
with lambda*(1-mu), down with mu*(1-lambda), and stays otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BernoulliQueueSpec:
    arrival_rate: float
    service_rate: float

    def __post_init__(self):
        for name in ("arrival_rate", "service_rate"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v!r}")


def is_stable(lam: float, mu: float) -> bool:
    """Queue stability: service rate at least the arrival rate (equality counts)."""
    return mu >= lam


def occupancy(lam: float, mu: float) -> float:
    """Probability that the queue is nonempty, ``min(1, lam/mu)``.

    A clamp at 1 means the queue is unstable (``is_stable`` is False).  With no
    arrivals and no service the queue stays empty.
    """
    if lam <= 0.0:
        return 0.0
    if mu <= 0.0:
        return 1.0
    return min(1.0, lam / mu)


def energy_empty_prob(spec: BernoulliQueueSpec) -> float:
    """Stationary probability that the energy queue is empty; 0 once it saturates."""
    lam, mu = spec.arrival_rate, spec.service_rate
    if lam <= 0.0:
        return 1.0
    if lam >= mu:
        return 0.0
    return 1.0 - lam / mu


def _eta(lam: float, mu: float) -> float:
    return lam * (1.0 - mu) / ((1.0 - lam) * mu)


def energy_state_probs(spec: BernoulliQueueSpec, max_state: int) -> np.ndarray:
    """Stationary probabilities of states ``0..max_state`` (the geometric tail is cut)."""
    lam, mu = spec.arrival_rate, spec.service_rate
    if max_state < 0:
        raise ValueError("max_state must be >= 0")
    probs = np.zeros(max_state + 1)
    if lam <= 0.0:
        probs[0] = 1.0
        return probs
    if lam >= mu:
        raise ValueError(
            f"energy queue with lambda={lam} >= mu={mu} saturates; "
            "use energy_empty_prob (which returns 0) instead of a state distribution"
        )
    nu0 = 1.0 - lam / mu
    probs[0] = nu0
    if mu >= 1.0:
        if max_state >= 1:
            probs[1] = lam
        return probs
    k = np.arange(1, max_state + 1)
    probs[1:] = nu0 * _eta(lam, mu) ** k / (1.0 - mu)
    return probs


def energy_tail_mass(spec: BernoulliQueueSpec, max_state: int) -> float:
    """Probability mass above ``max_state`` in the stable regime."""
    lam, mu = spec.arrival_rate, spec.service_rate
    if lam <= 0.0:
        return 0.0
    if lam >= mu:
        raise ValueError("saturated energy queue has no stationary distribution")
    if mu >= 1.0:
        return lam if max_state < 1 else 0.0
    eta = _eta(lam, mu)
    nu0 = 1.0 - lam / mu
    return nu0 / (1.0 - mu) * eta ** (max_state + 1) / (1.0 - eta)
