import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cogrelay.queues import (
    BernoulliQueueSpec,
    energy_empty_prob,
    energy_state_probs,
    energy_tail_mass,
    is_stable,
    occupancy,
)

from oracles import energy_chain_stationary


def test_empty_prob_examples():
    assert energy_empty_prob(BernoulliQueueSpec(0.5, 0.8)) == pytest.approx(0.375, abs=1e-15)
    assert energy_empty_prob(BernoulliQueueSpec(1.0, 0.6)) == 0.0
    assert energy_empty_prob(BernoulliQueueSpec(0.9, 1.0)) == pytest.approx(0.1, abs=1e-15)
    assert energy_empty_prob(BernoulliQueueSpec(0.3, 0.0)) == 0.0
    assert energy_empty_prob(BernoulliQueueSpec(0.0, 0.0)) == 1.0


def test_empty_prob_matches_chain_solve():
    pi = energy_chain_stationary(0.5, 0.8)
    assert pi[0] == pytest.approx(0.375, abs=1e-12)


def test_full_service_has_at_most_one_token():
    p = energy_state_probs(BernoulliQueueSpec(0.3, 1.0), 3)
    np.testing.assert_allclose(p, [0.7, 0.3, 0.0, 0.0], atol=1e-15)


def test_state_probs_normalise_with_tail():
    spec = BernoulliQueueSpec(0.2, 0.5)
    p = energy_state_probs(spec, 50)
    assert p.sum() + energy_tail_mass(spec, 50) == pytest.approx(1.0, abs=1e-10)


def test_state_probs_match_chain_solve():
    p = energy_state_probs(BernoulliQueueSpec(0.2, 0.5), 199)
    q = energy_chain_stationary(0.2, 0.5, states=200)
    assert 0.5 * np.abs(p - q).sum() <= 1e-12


def test_unstable_state_probs_raise():
    with pytest.raises(ValueError, match="saturat"):
        energy_state_probs(BernoulliQueueSpec(0.6, 0.5), 10)


@settings(max_examples=80, deadline=None)
@given(mu=st.floats(0.05, 1.0), frac=st.floats(0.0, 0.97))
def test_empty_prob_is_first_state(mu, frac):
    spec = BernoulliQueueSpec(frac * mu, mu)
    assert energy_state_probs(spec, 5)[0] == pytest.approx(energy_empty_prob(spec), abs=1e-14)


@settings(max_examples=80, deadline=None)
@given(l1=st.floats(0, 1), l2=st.floats(0, 1), mu=st.floats(0.01, 1))
def test_empty_prob_monotone(l1, l2, mu):
    lo, hi = sorted((l1, l2))
    assert energy_empty_prob(BernoulliQueueSpec(hi, mu)) <= energy_empty_prob(BernoulliQueueSpec(lo, mu))
    assert energy_empty_prob(BernoulliQueueSpec(lo, min(1.0, mu * 1.1))) >= energy_empty_prob(BernoulliQueueSpec(lo, mu))


def test_occupancy():
    assert occupancy(0.0, 0.5) == 0.0
    assert occupancy(0.4, 0.4) == 1.0
    assert occupancy(0.2, 0.8) == pytest.approx(0.25)
    assert occupancy(0.1, 0.0) == 1.0
    assert occupancy(0.9, 0.5) == 1.0


def test_stability_boundary_is_stable():
    assert is_stable(0.4, 0.4)
    assert not is_stable(0.41, 0.4)


def test_spec_validation():
    with pytest.raises(ValueError):
        BernoulliQueueSpec(1.2, 0.5)
    with pytest.raises(ValueError):
        BernoulliQueueSpec(0.2, -0.1)


def test_occupancy_by_simulated_chain():
    # discrete-time queue with Bernoulli(0.2) arrivals and Bernoulli(0.8) service
    rng = np.random.default_rng(7)
    n = 400_000
    a = rng.random(n) < 0.2
    s = rng.random(n) < 0.8
    q, busy = 0, 0
    for k in range(n):
        q += a[k]
        if q > 0:
            busy += 1
            q -= s[k]
    assert busy / n == pytest.approx(occupancy(0.2, 0.8), abs=0.005)
