import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from cogrelay.channel import ChannelTable
from cogrelay.presets import get_preset
from cogrelay.rates import (
    PolicyParams,
    conventional_policy,
    rates_conventional,
    rates_s1,
    rates_s2,
    rates_s3,
)

from scenarios import TABLE_FIELDS

prob = st.floats(0.0, 1.0)
tables = st.builds(ChannelTable, **{k: prob for k in TABLE_FIELDS})
policies = st.builds(PolicyParams, f=prob, omega=prob, alpha=prob, beta=prob, gamma=prob)
FIELDS = ("mu_p", "mu_s", "mu_r", "mu_e", "lambda_r", "pi_p", "pi_r", "nu0")


def test_s1_hand_expansion():
    t = get_preset("fig2").table()
    pol = PolicyParams(f=0.2, omega=1.0, alpha=0.5, beta=0.05, gamma=0.4)
    r = rates_s1(t, 0.4, 0.01, pol)
    # mu_e = 0.8, nu0 = 1 - 0.4/0.8, busy-energy prob 0.5
    assert r.mu_e == pytest.approx(0.8)
    assert r.nu0 == pytest.approx(0.5)
    assert r.mu_r == pytest.approx(0.8 * 0.4 * 0.8 * 0.5 * 0.3)
    assert r.lambda_r == pytest.approx(1.0 * 0.8 * (0.5 * 0.5 + 0.2 * 0.5) * 0.05)
    pi_r = 0.014 / 0.0384
    assert r.pi_r == pytest.approx(pi_r)
    assert r.mu_s == pytest.approx(0.7 * 0.8 * 0.5 * 0.3 * (1 - 0.4 * pi_r))
    assert r.mu_p == pytest.approx(0.014)
    assert r.pi_p == 1.0


def test_s2_hand_expansion():
    t = get_preset("fig5").table(mpr=0.5)
    pol = PolicyParams(f=0.5, omega=0.5, alpha=0.5, beta=0.5, gamma=0.5)
    r = rates_s2(t, 0.8, 0.1, pol)
    mu_p = 0.6 * ((0.2 + 0.2) + 0.8 * (0.5 * 0.5 + 0.5 * 0.5 * 0.5)) + 0.4 * 0.8 * (0.5 * 0.2 + 0.2) * 0.5
    assert r.mu_p == pytest.approx(mu_p) and mu_p == pytest.approx(0.468)
    pi_p = 0.1 / mu_p
    weight = 0.5 * (0.5 * pi_p + 1 - pi_p) + 0.5 * 0.5 * (0.5 * 0.5 * pi_p + 1 - pi_p)
    mu_r = 0.8 * 0.8 * 0.5 * weight
    lam_r = 0.048 * pi_p
    pi_r = lam_r / mu_r
    assert r.pi_p == pytest.approx(pi_p)
    assert r.mu_r == pytest.approx(mu_r)
    assert r.lambda_r == pytest.approx(lam_r)
    assert r.mu_s == pytest.approx(0.7 * 0.8 * weight * (1 - 0.5 * pi_r))
    assert r.nu0 == pytest.approx(0.2) and r.mu_e == 1.0


def test_s3_energy_consumption_rate():
    t = get_preset("fig2").table()
    pol = PolicyParams(f=0.5, omega=0.4, beta=1.0, gamma=0.5)
    r = rates_s3(t, 0.1, pol)
    assert r.mu_e == pytest.approx(1 - r.pi_p * 0.5 * 0.4)
    assert r.nu0 == 0.0


@settings(max_examples=200, deadline=None)
@given(t=tables, pol=policies, lam_p=prob, lam_e=prob)
def test_all_rates_are_probabilities(t, pol, lam_p, lam_e):
    for r in (rates_s1(t, lam_e, lam_p, pol), rates_s2(t, lam_e, lam_p, pol), rates_s3(t, lam_p, pol)):
        for k in FIELDS:
            v = getattr(r, k)
            assert -1e-12 <= v <= 1 + 1e-12, (r.system, k, v)


@settings(max_examples=200, deadline=None)
@given(t=tables, pol=policies, lam_p=prob)
def test_s2_at_full_harvest_is_s3(t, pol, lam_p):
    a, b = rates_s2(t, 1.0, lam_p, pol), rates_s3(t, lam_p, pol)
    for k in ("mu_p", "mu_s", "mu_r", "lambda_r", "pi_p", "pi_r"):
        assert getattr(a, k) == pytest.approx(getattr(b, k), abs=1e-15)


@settings(max_examples=200, deadline=None)
@given(t=tables, pol=policies, lam_p=prob, lam_e=prob, g1=prob, g2=prob)
def test_secondary_rate_flat_in_gamma_when_relay_stable(t, pol, lam_p, lam_e, g1, g2):
    for fn in (lambda p: rates_s1(t, lam_e, lam_p, p), lambda p: rates_s2(t, lam_e, lam_p, p),
               lambda p: rates_s3(t, lam_p, p)):
        full = fn(pol.replace(gamma=1.0))
        assume(full.mu_r > 0)
        need = full.lambda_r / full.mu_r
        a, b = max(g1, need), max(g2, need)
        assume(a <= 1 and b <= 1)
        assert fn(pol.replace(gamma=a)).mu_s == pytest.approx(fn(pol.replace(gamma=b)).mu_s, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(t=tables, lam_p=prob, gamma=prob)
def test_cooperation_gain(t, lam_p, gamma):
    pol = PolicyParams(f=1.0, omega=1.0, alpha=1.0, beta=1.0, gamma=gamma)
    expected = t.p_pd + (1 - t.p_pd) * t.p_ps
    assert rates_s2(t, 1.0, lam_p, pol).mu_p == pytest.approx(expected, abs=4e-16)
    assert rates_s3(t, lam_p, pol).mu_p == pytest.approx(expected, abs=4e-16)


@settings(max_examples=100, deadline=None)
@given(t=tables, pol=policies, lam_p=prob, lam_e=prob)
def test_s1_energy_queue(t, pol, lam_p, lam_e):
    r = rates_s1(t, lam_e, lam_p, pol)
    assert r.mu_e == pytest.approx(1 - pol.f)
    if pol.f < 1 and lam_e < 1 - pol.f:
        assert r.nu0 == pytest.approx(1 - lam_e / (1 - pol.f))
    elif lam_e > 0:
        assert r.nu0 == 0.0


@settings(max_examples=100, deadline=None)
@given(t=tables, pol=policies, lam_p=prob)
def test_no_harvest_no_secondary_throughput(t, pol, lam_p):
    assert rates_s2(t, 0.0, lam_p, pol).mu_s == 0.0


def test_s1_ignores_omega():
    t = get_preset("fig2").table()
    pol = PolicyParams(f=0.3, omega=0.2, alpha=0.4, beta=0.5, gamma=0.5)
    assert rates_s1(t, 0.5, 0.1, pol) == rates_s1(t, 0.5, 0.1, pol.replace(omega=1.0))


def test_conventional_is_pinned_policy():
    t = get_preset("fig3").table()
    assert conventional_policy(0.3) == PolicyParams(1.0, 1.0, 1.0, 1.0, 0.3)
    outer = rates_conventional(t, 0.9, 0.1, 0.3)
    ref = rates_s3(t, 0.1, conventional_policy(0.3))
    assert outer.system == "Sc" and outer.mu_s == ref.mu_s
    inner = rates_conventional(t, 0.9, 0.1, 0.3, bound="inner")
    assert inner.mu_s == rates_s2(t, 0.9, 0.1, conventional_policy(0.3)).mu_s
    with pytest.raises(ValueError):
        rates_conventional(t, 0.9, 0.1, 0.3, bound="middle")


def test_stability_flags():
    t = get_preset("fig2").table()
    r = rates_s3(t, 0.5, PolicyParams(f=1, omega=1, beta=1, gamma=1))
    assert r.stable_p and not r.stable_r and not r.stable
    r = rates_s3(t, 0.9, PolicyParams(f=1, omega=1, beta=1, gamma=1))
    assert not r.stable_p
    r = rates_s3(t, 0.0, PolicyParams())
    assert r.stable


@pytest.mark.parametrize("bad", [dict(f=-0.1), dict(beta=1.5), dict(gamma=float("nan"))])
def test_policy_validation(bad):
    with pytest.raises(ValueError):
        PolicyParams(**bad)
