"""Grid search for the policy maximising secondary throughput under queue stability.

Every program has the form ``max mu_s  s.t.  lambda_r <= mu_r,  lambda_p <= mu_p``.
The relay-selection probability gamma is never gridded on the fast path: the
relay service rate is linear in gamma while lambda_r and mu_p do not depend on
it, and inside the stable region ``gamma * pi_r = lambda_r / mu_r(gamma=1)``, so
mu_s is flat in gamma there.  The smallest stabilising gamma is therefore
optimal and is computed in closed form.  ``exhaustive=True`` grids gamma too,
which is how the shortcut is checked.

S1 additionally eliminates alpha in closed form (smallest alpha meeting the
primary constraint), leaving a 2-D grid over (beta, f).

Ties in the objective go to the lexicographically smallest
(beta, f, alpha, omega, gamma).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelTable
from .rates import (
    FEAS_TOL,
    PolicyParams,
    RateVector,
    rates_conventional,
    rates_s1,
    rates_s2,
    rates_s3,
    s1_arrays,
    s2_arrays,
    s3_arrays,
)

DEFAULT_GRID = 41
# objective values are compared after rounding so float noise cannot break ties
_TIE_DECIMALS = 12


@dataclass(frozen=True)
class OptimizationResult:
    system: str
    best_policy: PolicyParams
    best_rates: RateVector
    feasible: bool
    objective: float
    grid: int
    violation: float
    exhaustive: bool = False
    # largest |change of mu_s| from moving the optimum one grid step along a gridded axis
    step_slack: float = 0.0

    @property
    def mu_s_star(self) -> float:
        return self.objective


def _axis(n: int) -> np.ndarray:
    if n < 2:
        raise ValueError(f"grid resolution must be >= 2 points per axis, got {n}")
    return np.linspace(0.0, 1.0, n)


def _eliminate_gamma(lam_r, mu_r_full):
    """Smallest gamma with lambda_r <= gamma * mu_r(gamma=1); inf where none exists."""
    with np.errstate(divide="ignore", invalid="ignore"):
        g = np.where(lam_r <= 0.0, 0.0, np.where(mu_r_full > 0.0, lam_r / mu_r_full, np.inf))
    return g


class _Best:
    """Running arg-max over chunks, earliest chunk wins ties (chunks arrive in lexicographic order)."""

    def __init__(self):
        self.value = -np.inf
        self.point = None
        self.viol = np.inf
        self.viol_point = None

    def update(self, objective, feasible, violation, points: dict):
        obj = np.where(feasible, np.round(objective, _TIE_DECIMALS), -np.inf).ravel()
        k = int(np.argmax(obj))
        if obj[k] > self.value:
            self.value = obj[k]
            self.point = {name: float(np.ravel(v)[k]) for name, v in points.items()}
        viol = np.ravel(violation)
        j = int(np.argmin(viol))
        if viol[j] < self.viol:
            self.viol = float(viol[j])
            self.viol_point = {name: float(np.ravel(v)[j]) for name, v in points.items()}


def step_slack(rate_fn, pol: PolicyParams, axes, grid: int) -> float:
    """Max |mu_s(neighbour) - mu_s(pol)| over one-step moves along ``axes``.

    This is the objective resolution of a grid with ``grid`` points per axis
    around ``pol`` and is the tolerance used when comparing optima of
    different programs.
    """
    h = 1.0 / (grid - 1)
    base = rate_fn(pol).mu_s
    worst = 0.0
    for name in axes:
        v = getattr(pol, name)
        for w in (v - h, v + h):
            if 0.0 <= w <= 1.0:
                worst = max(worst, abs(rate_fn(pol.replace(**{name: w})).mu_s - base))
    return worst


def _finish(system, best: _Best, n, exhaustive, rate_fn, defaults, axes=()) -> OptimizationResult:
    feasible = best.point is not None
    point = best.point if feasible else best.viol_point
    pol = PolicyParams(**{**defaults, **{k: min(1.0, max(0.0, v)) for k, v in point.items()}})
    rv = rate_fn(pol)
    if exhaustive:
        axes = tuple(axes) + ("gamma",)
    return OptimizationResult(
        system=system,
        best_policy=pol,
        best_rates=rv,
        feasible=feasible,
        objective=float(rv.mu_s) if feasible else 0.0,
        grid=n,
        violation=min(best.viol, 0.0) if feasible else best.viol,
        exhaustive=exhaustive,
        step_slack=step_slack(rate_fn, pol, axes, n) if feasible else 0.0,
    )


def optimize_s1(
    table: ChannelTable, lam_e: float, lam_p: float, grid: int = DEFAULT_GRID, exhaustive: bool = False
) -> OptimizationResult:
    """Best S1 policy: grid over (beta, f), closed-form alpha and gamma."""
    ax = _axis(grid)
    best = _Best()
    if exhaustive:
        B, F, A, G = np.meshgrid(ax, ax, ax, ax, indexing="ij")
        r = s1_arrays(table, lam_e, lam_p, F, A, B, G)
        feas = (lam_p <= r["mu_p"] + FEAS_TOL) & (r["lambda_r"] <= r["mu_r"] + FEAS_TOL)
        viol = np.maximum(lam_p - r["mu_p"], r["lambda_r"] - r["mu_r"])
        best.update(r["mu_s"], feas, viol, dict(beta=B, f=F, alpha=A, gamma=G))
    else:
        B, F = np.meshgrid(ax, ax, indexing="ij")
        base = s1_arrays(table, lam_e, lam_p, F, 0.0, B, 1.0)
        nu0 = base["nu0"]
        relay_wo_alpha = base["lambda_r"]  # alpha = 0
        need = lam_p - (base["mu_p"] - relay_wo_alpha)
        k = (1.0 - table.p_pd) * table.p_ps * B
        with np.errstate(divide="ignore", invalid="ignore"):
            alpha = np.where(
                need <= relay_wo_alpha + FEAS_TOL,
                0.0,
                np.where((k > 0) & (nu0 > 0), (need / k - F * (1.0 - nu0)) / nu0, np.inf),
            )
        alpha_c = np.clip(alpha, 0.0, 1.0)
        full = s1_arrays(table, lam_e, lam_p, F, alpha_c, B, 1.0)
        gamma = _eliminate_gamma(full["lambda_r"], full["mu_r"])
        gamma_c = np.clip(gamma, 0.0, 1.0)
        r = s1_arrays(table, lam_e, lam_p, F, alpha_c, B, gamma_c)
        feas = (alpha <= 1.0 + FEAS_TOL) & (gamma <= 1.0 + FEAS_TOL) & (lam_p <= r["mu_p"] + FEAS_TOL)
        viol = np.maximum(lam_p - full["mu_p"], full["lambda_r"] - full["mu_r"])
        best.update(r["mu_s"], feas, viol, dict(beta=B, f=F, alpha=alpha_c, gamma=gamma_c))
    return _finish(
        "S1", best, grid, exhaustive, lambda pol: rates_s1(table, lam_e, lam_p, pol), dict(omega=1.0),
        ("beta", "f", "alpha") if exhaustive else ("beta", "f"),
    )


def _search_gamma_eliminated(evaluate, lam_p, points: dict, best: _Best):
    full = evaluate(1.0)
    gamma = _eliminate_gamma(full["lambda_r"], full["mu_r"])
    gamma_c = np.clip(gamma, 0.0, 1.0)
    r = evaluate(gamma_c)
    feas = (gamma <= 1.0 + FEAS_TOL) & (lam_p <= r["mu_p"] + FEAS_TOL)
    viol = np.maximum(lam_p - full["mu_p"], full["lambda_r"] - full["mu_r"])
    best.update(r["mu_s"], feas, viol, {**points, "gamma": gamma_c})


def _search_raw(r, lam_p, points: dict, best: _Best):
    feas = (lam_p <= r["mu_p"] + FEAS_TOL) & (r["lambda_r"] <= r["mu_r"] + FEAS_TOL)
    viol = np.maximum(lam_p - r["mu_p"], r["lambda_r"] - r["mu_r"])
    best.update(r["mu_s"], feas, viol, points)


def optimize_s2(
    table: ChannelTable, lam_e: float, lam_p: float, grid: int = DEFAULT_GRID, exhaustive: bool = False
) -> OptimizationResult:
    """Best S2 policy over (beta, f, alpha, omega) with gamma eliminated."""
    ax = _axis(grid)
    best = _Best()
    # one beta slice at a time keeps memory at grid**3 (or grid**4 when exhaustive)
    for b in ax:
        if exhaustive:
            F, A, W, G = np.meshgrid(ax, ax, ax, ax, indexing="ij")
            r = s2_arrays(table, lam_e, lam_p, F, W, A, b, G)
            pts = dict(beta=np.full(F.shape, b), f=F, alpha=A, omega=W, gamma=G)
            _search_raw(r, lam_p, pts, best)
        else:
            F, A, W = np.meshgrid(ax, ax, ax, indexing="ij")
            pts = dict(beta=np.full(F.shape, b), f=F, alpha=A, omega=W)
            _search_gamma_eliminated(
                lambda g: s2_arrays(table, lam_e, lam_p, F, W, A, b, g), lam_p, pts, best
            )
    return _finish("S2", best, grid, exhaustive, lambda pol: rates_s2(table, lam_e, lam_p, pol), {},
        ("beta", "f", "alpha", "omega"),
    )


def optimize_s3(
    table: ChannelTable, lam_p: float, grid: int = DEFAULT_GRID, exhaustive: bool = False
) -> OptimizationResult:
    """Best S3 policy over (beta, f, omega) with gamma eliminated.

    alpha plays no role in S3; the returned policy carries ``alpha=1`` so it
    can be run as-is on a system where the energy queue does empty.
    """
    ax = _axis(grid)
    best = _Best()
    if exhaustive:
        B, F, W, G = np.meshgrid(ax, ax, ax, ax, indexing="ij")
        r = s3_arrays(table, lam_p, F, W, B, G)
        _search_raw(r, lam_p, dict(beta=B, f=F, omega=W, gamma=G), best)
    else:
        B, F, W = np.meshgrid(ax, ax, ax, indexing="ij")
        _search_gamma_eliminated(
            lambda g: s3_arrays(table, lam_p, F, W, B, g), lam_p, dict(beta=B, f=F, omega=W), best
        )
    return _finish("S3", best, grid, exhaustive, lambda pol: rates_s3(table, lam_p, pol), dict(alpha=1.0),
        ("beta", "f", "omega"),
    )


def optimize_conventional(
    table: ChannelTable,
    lam_p: float,
    lam_e: float = 1.0,
    bound: str = "outer",
    grid: int = DEFAULT_GRID,
    exhaustive: bool = False,
    omega: float = 1.0,
) -> OptimizationResult:
    """Conventional scheme: beta = alpha = f = 1 and omega pinned; only gamma is free."""
    ax = _axis(grid)
    best = _Best()

    def evaluate(g):
        if bound == "outer":
            return s3_arrays(table, lam_p, 1.0, omega, 1.0, g)
        return s2_arrays(table, lam_e, lam_p, 1.0, omega, 1.0, 1.0, g)

    if bound not in ("outer", "inner"):
        raise ValueError(f"bound must be 'outer' or 'inner', got {bound!r}")
    if exhaustive:
        _search_raw(evaluate(ax), lam_p, dict(gamma=ax), best)
    else:
        _search_gamma_eliminated(evaluate, lam_p, {}, best)
    result = _finish(
        "Sc",
        best,
        grid,
        exhaustive,
        lambda pol: rates_conventional(table, lam_e, lam_p, pol.gamma, bound=bound, omega=omega),
        dict(f=1.0, omega=omega, alpha=1.0, beta=1.0),
    )
    return result


def optimize(system: str, table: ChannelTable, lam_e: float, lam_p: float, grid: int = DEFAULT_GRID, **kw):
    """Dispatch by system name: ``S1``, ``S2``, ``S3`` or ``Sc`` (outer bound unless ``bound`` given)."""
    if system == "S1":
        return optimize_s1(table, lam_e, lam_p, grid, **kw)
    if system == "S2":
        return optimize_s2(table, lam_e, lam_p, grid, **kw)
    if system == "S3":
        return optimize_s3(table, lam_p, grid, **kw)
    if system == "Sc":
        return optimize_conventional(table, lam_p, lam_e, grid=grid, **kw)
    raise ValueError(f"unknown system {system!r}")
