"""Replicated simulation runs and their summary report."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import IO, Optional, Union

import numpy as np
from scipy import stats

from ..channel import ChannelTable
from ..rates import PolicyParams
from .backend import DEFAULT, get_kernel
from .protocol import ACT_ACC0, ACT_ACCT, ACTIONS, C, MODES, NC, NU, pack_params, slot_py

DEFAULT_THRESHOLD = 100_000
_CHECKPOINTS = 64


@dataclass
class SimReport:
    """Replica means and 95% t-interval half-widths of the empirical rates.

    ``mean``/``half_width`` keys: mu_s, mu_p, lambda_r, mu_r, mu_e, nu0, pi_p,
    pi_r, primary_throughput, relay_out, occupancy_p, occupancy_r, occupancy_e,
    mean_q_p, mean_q_r, mean_q_e, su_tx.
    """

    variant: str
    replicas: int
    slots: int
    warmup: int
    seed: int
    backend: str
    mean: dict
    half_width: dict
    counts: np.ndarray  # post-warm-up counters, one row per replica
    totals: np.ndarray  # counters over the whole run
    final_state: np.ndarray  # (q_p, q_r, q_e) per replica
    drift: dict = field(default_factory=dict)
    unstable: dict = field(default_factory=dict)

    def __getitem__(self, key: str) -> float:
        return self.mean[key]

    def ci(self, key: str) -> float:
        return self.half_width[key]

    @property
    def mu_s(self) -> float:
        return self.mean["mu_s"]

    @property
    def any_unstable(self) -> bool:
        return any(self.unstable.values())


def _ratio(num, den):
    return num / den if den > 0 else math.nan


def replica_estimates(c: np.ndarray) -> dict:
    """Rate estimates from one replica's post-warm-up counters."""
    slots = c[C["slots"]]
    served_p = c[C["p_direct"]] + c[C["p_admit"]] + c[C["dummy_direct"]] + c[C["dummy_admit"]]
    return {
        "mu_s": _ratio(c[C["own_out"]], slots),
        "mu_p": _ratio(served_p, c[C["pu_tx"]]),
        "lambda_r": _ratio(c[C["p_admit"]] + c[C["dummy_admit"]], slots),
        "mu_r": _ratio(c[C["relay_offered"]], slots),
        "mu_e": _ratio(c[C["e_out"]], c[C["qe_nonempty"]]),
        "nu0": 1.0 - _ratio(c[C["qe_nonempty"]], slots),
        "pi_p": _ratio(c[C["pu_tx"]], slots),
        "pi_r": _ratio(c[C["qr_nonempty"]], slots),
        "primary_throughput": _ratio(c[C["p_direct"]] + c[C["relay_out"]], slots),
        "relay_out": _ratio(c[C["relay_out"]], slots),
        "occupancy_p": _ratio(c[C["qp_nonempty"]], slots),
        "occupancy_r": _ratio(c[C["qr_nonempty"]], slots),
        "occupancy_e": _ratio(c[C["qe_nonempty"]], slots),
        "mean_q_p": _ratio(c[C["qp_sum"]], slots),
        "mean_q_r": _ratio(c[C["qr_sum"]], slots),
        "mean_q_e": _ratio(c[C["qe_sum"]], slots),
        "su_tx": _ratio(c[C["su_tx"]], slots),
    }


def _summarise(rows: list[dict]) -> tuple[dict, dict]:
    keys = rows[0].keys()
    mean, hw = {}, {}
    r = len(rows)
    tq = stats.t.ppf(0.975, r - 1) if r > 1 else math.nan
    for k in keys:
        x = np.array([row[k] for row in rows], dtype=float)
        x = x[~np.isnan(x)]
        if x.size == 0:
            mean[k], hw[k] = math.nan, math.nan
            continue
        mean[k] = float(x.mean())
        hw[k] = float(tq * x.std(ddof=1) / math.sqrt(x.size)) if x.size > 1 else math.nan
    return mean, hw


def _trace_block(u, mode, prm, st, tot, acc, acc_from, out: IO, replica: int, first_slot: int):
    s = [int(x) for x in st]
    t = [int(x) for x in tot]
    a = [int(x) for x in acc]
    p = [float(x) for x in prm]
    for k, row in enumerate(u.tolist()):
        pu_tx, dummy, action, relay_sel, draws, disp = slot_py(row, mode, p, s, t, a, k >= acc_from)
        rec = {
            "replica": replica,
            "slot": first_slot + k,
            "pu_active": pu_tx,
            "dummy": dummy,
            "su_action": ACTIONS[action],
            "queue_used": ("relay" if relay_sel else "own") if action in (ACT_ACC0, ACT_ACCT) else "none",
            "draws": draws,
            **disp,
            "q_p": s[0],
            "q_r": s[1],
            "q_e": s[2],
        }
        out.write(json.dumps(rec) + "\n")
    st[:] = s
    tot[:] = t
    acc[:] = a


def _drift(xs: np.ndarray, ys: np.ndarray) -> float:
    half = len(xs) // 2
    if len(xs) - half < 2:
        return 0.0
    return float(np.polyfit(xs[half:], ys[half:], 1)[0])


def run(
    table: ChannelTable,
    pol: PolicyParams,
    lam_p: float,
    lam_e: float,
    replicas: int = 20,
    slots: int = 100_000,
    seed: int = 0,
    warmup: float = 0.1,
    mode: str = "original",
    backend: Optional[str] = None,
    threshold: int = DEFAULT_THRESHOLD,
    trace: Union[None, str, IO] = None,
) -> SimReport:
    """Simulate ``replicas`` independent runs of ``slots`` slots each.

    Replica ``k`` draws from ``SeedSequence(seed).spawn(replicas)[k]``.  The
    first ``warmup`` fraction of each run is excluded from the estimates.  A
    queue is flagged unstable when it ends above ``threshold`` packets while
    still growing over the second half of the run.
    """
    if replicas < 1:
        raise ValueError("replicas must be >= 1")
    if not 0.0 <= warmup < 1.0:
        raise ValueError("warmup must be a fraction in [0, 1)")
    n_warm = int(round(warmup * slots))
    if slots < 1 or slots <= n_warm:
        raise ValueError("slots must exceed the warm-up length")
    for name, v in (("lam_p", lam_p), ("lam_e", lam_e)):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {v!r}")
    m = MODES[mode]
    prm = pack_params(table, pol, lam_p, lam_e, m)
    backend = backend or DEFAULT
    kernel = get_kernel(backend)
    block = max(1, slots // _CHECKPOINTS)

    close = False
    if isinstance(trace, str):
        trace, close = open(trace, "w"), True
    try:
        rows, counts, totals, finals = [], [], [], []
        drifts = {"q_p": [], "q_r": []}
        flags = {"q_p": False, "q_r": False}
        for k, child in enumerate(np.random.SeedSequence(seed).spawn(replicas)):
            rng = np.random.Generator(np.random.PCG64(child))
            st = np.zeros(3, dtype=np.int64)
            tot = np.zeros(NC, dtype=np.int64)
            acc = np.zeros(NC, dtype=np.int64)
            xs, qp, qr = [], [], []
            for start in range(0, slots, block):
                nb = min(block, slots - start)
                u = rng.random((nb, NU))
                acc_from = min(max(0, n_warm - start), nb)
                if trace is not None:
                    _trace_block(u, m, prm, st, tot, acc, acc_from, trace, k, start)
                else:
                    kernel(u, m, prm, st, tot, acc, acc_from)
                xs.append(start + nb)
                qp.append(st[0])
                qr.append(st[1])
            xs_a = np.array(xs, dtype=float)
            for name, ys in (("q_p", qp), ("q_r", qr)):
                d = _drift(xs_a, np.array(ys, dtype=float))
                drifts[name].append(d)
                if ys[-1] > threshold and d > 0:
                    flags[name] = True
            rows.append(replica_estimates(acc))
            counts.append(acc)
            totals.append(tot)
            finals.append(st)
    finally:
        if close:
            trace.close()

    mean, hw = _summarise(rows)
    return SimReport(
        variant=mode,
        replicas=replicas,
        slots=slots,
        warmup=n_warm,
        seed=seed,
        backend="python" if trace is not None else backend,
        mean=mean,
        half_width=hw,
        counts=np.array(counts),
        totals=np.array(totals),
        final_state=np.array(finals),
        drift={k: float(np.mean(v)) for k, v in drifts.items()},
        unstable=flags,
    )


def run_dominated(
    variant: str,
    table: ChannelTable,
    pol: PolicyParams,
    lam_p: float,
    lam_e: float,
    **kw,
) -> SimReport:
    """Simulate one of the decoupled systems S1, S2, S3 slot by slot.

    S1: the PU sends a dummy packet whenever its queue is empty (dummies
    interfere and can be admitted for relaying, but never count as primary
    deliveries) and omega is pinned to 1.  S2: one energy token leaves the
    queue every slot that has one.  S3: the SU always has energy.
    """
    if variant not in ("S1", "S2", "S3"):
        raise ValueError(f"variant must be S1, S2 or S3, got {variant!r}")
    return run(table, pol, lam_p, lam_e, mode=variant, **kw)
