"""One slot of the cooperative protocol, driven by pre-drawn uniforms.

Every slot consumes exactly ``NU`` uniforms in a fixed layout, so the Python
and compiled kernels see the same random stream and produce identical
counters.  A queue length is read at the decision point, i.e. after the
slot's Bernoulli arrivals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..channel import ChannelTable
from ..rates import PolicyParams

# uniform layout within a slot
U_ARR_P, U_ARR_E, U_DEC, U_OMEGA, U_GAMMA, U_PD, U_SDS, U_SDP, U_PS, U_BETA = range(10)
NU = 10

MODES = {"original": 0, "S1": 1, "S2": 2, "S3": 3}

ACT_IDLE, ACT_RECV, ACT_ACC0, ACT_ACCT = range(4)
ACTIONS = ("idle", "receive", "access@0", "access@tau")

PARAM_NAMES = (
    "lam_p", "lam_e", "f", "omega", "alpha", "beta", "gamma",
    "p_pd", "p_ps", "p_sds", "p_sdp",
    "d_pd_00", "d_pd_01", "d_sds_00", "d_sds_10", "d_sdp_00", "d_sdp_10",
    "dh_sds", "dh_sdp",
)  # fmt: skip

COUNTER_NAMES = (
    "slots",
    "pu_tx",  # PU transmitting (real or dummy packet)
    "qp_nonempty",
    "qr_nonempty",
    "qe_nonempty",  # SU holds energy at the decision point
    "qp_sum",
    "qr_sum",
    "qe_sum",
    "arr_p",
    "arr_e",
    "p_direct",  # real primary packets delivered by the PU itself
    "p_admit",  # real primary packets moved into the relay queue
    "dummy_direct",
    "dummy_admit",
    "relay_out",  # relay-queue packets delivered to d_p
    "own_out",  # secondary packets delivered to d_s
    "su_tx",
    "su_tx_tau",
    "su_recv",
    "su_idle",
    "relay_offered",  # SU transmissions that would have served a relay packet
    "e_out",  # energy tokens leaving the queue (spent, or drained in S2)
    "relay_tx",
)
NC = len(COUNTER_NAMES)
C = {name: k for k, name in enumerate(COUNTER_NAMES)}


def pack_params(table: ChannelTable, pol: PolicyParams, lam_p: float, lam_e: float, mode: int) -> np.ndarray:
    omega = 1.0 if mode == MODES["S1"] else pol.omega
    vals = dict(
        lam_p=lam_p, lam_e=lam_e, f=pol.f, omega=omega, alpha=pol.alpha, beta=pol.beta, gamma=pol.gamma,
        p_pd=table.p_pd, p_ps=table.p_ps, p_sds=table.p_sds, p_sdp=table.p_sdp,
        d_pd_00=table.d_pd_00, d_pd_01=table.d_pd_01, d_sds_00=table.d_sds_00, d_sds_10=table.d_sds_10,
        d_sdp_00=table.d_sdp_00, d_sdp_10=table.d_sdp_10, dh_sds=table.dh_sds, dh_sdp=table.dh_sdp,
    )  # fmt: skip
    return np.array([vals[n] for n in PARAM_NAMES], dtype=np.float64)


@dataclass
class SlotTrace:
    slot: int
    pu_active: bool
    dummy: bool
    action: str
    queue_used: str  # "own", "relay" or "none"
    draws: dict
    primary_delivered: bool
    primary_admitted: bool
    secondary_delivered: bool
    relay_delivered: bool
    energy_used: bool
    q_p: int
    q_r: int
    q_e: int

    def as_record(self) -> dict:
        return {k: v for k, v in self.__dict__.items()}


def slot_py(u, mode: int, prm, st, tot, acc, do_acc: bool) -> tuple:
    """Advance ``st = [q_p, q_r, q_e]`` by one slot; update counter arrays in place.

    Returns ``(pu_tx, dummy, action, relay_sel, draws, dispositions)`` for tracing.
    The compiled kernel mirrors this function line for line.
    """
    lam_p, lam_e, f, omega, alpha, beta, gamma = prm[0], prm[1], prm[2], prm[3], prm[4], prm[5], prm[6]
    p_pd, p_ps, p_sds, p_sdp = prm[7], prm[8], prm[9], prm[10]
    d_pd_00, d_pd_01, d_sds_00, d_sds_10, d_sdp_00, d_sdp_10 = prm[11], prm[12], prm[13], prm[14], prm[15], prm[16]
    dh_sds, dh_sdp = prm[17], prm[18]

    arr_p = u[U_ARR_P] < lam_p
    arr_e = u[U_ARR_E] < lam_e
    if arr_p:
        st[0] += 1
    if arr_e and mode != 3:
        st[2] += 1
    q_p, q_r, q_e = st[0], st[1], st[2]

    pu_tx = q_p > 0 or mode == 1
    dummy = q_p == 0 and mode == 1
    has_energy = q_e > 0 or mode == 3

    if has_energy:
        if u[U_DEC] < f:
            if pu_tx and u[U_OMEGA] < omega:
                action = ACT_RECV
            else:
                action = ACT_ACCT
        else:
            action = ACT_ACC0
    elif u[U_DEC] < alpha:
        action = ACT_RECV
    else:
        action = ACT_IDLE

    transmit = action == ACT_ACC0 or action == ACT_ACCT
    relay_coin = u[U_GAMMA] < gamma
    relay_sel = transmit and q_r > 0 and relay_coin

    # secondary link success, t=tau access pays the delay ratio
    if action == ACT_ACCT:
        ps_sds = p_sds * dh_sds
        ps_sdp = p_sdp * dh_sdp
        if pu_tx:
            ps_sds = ps_sds * d_sds_10
            ps_sdp = ps_sdp * d_sdp_10
    else:
        ps_sds = p_sds
        ps_sdp = p_sdp
        if pu_tx:
            ps_sds = ps_sds * d_sds_00
            ps_sdp = ps_sdp * d_sdp_00
    ok_sds = transmit and u[U_SDS] < ps_sds
    ok_sdp = transmit and u[U_SDP] < ps_sdp

    if action == ACT_ACC0:
        pp = p_pd * d_pd_00
    elif action == ACT_ACCT:
        pp = p_pd * d_pd_01
    else:
        pp = p_pd
    ok_pd = pu_tx and u[U_PD] < pp
    ok_ps = pu_tx and action == ACT_RECV and u[U_PS] < p_ps
    admit = pu_tx and not ok_pd and ok_ps and u[U_BETA] < beta

    own_del = transmit and not relay_sel and ok_sds
    relay_del = relay_sel and ok_sdp
    relay_offered = transmit and relay_coin and ok_sdp

    counters = [tot, acc] if do_acc else [tot]
    for c in counters:
        c[0] += 1
        c[1] += pu_tx
        c[2] += q_p > 0
        c[3] += q_r > 0
        c[4] += has_energy
        c[5] += q_p
        c[6] += q_r
        c[7] += q_e
        c[8] += arr_p
        c[9] += arr_e
        c[10] += ok_pd and not dummy
        c[11] += admit and not dummy
        c[12] += ok_pd and dummy
        c[13] += admit and dummy
        c[14] += relay_del
        c[15] += own_del
        c[16] += transmit
        c[17] += action == ACT_ACCT
        c[18] += action == ACT_RECV
        c[19] += action == ACT_IDLE
        c[20] += relay_offered
        c[21] += (mode == 2 and has_energy) or (mode != 2 and transmit)
        c[22] += relay_sel

    if ok_pd and not dummy:
        st[0] -= 1
    if admit:
        st[1] += 1
        if not dummy:
            st[0] -= 1
    if relay_del:
        st[1] -= 1
    if mode == 2:
        if has_energy:
            st[2] -= 1
    elif transmit and mode != 3:
        st[2] -= 1

    draws = {"pd_p": bool(ok_pd), "ps": bool(ok_ps), "sd_s": bool(ok_sds), "sd_p": bool(ok_sdp)}
    disp = dict(
        primary_delivered=bool(ok_pd and not dummy),
        primary_admitted=bool(admit and not dummy),
        secondary_delivered=bool(own_del),
        relay_delivered=bool(relay_del),
        energy_used=bool(transmit),
    )
    return bool(pu_tx), bool(dummy), action, bool(relay_sel), draws, disp


def run_block_py(u: np.ndarray, mode: int, prm: np.ndarray, st: np.ndarray, tot: np.ndarray, acc: np.ndarray, acc_from: int) -> None:
    """Pure-Python kernel: run ``len(u)`` slots, accumulating ``acc`` from row ``acc_from`` on."""
    s = [int(x) for x in st]
    t = [int(x) for x in tot]
    a = [int(x) for x in acc]
    p = [float(x) for x in prm]
    rows = u.tolist()
    for k, row in enumerate(rows):
        slot_py(row, mode, p, s, t, a, k >= acc_from)
    st[:] = s
    tot[:] = t
    acc[:] = a


@dataclass
class NetworkState:
    """Queue lengths at the start of a slot.  The secondary data queue is
    saturated and is never inspected; ``q_s`` is kept only as a label."""

    q_p: int = 0
    q_r: int = 0
    q_e: int = 0
    q_s: float = float("inf")
    slot: int = 0
    rng: Optional[np.random.Generator] = field(default=None, repr=False)

    def __post_init__(self):
        if self.rng is None:
            self.rng = np.random.default_rng()
        if min(self.q_p, self.q_r, self.q_e) < 0:
            raise ValueError("queue lengths must be non-negative")


def step(
    state: NetworkState,
    table: ChannelTable,
    pol: PolicyParams,
    arrivals: tuple[float, float],
    mode: str = "original",
    uniforms: Optional[np.ndarray] = None,
) -> SlotTrace:
    """Run one slot on ``state`` (mutated in place) and return what happened.

    ``uniforms`` (length ``NU``) overrides the draws from ``state.rng``.
    """
    m = MODES[mode]
    lam_p, lam_e = arrivals
    prm = pack_params(table, pol, lam_p, lam_e, m).tolist()
    u = state.rng.random(NU).tolist() if uniforms is None else list(uniforms)
    st = [state.q_p, state.q_r, state.q_e]
    tot = [0] * NC
    pu_tx, dummy, action, relay_sel, draws, disp = slot_py(u, m, prm, st, tot, tot, False)
    state.q_p, state.q_r, state.q_e = st
    trace = SlotTrace(
        slot=state.slot,
        pu_active=pu_tx,
        dummy=dummy,
        action=ACTIONS[action],
        queue_used=("relay" if relay_sel else "own") if action in (ACT_ACC0, ACT_ACCT) else "none",
        draws=draws,
        q_p=state.q_p,
        q_r=state.q_r,
        q_e=state.q_e,
        **disp,
    )
    state.slot += 1
    return trace
