# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled slot loop; mirrors ``protocol.slot_py`` expression for expression."""

cdef enum:
    ACT_IDLE = 0
    ACT_RECV = 1
    ACT_ACC0 = 2
    ACT_ACCT = 3
    NC = 23


cdef inline void _bump(long long[::1] c, bint pu_tx, long long q_p, long long q_r, long long q_e,
                       bint has_energy, bint arr_p, bint arr_e, bint ok_pd, bint dummy, bint admit,
                       bint relay_del, bint own_del, bint transmit, int action, bint relay_offered,
                       bint e_out, bint relay_sel) nogil:
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
    c[21] += e_out
    c[22] += relay_sel


def run_block(const double[:, ::1] u, int mode, const double[::1] prm, long long[::1] st,
              long long[::1] tot, long long[::1] acc, Py_ssize_t acc_from):
    """Run ``u.shape[0]`` slots in place on ``st``; ``acc`` counts rows from ``acc_from`` on."""
    cdef double lam_p = prm[0], lam_e = prm[1], f = prm[2], omega = prm[3], alpha = prm[4]
    cdef double beta = prm[5], gamma = prm[6]
    cdef double p_pd = prm[7], p_ps = prm[8], p_sds = prm[9], p_sdp = prm[10]
    cdef double d_pd_00 = prm[11], d_pd_01 = prm[12], d_sds_00 = prm[13], d_sds_10 = prm[14]
    cdef double d_sdp_00 = prm[15], d_sdp_10 = prm[16], dh_sds = prm[17], dh_sdp = prm[18]
    cdef long long q_p = st[0], q_r = st[1], q_e = st[2]
    cdef Py_ssize_t k, n = u.shape[0]
    cdef bint arr_p, arr_e, pu_tx, dummy, has_energy, transmit, relay_coin, relay_sel
    cdef bint ok_sds, ok_sdp, ok_pd, ok_ps, admit, own_del, relay_del, relay_offered, e_out
    cdef int action
    cdef double ps_sds, ps_sdp, pp

    if tot.shape[0] < NC or acc.shape[0] < NC:
        raise ValueError("counter arrays too short")
    if u.shape[1] < 10:
        raise ValueError("need 10 uniforms per slot")

    with nogil:
        for k in range(n):
            arr_p = u[k, 0] < lam_p
            arr_e = u[k, 1] < lam_e
            if arr_p:
                q_p += 1
            if arr_e and mode != 3:
                q_e += 1

            pu_tx = q_p > 0 or mode == 1
            dummy = q_p == 0 and mode == 1
            has_energy = q_e > 0 or mode == 3

            if has_energy:
                if u[k, 2] < f:
                    if pu_tx and u[k, 3] < omega:
                        action = ACT_RECV
                    else:
                        action = ACT_ACCT
                else:
                    action = ACT_ACC0
            elif u[k, 2] < alpha:
                action = ACT_RECV
            else:
                action = ACT_IDLE

            transmit = action == ACT_ACC0 or action == ACT_ACCT
            relay_coin = u[k, 4] < gamma
            relay_sel = transmit and q_r > 0 and relay_coin

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
            ok_sds = transmit and u[k, 6] < ps_sds
            ok_sdp = transmit and u[k, 7] < ps_sdp

            if action == ACT_ACC0:
                pp = p_pd * d_pd_00
            elif action == ACT_ACCT:
                pp = p_pd * d_pd_01
            else:
                pp = p_pd
            ok_pd = pu_tx and u[k, 5] < pp
            ok_ps = pu_tx and action == ACT_RECV and u[k, 8] < p_ps
            admit = pu_tx and not ok_pd and ok_ps and u[k, 9] < beta

            own_del = transmit and not relay_sel and ok_sds
            relay_del = relay_sel and ok_sdp
            relay_offered = transmit and relay_coin and ok_sdp
            e_out = (mode == 2 and has_energy) or (mode != 2 and transmit)

            _bump(tot, pu_tx, q_p, q_r, q_e, has_energy, arr_p, arr_e, ok_pd, dummy, admit,
                  relay_del, own_del, transmit, action, relay_offered, e_out, relay_sel)
            if k >= acc_from:
                _bump(acc, pu_tx, q_p, q_r, q_e, has_energy, arr_p, arr_e, ok_pd, dummy, admit,
                      relay_del, own_del, transmit, action, relay_offered, e_out, relay_sel)

            if ok_pd and not dummy:
                q_p -= 1
            if admit:
                q_r += 1
                if not dummy:
                    q_p -= 1
            if relay_del:
                q_r -= 1
            if mode == 2:
                if has_energy:
                    q_e -= 1
            elif transmit and mode != 3:
                q_e -= 1

    st[0] = q_p
    st[1] = q_r
    st[2] = q_e
