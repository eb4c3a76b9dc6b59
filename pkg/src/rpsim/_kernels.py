"""JIT-compiled inner loops.

Everything here works in the singlet/triplet-adapted basis, where both
projectors are diagonal (first n_s basis states span the singlet subspace).
In that basis each master-equation evaluation is a single matrix product for
the commutator -- Hermitian rho means [H, rho] = H rho - (H rho)^dag -- plus
elementwise block masks for the reaction terms, which is what makes fixed-step
RK4 with 1e5..1e6 steps per trajectory affordable.

Theory codes: 0 Haberkorn, 1 measurement (Kominis), 2 non-reacting dephasing
factor (the trace-preserving law obtained at equal rates).
Coherence-measure codes: 0 trace-norm, 1 zero, 2 one.

Compiled objects are cached on disk (cache=True), so the JIT cost is paid
once per environment, not per process.
"""

import numpy as np
from numba import njit

THEORY_CODES = {"haberkorn": 0, "kominis": 1, "dephasing": 2}
MEASURE_CODES = {"trace-norm": 0, "zero": 1, "one": 2}

STATUS_COMPLETED = 0
STATUS_DEPLETED = 1
STATUS_NONFINITE = 2


@njit(cache=True)
def _pcoh_trace_norm(rho, n_s, ps, pt):
    """Trace norm of the S-T cross block over sqrt(ps*pt), clamped to [0,1].

    Populations below a part in 1e12 of the trace count as empty (matches
    master.coherence_fraction).
    """
    floor = 1e-12 * (ps + pt)
    if ps <= floor or pt <= floor:
        return 0.0
    dim = rho.shape[0]
    n_t = dim - n_s
    g = np.empty((n_s, n_s), dtype=np.complex128)
    for a in range(n_s):
        for b in range(n_s):
            acc = 0.0 + 0.0j
            for c in range(n_t):
                acc += rho[a, n_s + c] * np.conj(rho[b, n_s + c])
            g[a, b] = acc
    if n_s == 2:
        # closed form for the two eigenvalues of the 2x2 Gram matrix
        t = g[0, 0].real + g[1, 1].real
        d = (g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]).real
        disc = t * t - 4.0 * d
        if disc < 0.0:
            disc = 0.0
        s = np.sqrt(disc)
        lp = 0.5 * (t + s)
        lm = 0.5 * (t - s)
        tn = 0.0
        if lp > 0.0:
            tn += np.sqrt(lp)
        if lm > 0.0:
            tn += np.sqrt(lm)
    else:
        w = np.linalg.eigvalsh(g)
        tn = 0.0
        for x in w:
            if x > 0.0:
                tn += np.sqrt(x)
    val = tn / np.sqrt(ps * pt)
    if val < 0.0:
        return 0.0
    if val > 1.0:
        return 1.0
    return val


@njit(cache=True)
def _rhs(rho, ht, n_s, k_s, k_t, gamma, theory, measure):
    """Master-equation right-hand side; returns (drho, ps, pt)."""
    dim = rho.shape[0]
    tr = 0.0
    for i in range(dim):
        tr += rho[i, i].real
    ps = 0.0
    for i in range(n_s):
        ps += rho[i, i].real
    pt = tr - ps
    if theory == 1 and tr <= 0.0:
        return np.zeros_like(rho), ps, pt

    c = ht @ rho
    out = -1j * (c - np.conj(c.T))

    if theory == 0:
        for i in range(dim):
            di = 1.0 if i < n_s else 0.0
            for j in range(dim):
                dj = 1.0 if j < n_s else 0.0
                out[i, j] -= (0.5 * k_s * (di + dj)
                              + 0.5 * k_t * (2.0 - di - dj)) * rho[i, j]
    elif theory == 1:
        if measure == 0:
            p = _pcoh_trace_norm(rho, n_s, ps, pt)
        elif measure == 1:
            p = 0.0
        else:
            p = 1.0
        kbar = 0.5 * (k_s + k_t)
        lrate = (k_s * ps + k_t * pt) / tr
        cs = (1.0 - p) * k_s + p * lrate
        ct = (1.0 - p) * k_t + p * lrate
        cx = kbar + lrate
        for i in range(dim):
            for j in range(dim):
                if i < n_s:
                    coef = cs if j < n_s else cx
                else:
                    coef = cx if j < n_s else ct
                out[i, j] -= coef * rho[i, j]
    else:
        # non-reacting factor: pure S-T dephasing at rate (k_s + k_t)/2
        kbar = 0.5 * (k_s + k_t)
        for i in range(dim):
            for j in range(dim):
                if (i < n_s) != (j < n_s):
                    out[i, j] -= kbar * rho[i, j]

    if gamma > 0.0:
        for i in range(dim):
            for j in range(dim):
                out[i, j] -= gamma * rho[i, j]
        shift = gamma * tr / dim
        for i in range(dim):
            out[i, i] += shift
    return out, ps, pt


@njit(cache=True)
def run_trajectory(rho0, ht, n_s, k_s, k_t, gamma, dt, n_steps, stride,
                   theory, measure, trace_floor):
    """Fixed-step RK4 march with snapshot decimation.

    Cumulative singlet/triplet recombination is integrated alongside the
    state (dr_x/dt = k_x Tr{rho Q_x} enters the same RK4 tableau), so the
    recorded r_s/r_t carry the integrator's full order.  Returns
    (snapshots, r_s, r_t, n_filled, status, steps_done); arrays are sized for
    the full run and must be trimmed to n_filled by the caller.
    """
    dim = rho0.shape[0]
    n_snap = n_steps // stride + 1
    rhos = np.zeros((n_snap, dim, dim), dtype=np.complex128)
    rs = np.zeros(n_snap)
    rt = np.zeros(n_snap)
    rho = rho0.copy()
    r_s = 0.0
    r_t = 0.0
    snap = 0
    status = STATUS_COMPLETED
    steps_done = 0
    for step in range(n_steps + 1):
        if step % stride == 0:
            rhos[snap] = rho
            rs[snap] = r_s
            rt[snap] = r_t
            snap += 1
        steps_done = step
        if step == n_steps:
            break
        tr = 0.0
        for i in range(dim):
            tr += rho[i, i].real
        if not np.isfinite(tr):
            status = STATUS_NONFINITE
            break
        if tr < trace_floor:
            status = STATUS_DEPLETED
            break
        k1, ps1, pt1 = _rhs(rho, ht, n_s, k_s, k_t, gamma, theory, measure)
        y = rho + (0.5 * dt) * k1
        k2, ps2, pt2 = _rhs(y, ht, n_s, k_s, k_t, gamma, theory, measure)
        y = rho + (0.5 * dt) * k2
        k3, ps3, pt3 = _rhs(y, ht, n_s, k_s, k_t, gamma, theory, measure)
        y = rho + dt * k3
        k4, ps4, pt4 = _rhs(y, ht, n_s, k_s, k_t, gamma, theory, measure)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        for i in range(dim):
            rho[i, i] = complex(rho[i, i].real, 0.0)
            for j in range(i + 1, dim):
                avg = 0.5 * (rho[i, j] + np.conj(rho[j, i]))
                rho[i, j] = avg
                rho[j, i] = np.conj(avg)
        r_s += (k_s * dt / 6.0) * (ps1 + 2.0 * ps2 + 2.0 * ps3 + ps4)
        r_t += (k_t * dt / 6.0) * (pt1 + 2.0 * pt2 + 2.0 * pt3 + pt4)
    return rhos, rs, rt, snap, status, steps_done


@njit(cache=True)
def _entropy_from_evals(w):
    """-sum p ln p over the positive eigenvalues, normalized to sum 1."""
    tot = 0.0
    for x in w:
        if x > 0.0:
            tot += x
    if tot <= 0.0:
        return 0.0
    s = 0.0
    for x in w:
        if x > 1e-14 * tot:
            p = x / tot
            s -= p * np.log(p)
    return s


@njit(cache=True)
def sweep_quadrature(p_op, v0, n_s, dim, n_points, w_row3, w_row5_conj):
    """March vec(R) with a fixed-interval propagator and tabulate integrand
    ingredients at each node.

    Returns per-node arrays (tr_R, Tr{R Q_S}, S[R/TrR], S[singlet block],
    S[triplet block], |rho_35 of R in the product basis|).
    """
    tr_r = np.empty(n_points)
    trs_r = np.empty(n_points)
    s_init = np.empty(n_points)
    s_sing = np.empty(n_points)
    s_trip = np.empty(n_points)
    c35 = np.empty(n_points)
    v = v0.copy()
    n_t = dim - n_s
    r = np.empty((dim, dim), dtype=np.complex128)
    for q in range(n_points):
        for j in range(dim):
            base = j * dim
            for i in range(dim):
                r[i, j] = v[base + i]
        tr = 0.0
        for i in range(dim):
            tr += r[i, i].real
        trs = 0.0
        for i in range(n_s):
            trs += r[i, i].real
        tr_r[q] = tr
        trs_r[q] = trs
        s_init[q] = _entropy_from_evals(np.linalg.eigvalsh(r))
        rs_blk = np.ascontiguousarray(r[:n_s, :n_s])
        s_sing[q] = _entropy_from_evals(np.linalg.eigvalsh(rs_blk))
        rt_blk = np.ascontiguousarray(r[n_s:, n_s:])
        s_trip[q] = _entropy_from_evals(np.linalg.eigvalsh(rt_blk))
        elem = 0.0 + 0.0j
        for a in range(dim):
            wa = w_row3[a]
            if wa.real != 0.0 or wa.imag != 0.0:
                acc = 0.0 + 0.0j
                for b in range(dim):
                    acc += r[a, b] * w_row5_conj[b]
                elem += wa * acc
        c35[q] = abs(elem)
        if q < n_points - 1:
            v = p_op @ v
    return tr_r, trs_r, s_init, s_sing, s_trip, c35


def warmup():
    """Trigger JIT compilation (or cache load) of all kernels."""
    dim, n_s = 8, 2
    rho = np.zeros((dim, dim), dtype=np.complex128)
    rho[0, 0] = 0.6
    rho[3, 3] = 0.4
    rho[0, 3] = rho[3, 0] = 0.2
    ht = np.eye(dim, dtype=np.complex128)
    for theory in (0, 1, 2):
        run_trajectory(rho, ht, n_s, 0.1, 0.2, 0.001, 1e-3, 4, 2,
                       theory, 0, 1e-9)
    run_trajectory(rho, ht, n_s, 0.1, 0.2, 0.0, 1e-3, 4, 2, 1, 1, 1e-9)
    p_op = np.eye(dim * dim, dtype=np.complex128)
    w3 = np.zeros(dim, dtype=np.complex128)
    w5 = np.zeros(dim, dtype=np.complex128)
    w3[0] = w5[1] = 1.0
    sweep_quadrature(p_op, rho.flatten(order="F").copy(), n_s, dim, 3, w3, w5)
