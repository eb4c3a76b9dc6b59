"""Fixed-step RK4 integration of either master equation.

The integrator is deterministic (fixed grid, no adaptivity) so CSV fixtures
and per-step reaction accounting are reproducible bit-for-bit on a platform.
State snapshots are decimated by `stride`; cumulative recombination r_S, r_T
is accumulated inside the RK4 tableau itself (dr/dt = k Tr{rho Q} treated as
two extra ODE components), which keeps the trace bookkeeping
Tr rho(t) + r_S + r_T = Tr rho(0) accurate to the integrator's order rather
than to O(dt) of a rectangle rule.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .master import (POPULATION_FLOOR, ReactionParams, StepStats, Theory,
                     check_density_matrix, parse_theory, step_stats)
from .spins import (SpinSystem, build_hamiltonian, build_projectors,
                    singlet_adapted_transform)

DEFAULT_DT = 1e-3
DEFAULT_STRIDE = 10
TRACE_FLOOR = 1e-9


class IntegrationError(RuntimeError):
    """Invariant breach during integration; carries the partial record."""

    def __init__(self, message, record=None):
        super().__init__(message)
        self.record = record


@dataclass
class TrajectoryRecord:
    """Decimated trajectory of one master-equation run.

    All arrays share the snapshot axis: times[i] is the physical time of
    rhos[i] (product basis).  r_s/r_t are cumulative recombination yields up
    to times[i]; q_s, p_coh and purity are derived from the snapshot states.
    status is "completed" (reached t_max), "depleted" (trace fell below the
    floor and the reaction is over), or "nonfinite" on the partial record
    attached to an IntegrationError.
    """

    times: np.ndarray
    rhos: np.ndarray
    traces: np.ndarray
    r_s: np.ndarray
    r_t: np.ndarray
    q_s: np.ndarray
    p_coh: np.ndarray
    purity: np.ndarray
    theory: Theory
    params: ReactionParams
    system: SpinSystem
    dt: float
    stride: int
    status: str = "completed"
    steps_completed: int = 0

    def __len__(self):
        return len(self.times)

    @property
    def y_s(self) -> float:
        """Singlet reaction yield accumulated so far."""
        return float(self.r_s[-1])

    @property
    def y_t(self) -> float:
        return float(self.r_t[-1])

    def stats_at(self, index: int) -> StepStats:
        """StepStats generated by the snapshot state over one dt."""
        return step_stats(self.rhos[index], self.params, self.system, self.dt)


def default_grid(params: ReactionParams):
    """(t_max, dt) rule: twenty lifetimes of the faster channel, dt = 1e-3."""
    k_max = max(params.k_s, params.k_t)
    if k_max <= 0:
        raise ValueError("default grid needs k_s + k_t > 0")
    return 20.0 / k_max, DEFAULT_DT


def _batched_p_coh(rhos_st, traces, n_s, params):
    """p_coh for a stack of ST-basis states, vectorized for the default
    measure and generic (slow) otherwise."""
    n = rhos_st.shape[0]
    if params.coherence_measure == "zero":
        return np.zeros(n)
    if params.coherence_measure == "one":
        return np.ones(n)
    ps = np.einsum("nii->n", rhos_st[:, :n_s, :n_s]).real
    pt = traces - ps
    if params.coherence_measure == "trace-norm":
        cross = rhos_st[:, :n_s, n_s:]
        sv = np.linalg.svd(cross, compute_uv=False)
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = sv.sum(axis=1) / np.sqrt(ps * pt)
        floor = POPULATION_FLOOR * traces
        vals = np.where((ps > floor) & (pt > floor), vals, 0.0)
        return np.clip(vals, 0.0, 1.0)
    # user-registered measure: fall back to the per-snapshot callable
    from .master import COHERENCE_MEASURES
    fn = COHERENCE_MEASURES[params.coherence_measure]
    qs = np.zeros((rhos_st.shape[1],) * 2, dtype=complex)
    qs[:n_s, :n_s] = np.eye(n_s)
    qt = np.eye(rhos_st.shape[1], dtype=complex) - qs
    return np.array([fn(r, qs, qt) for r in rhos_st])


def integrate(system: SpinSystem, params: ReactionParams, rho0: np.ndarray,
              theory=Theory.HABERKORN, t_max: Optional[float] = None,
              dt: Optional[float] = None, stride: int = DEFAULT_STRIDE,
              trace_floor: float = TRACE_FLOOR,
              check: bool = True) -> TrajectoryRecord:
    """Integrate the selected master equation from rho0 (product basis).

    The grid is n_steps = ceil(t_max/dt) rounded up to a multiple of stride,
    so the final snapshot lands exactly on the last step.  Raises
    IntegrationError (with the partial record attached) if the state leaves
    the density-matrix cone or the trace grows.
    """
    theory = parse_theory(theory)
    if dt is None or t_max is None:
        auto_t, auto_dt = default_grid(params)
        t_max = auto_t if t_max is None else t_max
        dt = auto_dt if dt is None else dt
    if dt <= 0 or t_max < dt:
        raise ValueError("need dt > 0 and t_max >= dt")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    if check:
        check_density_matrix(rho0)

    n_steps = math.ceil(round(t_max / dt, 9))
    n_steps += (-n_steps) % stride

    w, n_s = singlet_adapted_transform(system)
    ht = w.conj().T @ build_hamiltonian(system) @ w
    ht = np.ascontiguousarray(0.5 * (ht + ht.conj().T))
    rho_st = np.ascontiguousarray(w.conj().T @ np.asarray(rho0, complex) @ w)

    # The compiled kernel knows the built-in coherence measures; a
    # user-registered measure forces the (identical, slower) python loop.
    measure_code = _kernels.MEASURE_CODES.get(params.coherence_measure, 0)
    use_kernel = (theory is not Theory.KOMINIS
                  or params.coherence_measure in _kernels.MEASURE_CODES)

    theory_code = {Theory.HABERKORN: 0, Theory.KOMINIS: 1}[theory]
    if use_kernel:
        rhos_st, rs, rt, n_filled, status_code, steps = _kernels.run_trajectory(
            rho_st, ht, n_s, params.k_s, params.k_t, params.gamma, dt,
            n_steps, stride, theory_code, measure_code, trace_floor)
    else:
        rhos_st, rs, rt, n_filled, status_code, steps = _python_trajectory(
            rho_st, ht, n_s, params, dt, n_steps, stride, theory, trace_floor)

    rhos_st = rhos_st[:n_filled]
    rs = rs[:n_filled]
    rt = rt[:n_filled]
    times = dt * stride * np.arange(n_filled)
    traces = np.einsum("nii->n", rhos_st).real

    rhos = np.einsum("ab,nbc,dc->nad", w, rhos_st, w.conj())
    record = TrajectoryRecord(
        times=times, rhos=rhos, traces=traces, r_s=rs, r_t=rt,
        q_s=_safe_div(np.einsum("nii->n", rhos_st[:, :n_s, :n_s]).real, traces),
        p_coh=_batched_p_coh(rhos_st, traces, n_s, params),
        purity=_safe_div(np.einsum("nij,nji->n", rhos_st, rhos_st).real,
                         traces ** 2),
        theory=theory, params=params, system=system, dt=dt, stride=stride,
        status={_kernels.STATUS_DEPLETED: "depleted",
                _kernels.STATUS_NONFINITE: "nonfinite"}.get(
                    status_code, "completed"),
        steps_completed=steps)

    if status_code == _kernels.STATUS_NONFINITE:
        raise IntegrationError(
            f"state became non-finite at step {steps} (t={steps * dt:.4g})",
            record)
    if check:
        _check_record_invariants(record)
    return record


def _safe_div(num, den):
    with np.errstate(divide="ignore", invalid="ignore"):
        out = num / den
    return np.where(den > 0, out, 0.0)


def _check_record_invariants(record):
    growth = np.diff(record.traces)
    if growth.size and growth.max() > 1e-10:
        i = int(np.argmax(growth))
        raise IntegrationError(
            f"trace grew by {growth.max():.3e} between t={record.times[i]:.4g} "
            f"and t={record.times[i + 1]:.4g}", record)
    min_eig = np.linalg.eigvalsh(record.rhos).min()
    if min_eig < -1e-8:
        raise IntegrationError(
            f"state left the positive cone (min eigenvalue {min_eig:.3e})",
            record)


def _python_trajectory(rho_st, ht, n_s, params, dt, n_steps, stride, theory,
                       trace_floor):
    """Reference RK4 loop for custom coherence measures; mirrors the kernel."""
    dim = rho_st.shape[0]
    qs = np.zeros((dim, dim), dtype=complex)
    qs[:n_s, :n_s] = np.eye(n_s)

    def rhs_st(r):
        tr = np.trace(r).real
        ps = np.trace(r[:n_s, :n_s]).real
        pt = tr - ps
        if theory is Theory.KOMINIS and tr <= 0:
            return np.zeros_like(r), ps, pt
        out = -1j * (ht @ r - r @ ht)
        if theory is Theory.HABERKORN:
            qr = qs @ r
            rq = r @ qs
            out -= 0.5 * params.k_s * (qr + rq)
            out -= 0.5 * params.k_t * (2 * r - qr - rq)
        else:
            qt = np.eye(dim) - qs
            p = params.p_coh(r, qs, qt)
            qrq = qs @ r @ qs
            trt = qt @ r @ qt
            out -= 0.5 * (params.k_s + params.k_t) * (qs @ r + r @ qs - 2 * qrq)
            out -= (1 - p) * (params.k_s * qrq + params.k_t * trt)
            lrate = (params.k_s * ps + params.k_t * pt) / tr
            out -= lrate * (p * (qrq + trt) + (r - qrq - trt))
        if params.gamma > 0:
            out -= params.gamma * (r - (tr / dim) * np.eye(dim))
        return out, ps, pt

    n_snap = n_steps // stride + 1
    rhos = np.zeros((n_snap, dim, dim), dtype=complex)
    rs = np.zeros(n_snap)
    rt = np.zeros(n_snap)
    rho = rho_st.copy()
    r_s = r_t = 0.0
    snap = 0
    status = _kernels.STATUS_COMPLETED
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
        tr = np.trace(rho).real
        if not np.isfinite(tr):
            status = _kernels.STATUS_NONFINITE
            break
        if tr < trace_floor:
            status = _kernels.STATUS_DEPLETED
            break
        k1, ps1, pt1 = rhs_st(rho)
        k2, ps2, pt2 = rhs_st(rho + 0.5 * dt * k1)
        k3, ps3, pt3 = rhs_st(rho + 0.5 * dt * k2)
        k4, ps4, pt4 = rhs_st(rho + dt * k3)
        rho = rho + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        rho = 0.5 * (rho + rho.conj().T)
        r_s += (params.k_s * dt / 6.0) * (ps1 + 2 * ps2 + 2 * ps3 + ps4)
        r_t += (params.k_t * dt / 6.0) * (pt1 + 2 * pt2 + 2 * pt3 + pt4)
    return rhos, rs, rt, snap, status, steps_done


def integrate_nonreacting(system: SpinSystem, k_s: float, k_t: float,
                          rho0: np.ndarray, t_max: float,
                          dt: float = DEFAULT_DT,
                          stride: int = DEFAULT_STRIDE):
    """Integrate the trace-preserving dephasing law
    dR/dt = -i[H,R] - (k_s+k_t)/2 (Q_S R + R Q_S - 2 Q_S R Q_S).

    This is the factor R(t) of the equal-rates solution rho = e^{-kt} R(t).
    Returns (times, R snapshots in the product basis).
    """
    w, n_s = singlet_adapted_transform(system)
    ht = w.conj().T @ build_hamiltonian(system) @ w
    ht = np.ascontiguousarray(0.5 * (ht + ht.conj().T))
    r_st = np.ascontiguousarray(w.conj().T @ np.asarray(rho0, complex) @ w)
    n_steps = math.ceil(round(t_max / dt, 9))
    n_steps += (-n_steps) % stride
    rhos_st, _, _, n_filled, status, _ = _kernels.run_trajectory(
        r_st, ht, n_s, k_s, k_t, 0.0, dt, n_steps, stride,
        _kernels.THEORY_CODES["dephasing"], 0, -1.0)
    if status != _kernels.STATUS_COMPLETED:
        raise IntegrationError("non-reacting integration did not complete")
    rhos_st = rhos_st[:n_filled]
    times = dt * stride * np.arange(n_filled)
    return times, np.einsum("ab,nbc,dc->nad", w, rhos_st, w.conj())
