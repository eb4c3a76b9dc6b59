"""End-to-end acceptance checks for the radical-pair entropy toolkit.

Thirteen numbered checks cover the headline physics: Ozawa-bound violation
under Haberkorn dynamics, Ozawa/Lanford-Robinson satisfaction under Kominis
dynamics, the gamma-driven transition, equal-rates factorization, closed-form
decay laws, purity behaviour, entropy oracles, magnetic-field effects, yield
closure, the Liouville spectrum, and dt-convergence of every reported scalar.

Each test prints exactly one line

    ACCEPTANCE <n>: PASS|FAIL — <measured values>

*before* asserting, so a full run always produces the complete scoreboard:

    pytest tests/test_acceptance.py -s

Checks 4 and 5 currently FAIL; their docstrings explain the physics of why
the implemented dynamics land outside the expected windows.  Everything is
integrated at dt = 1e-3/A (A = 1) with snapshots every 10 steps unless noted.
"""

import time
from types import SimpleNamespace

import numpy as np
import pytest

from conftest import random_density
from rpsim import (
    Coupling,
    ReactionParams,
    SpinSystem,
    Theory,
    audit_bounds,
    build_projectors,
    build_superoperator,
    field_sweep,
    gamma_scan,
    integrate,
    integrate_nonreacting,
    maximally_mixed_state,
    mixed_triplet_state,
    nonreacting_rhs,
    p_coh,
    reconstruct,
    rhs,
    singlet_adapted_transform,
    singlet_up_state,
    spectrum,
    von_neumann_entropy,
)
from rpsim.sweep import is_monotone, local_extrema, local_minima

A = 1.0
SYS = SpinSystem()
B1 = ReactionParams(k_s=A / 100, k_t=A / 5, gamma=A / 2000)
B2 = ReactionParams(k_s=A / 100, k_t=A / 5)
GAMMAS = (A / 2000, A / 200, A / 20, A / 5)
K_EQ = A / 20
B_GRID = np.linspace(0.0, 3.0, 201)
WINDOW = (0.8, 1.2)


def _report(n, ok, detail):
    print(f"ACCEPTANCE {n}: {'PASS' if ok else 'FAIL'} — {detail}")
    return ok


def _audited(theory, params, rho0, dt=1e-3, stride=10):
    record = integrate(SYS, params, rho0, theory=theory, t_max=100.0,
                       dt=dt, stride=stride)
    return record, audit_bounds(record)


# ---------------------------------------------------------------------------
# shared runs (module scope so the scoreboard reuses one set of trajectories)

@pytest.fixture(scope="module")
def b1_run():
    t0 = time.perf_counter()
    record, report = _audited("haberkorn", B1, singlet_up_state(SYS))
    return SimpleNamespace(record=record, report=report,
                           seconds=time.perf_counter() - t0)


@pytest.fixture(scope="module")
def b2_run():
    t0 = time.perf_counter()
    record, report = _audited("haberkorn", B2, mixed_triplet_state(SYS))
    return SimpleNamespace(record=record, report=report,
                           seconds=time.perf_counter() - t0)


@pytest.fixture(scope="module")
def kominis_runs():
    out = {}
    for tag, params, rho0 in (("B1", B1, singlet_up_state(SYS)),
                              ("B2", B2, mixed_triplet_state(SYS))):
        record, report = _audited("kominis", params, rho0)
        out[tag] = SimpleNamespace(record=record, report=report)
    return out


@pytest.fixture(scope="module")
def ladder_rows():
    return gamma_scan(SYS, B2, GAMMAS, t_max=100.0, dt=1e-3, stride=10)


@pytest.fixture(scope="module")
def sweep201():
    params = ReactionParams(k_s=K_EQ, k_t=K_EQ)
    t0 = time.perf_counter()
    result = field_sweep(SYS, params, B_GRID, t_max=1200.0, dt=1e-3,
                         quad_stride=20)
    return SimpleNamespace(result=result, seconds=time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# 1-3: bound verdicts

def test_acceptance_01_ozawa_violation_b1(b1_run):
    """Haberkorn dynamics from |S>⊗|⇑> must break the Ozawa bound by >0.01 nat."""
    v = b1_run.report.max_violation
    ok = v > 0.01 and b1_run.seconds < 1.0
    assert _report(1, ok,
                   f"max(S_final - S_initial) = {v:.4f} nat (> 0.01 required), "
                   f"verdict {b1_run.report.ozawa_verdict}, "
                   f"runtime {b1_run.seconds:.2f}s (< 1 s)"), v


def test_acceptance_02_ozawa_violation_b2(b2_run):
    """Same rates, gamma = 0, mixed-triplet start: still a violation verdict."""
    rep = b2_run.report
    ok = (not rep.ozawa_ok) and b2_run.seconds < 1.0
    assert _report(2, ok,
                   f"verdict {rep.ozawa_verdict} "
                   f"(max violation {rep.max_violation:.4f} nat), "
                   f"runtime {b2_run.seconds:.2f}s (< 1 s)"), rep


def test_acceptance_03_kominis_bounds(kominis_runs):
    """Kominis dynamics satisfies Ozawa and Lanford-Robinson at every sample.

    S_final <= S_initial + 1e-9 and 0 <= dS <= H[q_S] + 1e-9 pointwise,
    for both the singlet-born and mixed-triplet scenarios.
    """
    tol = 1e-9
    parts, ok = [], True
    for tag, run in kominis_runs.items():
        tr = run.report.trace
        ozawa = float((tr.s_final - tr.s_initial).max())
        lower = float(tr.delta_s.min())
        upper = float((tr.delta_s - tr.h_shannon).max())
        ok &= ozawa <= tol and lower >= -tol and upper <= tol
        parts.append(f"{tag}: max(S_f-S_i)={ozawa:.2e}, min dS={lower:.2e}, "
                     f"max(dS-H)={upper:.2e}")
    assert _report(3, ok, "; ".join(parts) + f" (tol {tol:g})"), parts


# ---------------------------------------------------------------------------
# 4: quoted-number check (currently FAIL)

def test_acceptance_04_entropies_at_t100(b1_run):
    """Both reported entropies at t = 100/A should be 0.05*ln(8) +/- 30%.

    Measured: S_final(100) = 0.0926 sits inside the [0.0728, 0.1352] band but
    S_initial(100) = 0.0653 undershoots it.  The 0.05*ln(8) estimate treats
    the state at t = 100 as a 0.95/0.05 mixture of a pure state with the
    maximally mixed 1/8, as if every bit of relaxation-fed admixture survived.
    It does not: the triplet channel reacts twenty times faster than the
    singlet channel (k_T = 20 k_S), so most of the gamma-injected triplet
    weight is drained before t = 100 and the surviving pre-measurement state
    is purer than the estimate assumes.  (A literal 0.95/0.05 mixture would
    have entropy 0.265 nat, not 0.104 — the band only makes sense for the
    post-measurement side, which indeed lands inside it.)
    """
    tr = b1_run.report.trace
    center = 0.05 * np.log(8.0)
    lo, hi = 0.7 * center, 1.3 * center
    s_i, s_f = float(tr.s_initial[-1]), float(tr.s_final[-1])
    ok = lo <= s_i <= hi and lo <= s_f <= hi
    assert _report(4, ok,
                   f"S_initial(100)={s_i:.4f}, S_final(100)={s_f:.4f}, "
                   f"band [{lo:.4f}, {hi:.4f}] (0.05·ln8 ± 30%)"), (s_i, s_f)


# ---------------------------------------------------------------------------
# 5: gamma transition (currently FAIL)

def test_acceptance_05_gamma_ladder(ladder_rows):
    """Peak Haberkorn violation should fall along gamma = A/2000..A/5; it rises.

    Measured peak violations: 0.0997 → 0.4586 → 0.5948 → 0.6787 nat, strictly
    *increasing*, and the largest gamma peaks at 0.68 nat early in the run
    instead of reaching <= 1e-9.  Mechanism: spin relaxation feeds in
    maximally-mixed weight, whose dominant triplet branch (entropy ~ ln 6) is
    released through the fast k_T = 20 k_S channel while S_initial is still
    small, so the *transient* violation grows with gamma.  What decays with
    gamma is the *end-time* violation (+0.027, +0.133, -0.006, -0.274 nat at
    t = 100 across the ladder) — the violation->satisfaction transition is
    real but lives in the late-time value, not in the running maximum (which
    must tend to 0 only as gamma -> 0).  Kominis also shows small transient
    spikes (1.1e-4 and 1.2e-2 nat) at the middle gammas for the same reason.
    """
    hab = [r for r in ladder_rows if r.theory is Theory.HABERKORN]
    kom = [r for r in ladder_rows if r.theory is Theory.KOMINIS]
    hv = [r.max_violation for r in hab]
    decreasing = all(b < a for a, b in zip(hv, hv[1:]))
    settled = hv[-1] <= 1e-9
    kominis_ok = all(r.ozawa_ok and r.lr_ok for r in kom)
    ok = decreasing and settled and kominis_ok
    assert _report(
        5, ok,
        "Haberkorn peak violations " + " → ".join(f"{v:.4f}" for v in hv)
        + f" (decreasing: {decreasing}, last <= 1e-9: {settled}); "
        + "Kominis max violations "
        + ", ".join(f"{r.max_violation:.3e}" for r in kom)
        + f" (all pass: {kominis_ok})"), hv


# ---------------------------------------------------------------------------
# 6: equal-rates factorization

def _factorization_dev(theory, dt=1e-3, stride=10):
    """max |rho(t) - e^{-kt} R(t)| for k_S = k_T = A/20.

    R(t) integrates the reaction-free part of the same theory: unitary motion
    for Haberkorn, the singlet/triplet dephasing law for Kominis.
    """
    params = ReactionParams(k_s=K_EQ, k_t=K_EQ)
    rho0 = singlet_up_state(SYS)
    record = integrate(SYS, params, rho0, theory=theory, t_max=100.0,
                       dt=dt, stride=stride)
    ks, kt = (0.0, 0.0) if theory == "haberkorn" else (K_EQ, K_EQ)
    _, factor = integrate_nonreacting(SYS, ks, kt, rho0, t_max=100.0,
                                      dt=dt, stride=stride)
    n = min(len(record), factor.shape[0])
    decay = np.exp(-K_EQ * record.times[:n])[:, None, None]
    return float(np.abs(record.rhos[:n] - decay * factor[:n]).max())


def test_acceptance_06_equal_rates_factorization():
    devs = {t: _factorization_dev(t) for t in ("haberkorn", "kominis")}
    ok = all(d <= 1e-8 for d in devs.values())
    assert _report(6, ok,
                   ", ".join(f"{t}: max|rho - e^(-kt) R| = {d:.2e}"
                             for t, d in devs.items())
                   + " (tol 1e-8)"), devs


# ---------------------------------------------------------------------------
# 7: closed-form decay laws read off the RHS

def _rate_law_error(n_draws=100, seed=20260814):
    """Worst relative error of the block decay laws on random states.

    With H = 0, k_S = 0, gamma = 0, written in the singlet-adapted basis,
    every singlet-triplet cross element must decay at k_T/2 (Haberkorn) or
    k_T(1/2 + q_T) (Kominis), and every triplet-triplet element at k_T
    (Haberkorn) or k_T[1 + p_coh(q_T - 1)] (Kominis).
    """
    system = SpinSystem(couplings=(Coupling(1, "D", 0.0),))
    k_t = 0.2
    params = ReactionParams(k_s=0.0, k_t=k_t)
    w, n_s = singlet_adapted_transform(system)
    _, q_t_op = build_projectors(system)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_draws):
        rho = random_density(rng, dim=system.dim)
        q_t = float(np.trace(q_t_op @ rho).real / np.trace(rho).real)
        coh = p_coh(rho, system)
        targets = {
            Theory.HABERKORN: (k_t / 2.0, k_t),
            Theory.KOMINIS: (k_t * (0.5 + q_t),
                             k_t * (1.0 + coh * (q_t - 1.0))),
        }
        rho_st = w.conj().T @ rho @ w
        for theory, (rate_cross, rate_tt) in targets.items():
            d_st = w.conj().T @ rhs(rho, params, system, theory) @ w
            for rows, cols, rate in ((slice(0, n_s), slice(n_s, None), rate_cross),
                                     (slice(n_s, None), slice(n_s, None), rate_tt)):
                block = rho_st[rows, cols]
                resid = d_st[rows, cols] + rate * block
                scale = rate * np.abs(block).max()
                # uniform decay across the block...
                worst = max(worst, float(np.abs(resid).max() / scale))
                # ...and the right scalar rate
                fitted = -np.vdot(block, d_st[rows, cols]).real / np.vdot(block, block).real
                worst = max(worst, abs(fitted / rate - 1.0))
    return worst


def test_acceptance_07_decay_rate_formulas():
    err = _rate_law_error()
    ok = err <= 1e-10
    assert _report(7, ok,
                   f"worst relative error of k_T/2, k_T, k_T(1/2+q_T), "
                   f"k_T[1+p_coh(q_T-1)] over 100 random states = {err:.2e} "
                   f"(tol 1e-10)"), err


# ---------------------------------------------------------------------------
# 8: purity

def _purity_scalars(dt=1e-3, stride=10):
    rho0 = singlet_up_state(SYS)
    hab = integrate(SYS, B2, rho0, theory="haberkorn", t_max=20.0,
                    dt=dt, stride=stride)
    kom = integrate(SYS, B1, rho0, theory="kominis", t_max=20.0,
                    dt=dt, stride=stride)
    return float(np.abs(hab.purity - 1.0).max()), float(kom.purity.min())


def test_acceptance_08_purity():
    """Haberkorn with gamma = 0 keeps pure states pure; Kominis decoheres them."""
    dev, kmin = _purity_scalars()
    ok = dev <= 1e-8 and kmin < 0.999
    assert _report(8, ok,
                   f"Haberkorn max|purity - 1| = {dev:.2e} (tol 1e-8); "
                   f"Kominis min purity over t <= 20/A = {kmin:.4f} "
                   f"(< 0.999 required)"), (dev, kmin)


# ---------------------------------------------------------------------------
# 9: entropy oracles

def _oracle_errors():
    e_mixed = abs(von_neumann_entropy(maximally_mixed_state(SYS)) - np.log(8.0))
    e_triplet = abs(von_neumann_entropy(mixed_triplet_state(SYS)) - np.log(6.0))
    e_pure = von_neumann_entropy(singlet_up_state(SYS))
    return float(e_mixed), float(e_triplet), float(e_pure)


def test_acceptance_09_entropy_oracles():
    e8, e6, ep = _oracle_errors()
    ok = e8 <= 1e-12 and e6 <= 1e-12 and ep < 1e-12
    assert _report(9, ok,
                   f"|S[1/8] - ln8| = {e8:.1e}, |S[Q_T/6] - ln6| = {e6:.1e}, "
                   f"S[pure] = {ep:.1e} (all < 1e-12)"), (e8, e6, ep)


# ---------------------------------------------------------------------------
# 10-11: field effects and yield closure

def _sweep_scalars(result):
    b = result.b_grid
    ys = result.y_s
    variation = float(abs(ys[-1] - ys[0]) / ys[0])
    i_step = int(np.argmax(np.abs(np.diff(ys))))
    steepest_b = float(0.5 * (b[i_step] + b[i_step + 1]))
    in_window = lambda i: WINDOW[0] - 1e-12 <= b[i] <= WINDOW[1] + 1e-12
    dips = [i for i in local_minima(b, result.i_g) if in_window(i)]
    dip = min(dips, key=lambda i: result.i_g[i]) if dips else -1
    exts = [i for i in local_extrema(b, result.c35) if in_window(i)]
    ext = min(exts, key=lambda i: abs(b[i] - 1.0)) if exts else -1
    mask = (b >= WINDOW[0] - 1e-12) & (b <= WINDOW[1] + 1e-12)
    return {
        "ys_variation": variation,
        "steepest_b": steepest_b,
        "ig_dip_b": float(b[dip]) if dip >= 0 else np.nan,
        "ig_dip_val": float(result.i_g[dip]) if dip >= 0 else np.nan,
        "c35_ext_b": float(b[ext]) if ext >= 0 else np.nan,
        "c35_ext_val": float(result.c35[ext]) if ext >= 0 else np.nan,
        "ys_monotone_window": float(is_monotone(ys[mask])),
        "closure_max": float(np.abs(ys + result.y_t - 1.0).max()),
    }


def test_acceptance_10_field_effects(sweep201):
    s = _sweep_scalars(sweep201.result)
    ok = (s["ys_variation"] > 0.05
          and s["steepest_b"] < A
          and np.isfinite(s["ig_dip_b"])
          and np.isfinite(s["c35_ext_b"])
          and s["ys_monotone_window"] == 1.0
          and sweep201.seconds < 60.0)
    assert _report(
        10, ok,
        f"Y_S varies {s['ys_variation']:.1%} over B in [0, 3A] "
        f"(steepest at B = {s['steepest_b']:.3f} < A); "
        f"I_G local minimum at B = {s['ig_dip_b']:.3f}, "
        f"C35 local extremum at B = {s['c35_ext_b']:.3f} "
        f"(both within [0.8, 1.2], Y_S monotone there: "
        f"{bool(s['ys_monotone_window'])}); "
        f"201-point sweep in {sweep201.seconds:.1f}s (< 60 s)"), s


def test_acceptance_11_yield_closure(sweep201):
    worst = float(np.abs(sweep201.result.y_s + sweep201.result.y_t - 1.0).max())
    ok = worst <= 1e-4
    assert _report(11, ok,
                   f"max |Y_S + Y_T - 1| = {worst:.2e} over 201 fields "
                   f"(tol 1e-4)"), worst


# ---------------------------------------------------------------------------
# 12: Liouville spectrum

def _liouville_scalars(dt=1e-3, seed=7):
    superop = build_superoperator(SYS, K_EQ, K_EQ)
    rng = np.random.default_rng(seed)
    rhs_dev = max(
        float(np.abs(superop(rho) - nonreacting_rhs(rho, SYS, K_EQ, K_EQ)).max())
        for rho in (random_density(rng) for _ in range(10)))

    flat = SpinSystem(couplings=(Coupling(1, "D", 0.0),))
    spec_flat = spectrum(build_superoperator(flat, K_EQ, K_EQ))
    min_decay = min(float(spectrum(superop).decay_rates.min()),
                    float(spec_flat.decay_rates.min()))
    n_k = int(np.sum(np.abs(spec_flat.eigenvalues + K_EQ) < 1e-10))
    n_zero = int(np.sum(np.abs(spec_flat.eigenvalues) < 1e-10))

    times = np.linspace(0.0, 400.0, 41)
    states, _ = reconstruct(superop, singlet_up_state(SYS), times)
    _, direct = integrate_nonreacting(SYS, K_EQ, K_EQ, singlet_up_state(SYS),
                                      t_max=400.0, dt=dt,
                                      stride=int(round(10.0 / dt)))
    recon_dev = float(np.abs(states - direct[:len(times)]).max())
    return {"rhs_dev": rhs_dev, "min_decay": min_decay,
            "mult_minus_k": float(n_k), "mult_zero": float(n_zero),
            "recon_dev": recon_dev}


def test_acceptance_12_liouville_spectrum():
    s = _liouville_scalars()
    ok = (s["rhs_dev"] <= 1e-12
          and s["min_decay"] >= -1e-10
          and s["mult_minus_k"] == 24.0
          and s["mult_zero"] == 40.0
          and s["recon_dev"] <= 1e-6)
    assert _report(
        12, ok,
        f"max|K·rho - RHS| = {s['rhs_dev']:.1e} (tol 1e-12); "
        f"min decay rate = {s['min_decay']:.1e} (>= -1e-10); "
        f"H = 0 multiplicities: {int(s['mult_minus_k'])}×(-k), "
        f"{int(s['mult_zero'])}×0 (need 24/40); "
        f"spectral reconstruction dev = {s['recon_dev']:.1e} (tol 1e-6)"), s


# ---------------------------------------------------------------------------
# 13: dt-convergence of every scalar above

# Limit for each scalar = (its check's stated tolerance) / 10.  For banded or
# threshold checks the band half-width / threshold stands in for the
# tolerance; grid locations and multiplicities must not move at all.
_LIMITS = {
    "ozawa_violation_b1": 1e-3, "ozawa_violation_b2": 1e-3,
    "kominis_ozawa_b1": 1e-10, "kominis_ds_min_b1": 1e-10,
    "kominis_lr_b1": 1e-10,
    "kominis_ozawa_b2": 1e-10, "kominis_ds_min_b2": 1e-10,
    "kominis_lr_b2": 1e-10,
    "entropy_t100_initial": 3.12e-3, "entropy_t100_final": 3.12e-3,
    "ladder_hab_0": 1e-10, "ladder_hab_1": 1e-10,
    "ladder_hab_2": 1e-10, "ladder_hab_3": 1e-10,
    "ladder_kom_0": 1e-10, "ladder_kom_1": 1e-10,
    "ladder_kom_2": 1e-10, "ladder_kom_3": 1e-10,
    "factorization_haberkorn": 1e-9, "factorization_kominis": 1e-9,
    "rate_law_err": 1e-11,
    "purity_dev_haberkorn": 1e-9, "purity_min_kominis": 1e-4,
    "oracle_ln8": 1e-13, "oracle_ln6": 1e-13, "oracle_pure": 1e-13,
    "ys_variation": 5e-3, "steepest_b": 0.1,
    "ig_dip_b": 0.02, "ig_dip_val": 1e-4,
    "c35_ext_b": 0.02, "c35_ext_val": 1e-4,
    "ys_monotone_window": 0.5, "closure_max": 1e-5,
    "rhs_dev": 1e-13, "min_decay": 1e-11,
    "mult_minus_k": 0.5, "mult_zero": 0.5,
    "recon_dev": 1e-7,
}


def _acceptance_scalars(dt, stride, sweep_result=None):
    """Every scalar the checks above report, at one step size.

    Halving dt doubles `stride` so snapshots land on the same times; the
    field sweep keeps quad_stride = 20 so its quadrature spacing halves with
    dt.  Runtimes are machine properties, not outputs, and are excluded.
    """
    out = {}
    _, rep = _audited("haberkorn", B1, singlet_up_state(SYS), dt, stride)
    out["ozawa_violation_b1"] = rep.max_violation
    out["entropy_t100_initial"] = float(rep.trace.s_initial[-1])
    out["entropy_t100_final"] = float(rep.trace.s_final[-1])
    _, rep = _audited("haberkorn", B2, mixed_triplet_state(SYS), dt, stride)
    out["ozawa_violation_b2"] = rep.max_violation
    for tag, params, rho0 in (("b1", B1, singlet_up_state(SYS)),
                              ("b2", B2, mixed_triplet_state(SYS))):
        _, rep = _audited("kominis", params, rho0, dt, stride)
        tr = rep.trace
        out[f"kominis_ozawa_{tag}"] = float((tr.s_final - tr.s_initial).max())
        out[f"kominis_ds_min_{tag}"] = float(tr.delta_s.min())
        out[f"kominis_lr_{tag}"] = float((tr.delta_s - tr.h_shannon).max())
    rows = gamma_scan(SYS, B2, GAMMAS, t_max=100.0, dt=dt, stride=stride)
    for row in rows:
        i = GAMMAS.index(row.gamma)
        out[f"ladder_{row.theory.value[:3]}_{i}"] = row.max_violation
    for theory in ("haberkorn", "kominis"):
        out[f"factorization_{theory}"] = _factorization_dev(theory, dt, stride)
    out["rate_law_err"] = _rate_law_error(n_draws=20)
    dev, kmin = _purity_scalars(dt, stride)
    out["purity_dev_haberkorn"] = dev
    out["purity_min_kominis"] = kmin
    e8, e6, ep = _oracle_errors()
    out["oracle_ln8"], out["oracle_ln6"], out["oracle_pure"] = e8, e6, ep
    if sweep_result is None:
        params = ReactionParams(k_s=K_EQ, k_t=K_EQ)
        sweep_result = field_sweep(SYS, params, B_GRID, t_max=1200.0, dt=dt,
                                   quad_stride=20)
    out.update(_sweep_scalars(sweep_result))
    out.update(_liouville_scalars(dt))
    return out


def test_acceptance_13_dt_convergence(sweep201):
    """Halving dt moves every reported scalar by < its tolerance / 10."""
    coarse = _acceptance_scalars(1e-3, 10, sweep_result=sweep201.result)
    fine = _acceptance_scalars(5e-4, 20)
    assert set(coarse) == set(_LIMITS) == set(fine)
    diffs = {name: abs(coarse[name] - fine[name]) for name in coarse}
    failing = {n: d for n, d in diffs.items() if not d < _LIMITS[n]}
    worst = max(diffs, key=lambda n: diffs[n] / _LIMITS[n])
    ok = not failing
    detail = (f"{len(diffs)} scalars compared at dt = 1e-3 vs 5e-4; "
              f"largest shift relative to its limit: {worst} "
              f"(|Δ| = {diffs[worst]:.2e}, limit {_LIMITS[worst]:.0e})")
    if failing:
        detail += "; over limit: " + ", ".join(
            f"{n} (|Δ| = {d:.2e} vs {_LIMITS[n]:.0e})"
            for n, d in sorted(failing.items()))
    assert _report(13, ok, detail), failing
