"""Acceptance checks, one per criterion; results are listed in the terminal summary."""
import math
import time

import numpy as np
import pytest

from eraserlab import central_spin as cs
from eraserlab import energy as en
from eraserlab import engine as eg
from eraserlab import maxent as me
from eraserlab import spin

LN2 = math.log(2)
SPIN_GAMMAS = [0.05, 0.1, 0.5, 1.0, 2.0, 5.0]

# independent brute-force results at gamma*hbar = 1 (2^20 enumerated factor outcomes)
ORACLE_MEAN_L_GAMMA1 = 0.6952220944
ORACLE_A_GAMMA1 = 1.204824214809825


def spin_cfg(gamma, reset="reset_low"):
    return spin.SpinProtocolConfig(spin.SpinReservoir(gamma), reset_convention=reset)


def test_ac01_landauer_work_and_heat(acceptance):
    t0 = time.perf_counter()
    r = en.quasistatic_erase(en.default_schedule(20000, 25.0, beta=1.0), en.ThermalModel(1.0))
    dt = time.perf_counter() - t0
    ok = abs(r.work - LN2) < 1e-3 and abs(r.heat_to_reservoir - LN2) < 1e-3 and dt < 1.0
    acceptance("AC1 quasi-static work/heat = ln2", ok,
               f"W={r.work:.6f} Q_R={r.heat_to_reservoir:.6f} t={dt:.3f}s")
    assert ok


def test_ac02_jarzynski(acceptance):
    t0 = time.perf_counter()
    rng = np.random.default_rng(20240601)
    worst_exact, worst_z = 0.0, 0.0
    for k in range(50):
        n = int(rng.integers(1, 21))
        sched = en.GapSchedule(np.concatenate([[0.0], np.sort(rng.uniform(0, 4, n))]))
        beta = float(rng.uniform(0.5, 2.0))
        m = en.ThermalModel(beta)
        z = en.partition_ratio(sched, m)
        ex = en.work_distribution_exact(sched, m)
        worst_exact = max(worst_exact, abs(en.jarzynski_check(ex.work, beta, z)))
        b = en.sample_trajectories(sched, m, 100_000, seed=1000 + k)
        x = np.exp(-beta * b.work)
        se = x.std(ddof=1) / math.sqrt(x.size)
        worst_z = max(worst_z, abs(x.mean() - z) / se if se > 0 else 0.0)
    dt = time.perf_counter() - t0
    ok = worst_exact < 1e-12 and worst_z < 3.0 and dt < 10.0
    acceptance("AC2 Jarzynski equality (exact + MC)", ok,
               f"max|exact dev|={worst_exact:.1e} max MC z={worst_z:.2f} t={dt:.2f}s")
    assert ok


def test_ac03_landauer_tail(acceptance):
    sched = en.default_schedule(20, beta=1.0)
    heat = en.work_distribution_exact(sched, en.ThermalModel(1.0)).heat_to_reservoir
    worst = 0.0
    ok = True
    for eps in np.arange(1, 11) / 10:
        P, bound = en.landauer_violation_tail(heat, 1.0, float(eps))
        ok &= P < bound
        worst = max(worst, P / bound)
    acceptance("AC3 heat tail P(Q_R < ln2 - eps) < e^-eps", ok, f"max P/bound={worst:.3f}")
    assert ok


def test_ac04_jarzynski_like(acceptance):
    devs = {}
    for g in SPIN_GAMMAS:
        c = spin_cfg(g)
        r = spin.jarzynski_like_check(spin.exact_spinlabor_distribution(c), c.reservoir)
        devs[g] = abs(r.lhs - r.A)
    A1 = spin.jarzynski_like_constant(spin.SpinReservoir(1.0))
    ok = max(devs.values()) < 1e-9 and abs(A1 - ORACLE_A_GAMMA1) < 1e-14 and round(A1, 6) in (1.204824, 1.204825)
    acceptance("AC4 exponential spinlabor identity", ok, f"max|lhs-A|={max(devs.values()):.1e} A(1)={A1:.7f}")
    assert ok


def test_ac05_spinlabor_bound(acceptance):
    rows = []
    for g in SPIN_GAMMAS:
        mean = spin.exact_spinlabor_distribution(spin_cfg(g)).mean()
        rows.append((g, mean, LN2 / g))
    failing = [g for g, m, b in rows if not m >= b]
    at1 = next(m for g, m, _ in rows if g == 1.0)
    oracle_ok = abs(at1 - ORACLE_MEAN_L_GAMMA1) < 1e-8
    ok = not failing and oracle_ok
    detail = f"<L_s>(1)={at1:.6f} vs {LN2:.6f}; " + ", ".join(
        f"g={g}: {m:.4f}{'>=' if m >= b else '<'}{b:.4f}" for g, m, b in rows)
    acceptance("AC5 mean spinlabor >= ln2/gamma", ok, detail)
    assert oracle_ok
    assert not failing, f"mean spinlabor below ln2/gamma at gamma={failing}"


def _critical_eps(dist, gamma):
    """eps = 0 plus each eps where a lattice point enters the tail (bound is largest there)."""
    thr = LN2 / gamma
    pts = [thr - v for v in dist.values if v <= thr + 1e-12]
    return sorted({0.0, *[max(p, 0.0) for p in pts]})


def test_ac06a_tail_bound_A(acceptance):
    worst = 0.0
    ok = True
    for g in SPIN_GAMMAS:
        c = spin_cfg(g)
        d = spin.exact_spinlabor_distribution(c)
        grid = np.concatenate([_critical_eps(d, g), np.linspace(0, 5 * LN2 / g + 5, 400)])
        for eps in grid:
            t = spin.violation_tail(d, c.reservoir, float(eps))
            ok &= t.P <= t.bound_A
            worst = max(worst, t.P / t.bound_A)
    acceptance("AC6a spinlabor tail <= A e^(-gamma eps)", ok, f"max P/bound={worst:.3f}")
    assert ok


def test_ac06b_tail_bound_tight(acceptance):
    worst = {}
    for g in (0.1, 0.5, 0.9):
        c = spin_cfg(g)
        d = spin.exact_spinlabor_distribution(c)
        r = 0.0
        for eps in np.round(np.arange(1, 21) / 10, 10):
            t = spin.violation_tail(d, c.reservoir, float(eps))
            r = max(r, t.P / t.bound_tight)
        worst[g] = r
    ok = all(r <= 1.0 for r in worst.values())
    acceptance("AC6b spinlabor tail <= C e^(-sqrt(gamma/hbar) eps)", ok,
               ", ".join(f"g={g}: max P/bound={r:.3f}" for g, r in worst.items()))
    assert ok, f"tail exceeds C e^(-sqrt(gamma) eps): {worst}"


def test_ac07_first_law(acceptance):
    exact = True
    bound_ok = True
    for g in SPIN_GAMMAS:
        for reset, sign in (("reset_high", -1), ("reset_low", +1)):
            c = spin_cfg(g, reset)
            d = spin.exact_spinlabor_distribution(c)
            for L in d.values:
                led = spin.first_law_ledger(float(L), c)
                exact &= led.spintherm_to_reservoir == float(L) + sign * 0.5
        c = spin_cfg(g)
        bound_ok &= spin.mean_spintherm(spin.exact_spinlabor_distribution(c), c) >= LN2 / g
    ok = exact and bound_ok
    acceptance("AC7 spintherm ledgers and <Q_s> >= ln2/gamma (reset_low)", ok,
               f"exact={exact} bound={bound_ok}")
    assert ok


def test_ac08_central_spin(acceptance):
    t0 = time.perf_counter()
    N = 8
    bath = cs.BathSpec.uniform(N, 1.0)
    plain = cs.erase_cycle(cs.initial_state(N), bath, cycles=2, use_pulse=False)
    pulsed = cs.erase_cycle(cs.initial_state(N), bath, cycles=2, use_pulse=True)
    dt = time.perf_counter() - t0
    c1 = plain.reports[0]
    t_star = math.pi / (2 * math.sqrt(N))
    drift = max(r.jz_drift for r in plain.reports + pulsed.reports)
    fail2 = plain.reports[1].failure_branch_prob
    err2 = pulsed.reports[1].error_prob
    ok = (c1.error_prob <= 1e-10 and abs(c1.duration - t_star) < 1e-12 and drift <= 1e-10
          and abs(fail2 - 0.25) <= 1e-6 and err2 < 1e-8 and dt < 30)
    acceptance("AC8 central-spin fixed-point erasure", ok,
               f"err1={c1.error_prob:.1e} drift={drift:.1e} fail2={fail2:.6f} "
               f"err2(pulse)={err2:.1e} t={dt:.1f}s")
    assert ok


def test_ac09_maxent(acceptance):
    E = np.diag([0.0, 0.7, 2.0])
    beta = 1.3
    w = np.exp(-beta * np.diag(E))
    target = float(np.diag(E) @ w / w.sum())
    s = me.solve_maxent(me.MaxEntProblem((me.Observable(E),), [target]))
    lam_res = abs(s.multipliers[0] - beta)

    H = me.Observable(np.diag([0.0, 1.0, 0.0, 1.0]))
    Jz = me.Observable(np.diag([0.5, 0.5, -0.5, -0.5]))
    bg = np.array([1.5, 0.7])
    two = me.solve_maxent(me.MaxEntProblem((H, Jz), me.state_from_multipliers((H, Jz), bg).averages))
    ent = max(abs(me.shannon_entropy(x) - me.von_neumann_entropy(x.rho)) for x in (s, two))
    b, g = two.multipliers
    splits = [(LN2 / b, 0.0), (0.0, LN2 / g), (LN2 / (2 * b), LN2 / (2 * g))]
    margins = [me.erasure_cost_margin(two.multipliers, q) for q in splits]
    ok = lam_res < 1e-10 and ent < 1e-8 and max(abs(m) for m in margins) < 1e-9
    acceptance("AC9 MaxEnt Gibbs recovery / entropy / margins", ok,
               f"lambda res={lam_res:.1e} entropy diff={ent:.1e} max|margin|={max(abs(m) for m in margins):.1e}")
    assert ok


def test_ac10_engine(acceptance):
    ideal = eg.run_engine(eg.EngineConfig(beta=1.0, gamma=1.0, heat_per_stroke=LN2, cycles=10_000))
    eff = eg.efficiency(ideal)
    prod = eg.entropy_audit(ideal)
    cfg = eg.EngineConfig(beta=1.0, gamma=1.0, cycles=10_000, erasure_backend="spin_protocol")
    led = eg.run_engine(cfg, seed=7)
    sc = spin_cfg(1.0)
    d = spin.exact_spinlabor_distribution(sc)
    expected = spin.mean_spintherm(d, sc)
    sigma = math.sqrt(d.variance() / cfg.cycles)
    got = eg.mean_spintherm(led)
    sp_prod = eg.entropy_audit(led)
    ok = eff == 1.0 and abs(prod) < 1e-6 and sp_prod > 0 and abs(got - expected) < 3 * sigma
    acceptance("AC10 engine ledger", ok,
               f"eff={eff} dS={prod:.1e}; spin: dS={sp_prod:.1f} <Q_s>={got:.4f} vs {expected:.4f}+-{sigma:.4f}")
    assert ok
