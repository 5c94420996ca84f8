"""Command-line driver.

Every subcommand resolves its parameters as flags > ``--config`` JSON >
built-in defaults, validates all of them before doing any work, prints a
one-line summary and optionally writes one artifact atomically. Relative
``--out`` paths are placed under ``$ERASERLAB_OUTDIR`` when it is set.

Exit codes: 0 success, 2 invalid input, 3 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np

from . import __version__
from . import central_spin as cs
from . import energy, engine, maxent, spin
from .errors import NumericalError, UnknownParameter, ValidationError
from .io import atomic_write_bytes, read_json, write_csv, write_json

LN2 = math.log(2.0)
OUTDIR_ENV = "ERASERLAB_OUTDIR"
COMMON = {"seed": 0, "out": None, "workers": 1}


@dataclass
class Outcome:
    summary: str
    record: dict
    header: Optional[tuple] = None
    rows: Optional[list] = None
    obj: Any = None
    extra: dict = field(default_factory=dict)  # path -> bytes


@dataclass
class ExperimentConfig:
    kind: str
    params: dict
    seed: int = 0
    out: Optional[str] = None
    workers: int = 1


# ---------------------------------------------------------------------------
# parameter coercion


def _float(p, key, positive=False, nonneg=False, optional=False):
    v = p.get(key)
    if v is None:
        if optional:
            return None
        raise ValidationError(f"{key} is required")
    try:
        v = float(v)
    except (TypeError, ValueError):
        raise ValidationError(f"{key} must be a number, got {v!r}") from None
    if not math.isfinite(v):
        raise ValidationError(f"{key} must be finite")
    if positive and not v > 0:
        raise ValidationError(f"{key} must be > 0")
    if nonneg and v < 0:
        raise ValidationError(f"{key} must be >= 0")
    return v


def _int(p, key, minimum=None):
    v = p.get(key)
    try:
        iv = int(v)
        if iv != float(v):
            raise ValueError
    except (TypeError, ValueError):
        raise ValidationError(f"{key} must be an integer, got {v!r}") from None
    if minimum is not None and iv < minimum:
        raise ValidationError(f"{key} must be >= {minimum}")
    return iv


def _bool(p, key):
    v = p.get(key)
    if isinstance(v, str):
        if v.lower() in ("1", "true", "yes", "on"):
            return True
        if v.lower() in ("0", "false", "no", "off"):
            return False
        raise ValidationError(f"{key} must be a boolean")
    return bool(v)


def parse_grid(spec) -> list:
    """Comma list ``a,b,c`` or ``start:stop:num`` (inclusive linspace)."""
    if isinstance(spec, (list, tuple)):
        vals = list(spec)
    elif isinstance(spec, (int, float)):
        vals = [spec]
    else:
        s = str(spec).strip()
        if not s:
            vals = []
        elif ":" in s:
            parts = s.split(":")
            if len(parts) != 3:
                raise ValidationError("range grid must be start:stop:num")
            a, b = float(parts[0]), float(parts[1])
            num = int(parts[2])
            if num < 1:
                raise ValidationError("range grid needs num >= 1")
            vals = [round(float(x), 12) for x in np.linspace(a, b, num)]
        else:
            vals = [x for x in s.split(",") if x.strip()]
    try:
        out = [float(v) for v in vals]
    except (TypeError, ValueError):
        raise ValidationError(f"grid values must be numbers: {spec!r}") from None
    if not out:
        raise ValidationError("grid must not be empty")
    return out


def _g(x):
    return f"{x:.6g}"


# ---------------------------------------------------------------------------
# experiments: prepare(params, seed, workers) validates and returns run()


def _prep_maxent(p, seed, workers):
    tol = _float(p, "tol", positive=True)
    if p.get("problem"):
        try:
            problem = maxent.problem_from_dict(read_json(p["problem"]))
        except (OSError, KeyError, TypeError) as exc:
            raise ValidationError(f"cannot read problem file: {exc}") from None
    else:
        gap = _float(p, "gap", positive=True)
        target = _float(p, "target", optional=True)
        if target is None:
            beta = _float(p, "beta", positive=True)
            target = gap * energy.thermal_occupation(gap, beta)
        problem = maxent.MaxEntProblem((maxent.two_level_hamiltonian(gap),), [target])
    heats = p.get("heats")
    if heats is not None:
        heats = parse_grid(heats)
        if len(heats) != len(problem.observables):
            raise ValidationError(f"need {len(problem.observables)} heats, got {len(heats)}")

    def run():
        st = maxent.solve_maxent(problem, tol=tol)
        rec = {f"lambda_{k}": float(l) for k, l in enumerate(st.multipliers)}
        rec.update(entropy_nats=st.entropy_nats, log_partition=st.log_partition,
                   iterations=st.iterations)
        obj = maxent.state_to_dict(st)
        lam = " ".join(_g(x) for x in st.multipliers)
        summary = f"maxent: S={st.entropy_nats:.6f} nats lambda=[{lam}] iterations={st.iterations}"
        if heats is not None:
            margin = maxent.erasure_cost_margin(st.multipliers, heats)
            rec["margin"] = obj["margin"] = margin
            summary += f" margin={margin:.3e}"
        return Outcome(summary, rec, tuple(rec), [list(rec.values())], obj)

    return run


def _schedule(p):
    beta = _float(p, "beta", positive=True)
    if p.get("schedule"):
        try:
            return energy.GapSchedule.from_dict(read_json(p["schedule"])), beta
        except (OSError, KeyError, TypeError) as exc:
            raise ValidationError(f"cannot read schedule file: {exc}") from None
    emax = _float(p, "emax", positive=True, optional=True)
    return energy.default_schedule(_int(p, "steps", 1), emax, beta, _float(p, "emin", positive=True)), beta


def _prep_energy(p, seed, workers):
    sched, beta = _schedule(p)
    model = energy.ThermalModel(beta)
    runs = _int(p, "runs", 0)
    check = _bool(p, "check_jarzynski")
    if check and sched.steps > energy.MAX_ENUMERATION_STEPS:
        raise ValidationError(
            f"--check-jarzynski enumerates all paths; steps must be <= {energy.MAX_ENUMERATION_STEPS}"
        )

    def run():
        qs = energy.quasistatic_erase(sched, model)
        rec = {"W": qs.work, "Q_R": qs.heat_to_reservoir, "p_err": qs.p_err,
               "dF": energy.free_energy_change(sched, model)}
        summary = (f"erase-energy: W={qs.work:.6f} Q_R={qs.heat_to_reservoir:.6f} "
                   f"p_err={qs.p_err:.3e} (beta={_g(beta)}, steps={sched.steps})")
        if check:
            exact = energy.work_distribution_exact(sched, model)
            dev = energy.jarzynski_check(exact.work, beta, energy.partition_ratio(sched, model))
            rec["jarzynski_dev"] = dev
            summary += f" jarzynski_dev={dev:.3e}"
        header, rows = tuple(rec), [list(rec.values())]
        if runs:
            b = energy.sample_trajectories(sched, model, runs, seed, workers)
            mean = float(b.work.mean())
            se = float(b.work.std(ddof=1) / math.sqrt(runs)) if runs > 1 else float("nan")
            rec.update(W_mc=mean, W_mc_se=se)
            summary += f" W_mc={mean:.6f}+-{se:.2g}"
            header = ("seed", "W", "Q_R", "final_bit")
            rows = [[seed, w, q, int(f)] for w, q, f in zip(b.work, b.heat_to_reservoir, b.final_bit)]
        return Outcome(summary, rec, header, rows, dict(rec, schedule=sched.to_dict()))

    return run


def _spin_config(p):
    try:
        reservoir = spin.SpinReservoir(_float(p, "gamma"), _float(p, "hbar"))
        reset = spin.ResetConvention(p.get("reset"))
    except ValueError as exc:
        raise ValidationError(str(exc).split(",")[0]) from None
    return spin.SpinProtocolConfig(reservoir, _float(p, "tol", positive=True), reset)


def _prep_spin(p, seed, workers):
    cfg = _spin_config(p)
    res = cfg.reservoir
    runs = _int(p, "runs", 0)
    check = _bool(p, "check_jarzynski")

    def run():
        dist = spin.exact_spinlabor_distribution(cfg)
        jl = spin.jarzynski_like_check(dist, res)
        rec = {"mean_L_s": dist.mean(), "bound": LN2 / res.gamma,
               "mean_Q_s": spin.mean_spintherm(dist, cfg),
               "lhs": jl.lhs, "A": jl.A, "abs_dev": abs(jl.lhs - jl.A)}
        summary = (f"erase-spin: gamma={_g(res.gamma)} <L_s>={rec['mean_L_s']:.6f} "
                   f"ln2/gamma={rec['bound']:.6f}")
        if check:
            summary += f" lhs={jl.lhs:.7f} A={jl.A:.7f} |lhs-A|={rec['abs_dev']:.3e}"
        header = ("L_s", "prob")
        rows = [[v, q] for v, q in zip(dist.values, dist.probs)]
        obj = dist.to_dict()
        if runs:
            L = spin.sample_spinlabor(cfg, runs, seed, workers)
            rec.update(mean_L_s_mc=float(L.mean()))
            summary += f" <L_s>_mc={L.mean():.6f}"
            header = ("seed", "L_s")
            rows = [[seed, x] for x in L]
            obj = {"seed": seed, "L_s": L.tolist()}
        return Outcome(summary, rec, header, rows, obj)

    return run


def _prep_central(p, seed, workers):
    if p.get("bath"):
        try:
            bath = cs.BathSpec.from_dict(read_json(p["bath"]))
        except (OSError, KeyError, TypeError) as exc:
            raise ValidationError(f"cannot read bath file: {exc}") from None
    else:
        n = _int(p, "spins", 1)
        if n > cs.MAX_BATH:
            raise ValidationError(f"spins must be <= {cs.MAX_BATH}")
        bath = cs.BathSpec.uniform(n, _float(p, "coupling", positive=True))
    cycles = _int(p, "cycles", 1)
    pulse = _bool(p, "pulse")
    duration = p.get("duration")
    if duration not in ("refocus", "dominant"):
        raise ValidationError("duration must be 'refocus' or 'dominant'")
    restarts = _int(p, "restarts", 1)
    dump = p.get("dump")
    dump_path = _resolve_out(dump) if dump else None

    def run():
        res = cs.erase_cycle(cs.initial_state(bath.N), bath, cycles=cycles, use_pulse=pulse,
                             duration=duration, pulse_restarts=restarts, seed=seed)
        header = ("cycle", "error_prob", "brightness_before", "brightness_after",
                  "failure_branch_prob", "duration", "jz_drift", "memory_entropy", "bath_entropy")
        rows = [[getattr(r, h) for h in header] for r in res.reports]
        last = res.reports[-1]
        rec = {"error_prob": last.error_prob, "failure_branch_prob": last.failure_branch_prob,
               "max_jz_drift": max(r.jz_drift for r in res.reports),
               "bath_entropy": last.bath_entropy}
        errs = ",".join(f"{r.error_prob:.3e}" for r in res.reports)
        summary = (f"central-spin: N={bath.N} pulse={'on' if pulse else 'off'} "
                   f"error_prob=[{errs}] max_jz_drift={rec['max_jz_drift']:.1e}")
        obj = {"bath": bath.to_dict(), "reports": [dict(zip(header, r)) for r in rows]}
        extra = {dump_path: cs.dump_ensemble(res.final)} if dump_path else {}
        return Outcome(summary, rec, header, rows, obj, extra)

    return run


def _prep_engine(p, seed, workers):
    beta = _float(p, "beta", positive=True)
    heat = _float(p, "heat", nonneg=True, optional=True)
    cfg = engine.EngineConfig(
        beta=beta,
        gamma=_float(p, "gamma", positive=True),
        heat_per_stroke=LN2 / beta if heat is None else heat,
        erasure_backend=p.get("backend"),
        cycles=_int(p, "cycles", 1),
        hbar=_float(p, "hbar", positive=True),
        bath_spins=_int(p, "spins", 1),
    )

    def run():
        ledger = engine.run_engine(cfg, seed)
        prod = engine.entropy_audit(ledger)
        eff = engine.efficiency(ledger)
        rec = {"efficiency": eff, "entropy_production": prod,
               "mean_Q_s": engine.mean_spintherm(ledger), "cycles": len(ledger)}
        summary = (f"engine: backend={cfg.erasure_backend.value} cycles={len(ledger)} "
                   f"efficiency={eff:.6f} entropy_production={prod:.6g} <Q_s>={rec['mean_Q_s']:.6f}")
        obj = {"config": {"beta": cfg.beta, "gamma": cfg.gamma, "heat_per_stroke": cfg.heat_per_stroke,
                          "erasure_backend": cfg.erasure_backend.value, "cycles": cfg.cycles,
                          "hbar": cfg.hbar, "bath_spins": cfg.bath_spins, "seed": seed},
               "totals": ledger.totals(), **rec}
        return Outcome(summary, rec, engine.CSV_COLUMNS, list(ledger.rows()), obj)

    return run


def _prep_fluct(p, seed, workers):
    kind = p.get("kind")
    if kind not in ("spin", "energy"):
        raise ValidationError("kind must be 'spin' or 'energy'")
    eps_spec = p.get("eps")
    if eps_spec is None:
        eps_spec = "0.1:2.0:20" if kind == "spin" else "0.1:1.0:10"
    eps = parse_grid(eps_spec)
    if any(e < 0 for e in eps):
        raise ValidationError("eps must be >= 0")

    if kind == "spin":
        cfg = _spin_config(p)
        res = cfg.reservoir

        def table():
            dist = spin.exact_spinlabor_distribution(cfg)
            rows = []
            for e in eps:
                t = spin.violation_tail(dist, res, e)
                rows.append([e, t.P, t.bound_A, t.bound_tight])
            return ("eps", "P", "bound_A", "bound_tight"), rows
        label = f"spin gamma={_g(res.gamma)}"
    else:
        sched, beta = _schedule(p)
        if sched.steps > energy.MAX_ENUMERATION_STEPS:
            raise ValidationError(f"steps must be <= {energy.MAX_ENUMERATION_STEPS} for exact tails")
        model = energy.ThermalModel(beta)

        def table():
            heat = energy.work_distribution_exact(sched, model).heat_to_reservoir
            rows = []
            for e in eps:
                P, b = energy.landauer_violation_tail(heat, beta, e)
                rows.append([e, P, b, None])
            return ("eps", "P", "bound", "bound_tight"), rows
        label = f"energy beta={_g(beta)} steps={sched.steps}"

    def run():
        header, rows = table()
        bad = sum(1 for r in rows if r[1] > r[2])
        bad_t = sum(1 for r in rows if r[3] is not None and r[1] > r[3])
        ratio = max((r[1] / r[2] if r[2] > 0 else math.inf) for r in rows)
        if len(rows) == 1:
            rec = dict(zip(header, rows[0]))
            rec.pop("eps")
        else:
            rec = {"violations": bad, "violations_tight": bad_t, "max_ratio": ratio}
        summary = f"fluct: {label} violations={bad}/{len(rows)}"
        if any(r[3] is not None for r in rows):
            summary += f" tight_violations={bad_t}/{len(rows)}"
        summary += f" max P/bound={ratio:.4f}"
        if kind == "energy":
            header = header[:3]
            rows = [r[:3] for r in rows]
        obj = {"columns": list(header), "rows": rows}
        return Outcome(summary, rec, header, rows, obj)

    return run


EXPERIMENTS: dict[str, tuple[dict, Callable]] = {
    "maxent": ({"problem": None, "gap": 1.0, "target": None, "beta": 1.0, "tol": 1e-10,
                "heats": None}, _prep_maxent),
    "erase-energy": ({"beta": 1.0, "emax": None, "steps": 20000, "emin": 1e-3, "runs": 0,
                      "schedule": None, "check_jarzynski": False}, _prep_energy),
    "erase-spin": ({"gamma": 1.0, "hbar": 1.0, "tol": 1e-15, "reset": "reset_low", "runs": 0,
                    "check_jarzynski": False}, _prep_spin),
    "central-spin": ({"spins": 8, "coupling": 1.0, "bath": None, "cycles": 2, "pulse": False,
                      "duration": "refocus", "restarts": 10, "dump": None}, _prep_central),
    "engine": ({"beta": 1.0, "gamma": 1.0, "heat": None, "backend": "ideal_bound",
                "cycles": 1000, "hbar": 1.0, "spins": 8}, _prep_engine),
    "fluct": ({"kind": "spin", "gamma": 1.0, "hbar": 1.0, "tol": 1e-15, "reset": "reset_low",
               "eps": None, "beta": 1.0, "steps": 20, "emax": None, "emin": 1e-3,
               "schedule": None}, _prep_fluct),
}


# ---------------------------------------------------------------------------
# sweep


def _point_seed(seed, i):
    return int(np.random.SeedSequence([seed, i]).generate_state(1)[0])


def _prep_sweep(p, seed, workers):
    experiment = p.get("experiment")
    if experiment not in EXPERIMENTS:
        raise ValidationError(f"experiment must be one of {', '.join(EXPERIMENTS)}")
    defaults, prep = EXPERIMENTS[experiment]
    parameter = p.get("parameter")
    if parameter not in defaults:
        raise UnknownParameter(
            f"{parameter!r} is not a parameter of {experiment} "
            f"(choose from {', '.join(sorted(defaults))})"
        )
    grid = parse_grid(p.get("grid", ""))
    base = dict(defaults)
    extra = p.get("params") or {}
    _check_keys(extra, defaults, experiment)
    base.update(extra)
    # validate every point before running any
    runners = []
    for i, v in enumerate(grid):
        q = dict(base)
        q[parameter] = [v] if parameter == "eps" else v
        runners.append(prep(q, _point_seed(seed, i), 1))

    def run():
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                outs = list(pool.map(lambda r: r(), runners))
        else:
            outs = [r() for r in runners]
        cols = [parameter] + list(outs[0].record)
        rows = [[v] + [o.record.get(c) for c in cols[1:]] for v, o in zip(grid, outs)]
        summary = f"sweep: {experiment} {parameter} over {len(grid)} points"
        if experiment == "erase-spin" and "abs_dev" in cols:
            summary += f" max |lhs-A|={max(o.record['abs_dev'] for o in outs):.3e}"
        if experiment == "fluct" and "P" in cols:
            bad = sum(1 for o in outs if o.record["P"] > o.record.get("bound_A", o.record.get("bound")))
            summary += f" violations={bad}/{len(grid)}"
        obj = {"experiment": experiment, "parameter": parameter, "columns": cols, "rows": rows}
        return Outcome(summary, {}, tuple(cols), rows, obj)

    return run


# ---------------------------------------------------------------------------
# config resolution and run


def _check_keys(params, allowed, kind):
    unknown = sorted(set(params) - set(allowed))
    if unknown:
        raise UnknownParameter(f"unknown parameter(s) for {kind}: {', '.join(unknown)}")


def _normalize(d):
    return {k.replace("-", "_"): v for k, v in d.items()}


def _resolve_out(out) -> Path:
    path = Path(out)
    base = os.environ.get(OUTDIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    if not path.parent.is_dir():
        raise ValidationError(f"output directory {str(path.parent)!r} does not exist")
    return path


SWEEP_KEYS = {"experiment": None, "parameter": None, "grid": "", "params": None}


def build_config(kind: str, flags: dict, config_file: Optional[str] = None) -> ExperimentConfig:
    """Merge defaults < config file < flags into an ExperimentConfig."""
    defaults = dict(SWEEP_KEYS) if kind == "sweep" else dict(EXPERIMENTS[kind][0])
    merged = dict(COMMON, **defaults)
    if config_file:
        try:
            data = read_json(config_file)
        except (OSError, ValueError) as exc:
            raise ValidationError(f"cannot read config {config_file!r}: {exc}") from None
        if not isinstance(data, dict):
            raise ValidationError("config file must hold a JSON object")
        data = _normalize(data)
        file_kind = data.pop("kind", kind)
        if file_kind != kind:
            raise ValidationError(f"config is for {file_kind!r}, not {kind!r}")
        _check_keys(data, merged, kind)
        merged.update(data)
    merged.update(_normalize(flags))
    seed = _int(merged, "seed", 0)
    workers = _int(merged, "workers", 1)
    out = merged.pop("out")
    for k in COMMON:
        merged.pop(k, None)
    return ExperimentConfig(kind, merged, seed, out, workers)


def _prepare(config: ExperimentConfig):
    if config.kind == "sweep":
        return _prep_sweep(config.params, config.seed, config.workers)
    return EXPERIMENTS[config.kind][1](config.params, config.seed, config.workers)


def execute(config: ExperimentConfig) -> Outcome:
    """Validate, run and write artifacts; raises on failure."""
    out = _resolve_out(config.out) if config.out else None
    runner = _prepare(config)
    outcome = runner()
    if out is not None:
        if out.suffix.lower() == ".json":
            write_json(out, outcome.obj)
        else:
            write_csv(out, outcome.header, outcome.rows)
    for path, data in outcome.extra.items():
        atomic_write_bytes(path, data)
    return outcome


def run(config: ExperimentConfig, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        outcome = execute(config)
    except ValidationError as exc:
        print(f"eraserlab: error: {exc}", file=stderr)
        return 2
    except NumericalError as exc:
        print(f"eraserlab: numerical failure: {exc}", file=stderr)
        return 3
    except OSError as exc:
        print(f"eraserlab: error: {exc}", file=stderr)
        return 2
    print(outcome.summary, file=stdout)
    return 0


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, help="master seed (default 0)")
    common.add_argument("--out", help=".csv or .json artifact path")
    common.add_argument("--config", dest="config_file", help="JSON parameter file")
    common.add_argument("--workers", type=int, help="worker threads (default 1)")

    ap = argparse.ArgumentParser(prog="eraserlab", description="Information-erasure thermodynamics toolkit.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, help_):
        return sub.add_parser(name, parents=[common], help=help_, argument_default=argparse.SUPPRESS)

    s = add("maxent", "solve a maximum-entropy problem")
    s.add_argument("--problem", help="problem JSON (observables + targets)")
    s.add_argument("--gap", type=float, help="two-level gap when no problem file is given")
    s.add_argument("--target", type=float, help="target <H>; defaults to the thermal value at --beta")
    s.add_argument("--beta", type=float)
    s.add_argument("--tol", type=float)
    s.add_argument("--heats", help="comma list of heats for the erasure-cost margin")

    s = add("erase-energy", "quasi-static and stochastic erasure into a heat bath")
    s.add_argument("--beta", type=float)
    s.add_argument("--emax", type=float, help="final gap (default 25/beta)")
    s.add_argument("--emin", type=float, help="end of the initial linear ramp")
    s.add_argument("--steps", type=int)
    s.add_argument("--schedule", help="schedule JSON {energies: [...]}")
    s.add_argument("--runs", type=int, help="Monte Carlo trajectories to sample")
    s.add_argument("--check-jarzynski", action="store_true")

    s = add("erase-spin", "spinlabor statistics of erasure into a spin reservoir")
    s.add_argument("--gamma", type=float)
    s.add_argument("--hbar", type=float)
    s.add_argument("--tol", type=float, help="truncation tolerance for the step factors")
    s.add_argument("--reset", choices=["reset_low", "reset_high"])
    s.add_argument("--runs", type=int)
    s.add_argument("--check-jarzynski", action="store_true")

    s = add("central-spin", "repeated erasure of a central spin into a spin bath")
    s.add_argument("--spins", type=int)
    s.add_argument("--coupling", type=float)
    s.add_argument("--bath", help="bath JSON {couplings: [...]} or {N, g}")
    s.add_argument("--cycles", type=int)
    s.add_argument("--pulse", action=argparse.BooleanOptionalAction)
    s.add_argument("--duration", choices=["refocus", "dominant"])
    s.add_argument("--restarts", type=int)
    s.add_argument("--dump", help="write the final ensemble in binary form")

    s = add("engine", "spin-heat engine ledger")
    s.add_argument("--beta", type=float)
    s.add_argument("--gamma", type=float)
    s.add_argument("--heat", type=float, help="heat per stroke (default ln2/beta)")
    s.add_argument("--backend", choices=[b.value for b in engine.Backend])
    s.add_argument("--cycles", type=int)
    s.add_argument("--hbar", type=float)
    s.add_argument("--spins", type=int, help="bath size for the central_spin backend")

    s = add("fluct", "fluctuation-bound tail tables")
    s.add_argument("--kind", choices=["spin", "energy"])
    s.add_argument("--gamma", type=float)
    s.add_argument("--hbar", type=float)
    s.add_argument("--tol", type=float)
    s.add_argument("--reset", choices=["reset_low", "reset_high"])
    s.add_argument("--eps", help="comma list or start:stop:num")
    s.add_argument("--beta", type=float)
    s.add_argument("--steps", type=int)
    s.add_argument("--emax", type=float)
    s.add_argument("--emin", type=float)
    s.add_argument("--schedule")

    s = add("sweep", "tabulate one experiment over a parameter grid")
    s.add_argument("--experiment", choices=list(EXPERIMENTS))
    s.add_argument("--parameter")
    s.add_argument("--grid", help="comma list or start:stop:num")
    s.add_argument("--set", dest="params", action="append", metavar="KEY=VALUE",
                   help="fixed experiment parameter")
    return ap


def _parse_sets(items):
    out = {}
    for item in items or []:
        if "=" not in item:
            raise ValidationError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip().replace("-", "_")] = v
    return out


def main(argv=None) -> int:
    ns = vars(_parser().parse_args(argv))
    kind = ns.pop("command")
    config_file = ns.pop("config_file", None)
    try:
        if kind == "sweep" and "params" in ns:
            ns["params"] = _parse_sets(ns["params"])
        config = build_config(kind, ns, config_file)
    except ValidationError as exc:
        print(f"eraserlab: error: {exc}", file=sys.stderr)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
