"""Maximum-entropy reservoir states for commuting conserved observables.

Given averages v_k of observables V_k, the state of maximal entropy is
rho = exp(-mu - sum_k lambda_k V_k). The multipliers minimize the convex dual

    psi(lambda) = ln Tr exp(-sum_k lambda_k V_k) + sum_k lambda_k v_k,

whose gradient is v - <V> and whose Hessian is the covariance of the V_k in
rho (exact for commuting observables). Entropies are in nats; k_B = hbar = 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.special import logsumexp

from .errors import (
    DimensionMismatch,
    EmptyPath,
    InfeasibleTargets,
    LengthMismatch,
    NoConvergence,
    NonCommutingObservables,
    NonHermitianInput,
    ValidationError,
)

HERMITIAN_TOL = 1e-12
MAX_NEWTON_ITER = 200
DEFAULT_TOL = 1e-10
LOG_CLAMP = 1e-300
LN2 = math.log(2.0)


@dataclass(frozen=True, eq=False)
class Observable:
    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"observable {self.label!r} must be square, got shape {m.shape}")
        if m.shape[0] < 2:
            raise DimensionMismatch("observable dimension must be >= 2")
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
            raise NonHermitianInput(f"observable {self.label!r} is not Hermitian")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def spin_z(label="J_z") -> Observable:
    """J_z of a spin-1/2 with hbar = 1 (eigenvalues +-1/2)."""
    return Observable(np.diag([0.5, -0.5]), label)


def two_level_hamiltonian(gap: float, label="H") -> Observable:
    return Observable(np.diag([0.0, gap]), label)


def _as_observable(v, k=0) -> Observable:
    return v if isinstance(v, Observable) else Observable(v, f"V{k}")


def _joint_basis(mats: Sequence[np.ndarray]):
    """Common eigenbasis of commuting Hermitian matrices and their joint spectrum.

    Diagonalizes a generic real combination and checks the result diagonalizes
    every matrix. Returns (U, spectrum) with spectrum[k, j] the eigenvalue of
    V_k on basis vector j.
    """
    # irrational weights avoid accidental degeneracies of the combination
    weights = [math.sqrt(2.0 + 3 * k) - math.floor(math.sqrt(2.0 + 3 * k)) + 0.1 for k in range(len(mats))]
    combo = sum(w * m for w, m in zip(weights, mats))
    _, U = np.linalg.eigh(combo)
    spectrum = np.empty((len(mats), U.shape[0]))
    for k, m in enumerate(mats):
        d = U.conj().T @ m @ U
        scale = max(1.0, float(np.max(np.abs(m))))
        off = d - np.diag(np.diag(d))
        if np.max(np.abs(off)) > 1e-9 * scale:
            raise NonCommutingObservables("observables must mutually commute")
        spectrum[k] = np.diag(d).real
    return U, spectrum


@dataclass(frozen=True, eq=False)
class MaxEntProblem:
    observables: tuple
    targets: np.ndarray

    def __post_init__(self):
        obs = tuple(_as_observable(v, k) for k, v in enumerate(self.observables))
        t = np.asarray(self.targets, dtype=np.float64).ravel()
        if not obs:
            raise ValidationError("at least one observable is required")
        if len(obs) != t.size:
            raise DimensionMismatch(f"{len(obs)} observables but {t.size} targets")
        dims = {o.dim for o in obs}
        if len(dims) != 1:
            raise DimensionMismatch(f"observables have differing dimensions {sorted(dims)}")
        if not np.all(np.isfinite(t)):
            raise ValidationError("targets must be finite")
        mats = [o.matrix for o in obs]
        for i in range(len(mats)):
            for j in range(i + 1, len(mats)):
                c = mats[i] @ mats[j] - mats[j] @ mats[i]
                if np.max(np.abs(c)) > 1e-9 * max(1.0, np.max(np.abs(mats[i])) * np.max(np.abs(mats[j]))):
                    raise NonCommutingObservables(
                        f"observables {obs[i].label!r} and {obs[j].label!r} do not commute"
                    )
        object.__setattr__(self, "observables", obs)
        object.__setattr__(self, "targets", t)

    @property
    def dim(self) -> int:
        return self.observables[0].dim


@dataclass(frozen=True, eq=False)
class MaxEntState:
    multipliers: np.ndarray
    log_partition: float
    rho: np.ndarray
    entropy_nats: float
    averages: np.ndarray = field(repr=False)
    populations: np.ndarray = field(repr=False)
    iterations: int = 0


def _gibbs_weights(spectrum, lam):
    """Populations and log partition function for joint spectrum and multipliers."""
    logits = -(lam @ spectrum)
    mu = float(logsumexp(logits))
    return np.exp(logits - mu), mu


def dual(problem: MaxEntProblem, multipliers) -> float:
    """psi(lambda) = ln Tr exp(-sum lambda_k V_k) + sum lambda_k v_k."""
    _, spectrum = _joint_basis([o.matrix for o in problem.observables])
    lam = np.asarray(multipliers, dtype=np.float64)
    _, mu = _gibbs_weights(spectrum, lam)
    return mu + float(lam @ problem.targets)


def _check_feasible(spectrum, targets):
    """Targets must be a strictly positive mixture of joint eigenvalue tuples."""
    K, d = spectrum.shape
    # variables: w_1..w_d, s ; maximize s subject to A w = v, sum w = 1, w_j >= s
    c = np.zeros(d + 1)
    c[-1] = -1.0
    A_eq = np.zeros((K + 1, d + 1))
    A_eq[:K, :d] = spectrum
    A_eq[K, :d] = 1.0
    b_eq = np.concatenate([targets, [1.0]])
    A_ub = np.hstack([-np.eye(d), np.ones((d, 1))])
    b_ub = np.zeros(d)
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                  bounds=[(0, None)] * d + [(None, 1.0 / d)], method="highs")
    if res.status != 0 or -res.fun <= 1e-12:
        raise InfeasibleTargets(
            "targets are not strictly inside the convex hull of the joint spectrum"
        )


def _build_state(U, spectrum, lam, iterations=0) -> MaxEntState:
    pops, mu = _gibbs_weights(spectrum, lam)
    rho = (U * pops) @ U.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    avgs = spectrum @ pops
    S = mu + float(lam @ avgs)
    return MaxEntState(np.array(lam, dtype=np.float64), mu, rho, S, avgs, pops, iterations)


def state_from_multipliers(observables, multipliers) -> MaxEntState:
    """Gibbs-like state exp(-mu - sum lambda_k V_k) for given multipliers."""
    mats = [_as_observable(v, k).matrix for k, v in enumerate(observables)]
    lam = np.asarray(multipliers, dtype=np.float64)
    if lam.size != len(mats):
        raise LengthMismatch("one multiplier per observable is required")
    U, spectrum = _joint_basis(mats)
    return _build_state(U, spectrum, lam)


def solve_maxent(problem: MaxEntProblem, tol: float = DEFAULT_TOL, max_iter: int = MAX_NEWTON_ITER) -> MaxEntState:
    """Damped Newton on the dual with a backtracking line search."""
    if not tol > 0:
        raise ValidationError("tol must be > 0")
    U, spectrum = _joint_basis([o.matrix for o in problem.observables])
    v = problem.targets
    _check_feasible(spectrum, v)

    def evaluate(lam):
        pops, mu = _gibbs_weights(spectrum, lam)
        avg = spectrum @ pops
        return mu + float(lam @ v), v - avg, pops, avg

    lam = np.zeros(v.size)
    psi, grad, pops, avg = evaluate(lam)
    for it in range(1, max_iter + 1):
        if np.max(np.abs(grad)) <= tol:
            # one extra Newton step costs nothing and sharpens the multipliers
            centered = spectrum - avg[:, None]
            hess = (centered * pops) @ centered.T
            step = np.linalg.lstsq(hess, -grad, rcond=1e-13)[0]
            cand = lam + step
            psi_c, grad_c, _, _ = evaluate(cand)
            if np.max(np.abs(grad_c)) < np.max(np.abs(grad)):
                lam = cand
            return _build_state(U, spectrum, lam, it)
        centered = spectrum - avg[:, None]
        hess = (centered * pops) @ centered.T
        step = np.linalg.lstsq(hess, -grad, rcond=1e-13)[0]
        slope = float(grad @ step)
        t = 1.0
        # near the optimum the decrease in psi drops below round-off
        slack = 8 * np.finfo(float).eps * max(1.0, abs(psi))
        while True:
            cand = lam + t * step
            psi_c, grad_c, pops_c, avg_c = evaluate(cand)
            if psi_c <= psi + 1e-4 * t * slope + slack or t < 1e-12:
                break
            t *= 0.5
        lam, psi, grad, pops, avg = cand, psi_c, grad_c, pops_c, avg_c
    residual = float(np.max(np.abs(grad)))
    raise NoConvergence(f"Newton iteration cap {max_iter} hit, residual {residual:.3e}", residual)


def von_neumann_entropy(rho) -> float:
    """-Tr(rho ln rho) with 0 ln 0 = 0."""
    w = np.linalg.eigvalsh(np.asarray(rho, dtype=np.complex128))
    w = w[w > LOG_CLAMP]
    return float(-np.sum(w * np.log(w)))


def shannon_entropy(state: MaxEntState) -> float:
    """mu + sum_k lambda_k <V_k>, in nats."""
    return state.log_partition + float(state.multipliers @ state.averages)


@dataclass(frozen=True, eq=False)
class HeatDecomposition:
    """Per-step, per-observable internal energy, work and heat changes.

    Arrays have shape (steps, K). ``dU = dW + dQ`` holds exactly for every
    entry: dQ is formed from the change in expectation and dU rebuilt from the
    parts.
    """

    dU: np.ndarray
    dW: np.ndarray
    dQ: np.ndarray

    @property
    def total_dU(self) -> np.ndarray:
        return np.array([math.fsum(c) for c in self.dU.T])

    @property
    def total_dW(self) -> np.ndarray:
        return np.array([math.fsum(c) for c in self.dW.T])

    @property
    def total_dQ(self) -> np.ndarray:
        return np.array([math.fsum(c) for c in self.dQ.T])


def heat_decomposition(path) -> HeatDecomposition:
    """First-law split along a path of (observables, rho) points.

    Per step: dU = <V'>_{rho'} - <V>_rho, dW = <V' - V>_rho evaluated in the
    prior state, dQ = dU - dW.
    """
    path = list(path)
    if len(path) < 2:
        raise EmptyPath("a path needs at least two points")
    V = []
    R = []
    for obs, rho in path:
        mats = [_as_observable(o, k).matrix if not isinstance(o, np.ndarray) else np.asarray(o, dtype=np.complex128)
                for k, o in enumerate(obs)]
        V.append(np.stack(mats))
        R.append(np.asarray(rho, dtype=np.complex128))
    shapes = {v.shape for v in V}
    if len(shapes) != 1:
        raise DimensionMismatch("observable sets differ in size or dimension along the path")
    d = V[0].shape[-1]
    if any(r.shape != (d, d) for r in R):
        raise DimensionMismatch("density matrix dimension does not match observables")
    V = np.stack(V)
    R = np.stack(R)
    expect = np.einsum("tkij,tji->tk", V, R).real
    dU_raw = np.diff(expect, axis=0)
    dW = np.einsum("tkij,tji->tk", np.diff(V, axis=0), R[:-1]).real
    dQ = dU_raw - dW
    return HeatDecomposition(dW + dQ, dW, dQ)


def erasure_cost_margin(multipliers, heats, bits: float = 1.0) -> float:
    """sum_k lambda_k dQ_k - bits ln 2; non-negative when the erasure bound holds."""
    lam = np.atleast_1d(np.asarray(multipliers, dtype=np.float64))
    q = np.atleast_1d(np.asarray(heats, dtype=np.float64))
    if lam.shape != q.shape:
        raise LengthMismatch(f"{lam.size} multipliers but {q.size} heats")
    if not bits > 0:
        raise ValidationError("bits must be > 0")
    return math.fsum(lam * q) - bits * LN2


# JSON layout: matrices as nested rows of [re, im] pairs


def matrix_to_json(m) -> list:
    m = np.asarray(m, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(data) -> np.ndarray:
    a = np.asarray(data, dtype=np.float64)
    if a.ndim == 2 and a.shape[1] == 2:
        d = int(round(math.sqrt(a.shape[0])))
        if d * d != a.shape[0]:
            raise DimensionMismatch("flat matrix data is not square")
        a = a.reshape(d, d, 2)
    if a.ndim != 3 or a.shape[2] != 2:
        raise DimensionMismatch("matrix must be rows of [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


def problem_to_dict(problem: MaxEntProblem) -> dict:
    return {
        "observables": [{"label": o.label, "matrix": matrix_to_json(o.matrix)} for o in problem.observables],
        "targets": problem.targets.tolist(),
    }


def problem_from_dict(data) -> MaxEntProblem:
    obs = [Observable(matrix_from_json(o["matrix"]), o.get("label", f"V{k}"))
           for k, o in enumerate(data["observables"])]
    return MaxEntProblem(tuple(obs), data["targets"])


def state_to_dict(state: MaxEntState) -> dict:
    return {
        "multipliers": state.multipliers.tolist(),
        "log_partition": state.log_partition,
        "entropy_nats": state.entropy_nats,
        "averages": state.averages.tolist(),
        "rho": matrix_to_json(state.rho),
        "iterations": state.iterations,
    }
