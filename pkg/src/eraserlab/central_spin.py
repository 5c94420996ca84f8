"""Central-spin erasure by partial fixed-point evolution.

A memory spin exchanges angular momentum with N bath spins through the
flip-flop Hamiltonian

    H = sum_k g_k (s+_M s-_k + s-_M s+_k),

where a bath "magnon" is a flipped (down) bath spin. H conserves the number
of excitations D = n + [memory down], so states are stored per
(memory, n) sector with one amplitude per n-subset of flipped bath spins,
ordered as ``itertools.combinations(range(N), n)``. Block D couples
(up, D) with (down, D - 1) through the matrix B_D[S, T] = g_k for S = T + {k}.

Mixed states are ensembles of orthogonal pure branches with explicit
probabilities. Binary state dumps use the layout documented in
:func:`dump_state`.
"""
from __future__ import annotations

import io
import itertools
import math
import struct
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Optional

import numpy as np
from scipy import sparse
from scipy.optimize import minimize_scalar
from scipy.sparse.linalg import expm_multiply

from .errors import (
    DimensionOverflow,
    InvalidState,
    LengthMismatch,
    NoUpSectorSupport,
    ValidationError,
)

UP = "up"
DOWN = "down"
MAX_BATH = 16
DENSE_LIMIT_N = 12
MAX_BLOCK_DIM = 1 << 16
NORM_TOL = 1e-12


@dataclass(frozen=True)
class BathSpec:
    couplings: tuple
    max_spins: int = MAX_BATH

    def __post_init__(self):
        g = tuple(float(x) for x in self.couplings)
        if len(g) < 1:
            raise ValidationError("bath needs at least one spin")
        if len(g) > self.max_spins:
            raise DimensionOverflow(f"N={len(g)} exceeds the configured maximum {self.max_spins}")
        if not all(math.isfinite(x) and x > 0 for x in g):
            raise ValidationError("couplings must be finite and > 0")
        object.__setattr__(self, "couplings", g)

    @classmethod
    def uniform(cls, n: int, g: float = 1.0) -> "BathSpec":
        return cls((g,) * n)

    @property
    def N(self) -> int:
        return len(self.couplings)

    @property
    def is_uniform(self) -> bool:
        return max(self.couplings) - min(self.couplings) <= 1e-14 * max(self.couplings)

    def to_dict(self) -> dict:
        return {"N": self.N, "couplings": list(self.couplings)}

    @classmethod
    def from_dict(cls, data) -> "BathSpec":
        if "couplings" in data:
            return cls(tuple(data["couplings"]))
        return cls.uniform(int(data["N"]), float(data.get("g", 1.0)))


@dataclass(frozen=True, eq=False)
class PulseSpec:
    """Per-site z rotations: configuration amplitude gains exp(i sum_k phi_k s_k)."""

    phases: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.phases, dtype=np.float64).ravel().copy()
        if not np.all(np.isfinite(p)):
            raise ValidationError("pulse phases must be finite")
        p.flags.writeable = False
        object.__setattr__(self, "phases", p)

    def to_dict(self) -> dict:
        return {"phases": self.phases.tolist()}

    @classmethod
    def from_dict(cls, data) -> "PulseSpec":
        return cls(data["phases"])


# ---------------------------------------------------------------------------
# combinatorial basis


@lru_cache(maxsize=None)
def configurations(N: int, n: int) -> tuple:
    return tuple(itertools.combinations(range(N), n))


@lru_cache(maxsize=None)
def _config_index(N: int, n: int) -> dict:
    return {c: i for i, c in enumerate(configurations(N, n))}


@lru_cache(maxsize=None)
def _down_counts(N: int, n: int) -> np.ndarray:
    """Membership matrix (C(N,n), N): 1 where site k is flipped."""
    confs = configurations(N, n)
    m = np.zeros((len(confs), N))
    for i, c in enumerate(confs):
        m[i, list(c)] = 1.0
    return m


@lru_cache(maxsize=None)
def _hop_structure(N: int, D: int):
    """(rows, cols, sites) of the nonzeros of B_D; rows index up(D), cols down(D-1)."""
    up_index = _config_index(N, D)
    rows, cols, sites = [], [], []
    for j, T in enumerate(configurations(N, D - 1)):
        tset = set(T)
        for k in range(N):
            if k in tset:
                continue
            S = tuple(sorted(T + (k,)))
            rows.append(up_index[S])
            cols.append(j)
            sites.append(k)
    return np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64), np.array(sites, dtype=np.int64)


@lru_cache(maxsize=256)
def coupling_matrix(couplings: tuple, D: int) -> sparse.csr_matrix:
    """B_D as a sparse (C(N,D), C(N,D-1)) matrix."""
    N = len(couplings)
    rows, cols, sites = _hop_structure(N, D)
    g = np.asarray(couplings)[sites]
    return sparse.csr_matrix((g, (rows, cols)), shape=(comb(N, D), comb(N, D - 1)))


def _block_dims(N, D):
    up = comb(N, D) if D <= N else 0
    down = comb(N, D - 1) if D >= 1 else 0
    return up, down


@lru_cache(maxsize=256)
def _block_eigh(couplings: tuple, D: int):
    N = len(couplings)
    up, down = _block_dims(N, D)
    H = np.zeros((up + down, up + down))
    if up and down:
        B = coupling_matrix(couplings, D).toarray()
        H[:up, up:] = B
        H[up:, :up] = B.T
    return np.linalg.eigh(H)


def _block_hamiltonian(couplings: tuple, D: int) -> sparse.csr_matrix:
    N = len(couplings)
    up, down = _block_dims(N, D)
    if not (up and down):
        return sparse.csr_matrix((up + down, up + down))
    B = coupling_matrix(couplings, D)
    return sparse.bmat([[None, B], [B.T, None]], format="csr")


# ---------------------------------------------------------------------------
# states


@dataclass(eq=False)
class SectorState:
    """Pure memory x bath state stored by (memory, magnon number) sector."""

    N: int
    sectors: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (m, n), v in self.sectors.items():
            if m not in (UP, DOWN):
                raise InvalidState(f"memory label must be {UP!r} or {DOWN!r}")
            if not 0 <= n <= self.N:
                raise InvalidState(f"magnon number {n} outside [0, {self.N}]")
            v = np.asarray(v, dtype=np.complex128)
            if v.shape != (comb(self.N, n),):
                raise InvalidState(f"sector {(m, n)} needs {comb(self.N, n)} amplitudes, got {v.shape}")
            clean[(m, int(n))] = v
        self.sectors = clean

    @classmethod
    def basis(cls, N: int, memory: str, flipped=()) -> "SectorState":
        flipped = tuple(sorted(flipped))
        n = len(flipped)
        v = np.zeros(comb(N, n), dtype=np.complex128)
        v[_config_index(N, n)[flipped]] = 1.0
        return cls(N, {(memory, n): v})

    @classmethod
    def polarized(cls, N: int, memory: str = DOWN) -> "SectorState":
        """Memory in ``memory`` with every bath spin up (no magnons)."""
        return cls.basis(N, memory, ())

    @classmethod
    def from_bath(cls, memory: str, bath: dict, N: int) -> "SectorState":
        return cls(N, {(memory, n): v.copy() for n, v in bath.items()})

    def copy(self) -> "SectorState":
        return SectorState(self.N, {k: v.copy() for k, v in self.sectors.items()})

    def sector_norms(self) -> dict:
        return {k: float(np.vdot(v, v).real) for k, v in self.sectors.items()}

    def norm(self) -> float:
        return math.sqrt(math.fsum(self.sector_norms().values()))

    def population(self, memory: str) -> float:
        return math.fsum(p for (m, _), p in self.sector_norms().items() if m == memory)

    def jz(self) -> float:
        """Total <J_z> with hbar = 1."""
        total = []
        for (m, n), p in self.sector_norms().items():
            total.append(p * ((0.5 if m == UP else -0.5) + 0.5 * self.N - n))
        return math.fsum(total)

    def excitation_norms(self) -> dict:
        """Norm per conserved excitation number D = n + [memory down]."""
        out = {}
        for (m, n), p in self.sector_norms().items():
            D = n + (1 if m == DOWN else 0)
            out[D] = out.get(D, 0.0) + p
        return out

    def bath_part(self, memory: str) -> dict:
        return {n: v for (m, n), v in self.sectors.items() if m == memory}


def _validate(state: SectorState, bath: BathSpec):
    if state.N != bath.N:
        raise LengthMismatch(f"state has N={state.N} but bath has N={bath.N}")
    if abs(state.norm() - 1.0) > 1e-10:
        raise InvalidState(f"state norm {state.norm()!r} differs from 1")


def _split_blocks(state: SectorState):
    """Group sectors into excitation blocks: D -> (up vector, down vector)."""
    N = state.N
    blocks = {}
    for (m, n) in state.sectors:
        D = n + (1 if m == DOWN else 0)
        blocks.setdefault(D, None)
    out = {}
    for D in blocks:
        up, down = _block_dims(N, D)
        vu = state.sectors.get((UP, D), np.zeros(up, dtype=np.complex128)) if up else np.zeros(0, complex)
        vd = state.sectors.get((DOWN, D - 1), np.zeros(down, dtype=np.complex128)) if down else np.zeros(0, complex)
        out[D] = (vu, vd)
    return out


def _join_blocks(N, blocks) -> SectorState:
    sectors = {}
    for D, (vu, vd) in blocks.items():
        if vu.size:
            sectors[(UP, D)] = vu
        if vd.size:
            sectors[(DOWN, D - 1)] = vd
    return SectorState(N, sectors)


def evolve_hyperfine(state: SectorState, bath: BathSpec, t: float, max_block_dim: int = MAX_BLOCK_DIM) -> SectorState:
    """Apply exp(-i H t) block by block.

    Blocks are diagonalized exactly for N <= 12 (cached per coupling set) and
    propagated with ``scipy.sparse.linalg.expm_multiply`` above that.
    """
    if t < 0:
        raise ValidationError("t must be >= 0")
    _validate(state, bath)
    N = bath.N
    out = {}
    for D, (vu, vd) in _split_blocks(state).items():
        up, down = vu.size, vd.size
        if up + down > max_block_dim:
            raise DimensionOverflow(f"block D={D} has dimension {up + down} > {max_block_dim}")
        psi = np.concatenate([vu, vd])
        if t == 0 or up == 0 or down == 0:
            new = psi.copy()
        elif N <= DENSE_LIMIT_N:
            w, V = _block_eigh(bath.couplings, D)
            new = V @ (np.exp(-1j * w * t) * (V.T @ psi))
        else:
            H = _block_hamiltonian(bath.couplings, D)
            new = expm_multiply(-1j * t * H, psi)
        out[D] = (new[:up], new[up:])
    return _join_blocks(N, out)


def _transfer_probability(bath: BathSpec, n: int, times) -> np.ndarray:
    start = SectorState.from_bath(DOWN, {n: _bright_state(bath, n)}, bath.N)
    return np.array([evolve_hyperfine(start, bath, float(t)).population(UP) for t in times])


def _bright_state(bath: BathSpec, n: int) -> np.ndarray:
    """Normalized (sum_k g_k s-_k)^n |0>: the n-magnon state reached from |0>."""
    v = np.ones(1, dtype=np.complex128)
    for level in range(1, n + 1):
        v = coupling_matrix(bath.couplings, level) @ v
    return v / np.linalg.norm(v)


def half_flop_time(bath: BathSpec, n: int = 0) -> float:
    """Time of maximal transfer from down x (bright n-magnon state) into the up sector.

    Uniform couplings give pi / (2 g sqrt((N - n)(n + 1))). Non-uniform
    couplings fall back to a time scan refined by a bounded 1-d search.
    """
    N = bath.N
    if not 0 <= n <= N - 1:
        raise ValidationError(f"n must lie in [0, {N - 1}]")
    if bath.is_uniform:
        g = bath.couplings[0]
        return math.pi / (2.0 * g * math.sqrt((N - n) * (n + 1)))
    g_rms = math.sqrt(sum(x * x for x in bath.couplings) / N)
    t_guess = math.pi / (2.0 * g_rms * math.sqrt((N - n) * (n + 1)))
    grid = np.linspace(0.0, 3.0 * t_guess, 121)[1:]
    probs = _transfer_probability(bath, n, grid)
    i = int(np.argmax(probs))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid.size - 1)]
    res = minimize_scalar(lambda t: -_transfer_probability(bath, n, [t])[0],
                          bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    return float(res.x)


def _site_phases(N, n, phases):
    # relative phase exp(-i sum_{k in S} phi_k) times global exp(i sum phi / 2)
    return np.exp(1j * (0.5 * phases.sum() - _down_counts(N, n) @ phases))


def apply_pulse(state: SectorState, pulse: PulseSpec) -> SectorState:
    """Diagonal bath rotation; sector populations are untouched."""
    if pulse.phases.size != state.N:
        raise LengthMismatch(f"pulse has {pulse.phases.size} phases for N={state.N}")
    return SectorState(
        state.N,
        {(m, n): v * _site_phases(state.N, n, pulse.phases) for (m, n), v in state.sectors.items()},
    )


def bath_brightness(bath_vec: dict, bath: BathSpec) -> float:
    """||H (up x chi)||^2: squared coupling of an up-memory bath state to the down sector."""
    total = []
    for n, v in bath_vec.items():
        if n == 0:
            continue
        w = coupling_matrix(bath.couplings, n).T @ v
        total.append(float(np.vdot(w, w).real))
    return math.fsum(total)


def brightness(state: SectorState, bath: BathSpec) -> float:
    return bath_brightness(state.bath_part(UP), bath)


# ---------------------------------------------------------------------------
# ensembles of pure branches


@dataclass(eq=False)
class Ensemble:
    """Classical mixture of orthogonal pure branches: list of (probability, SectorState)."""

    branches: list

    @classmethod
    def pure(cls, state: SectorState) -> "Ensemble":
        return cls([(1.0, state)])

    @property
    def N(self) -> int:
        return self.branches[0][1].N

    def total_weight(self) -> float:
        return math.fsum(w for w, _ in self.branches)

    def population(self, memory: str) -> float:
        return math.fsum(w * s.population(memory) for w, s in self.branches)

    def jz(self) -> float:
        return math.fsum(w * s.jz() for w, s in self.branches)

    def brightness(self, bath: BathSpec) -> float:
        return math.fsum(w * brightness(s, bath) for w, s in self.branches)

    def map(self, fn) -> "Ensemble":
        return Ensemble([(w, fn(s)) for w, s in self.branches])


def _as_ensemble(state) -> Ensemble:
    if isinstance(state, Ensemble):
        return state
    if isinstance(state, SectorState):
        return Ensemble.pure(state)
    raise InvalidState("expected a SectorState or Ensemble")


def _bath_inner(a: dict, b: dict) -> complex:
    return sum(np.vdot(a[n], b[n]) for n in a.keys() & b.keys())


def bath_vectors(ens: Ensemble):
    """Unnormalized weighted bath vectors sqrt(w) chi for every (branch, memory) part."""
    out = []
    for w, s in ens.branches:
        for m in (UP, DOWN):
            part = s.bath_part(m)
            if part:
                out.append({n: math.sqrt(w) * v for n, v in part.items()})
    return out


def bath_entropy(state) -> float:
    """Von Neumann entropy (nats) of the reduced bath state, from the Gram matrix of branch parts."""
    vecs = bath_vectors(_as_ensemble(state))
    k = len(vecs)
    G = np.empty((k, k), dtype=np.complex128)
    for i in range(k):
        for j in range(i, k):
            G[i, j] = _bath_inner(vecs[i], vecs[j])
            G[j, i] = np.conj(G[i, j])
    lam = np.linalg.eigvalsh(G)
    lam = lam[lam > 1e-300]
    return float(-np.sum(lam * np.log(lam)))


def memory_entropy(state) -> float:
    """Entropy (nats) of the memory; its reduced state is diagonal because sectors differ in J_z."""
    p = min(max(_as_ensemble(state).population(DOWN), 0.0), 1.0)
    return float(-sum(x * math.log(x) for x in (p, 1.0 - p) if x > 0))


def randomize_memory(state, merge_tol: float = 1e-13, drop_below: float = 1e-15) -> Ensemble:
    """Replace the memory with a fresh maximally mixed bit, keeping the bath.

    Each branch's up- and down-memory bath parts become bath branches; equal
    bath states (up to phase) are merged and parts lighter than
    ``drop_below`` are discarded.
    """
    ens = _as_ensemble(state)
    N = ens.N
    baths = []
    for w, s in ens.branches:
        for m in (UP, DOWN):
            part = s.bath_part(m)
            if not part:
                continue
            weight = w * math.fsum(float(np.vdot(v, v).real) for v in part.values())
            if weight <= drop_below:
                continue
            scale = 1.0 / math.sqrt(weight / w)
            chi = {n: v * scale for n, v in part.items()}
            for i, (w2, chi2) in enumerate(baths):
                if abs(abs(_bath_inner(chi, chi2)) - 1.0) < merge_tol:
                    baths[i] = (w2 + weight, chi2)
                    break
            else:
                baths.append((weight, chi))
    total = math.fsum(w for w, _ in baths)
    branches = []
    for w, chi in baths:
        for m in (UP, DOWN):
            branches.append((0.5 * w / total, SectorState.from_bath(m, chi, N)))
    return Ensemble(branches)


# ---------------------------------------------------------------------------
# pulse design


def _pulse_objective_parts(ens: Ensemble, bath: BathSpec):
    """(weight, n, up-memory amplitudes, B_n^T) for every occupied up sector with n >= 1."""
    parts = []
    for w, s in ens.branches:
        for n, v in s.bath_part(UP).items():
            if n >= 1 and np.vdot(v, v).real > 0:
                parts.append((w, n, v, coupling_matrix(bath.couplings, n).T.tocsr()))
    return parts


def _brightness_with(parts, N, phases):
    total = []
    for w, n, v, Mt in parts:
        u = Mt @ (v * np.exp(-1j * (_down_counts(N, n) @ phases)))
        total.append(w * float(np.vdot(u, u).real))
    return math.fsum(total)


def _coordinate_descent(parts, N, phases, sweeps, tol):
    phases = phases.copy()
    best = _brightness_with(parts, N, phases)
    for _ in range(sweeps):
        for j in range(N):
            z = 0.0 + 0.0j
            for w, n, v, Mt in parts:
                mem = _down_counts(N, n)[:, j] > 0
                rest = phases.copy()
                rest[j] = 0.0
                vv = v * np.exp(-1j * (_down_counts(N, n) @ rest))
                a = Mt @ np.where(mem, 0.0, vv)
                b = Mt @ np.where(mem, vv, 0.0)
                z += w * np.vdot(a, b)
            if abs(z) > 0:
                phases[j] = float(np.angle(z)) - math.pi
        val = _brightness_with(parts, N, phases)
        if val <= tol or best - val <= 1e-18 * max(1.0, best):
            best = min(best, val)
            break
        best = val
    return phases, best


def design_pulse(state, bath: BathSpec, restarts: int = 10, seed: int = 0,
                 sweeps: int = 200, tol: float = 1e-14) -> PulseSpec:
    """Phases minimizing the brightness of the up-memory bath states.

    Brightness is the squared norm of H applied to the up-memory component,
    i.e. the rate at which the reset state would leak. Coordinate descent uses
    the closed-form minimum in each phase; restarts begin from the identity,
    the N-th roots of unity, then random phases.
    """
    ens = _as_ensemble(state)
    N = bath.N
    if ens.N != N:
        raise LengthMismatch(f"state has N={ens.N} but bath has N={N}")
    if ens.population(UP) <= 0:
        raise NoUpSectorSupport("state has no weight in up-memory sectors")
    parts = _pulse_objective_parts(ens, bath)
    zero = np.zeros(N)
    if not parts or _brightness_with(parts, N, zero) <= tol:
        return PulseSpec(zero)
    rng = np.random.default_rng(seed)
    starts = [2.0 * math.pi * np.arange(N) / N]
    starts += [rng.uniform(0, 2 * math.pi, N) for _ in range(max(restarts - 1, 0))]
    best_phases, best_val = zero, _brightness_with(parts, N, zero)
    for start in starts:
        phases, val = _coordinate_descent(parts, N, start, sweeps, tol)
        if val < best_val:
            best_phases, best_val = phases, val
        if best_val <= tol:
            break
    return PulseSpec(np.mod(best_phases, 2 * math.pi))


# ---------------------------------------------------------------------------
# erasure cycles


def _flop_rate(part: dict, bath: BathSpec) -> float:
    """||H (down x chi)|| for a normalized down-memory bath state chi."""
    total = []
    for n, v in part.items():
        if n < bath.N:
            w = coupling_matrix(bath.couplings, n + 1) @ v
            total.append(float(np.vdot(w, w).real))
    norm2 = math.fsum(float(np.vdot(v, v).real) for v in part.values())
    return math.sqrt(math.fsum(total) / norm2) if norm2 > 0 else 0.0


def dominant_half_flop(ens: Ensemble, bath: BathSpec) -> float:
    """pi / (2 omega) for the heaviest down-memory branch (first on ties)."""
    best_w, best_rate = -1.0, 0.0
    for w, s in ens.branches:
        part = s.bath_part(DOWN)
        if not part:
            continue
        pw = w * s.population(DOWN)
        if pw > best_w * (1 + 1e-12):
            best_w, best_rate = pw, _flop_rate(part, bath)
    if best_rate <= 0:
        return half_flop_time(bath, 0)
    return math.pi / (2.0 * best_rate)


def _spectral_groups(ens: Ensemble, bath: BathSpec, group_tol=1e-9):
    """Energies and down-sector projections for the residual-population series.

    Returns (E, U) where the down-memory population at time t is
    sum_{a,b} conj(u_a) . u_b exp(-i (E_b - E_a) t), summed over branches.
    """
    energies, vecs = [], []
    for w, s in ens.branches:
        for D, (vu, vd) in _split_blocks(s).items():
            up, down = vu.size, vd.size
            psi = math.sqrt(w) * np.concatenate([vu, vd])
            if not np.any(psi) or down == 0:
                continue
            if up == 0:
                energies.append(0.0)
                vecs.append((D, vd * math.sqrt(w)))
                continue
            evals, V = _block_eigh(bath.couplings, D)
            c = V.T @ psi
            order = np.argsort(evals)
            e_sorted = evals[order]
            cuts = np.nonzero(np.diff(e_sorted) > group_tol)[0] + 1
            for idx in np.split(order, cuts):
                proj = V[up:, idx] @ c[idx]
                if np.vdot(proj, proj).real > 1e-30:
                    energies.append(float(np.mean(evals[idx])))
                    vecs.append((D, proj))
    k = len(vecs)
    G = np.zeros((k, k), dtype=np.complex128)
    for a in range(k):
        for b in range(a, k):
            if vecs[a][0] == vecs[b][0]:
                G[a, b] = np.vdot(vecs[a][1], vecs[b][1])
                G[b, a] = np.conj(G[a, b])
    return np.array(energies), G


def _residual_series(E, G, times):
    times = np.atleast_1d(times)
    if E.size == 0:
        return np.zeros(times.size)
    P = np.exp(-1j * np.outer(times, E))
    return np.einsum("ta,ab,tb->t", P.conj(), G, P).real


def refocus_time(ens: Ensemble, bath: BathSpec, tol: float = 1e-11,
                 max_half_periods: int = 400000, chunk: int = 65536) -> tuple[float, float]:
    """Evolution time that completes every down-memory flop at once.

    Scans odd multiples (2a+1) t_dom of the dominant half-flop time for the
    first whose residual down population is <= ``tol``, then polishes it with
    a bounded search. Requires the dense spectral path (N <= 12). Returns
    (time, residual).
    """
    if bath.N > DENSE_LIMIT_N:
        raise DimensionOverflow("refocusing needs exact block spectra (N <= 12)")
    t_dom = dominant_half_flop(ens, bath)
    E, G = _spectral_groups(ens, bath)
    best_t, best_r = t_dom, float(_residual_series(E, G, t_dom)[0])
    if best_r > tol:
        for start in range(0, max_half_periods, chunk):
            a = np.arange(start, min(start + chunk, max_half_periods))
            times = (2 * a + 1) * t_dom
            r = _residual_series(E, G, times)
            i = int(np.argmin(r))
            if r[i] < best_r:
                best_t, best_r = float(times[i]), float(r[i])
            hits = np.nonzero(r <= tol)[0]
            if hits.size:
                best_t, best_r = float(times[hits[0]]), float(r[hits[0]])
                break
    res = minimize_scalar(lambda t: _residual_series(E, G, t)[0],
                          bounds=(best_t - 0.05 * t_dom, best_t + 0.05 * t_dom),
                          method="bounded", options={"xatol": 1e-13 * max(1.0, best_t)})
    if res.fun < best_r:
        best_t, best_r = float(res.x), float(res.fun)
    return best_t, max(best_r, 0.0)


@dataclass(frozen=True)
class CycleReport:
    cycle: int
    error_prob: float
    failure_branch_prob: float
    brightness_before: float
    brightness_after: float
    duration: float
    jz_drift: float
    memory_entropy: float
    bath_entropy: float


@dataclass(eq=False)
class EraseResult:
    final: Ensemble
    reports: list

    @property
    def error_probs(self) -> list:
        return [r.error_prob for r in self.reports]


def failure_branch_probability(ens: Ensemble, bath: BathSpec, rel_tol: float = 1e-10) -> float:
    """Weight of up-memory components whose bath state is not a fixed point of H."""
    scale = max(bath.couplings) ** 2
    total = []
    for w, s in ens.branches:
        part = s.bath_part(UP)
        if not part:
            continue
        p = s.population(UP)
        if p > 0 and bath_brightness(part, bath) / p > rel_tol * scale:
            total.append(w * p)
    return math.fsum(total)


def erase_cycle(state, bath: BathSpec, cycles: int = 1, use_pulse: bool = False,
                duration: str = "refocus", refocus_tol: float = 1e-11,
                pulse_restarts: int = 10, seed: int = 0) -> EraseResult:
    """Repeated erasure of fresh bits into the same bath.

    Each cycle re-randomizes the memory, evolves under H, records the
    remaining down-memory population as the error probability, and
    optionally applies a designed pulse that darkens the up-memory bath
    states for the next cycle. ``duration`` is ``"refocus"`` (see
    :func:`refocus_time`) or ``"dominant"`` (single dominant half-flop).
    """
    if cycles < 1:
        raise ValidationError("cycles must be >= 1")
    if duration not in ("refocus", "dominant"):
        raise ValidationError("duration must be 'refocus' or 'dominant'")
    ens = _as_ensemble(state)
    if ens.N != bath.N:
        raise LengthMismatch(f"state has N={ens.N} but bath has N={bath.N}")
    reports = []
    for c in range(1, cycles + 1):
        ens = randomize_memory(ens)
        failure = failure_branch_probability(ens, bath)
        if duration == "refocus" and bath.N <= DENSE_LIMIT_N:
            t, _ = refocus_time(ens, bath, tol=refocus_tol)
        else:
            t = dominant_half_flop(ens, bath)
        jz0 = ens.jz()
        ens = ens.map(lambda s: evolve_hyperfine(s, bath, t))
        drift = abs(ens.jz() - jz0)
        err = ens.population(DOWN)
        b_before = ens.brightness(bath)
        if use_pulse and ens.population(UP) > 0:
            pulse = design_pulse(ens, bath, restarts=pulse_restarts, seed=seed + c)
            ens = ens.map(lambda s: apply_pulse(s, pulse))
        b_after = ens.brightness(bath)
        reports.append(CycleReport(c, err, failure, b_before, b_after, t, drift,
                                   memory_entropy(ens), bath_entropy(ens)))
    return EraseResult(ens, reports)


def initial_state(N: int) -> Ensemble:
    """Maximally mixed memory with a fully polarized bath."""
    return Ensemble([(0.5, SectorState.polarized(N, UP)), (0.5, SectorState.polarized(N, DOWN))])


# ---------------------------------------------------------------------------
# binary dumps

_MAGIC = b"ECSS"


def dump_state(state: SectorState) -> bytes:
    """Serialize a pure state.

    Layout (little-endian): 4-byte magic ``ECSS``; uint32 N; uint32 sector
    count; then per sector, ordered by (n, up before down): uint8 memory
    (0 = up, 1 = down), uint32 n, and C(N, n) amplitudes as interleaved
    float64 (re, im) in ``itertools.combinations`` order.
    """
    buf = io.BytesIO()
    keys = sorted(state.sectors, key=lambda k: (k[1], 0 if k[0] == UP else 1))
    buf.write(_MAGIC)
    buf.write(struct.pack("<II", state.N, len(keys)))
    for m, n in keys:
        buf.write(struct.pack("<BI", 0 if m == UP else 1, n))
        v = state.sectors[(m, n)]
        buf.write(np.column_stack([v.real, v.imag]).astype("<f8").tobytes())
    return buf.getvalue()


def load_state(data: bytes) -> SectorState:
    if data[:4] != _MAGIC:
        raise InvalidState("not a central-spin state dump")
    N, count = struct.unpack_from("<II", data, 4)
    off = 12
    sectors = {}
    for _ in range(count):
        mem, n = struct.unpack_from("<BI", data, off)
        off += 5
        size = comb(N, n)
        a = np.frombuffer(data, dtype="<f8", count=2 * size, offset=off).reshape(size, 2)
        off += 16 * size
        sectors[(UP if mem == 0 else DOWN, n)] = a[:, 0] + 1j * a[:, 1]
    return SectorState(N, sectors)


_ENS_MAGIC = b"ECSE"


def dump_ensemble(ens: Ensemble) -> bytes:
    """Magic ``ECSE``, uint32 branch count, then per branch a float64 weight,
    a uint32 byte length and a :func:`dump_state` payload (little-endian)."""
    parts = [_ENS_MAGIC, struct.pack("<I", len(ens.branches))]
    for w, s in ens.branches:
        blob = dump_state(s)
        parts.append(struct.pack("<dI", w, len(blob)))
        parts.append(blob)
    return b"".join(parts)


def load_ensemble(data: bytes) -> Ensemble:
    if data[:4] != _ENS_MAGIC:
        raise InvalidState("not a central-spin ensemble dump")
    (count,) = struct.unpack_from("<I", data, 4)
    off = 8
    branches = []
    for _ in range(count):
        w, size = struct.unpack_from("<dI", data, off)
        off += 12
        branches.append((w, load_state(data[off:off + size])))
        off += size
    if not branches:
        raise InvalidState("ensemble dump has no branches")
    return Ensemble(branches)
