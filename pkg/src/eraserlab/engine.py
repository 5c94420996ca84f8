"""Ledger-level spin-heat engine.

Each cycle: the working bit starts in its reset state, a work stroke turns
heat Q from the thermal reservoir into work W = Q and leaves ln 2 of entropy
in the bit, then the bit is erased into a spin reservoir, paying spintherm
instead of heat. Entropy flows are booked in nats:

    dS_thermal = -beta Q,   dS_spin = gamma Q_s,   dS_memory = +ln 2 then -ln 2.

The drive's spinlabor (-hbar per stroke, delivered to the dot) is recorded
separately and does not enter the spin-reservoir entropy.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import central_spin as cs
from . import spin
from .errors import ConfigInvalid, IncompleteCycle, ZeroHeat

LN2 = math.log(2.0)


class Backend(str, enum.Enum):
    IDEAL_BOUND = "ideal_bound"
    SPIN_PROTOCOL = "spin_protocol"
    CENTRAL_SPIN = "central_spin"


@dataclass(frozen=True)
class EngineConfig:
    beta: float = 1.0
    gamma: float = 1.0
    heat_per_stroke: float = LN2
    erasure_backend: Backend = Backend.IDEAL_BOUND
    cycles: int = 1
    hbar: float = 1.0
    bath_spins: int = 8

    def __post_init__(self):
        try:
            object.__setattr__(self, "erasure_backend", Backend(self.erasure_backend))
        except ValueError:
            raise ConfigInvalid(f"unknown erasure backend {self.erasure_backend!r}") from None
        for name in ("beta", "gamma", "hbar"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ConfigInvalid(f"{name} must be > 0")
        Q = self.heat_per_stroke
        if not (math.isfinite(Q) and Q >= 0):
            raise ConfigInvalid("heat_per_stroke must be >= 0")
        if Q > LN2 / self.beta * (1 + 1e-12):
            raise ConfigInvalid(
                f"heat_per_stroke {Q} exceeds ln2/beta = {LN2 / self.beta}; "
                "a single bit cannot carry that much entropy"
            )
        if isinstance(self.cycles, bool) or int(self.cycles) != self.cycles or self.cycles < 0:
            raise ConfigInvalid("cycles must be a non-negative integer")
        if self.erasure_backend is Backend.CENTRAL_SPIN:
            if self.gamma * self.hbar < 2 * LN2:
                raise ConfigInvalid(
                    "central_spin erasure dumps hbar/2 of spintherm per bit on average; "
                    "it needs gamma*hbar >= 2 ln 2 to respect the spintherm bound"
                )
            if not 1 <= self.bath_spins <= cs.MAX_BATH:
                raise ConfigInvalid(f"bath_spins must lie in [1, {cs.MAX_BATH}]")


@dataclass(frozen=True)
class CycleRecord:
    cycle: int
    W: float
    Q: float
    L_s: float
    Q_s: float
    dS_thermal: float
    dS_spin: float
    dS_memory_stroke: float
    dS_memory_erase: float
    drive_spinlabor: float

    @property
    def dS_memory(self) -> float:
        return self.dS_memory_stroke + self.dS_memory_erase

    @property
    def entropy_production(self) -> float:
        return self.dS_thermal + self.dS_spin + self.dS_memory


CSV_COLUMNS = ("cycle", "W", "Q", "L_s", "Q_s", "dS_thermal", "dS_spin", "dS_memory")


@dataclass
class CycleLedger:
    records: list = field(default_factory=list)
    pending_stroke: Optional[dict] = None

    def work_stroke(self, config: EngineConfig):
        """Stage 2: heat Q becomes work W = Q; the bit now holds ln 2 of entropy."""
        if self.pending_stroke is not None:
            raise IncompleteCycle("previous stroke has not been erased")
        Q = config.heat_per_stroke
        self.pending_stroke = {
            "W": Q,
            "Q": Q,
            "dS_thermal": -config.beta * Q,
            "dS_memory_stroke": LN2,
            "drive_spinlabor": -config.hbar,
        }

    def erase(self, config: EngineConfig, L_s: float, Q_s: float, residual_entropy: float = 0.0):
        """Stage 3: book the erasure and close the cycle."""
        if self.pending_stroke is None:
            raise IncompleteCycle("nothing to erase")
        s = self.pending_stroke
        self.pending_stroke = None
        rec = CycleRecord(
            cycle=len(self.records) + 1,
            W=s["W"],
            Q=s["Q"],
            L_s=float(L_s),
            Q_s=float(Q_s),
            dS_thermal=s["dS_thermal"],
            dS_spin=config.gamma * float(Q_s),
            dS_memory_stroke=s["dS_memory_stroke"],
            dS_memory_erase=residual_entropy - LN2,
            drive_spinlabor=s["drive_spinlabor"],
        )
        self.records.append(rec)
        return rec

    def totals(self) -> dict:
        cols = ("W", "Q", "L_s", "Q_s", "dS_thermal", "dS_spin", "dS_memory")
        return {c: math.fsum(getattr(r, c) for r in self.records) for c in cols}

    def rows(self):
        for r in self.records:
            yield [r.cycle, r.W, r.Q, r.L_s, r.Q_s, r.dS_thermal, r.dS_spin, r.dS_memory]

    def __len__(self):
        return len(self.records)


def _spin_config(config: EngineConfig) -> spin.SpinProtocolConfig:
    return spin.SpinProtocolConfig(
        spin.SpinReservoir(config.gamma, config.hbar),
        reset_convention=spin.ResetConvention.RESET_LOW,
    )


def _erasure_samples(config: EngineConfig, n: int, seed: int):
    """(L_s, Q_s, residual memory entropy) arrays for ``n`` erasures."""
    hbar = config.hbar
    if config.erasure_backend is Backend.IDEAL_BOUND:
        Q_s = np.full(n, LN2 / config.gamma)
        return Q_s - 0.5 * hbar, Q_s, np.zeros(n)
    if config.erasure_backend is Backend.SPIN_PROTOCOL:
        sc = _spin_config(config)
        L = spin.sample_spinlabor(sc, n, seed)
        return L, L - spin.memory_jz_change(sc), np.zeros(n)
    flip_p, residual = _central_spin_transfer(config.bath_spins)
    rng = np.random.default_rng(seed)
    flipped = rng.random(n) < flip_p
    return np.zeros(n), flipped * hbar, np.full(n, residual)


def _central_spin_transfer(N: int):
    """Probability that erasure flips a bath spin, and the bit's residual entropy."""
    bath = cs.BathSpec.uniform(N)
    res = cs.erase_cycle(cs.initial_state(N), bath, cycles=1)
    err = res.reports[0].error_prob
    return 0.5 - err, res.reports[0].memory_entropy


def run_cycle(config: EngineConfig, seed: int = 0, ledger: Optional[CycleLedger] = None) -> CycleRecord:
    """One three-stage cycle (reset, work stroke, erasure) appended to ``ledger``."""
    ledger = CycleLedger() if ledger is None else ledger
    L, Qs, resid = _erasure_samples(config, 1, seed)
    ledger.work_stroke(config)
    return ledger.erase(config, L[0], Qs[0], resid[0])


def run_engine(config: EngineConfig, seed: int = 0) -> CycleLedger:
    """``config.cycles`` sequential cycles; erasure draws come from one seeded batch."""
    ledger = CycleLedger()
    if config.cycles == 0:
        return ledger
    L, Qs, resid = _erasure_samples(config, config.cycles, seed)
    for i in range(config.cycles):
        ledger.work_stroke(config)
        ledger.erase(config, L[i], Qs[i], resid[i])
    return ledger


def entropy_audit(ledger: CycleLedger, tol: float = 1e-9) -> float:
    """Cumulative entropy production dS_thermal + dS_spin + dS_memory (nats)."""
    if ledger.pending_stroke is not None:
        raise IncompleteCycle("ledger ends with an un-erased work stroke")
    mem = math.fsum(r.dS_memory for r in ledger.records)
    if abs(mem) > tol:
        raise IncompleteCycle(f"memory entropy not returned to zero (net {mem:.3e})")
    terms = []
    for r in ledger.records:
        terms += [r.dS_thermal, r.dS_spin, r.dS_memory_stroke, r.dS_memory_erase]
    return math.fsum(terms)


def efficiency(ledger: CycleLedger) -> float:
    """Total work over total heat drawn from the thermal reservoir."""
    Q = math.fsum(r.Q for r in ledger.records)
    if Q == 0:
        raise ZeroHeat("no heat was extracted")
    return math.fsum(r.W for r in ledger.records) / Q


def carnot_efficiency(t_hot: float, t_cold: float) -> float:
    if not (t_hot > 0 and t_cold > 0):
        raise ConfigInvalid("temperatures must be > 0")
    return 1.0 - t_cold / t_hot


def mean_spintherm(ledger: CycleLedger) -> float:
    return math.fsum(r.Q_s for r in ledger.records) / len(ledger.records)
