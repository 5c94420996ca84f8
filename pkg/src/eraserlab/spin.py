"""Erasure of a spin-1/2 memory against a spin reservoir at inverse spin temperature gamma.

The gap between the information-carrying J_z states can only grow in steps
of hbar. The first raise acts on the maximally mixed memory, costing hbar
with probability 1/2; after the (n-1)-th raise the memory thermalizes at gap
n*hbar, so the next raise costs hbar with probability

    f_n = e^{-gamma n hbar} / (1 + e^{-gamma n hbar}),   n = 2, 3, ...

independently of the past. The spinlabor L_s / hbar is therefore a sum of
independent Bernoulli variables, and its exact PMF is their convolution.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy.special import expit

from . import _core
from .distributions import DiscreteDistribution
from .errors import InvalidN, InvalidReservoir, MismatchedGamma, ValidationError
from .parallel import map_blocks

LN2 = math.log(2.0)


@dataclass(frozen=True)
class SpinReservoir:
    gamma: float
    hbar: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.gamma) and self.gamma > 0):
            raise InvalidReservoir(f"gamma must be > 0, got {self.gamma!r}")
        if not (math.isfinite(self.hbar) and self.hbar > 0):
            raise InvalidReservoir(f"hbar must be > 0, got {self.hbar!r}")
        if not math.isfinite(self.gamma * self.hbar):
            raise InvalidReservoir("gamma * hbar must be finite")

    @property
    def x(self) -> float:
        """Dimensionless step gamma * hbar."""
        return self.gamma * self.hbar


class ResetConvention(str, enum.Enum):
    RESET_LOW = "reset_low"
    RESET_HIGH = "reset_high"


@dataclass(frozen=True)
class SpinProtocolConfig:
    reservoir: SpinReservoir
    truncation_tol: float = 1e-15
    reset_convention: ResetConvention = ResetConvention.RESET_LOW

    def __post_init__(self):
        if not (0 < self.truncation_tol < 1):
            raise ValidationError("truncation_tol must lie in (0, 1)")
        object.__setattr__(self, "reset_convention", ResetConvention(self.reset_convention))


def step_occupation(n: int, reservoir: SpinReservoir) -> float:
    """Equilibrium occupation of the upper state at gap n*hbar."""
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InvalidN(f"n must be an integer >= 1, got {n!r}")
    return float(expit(-reservoir.x * n))


def protocol_factors(config: SpinProtocolConfig) -> tuple[np.ndarray, float]:
    """Bernoulli success probabilities (1/2, f_2, f_3, ...) and the dropped tail mass bound.

    Stops at the first n with f_n < truncation_tol. The bound uses
    f_n <= e^{-n x}: sum_{n>=N} f_n <= e^{-N x} / (1 - e^{-x}).
    """
    x = config.reservoir.x
    tol = config.truncation_tol
    # f_n < tol once n x > ln(1/tol); generate a bit past that and cut
    n_max = max(2, int(math.ceil(math.log(1.0 / tol) / x)) + 2)
    n = np.arange(2, n_max + 1)
    f = expit(-x * n)
    stop = np.nonzero(f < tol)[0]
    cut = int(stop[0]) if stop.size else f.size
    first_dropped = 2 + cut
    tail = math.exp(-first_dropped * x) / -math.expm1(-x)
    return np.concatenate([[0.5], f[:cut]]), tail


@dataclass(frozen=True, eq=False)
class SpinlaborDistribution:
    """Exact spinlabor PMF on the lattice {0, hbar, 2 hbar, ...}.

    ``tail_bound`` bounds the probability mass affected by the truncated
    Bernoulli factors; it also bounds the truncated mean in units of hbar.
    """

    dist: DiscreteDistribution
    gamma: float
    hbar: float
    tail_bound: float

    @property
    def values(self):
        return self.dist.values

    @property
    def probs(self):
        return self.dist.probs

    def mean(self) -> float:
        return self.dist.mean()

    def variance(self) -> float:
        return self.dist.variance()

    def to_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "hbar": self.hbar,
            "values": self.values.tolist(),
            "probs": self.probs.tolist(),
            "tail_bound": self.tail_bound,
        }

    @classmethod
    def from_dict(cls, data) -> "SpinlaborDistribution":
        return cls(
            DiscreteDistribution(data["values"], data["probs"]),
            float(data["gamma"]),
            float(data["hbar"]),
            float(data["tail_bound"]),
        )


def exact_spinlabor_distribution(config: SpinProtocolConfig) -> SpinlaborDistribution:
    f, tail = protocol_factors(config)
    pmf = _core.bernoulli_pmf(f)
    hbar = config.reservoir.hbar
    values = np.arange(pmf.size) * hbar
    return SpinlaborDistribution(
        DiscreteDistribution(values, pmf / math.fsum(pmf)),
        config.reservoir.gamma,
        hbar,
        tail,
    )


def sample_spinlabor(config: SpinProtocolConfig, runs: int, seed: int, workers: int = 1) -> np.ndarray:
    """``runs`` spinlabor values from direct simulation of the raise/thermalize steps."""
    if runs < 1:
        raise ValidationError("runs must be >= 1")
    f, _ = protocol_factors(config)

    def block(rng, size):
        return _core.spinlabor_counts(f, rng.random((size, f.size)))

    counts = np.concatenate(map_blocks(block, seed, runs, workers))
    return counts * config.reservoir.hbar


def jarzynski_like_constant(reservoir: SpinReservoir) -> float:
    """A = (1 + e^{-gamma hbar}) / (1 + e^{-2 gamma hbar})."""
    x = reservoir.x
    return (1.0 + math.exp(-x)) / (1.0 + math.exp(-2.0 * x))


def _check_match(dist: SpinlaborDistribution, reservoir: SpinReservoir):
    if not (math.isclose(dist.gamma, reservoir.gamma, rel_tol=1e-12)
            and math.isclose(dist.hbar, reservoir.hbar, rel_tol=1e-12)):
        raise MismatchedGamma(
            f"distribution built for gamma={dist.gamma}, hbar={dist.hbar}; "
            f"reservoir has gamma={reservoir.gamma}, hbar={reservoir.hbar}"
        )


class JarzynskiLike(NamedTuple):
    lhs: float
    A: float


def jarzynski_like_check(dist: SpinlaborDistribution, reservoir: SpinReservoir) -> JarzynskiLike:
    """lhs = <exp(-gamma L_s + ln 2)> under ``dist`` alongside the closed-form A."""
    _check_match(dist, reservoir)
    g = reservoir.gamma
    lhs = dist.dist.expect(lambda v: np.exp(-g * v + LN2))
    return JarzynskiLike(lhs, jarzynski_like_constant(reservoir))


class TailResult(NamedTuple):
    P: float
    bound_A: float
    bound_tight: Optional[float]


def _lattice_atol(dist):
    return 1e-9 * dist.hbar


def violation_tail(dist: SpinlaborDistribution, reservoir: SpinReservoir, eps: float) -> TailResult:
    """P(L_s <= ln2/gamma - eps) with the A e^{-gamma eps} bound and, for gamma hbar < 1,
    the C e^{-sqrt(gamma/hbar) eps} bound where C = P(L_s <= ln2/gamma)."""
    _check_match(dist, reservoir)
    if eps < 0:
        raise ValidationError("eps must be >= 0")
    g, hbar = reservoir.gamma, reservoir.hbar
    threshold = LN2 / g
    atol = _lattice_atol(dist)
    P = dist.dist.prob_below(threshold - eps, inclusive=True, atol=atol)
    bound_A = jarzynski_like_constant(reservoir) * math.exp(-g * eps)
    bound_tight = None
    if reservoir.x < 1.0:
        C = dist.dist.prob_below(threshold, inclusive=True, atol=atol)
        bound_tight = C * math.exp(-math.sqrt(g / hbar) * eps)
    return TailResult(P, bound_A, bound_tight)


@dataclass(frozen=True)
class SpinFirstLawLedger:
    spinlabor: float
    spintherm_to_reservoir: float
    memory_jz_change: float


def memory_jz_change(config: SpinProtocolConfig) -> float:
    """J_z change of the memory going from maximally mixed to the reset state."""
    half = 0.5 * config.reservoir.hbar
    return half if config.reset_convention is ResetConvention.RESET_HIGH else -half


def first_law_ledger(spinlabor: float, config: SpinProtocolConfig) -> SpinFirstLawLedger:
    """Split spinlabor on the memory into the part retained by the memory and spintherm.

    With no spinlabor on the reservoir and no spintherm leaving the
    memory-reservoir system, Q_s = L_s - dJ_z(memory).
    """
    if spinlabor < 0:
        raise ValidationError("spinlabor must be >= 0")
    dm = memory_jz_change(config)
    return SpinFirstLawLedger(float(spinlabor), float(spinlabor) - dm, dm)


def mean_spintherm(dist: SpinlaborDistribution, config: SpinProtocolConfig) -> float:
    return dist.mean() - memory_jz_change(config)
