"""Landauer erasure of a two-level memory by raising its energy gap.

The memory starts maximally mixed at zero gap. Each protocol step raises the
upper level from ``E_i`` to ``E_{i+1}`` (work ``b * dE`` on the current bit)
and then lets the bit thermalize with the reservoir at the new gap (heat
``E_{i+1} * (b_before - b_after)`` flows to the reservoir). Natural units,
k_B = 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import expit

from . import _core
from .distributions import DiscreteDistribution
from .errors import (
    InvalidSchedule,
    NonPositiveBeta,
    TooManySteps,
    UnnormalizedDistribution,
    ValidationError,
)
from .parallel import map_blocks

MAX_ENUMERATION_STEPS = 24
LN2 = math.log(2.0)


def _check_beta(beta):
    if not (np.isfinite(beta) and beta > 0):
        raise NonPositiveBeta(f"beta must be > 0, got {beta!r}")


def thermal_occupation(E, beta):
    """Upper-level occupation e^{-beta E} / (1 + e^{-beta E}).

    Evaluated as a logistic function so that large ``beta * E`` underflows
    to 0 rather than overflowing. Accepts scalars or arrays.
    """
    _check_beta(beta)
    out = expit(-beta * np.asarray(E, dtype=np.float64))
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class ThermalModel:
    beta: float = 1.0

    def __post_init__(self):
        _check_beta(self.beta)


@dataclass(frozen=True, eq=False)
class GapSchedule:
    """Gap of the upper memory level at each protocol step, starting at 0."""

    energies: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=np.float64).copy()
        if e.ndim != 1 or e.size == 0:
            raise InvalidSchedule("schedule must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(e)):
            raise InvalidSchedule("schedule energies must be finite")
        if e[0] != 0.0:
            raise InvalidSchedule(f"schedule must start at 0, got {e[0]!r}")
        if np.any(np.diff(e) < 0):
            raise InvalidSchedule("schedule energies must be non-decreasing")
        e.flags.writeable = False
        object.__setattr__(self, "energies", e)

    @property
    def steps(self) -> int:
        return self.energies.size - 1

    @property
    def final_gap(self) -> float:
        return float(self.energies[-1])

    def to_dict(self) -> dict:
        return {"energies": self.energies.tolist()}

    @classmethod
    def from_dict(cls, data) -> "GapSchedule":
        return cls(data["energies"])


def default_schedule(steps=20000, e_max=None, beta=1.0, e_min=1e-3, linear_steps=None):
    """Linear ramp 0 -> ``e_min`` followed by geometric spacing up to ``e_max``.

    ``e_max`` defaults to 25/beta, leaving an error probability below 2e-11.
    """
    _check_beta(beta)
    if steps < 1:
        raise InvalidSchedule("steps must be >= 1")
    if e_max is None:
        e_max = 25.0 / beta
    if not (e_max > e_min > 0):
        raise InvalidSchedule("need e_max > e_min > 0")
    if linear_steps is None:
        linear_steps = min(10, max(1, steps // 10))
    linear_steps = min(linear_steps, steps)
    geo_steps = steps - linear_steps
    lin = np.linspace(0.0, e_min if geo_steps else e_max, linear_steps + 1)
    if geo_steps == 0:
        return GapSchedule(lin)
    geo = np.geomspace(e_min, e_max, geo_steps + 1)[1:]
    return GapSchedule(np.concatenate([lin, geo]))


def linear_schedule(steps, e_max):
    return GapSchedule(np.linspace(0.0, e_max, steps + 1))


class QuasistaticResult(NamedTuple):
    work: float
    heat_to_reservoir: float
    p_err: float


def quasistatic_erase(schedule: GapSchedule, model: ThermalModel) -> QuasistaticResult:
    """Average work and heat with the memory in equilibrium after every raise.

    Work is the left-endpoint sum of p1 dE; heat to the reservoir is
    -sum E_{i+1} (p1(E_{i+1}) - p1(E_i)).
    """
    e = schedule.energies
    p = thermal_occupation(e, model.beta)
    p = np.atleast_1d(p)
    work = math.fsum(p[:-1] * np.diff(e))
    heat = -math.fsum(e[1:] * np.diff(p))
    return QuasistaticResult(work, heat + 0.0, float(p[-1]))


def partition_ratio(schedule: GapSchedule, model: ThermalModel) -> float:
    """Z_f / Z_i for the two-level memory with Z = 1 + e^{-beta E}."""
    b = model.beta
    log_zf = np.logaddexp(0.0, -b * schedule.final_gap)
    log_zi = np.logaddexp(0.0, -b * float(schedule.energies[0]))
    return float(np.exp(log_zf - log_zi))


def free_energy_change(schedule: GapSchedule, model: ThermalModel) -> float:
    return -math.log(partition_ratio(schedule, model)) / model.beta


@dataclass(frozen=True)
class TrajectoryRecord:
    work: float
    heat_to_reservoir: float
    final_bit: int


@dataclass(frozen=True, eq=False)
class TrajectoryBatch:
    seed: int
    work: np.ndarray
    heat_to_reservoir: np.ndarray
    final_bit: np.ndarray

    def __len__(self):
        return self.work.size

    def rows(self):
        for w, q, b in zip(self.work, self.heat_to_reservoir, self.final_bit):
            yield TrajectoryRecord(float(w), float(q), int(b))


def _occupations(schedule, model):
    return np.atleast_1d(thermal_occupation(schedule.energies, model.beta))


def sample_trajectory(schedule: GapSchedule, model: ThermalModel, seed: int) -> TrajectoryRecord:
    """One stochastic run; deterministic given ``seed``."""
    rng = np.random.default_rng(seed)
    u = rng.random((1, schedule.energies.size))
    w, q, b = _core.sample_paths(schedule.energies, _occupations(schedule, model), u)
    return TrajectoryRecord(float(w[0]), float(q[0]), int(b[0]))


def sample_trajectories(
    schedule: GapSchedule, model: ThermalModel, runs: int, seed: int, workers: int = 1
) -> TrajectoryBatch:
    """``runs`` independent trajectories; output does not depend on ``workers``."""
    e = schedule.energies
    p = _occupations(schedule, model)

    def block(rng, size):
        return _core.sample_paths(e, p, rng.random((size, e.size)))

    parts = map_blocks(block, seed, runs, workers)
    return TrajectoryBatch(
        seed,
        np.concatenate([x[0] for x in parts]),
        np.concatenate([x[1] for x in parts]),
        np.concatenate([x[2] for x in parts]),
    )


class ExactDistributions(NamedTuple):
    work: DiscreteDistribution
    heat_to_reservoir: DiscreteDistribution


def enumerate_trajectories(schedule: GapSchedule, model: ThermalModel):
    """Raw (work, heat, prob, final_bit) arrays over all 2**(steps+1) bit paths."""
    if schedule.steps > MAX_ENUMERATION_STEPS:
        raise TooManySteps(
            f"exact enumeration supports at most {MAX_ENUMERATION_STEPS} steps, got {schedule.steps}"
        )
    return _core.enumerate_paths(schedule.energies, _occupations(schedule, model))


def work_distribution_exact(schedule: GapSchedule, model: ThermalModel) -> ExactDistributions:
    """Exact PMFs of trajectory work and reservoir heat by path enumeration."""
    w, q, prob, _ = enumerate_trajectories(schedule, model)
    return ExactDistributions(
        DiscreteDistribution.from_weighted(w, prob),
        DiscreteDistribution.from_weighted(q, prob),
    )


def _as_distribution(dist):
    if isinstance(dist, DiscreteDistribution):
        return dist
    values, probs = dist
    probs = np.asarray(probs, dtype=np.float64)
    if abs(math.fsum(probs) - 1.0) > 1e-12:
        raise UnnormalizedDistribution("distribution is not normalized")
    return DiscreteDistribution(values, probs)


def jarzynski_check(dist, beta: float, z_ratio: float) -> float:
    """<e^{-beta W}> - Z_f/Z_i, i.e. zero when <e^{-beta (W - dF)}> = 1."""
    _check_beta(beta)
    if not z_ratio > 0:
        raise ValidationError("Z_ratio must be > 0")
    dist = _as_distribution(dist)
    shift = float(dist.values.min())
    # factor out the smallest work so the exponentials cannot overflow
    avg = dist.expect(lambda w: np.exp(-beta * (w - shift)))
    return avg * math.exp(-beta * shift) - z_ratio


def mean_work_bound(schedule: GapSchedule, model: ThermalModel) -> float:
    """Jensen lower bound (ln Z_i - ln Z_f) / beta on the mean work."""
    return free_energy_change(schedule, model)


def landauer_violation_tail(dist, beta: float, eps: float):
    """(P(Q_R < ln2/beta - eps), e^{-eps beta}) for a heat distribution."""
    _check_beta(beta)
    if eps < 0:
        raise ValidationError("eps must be >= 0")
    dist = _as_distribution(dist)
    threshold = LN2 / beta - eps
    return dist.prob_below(threshold), math.exp(-eps * beta)
