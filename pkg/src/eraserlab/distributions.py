"""Finite discrete distributions over real outcomes."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UnnormalizedDistribution, ValidationError

NORM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DiscreteDistribution:
    """Probability mass function on strictly increasing ``values``."""

    values: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64).copy()
        probs = np.asarray(self.probs, dtype=np.float64).copy()
        if values.ndim != 1 or values.shape != probs.shape or values.size == 0:
            raise ValidationError("values and probs must be equal-length 1-d arrays")
        if not np.all(np.isfinite(values)):
            raise ValidationError("values must be finite")
        if np.any(np.diff(values) <= 0):
            raise ValidationError("values must be strictly increasing")
        if np.any(probs < 0):
            raise UnnormalizedDistribution("probabilities must be non-negative")
        total = math.fsum(probs)
        if abs(total - 1.0) > NORM_TOL:
            raise UnnormalizedDistribution(f"probabilities sum to {total!r}, not 1")
        values.flags.writeable = False
        probs.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_weighted(cls, values, weights, atol=1e-12) -> "DiscreteDistribution":
        """Merge outcomes that agree within ``atol`` (after sorting) and normalize.

        Used to collapse enumerated paths whose values differ only by
        floating-point summation order.
        """
        values = np.asarray(values, dtype=np.float64)
        weights = np.asarray(weights, dtype=np.float64)
        order = np.argsort(values, kind="stable")
        v = values[order]
        w = weights[order]
        if v.size == 0:
            raise ValidationError("no outcomes")
        starts = np.concatenate([[0], np.nonzero(np.diff(v) > atol)[0] + 1])
        merged_v = v[starts]
        merged_w = np.add.reduceat(w, starts)
        keep = merged_w > 0
        merged_v, merged_w = merged_v[keep], merged_w[keep]
        return cls(merged_v, merged_w / math.fsum(merged_w))

    @classmethod
    def from_samples(cls, samples, atol=1e-12) -> "DiscreteDistribution":
        samples = np.asarray(samples, dtype=np.float64)
        return cls.from_weighted(samples, np.ones_like(samples), atol=atol)

    def mean(self) -> float:
        return math.fsum(self.values * self.probs)

    def variance(self) -> float:
        m = self.mean()
        return math.fsum((self.values - m) ** 2 * self.probs)

    def expect(self, fn) -> float:
        """Expectation of ``fn(values)`` (vectorized callable)."""
        return math.fsum(np.asarray(fn(self.values), dtype=np.float64) * self.probs)

    def prob_below(self, x: float, inclusive: bool = False, atol: float = 0.0) -> float:
        """P(X < x), or P(X <= x) when ``inclusive``; ``atol`` absorbs lattice roundoff."""
        mask = self.values <= x + atol if inclusive else self.values < x - atol
        return math.fsum(self.probs[mask])

    def to_dict(self) -> dict:
        return {"values": self.values.tolist(), "probs": self.probs.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "DiscreteDistribution":
        return cls(data["values"], data["probs"])

    def __len__(self):
        return self.values.size
