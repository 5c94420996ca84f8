import itertools
import math
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import expit

from conftest import KERNEL_MODULES
from eraserlab import _kernels_py

probs = st.floats(0.0, 1.0, allow_nan=False)


def brute_force_pmf(f):
    """PMF of a sum of independent Bernoullis by summing over all 2^m outcomes."""
    f = np.asarray(f)
    m = f.size
    bits = ((np.arange(2 ** m)[:, None] >> np.arange(m)) & 1).astype(bool)
    w = np.prod(np.where(bits, f, 1.0 - f), axis=1)
    return np.bincount(bits.sum(axis=1), weights=w, minlength=m + 1)


def brute_force_paths(e, p):
    """Work, heat and probability of every bit path, looping in plain Python."""
    n = len(e) - 1
    out = {}
    for bits in itertools.product((0, 1), repeat=n + 1):
        prob = 1.0
        for i, b in enumerate(bits):
            prob *= p[i] if b else 1 - p[i]
        w = sum(bits[i] * (e[i + 1] - e[i]) for i in range(n))
        q = sum(e[i + 1] * (bits[i] - bits[i + 1]) for i in range(n))
        idx = sum(b << i for i, b in enumerate(bits))
        out[idx] = (w, q, prob, bits[-1])
    return out


class TestBernoulliPmf:
    @pytest.mark.parametrize("m", [1, 2, 5, 10, 14])
    def test_matches_enumeration(self, kernels, m):
        f = np.random.default_rng(m).random(m)
        np.testing.assert_allclose(kernels.bernoulli_pmf(f), brute_force_pmf(f), atol=1e-15, rtol=1e-12)

    def test_spin_factors_20(self, kernels):
        f = np.concatenate([[0.5], expit(-np.arange(2, 21) * 1.0)])
        ref = brute_force_pmf(f)
        np.testing.assert_allclose(kernels.bernoulli_pmf(f), ref, atol=1e-15)

    def test_empty(self, kernels):
        assert kernels.bernoulli_pmf(np.array([])).tolist() == [1.0]

    def test_degenerate(self, kernels):
        assert kernels.bernoulli_pmf(np.array([1.0, 0.0, 1.0])).tolist() == [0.0, 0.0, 1.0, 0.0]


class TestEnumeratePaths:
    def test_against_loop(self, kernels):
        e = np.array([0.0, 0.3, 1.1, 1.5, 4.0])
        p = expit(-e)
        w, q, prob, fb = kernels.enumerate_paths(e, p)
        ref = brute_force_paths(e, p)
        for idx, (rw, rq, rp, rb) in ref.items():
            assert w[idx] == pytest.approx(rw, abs=1e-14)
            assert q[idx] == pytest.approx(rq, abs=1e-14)
            assert prob[idx] == pytest.approx(rp, rel=1e-13)
            assert fb[idx] == rb

    def test_probabilities_sum_to_one(self, kernels):
        e = np.linspace(0, 3, 12)
        _, _, prob, _ = kernels.enumerate_paths(e, expit(-e))
        assert math.fsum(prob) == pytest.approx(1.0, abs=1e-14)

    def test_heat_is_work_minus_final_energy(self, kernels):
        e = np.array([0.0, 0.5, 0.9, 2.0])
        w, q, _, fb = kernels.enumerate_paths(e, expit(-e))
        np.testing.assert_allclose(q, w - e[-1] * fb, atol=1e-14)


class TestSamplePaths:
    def test_rows_follow_uniforms(self, kernels):
        e = np.array([0.0, 1.0, 2.0])
        p = np.array([0.5, 0.3, 0.1])
        u = np.array([[0.4, 0.2, 0.05], [0.6, 0.9, 0.9], [0.4, 0.9, 0.05]])
        w, q, fb = kernels.sample_paths(e, p, u)
        # bits: (1,1,1), (0,0,0), (1,0,1)
        np.testing.assert_array_equal(w, [2.0, 0.0, 1.0])
        np.testing.assert_array_equal(q, [0.0, 0.0, -1.0])
        np.testing.assert_array_equal(fb, [1, 0, 1])

    def test_spinlabor_counts(self, kernels):
        f = np.array([0.5, 0.2])
        u = np.array([[0.1, 0.1], [0.6, 0.1], [0.6, 0.3]])
        assert kernels.spinlabor_counts(f, u).tolist() == [2, 1, 0]


@pytest.mark.skipif(len(KERNEL_MODULES) < 2, reason="compiled extension not built")
class TestBackendEquivalence:
    cy = KERNEL_MODULES.get("cython")
    py = _kernels_py

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.floats(0, 5), min_size=1, max_size=10), st.integers(0, 2 ** 31))
    def test_enumerate(self, gaps, seed):
        e = np.concatenate([[0.0], np.cumsum(gaps)])
        p = np.random.default_rng(seed).random(e.size)
        for a, b in zip(self.cy.enumerate_paths(e, p), self.py.enumerate_paths(e, p)):
            np.testing.assert_array_equal(a, b)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.floats(0, 5), min_size=1, max_size=30), st.integers(0, 2 ** 31))
    def test_sample(self, gaps, seed):
        e = np.concatenate([[0.0], np.cumsum(gaps)])
        rng = np.random.default_rng(seed)
        p = rng.random(e.size)
        u = rng.random((50, e.size))
        for a, b in zip(self.cy.sample_paths(e, p, u), self.py.sample_paths(e, p, u)):
            np.testing.assert_array_equal(a, b)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(probs, min_size=0, max_size=60))
    def test_pmf(self, f):
        f = np.array(f, dtype=float)
        np.testing.assert_array_equal(self.cy.bernoulli_pmf(f), self.py.bernoulli_pmf(f))

    @settings(max_examples=30, deadline=None)
    @given(st.lists(probs, min_size=1, max_size=20), st.integers(0, 2 ** 31))
    def test_counts(self, f, seed):
        f = np.array(f)
        u = np.random.default_rng(seed).random((40, f.size))
        np.testing.assert_array_equal(self.cy.spinlabor_counts(f, u), self.py.spinlabor_counts(f, u))


def _backend_in_subprocess(env_extra):
    env = dict(os.environ, **env_extra)
    out = subprocess.run([sys.executable, "-c", "import eraserlab; print(eraserlab.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    return out.stdout.strip()


def test_pure_python_switch():
    assert _backend_in_subprocess({"ERASERLAB_PURE_PYTHON": "1"}) == "python"


@pytest.mark.skipif(len(KERNEL_MODULES) < 2, reason="compiled extension not built")
def test_compiled_is_default():
    env = {k: v for k, v in os.environ.items() if k != "ERASERLAB_PURE_PYTHON"}
    out = subprocess.run([sys.executable, "-c", "import eraserlab; print(eraserlab.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "cython"
