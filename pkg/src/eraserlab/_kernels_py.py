"""Pure numpy implementations of the hot loops.

Every function here has a twin in ``_kernels.pyx`` with the same signature
and the same floating-point operation order, so the two backends agree
bit for bit.
"""
import numpy as np

BACKEND = "python"


def enumerate_paths(energies, p):
    """All 2**(n+1) bit paths of the raise-then-thermalize process.

    ``energies`` has n+1 gap values, ``p[i]`` is the occupation of the upper
    level after thermalizing at ``energies[i]``. Path index bit ``i`` holds
    the memory bit b_i. Returns (work, heat_to_reservoir, prob, final_bit).
    """
    energies = np.ascontiguousarray(energies, dtype=np.float64)
    p = np.ascontiguousarray(p, dtype=np.float64)
    n = energies.shape[0] - 1
    work = np.zeros(2)
    heat = np.zeros(2)
    prob = np.array([1.0 - p[0], p[0]])
    bit = np.array([0.0, 1.0])
    for i in range(n):
        work = work + bit * (energies[i + 1] - energies[i])
        e = energies[i + 1]
        work = np.concatenate([work, work])
        heat = np.concatenate([heat + e * (bit - 0.0), heat + e * (bit - 1.0)])
        prob = np.concatenate([prob * (1.0 - p[i + 1]), prob * p[i + 1]])
        bit = np.concatenate([np.zeros_like(bit), np.ones_like(bit)])
    return work, heat, prob, bit.astype(np.int8)


def sample_paths(energies, p, uniforms):
    """Trajectory work/heat for each row of pre-drawn uniforms (runs, n+1)."""
    energies = np.ascontiguousarray(energies, dtype=np.float64)
    p = np.ascontiguousarray(p, dtype=np.float64)
    u = np.ascontiguousarray(uniforms, dtype=np.float64)
    runs = u.shape[0]
    n = energies.shape[0] - 1
    bit = (u[:, 0] < p[0]).astype(np.float64)
    work = np.zeros(runs)
    heat = np.zeros(runs)
    for i in range(n):
        work += bit * (energies[i + 1] - energies[i])
        nxt = (u[:, i + 1] < p[i + 1]).astype(np.float64)
        heat += energies[i + 1] * (bit - nxt)
        bit = nxt
    return work, heat, bit.astype(np.int8)


def spinlabor_counts(f, uniforms):
    """Number of successes per row; column j succeeds when u < f[j]."""
    f = np.ascontiguousarray(f, dtype=np.float64)
    u = np.ascontiguousarray(uniforms, dtype=np.float64)
    return np.count_nonzero(u < f[None, :], axis=1).astype(np.int64)


def bernoulli_pmf(f):
    """PMF of a sum of independent Bernoulli(f[j]) variables."""
    f = np.ascontiguousarray(f, dtype=np.float64)
    pmf = np.ones(1)
    for q in f:
        new = np.empty(pmf.shape[0] + 1)
        new[:-1] = pmf * (1.0 - q)
        new[-1] = 0.0
        new[1:] += pmf * q
        pmf = new
    return pmf
