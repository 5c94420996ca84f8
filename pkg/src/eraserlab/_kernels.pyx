# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of ``_kernels_py``; identical signatures and operation order."""
import numpy as np
cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"


def enumerate_paths(energies, p):
    cdef const double[::1] e = np.ascontiguousarray(energies, dtype=np.float64)
    cdef const double[::1] pp = np.ascontiguousarray(p, dtype=np.float64)
    cdef Py_ssize_t n = e.shape[0] - 1
    cdef Py_ssize_t npaths = (<Py_ssize_t>1) << (n + 1)
    work_a = np.empty(npaths)
    heat_a = np.empty(npaths)
    prob_a = np.empty(npaths)
    bit_a = np.empty(npaths, dtype=np.int8)
    cdef double[::1] work = work_a
    cdef double[::1] heat = heat_a
    cdef double[::1] prob = prob_a
    cdef signed char[::1] fbit = bit_a
    cdef Py_ssize_t i, j, half
    cdef double de, en, b
    with nogil:
        work[0] = 0.0
        work[1] = 0.0
        heat[0] = 0.0
        heat[1] = 0.0
        prob[0] = 1.0 - pp[0]
        prob[1] = pp[0]
        fbit[0] = 0
        fbit[1] = 1
        half = 2
        # level i doubles the filled prefix; upper copy takes b_{i+1} = 1
        for i in range(n):
            de = e[i + 1] - e[i]
            en = e[i + 1]
            for j in range(half):
                b = <double>fbit[j]
                work[j] = work[j] + b * de
                work[j + half] = work[j]
                heat[j + half] = heat[j] + en * (b - 1.0)
                heat[j] = heat[j] + en * (b - 0.0)
                prob[j + half] = prob[j] * pp[i + 1]
                prob[j] = prob[j] * (1.0 - pp[i + 1])
                fbit[j + half] = 1
                fbit[j] = 0
            half = half * 2
    return work_a, heat_a, prob_a, bit_a


def sample_paths(energies, p, uniforms):
    cdef const double[::1] e = np.ascontiguousarray(energies, dtype=np.float64)
    cdef const double[::1] pp = np.ascontiguousarray(p, dtype=np.float64)
    cdef const double[:, ::1] u = np.ascontiguousarray(uniforms, dtype=np.float64)
    cdef Py_ssize_t runs = u.shape[0]
    cdef Py_ssize_t n = e.shape[0] - 1
    work_a = np.empty(runs)
    heat_a = np.empty(runs)
    bit_a = np.empty(runs, dtype=np.int8)
    cdef double[::1] work = work_a
    cdef double[::1] heat = heat_a
    cdef signed char[::1] fbit = bit_a
    cdef Py_ssize_t r, i
    cdef double w, q, b, nb
    with nogil:
        for r in range(runs):
            b = 1.0 if u[r, 0] < pp[0] else 0.0
            w = 0.0
            q = 0.0
            for i in range(n):
                w = w + b * (e[i + 1] - e[i])
                nb = 1.0 if u[r, i + 1] < pp[i + 1] else 0.0
                q = q + e[i + 1] * (b - nb)
                b = nb
            work[r] = w
            heat[r] = q
            fbit[r] = <signed char>b
    return work_a, heat_a, bit_a


def spinlabor_counts(f, uniforms):
    cdef const double[::1] ff = np.ascontiguousarray(f, dtype=np.float64)
    cdef const double[:, ::1] u = np.ascontiguousarray(uniforms, dtype=np.float64)
    cdef Py_ssize_t runs = u.shape[0]
    cdef Py_ssize_t m = u.shape[1]
    out_a = np.empty(runs, dtype=np.int64)
    cdef long long[::1] out = out_a
    cdef Py_ssize_t r, j
    cdef long long c
    with nogil:
        for r in range(runs):
            c = 0
            for j in range(m):
                if u[r, j] < ff[j]:
                    c += 1
            out[r] = c
    return out_a


def bernoulli_pmf(f):
    cdef const double[::1] ff = np.ascontiguousarray(f, dtype=np.float64)
    cdef Py_ssize_t m = ff.shape[0]
    pmf_a = np.zeros(m + 1)
    tmp_a = np.zeros(m + 1)
    cdef double[::1] pmf = pmf_a
    cdef double[::1] tmp = tmp_a
    cdef Py_ssize_t k, j
    cdef double q, v
    pmf[0] = 1.0
    with nogil:
        for k in range(m):
            q = ff[k]
            for j in range(k + 1):
                tmp[j] = pmf[j] * (1.0 - q)
            tmp[k + 1] = 0.0
            for j in range(k + 1):
                v = tmp[j + 1] + pmf[j] * q
                tmp[j + 1] = v
            for j in range(k + 2):
                pmf[j] = tmp[j]
    return pmf_a
