# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels. Semantics match ``quantcap._kernels_py`` exactly."""

import numpy as np

cdef double ENTER_TOL = 1e-11
cdef double PIVOT_TOL = 1e-11
cdef double TIE_TOL = 1e-12
cdef int DEGENERATE_SWITCH = 20


def simplex_max(A, b, c, int max_iter=0):
    cdef const double[:, ::1] a = np.ascontiguousarray(A, dtype=np.float64)
    cdef const double[::1] bb = np.ascontiguousarray(b, dtype=np.float64)
    cdef const double[::1] cc = np.ascontiguousarray(c, dtype=np.float64)
    cdef Py_ssize_t nr = a.shape[0], nv = a.shape[1]
    cdef Py_ssize_t ncol = nv + nr + 1
    cdef Py_ssize_t rhs = ncol - 1
    cdef Py_ssize_t i, j, col, row
    cdef double best, v, rmin, ratio, piv, f, lim
    cdef int status = 2, bland = 0, degenerate_run = 0, it
    cdef Py_ssize_t best_basis

    for i in range(nr):
        if bb[i] < 0:
            raise ValueError("simplex_max needs b >= 0")

    T_arr = np.zeros((nr + 1, ncol))
    cdef double[:, ::1] t = T_arr
    basis_arr = np.empty(nr, dtype=np.intp)
    cdef Py_ssize_t[::1] basis = basis_arr

    for i in range(nr):
        for j in range(nv):
            t[i, j] = a[i, j]
        t[i, nv + i] = 1.0
        t[i, rhs] = bb[i]
        basis[i] = nv + i
    for j in range(nv):
        t[nr, j] = -cc[j]
    if max_iter <= 0:
        max_iter = 50 * (nr + nv + 1)

    for it in range(max_iter):
        col = -1
        if bland:
            for j in range(rhs):
                if t[nr, j] < -ENTER_TOL:
                    col = j
                    break
        else:
            best = 0.0
            for j in range(rhs):
                if j == 0 or t[nr, j] < best:
                    best = t[nr, j]
                    col = j
            if best >= -ENTER_TOL:
                col = -1
        if col < 0:
            status = 0
            break

        rmin = 0.0
        row = -1
        for i in range(nr):
            if t[i, col] > PIVOT_TOL:
                ratio = t[i, rhs] / t[i, col]
                if row < 0 or ratio < rmin:
                    rmin = ratio
                    row = i
        if row < 0:
            status = 1
            break
        lim = rmin + TIE_TOL * (rmin if rmin > 1.0 else 1.0)
        best_basis = basis[row]
        for i in range(nr):
            if t[i, col] > PIVOT_TOL:
                ratio = t[i, rhs] / t[i, col]
                if ratio <= lim and basis[i] < best_basis:
                    best_basis = basis[i]
                    row = i
        if rmin <= TIE_TOL:
            degenerate_run += 1
            if degenerate_run > DEGENERATE_SWITCH:
                bland = 1
        else:
            degenerate_run = 0

        piv = t[row, col]
        for j in range(ncol):
            t[row, j] = t[row, j] / piv
        for i in range(nr + 1):
            if i == row:
                continue
            f = t[i, col]
            if f != 0.0:
                for j in range(ncol):
                    t[i, j] = t[i, j] - f * t[row, j]
        basis[row] = col

    z = np.zeros(nv + nr)
    cdef double[::1] zz = z
    for i in range(nr):
        zz[basis[i]] = t[i, rhs]
    return status, z[:nv], float(t[nr, rhs])


def sign_tally(Z, V, offset):
    cdef const double[:, ::1] z = np.ascontiguousarray(Z, dtype=np.float64)
    cdef const double[:, ::1] v = np.ascontiguousarray(V, dtype=np.float64)
    cdef const double[::1] o = np.ascontiguousarray(offset, dtype=np.float64)
    cdef Py_ssize_t n = z.shape[0], nr = z.shape[1], q = v.shape[0]
    cdef Py_ssize_t s, j, k
    cdef long long code
    cdef double acc
    counts_arr = np.zeros(1 << q, dtype=np.int64)
    cdef long long[::1] counts = counts_arr
    for s in range(n):
        code = 0
        for j in range(q):
            acc = 0.0
            for k in range(nr):
                acc = acc + v[j, k] * z[s, k]
            if acc + o[j] > 0:
                code |= (<long long> 1) << j
        counts[code] += 1
    return counts_arr
