"""Pure-numpy versions of the hot kernels.

These mirror ``quantcap._core`` line for line (same pivot rules, same
tie-breaking) and are used whenever the compiled extension is missing or
``QUANTCAP_PURE=1`` is set.
"""

import numpy as np

ENTER_TOL = 1e-11
PIVOT_TOL = 1e-11
TIE_TOL = 1e-12
# consecutive degenerate pivots before switching to Bland's rule
DEGENERATE_SWITCH = 20

OPTIMAL, UNBOUNDED, ITERATION_LIMIT = 0, 1, 2


def simplex_max(A, b, c, max_iter=0):
    """Maximize ``c @ z`` subject to ``A @ z <= b``, ``z >= 0``.

    ``b`` must be nonnegative so the all-slack basis is feasible.

    Returns
    -------
    status : int
        0 optimal, 1 unbounded, 2 iteration limit.
    z : ndarray
        Primal solution (length ``A.shape[1]``).
    value : float
        Objective at ``z``.
    """
    A = np.ascontiguousarray(A, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    c = np.ascontiguousarray(c, dtype=np.float64)
    nr, nv = A.shape
    if np.any(b < 0):
        raise ValueError("simplex_max needs b >= 0")
    ncol = nv + nr + 1
    T = np.zeros((nr + 1, ncol))
    T[:nr, :nv] = A
    T[np.arange(nr), nv + np.arange(nr)] = 1.0
    T[:nr, -1] = b
    T[nr, :nv] = -c
    basis = nv + np.arange(nr)
    if max_iter <= 0:
        max_iter = 50 * (nr + nv + 1)

    status = ITERATION_LIMIT
    bland = False
    degenerate_run = 0
    for _ in range(max_iter):
        red = T[nr, :-1]
        if bland:
            cand = np.flatnonzero(red < -ENTER_TOL)
            if cand.size == 0:
                status = OPTIMAL
                break
            col = cand[0]
        else:
            col = int(np.argmin(red))
            if red[col] >= -ENTER_TOL:
                status = OPTIMAL
                break
        colv = T[:nr, col]
        pos = colv > PIVOT_TOL
        if not pos.any():
            status = UNBOUNDED
            break
        ratios = np.full(nr, np.inf)
        ratios[pos] = T[:nr, -1][pos] / colv[pos]
        rmin = ratios.min()
        ties = np.flatnonzero(ratios <= rmin + TIE_TOL * max(1.0, rmin))
        row = ties[np.argmin(basis[ties])]
        if rmin <= TIE_TOL:
            degenerate_run += 1
            if degenerate_run > DEGENERATE_SWITCH:
                bland = True
        else:
            degenerate_run = 0
        T[row] /= T[row, col]
        f = T[:, col].copy()
        f[row] = 0.0
        T -= np.outer(f, T[row])
        basis[row] = col

    z = np.zeros(nv + nr)
    z[basis] = T[:nr, -1]
    return status, z[:nv], float(T[nr, -1])


def sign_tally(Z, V, offset):
    """Histogram of sign patterns of ``V @ z + offset`` over rows ``z`` of ``Z``.

    Bit ``j`` of a pattern code is set when quantizer ``j`` outputs +1.
    """
    Z = np.ascontiguousarray(Z, dtype=np.float64)
    V = np.ascontiguousarray(V, dtype=np.float64)
    q = V.shape[0]
    W = Z @ V.T + offset
    codes = (W > 0).astype(np.int64) @ (np.int64(1) << np.arange(q, dtype=np.int64))
    return np.bincount(codes, minlength=1 << q).astype(np.int64)
