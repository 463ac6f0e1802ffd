"""Unit-sphere packings inside a ball that a hyperplane arrangement separates.

Two unit spheres are separated by hyperplane ``i`` when their centres lie on
opposite sides of it, each at distance at least 1. ``r_ssps(A, r)`` is the
largest number of unit spheres inside ``S(0, r)`` such that every pair is
separated by some hyperplane of ``A``.

:func:`pack_margin` gives a certified lower bound by placing one sphere per
cell wherever the cell (shrunk by 1) meets ``S(0, r - 1)``.
:func:`r_ssps_oracle` is an exhaustive grid/clique search for small planar
instances, used to check the solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import HyperplaneArrangement, enumerate_cells, max_margin_center

# slack on the unit-distance and containment checks
MARGIN_TOL = 1e-9
ORACLE_MAX_RADIUS = 8.0
ORACLE_MAX_STEP = 0.25


@dataclass(frozen=True, eq=False)
class Packing:
    centers: np.ndarray
    outer_radius: float
    arrangement: HyperplaneArrangement

    def __len__(self):
        return len(self.centers)


def validate_packing(packing: Packing, tol: float = MARGIN_TOL) -> list[str]:
    """Check containment and pairwise separation directly; returns the violations."""
    problems = []
    arr = packing.arrangement
    C = np.asarray(packing.centers, dtype=np.float64).reshape(-1, arr.dim)
    r = packing.outer_radius
    for i, c in enumerate(C):
        if np.linalg.norm(c) > r - 1 + tol:
            problems.append(f"center {i} leaves S(0, {r})")
    if arr.count == 0:
        if len(C) > 1:
            problems.append("no hyperplane to separate more than one sphere")
        return problems
    dist = arr.signed_distances(C)
    for i in range(len(C)):
        for j in range(i + 1, len(C)):
            ok = (dist[i] * dist[j] < 0) & (np.abs(dist[i]) >= 1 - tol) & (
                np.abs(dist[j]) >= 1 - tol
            )
            if not ok.any():
                problems.append(f"centers {i} and {j} are not separated")
    return problems


def pack_margin(arr: HyperplaneArrangement, r: float) -> Packing:
    """One unit sphere per cell that keeps distance >= 1 from every hyperplane.

    Each centre is the max-margin point of its cell within ``S(0, r - 1)``.
    Distinct cells differ in some sign, and that hyperplane is at distance
    >= 1 from both centres, so the result is separable.
    """
    if not r > 1:
        raise ValueError(f"outer radius must exceed 1, got {r}")
    centers = []
    for cell in enumerate_cells(arr, r):
        found = max_margin_center(arr, cell.sign_vector, r - 1)
        if found is not None and found[1] >= 1 - MARGIN_TOL:
            centers.append(found[0])
    C = np.array(centers).reshape(-1, arr.dim)
    return Packing(C, float(r), arr)


def log_r_ssps(arr: HyperplaneArrangement, r: float) -> float:
    """``log2`` of the :func:`pack_margin` count (a lower bound on ``log2 r_ssps``)."""
    if not r > 1:
        return 0.0
    return math.log2(max(1, len(pack_margin(arr, r))))


def _grid_candidates(r: float, step: float) -> np.ndarray:
    reach = r - 1
    if reach < 0:
        return np.zeros((0, 2))
    k = int(math.floor(reach / step + 1e-9))
    ticks = np.arange(-k, k + 1) * step
    X, Y = np.meshgrid(ticks, ticks, indexing="ij")
    pts = np.column_stack([X.ravel(), Y.ravel()])
    return pts[np.linalg.norm(pts, axis=1) <= reach + MARGIN_TOL]


def _max_clique(adj: list[int]) -> int:
    """Maximum clique size of a graph given as neighbour bitmasks."""
    n = len(adj)
    best = 0

    def expand(size, cand):
        nonlocal best
        while cand:
            if size + bin(cand).count("1") <= best:
                return
            v = cand.bit_length() - 1
            cand &= ~(1 << v)
            new = cand & adj[v]
            if new:
                expand(size + 1, new)
            elif size + 1 > best:
                best = size + 1

    expand(0, (1 << n) - 1)
    return best


def r_ssps_oracle(arr: HyperplaneArrangement, r: float, grid_step: float = 0.25) -> int:
    """Exact ``r_ssps`` over grid-point centres, planar instances only.

    Candidates are grid points with ``|c| <= r - 1``. Each candidate is reduced
    to its robust pattern: the side of every hyperplane it is at least 1 away
    from (0 otherwise). Two candidates are compatible when some hyperplane has
    them on opposite robust sides. Identical and dominated patterns are
    merged, then a branch-and-bound clique search finds the largest mutually
    compatible set. Same-cell candidates are never compatible, so at most one
    sphere per cell is used.
    """
    if arr.dim != 2:
        raise ValueError("the oracle handles planar arrangements only")
    if not 0 < r <= ORACLE_MAX_RADIUS:
        raise ValueError(f"r must lie in (0, {ORACLE_MAX_RADIUS}]")
    if not 0 < grid_step <= ORACLE_MAX_STEP:
        raise ValueError(f"grid_step must lie in (0, {ORACLE_MAX_STEP}]")
    pts = _grid_candidates(r, grid_step)
    if len(pts) == 0:
        return 0
    if arr.count == 0:
        return 1
    dist = arr.signed_distances(pts)
    robust = np.where(np.abs(dist) >= 1 - MARGIN_TOL, np.sign(dist), 0).astype(np.int8)
    patterns = np.unique(robust, axis=0)

    # drop patterns whose nonzero entries are contained in another pattern's
    nz = patterns != 0
    keep = []
    for i, p in enumerate(patterns):
        dominated = False
        for j, q in enumerate(patterns):
            if i != j and np.all(q[nz[i]] == p[nz[i]]) and nz[j].sum() > nz[i].sum():
                dominated = True
                break
        if not dominated:
            keep.append(p)
    P = np.array(keep, dtype=np.int64)
    conflict = (P[:, None, :] * P[None, :, :] == -1).any(axis=2)
    adj = [sum(1 << int(j) for j in np.flatnonzero(row)) for row in conflict]
    return _max_clique(adj)
