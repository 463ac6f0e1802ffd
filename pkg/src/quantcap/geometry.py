"""Affine hyperplane arrangements, general-position checks and cell enumeration.

An arrangement is the set of hyperplanes ``{x : a_i @ x = b_i}``. A cell is a
nonempty open region ``{x : s_i * (a_i @ x - b_i) > 0 for all i}`` labelled by
its sign vector ``s``.

Feasibility and placement of points inside cells go through a max-margin
linear program (a Chebyshev-centre style LP) solved by the dense simplex in
:mod:`quantcap.kernels`. The Euclidean ball ``|x| <= R`` is replaced by a
circumscribed polytope and the answer is checked against the exact norm
afterwards, so every reported margin is actually achieved.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from . import kernels

SignVector = tuple[int, ...]

GP_TOL = 1e-10
SEARCH_FACTOR = 10.0
FEASIBILITY_TOL = 1e-9
# relative slack allowed when checking the exact norm of an LP solution
NORM_SLACK = 1e-12
# weight of the |x|_1 penalty used to pick a canonical max-margin point
TIEBREAK = 1e-7


class InvalidArrangement(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class HyperplaneArrangement:
    """Hyperplanes ``normals[i] @ x = offsets[i]`` in ``R^dim``."""

    normals: np.ndarray
    offsets: np.ndarray

    def __init__(self, normals, offsets, dim: Optional[int] = None):
        A = np.array(normals, dtype=np.float64)
        b = np.array(offsets, dtype=np.float64).reshape(-1)
        if A.size == 0:
            if dim is None:
                dim = A.shape[1] if A.ndim == 2 else None
            if dim is None or dim < 1:
                raise InvalidArrangement("empty arrangement needs an explicit dim")
            A = np.zeros((0, dim))
        if A.ndim != 2:
            raise InvalidArrangement("normals must be a 2-d array")
        if dim is not None and A.shape[1] != dim:
            raise InvalidArrangement(f"normals have {A.shape[1]} columns, dim={dim}")
        if b.shape[0] != A.shape[0]:
            raise InvalidArrangement(
                f"{A.shape[0]} normals but {b.shape[0]} offsets"
            )
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise InvalidArrangement("normals and offsets must be finite")
        norms = np.linalg.norm(A, axis=1)
        if np.any(norms <= 0):
            bad = int(np.flatnonzero(norms <= 0)[0])
            raise InvalidArrangement(f"hyperplane {bad} has a zero normal")
        A.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "normals", A)
        object.__setattr__(self, "offsets", b)

    @property
    def dim(self) -> int:
        return self.normals.shape[1]

    @property
    def count(self) -> int:
        return self.normals.shape[0]

    @property
    def row_norms(self) -> np.ndarray:
        return np.linalg.norm(self.normals, axis=1)

    def unit(self) -> tuple[np.ndarray, np.ndarray]:
        """Normals and offsets scaled so every normal has unit length."""
        nrm = self.row_norms
        return self.normals / nrm[:, None], self.offsets / nrm

    def signed_distances(self, x) -> np.ndarray:
        """Signed Euclidean distance of ``x`` (or rows of ``x``) to each hyperplane."""
        u, d = self.unit()
        x = np.asarray(x, dtype=np.float64)
        return x @ u.T - d

    def sign_vector(self, x) -> SignVector:
        """Side of each hyperplane that ``x`` lies on (+1 for ``a @ x > b``)."""
        return tuple(1 if s > 0 else -1 for s in self.signed_distances(x))

    def subset(self, rows) -> "HyperplaneArrangement":
        rows = list(rows)
        return HyperplaneArrangement(self.normals[rows], self.offsets[rows], dim=self.dim)

    def scaled(self, alpha: float) -> "HyperplaneArrangement":
        """The arrangement dilated by ``alpha`` about the origin."""
        return HyperplaneArrangement(self.normals, self.offsets * alpha, dim=self.dim)

    def __repr__(self):
        return f"HyperplaneArrangement(count={self.count}, dim={self.dim})"


@dataclass(frozen=True)
class Cell:
    sign_vector: SignVector
    witness: np.ndarray
    margin: float


def is_general_position(arr: HyperplaneArrangement, tol: float = GP_TOL) -> bool:
    """True when every ``min(n, m)`` rows of the normal matrix are independent.

    Independence is certified through singular values: the smallest singular
    value of each row subset must exceed ``tol`` times the largest singular
    value of the full normal matrix.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    n, m = arr.count, arr.dim
    if n == 0:
        return True
    k = min(n, m)
    scale = np.linalg.svd(arr.normals, compute_uv=False)[0]
    idx = np.array(list(itertools.combinations(range(n), k)))
    for start in range(0, len(idx), 4096):
        block = arr.normals[idx[start:start + 4096]]
        sv = np.linalg.svd(block, compute_uv=False)
        if np.any(sv[:, k - 1] <= tol * scale):
            return False
    return True


def vertex_radius(arr: HyperplaneArrangement) -> float:
    """Largest norm of a minimal face (vertex, or flat when ``n < m``).

    Every cell of a general-position arrangement has one of these faces in its
    closure, so any ball strictly larger than this radius meets every cell.
    """
    n, m = arr.count, arr.dim
    if n == 0:
        return 0.0
    k = min(n, m)
    best = 0.0
    for rows in itertools.combinations(range(n), k):
        rows = list(rows)
        sol, *_ = np.linalg.lstsq(arr.normals[rows], arr.offsets[rows], rcond=None)
        best = max(best, float(np.linalg.norm(sol)))
    return best


@lru_cache(maxsize=None)
def ball_facets(dim: int) -> np.ndarray:
    """Unit facet normals of the polytope used in place of the Euclidean ball.

    The polytope ``{x : F @ x <= R}`` contains the ball of radius ``R``. Uses a
    regular 64-gon in the plane, a 128-point Fibonacci sphere in 3-d and the
    120-cell (facet normals = 600-cell vertices) in 4-d.
    """
    if dim == 1:
        F = np.array([[1.0], [-1.0]])
    elif dim == 2:
        ang = 2 * np.pi * np.arange(64) / 64
        F = np.column_stack([np.cos(ang), np.sin(ang)])
    elif dim == 3:
        k = np.arange(128) + 0.5
        z = 1 - 2 * k / 128
        phi = np.pi * (1 + 5**0.5) * k
        rho = np.sqrt(1 - z * z)
        F = np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])
    elif dim == 4:
        F = _six_hundred_cell_vertices()
    else:
        # cross-polytope and cube directions; coarse but valid outer bound
        eye = np.eye(dim)
        cube = np.array(list(itertools.product((-1.0, 1.0), repeat=dim))) / math.sqrt(dim)
        F = np.vstack([eye, -eye, cube])
    F = F / np.linalg.norm(F, axis=1, keepdims=True)
    F.setflags(write=False)
    return F


def _six_hundred_cell_vertices() -> np.ndarray:
    phi = (1 + 5**0.5) / 2
    verts = []
    for i in range(4):
        for s in (-1.0, 1.0):
            v = np.zeros(4)
            v[i] = s
            verts.append(v)
    for signs in itertools.product((-0.5, 0.5), repeat=4):
        verts.append(np.array(signs))
    base = (phi / 2, 0.5, 1 / (2 * phi), 0.0)
    even = [p for p in itertools.permutations(range(4)) if _parity(p) == 0]
    for p in even:
        coords = [base[p[i]] for i in range(4)]
        nz = [i for i in range(4) if coords[i] != 0.0]
        for signs in itertools.product((-1.0, 1.0), repeat=len(nz)):
            v = np.array(coords)
            for i, s in zip(nz, signs):
                v[i] *= s
            verts.append(v)
    return np.array(verts)


def _parity(perm) -> int:
    perm = list(perm)
    swaps = 0
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            swaps += 1
    return swaps % 2


def solve_margin_lp(unit_normals, unit_offsets, signs, radius, inscribed=False,
                    tiebreak=False):
    """Largest common margin of a sign pattern inside a ball.

    Maximizes ``eps`` subject to ``signs_i * (u_i @ x - d_i) >= eps`` and
    ``|x| <= radius`` (or ``|x| + eps <= radius`` when ``inscribed``, which
    asks for the largest ball inside cell and outer ball together).
    With ``tiebreak`` a ``TIEBREAK * |x|_1`` penalty picks the maximizer
    closest to the origin when the optimum is not unique.

    Returns ``(x, eps)`` with ``eps`` recomputed at the returned ``x`` after
    the exact-norm check. ``eps`` may be negative when the pattern is empty.
    """
    u = np.asarray(unit_normals, dtype=np.float64)
    d = np.asarray(unit_offsets, dtype=np.float64)
    s = np.asarray(signs, dtype=np.float64)
    k, m = u.shape
    F = ball_facets(m)
    nf = F.shape[0]
    sa = s[:, None] * u
    sd = s * d
    e0 = (max(0.0, float(sd.max())) if k else 0.0) + 1.0
    nv = 2 * m + 1
    A = np.zeros((k + nf + 1, nv))
    rhs = np.empty(k + nf + 1)
    A[:k, :m] = -sa
    A[:k, m:2 * m] = sa
    A[:k, 2 * m] = 1.0
    rhs[:k] = e0 - sd
    A[k:k + nf, :m] = F
    A[k:k + nf, m:2 * m] = -F
    if inscribed:
        A[k:k + nf, 2 * m] = 1.0
        rhs[k:k + nf] = radius + e0
    else:
        rhs[k:k + nf] = radius
    A[-1, 2 * m] = 1.0
    rhs[-1] = 2 * e0 + radius
    cost = np.zeros(nv)
    cost[2 * m] = 1.0
    if tiebreak:
        cost[:2 * m] = -TIEBREAK
    status, z, _ = kernels.simplex_max(A, rhs, cost)
    if status != 0:
        raise RuntimeError(f"margin LP failed with status {status}")
    x = z[:m] - z[m:2 * m]

    nx = float(np.linalg.norm(x))
    if nx > radius * (1 + NORM_SLACK):
        x = x * (radius / nx)
        nx = radius
    slack = sa @ x - sd
    eps = float(slack.min()) if k else float("inf")
    if inscribed:
        eps = min(eps, radius - nx)
    elif k == 0:
        eps = radius
    return x, eps


def max_margin_center(arr: HyperplaneArrangement, sv, ball_radius: float):
    """Point of the cell ``sv`` farthest from every hyperplane, within a ball.

    Solves ``max eps`` s.t. ``sv_i (a_i @ x - b_i) >= eps |a_i|`` and
    ``|x| <= ball_radius``. Returns ``(center, margin)`` or ``None`` when the
    best margin is not positive.
    """
    if ball_radius <= 0:
        raise ValueError("ball_radius must be positive")
    sv = np.asarray(sv, dtype=np.float64)
    if sv.shape != (arr.count,):
        raise ValueError(f"sign vector of length {sv.shape} for {arr.count} hyperplanes")
    u, d = arr.unit()
    x, eps = solve_margin_lp(u, d, sv, ball_radius, tiebreak=True)
    if not eps > 0:
        return None
    return x, eps


def inscribed_radius(arr: HyperplaneArrangement, sv, outer_radius: float):
    """Radius and centre of the largest ball inside both the cell and ``S(0, outer_radius)``."""
    sv = np.asarray(sv, dtype=np.float64)
    u, d = arr.unit()
    return solve_margin_lp(u, d, sv, outer_radius, inscribed=True, tiebreak=True)


def feasibility_tol(arr: HyperplaneArrangement) -> float:
    if arr.count == 0:
        return FEASIBILITY_TOL
    scale = float(np.abs(arr.offsets).max() + arr.row_norms.max())
    return FEASIBILITY_TOL * scale


def enumerate_cells(arr: HyperplaneArrangement, bound_radius: float) -> list[Cell]:
    """All nonempty cells, found by depth-first extension of sign prefixes.

    A prefix is pruned as soon as its max-margin program (restricted to the
    ball of radius ``10 * bound_radius``) has margin below the feasibility
    tolerance. A child whose sign agrees with the parent's witness reuses it
    instead of re-solving. Cells are returned sorted by sign vector.
    """
    if bound_radius <= 0:
        raise ValueError("bound_radius must be positive")
    n, m = arr.count, arr.dim
    radius = SEARCH_FACTOR * bound_radius
    if n == 0:
        return [Cell((), np.zeros(m), radius)]
    u, d = arr.unit()
    tol = feasibility_tol(arr)

    cells = []
    # stack entries: (prefix signs, witness, margin)
    stack = [((), np.zeros(m), math.inf)]
    while stack:
        prefix, w, margin = stack.pop()
        k = len(prefix)
        if k == n:
            cells.append(Cell(prefix, w, float(margin)))
            continue
        slack = float(u[k] @ w - d[k])
        children = []
        for s in (1, -1):
            child = prefix + (s,)
            if s * slack >= tol:
                children.append((child, w, min(margin, s * slack)))
                continue
            x, eps = solve_margin_lp(u[:k + 1], d[:k + 1], child, radius)
            if eps >= tol:
                children.append((child, x, eps))
        # push +1 first so the -1 branch is explored first
        stack.extend(sorted(children, key=lambda c: c[0], reverse=True))
    cells.sort(key=lambda c: c.sign_vector)
    return cells


def count_cells(arr: HyperplaneArrangement, bound_radius: Optional[float] = None) -> int:
    if bound_radius is None:
        bound_radius = max(1.0, 1.1 * vertex_radius(arr))
    return len(enumerate_cells(arr, bound_radius))
