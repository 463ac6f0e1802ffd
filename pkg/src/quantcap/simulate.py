"""Monte-Carlo and exact evaluation of achievable rates with one-bit quantizers.

For a channel ``H`` and configuration ``{V, t}`` the receiver sees
``Y = sign(V (H x + Z) + t)``. Inputs are the centres of a separable packing
of the induced arrangement (scaled with the power), used with a uniform
prior. The channel law ``p(y | x)`` is computed exactly when the combined
noise ``V Z`` has independent components and estimated by sampling
otherwise.

Random streams are Philox (counter-based) generators keyed by the master
seed plus the indices of the work unit, so every trial, strategy, power and
input point has its own reproducible stream.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import ndtr

from . import kernels
from .bounds import unquantized_capacity
from .configs import Architecture, ChannelInstance, build_config, induced_arrangement
from .geometry import enumerate_cells, inscribed_radius, max_margin_center
from .packing import MARGIN_TOL, pack_margin

RANK_TOL = 1e-8
MAX_RESAMPLES = 100
DIAGONAL_TOL = 1e-9
MAX_BA_ITERS = 100_000

# stream-key tags; keep stable, they define the random numbers
_CHANNEL_KEY = 0
_NOISE_KEY = 1
_STRATEGY_KEYS = {a: i for i, a in enumerate(Architecture)}


def _entropy(seed) -> list[int]:
    if isinstance(seed, (int, np.integer)):
        seed = [seed]
    out = [int(s) for s in seed]
    if any(s < 0 for s in out):
        raise ValueError("seeds must be nonnegative integers")
    return out


def stream(seed, *keys) -> np.random.Generator:
    """Philox generator for the work unit ``(seed, *keys)``."""
    ss = np.random.SeedSequence(_entropy(seed) + [int(k) for k in keys])
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True, eq=False)
class Constellation:
    points: np.ndarray
    prior: np.ndarray
    margin: float = 1.0
    relaxed: bool = False

    def __post_init__(self):
        if abs(self.prior.sum() - 1) > 1e-12:
            raise ValueError("prior must sum to 1")
        if len(self.points) != len(self.prior):
            raise ValueError("one prior weight per point")

    def __len__(self):
        return len(self.points)

    @property
    def average_power(self) -> float:
        return float(self.prior @ np.sum(self.points**2, axis=1))


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    rows: np.ndarray
    labels: list

    @property
    def n_inputs(self) -> int:
        return self.rows.shape[0]


@dataclass(frozen=True)
class RateEntry:
    power_db: float
    strategy: str
    mean_rate_bits: float
    std_rate_bits: float
    trials: int


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    power_db: float
    strategy: str
    rate_bits: float
    n_points: int
    relaxed: bool
    exact: bool


@dataclass
class RateCurve:
    entries: list[RateEntry]
    records: list[TrialRecord] = field(default_factory=list)

    def lookup(self, power_db: float, strategy: str) -> RateEntry:
        for e in self.entries:
            if e.strategy == strategy and e.power_db == power_db:
                return e
        raise KeyError((power_db, strategy))


def output_labels(n_tq: int) -> list[tuple[int, ...]]:
    """Sign patterns in code order: bit ``j`` of the index set means ``y_j = +1``."""
    return [
        tuple(1 if (code >> j) & 1 else -1 for j in range(n_tq)) for code in range(1 << n_tq)
    ]


def sample_channel(n_t: int, n_r: int, seed) -> ChannelInstance:
    """i.i.d. standard normal ``N_r x N_t`` matrix with each row scaled to unit norm."""
    if n_t < 1 or n_r < 1:
        raise ValueError("n_t and n_r must be >= 1")
    rng = stream(seed, _CHANNEL_KEY)
    for _ in range(MAX_RESAMPLES):
        H = rng.standard_normal((n_r, n_t))
        H /= np.linalg.norm(H, axis=1, keepdims=True)
        sv = np.linalg.svd(H, compute_uv=False)
        if sv[-1] > RANK_TOL * sv[0]:
            return ChannelInstance.from_matrix(H)
    raise RuntimeError(f"no full-rank channel after {MAX_RESAMPLES} draws; check the seed")


def trial_channel(seed, trial: int, n_t: int, n_r: int) -> ChannelInstance:
    """Channel used by trial ``trial`` of :func:`rate_curve`."""
    return sample_channel(n_t, n_r, _entropy(seed) + [trial])


def _single_point(m):
    return Constellation(np.zeros((1, m)), np.ones(1), margin=0.0, relaxed=True)


def constellation_from_config(ch: ChannelInstance, cfg, power: float) -> Constellation:
    """Uniform constellation on the centres of a separable packing.

    Uses unit spheres inside ``S(0, sqrt(P))`` when at least two fit. Otherwise
    the common radius is relaxed to the largest ``m* <= 1`` for which two cells
    still hold a ball of radius ``m*`` inside ``S(0, sqrt(P))``; every cell that
    does contributes a point. With fewer than two cells the origin is used.
    """
    arr = induced_arrangement(ch, cfg)
    m = ch.n_t
    r = math.sqrt(max(power, 0.0))
    if arr.count == 0 or r == 0:
        return _single_point(m)
    if r > 1:
        packing = pack_margin(arr, r)
        if len(packing) >= 2:
            pts = packing.centers
            return Constellation(pts, np.full(len(pts), 1 / len(pts)), 1.0, False)

    cells = enumerate_cells(arr, r)
    radii = np.array([inscribed_radius(arr, c.sign_vector, r)[1] for c in cells])
    if len(cells) < 2:
        return _single_point(m)
    m_star = min(1.0, float(np.sort(radii)[-2]))
    if m_star <= 0:
        return _single_point(m)
    pts = []
    for cell, rho in zip(cells, radii):
        if rho < m_star * (1 - 1e-9):
            continue
        found = max_margin_center(arr, cell.sign_vector, r - m_star)
        if found is not None and found[1] >= m_star * (1 - 1e-9):
            pts.append(found[0])
        else:
            pts.append(inscribed_radius(arr, cell.sign_vector, r)[0])
    pts = np.array(pts)
    norms = np.linalg.norm(pts, axis=1)
    over = norms > r
    pts[over] *= (r / norms[over])[:, None]
    return Constellation(pts, np.full(len(pts), 1 / len(pts)), m_star, True)


def noise_is_independent(cfg) -> bool:
    V = np.asarray(cfg.combiner)
    C = V @ V.T
    off = C - np.diag(np.diag(C))
    return bool(np.all(np.abs(off) <= DIAGONAL_TOL))


def transition_exact(ch: ChannelInstance, cfg, cons: Constellation) -> TransitionMatrix:
    """Exact ``p(y | x)`` as a product of Gaussian tails; needs diagonal ``V V^T``."""
    if not noise_is_independent(cfg):
        raise ValueError(
            "combined noise V Z is correlated (V V^T not diagonal); use transition_mc"
        )
    V = np.asarray(cfg.combiner)
    sd = np.linalg.norm(V, axis=1)
    mean = (cons.points @ ch.matrix.T @ V.T + cfg.thresholds) / sd
    p_plus = ndtr(mean)
    p_minus = ndtr(-mean)
    q = V.shape[0]
    labels = output_labels(q)
    bits = np.array([[(code >> j) & 1 for j in range(q)] for code in range(1 << q)], dtype=bool)
    # rows[x, code] = prod_j (p_plus if bit else p_minus)
    rows = np.prod(np.where(bits[None, :, :], p_plus[:, None, :], p_minus[:, None, :]), axis=2)
    return TransitionMatrix(rows, labels)


def transition_mc(ch: ChannelInstance, cfg, cons: Constellation, n_samples: int, seed) -> TransitionMatrix:
    """Empirical ``p(y | x)`` from ``n_samples`` noise draws per input point."""
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    V = np.ascontiguousarray(cfg.combiner, dtype=np.float64)
    q = V.shape[0]
    offsets = cons.points @ ch.matrix.T @ V.T + cfg.thresholds
    rows = np.empty((len(cons), 1 << q))
    for i, off in enumerate(offsets):
        Z = stream(seed, i).standard_normal((n_samples, ch.n_r))
        rows[i] = kernels.sign_tally(Z, V, off) / n_samples
    return TransitionMatrix(rows, output_labels(q))


def _divergences(P: np.ndarray, q: np.ndarray) -> np.ndarray:
    """``D(P[x] || q)`` in bits for every row, with ``0 log 0 = 0``."""
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(P > 0, P / q, 1.0)
        return np.sum(np.where(P > 0, P * np.log2(ratio), 0.0), axis=1)


def mutual_information(tm: TransitionMatrix, prior) -> float:
    P = np.asarray(tm.rows, dtype=np.float64)
    prior = np.asarray(prior, dtype=np.float64)
    if prior.shape != (P.shape[0],):
        raise ValueError("prior length must match the number of inputs")
    q = prior @ P
    used = prior > 0
    return max(0.0, float(prior[used] @ _divergences(P[used], q)))


def optimize_input(tm: TransitionMatrix, tol: float = 1e-9, max_iter: int = MAX_BA_ITERS):
    """Blahut-Arimoto iteration on a fixed input support.

    Stops when ``max_x D(p(.|x) || q) - I <= tol``, which bounds the distance
    to capacity. Returns ``(capacity_bits, prior)``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    P = np.asarray(tm.rows, dtype=np.float64)
    r = np.full(P.shape[0], 1.0 / P.shape[0])
    gap = math.inf
    for _ in range(max_iter):
        D = _divergences(P, r @ P)
        value = float(r @ D)
        gap = float(D.max()) - value
        if gap <= tol:
            return max(0.0, value), r
        r = r * np.exp2(D - D.max())
        r /= r.sum()
    raise RuntimeError(f"Blahut-Arimoto did not converge (residual {gap:.3e})")


def _run_trial(args):
    (trial, strategies, power_db_grid, n_t, n_r, n_tq, n_samples, seed, optimize_prior) = args
    ch = trial_channel(seed, trial, n_t, n_r)
    out = []
    for strategy in strategies:
        arch = Architecture(strategy)
        for pi, pdb in enumerate(power_db_grid):
            power = 10.0 ** (pdb / 10.0)
            cfg = build_config(arch, ch, n_tq, power)
            cons = constellation_from_config(ch, cfg, power)
            exact = noise_is_independent(cfg)
            if exact:
                tm = transition_exact(ch, cfg, cons)
            else:
                unit = _entropy(seed) + [_NOISE_KEY, trial, _STRATEGY_KEYS[arch], pi]
                tm = transition_mc(ch, cfg, cons, n_samples, unit)
            if optimize_prior and len(cons) > 1:
                rate, _ = optimize_input(tm)
            else:
                rate = mutual_information(tm, cons.prior)
            out.append(TrialRecord(trial, pdb, arch.value, rate, len(cons), cons.relaxed, exact))
    for pdb in power_db_grid:
        rate = unquantized_capacity(ch, 10.0 ** (pdb / 10.0))
        out.append(TrialRecord(trial, pdb, "unquantized", rate, 0, False, True))
    return out


def rate_curve(
    strategies: Sequence[str],
    power_db_grid: Sequence[float],
    n_t: int,
    n_r: int,
    n_tq: int,
    trials: int,
    n_samples: int,
    seed: int,
    optimize_prior: bool = False,
    workers: int = 1,
) -> RateCurve:
    """Average achievable rate per (power, strategy) over random channels.

    Also reports the unquantized capacity under the strategy tag
    ``"unquantized"``. Trials are independent work units; with ``workers > 1``
    they run in a process pool and are reduced in trial order, so the result
    does not depend on ``workers``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    strategies = [Architecture(s).value for s in strategies]
    power_db_grid = [float(p) for p in power_db_grid]
    jobs = [
        (t, strategies, power_db_grid, n_t, n_r, n_tq, n_samples, seed, optimize_prior)
        for t in range(trials)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_trial = list(pool.map(_run_trial, jobs))
    else:
        per_trial = [_run_trial(job) for job in jobs]
    records = [rec for chunk in per_trial for rec in chunk]

    entries = []
    for strategy in strategies + ["unquantized"]:
        for pdb in power_db_grid:
            rates = np.array(
                [r.rate_bits for r in records if r.strategy == strategy and r.power_db == pdb]
            )
            std = float(rates.std(ddof=1)) if len(rates) > 1 else 0.0
            entries.append(RateEntry(pdb, strategy, float(rates.mean()), std, len(rates)))
    return RateCurve(entries, records)
