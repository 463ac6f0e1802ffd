"""Receiver configurations ``{V, t}`` and the arrangements they induce.

A quantizer ``j`` outputs ``sign(v_j @ W + t_j)`` with ``W = H x + Z``. In the
noiseless picture it reports on which side of the transmit-space hyperplane
``(v_j @ H) @ x = -t_j`` the input lies, so a configuration induces the
arrangement with normals ``V @ H`` and offsets ``-t``. With this convention
the arrangement's sign vectors are exactly the noiseless quantizer outputs.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .bounds import waterfilling
from .geometry import HyperplaneArrangement

RANK_TOL = 1e-8
# distance of each general-position line from the origin, as a fraction of sqrt(P);
# maximizes the smallest inscribed radius over the 11 cells for N_tq = 4
GP_OFFSET_FRACTION = 0.24


class Architecture(str, Enum):
    SELECT = "select"
    SIGN = "sign"
    SVD_GRID = "svd_grid"
    GP = "gp"


class InvalidConfig(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ChannelInstance:
    matrix: np.ndarray
    singular_values: np.ndarray
    row_norms: np.ndarray

    @classmethod
    def from_matrix(cls, H, normalize: bool = False) -> "ChannelInstance":
        H = np.array(H, dtype=np.float64)
        if H.ndim != 2:
            raise InvalidConfig("channel matrix must be 2-d")
        norms = np.linalg.norm(H, axis=1)
        if normalize:
            if np.any(norms == 0):
                raise InvalidConfig("cannot normalize a zero row")
            H = H / norms[:, None]
            norms = np.linalg.norm(H, axis=1)
        sv = np.linalg.svd(H, compute_uv=False)
        if sv[-1] <= RANK_TOL * max(sv[0], 1.0):
            raise InvalidConfig("channel matrix is rank deficient")
        for a in (H, sv, norms):
            a.setflags(write=False)
        return cls(H, sv, norms)

    @property
    def n_r(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_t(self) -> int:
        return self.matrix.shape[1]


@dataclass(frozen=True, eq=False)
class ReceiverConfig:
    combiner: np.ndarray
    thresholds: np.ndarray
    architecture: Architecture

    def normalized(self) -> "ReceiverConfig":
        """Rows of ``V`` scaled to unit norm; thresholds scaled alongside.

        Quantizer outputs are unchanged because ``sign`` ignores positive scaling.
        """
        V = np.asarray(self.combiner, dtype=np.float64)
        nrm = np.linalg.norm(V, axis=1)
        if np.any(nrm == 0):
            raise InvalidConfig("combiner has a zero row")
        return ReceiverConfig(V / nrm[:, None], self.thresholds / nrm, self.architecture)

    @property
    def n_tq(self) -> int:
        return self.combiner.shape[0]


def _config(V, t, arch) -> ReceiverConfig:
    V = np.array(V, dtype=np.float64)
    t = np.array(t, dtype=np.float64)
    if not np.all(np.isfinite(t)):
        raise InvalidConfig("thresholds must be finite")
    cfg = ReceiverConfig(V, t, Architecture(arch)).normalized()
    cfg.combiner.setflags(write=False)
    cfg.thresholds.setflags(write=False)
    return cfg


def uniform_levels(count: int, half_width: float) -> np.ndarray:
    """``count`` points equally spaced inside ``(-half_width, half_width)``."""
    j = np.arange(1, count + 1)
    return half_width * (2 * j - count - 1) / (count + 1)


def select_config(ch: ChannelInstance, n_tq: int, power: float) -> ReceiverConfig:
    """All quantizers on the strongest antenna, thresholds spread over its range."""
    if n_tq < 1:
        raise InvalidConfig("n_tq must be >= 1")
    best = int(np.argmax(ch.row_norms))
    V = np.zeros((n_tq, ch.n_r))
    V[:, best] = 1.0
    t = uniform_levels(n_tq, ch.row_norms[best] * np.sqrt(power))
    return _config(V, t, Architecture.SELECT)


def sign_config(ch: ChannelInstance, n_tq: int) -> ReceiverConfig:
    """Zero-threshold quantizers on the first ``n_tq`` antennas."""
    if n_tq < 1:
        raise InvalidConfig("n_tq must be >= 1")
    if n_tq > ch.n_r:
        raise InvalidConfig(
            f"sign quantization has one quantizer per antenna; n_tq={n_tq} > N_r={ch.n_r} "
            "would duplicate rows (use gp_config(..., central=True) for more lines)"
        )
    V = np.eye(ch.n_r)[:n_tq]
    return _config(V, np.zeros(n_tq), Architecture.SIGN)


def split_quantizers(n_tq: int, k: int) -> list[int]:
    """Spread ``n_tq`` quantizers over ``k`` sub-channels, extras to the strongest."""
    base, extra = divmod(n_tq, k)
    return [base + (1 if i < extra else 0) for i in range(k)]


def svd_grid_config(ch: ChannelInstance, n_tq: int, power: float) -> ReceiverConfig:
    """Multilevel quantization of each SVD sub-channel.

    Quantizer rows are the top left-singular vectors, sub-channel ``k``
    receiving ``d_k`` of them; its thresholds are equally spaced over
    ``(-lam_k sqrt(P_k), lam_k sqrt(P_k))`` with ``P_k`` from waterfilling.
    """
    K = min(ch.n_t, ch.n_r)
    if n_tq < K:
        raise InvalidConfig(f"n_tq={n_tq} is smaller than the {K} sub-channels")
    U, s, _ = np.linalg.svd(ch.matrix)
    alloc = waterfilling(s[:K], power)
    rows, thresholds = [], []
    for k, d_k in enumerate(split_quantizers(n_tq, K)):
        half = s[k] * np.sqrt(alloc.per_channel[k])
        rows.extend([U[:, k]] * d_k)
        thresholds.extend(uniform_levels(d_k, half))
    return _config(np.array(rows), np.array(thresholds), Architecture.SVD_GRID)


def gp_targets(dim: int, n: int, power: float, central: bool = False):
    """Target transmit-space arrangement ``G x = b`` in general position.

    In the plane the normals point at angles ``pi/(2n) + k pi/n`` and the lines
    sit at distance ``GP_OFFSET_FRACTION * sqrt(P)`` from the origin with the
    mirror-symmetric side pattern ``+ - - + + - - ...``. In higher dimension
    the normals follow the moment curve, so any ``dim`` of them are independent.
    """
    k = np.arange(n)
    if dim == 1:
        G = np.ones((n, 1))
        b = np.zeros(n) if central else uniform_levels(n, np.sqrt(power))
        return G, b
    if dim == 2:
        ang = np.pi / (2 * n) + k * np.pi / n
        G = np.column_stack([np.cos(ang), np.sin(ang)])
    else:
        s = np.linspace(-1.0, 1.0, n) if n > 1 else np.zeros(1)
        G = np.vander(s, dim, increasing=True)
        G /= np.linalg.norm(G, axis=1, keepdims=True)
    side = (-1.0) ** ((k + 1) // 2)
    b = np.zeros(n) if central else side * GP_OFFSET_FRACTION * np.sqrt(power)
    return G, b


def gp_config(ch: ChannelInstance, n_tq: int, power: float, central: bool = False) -> ReceiverConfig:
    """Combiner that makes the induced arrangement equal a fixed GP target.

    ``V = G H^+`` gives ``V H = G`` for a full-column-rank ``H``. With
    ``central=True`` all thresholds are zero (``n_tq`` lines through the origin).
    """
    if n_tq < 1:
        raise InvalidConfig("n_tq must be >= 1")
    if ch.n_t > ch.n_r:
        raise InvalidConfig("gp_config needs N_t <= N_r so that H has a left inverse")
    H = ch.matrix
    sv = ch.singular_values
    if sv[-1] <= RANK_TOL * sv[0]:
        raise InvalidConfig("channel matrix is rank deficient")
    G, b = gp_targets(ch.n_t, n_tq, power, central=central)
    V = G @ np.linalg.pinv(H)
    arch = Architecture.SIGN if central else Architecture.GP
    return _config(V, -b, arch)


def induced_arrangement(ch: ChannelInstance, cfg: ReceiverConfig) -> HyperplaneArrangement:
    """Transmit-space hyperplanes ``(V H) x = -t``; rows with ``V H = 0`` are dropped."""
    V = np.asarray(cfg.combiner)
    if V.shape[1] != ch.n_r:
        raise InvalidConfig(f"combiner has {V.shape[1]} columns, channel has {ch.n_r} outputs")
    A = V @ ch.matrix
    nrm = np.linalg.norm(A, axis=1)
    keep = nrm > 1e-12 * max(1.0, float(nrm.max(initial=0.0)))
    dropped = int((~keep).sum())
    if dropped:
        warnings.warn(f"{dropped} quantizer(s) see no signal and were dropped", stacklevel=2)
    return HyperplaneArrangement(A[keep], -np.asarray(cfg.thresholds)[keep], dim=ch.n_t)


def build_config(arch, ch: ChannelInstance, n_tq: int, power: float) -> ReceiverConfig:
    """Configuration for a strategy tag as used in the rate sweep.

    ``sign`` uses one zero-threshold quantizer per antenna when ``n_tq <= N_r``
    and otherwise ``n_tq`` central GP lines.
    """
    arch = Architecture(arch)
    if arch is Architecture.SELECT:
        return select_config(ch, n_tq, power)
    if arch is Architecture.SIGN:
        if n_tq <= ch.n_r:
            return sign_config(ch, n_tq)
        return gp_config(ch, n_tq, power, central=True)
    if arch is Architecture.SVD_GRID:
        return svd_grid_config(ch, n_tq, power)
    return gp_config(ch, n_tq, power)
