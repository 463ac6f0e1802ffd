"""Closed-form capacity bounds for quantized-output MIMO channels.

All rates are in bits per channel use. ``K`` and the exponent used inside the
linear-combining bound follow the original closed forms by default; the
alternative readings are selectable through ``k_convention="min"`` and
``exponent="squared"``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .counting import r_central

BISECTION_ITERS = 200
WATER_TOL = 1e-10


@dataclass(frozen=True)
class PowerAllocation:
    per_channel: np.ndarray
    water_level: float
    total: float


@dataclass(frozen=True)
class BoundReport:
    name: str
    value_bits: float
    gap_bits: float
    assumptions: tuple[str, ...] = ()
    details: dict = field(default_factory=dict)


def waterfilling(lambdas, power: float) -> PowerAllocation:
    """``P_i = max(0, mu - lambda_i^-2)`` with ``mu`` set by bisection so ``sum P_i = power``."""
    lam = np.asarray(lambdas, dtype=np.float64).reshape(-1)
    if lam.size == 0:
        raise ValueError("waterfilling needs at least one channel gain")
    if np.any(lam <= 0) or not np.all(np.isfinite(lam)):
        raise ValueError("channel gains must be positive and finite")
    if power < 0:
        raise ValueError("power must be nonnegative")
    floor = lam**-2.0
    lo, hi = float(floor.min()), float(floor.max()) + power
    target_tol = WATER_TOL * max(1.0, power)
    mu = lo
    if power > 0:
        for _ in range(BISECTION_ITERS):
            mu = 0.5 * (lo + hi)
            total = np.maximum(0.0, mu - floor).sum()
            if abs(total - power) <= target_tol:
                break
            if total > power:
                hi = mu
            else:
                lo = mu
        # polish: exact water level for the active set found by bisection
        base = float(floor.min())
        for _ in range(lam.size):
            active = floor <= max(mu, base)
            mu_exact = (power + floor[active].sum()) / active.sum()
            if np.array_equal(floor <= max(mu_exact, base), active):
                mu = mu_exact
                break
            mu = mu_exact
    alloc = np.maximum(0.0, mu - floor)
    return PowerAllocation(alloc, float(mu), float(power))


def prop1_upper(h_max_norm: float, power: float, n_tq: int) -> float:
    """Antenna selection with multilevel quantization: ``0.5 log2 min(1 + |h|^2 P, (N_tq + 1)^2)``."""
    return 0.5 * math.log2(min(1.0 + h_max_norm**2 * power, (n_tq + 1) ** 2))


def prop2_bounds(n_r: int, n_t: int) -> tuple[float, float]:
    """High-SNR sign-quantization bounds ``log2 r0`` and ``log2(r0 + 1)``."""
    r0 = r_central(n_r, n_t)
    return math.log2(r0), math.log2(r0 + 1)


def _k_value(n_lambdas, n_t, n_r, k_convention):
    if k_convention not in ("printed", "min"):
        raise ValueError("k_convention must be 'printed' or 'min'")
    if n_t is None or n_r is None:
        return n_lambdas
    return max(n_t, n_r) if k_convention == "printed" else min(n_t, n_r)


def prop3_upper(
    lambdas,
    power: float,
    n_tq: int,
    n_t: int | None = None,
    n_r: int | None = None,
    k_convention: str = "printed",
    exponent: str = "printed",
) -> BoundReport:
    """Linear combining with multilevel quantization: ``R* + K``.

    ``R*`` is the waterfilling rate ``sum 0.5 log2(1 + lam_i P_i)`` when
    ``sum (sqrt(1 + lam_i^2 P_i) - 1) <= N_tq`` and ``K log2(N_tq/K + 1)``
    otherwise. The default rate term uses ``lam_i`` while the condition uses
    ``lam_i^2``; ``exponent="squared"`` uses ``lam_i^2`` in both. Without
    ``n_t``/``n_r``, ``K`` is the number of gains supplied.
    """
    if exponent not in ("printed", "squared"):
        raise ValueError("exponent must be 'printed' or 'squared'")
    lam = np.sort(np.asarray(lambdas, dtype=np.float64).reshape(-1))[::-1]
    K = _k_value(lam.size, n_t, n_r, k_convention)
    lam = lam[:K]
    P = np.zeros(K)
    pos = lam > 0
    if pos.any() and power > 0:
        P[: pos.sum()] = waterfilling(lam[pos], power).per_channel
    gains = np.zeros(K)
    gains[: lam.size] = lam
    condition = float(np.sum(np.sqrt(1.0 + gains**2 * P) - 1.0))
    if condition <= n_tq:
        rate_gain = gains if exponent == "printed" else gains**2
        r_star = float(np.sum(0.5 * np.log2(1.0 + rate_gain * P)))
        branch = "noise-limited"
    else:
        r_star = K * math.log2(n_tq / K + 1)
        branch = "quantizer-limited"
    notes = [
        f"K={K} ({'max' if k_convention == 'printed' else 'min'}(N_t, N_r))"
        if n_t is not None and n_r is not None
        else f"K={K} (number of gains)",
        "rate term uses lambda_i P_i; condition uses lambda_i^2 P_i"
        if exponent == "printed"
        else "lambda_i^2 P_i in both rate term and condition",
        f"branch: {branch}",
    ]
    return BoundReport(
        "prop3_upper",
        r_star + K,
        3.0 * K,
        tuple(notes),
        {"r_star": r_star, "K": K, "branch": branch, "condition": condition},
    )


def theorem1_upper(arrangements: Sequence, power: float, n_t: int, n_r: int) -> BoundReport:
    """``max_A log2 r_ssps(A, sqrt(P)) + 1.5 K + 3`` over a finite arrangement family.

    ``r_ssps`` is evaluated with :func:`quantcap.packing.log_r_ssps`, which is
    a certified lower bound on the packing number.
    """
    from .packing import log_r_ssps

    arrangements = list(arrangements)
    if not arrangements:
        raise ValueError("theorem1_upper needs at least one arrangement")
    K = max(n_t, n_r)
    logs = [log_r_ssps(a, math.sqrt(power)) for a in arrangements]
    best = max(logs)
    return BoundReport(
        "theorem1_upper",
        best + 1.5 * K + 3,
        2.5 * n_t,
        (f"K=max(N_t, N_r)={K}", "r_ssps from the per-cell margin packing (lower bound)"),
        {"log_r_ssps": best, "per_arrangement": logs},
    )


def unquantized_capacity(ch, power: float) -> float:
    """Real Gaussian MIMO capacity with waterfilling over the singular values."""
    lam = np.asarray(getattr(ch, "singular_values", ch), dtype=np.float64)
    lam = lam[lam > 0]
    if power <= 0 or lam.size == 0:
        return 0.0
    alloc = waterfilling(lam, power)
    return float(np.sum(0.5 * np.log2(1.0 + lam**2 * alloc.per_channel)))
