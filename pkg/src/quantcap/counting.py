"""Closed-form region counts for hyperplane arrangements in general position."""

from dataclasses import dataclass
from math import comb
from typing import Optional

MAX_HYPERPLANES = 63


@dataclass(frozen=True)
class RegionCountQuery:
    dim: int
    hyperplanes: int
    parallel_classes: Optional[tuple[int, int]] = None

    def __post_init__(self):
        if self.parallel_classes is not None:
            l, d = self.parallel_classes
            if l * d != self.hyperplanes:
                raise ValueError("hyperplanes must equal l * d")

    def count(self) -> int:
        if self.parallel_classes is not None:
            return r_parallel(self.dim, *self.parallel_classes)
        return r_general(self.dim, self.hyperplanes)


def _check(name, value, low):
    if not isinstance(value, int) or isinstance(value, bool):
        raise TypeError(f"{name} must be an integer")
    if value < low:
        raise ValueError(f"{name} must be >= {low}, got {value}")


def r_general(m: int, n: int) -> int:
    """Regions cut out of ``R^m`` by ``n`` hyperplanes in general position.

    ``sum_{i=0}^{m} C(n, i)``, with ``C(n, i) = 0`` for ``i > n``.
    """
    _check("m", m, 1)
    _check("n", n, 0)
    if n > MAX_HYPERPLANES:
        raise ValueError(f"n is capped at {MAX_HYPERPLANES}")
    return sum(comb(n, i) for i in range(m + 1))


def r_central(n: int, m: int) -> int:
    """Regions of ``n`` general-position hyperplanes through the origin of ``R^m``.

    ``2 * sum_{i=0}^{m-1} C(n-1, i)``. Note the argument order ``(n, m)``.
    """
    _check("n", n, 1)
    _check("m", m, 1)
    if n > MAX_HYPERPLANES:
        raise ValueError(f"n is capped at {MAX_HYPERPLANES}")
    return 2 * sum(comb(n - 1, i) for i in range(m))


def r_parallel(m: int, l: int, d: int) -> int:
    """Regions of ``l`` general-position directions, each repeated by ``d`` parallel copies.

    ``sum_{i=0}^{m} C(l, i) d^i``, which is ``(1 + d)^l`` when ``l <= m``.
    """
    _check("m", m, 1)
    _check("l", l, 1)
    _check("d", d, 1)
    if l * d > MAX_HYPERPLANES:
        raise ValueError(f"l * d is capped at {MAX_HYPERPLANES}")
    return sum(comb(l, i) * d**i for i in range(m + 1))
