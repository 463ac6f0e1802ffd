"""Plain-text file formats and atomic output."""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

import numpy as np

from .geometry import HyperplaneArrangement


class ParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def parse_arrangement(text: str, dim: int | None = None) -> HyperplaneArrangement:
    """Read ``a_1 ... a_m | b`` lines; ``#`` starts a comment, blank lines are skipped."""
    normals, offsets = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.count("|") != 1:
            raise ParseError(lineno, "expected 'a_1 ... a_m | b'")
        lhs, rhs = line.split("|")
        try:
            a = [float(tok) for tok in lhs.split()]
            b = [float(tok) for tok in rhs.split()]
        except ValueError as exc:
            raise ParseError(lineno, str(exc)) from None
        if len(b) != 1:
            raise ParseError(lineno, "expected exactly one offset after '|'")
        if not a:
            raise ParseError(lineno, "missing normal coefficients")
        if normals and len(a) != len(normals[0]):
            raise ParseError(lineno, f"expected {len(normals[0])} coefficients, got {len(a)}")
        if dim is not None and len(a) != dim:
            raise ParseError(lineno, f"expected {dim} coefficients, got {len(a)}")
        if not any(a):
            raise ParseError(lineno, "zero normal vector")
        normals.append(a)
        offsets.append(b[0])
    if not normals:
        if dim is None:
            raise ParseError(0, "empty arrangement file needs an explicit dimension")
        return HyperplaneArrangement(np.zeros((0, dim)), [], dim=dim)
    return HyperplaneArrangement(normals, offsets)


def format_arrangement(arr: HyperplaneArrangement) -> str:
    lines = [f"# {arr.count} hyperplanes in R^{arr.dim}"]
    for a, b in zip(arr.normals, arr.offsets):
        lines.append(" ".join(f"{v:.17g}" for v in a) + f" | {b:.17g}")
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> np.ndarray:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].replace(",", " ").strip()
        if not line:
            continue
        try:
            rows.append([float(t) for t in line.split()])
        except ValueError as exc:
            raise ParseError(lineno, str(exc)) from None
        if len(rows[-1]) != len(rows[0]):
            raise ParseError(lineno, "ragged matrix row")
    if not rows:
        raise ParseError(0, "empty matrix")
    return np.array(rows)


def atomic_write(path, text: str) -> None:
    """Write ``text`` to a temporary file next to ``path`` and rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
