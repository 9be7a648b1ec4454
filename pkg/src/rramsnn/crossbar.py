"""Crossbar read-error model and synapse arrangement planning.

Wire resistance makes the read-current error of a cross-point grow
linearly with its (row + column) index, so for a fixed device count the
worst-case error is minimized by the factorization closest to a square.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["Arrangement", "read_error", "max_read_error", "best_arrangement"]


@dataclass(frozen=True)
class Arrangement:
    rows: int
    cols: int
    k_wire: float = 1.0

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("rows and cols must be at least 1")
        if self.k_wire < 0:
            raise ValueError("k_wire must be non-negative")

    @property
    def n_devices(self) -> int:
        return self.rows * self.cols


def read_error(r: int, c: int, k_wire: float) -> float:
    """Read-current error at 1-based cross-point (r, c): k_wire * (r + c)."""
    if r < 1 or c < 1:
        raise ValueError("cross-point indices are 1-based and positive")
    if k_wire < 0:
        raise ValueError("k_wire must be non-negative")
    return k_wire * (r + c)


def max_read_error(a: Arrangement) -> float:
    """Worst-case error, at the corner cross-point (rows, cols)."""
    return read_error(a.rows, a.cols, a.k_wire)


def best_arrangement(n: int, k_wire: float = 1.0) -> Arrangement:
    """Exact factorization R*C = n minimizing R + C, with R <= C."""
    if n < 1:
        raise ValueError("n must be at least 1")
    best = (1, n)
    for r in range(2, int(n**0.5) + 1):
        if n % r == 0:
            best = (r, n // r)
    return Arrangement(rows=best[0], cols=best[1], k_wire=k_wire)
