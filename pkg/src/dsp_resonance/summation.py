"""Compensated summation helpers.

All reductions in this package that feed a tolerance-checked contract go
through :func:`kahan_sum`, a Neumaier-compensated sum evaluated in a fixed
left-to-right order.  Fixed order + compensation gives bitwise-reproducible
results regardless of worker count, because parallel callers must merge
partial results in index order.
"""

from __future__ import annotations

import numpy as np

__all__ = ["kahan_sum", "running_kahan"]


def _neumaier(values: np.ndarray) -> float:
    s = 0.0
    c = 0.0
    for v in values:
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
    return s + c


try:  # pragma: no cover - exercised only when numba is installed
    from numba import njit

    _neumaier_fast = njit("float64(float64[::1])", cache=True)(_neumaier)

    def _neumaier_dispatch(values: np.ndarray) -> float:
        return float(_neumaier_fast(np.ascontiguousarray(values, dtype=np.float64)))

except Exception:  # pragma: no cover
    def _neumaier_dispatch(values: np.ndarray) -> float:
        return _neumaier(np.asarray(values, dtype=np.float64))


def kahan_sum(values) -> float:
    """Sum `values` left to right with Neumaier compensation.

    Accepts any 1-d array-like.  Deterministic for a fixed input order.
    """
    arr = np.asarray(values, dtype=np.float64).ravel()
    if arr.size == 0:
        return 0.0
    return _neumaier_dispatch(arr)


class running_kahan:
    """Streaming Neumaier accumulator for loops that cannot batch."""

    __slots__ = ("_s", "_c")

    def __init__(self) -> None:
        self._s = 0.0
        self._c = 0.0

    def add(self, v: float) -> None:
        t = self._s + v
        if abs(self._s) >= abs(v):
            self._c += (self._s - t) + v
        else:
            self._c += (v - t) + self._s
        self._s = t

    @property
    def value(self) -> float:
        return self._s + self._c
