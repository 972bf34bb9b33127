"""Composite trapezoid rule on uniform grids, with a Richardson error estimate."""

from __future__ import annotations

import numpy as np


def trapezoid(values: np.ndarray, h: float) -> float:
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        return 0.0
    return float(h * (v.sum() - 0.5 * (v[0] + v[-1])))


def trapezoid_error(values: np.ndarray, h: float) -> float:
    """Estimate the trapezoid error as |I_h - I_2h| / 3.

    The coarse sum uses every other node; for an even node count the last
    interval is dropped from both sums so that they cover the same range.
    """
    v = np.asarray(values, dtype=float)
    if v.size < 3:
        return 0.0
    if v.size % 2 == 0:
        v = v[:-1]
    fine = trapezoid(v, h)
    coarse = trapezoid(v[::2], 2.0 * h)
    return abs(fine - coarse) / 3.0
