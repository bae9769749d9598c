"""Polyline resampling and Hausdorff distances between curves."""

from typing import Optional

import numpy as np
from scipy.spatial.distance import directed_hausdorff

from substrate_oscillator.exceptions import ConvergenceError


def resample_polyline(curve: np.ndarray, n: int) -> np.ndarray:
    """n points equally spaced in arclength along the polyline."""
    curve = np.asarray(curve, dtype=float)
    if len(curve) < 2:
        return np.repeat(curve[:1], n, axis=0)
    seg = np.linalg.norm(np.diff(curve, axis=0), axis=1)
    arclength = np.concatenate([[0.0], np.cumsum(seg)])
    if arclength[-1] == 0:
        return np.repeat(curve[:1], n, axis=0)
    targets = np.linspace(0.0, arclength[-1], n)
    return np.column_stack(
        [np.interp(targets, arclength, curve[:, j]) for j in range(curve.shape[1])]
    )


def hausdorff_distance(a: np.ndarray, b: np.ndarray, n: Optional[int] = None) -> float:
    """Symmetric Hausdorff distance; both curves are resampled to n points when n is given."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if n is not None:
        a = resample_polyline(a, n)
        b = resample_polyline(b, n)
    return float(max(directed_hausdorff(a, b)[0], directed_hausdorff(b, a)[0]))


def polyline_crossing(curve: np.ndarray, level: float, upward: bool = True, axis: int = 1) -> np.ndarray:
    """First point where the polyline crosses ``coordinate[axis] = level`` in the given direction."""
    curve = np.asarray(curve, dtype=float)
    values = curve[:, axis] - level
    for i in range(len(curve) - 1):
        a, b = values[i], values[i + 1]
        if (upward and a < 0 <= b) or (not upward and a > 0 >= b):
            lam = a / (a - b)
            return curve[i] + lam * (curve[i + 1] - curve[i])
    raise ConvergenceError(f"polyline never crosses level {level:g} {'upward' if upward else 'downward'}")
