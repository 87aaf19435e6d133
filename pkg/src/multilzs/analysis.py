"""Comparison of two patterns over the region where the model applies."""
from __future__ import annotations

import numpy as np

from .model import PatternGrid, SystemSpec

MASK_FRACTION = 0.9


def validity_mask(sys: SystemSpec, grid: PatternGrid) -> np.ndarray:
    """Cells whose every anticrossing lies below ``0.9 * s * A``.

    Near the turning point the asymptotic transition probability does not
    hold, so those amplitudes are left out of comparisons.
    """
    rows = sys.epsilon[-1] <= MASK_FRACTION * sys.slope * grid.a_axis
    return np.broadcast_to(rows[:, None], grid.values.shape)


def masked_correlation(sys: SystemSpec, first: PatternGrid, second: PatternGrid) -> float:
    """Pearson correlation over :func:`validity_mask`; NaN if undefined."""
    if first.values.shape != second.values.shape:
        raise ValueError("patterns have different shapes")
    if not (np.array_equal(first.t_axis, second.t_axis) and np.array_equal(first.a_axis, second.a_axis)):
        raise ValueError("patterns are sampled on different axes")
    mask = validity_mask(sys, first)
    x, y = first.values[mask], second.values[mask]
    if x.size < 2 or np.ptp(x) == 0.0 or np.ptp(y) == 0.0:
        return float("nan")
    return float(np.corrcoef(x, y)[0, 1])
