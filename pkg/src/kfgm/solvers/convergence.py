"""Observed orders of accuracy from refinement sweeps."""
from __future__ import annotations

import numpy as np

from ..errors import InvalidParameterError


def observed_orders(errors, ratio: float = 2.0) -> np.ndarray:
    """log_ratio(e_i / e_{i+1}) for errors from successively refined runs."""
    e = np.asarray(errors, dtype=float)
    if e.size < 2:
        raise InvalidParameterError("need at least two errors")
    if np.any(e <= 0):
        raise InvalidParameterError("errors must be positive")
    return np.log(e[:-1] / e[1:]) / np.log(ratio)


def observed_order(errors, ratio: float = 2.0) -> float:
    """Smallest observed order across the sweep."""
    return float(np.min(observed_orders(errors, ratio)))
