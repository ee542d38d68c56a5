"""Small input validation helpers shared by the estimators and simulators."""

import math
import numbers

import numpy as np
from sklearn.utils.validation import check_array

from .exceptions import MonoHazardError


def check_positive(value, name, *, allow_zero=False):
    if not isinstance(value, numbers.Real) or not math.isfinite(value):
        raise MonoHazardError(f"{name} must be a finite real number, got {value!r}")
    if value < 0 or (value == 0 and not allow_zero):
        bound = ">= 0" if allow_zero else "> 0"
        raise MonoHazardError(f"{name} must be {bound}, got {value!r}")
    return float(value)


def check_count(value, name, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise MonoHazardError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise MonoHazardError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_observations(X):
    """Return a 1-d float array of observations from array-like input.

    Accepts a flat sequence or a single-column 2-d array, as produced by
    sklearn pipelines.
    """
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise MonoHazardError(f"expected a single column of observations, got shape {arr.shape}")
        arr = arr[:, 0]
    arr = check_array(arr.reshape(-1, 1), ensure_min_samples=0, ensure_all_finite=True)[:, 0]
    if arr.size and np.any(arr <= 0):
        bad = int(np.flatnonzero(arr <= 0)[0])
        raise MonoHazardError(f"observations must be positive; index {bad} has value {arr[bad]!r}")
    return arr


def check_seed(seed):
    if isinstance(seed, bool) or not isinstance(seed, numbers.Integral) or not 0 <= seed < 2**64:
        raise MonoHazardError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    return int(seed)
