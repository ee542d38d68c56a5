"""Empirical distribution and cumulative hazard of a complete sample, and the
isotonized estimators obtained from the convex minorant of the latter."""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_observations, check_positive
from .convex_minorant import ConvexPL, StepFunction, gcm_of_step
from .exceptions import MonoHazardError, TiesError

JITTER_SCALE = 1e-9


class SortedSample:
    """Order statistics of a complete sample of positive lifetimes.

    Use :meth:`from_observations` to build one from raw data; the constructor
    itself expects observations that are already strictly increasing.
    """

    __slots__ = ("_obs",)

    def __init__(self, obs):
        arr = np.array(obs, dtype=float)
        if arr.ndim != 1:
            raise MonoHazardError("observations must be one-dimensional")
        if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
            raise MonoHazardError("observations must be positive and finite")
        if np.any(np.diff(arr) <= 0):
            raise TiesError("observations must be strictly increasing")
        arr.flags.writeable = False
        self._obs = arr

    @classmethod
    def from_observations(cls, X, ties="raise"):
        """Sort raw observations, rejecting or jittering ties.

        With ``ties="jitter"`` the k-th repeat of a tied value (k = 1, 2, ...)
        is shifted up by ``k * 1e-9 * range``.
        """
        x = np.sort(check_observations(X))
        if x.size > 1 and np.any(np.diff(x) == 0):
            if ties == "raise":
                dup = x[np.flatnonzero(np.diff(x) == 0)[0]]
                raise TiesError(f"tied observations (e.g. {dup!r}); pass ties='jitter' to break them")
            if ties != "jitter":
                raise MonoHazardError(f"ties must be 'raise' or 'jitter', got {ties!r}")
            x = _jitter(x)
        return cls(x)

    @property
    def obs(self):
        return self._obs

    @property
    def n(self):
        return self._obs.size

    def __len__(self):
        return self._obs.size

    def __repr__(self):
        return f"SortedSample(n={self.n})"


def _jitter(x):
    spread = x[-1] - x[0]
    eps = JITTER_SCALE * (spread if spread > 0 else abs(x[-1]))
    # rank of each element within its run of equal values
    starts = np.concatenate([[True], np.diff(x) != 0])
    run_start = np.maximum.accumulate(np.where(starts, np.arange(x.size), 0))
    out = x + (np.arange(x.size) - run_start) * eps
    if np.any(np.diff(out) <= 0):
        raise TiesError("jitter could not separate tied observations")
    return out


def _as_sample(s):
    return s if isinstance(s, SortedSample) else SortedSample.from_observations(s)


def ecdf(s) -> StepFunction:
    """Empirical distribution function: value k/n at and after X_(k)."""
    s = _as_sample(s)
    n = s.n
    return StepFunction(s.obs, np.arange(1, n + 1) / n, 0.0)


def emp_cum_hazard(s) -> StepFunction:
    """Empirical cumulative hazard ``-log(1 - F_n)``, infinite from X_(n) on."""
    s = _as_sample(s)
    n = s.n
    k = np.arange(1, n + 1)
    with np.errstate(divide="ignore"):
        vals = -np.log1p(-k / n)
    vals[-1] = np.inf
    return StepFunction(s.obs, vals, 0.0)


class IsotonicEstimate(NamedTuple):
    hazard: ConvexPL
    cdf: Callable


def isotonic_estimators(s, a) -> IsotonicEstimate:
    """Convex-minorant estimate of the cumulative hazard on ``[0, a]`` and the
    distribution function it induces, ``1 - exp(-H)``."""
    a = check_positive(a, "a")
    s = _as_sample(s)
    if s.n == 0:
        H = ConvexPL([0.0, a], [0.0, 0.0])
    else:
        H = gcm_of_step(emp_cum_hazard(s), a)

    def cdf(t):
        return -np.expm1(-np.asarray(H(t)))

    return IsotonicEstimate(H, cdf)


class CumulativeHazardGCM(TransformerMixin, BaseEstimator):
    """Isotonic (convex) estimator of a cumulative hazard on ``[0, a]``.

    Parameters
    ----------
    a : float, default=1.0
        Right end of the interval on which the hazard is assumed increasing.
    ties : {'raise', 'jitter'}, default='raise'
        Handling of tied observations.

    Attributes
    ----------
    sample_ : SortedSample
    hazard_ : ConvexPL
        Greatest convex minorant of the empirical cumulative hazard.
    knots_ : ndarray of shape (k, 2)
    """

    def __init__(self, a=1.0, ties="raise"):
        self.a = a
        self.ties = ties

    def fit(self, X, y=None):
        self.sample_ = SortedSample.from_observations(X, ties=self.ties)
        est = isotonic_estimators(self.sample_, self.a)
        self.hazard_ = est.hazard
        self._cdf = est.cdf
        self.knots_ = np.column_stack([est.hazard.knots_x, est.hazard.knots_y])
        self.n_features_in_ = 1
        return self

    def predict(self, t):
        """Estimated cumulative hazard at ``t``."""
        check_is_fitted(self, "hazard_")
        return np.asarray(self.hazard_(np.ravel(np.asarray(t, dtype=float))))

    def predict_cdf(self, t):
        """Estimated distribution function ``1 - exp(-H(t))``."""
        check_is_fitted(self, "hazard_")
        return np.asarray(self._cdf(np.ravel(np.asarray(t, dtype=float))))

    def transform(self, X):
        """Column of estimated cumulative hazards at the rows of ``X``."""
        return self.predict(X).reshape(-1, 1)
