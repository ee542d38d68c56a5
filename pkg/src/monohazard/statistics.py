"""The two test statistics for an increasing hazard and their normal calibration.

``T`` integrates the gap between the empirical cumulative hazard (just before
each atom) and its convex minorant against the empirical measure; ``U`` does
the same for the distribution functions. Both are exact finite sums over
the sample atoms.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.stats import norm
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_count, check_positive
from .canonical import CanonicalConstants, load_constants, pinned_constants
from .empirical import SortedSample, emp_cum_hazard, _as_sample
from .convex_minorant import gcm_of_step
from .exceptions import MonoHazardError
from .models import HazardModel, asymptotic_constants, make_model

KINDS = ("T", "U")


def _check_kind(kind):
    k = str(kind).upper()
    if k not in KINDS:
        raise MonoHazardError(f"statistic kind must be 'T' or 'U', got {kind!r}")
    return k


def _hull_at_atoms(s: SortedSample, a, k):
    """Convex minorant of the empirical cumulative hazard at the first ``k`` atoms."""
    H = gcm_of_step(emp_cum_hazard(s), a)
    return np.asarray(H(s.obs[:k]), dtype=float).reshape(-1)


def statistic_T(s, a) -> float:
    """``(1/n) sum_{X_i <= a} [H_n(X_i-) - Hhat(X_i)]``.

    ``H_n(X_(i)-) = -log(1 - (i-1)/n)`` is always finite for a complete sample,
    including at the largest observation.
    """
    a = check_positive(a, "a")
    s = _as_sample(s)
    n = s.n
    k = int(np.searchsorted(s.obs, a, side="right"))
    if k == 0:
        return 0.0
    left = -np.log1p(-np.arange(k) / n)
    gap = left - _hull_at_atoms(s, a, k)
    return max(float(np.sum(gap)) / n, 0.0)


def statistic_U(s, a) -> float:
    """``(1/n) sum_{X_i < a} [F_n(X_i-) - Fhat(X_i)]`` with ``Fhat = 1 - exp(-Hhat)``."""
    a = check_positive(a, "a")
    s = _as_sample(s)
    n = s.n
    k = int(np.searchsorted(s.obs, a, side="left"))
    if k == 0:
        return 0.0
    left = np.arange(k) / n
    fhat = -np.expm1(-_hull_at_atoms(s, a, k))
    return max(float(np.sum(left - fhat)) / n, 0.0)


def compute_statistic(s, a, kind) -> float:
    return statistic_T(s, a) if _check_kind(kind) == "T" else statistic_U(s, a)


@dataclass(frozen=True)
class TestReport:
    """Value of a statistic with its optional normal calibration.

    ``calibration_mode`` is ``"raw"`` when no null model was supplied (then
    ``mu_n``, ``scale``, ``z`` and ``p_value`` are None) and ``"model"``
    otherwise.
    """

    __test__ = False

    statistic_kind: str
    value: float
    n: int
    a: float
    mu_n: float | None = None
    scale: float | None = None
    z: float | None = None
    p_value: float | None = None
    calibration_mode: str = "raw"
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def standardize(value, kind, n, model, constants, *, a=1.0, lower=0.0, diagnostics=None) -> TestReport:
    """Center and scale a statistic under a null model.

    ``mu_n = n**(-2/3) * E|C(0)| * I`` with ``I`` the mean integral for the
    statistic's kind, ``scale`` is the square root of the matching limiting
    variance and ``z = n**(5/6) * (value - mu_n) / scale``. The p-value is
    one-sided: large values of the statistic speak against an increasing
    hazard.

    Parameters
    ----------
    value : float
    kind : {'T', 'U'}
    n : int
    model : HazardModel or str
    constants : CanonicalConstants
    a : float, default=1.0
    lower : float, default=0.0
        Left end of the calibration integrals; only needed for models whose
        hazard vanishes at 0.
    """
    kind = _check_kind(kind)
    n = check_count(n, "n")
    value = check_positive(value, "value", allow_zero=True)
    a = check_positive(a, "a")
    if constants is None:
        raise MonoHazardError("standardizing requires canonical constants")
    if isinstance(model, str):
        model = make_model(model)
    if not isinstance(model, HazardModel):
        raise MonoHazardError(f"model must be a HazardModel or spec string, got {model!r}")
    ac = asymptotic_constants(model, a, constants, lower=lower)
    integral, var = (ac.mean_T_integral, ac.var_T) if kind == "T" else (ac.mean_U_integral, ac.var_U)
    if not var > 0:
        raise MonoHazardError("limiting variance is zero; check sigma2 in the constants")
    mu = n ** (-2 / 3) * constants.e_abs_c0 * integral
    scale = math.sqrt(var)
    z = n ** (5 / 6) * (value - mu) / scale
    return TestReport(
        statistic_kind=kind,
        value=value,
        n=n,
        a=a,
        mu_n=mu,
        scale=scale,
        z=z,
        p_value=float(norm.sf(z)),
        calibration_mode="model",
        diagnostics=dict(diagnostics or {}),
    )


def sample_diagnostics(s: SortedSample, a):
    k = int(np.searchsorted(s.obs, a, side="right"))
    frac = k / s.n if s.n else 0.0
    return {"n_in_interval": k, "fraction_in_interval": frac, "F_n_at_a": frac}


class MonotoneHazardTest(BaseEstimator):
    """Test of the null hypothesis that the hazard is increasing on ``[0, a]``.

    Parameters
    ----------
    a : float, default=1.0
    statistic : {'T', 'U'}, default='T'
    model : str or HazardModel, optional
        Null model for calibration. Without it only the raw statistic is
        reported.
    constants : CanonicalConstants or path, optional
        Canonical constants; defaults to the constants file shipped with
        the package.
    ties : {'raise', 'jitter'}, default='raise'
    lower : float, default=0.0

    Attributes
    ----------
    sample_ : SortedSample
    statistic_ : float
    report_ : TestReport
    pvalue_ : float or None
    """

    def __init__(self, a=1.0, statistic="T", model=None, constants=None, ties="raise", lower=0.0):
        self.a = a
        self.statistic = statistic
        self.model = model
        self.constants = constants
        self.ties = ties
        self.lower = lower

    def _constants(self):
        if self.constants is None:
            return pinned_constants()
        if isinstance(self.constants, CanonicalConstants):
            return self.constants
        return load_constants(self.constants)

    def fit(self, X, y=None):
        kind = _check_kind(self.statistic)
        self.sample_ = SortedSample.from_observations(X, ties=self.ties)
        if self.sample_.n == 0:
            raise MonoHazardError("cannot test an empty sample")
        self.statistic_ = compute_statistic(self.sample_, self.a, kind)
        diag = sample_diagnostics(self.sample_, self.a)
        if self.model is None:
            self.report_ = TestReport(kind, self.statistic_, self.sample_.n, float(self.a), diagnostics=diag)
        else:
            self.report_ = standardize(
                self.statistic_,
                kind,
                self.sample_.n,
                self.model,
                self._constants(),
                a=self.a,
                lower=self.lower,
                diagnostics=diag,
            )
        self.pvalue_ = self.report_.p_value
        self.n_features_in_ = 1
        return self

    def score(self, X=None, y=None):
        """The fitted statistic (refitting first if ``X`` is given)."""
        if X is not None:
            self.fit(X)
        check_is_fitted(self, "statistic_")
        return self.statistic_
