"""Parametric null hazard models and the asymptotic mean/variance functionals
that calibrate the test statistics under them."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import integrate

from ._validation import check_count, check_positive, check_seed
from .exceptions import ModelError, MonoHazardError
from .empirical import SortedSample

QUAD_EPSABS = 1e-10


class HazardModel:
    """A lifetime distribution described through its cumulative hazard.

    Subclasses implement ``H0``, ``h0``, ``dh0`` (the derivative of the
    hazard) and ``quantile``; the distribution function and density follow.
    """

    name = "abstract"
    a_max = math.inf

    def __init__(self, *params):
        self.params = tuple(float(p) for p in params)

    def H0(self, t):
        raise NotImplementedError

    def h0(self, t):
        raise NotImplementedError

    def dh0(self, t):
        raise NotImplementedError

    def quantile(self, u):
        raise NotImplementedError

    def F0(self, t):
        return -np.expm1(-self.H0(t))

    def f0(self, t):
        return self.h0(t) * np.exp(-self.H0(t))

    def odds(self, t):
        """``F0 / (1 - F0)``, the time change of the Brownian surrogate."""
        return np.expm1(self.H0(t))

    @property
    def strictly_increasing(self):
        return True

    @property
    def spec(self):
        return f"{self.name}:" + ",".join(f"{p:g}" for p in self.params)

    def check_null_conditions(self, a, lower=0.0):
        """Raise unless ``h0 > 0`` and ``h0' > 0`` on ``[lower, a]``.

        These are the conditions under which the normal calibration holds.
        """
        if not self.strictly_increasing:
            raise ModelError(f"{self.spec} does not have a strictly increasing hazard")
        grid = np.linspace(lower, a, 1001)
        if np.any(self.h0(grid) <= 0):
            raise ModelError(f"{self.spec}: hazard is not strictly positive on [{lower}, {a}]")
        if np.any(self.dh0(grid) <= 0):
            raise ModelError(f"{self.spec}: hazard derivative is not strictly positive on [{lower}, {a}]")
        if self.F0(a) >= 1 - 1e-12:
            raise ModelError(f"{self.spec}: F0(a) is numerically 1")

    def __repr__(self):
        return f"HazardModel({self.spec!r})"


class LinearHazard(HazardModel):
    """``h0(t) = alpha + beta * t``."""

    name = "linhaz"

    def __init__(self, alpha, beta):
        super().__init__(alpha, beta)
        self.alpha, self.beta = self.params

    def H0(self, t):
        t = np.asarray(t, dtype=float)
        return self.alpha * t + 0.5 * self.beta * t * t

    def h0(self, t):
        return self.alpha + self.beta * np.asarray(t, dtype=float)

    def dh0(self, t):
        return np.full(np.shape(t), self.beta) if np.ndim(t) else self.beta

    def quantile(self, u):
        e = -np.log1p(-np.asarray(u, dtype=float))
        # root of beta/2 t^2 + alpha t = e, written to avoid cancellation
        return 2 * e / (self.alpha + np.sqrt(self.alpha**2 + 2 * self.beta * e))


class GompertzHazard(HazardModel):
    """``h0(t) = alpha * exp(beta * t)``."""

    name = "gompertz"

    def __init__(self, alpha, beta):
        super().__init__(alpha, beta)
        self.alpha, self.beta = self.params

    def H0(self, t):
        return self.alpha / self.beta * np.expm1(self.beta * np.asarray(t, dtype=float))

    def h0(self, t):
        return self.alpha * np.exp(self.beta * np.asarray(t, dtype=float))

    def dh0(self, t):
        return self.beta * self.h0(t)

    def quantile(self, u):
        e = -np.log1p(-np.asarray(u, dtype=float))
        return np.log1p(self.beta * e / self.alpha) / self.beta


class ConstantHazard(HazardModel):
    """Exponential lifetimes, ``h0 = lam``.

    Only usable with the non-normal constant-hazard limit.
    """

    name = "exponential"

    def __init__(self, lam):
        super().__init__(lam)
        (self.lam,) = self.params

    def H0(self, t):
        return self.lam * np.asarray(t, dtype=float)

    def h0(self, t):
        return np.full(np.shape(t), self.lam) if np.ndim(t) else self.lam

    def dh0(self, t):
        return np.zeros(np.shape(t)) if np.ndim(t) else 0.0

    def quantile(self, u):
        return -np.log1p(-np.asarray(u, dtype=float)) / self.lam

    @property
    def strictly_increasing(self):
        return False


class WeibullHazard(HazardModel):
    """``H0(t) = (t / lam) ** k``.

    For k > 1 the hazard vanishes at 0, so normal calibration is only
    available on ``[lower, a]`` with ``lower > 0``.
    """

    name = "weibull"

    def __init__(self, k, lam):
        super().__init__(k, lam)
        self.k, self.lam = self.params

    def H0(self, t):
        return (np.asarray(t, dtype=float) / self.lam) ** self.k

    def h0(self, t):
        t = np.asarray(t, dtype=float)
        return self.k / self.lam * (t / self.lam) ** (self.k - 1)

    def dh0(self, t):
        t = np.asarray(t, dtype=float)
        return self.k * (self.k - 1) / self.lam**2 * (t / self.lam) ** (self.k - 2)

    def quantile(self, u):
        return self.lam * (-np.log1p(-np.asarray(u, dtype=float))) ** (1 / self.k)

    @property
    def strictly_increasing(self):
        return self.k > 1


_FAMILIES = {
    "linhaz": (LinearHazard, 2),
    "gompertz": (GompertzHazard, 2),
    "exponential": (ConstantHazard, 1),
    "weibull": (WeibullHazard, 2),
}


def make_model(spec: str) -> HazardModel:
    """Build a model from a spec string such as ``"linhaz:1,1"``.

    Known families: ``linhaz:alpha,beta``, ``gompertz:alpha,beta``,
    ``exponential:lam`` and ``weibull:k,lam``. All parameters must be positive.
    """
    if not isinstance(spec, str) or ":" not in spec:
        raise ModelError(f"model spec must look like 'family:p1,p2', got {spec!r}")
    family, _, rest = spec.partition(":")
    family = family.strip().lower()
    if family not in _FAMILIES:
        raise ModelError(f"unknown model family {family!r}; expected one of {sorted(_FAMILIES)}")
    cls, n_params = _FAMILIES[family]
    try:
        params = [float(p) for p in rest.split(",")]
    except ValueError:
        raise ModelError(f"could not parse parameters of {spec!r}") from None
    if len(params) != n_params:
        raise ModelError(f"{family} takes {n_params} parameter(s), got {len(params)}")
    if not all(math.isfinite(p) and p > 0 for p in params):
        raise ModelError(f"parameters of {spec!r} must be positive and finite")
    return cls(*params)


@dataclass(frozen=True)
class AsymptoticConstants:
    """Mean and variance functionals of the two statistics under a null model.

    ``mean_*_integral`` still has to be multiplied by the canonical constant
    E|C(0)| and by ``n ** (-2/3)``; ``var_*`` already includes sigma^2.
    """

    mean_T_integral: float
    mean_U_integral: float
    var_T: float
    var_U: float
    quadrature_error_bound: float

    def to_dict(self):
        return asdict(self)


def _integrands(model):
    def lam(t):
        return (2 * model.h0(t) * model.f0(t) / model.dh0(t)) ** (1 / 3)

    return {
        "mean_T_integral": lambda t: lam(t) * model.h0(t),
        "mean_U_integral": lambda t: lam(t) * model.f0(t),
        "var_T": lambda t: 2 ** (4 / 3)
        * model.h0(t) ** 3
        * (model.h0(t) * model.f0(t)) ** (1 / 3)
        * model.dh0(t) ** (-4 / 3),
        "var_U": lambda t: lam(t) ** 4 * model.f0(t),
    }


def asymptotic_constants(model, a, canonical, *, lower=0.0, epsabs=QUAD_EPSABS) -> AsymptoticConstants:
    """Quadrature of the centering and variance integrals on ``[lower, a]``.

    Parameters
    ----------
    model : HazardModel
    a : float
    canonical : CanonicalConstants or float
        Source of sigma^2; a bare float is taken as sigma^2 itself.
    lower : float, default=0.0
        Left end of the integration range (for Weibull-type models whose
        hazard vanishes at 0).
    """
    sigma2 = getattr(canonical, "sigma2", canonical)
    if sigma2 is None or not math.isfinite(sigma2) or sigma2 < 0:
        raise MonoHazardError("canonical constants must provide a finite sigma2 >= 0")
    a = check_positive(a, "a", allow_zero=True)
    if a <= lower:
        return AsymptoticConstants(0.0, 0.0, 0.0, 0.0, 0.0)
    model.check_null_conditions(a, lower)
    vals = {}
    errs = []
    for key, fn in _integrands(model).items():
        val, err = integrate.quad(fn, lower, a, epsabs=epsabs, epsrel=0.0, limit=200)
        vals[key] = val
        errs.append(err)
    return AsymptoticConstants(
        mean_T_integral=vals["mean_T_integral"],
        mean_U_integral=vals["mean_U_integral"],
        var_T=sigma2 * vals["var_T"],
        var_U=sigma2 * vals["var_U"],
        quadrature_error_bound=max(errs[:2] + [sigma2 * errs[2], sigma2 * errs[3]]),
    )


def sample_from(model, n, seed, stream=None) -> SortedSample:
    """Draw ``n`` i.i.d. lifetimes by inverse-CDF sampling, sorted.

    Deterministic in ``(seed, stream)``.
    """
    n = check_count(n, "n", minimum=1)
    seed = check_seed(seed)
    if stream is None:
        key = ()
    elif isinstance(stream, (tuple, list)):
        key = tuple(int(k) for k in stream)
    else:
        key = (int(stream),)
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))
    u = rng.random(n)
    # u == 0 would map to a zero lifetime
    u[u == 0.0] = np.finfo(float).tiny
    return SortedSample(np.sort(model.quantile(u)))
