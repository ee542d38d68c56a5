import math

import numpy as np
import pytest
from scipy.optimize import brentq

from monohazard.exceptions import ModelError
from monohazard.models import asymptotic_constants, make_model, sample_from
from oracles import romberg

MODELS = ["linhaz:1,1", "linhaz:0.5,2", "gompertz:1,1", "gompertz:0.2,0.5", "exponential:1", "weibull:2,1.5"]


@pytest.mark.parametrize("spec", MODELS)
def test_self_consistency(spec):
    m = make_model(spec)
    t = np.linspace(1e-3, 2, 1000)
    assert np.allclose(m.F0(t), 1 - np.exp(-m.H0(t)), atol=1e-12, rtol=0)
    assert np.allclose(m.f0(t), m.h0(t) * (1 - m.F0(t)), atol=1e-12, rtol=0)
    # hazard is the derivative of the cumulative hazard, and so on
    h = 1e-6
    assert np.allclose((m.H0(t + h) - m.H0(t - h)) / (2 * h), m.h0(t), rtol=1e-7)
    assert np.allclose((m.h0(t + h) - m.h0(t - h)) / (2 * h), m.dh0(t), rtol=1e-6, atol=1e-8)
    u = np.linspace(0.01, 0.99, 99)
    assert np.allclose(m.F0(m.quantile(u)), u, atol=1e-12)


def test_closed_forms():
    m = make_model("linhaz:1,1")
    assert m.H0(1.0) == 1.5 and m.f0(1.0) == pytest.approx(2 * math.exp(-1.5))
    e = make_model("exponential:1")
    assert e.h0(3.0) == 1.0 and e.dh0(3.0) == 0.0 and e.F0(1.0) == pytest.approx(1 - math.exp(-1))
    assert e.quantile(0.5) == pytest.approx(math.log(2))
    g = make_model("gompertz:1,1")
    assert g.h0(0.0) == 1.0 and g.dh0(0.0) == 1.0


def test_linhaz_quantile_matches_root_finder():
    m = make_model("linhaz:1,1")
    for u in [1e-9, 0.1, 0.5, 0.9, 0.999]:
        root = brentq(lambda t: t + t * t / 2 + math.log1p(-u), 0, 50, xtol=1e-15)
        assert m.quantile(u) == pytest.approx(root, rel=1e-12)
        assert m.quantile(u) == pytest.approx(-1 + math.sqrt(1 - 2 * math.log1p(-u)), rel=1e-9)


@pytest.mark.parametrize("spec", ["", "linhaz:1", "linhaz:1,-1", "foo:1", "linhaz:a,b", "exponential:0"])
def test_bad_specs(spec):
    with pytest.raises(ModelError):
        make_model(spec)


def test_null_conditions():
    with pytest.raises(ModelError):
        asymptotic_constants(make_model("exponential:1"), 1.0, 0.03)
    with pytest.raises(ModelError):
        asymptotic_constants(make_model("weibull:2,1"), 1.0, 0.03)
    with pytest.raises(ModelError):
        asymptotic_constants(make_model("gompertz:1,1"), 20.0, 0.03)
    assert asymptotic_constants(make_model("weibull:2,1"), 1.0, 0.03, lower=0.2).var_T > 0


def test_empty_interval():
    ac = asymptotic_constants(make_model("linhaz:1,1"), 0.0, 0.03)
    assert (ac.mean_T_integral, ac.mean_U_integral, ac.var_T, ac.var_U) == (0, 0, 0, 0)


def test_linear_in_sigma2():
    m = make_model("gompertz:1,1")
    a1 = asymptotic_constants(m, 1.0, 0.03)
    a2 = asymptotic_constants(m, 1.0, 0.06)
    assert a2.var_T == pytest.approx(2 * a1.var_T, rel=1e-14)
    assert a2.var_U == pytest.approx(2 * a1.var_U, rel=1e-14)
    assert a2.mean_T_integral == a1.mean_T_integral and a2.mean_U_integral == a1.mean_U_integral


def test_romberg_oracle():
    m = make_model("linhaz:1,1")

    def f(t):
        return (2 * m.h0(t) * m.f0(t) / m.dh0(t)) ** (1 / 3) * m.h0(t)

    ref, err = romberg(f, 0.0, 1.0)
    assert err < 1e-11
    assert abs(asymptotic_constants(m, 1.0, 1.0).mean_T_integral - ref) < 1e-8


def test_quadrature_tolerance_halving():
    m = make_model("gompertz:0.5,1")
    a = asymptotic_constants(m, 1.0, 0.03)
    b = asymptotic_constants(m, 1.0, 0.03, epsabs=5e-11)
    for fld in ("mean_T_integral", "mean_U_integral", "var_T", "var_U"):
        assert abs(getattr(a, fld) - getattr(b, fld)) <= max(a.quadrature_error_bound, 1e-14)


def test_linhaz_reparametrization_scaling():
    # t -> t / lam maps linhaz(alpha, beta) on [0, a] to linhaz(alpha lam, beta lam^2)
    # on [0, a / lam]; both functionals are invariant (factor 1)
    alpha, beta, a, lam = 1.0, 1.0, 1.0, 2.5
    base = asymptotic_constants(make_model(f"linhaz:{alpha},{beta}"), a, 0.03)
    moved = asymptotic_constants(make_model(f"linhaz:{alpha * lam},{beta * lam**2}"), a / lam, 0.03)
    assert moved.var_T == pytest.approx(base.var_T, rel=1e-9)
    assert moved.mean_T_integral == pytest.approx(base.mean_T_integral, rel=1e-9)


def test_sampling_deterministic_and_sorted():
    m = make_model("linhaz:1,1")
    s1 = sample_from(m, 1000, seed=3)
    s2 = sample_from(m, 1000, seed=3)
    assert np.array_equal(s1.obs, s2.obs)
    assert not np.array_equal(s1.obs, sample_from(m, 1000, seed=4).obs)
    assert np.all(np.diff(s1.obs) > 0)
    with pytest.raises(ValueError):
        sample_from(m, 0, seed=1)
