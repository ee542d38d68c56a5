"""Simulation checks of the large-sample behaviour of the statistics.

Most experiments run on the Gaussian surrogate
``V_n(x) = H0(x) + n**-0.5 * W(G(x))`` with ``G = F0 / (1 - F0)``, whose cost
does not depend on ``n``. The empirical experiments draw actual samples.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from ._parallel import ordered_map
from ._validation import check_count, check_positive, check_seed
from .canonical import HULL_LIFT
from .convex_minorant import lower_hull
from .exceptions import MonoHazardError
from .models import ConstantHazard, HazardModel, asymptotic_constants, make_model, sample_from
from .statistics import statistic_T, statistic_U

MIN_CLT_REPLICATIONS = 100
MISMATCH_TOL = 1e-9

_TAG_SURROGATE = 10
_TAG_EMPIRICAL = 11
_TAG_LIMIT = 12
_TAG_LINEAR = 13


def _rng(seed, key):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def _model(model):
    return make_model(model) if isinstance(model, str) else model


def default_grid_step(n):
    """``min(1e-4, n**(-1/3) / 50)``: at least 50 grid points per local scale."""
    return min(1e-4, n ** (-1 / 3) / 50)


# ---------------------------------------------------------------- partition


@dataclass(frozen=True)
class Block:
    kind: str  # "I" big, "J~" left part of L_k, "J-" right part of L_k
    k: int
    lo: float
    hi: float

    @property
    def length(self):
        return self.hi - self.lo


@dataclass(frozen=True)
class BlockPartition:
    """Big blocks separated by small blocks, covering ``[0, a)``.

    ``blocks`` is ordered ``J~_1, I_1, J-_2, J~_2, I_2, ..., I_m, J-_{m+1}``;
    block ``L_k = J~_k + I_k + J-_{k+1}`` is ``[(k-1) a / m, k a / m)``. The
    small block between ``I_k`` and ``I_{k+1}`` is ``J-_{k+1} + J~_{k+1}``; the
    two edge small blocks have half its length.
    """

    n: float
    a: float
    big_len: float
    small_len: float
    m: int
    blocks: tuple = field(repr=False)

    @property
    def big_blocks(self):
        return [b for b in self.blocks if b.kind == "I"]

    @property
    def half_small_blocks(self):
        return [b for b in self.blocks if b.kind != "I"]

    @property
    def L_blocks(self):
        return [(k * self.a / self.m, (k + 1) * self.a / self.m) for k in range(self.m)]

    @property
    def small_blocks(self):
        """Merged small blocks, edges included (``m + 1`` of them)."""
        halves = self.half_small_blocks
        out = [(halves[0].lo, halves[0].hi)]
        for left, right in zip(halves[1:-1:2], halves[2:-1:2]):
            out.append((left.lo, right.hi))
        out.append((halves[-1].lo, halves[-1].hi))
        return out


def build_partition(n, a=1.0) -> BlockPartition:
    """Partition ``[0, a)`` for sample size ``n``.

    Nominal lengths are ``n**(-1/3) log n`` (big) and ``2 n**(-1/3) sqrt(log n)``
    (small); ``m = floor(a / (big + small))`` and both lengths are then
    stretched by the same factor so the ``m`` pieces fill ``[0, a)`` exactly.
    """
    a = check_positive(a, "a")
    if not n > 1:
        raise MonoHazardError("n must exceed 1")
    logn = math.log(n)
    big = n ** (-1 / 3) * logn
    small = 2 * n ** (-1 / 3) * math.sqrt(logn)
    m = math.floor(a / (big + small))
    if m < 1:
        raise MonoHazardError(
            f"n={n:g} is too small for one big block on [0, {a}] "
            f"(needs big + small = {big + small:.3g} <= a); use a larger n"
        )
    stretch = a / (m * (big + small))
    big *= stretch
    small *= stretch
    blocks = []
    for k in range(1, m + 1):
        lo = (k - 1) * a / m
        hi = k * a / m if k < m else a
        blocks.append(Block("J~", k, lo, lo + small / 2))
        blocks.append(Block("I", k, lo + small / 2, hi - small / 2))
        blocks.append(Block("J-", k + 1, hi - small / 2, hi))
    return BlockPartition(n=n, a=a, big_len=big, small_len=small, m=m, blocks=tuple(blocks))


# ---------------------------------------------------------------- surrogate


class SurrogateGrid:
    """Grid quantities of the surrogate process for one model and interval."""

    def __init__(self, model, a=1.0, delta_x=1e-4):
        model = _model(model)
        a = check_positive(a, "a")
        delta_x = check_positive(delta_x, "delta_x")
        if model.F0(a) >= 1 - 1e-12:
            raise MonoHazardError(f"F0(a) is numerically 1 for {model.spec} at a={a}")
        m = max(1, int(round(a / delta_x)))
        self.model = model
        self.a = a
        self.x = np.linspace(0.0, a, m + 1)
        self.delta_x = a / m
        self.H0 = model.H0(self.x)
        self.F0 = model.F0(self.x)
        self.f0 = model.f0(self.x)
        self.dG = np.diff(model.odds(self.x))
        self.sqrt_dG = np.sqrt(self.dG)
        self.dF0 = np.diff(self.F0)
        # hull lift per unit noise amplitude, integrated against dF0
        # and against (1 - F0) dF0
        self.lift_F = HULL_LIFT * float(np.sum(self.sqrt_dG * self.dF0))
        S = 1 - self.F0
        self.lift_U = HULL_LIFT * float(np.sum(self.sqrt_dG * 0.5 * (S[:-1] ** 2 - S[1:] ** 2)))

    def brownian(self, rng):
        w = np.empty(self.x.size)
        w[0] = 0.0
        np.cumsum(rng.standard_normal(self.dG.size) * self.sqrt_dG, out=w[1:])
        return w

    def trapezoid(self, y):
        return float(np.sum(0.5 * (y[:-1] + y[1:])) * self.delta_x)


def surrogate_path(grid: SurrogateGrid, n, seed, stream=0, *, noise=True):
    """Values of ``V_n`` on the grid."""
    if not noise:
        return grid.H0.copy()
    w = grid.brownian(_rng(seed, (_TAG_SURROGATE, int(stream))))
    return grid.H0 + w / math.sqrt(n)


def simulate_surrogate_Dn(model, n, delta_x=None, seed=0, *, a=1.0, stream=0, noise=True, correct=True, grid=None):
    """``D_n = int_0^a (V_n - C_n) dF0`` for one surrogate path.

    ``C_n`` is the convex minorant of the sampled path on ``[0, a]``; the
    integral is a trapezoid rule against ``f0``.
    """
    if not n > 0:
        raise MonoHazardError("n must be positive")
    seed = check_seed(seed)
    if grid is None:
        grid = SurrogateGrid(model, a, default_grid_step(n) if delta_x is None else delta_x)
    v = surrogate_path(grid, n, seed, stream, noise=noise)
    _, hull = lower_hull(grid.x, v)
    D = grid.trapezoid((v - hull) * grid.f0)
    if correct and noise:
        D += grid.lift_F / math.sqrt(n)
    return D


# ---------------------------------------------------------------- CLT


@dataclass(frozen=True)
class CLTReport:
    kind: str
    model: str
    n: float
    a: float
    replications: int
    seed: int
    draws: np.ndarray = field(repr=False)
    sample_mean: float
    sample_var: float
    target_var: float
    var_ratio: float
    ks_distance: float
    ks_p: float
    mean_check: dict
    pilot_replications: int = 0
    pilot_mean: float | None = None
    ks_distance_pilot: float | None = None
    ks_p_pilot: float | None = None

    def to_dict(self, include_draws=False):
        d = asdict(self)
        d.pop("draws")
        if include_draws:
            d["draws"] = self.draws.tolist()
        return d


def _empirical_value(kind, model, n, a, seed, r):
    s = sample_from(model, n, seed, stream=(_TAG_EMPIRICAL, r))
    return statistic_T(s, a) if kind == "T" else statistic_U(s, a)


def _mean_check(values, n, target):
    scaled = n ** (2 / 3) * values
    mean = float(scaled.mean())
    se = float(scaled.std(ddof=1) / math.sqrt(values.size))
    return {
        "scaled_mean": mean,
        "scaled_mean_se": se,
        "target": float(target),
        "rel_error": float(abs(mean - target) / target) if target else math.inf,
    }


def clt_experiment(
    kind,
    model,
    n,
    replications,
    constants,
    seed=0,
    *,
    a=1.0,
    delta_x=None,
    correct=True,
    pilot_replications=None,
    threads=1,
) -> CLTReport:
    """Standardized draws of ``T``, ``U`` or the surrogate ``D_n`` against their normal limit.

    Draws are ``n**(5/6) * (value - mu_n)`` with ``mu_n = n**(-2/3) E|C(0)| I``;
    the target variance and ``I`` come from :func:`asymptotic_constants`.
    The surrogate shares the centering and variance of ``T``.

    Because of the ``n**(5/6)`` factor, a relative error ``r`` in ``mu_n`` moves
    the draws by about ``r n**(1/6)`` standard deviations, and ``mu_n`` carries
    finite-``n`` corrections. The ``*_pilot`` fields therefore repeat the KS test
    with the draws centered at ``E value`` estimated from an independent batch
    of ``pilot_replications`` runs (default: ``replications`` for the surrogate,
    none for the empirical statistics).
    """
    kind = str(kind)
    if kind not in ("T", "U", "surrogate"):
        raise MonoHazardError(f"kind must be 'T', 'U' or 'surrogate', got {kind!r}")
    model = _model(model)
    if isinstance(model, ConstantHazard):
        raise MonoHazardError("the normal limit needs a strictly increasing hazard; see constant_hazard_experiment")
    replications = check_count(replications, "replications", minimum=MIN_CLT_REPLICATIONS)
    seed = check_seed(seed)
    a = check_positive(a, "a")
    if constants is None:
        raise MonoHazardError("clt_experiment needs canonical constants")
    ac = asymptotic_constants(model, a, constants)
    if kind == "U":
        integral, target_var = ac.mean_U_integral, ac.var_U
    else:
        integral, target_var = ac.mean_T_integral, ac.var_T
    mean_target = constants.e_abs_c0 * integral

    if kind == "surrogate":
        grid = SurrogateGrid(model, a, default_grid_step(n) if delta_x is None else delta_x)

        def one(r):
            return simulate_surrogate_Dn(model, n, seed=seed, stream=r, correct=correct, grid=grid)

    else:
        n = check_count(n, "n")

        def one(r):
            return _empirical_value(kind, model, n, a, seed, r)

    if pilot_replications is None:
        pilot_replications = replications if kind == "surrogate" else 0
    pilot_replications = check_count(pilot_replications, "pilot_replications", minimum=0)
    values = np.array(ordered_map(one, range(replications), threads))
    mu = n ** (-2 / 3) * mean_target
    draws = n ** (5 / 6) * (values - mu)
    target = stats.norm(0.0, math.sqrt(target_var)).cdf
    ks = stats.kstest(draws, target)
    sample_var = float(np.var(draws, ddof=1))
    pilot = {}
    if pilot_replications:
        pv = np.array(ordered_map(one, range(replications, replications + pilot_replications), threads))
        pilot_mean = float(pv.mean())
        ks_pilot = stats.kstest(n ** (5 / 6) * (values - pilot_mean), target)
        pilot = {
            "pilot_replications": pilot_replications,
            "pilot_mean": pilot_mean,
            "ks_distance_pilot": float(ks_pilot.statistic),
            "ks_p_pilot": float(ks_pilot.pvalue),
        }
    return CLTReport(
        kind=kind,
        model=model.spec,
        n=n,
        a=a,
        replications=replications,
        seed=seed,
        draws=draws,
        sample_mean=float(draws.mean()),
        sample_var=sample_var,
        target_var=float(target_var),
        var_ratio=sample_var / target_var,
        ks_distance=float(ks.statistic),
        ks_p=float(ks.pvalue),
        mean_check=_mean_check(values, n, mean_target),
        **pilot,
    )


# ---------------------------------------------------------------- localization


@dataclass(frozen=True)
class LocalizationReport:
    n: float
    replications: int
    m: int
    delta_x: float
    big_mismatch_frequency: float
    small_no_knot_frequency: float
    seed: int

    def to_dict(self):
        return asdict(self)


def _index_range(lo, hi, dx, last):
    i0 = max(0, math.ceil(lo / dx - 1e-9))
    i1 = min(last, math.floor(hi / dx + 1e-9))
    return i0, i1


def localization_check(model, n, delta_x=None, replications=200, seed=0, *, a=1.0, noise=True, threads=1):
    """Compare the global minorant of ``V_n`` with minorants computed block by block.

    For every big block ``I_k`` the check records whether the global hull
    and the hull of ``V_n`` restricted to ``L_k`` differ anywhere on
    ``I_k`` by more than 1e-9. For every half small block it records whether
    the global hull has no knot inside (ends of ``[0, a]`` excluded).
    Frequencies are averaged over blocks and replications.
    """
    model = _model(model)
    part = build_partition(n, a)
    replications = check_count(replications, "replications")
    seed = check_seed(seed)
    grid = SurrogateGrid(model, part.a, default_grid_step(n) if delta_x is None else delta_x)
    dx = grid.delta_x
    last = grid.x.size - 1
    L_ranges = [_index_range(lo, hi, dx, last) for lo, hi in part.L_blocks]
    I_ranges = [_index_range(b.lo, b.hi, dx, last) for b in part.big_blocks]
    half = part.half_small_blocks

    def one(r):
        v = surrogate_path(grid, n, seed, r, noise=noise)
        knots, hull = lower_hull(grid.x, v)
        mism = 0
        for (l0, l1), (i0, i1) in zip(L_ranges, I_ranges):
            _, local = lower_hull(grid.x[l0 : l1 + 1], v[l0 : l1 + 1])
            diff = np.abs(hull[i0 : i1 + 1] - local[i0 - l0 : i1 - l0 + 1])
            mism += bool(diff.max(initial=0.0) > MISMATCH_TOL)
        inner = grid.x[knots[1:-1]]
        empty = 0
        for b in half:
            lo_i, hi_i = np.searchsorted(inner, [b.lo, b.hi], side="left")
            empty += bool(hi_i == lo_i)
        return mism, empty

    res = np.array(ordered_map(one, range(replications), threads))
    return LocalizationReport(
        n=n,
        replications=replications,
        m=part.m,
        delta_x=dx,
        big_mismatch_frequency=float(res[:, 0].sum() / (replications * part.m)),
        small_no_knot_frequency=float(res[:, 1].sum() / (replications * len(half))),
        seed=seed,
    )


# ---------------------------------------------------------------- constant hazard


def limit_U_constant_hazard(grid: SurrogateGrid, seed, stream, *, correct=True):
    """One draw of ``int_0^a (1 - F0) (W(G) - C) dF0`` with ``C`` the minorant of ``W(G)``."""
    w = grid.brownian(_rng(seed, (_TAG_LIMIT, int(stream))))
    _, hull = lower_hull(grid.x, w)
    val = grid.trapezoid((1 - grid.F0) * (w - hull) * grid.f0)
    if correct:
        val += grid.lift_U
    return val


def _quantile_se(x, q):
    """Order-statistic SE of a sample quantile from the binomial interval width."""
    xs = np.sort(x)
    R = xs.size
    k = math.sqrt(R * q * (1 - q))
    lo = xs[max(0, int(math.floor(R * q - k)))]
    hi = xs[min(R - 1, int(math.ceil(R * q + k)))]
    return float((hi - lo) / 2)


QUANTILE_LEVELS = (0.5, 0.9, 0.95)


@dataclass(frozen=True)
class ConstantHazardReport:
    lam: float
    a: float
    n: int
    replications: int
    seed: int
    levels: tuple
    empirical_quantiles: tuple
    empirical_se: tuple
    limit_quantiles: tuple
    limit_se: tuple
    empirical: np.ndarray = field(repr=False)
    limit: np.ndarray = field(repr=False)

    @property
    def relative_differences(self):
        return tuple(abs(e - l) / l for e, l in zip(self.empirical_quantiles, self.limit_quantiles))

    def to_dict(self):
        d = asdict(self)
        d.pop("empirical")
        d.pop("limit")
        d["relative_differences"] = list(self.relative_differences)
        return d


def _sqrt_n_U(lam, a, n, seed, replications, threads, tag):
    model = ConstantHazard(lam)

    def one(r):
        s = sample_from(model, n, seed, stream=(tag, n, r))
        return math.sqrt(n) * statistic_U(s, a)

    return np.array(ordered_map(one, range(replications), threads))


def constant_hazard_experiment(
    lam=1.0, a=1.0, n=10_000, replications=2000, delta_x=1e-4, seed=0, *, correct=True, threads=1
) -> ConstantHazardReport:
    """Quantiles of ``n**0.5 * U_n`` under a constant hazard against its limit law."""
    lam = check_positive(lam, "lam")
    a = check_positive(a, "a")
    n = check_count(n, "n")
    replications = check_count(replications, "replications", minimum=MIN_CLT_REPLICATIONS)
    seed = check_seed(seed)
    model = ConstantHazard(lam)
    if model.F0(a) >= 1 - 1e-12:
        raise MonoHazardError("F0(a) is numerically 1")
    emp = _sqrt_n_U(lam, a, n, seed, replications, threads, _TAG_EMPIRICAL)
    grid = SurrogateGrid(model, a, delta_x)
    lim = np.array(
        ordered_map(lambda r: limit_U_constant_hazard(grid, seed, r, correct=correct), range(replications), threads)
    )
    lv = QUANTILE_LEVELS
    return ConstantHazardReport(
        lam=lam,
        a=a,
        n=n,
        replications=replications,
        seed=seed,
        levels=lv,
        empirical_quantiles=tuple(float(q) for q in np.quantile(emp, lv)),
        empirical_se=tuple(_quantile_se(emp, q) for q in lv),
        limit_quantiles=tuple(float(q) for q in np.quantile(lim, lv)),
        limit_se=tuple(_quantile_se(lim, q) for q in lv),
        empirical=emp,
        limit=lim,
    )


def rate_check(lam=1.0, a=1.0, n_pair=(10_000, 100_000), replications=2000, seed=0, *, threads=1):
    """Sample-variance ratios of ``U_n`` between two sizes under two scalings.

    Under a constant hazard ``n**0.5 U_n`` has a limit, so its variance
    ratio should be near 1, while ``n**(5/6) U_n`` blows up.
    """
    n1, n2 = (check_count(n, "n") for n in n_pair)
    replications = check_count(replications, "replications", minimum=MIN_CLT_REPLICATIONS)
    seed = check_seed(seed)
    v1 = np.var(_sqrt_n_U(lam, a, n1, seed, replications, threads, _TAG_EMPIRICAL), ddof=1)
    v2 = np.var(_sqrt_n_U(lam, a, n2, seed, replications, threads, _TAG_EMPIRICAL), ddof=1)
    half = float(v2 / v1)
    return {
        "n_pair": [n1, n2],
        "replications": replications,
        "var_ratio_sqrt_n": half,
        "var_ratio_n_5_6": half * (n2 / n1) ** (2 / 3),
    }


# ---------------------------------------------------------------- linearization


def _linearized_T(s, model, a):
    obs = s.obs
    n = s.n
    k = int(np.searchsorted(obs, a, side="right"))
    if k == 0:
        return 0.0
    xi = obs[:k]
    F = model.F0(xi)
    left = model.H0(xi) + (np.arange(k) / n - F) / (1 - F)
    xs = [0.0] + xi.tolist()
    ys = [0.0] + left.tolist()
    if xi[-1] < a:
        Fa = model.F0(a)
        xs.append(a)
        ys.append(float(model.H0(a) + (k / n - Fa) / (1 - Fa)))
    xs = np.array(xs)
    ys = np.array(ys)
    _, hull = lower_hull(xs, ys)
    return float(np.sum(ys[1 : k + 1] - hull[1 : k + 1]) / n)


def linearization_check(model, n=10_000, replications=200, seed=0, *, a=1.0, threads=1):
    """Mean ``|T - T_lin|`` where ``T_lin`` replaces the empirical cumulative
    hazard by ``H0 + (F_n - F0) / (1 - F0)``."""
    model = _model(model)
    n = check_count(n, "n")
    replications = check_count(replications, "replications")
    seed = check_seed(seed)

    def one(r):
        s = sample_from(model, n, seed, stream=(_TAG_LINEAR, r))
        return statistic_T(s, a) - _linearized_T(s, model, a)

    d = np.abs(np.array(ordered_map(one, range(replications), threads)))
    return {"n": n, "replications": replications, "mean_abs_diff": float(d.mean()), "bound": 10.0 / n}
