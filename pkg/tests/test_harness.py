import math

import numpy as np
import pytest

from monohazard.canonical import pinned_constants
from monohazard.exceptions import MonoHazardError
from monohazard.harness import (
    SurrogateGrid,
    build_partition,
    clt_experiment,
    constant_hazard_experiment,
    default_grid_step,
    limit_U_constant_hazard,
    linearization_check,
    localization_check,
    rate_check,
    simulate_surrogate_Dn,
)
from monohazard.models import ConstantHazard, LinearHazard


@pytest.mark.parametrize("n", [1e4, 1e6, 1e8, 1e12])
def test_partition_covers_interval(n):
    part = build_partition(n, 1.0)
    blocks = part.blocks
    assert blocks[0].lo == 0.0 and blocks[-1].hi == 1.0
    for left, right in zip(blocks[:-1], blocks[1:]):
        assert right.lo == pytest.approx(left.hi, abs=1e-15)
        assert left.hi > left.lo
    assert len(part.big_blocks) == part.m
    # the two ends of [0, a] get half-length small blocks
    assert blocks[0].length == pytest.approx(part.small_len / 2)
    assert blocks[-1].length == pytest.approx(part.small_len / 2)
    assert part.big_len / part.small_len == pytest.approx(math.sqrt(math.log(n)) / 2)
    assert len(part.L_blocks) == part.m


def test_partition_block_count():
    assert build_partition(1e9).m == 33
    with pytest.raises(MonoHazardError):
        build_partition(100, 1.0)
    with pytest.raises(MonoHazardError):
        build_partition(1, 1.0)


def test_grid_step_rule():
    assert default_grid_step(1e6) == 1e-4
    assert default_grid_step(1e9) == pytest.approx(1e-3 / 50)


def test_surrogate_noise_off_and_determinism():
    m = LinearHazard(1, 1)
    assert simulate_surrogate_Dn(m, 1e6, delta_x=1e-3, seed=1, noise=False, correct=False) == 0.0
    d1 = simulate_surrogate_Dn(m, 1e6, delta_x=1e-3, seed=1, stream=5)
    d2 = simulate_surrogate_Dn(m, 1e6, delta_x=1e-3, seed=1, stream=5)
    d3 = simulate_surrogate_Dn(m, 1e6, delta_x=1e-3, seed=1, stream=6)
    assert d1 == d2 != d3
    assert d1 > 0


def test_surrogate_mean_stable_across_n():
    m = LinearHazard(1, 1)
    k = pinned_constants()
    means = []
    for n in (1e6, 1e8):
        r = clt_experiment("surrogate", m, n, 200, k, seed=3, pilot_replications=0)
        means.append(r.mean_check["scaled_mean"])
        se = r.mean_check["scaled_mean_se"]
    assert abs(means[0] - means[1]) < 0.05 * means[1]
    assert se > 0


def test_clt_rejects_bad_inputs():
    k = pinned_constants()
    with pytest.raises(MonoHazardError):
        clt_experiment("T", LinearHazard(1, 1), 1000, 2, k)
    with pytest.raises(MonoHazardError):
        clt_experiment("T", ConstantHazard(1.0), 1000, 200, k)
    with pytest.raises(MonoHazardError):
        clt_experiment("V", LinearHazard(1, 1), 1000, 200, k)
    with pytest.raises(MonoHazardError):
        clt_experiment("T", LinearHazard(1, 1), 1000, 200, None)


def test_clt_empirical_small_run():
    r = clt_experiment("U", "linhaz:1,1", 2000, 100, pinned_constants(), seed=1)
    assert r.draws.shape == (100,)
    assert r.pilot_replications == 0 and r.pilot_mean is None
    assert 0.3 < r.var_ratio < 3
    assert set(r.to_dict()) >= {"var_ratio", "ks_p", "mean_check"}


def test_localization_noise_off_and_range():
    rep = localization_check(LinearHazard(1, 1), 1e6, delta_x=1e-3, replications=3, noise=False)
    assert rep.big_mismatch_frequency == 0.0
    rep = localization_check(LinearHazard(1, 1), 1e6, delta_x=5e-4, replications=5, seed=2)
    assert 0.0 <= rep.big_mismatch_frequency <= 1.0
    assert 0.0 <= rep.small_no_knot_frequency <= 1.0
    assert rep.m == build_partition(1e6).m


def test_constant_hazard_limit_independent_of_n():
    a = constant_hazard_experiment(1.0, 1.0, n=500, replications=100, delta_x=1e-3, seed=4)
    b = constant_hazard_experiment(1.0, 1.0, n=2000, replications=100, delta_x=1e-3, seed=4)
    assert np.array_equal(a.limit, b.limit)
    assert not np.array_equal(a.empirical, b.empirical)
    assert np.all(a.empirical >= 0) and np.all(a.limit >= 0)
    assert a.levels == (0.5, 0.9, 0.95)
    assert all(se >= 0 for se in a.empirical_se)


def test_limit_U_noise_free_parts():
    grid = SurrogateGrid(ConstantHazard(1.0), 1.0, 1e-3)
    v = limit_U_constant_hazard(grid, 0, 0, correct=False)
    vc = limit_U_constant_hazard(grid, 0, 0, correct=True)
    assert vc - v == pytest.approx(grid.lift_U)
    assert grid.lift_U > 0


def test_rate_check_shape():
    r = rate_check(1.0, 1.0, (500, 4000), replications=100, seed=1)
    assert r["var_ratio_n_5_6"] == pytest.approx(r["var_ratio_sqrt_n"] * 8 ** (2 / 3))


def test_linearization_within_bound():
    r = linearization_check(LinearHazard(1, 1), n=5000, replications=30, seed=1)
    assert r["mean_abs_diff"] < r["bound"]
