import numpy as np
import pytest

from risklattice import (
    DomainError,
    GapResult,
    RiskMeasureSpec,
    cvar_loss,
    expectile_loss,
    exponential_loss,
    linear_loss,
    poly2exp_loss,
    random_pair_sweep,
    subadditivity_gap,
    submodularity_gap,
    violation_rate,
)


def test_expected_loss_gap_exactly_zero():
    rng = np.random.default_rng(2)
    spec = RiskMeasureSpec.expected_loss(exponential_loss(1.0))
    for _ in range(50):
        x, y = rng.standard_normal((2, 8))
        res = submodularity_gap(spec, x, y)
        assert abs(res.gap) <= 1e-12 and not res.violated


def test_identical_samples_gap_zero():
    rng = np.random.default_rng(3)
    x = rng.standard_normal(10)
    for spec in (RiskMeasureSpec.var(0.8), RiskMeasureSpec.es(0.8),
                 RiskMeasureSpec.shortfall(exponential_loss(1.0))):
        assert submodularity_gap(spec, x, x).gap == 0.0


def test_es_gap_never_meaningfully_negative():
    rng = np.random.default_rng(4)
    spec = RiskMeasureSpec.es(0.9)
    for _ in range(500):
        x, y = rng.standard_normal((2, 12))
        assert submodularity_gap(spec, x, y).gap >= -1e-12


def test_gap_symmetry_exact():
    rng = np.random.default_rng(5)
    spec = RiskMeasureSpec.var(0.7)
    for _ in range(50):
        x, y = rng.standard_normal((2, 9))
        assert submodularity_gap(spec, x, y).gap == submodularity_gap(spec, y, x).gap


def test_violated_flag_follows_epsilon():
    res = GapResult(gap=-1e-6, violated=True, epsilon=1e-8)
    assert res.violated == (res.gap < -res.epsilon)
    spec = RiskMeasureSpec.var(0.5)
    x = np.array([1.0, 0.0, 0.0, 0.0])
    y = np.array([0.0, 1.0, 0.0, 0.0])
    loose = subadditivity_gap(spec, x, y, epsilon=2.0)
    assert loose.gap == -1.0 and not loose.violated


# ---------------------------------------------------------------------------
# subadditivity


def test_var_subadditivity_violation_example():
    spec = RiskMeasureSpec.var(0.5)
    x = np.array([1.0, 0.0, 0.0, 0.0])
    y = np.array([0.0, 1.0, 0.0, 0.0])
    res = subadditivity_gap(spec, x, y)
    assert res.gap == -1.0 and res.violated


def test_es_subadditivity_never_violated():
    rng = np.random.default_rng(6)
    spec = RiskMeasureSpec.es(0.8)
    for _ in range(300):
        x, y = rng.standard_normal((2, 10))
        assert subadditivity_gap(spec, x, y).gap >= -1e-12


def test_zero_vector_partner_gap_zero():
    rng = np.random.default_rng(7)
    x = rng.standard_normal(10)
    zero = np.zeros(10)
    for spec in (RiskMeasureSpec.es(0.8), RiskMeasureSpec.shortfall(exponential_loss(1.0))):
        assert abs(subadditivity_gap(spec, x, zero).gap) <= 1e-10


# ---------------------------------------------------------------------------
# sweeps


def test_sweep_deterministic_and_thread_invariant():
    spec = RiskMeasureSpec.var(0.8)
    a = random_pair_sweep(spec, 10, 400, seed=9, generator="heavy_tail")
    b = random_pair_sweep(spec, 10, 400, seed=9, generator="heavy_tail")
    c = random_pair_sweep(spec, 10, 400, seed=9, generator="heavy_tail", threads=3)
    assert a.worst_gap == b.worst_gap == c.worst_gap
    assert a.violations == b.violations == c.violations
    np.testing.assert_array_equal(a.worst_pair[0], c.worst_pair[0])
    np.testing.assert_array_equal(a.worst_pair[1], c.worst_pair[1])


def test_sweep_seed_changes_results():
    spec = RiskMeasureSpec.var(0.8)
    a = random_pair_sweep(spec, 10, 400, seed=9)
    b = random_pair_sweep(spec, 10, 400, seed=10)
    assert not np.array_equal(a.worst_pair[0], b.worst_pair[0])


def test_oce_sweep_clean():
    rep = random_pair_sweep(RiskMeasureSpec.oce(cvar_loss(0.8)), 10, 1_000, seed=12)
    assert rep.violations == 0


def test_shortfall_interior_curvature_sweep_clean():
    rep = random_pair_sweep(RiskMeasureSpec.shortfall(poly2exp_loss()), 10, 1_000, seed=13)
    assert rep.violations == 0


def test_expectile_gaussian_sweep_finds_violation():
    rep = random_pair_sweep(
        RiskMeasureSpec.shortfall(expectile_loss(1.0)), 4, 2_000, seed=3, generator="gaussian"
    )
    assert rep.violations >= 1
    assert rep.worst_gap < -1e-8
    x, y = rep.worst_pair
    res = submodularity_gap(RiskMeasureSpec.shortfall(expectile_loss(1.0)), x, y)
    assert res.gap == pytest.approx(rep.worst_gap, abs=1e-12)


def test_two_point_generator_draws_indicators():
    rep = random_pair_sweep(RiskMeasureSpec.es(0.6), 8, 50, seed=1, generator="two_point")
    x, y = rep.worst_pair
    assert set(np.unique(x)) <= {0.0, 1.0}
    assert set(np.unique(y)) <= {0.0, 1.0}


def test_sweep_argument_validation():
    spec = RiskMeasureSpec.es(0.9)
    with pytest.raises(DomainError):
        random_pair_sweep(spec, 2, 10, seed=0)  # n_atoms < 3
    with pytest.raises(DomainError):
        random_pair_sweep(spec, 5, 0, seed=0)
    with pytest.raises(DomainError):
        random_pair_sweep(spec, 5, 10, seed=0, generator="cauchy")


# ---------------------------------------------------------------------------
# violation rate


def test_violation_rate_arithmetic():
    ok = GapResult(gap=0.0, violated=False, epsilon=1e-8)
    bad = GapResult(gap=-1.0, violated=True, epsilon=1e-8)
    assert violation_rate([ok] * 10) == 0.0
    assert violation_rate([bad] * 3 + [ok] * 9) == 0.25


def test_violation_rate_matches_reported_precision():
    results = [GapResult(gap=-1.0, violated=True, epsilon=1e-8)] * 17_966
    results += [GapResult(gap=0.0, violated=False, epsilon=1e-8)] * (181_524 - 17_966)
    assert round(100 * violation_rate(results), 2) == 9.90


def test_violation_rate_empty():
    with pytest.raises(DomainError):
        violation_rate([])
