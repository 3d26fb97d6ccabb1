import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exportcast.evaluate import (fit_regression, kfold_evaluate, mae, make_fold_plan, mape,
                                 metrics, mse, rmse)
from exportcast.mlp import NetworkConfig


def oracle(P, A):
    """Plain-loop versions of the four criteria."""
    T = len(P)
    sq = ab = pct = 0.0
    for p, a in zip(P, A):
        sq += (p - a) * (p - a)
        ab += abs(p - a)
        pct += abs((p - a) / a)
    return {"mse": sq / T, "rmse": math.sqrt(sq / T), "mape": pct / T * 100, "mae": ab / T}


finite = st.floats(-1e6, 1e6, allow_nan=False)
nonzero = st.floats(0.1, 1e6) | st.floats(-1e6, -0.1)


@st.composite
def pairs(draw, elements=finite, actuals=nonzero):
    n = draw(st.integers(1, 100))
    P = draw(st.lists(elements, min_size=n, max_size=n))
    A = draw(st.lists(actuals, min_size=n, max_size=n))
    return np.array(P), np.array(A)


def test_identical_vectors_give_zero():
    A = np.array([1.0, 2.0, 3.0])
    assert mse(A, A) == rmse(A, A) == mape(A, A) == mae(A, A) == 0.0


def test_worked_examples():
    P, A = [1, 2, 3], [1, 1, 1]
    assert mse(P, A) == pytest.approx(5 / 3, rel=1e-15)
    assert rmse(P, A) == pytest.approx(math.sqrt(5 / 3), rel=1e-15)
    assert mae(P, A) == pytest.approx(1.0, rel=1e-15)
    assert mape([110], [100]) == pytest.approx(10.0, rel=1e-15)


def test_mape_rejects_zero_actual():
    with pytest.raises(ValueError, match="zero actual"):
        mape([1.0, 2.0], [1.0, 0.0])


@pytest.mark.parametrize("fn", [mse, rmse, mape, mae])
def test_length_guards(fn):
    with pytest.raises(ValueError):
        fn([1.0, 2.0], [1.0])
    with pytest.raises(ValueError):
        fn([], [])


@settings(max_examples=200, deadline=None)
@given(pairs())
def test_metrics_match_loop_oracle(pa):
    P, A = pa
    ref = oracle(P.tolist(), A.tolist())
    rep = metrics(P, A)
    for name in ("mse", "rmse", "mape", "mae"):
        assert getattr(rep, name) == pytest.approx(ref[name], rel=1e-12, abs=0)
    assert rep.T == len(P)
    assert rep.rmse ** 2 == pytest.approx(rep.mse, rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(pairs(), st.randoms(use_true_random=False))
def test_permutation_invariance(pa, rnd):
    P, A = pa
    idx = list(range(len(P)))
    rnd.shuffle(idx)
    for fn in (mse, rmse, mape, mae):
        assert fn(P[idx], A[idx]) == pytest.approx(fn(P, A), rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(pairs(st.floats(-100, 100), st.floats(-100, 100)), st.floats(-100, 100))
def test_translation_invariance(pa, c):
    P, A = pa
    for fn in (mse, rmse, mae):
        assert fn(P + c, A + c) == pytest.approx(fn(P, A), rel=1e-9, abs=1e-9)


def test_mape_is_not_translation_invariant():
    P, A = np.array([110.0]), np.array([100.0])
    assert mape(P, A) == pytest.approx(10.0)
    assert mape(P + 100, A + 100) == pytest.approx(5.0)


@settings(max_examples=100, deadline=None)
@given(pairs(), st.floats(-50, 50).filter(lambda c: abs(c) > 1e-3))
def test_scaling(pa, c):
    P, A = pa
    assert mse(c * P, c * A) == pytest.approx(c * c * mse(P, A), rel=1e-10)
    assert mae(c * P, c * A) == pytest.approx(abs(c) * mae(P, A), rel=1e-10)
    assert rmse(c * P, c * A) == pytest.approx(abs(c) * rmse(P, A), rel=1e-10)
    if c > 0:
        assert mape(c * P, c * A) == pytest.approx(mape(P, A), rel=1e-10)


def test_metrics_can_score_mape_on_levels():
    rep = metrics([0.0, 0.5], [0.0, 0.4], mape_P=[10.0, 15.0], mape_A=[10.0, 14.0])
    assert rep.mape == pytest.approx(100 * (1 / 14) / 2)


# -- regression ------------------------------------------------------------

def test_regression_identity():
    x = np.linspace(0, 1, 11)
    f = fit_regression(x, x)
    assert f.slope == pytest.approx(1.0) and f.intercept == pytest.approx(0.0, abs=1e-15)
    assert f.r == pytest.approx(1.0)


def test_regression_exact_affine():
    x = np.array([0.1, 0.4, 0.5, 0.9, 1.3])
    f = fit_regression(x, 2 * x + 3)
    assert f.slope == pytest.approx(2.0, rel=1e-12)
    assert f.intercept == pytest.approx(3.0, rel=1e-12)
    assert f.r == pytest.approx(1.0, rel=1e-12)


def test_regression_is_actual_on_predicted():
    rng = np.random.default_rng(0)
    X = rng.random(50)
    Y = 0.5 * X + rng.normal(0, 0.05, 50)
    f = fit_regression(X, Y)
    slope, intercept = np.polyfit(X, Y, 1)
    assert f.slope == pytest.approx(slope, rel=1e-10)
    assert f.intercept == pytest.approx(intercept, rel=1e-10)
    assert f.r == pytest.approx(np.corrcoef(X, Y)[0, 1], rel=1e-12)


def test_regression_guards():
    with pytest.raises(ValueError):
        fit_regression([1.0], [2.0])
    with pytest.raises(ValueError):
        fit_regression([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])


@settings(max_examples=100, deadline=None)
@given(pairs(st.floats(-10, 10), st.floats(-10, 10)))
def test_correlation_bounded(pa):
    P, A = pa
    if len(P) < 2 or np.ptp(P) < 1e-6:
        return
    assert -1.0 <= fit_regression(P, A).r <= 1.0


# -- folds -----------------------------------------------------------------

@settings(max_examples=300, deadline=None)
@given(st.integers(2, 500).flatmap(lambda n: st.tuples(st.just(n), st.integers(2, n))))
def test_fold_plan_partitions(nk):
    n, k = nk
    plan = make_fold_plan(n, k)
    sizes = plan.sizes()
    assert len(plan.assignment) == n and sum(sizes) == n
    assert max(sizes) - min(sizes) <= 1
    assert set(plan.assignment.tolist()) == set(range(k))
    assert np.all(np.diff(plan.assignment) >= 0)  # contiguous, time ordered
    assert sizes == sorted(sizes, reverse=True)   # remainder goes to the first folds


def test_fold_plan_examples():
    assert make_fold_plan(200, 5).sizes() == [40] * 5
    assert make_fold_plan(7, 7).sizes() == [1] * 7
    assert make_fold_plan(11, 3).sizes() == [4, 4, 3]
    for bad in (1, 0, 12):
        with pytest.raises(ValueError):
            make_fold_plan(11, bad)


def test_kfold_evaluate_small():
    t = np.arange(60)
    x = 0.5 + 0.3 * np.sin(2 * np.pi * t / 8) + 0.003 * t
    lags = np.stack([x[:-2], x[1:-1]], axis=1)
    y = x[2:]
    cfg = NetworkConfig(layer_sizes=(2, 8, 1), epochs=50)
    res = kfold_evaluate(lags, y, 4, cfg)
    assert len(res.folds) == 4
    assert [f.metrics.T for f in res.folds] == [15, 15, 14, 14]
    assert res.mean_mse == pytest.approx(np.mean([f.metrics.mse for f in res.folds]))
    assert np.isfinite(res.mean_r)


def test_kfold_leave_one_out():
    x = np.linspace(1.0, 2.0, 12)
    lags, y = np.stack([x[:-2], x[1:-1]], axis=1), x[2:]
    res = kfold_evaluate(lags, y, len(y), NetworkConfig(layer_sizes=(2, 3, 1), epochs=5))
    assert all(f.metrics.T == 1 and f.fit is None for f in res.folds)
    assert math.isnan(res.mean_r)
