"""Forecast error criteria, the actual-on-predicted regression and k-fold CV."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mlp import NetworkConfig, fit, init_network, predict


def _pair(P, A) -> tuple[np.ndarray, np.ndarray]:
    P = np.asarray(P, dtype=float).ravel()
    A = np.asarray(A, dtype=float).ravel()
    if P.shape != A.shape:
        raise ValueError(f"length mismatch: {P.size} predictions vs {A.size} actuals")
    if P.size == 0:
        raise ValueError("need at least one prediction")
    return P, A


def mse(P, A) -> float:
    P, A = _pair(P, A)
    return float(np.mean((P - A) ** 2))


def rmse(P, A) -> float:
    return math.sqrt(mse(P, A))


def mape(P, A) -> float:
    """Mean absolute percentage error, in percent."""
    P, A = _pair(P, A)
    if np.any(A == 0):
        raise ValueError("MAPE undefined at zero actual")
    return float(np.mean(np.abs((P - A) / A)) * 100.0)


def mae(P, A) -> float:
    P, A = _pair(P, A)
    return float(np.mean(np.abs(P - A)))


@dataclass(frozen=True)
class MetricsReport:
    mse: float
    rmse: float
    mape: float
    mae: float
    T: int


def metrics(P, A, mape_P=None, mape_A=None) -> MetricsReport:
    """All four criteria for one split.

    MAPE is taken on ``(mape_P, mape_A)`` when given, which lets a caller
    score squared/absolute errors on normalized values and the percentage
    error on raw levels.
    """
    P, A = _pair(P, A)
    m = mse(P, A)
    if mape_P is None:
        mape_P, mape_A = P, A
    return MetricsReport(m, math.sqrt(m), mape(mape_P, mape_A), mae(P, A), int(P.size))


@dataclass(frozen=True)
class RegressionFit:
    slope: float
    intercept: float
    r: float


def fit_regression(X, Y) -> RegressionFit:
    """Least-squares line ``Y = slope * X + intercept``; X are predictions, Y actuals."""
    X, Y = _pair(X, Y)
    if X.size < 2:
        raise ValueError("regression needs at least 2 points")
    dx = X - X.mean()
    dy = Y - Y.mean()
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise ValueError("regression undefined: predictions are constant")
    sxy = float(dx @ dy)
    syy = float(dy @ dy)
    slope = sxy / sxx
    intercept = float(Y.mean() - slope * X.mean())
    r = sxy / math.sqrt(sxx * syy) if syy > 0 else 0.0
    return RegressionFit(slope, intercept, max(-1.0, min(1.0, r)))


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignment: np.ndarray

    def indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == fold)

    def sizes(self) -> list[int]:
        return np.bincount(self.assignment, minlength=self.k).tolist()


def make_fold_plan(n: int, k: int) -> FoldPlan:
    """Contiguous, time-ordered folds; the first ``n % k`` folds get one extra sample."""
    if not 2 <= k <= n:
        raise ValueError(f"k must satisfy 2 <= k <= {n}, got {k}")
    base, extra = divmod(n, k)
    sizes = [base + (1 if f < extra else 0) for f in range(k)]
    return FoldPlan(k, np.repeat(np.arange(k), sizes))


@dataclass(frozen=True)
class FoldResult:
    fold: int
    metrics: MetricsReport
    fit: RegressionFit | None


@dataclass(frozen=True)
class KFoldResult:
    folds: list[FoldResult]
    mean_mse: float
    mean_rmse: float
    mean_mape: float
    mean_mae: float
    mean_r: float


def kfold_evaluate(lags, targets, k: int, cfg: NetworkConfig,
                   denorm=None) -> KFoldResult:
    """Train a fresh network per held-out fold and average the fold errors.

    ``denorm`` maps normalized values back to levels for MAPE; without it
    MAPE is computed on the values as given. Folds of a single sample have
    no regression line and are left out of ``mean_r``.
    """
    lags = np.asarray(lags, dtype=float)
    targets = np.asarray(targets, dtype=float)
    plan = make_fold_plan(len(targets), k)
    results = []
    for f in range(k):
        held = plan.assignment == f
        net, state = init_network(cfg)
        fit(net, state, lags[~held], targets[~held], cfg)
        P = np.atleast_1d(predict(net, lags[held]))
        A = targets[held]
        if denorm is not None:
            m = metrics(P, A, denorm(P), denorm(A))
        else:
            m = metrics(P, A)
        try:
            reg = fit_regression(P, A)
        except ValueError:
            reg = None
        results.append(FoldResult(f, m, reg))

    rs = [fr.fit.r for fr in results if fr.fit is not None]
    return KFoldResult(
        results,
        float(np.mean([fr.metrics.mse for fr in results])),
        float(np.mean([fr.metrics.rmse for fr in results])),
        float(np.mean([fr.metrics.mape for fr in results])),
        float(np.mean([fr.metrics.mae for fr in results])),
        float(np.mean(rs)) if rs else float("nan"),
    )
