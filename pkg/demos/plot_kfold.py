"""
Contiguous k-fold evaluation
============================

Folds are consecutive blocks of windows, never shuffled. Each fold gets a
freshly initialised network trained on the other blocks.
"""

from exportcast import (AnnualSeries, denormalize, fit_norm, kfold_evaluate, make_fold_plan,
                        make_windows, normalize, to_quarterly)
from exportcast.config import RunConfig
from exportcast.synthetic import synthetic_panel

cfg = RunConfig()
q = to_quarterly(AnnualSeries("DEU", 1970, synthetic_panel(["DEU"])["DEU"])).values
norm = fit_norm(q)
w = make_windows(normalize(q, norm), cfg.window)

plan = make_fold_plan(len(w), cfg.k)
print("fold sizes:", plan.sizes())

res = kfold_evaluate(w.lags, w.targets, cfg.k, cfg.network_config(),
                     lambda v: denormalize(v, norm))
for i, f in enumerate(res.folds, 1):
    print(f"fold {i}: mse {f.metrics.mse:.2e}  mape {f.metrics.mape:.2f}%  r {f.fit.r:.4f}")
print(f"mean r over folds: {res.mean_r:.4f}")
