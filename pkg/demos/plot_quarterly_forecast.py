"""
From annual exports to a five-year quarterly forecast
=====================================================

Walks one country through the whole chain on the bundled synthetic panel:
interpolate to quarters, window and scale, train, score, then roll the
network forward. Swap in ``parse_worldbank_csv`` on a real download to do
the same with actual data.
"""

import numpy as np

from exportcast import (AnnualSeries, build_dataset, fit_regression, init_network, metrics,
                        normalize, predict, to_quarterly, train)
from exportcast.config import RunConfig
from exportcast.forecast import forecast_after_gap
from exportcast.synthetic import synthetic_panel

cfg = RunConfig()
levels = synthetic_panel(["KOR"])["KOR"]
annual = AnnualSeries("KOR", 1970, levels)

# Each year becomes four quarters; the annual value sits on q1.
quarterly = to_quarterly(annual, "linear")
print(len(annual.values), "years ->", len(quarterly.values), "quarters")

# Two lags in, one step out, scaled into [0, 1]. First 75% is training data.
ds, norm = build_dataset(quarterly.values, cfg.window, cfg.train_frac)
print("train/test windows:", ds.split_index, len(ds.targets) - ds.split_index)

net_cfg = cfg.network_config()
net, state = init_network(net_cfg)
net, report = train(net, state, ds, net_cfg)
print(f"loss after 1 epoch {report.history[0]:.3e}, after {net_cfg.epochs} {report.history[-1]:.3e}")

X, y = ds.test
p = predict(net, X)
print(metrics(p, y))
fit = fit_regression(p, y)
print(f"actual = {fit.slope:.3f} * predicted + {fit.intercept:.3f}   r = {fit.r:.4f}")

# 2020 is bridged and thrown away, so the table starts at 2021 q1.
window = normalize(quarterly.values[-cfg.window:], norm)
future = forecast_after_gap(net, window, cfg.horizon, norm)
for i, v in enumerate(future[:8]):
    print(f"{2021 + i // 4}q{i % 4 + 1}  {v:.3e}")
print("ratio to last observed level:", np.round(future / quarterly.values[-1], 2).min(),
      "to", np.round(future / quarterly.values[-1], 2).max())
