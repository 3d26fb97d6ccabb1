"""Iterated one-step forecasts, the quarterly forecast table and diagnostic plots."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .disaggregate import QuarterStamp
from .evaluate import RegressionFit
from .mlp import Network, TrainReport, predict
from .preprocess import NormParams, denormalize


class ForecastDiverged(RuntimeError):
    pass


def recursive_forecast(net: Network, last_window, H: int, p: NormParams) -> np.ndarray:
    """Roll the one-step network forward ``H`` quarters.

    Each prediction is appended to the (normalized) window and the oldest
    value dropped. Returns denormalized levels.
    """
    window = np.array(last_window, dtype=float)
    n0 = net.layer_sizes[0]
    if window.shape != (n0,):
        raise ValueError(f"window has shape {window.shape}, network expects ({n0},)")
    if H < 1:
        raise ValueError(f"horizon must be >= 1, got {H}")
    out = np.empty(H)
    for j in range(H):
        y = predict(net, window)
        if not np.isfinite(y):
            raise ForecastDiverged(f"forecast diverged at step {j + 1}")
        out[j] = y
        window = np.append(window[1:], y)
    return denormalize(out, p)


def forecast_after_gap(net: Network, last_window, H: int, p: NormParams,
                       skip: int = 4) -> np.ndarray:
    """Forecast ``H`` quarters that start ``skip`` quarters after the data ends.

    The skipped quarters are still produced by the recursion, then dropped.
    """
    return recursive_forecast(net, last_window, H + skip, p)[skip:]


@dataclass
class ForecastTable:
    start: QuarterStamp
    horizon: int
    values: dict[str, np.ndarray] = field(default_factory=dict)

    def add(self, country: str, forecasts) -> None:
        forecasts = np.asarray(forecasts, dtype=float)
        if forecasts.shape != (self.horizon,):
            raise ValueError(f"{country}: expected {self.horizon} forecasts, "
                             f"got {forecasts.size}")
        if not np.all(np.isfinite(forecasts)):
            raise ValueError(f"{country}: non-finite forecast")
        bad = np.flatnonzero(forecasts <= 0)
        if bad.size:
            q = self.start.shift(int(bad[0]))
            raise ValueError(f"{country}: non-positive forecast {forecasts[bad[0]]:.3e} at {q}")
        self.values[country] = forecasts

    @property
    def countries(self) -> list[str]:
        return list(self.values)

    def stamps(self) -> list[QuarterStamp]:
        return [self.start.shift(i) for i in range(self.horizon)]


def emit_forecast_csv(table: ForecastTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["year", "quarter", *table.countries])
    for i, q in enumerate(table.stamps()):
        w.writerow([q.year, f"q{q.quarter}",
                    *(f"{table.values[c][i]:.6e}" for c in table.countries)])
    return buf.getvalue()


def parse_forecast_csv(text: str) -> ForecastTable:
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    if header[:2] != ["year", "quarter"] or not body:
        raise ValueError("not a forecast table")
    start = QuarterStamp(int(body[0][0]), int(body[0][1].lstrip("q")))
    table = ForecastTable(start, len(body))
    for j, country in enumerate(header[2:], start=2):
        table.add(country, [float(r[j]) for r in body])
    return table


# -- plots -----------------------------------------------------------------

def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    # fixed ids and no timestamp keep the SVG bytes reproducible
    plt.rcParams["svg.hashsalt"] = "exportcast"
    return plt


def _save(fig, path: Path) -> None:
    tmp = path.with_name(path.name + ".tmp")
    try:
        fig.savefig(tmp, format="svg", metadata={"Date": None})
        tmp.replace(path)
    except OSError as exc:
        raise OSError(f"cannot write plot {path}: {exc}") from exc


def emit_plots(country: str, report: TrainReport, predicted, actual,
               fit: RegressionFit, out_dir, split_index: int | None = None) -> list[Path]:
    """Write ``<country>_mse.svg``, ``<country>_series.svg`` and ``<country>_fit.svg``."""
    plt = _pyplot()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    predicted = np.asarray(predicted, dtype=float)
    actual = np.asarray(actual, dtype=float)
    paths = []

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(np.arange(1, len(report.history) + 1), report.history, lw=1.2)
    ax.set_xlabel("epoch")
    ax.set_ylabel("training MSE")
    ax.set_yscale("log")
    ax.set_title(f"{country}: MSE by training cycle")
    paths.append(out_dir / f"{country}_mse.svg")
    _save(fig, paths[-1])
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(7, 4))
    t = np.arange(len(actual))
    ax.plot(t, actual, label="actual", lw=1.2)
    ax.plot(t, predicted, label="predicted", lw=1.0, ls="--")
    if split_index is not None:
        ax.axvline(split_index - 0.5, color="grey", lw=0.8, ls=":")
    ax.set_xlabel("sample")
    ax.set_ylabel("normalized exports")
    ax.set_title(f"{country}: predicted vs actual")
    ax.legend()
    paths.append(out_dir / f"{country}_series.svg")
    _save(fig, paths[-1])
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(5, 5))
    ax.scatter(predicted, actual, s=8)
    xs = np.array([predicted.min(), predicted.max()])
    ax.plot(xs, fit.slope * xs + fit.intercept, color="C3", lw=1.2,
            label=f"Y = {fit.slope:.4f} X + {fit.intercept:.4f} (r = {fit.r:.4f})")
    ax.set_xlabel("predicted")
    ax.set_ylabel("actual")
    ax.set_title(f"{country}: actual on predicted")
    ax.legend(loc="upper left", fontsize=8)
    paths.append(out_dir / f"{country}_fit.svg")
    _save(fig, paths[-1])
    plt.close(fig)
    return paths
