"""Per-country pipeline stages shared by the command line and the demos.

Every stage reads and writes files under ``cfg.output_dir``::

    quarterly.csv            country,year,quarter,value
    models/<CC>.mlp          trained network
    reports/<CC>.json        training report and normalization bounds
    metrics.csv              country,split,mse,rmse,mape,mae
    regression.csv           country,split,slope,intercept,r
    forecast.csv             year,quarter,<CC>...
    plots/<CC>_{mse,series,fit}.svg
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .config import RunConfig
from .disaggregate import QuarterStamp, QuarterlySeries, to_quarterly
from .evaluate import fit_regression, kfold_evaluate, metrics
from .forecast import ForecastTable, emit_forecast_csv, emit_plots, forecast_after_gap
from .ingest import parse_worldbank_csv
from .mlp import TrainReport, dumps_network, init_network, load_network, predict, train
from .preprocess import NormParams, build_dataset, denormalize


class PipelineError(RuntimeError):
    """An error tied to one country or one file."""


def atomic_write(path, data) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(data, str):
        data = data.encode("utf-8")
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _map(fn, items, jobs: int):
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# -- ingest ----------------------------------------------------------------

def ingest(cfg: RunConfig) -> list[QuarterlySeries]:
    path = Path(cfg.data_path)
    if not path.is_file():
        raise FileNotFoundError(f"data file not found: {path}")
    content = path.read_text(encoding="utf-8-sig")
    annual = parse_worldbank_csv(content, cfg.countries, cfg.indicator, cfg.years)
    quarterly = []
    for s in annual:
        try:
            quarterly.append(to_quarterly(s, cfg.disaggregation))
        except ValueError as exc:
            raise PipelineError(f"{s.country}: {exc}") from exc
    return quarterly


def emit_quarterly_csv(series: list[QuarterlySeries]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["country", "year", "quarter", "value"])
    for s in series:
        for q, v in zip(s.stamps(), s.values):
            w.writerow([s.country, q.year, q.quarter, repr(float(v))])
    return buf.getvalue()


def read_quarterly_csv(path) -> dict[str, QuarterlySeries]:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"quarterly data not found: {path} (run ingest first)")
    rows: dict[str, list] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        for rec in csv.DictReader(fh):
            rows.setdefault(rec["country"], []).append(
                (QuarterStamp(int(rec["year"]), int(rec["quarter"])), float(rec["value"])))
    out = {}
    for code, recs in rows.items():
        recs.sort(key=lambda r: r[0])
        out[code] = QuarterlySeries(code, recs[0][0], np.array([v for _, v in recs]))
    return out


def run_ingest(cfg: RunConfig) -> list[QuarterlySeries]:
    series = ingest(cfg)
    atomic_write(Path(cfg.output_dir) / "quarterly.csv", emit_quarterly_csv(series))
    return series


# -- train -----------------------------------------------------------------

def _train_one(args):
    cfg, series = args
    try:
        ds, norm = build_dataset(series.values, cfg.window, cfg.train_frac, cfg.norm_fit)
        net_cfg = cfg.network_config()
        net, state = init_network(net_cfg)
        net, report = train(net, state, ds, net_cfg)
    except (ValueError, RuntimeError) as exc:
        raise PipelineError(f"{series.country}: {exc}") from exc
    doc = {"country": series.country,
           "norm": {"x_min": norm.x_min, "x_max": norm.x_max},
           "report": json.loads(report.to_json())}
    return series.country, dumps_network(net), json.dumps(doc, sort_keys=True, indent=1) + "\n"


def run_train(cfg: RunConfig, jobs: int = 1) -> list[str]:
    data = read_quarterly_csv(Path(cfg.output_dir) / "quarterly.csv")
    missing = [c for c in cfg.countries if c not in data]
    if missing:
        raise PipelineError(f"{missing[0]}: no quarterly data (run ingest first)")
    results = _map(_train_one, [(cfg, data[c]) for c in cfg.countries], jobs)
    out = Path(cfg.output_dir)
    for code, model, report in results:
        atomic_write(out / "models" / f"{code}.mlp", model)
        atomic_write(out / "reports" / f"{code}.json", report)
    return [code for code, _, _ in results]


def load_trained(cfg: RunConfig, code: str):
    out = Path(cfg.output_dir)
    model_path = out / "models" / f"{code}.mlp"
    report_path = out / "reports" / f"{code}.json"
    if not model_path.is_file():
        raise PipelineError(f"{code}: model file missing: {model_path} (run train first)")
    if not report_path.is_file():
        raise PipelineError(f"{code}: report file missing: {report_path}")
    doc = json.loads(report_path.read_text(encoding="utf-8"))
    norm = NormParams(doc["norm"]["x_min"], doc["norm"]["x_max"])
    return load_network(model_path), TrainReport(**doc["report"]), norm


# -- evaluate --------------------------------------------------------------

def _evaluate_one(args):
    cfg, series, kfold = args
    code = series.country
    net, _, _ = load_trained(cfg, code)
    ds, norm = build_dataset(series.values, cfg.window, cfg.train_frac, cfg.norm_fit)

    def denorm(v):
        return denormalize(v, norm)

    metric_rows, fit_rows = [], []
    for split, (X, y) in (("train", ds.train), ("test", ds.test)):
        P = predict(net, X)
        metric_rows.append((code, split, metrics(P, y, denorm(P), denorm(y))))
        fit_rows.append((code, split, fit_regression(P, y)))
    mean_r = None
    if kfold:
        try:
            kf = kfold_evaluate(ds.lags, ds.targets, kfold, cfg.network_config(), denorm)
        except (ValueError, RuntimeError) as exc:
            raise PipelineError(f"{code}: k-fold: {exc}") from exc
        for fr in kf.folds:
            metric_rows.append((code, f"fold{fr.fold + 1}", fr.metrics))
            if fr.fit is not None:
                fit_rows.append((code, f"fold{fr.fold + 1}", fr.fit))
        mean_r = kf.mean_r
    return metric_rows, fit_rows, mean_r


def run_evaluate(cfg: RunConfig, jobs: int = 1, kfold: int | None = None):
    data = read_quarterly_csv(Path(cfg.output_dir) / "quarterly.csv")
    for c in cfg.countries:
        if c not in data:
            raise PipelineError(f"{c}: no quarterly data (run ingest first)")
        load_trained(cfg, c)
    results = _map(_evaluate_one, [(cfg, data[c], kfold) for c in cfg.countries], jobs)

    mbuf, rbuf = io.StringIO(), io.StringIO()
    mw = csv.writer(mbuf, lineterminator="\n")
    rw = csv.writer(rbuf, lineterminator="\n")
    mw.writerow(["country", "split", "mse", "rmse", "mape", "mae"])
    rw.writerow(["country", "split", "slope", "intercept", "r"])
    mean_rs = {}
    for (metric_rows, fit_rows, mean_r), code in zip(results, cfg.countries):
        for c, split, m in metric_rows:
            mw.writerow([c, split, repr(m.mse), repr(m.rmse), repr(m.mape), repr(m.mae)])
        for c, split, f in fit_rows:
            rw.writerow([c, split, repr(f.slope), repr(f.intercept), repr(f.r)])
        mean_rs[code] = mean_r
    out = Path(cfg.output_dir)
    atomic_write(out / "metrics.csv", mbuf.getvalue())
    atomic_write(out / "regression.csv", rbuf.getvalue())
    return results, mean_rs


# -- forecast --------------------------------------------------------------

def forecast_start(cfg: RunConfig) -> QuarterStamp:
    # data end in the final year's q4; the following year is bridged and dropped
    return QuarterStamp(cfg.years[1] + 2, 1)


def _forecast_one(args):
    cfg, series = args
    code = series.country
    net, report, norm = load_trained(cfg, code)
    ds, _ = build_dataset(series.values, cfg.window, cfg.train_frac, cfg.norm_fit)
    window = (series.values[-cfg.window:] - norm.x_min) / norm.span
    try:
        values = forecast_after_gap(net, window, cfg.horizon, norm, skip=4)
    except RuntimeError as exc:
        raise PipelineError(f"{code}: {exc}") from exc
    P = predict(net, ds.lags)
    X_te, y_te = ds.test
    fit = fit_regression(predict(net, X_te), y_te)
    return code, values, (report, P, ds.targets, fit, ds.split_index)


def run_forecast(cfg: RunConfig, jobs: int = 1) -> ForecastTable:
    data = read_quarterly_csv(Path(cfg.output_dir) / "quarterly.csv")
    for c in cfg.countries:
        if c not in data:
            raise PipelineError(f"{c}: no quarterly data (run ingest first)")
        load_trained(cfg, c)
    results = _map(_forecast_one, [(cfg, data[c]) for c in cfg.countries], jobs)
    table = ForecastTable(forecast_start(cfg), cfg.horizon)
    for code, values, _ in results:
        try:
            table.add(code, values)
        except ValueError as exc:
            raise PipelineError(str(exc)) from exc
    plot_dir = Path(cfg.output_dir) / "plots"
    for code, _, (report, P, A, fit, split) in results:
        emit_plots(code, report, P, A, fit, plot_dir, split)
    atomic_write(Path(cfg.output_dir) / "forecast.csv", emit_forecast_csv(table))
    return table
