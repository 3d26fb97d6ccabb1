"""Quarterly export forecasting with a from-scratch multi-layer perceptron."""

from .disaggregate import QuarterlySeries, QuarterStamp, to_quarterly
from .evaluate import (FoldPlan, KFoldResult, MetricsReport, RegressionFit, fit_regression,
                       kfold_evaluate, mae, make_fold_plan, mape, metrics, mse, rmse)
from .forecast import (ForecastTable, emit_forecast_csv, emit_plots, parse_forecast_csv,
                       recursive_forecast)
from .ingest import AnnualSeries, IngestError, parse_worldbank_csv, validate_series
from .mlp import (AdamState, Network, NetworkConfig, TrainingDiverged, TrainReport, adam_step,
                  backward, forward, init_network, load_network, predict, save_network, train)
from .preprocess import (Dataset, NormParams, build_dataset, chrono_split, denormalize,
                         fit_norm, make_windows, normalize)

__version__ = "0.1.0"
