"""Min-max scaling, lag windows and the chronological train/test split."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class NormParams:
    x_min: float
    x_max: float

    def __post_init__(self):
        if not (np.isfinite(self.x_min) and np.isfinite(self.x_max)):
            raise ValueError("normalization bounds must be finite")
        if not self.x_max > self.x_min:
            raise ValueError(f"degenerate range: x_max={self.x_max} <= x_min={self.x_min}")

    @property
    def span(self) -> float:
        return self.x_max - self.x_min


def fit_norm(values) -> NormParams:
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        raise ValueError(f"need >= 2 values to fit normalization, got {values.size}")
    lo, hi = float(values.min()), float(values.max())
    if lo == hi:
        raise ValueError(f"degenerate range: all values equal {lo}")
    return NormParams(lo, hi)


def normalize(values, p: NormParams) -> np.ndarray:
    # no clamping: test data scaled with train-fitted bounds may leave [0, 1]
    return (np.asarray(values, dtype=float) - p.x_min) / p.span


def denormalize(values, p: NormParams) -> np.ndarray:
    return p.x_min + np.asarray(values, dtype=float) * p.span


@dataclass(frozen=True)
class Windows:
    """Supervised samples: ``lags[i]`` (oldest first) predicts ``targets[i]``."""

    lags: np.ndarray
    targets: np.ndarray

    def __len__(self) -> int:
        return len(self.targets)

    @property
    def window(self) -> int:
        return self.lags.shape[1]


@dataclass(frozen=True)
class Dataset(Windows):
    split_index: int = 0

    def __post_init__(self):
        if not 0 < self.split_index < len(self.targets):
            raise ValueError(f"split_index {self.split_index} outside (0, {len(self.targets)})")

    @property
    def train(self) -> tuple[np.ndarray, np.ndarray]:
        s = self.split_index
        return self.lags[:s], self.targets[:s]

    @property
    def test(self) -> tuple[np.ndarray, np.ndarray]:
        s = self.split_index
        return self.lags[s:], self.targets[s:]


def make_windows(values, w: int) -> Windows:
    values = np.asarray(values, dtype=float)
    if w < 1:
        raise ValueError(f"window must be >= 1, got {w}")
    if values.size <= w:
        raise ValueError(f"series of length {values.size} too short for window {w}")
    lags = np.lib.stride_tricks.sliding_window_view(values, w)[:-1].copy()
    return Windows(lags, values[w:].copy())


def chrono_split(windows: Windows, train_frac: float = 0.75) -> Dataset:
    """Earliest ``floor(train_frac * n)`` samples train, the rest test; no shuffling."""
    if not 0.0 < train_frac < 1.0:
        raise ValueError(f"train_frac must lie in (0, 1), got {train_frac}")
    n = len(windows)
    split = math.floor(train_frac * n)
    if split == 0 or split == n:
        raise ValueError(f"train_frac={train_frac} on {n} samples leaves an empty split")
    return Dataset(windows.lags, windows.targets, split)


def build_dataset(values, window: int = 2, train_frac: float = 0.75,
                  norm_fit: str = "full") -> tuple[Dataset, NormParams]:
    """Normalize a raw quarterly series and turn it into a split dataset.

    With ``norm_fit="train_only"`` the bounds come from the values that appear
    in training samples only; ``"full"`` uses the entire series.
    """
    values = np.asarray(values, dtype=float)
    if norm_fit == "full":
        p = fit_norm(values)
    elif norm_fit == "train_only":
        n = values.size - window
        split = math.floor(train_frac * n)
        # training samples touch values[0 : split + window]
        p = fit_norm(values[:split + window])
    else:
        raise ValueError(f"norm_fit must be 'full' or 'train_only', got {norm_fit!r}")
    ds = chrono_split(make_windows(normalize(values, p), window), train_frac)
    return ds, p
