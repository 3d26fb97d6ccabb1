"""Run configuration loaded from a single JSON document."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from .disaggregate import METHODS
from .ingest import DEFAULT_INDICATOR, DEFAULT_COUNTRIES, country_code
from .mlp import ACTIVATIONS, NetworkConfig


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    countries: tuple[str, ...] = DEFAULT_COUNTRIES
    data_path: str = "data/exports.csv"
    indicator: str = DEFAULT_INDICATOR
    years: tuple[int, int] = (1970, 2019)
    disaggregation: str = "linear"
    window: int = 2
    train_frac: float = 0.75
    norm_fit: str = "full"
    # None means [window, 16, 1]
    layer_sizes: tuple[int, ...] | None = None
    activation: str = "relu"
    epochs: int = 200
    learning_rate: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    seed: int = 0
    k: int = 5
    horizon: int = 20
    output_dir: str = "out"

    def __post_init__(self):
        set_ = lambda k, v: object.__setattr__(self, k, v)  # noqa: E731
        try:
            set_("countries", tuple(country_code(c) for c in self.countries))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if not self.countries:
            raise ConfigError("countries must not be empty")
        if len(set(self.countries)) != len(self.countries):
            raise ConfigError("countries contains duplicates")
        years = tuple(int(y) for y in self.years)
        if len(years) != 2 or years[0] > years[1]:
            raise ConfigError(f"years must be [start, end] with start <= end, got {self.years}")
        set_("years", years)
        if self.disaggregation not in METHODS:
            raise ConfigError(f"disaggregation must be one of {METHODS}")
        if int(self.window) < 1:
            raise ConfigError("window must be >= 1")
        if not 0 < self.train_frac < 1:
            raise ConfigError("train_frac must lie in (0, 1)")
        if self.norm_fit not in ("full", "train_only"):
            raise ConfigError("norm_fit must be 'full' or 'train_only'")
        if self.activation not in ACTIVATIONS[:2]:
            raise ConfigError("activation must be 'relu' or 'sigmoid'")
        if self.layer_sizes is not None:
            sizes = tuple(int(n) for n in self.layer_sizes)
            if sizes[0] != self.window:
                raise ConfigError(f"layer_sizes[0]={sizes[0]} must equal window={self.window}")
            set_("layer_sizes", sizes)
        if self.k < 2:
            raise ConfigError("k must be >= 2")
        if self.horizon < 1:
            raise ConfigError("horizon must be >= 1")
        try:
            self.network_config()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @property
    def sizes(self) -> tuple[int, ...]:
        return self.layer_sizes or (self.window, 16, 1)

    def network_config(self) -> NetworkConfig:
        return NetworkConfig(self.sizes, self.activation, self.epochs, self.learning_rate,
                             self.beta1, self.beta2, self.epsilon, self.seed)

    def with_overrides(self, **kw) -> "RunConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def to_dict(self) -> dict:
        d = asdict(self)
        for k, v in d.items():
            if isinstance(v, tuple):
                d[k] = list(v)
        return d


def load_config(path) -> RunConfig:
    """Parse a config file; unknown keys are rejected, missing keys take defaults.

    A relative ``data_path`` is resolved against the config file's directory.
    """
    path = Path(path)
    raw = json.loads(path.read_text(encoding="utf-8"))
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"{path}: unknown config keys {unknown}")
    if "data_path" in raw and not Path(raw["data_path"]).is_absolute():
        raw["data_path"] = str(path.parent / raw["data_path"])
    if "output_dir" in raw and not Path(raw["output_dir"]).is_absolute():
        raw["output_dir"] = str(path.parent / raw["output_dir"])
    try:
        return RunConfig(**raw)
    except TypeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
