"""Synthetic export panels in the World Bank wide CSV layout.

These are made-up series with log-linear growth and AR(1) log noise between
rough 1970 and 2019 levels. They exercise the pipeline when the real
download is not at hand; they are not data.
"""

from __future__ import annotations

import csv
import io

import numpy as np

from .ingest import DEFAULT_INDICATOR

# (name, level in first year, level in last year), current US$
ANCHORS = {
    "USA": ("United States", 6.0e10, 2.5e12),
    "CAN": ("Canada", 1.9e10, 5.5e11),
    "DEU": ("Germany", 4.0e10, 1.8e12),
    "FRA": ("France", 2.0e10, 8.2e11),
    "JPN": ("Japan", 2.1e10, 9.1e11),
    "TUR": ("Turkiye", 1.0e9, 2.5e11),
    "KOR": ("Korea, Rep.", 1.0e9, 6.5e11),
    "PRT": ("Portugal", 1.5e9, 1.0e11),
    "GRC": ("Greece", 1.0e9, 7.5e10),
    "IRN": ("Iran, Islamic Rep.", 2.4e9, 1.0e11),
}


def synthetic_levels(first: float, last: float, n: int, rng: np.random.Generator,
                     noise: float = 0.05, phi: float = 0.7) -> np.ndarray:
    trend = np.linspace(np.log(first), np.log(last), n)
    e = np.zeros(n)
    shocks = rng.normal(0.0, noise, n)
    for t in range(1, n):
        e[t] = phi * e[t - 1] + shocks[t]
    e -= np.linspace(e[0], e[-1], n)  # pin both anchors
    return np.exp(trend + e)


def synthetic_panel(countries=tuple(ANCHORS), span=(1970, 2019), seed: int = 0,
                    noise: float = 0.05) -> dict[str, np.ndarray]:
    rng = np.random.default_rng(seed)
    n = span[1] - span[0] + 1
    return {c: synthetic_levels(ANCHORS[c][1], ANCHORS[c][2], n, rng, noise)
            for c in countries}


def wide_csv(panel: dict[str, np.ndarray], span=(1970, 2019),
             indicator: str = DEFAULT_INDICATOR, pad_years=(1960, 2023)) -> str:
    """Render a panel like the bulk download, metadata preamble included."""
    years = list(range(pad_years[0], pad_years[1] + 1))
    buf = io.StringIO()
    buf.write('"Data Source","World Development Indicators",\n\n')
    buf.write('"Last Updated Date","2024-01-01",\n\n')
    w = csv.writer(buf, quoting=csv.QUOTE_ALL, lineterminator=",\n")
    w.writerow(["Country Name", "Country Code", "Indicator Name", "Indicator Code", *years])
    for code, values in panel.items():
        name = ANCHORS.get(code, (code,))[0]
        cells = []
        for y in years:
            i = y - span[0]
            cells.append(repr(float(values[i])) if 0 <= i < len(values) else "")
        w.writerow([name, code, "Exports of goods and services (current US$)",
                    indicator, *cells])
    return buf.getvalue()
