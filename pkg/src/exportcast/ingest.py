"""Read annual export series from World Bank style CSV files.

Two layouts are understood:

* the wide download format, a header containing ``Country Name``,
  ``Country Code``, ``Indicator Name``, ``Indicator Code`` followed by one
  column per year (the bulk download prepends a few metadata lines, which
  are skipped);
* a long format with ``country,year,value`` columns and an optional
  ``indicator`` column.
"""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

DEFAULT_INDICATOR = "NE.EXP.GNFS.CD"
DEFAULT_SPAN = (1970, 2019)
# USA CAN DEU FRA JPN TUR KOR PRT GRC IRN
DEFAULT_COUNTRIES = ("USA", "CAN", "DEU", "FRA", "JPN", "TUR", "KOR", "PRT", "GRC", "IRN")

_CODE_RE = re.compile(r"^[A-Z]{3}$")
_WIDE_KEYS = ("Country Name", "Country Code", "Indicator Name", "Indicator Code")


class IngestError(ValueError):
    pass


def country_code(code: str) -> str:
    if not isinstance(code, str) or not _CODE_RE.match(code):
        raise IngestError(f"invalid country code {code!r}: expected 3 letters A-Z")
    return code


@dataclass(frozen=True)
class AnnualSeries:
    country: str
    start_year: int
    values: np.ndarray

    def __post_init__(self):
        country_code(self.country)
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))

    @property
    def end_year(self) -> int:
        return self.start_year + len(self.values) - 1

    @property
    def years(self) -> range:
        return range(self.start_year, self.end_year + 1)

    def __eq__(self, other):
        if not isinstance(other, AnnualSeries):
            return NotImplemented
        return (self.country == other.country and self.start_year == other.start_year
                and np.array_equal(self.values, other.values))


def validate_series(s: AnnualSeries, expected_span: tuple[int, int] = DEFAULT_SPAN
                    ) -> AnnualSeries:
    start, end = expected_span
    n_expected = end - start + 1
    if len(s.values) == 0:
        raise IngestError(f"{s.country}: empty series")
    if len(s.values) != n_expected:
        raise IngestError(f"{s.country}: expected {n_expected} values, got {len(s.values)}")
    if s.start_year != start:
        raise IngestError(f"{s.country}: series starts in {s.start_year}, expected {start}")
    for year, v in zip(s.years, s.values):
        if not math.isfinite(v):
            raise IngestError(f"{s.country} {year}: non-finite export value {v!r}")
        if v <= 0:
            raise IngestError(f"{s.country} {year}: non-positive export value {v!r}")
    return s


def _number(cell: str, row: int, col: int) -> float:
    try:
        return float(cell)
    except ValueError:
        raise IngestError(f"unparseable number {cell!r} at row {row}, column {col}") from None


def _find_wide_header(rows: list[list[str]]) -> int | None:
    for i, row in enumerate(rows):
        stripped = [c.strip() for c in row]
        if all(k in stripped for k in _WIDE_KEYS):
            return i
    return None


def _parse_wide(rows, header_at, indicator, wanted, years):
    header = [c.strip() for c in rows[header_at]]
    code_col = header.index("Country Code")
    ind_col = header.index("Indicator Code")
    year_cols = {}
    for j, name in enumerate(header):
        if re.fullmatch(r"\d{4}", name):
            year_cols[int(name)] = j

    found: dict[str, dict[int, float]] = {}
    for i in range(header_at + 1, len(rows)):
        row = rows[i]
        if len(row) <= max(code_col, ind_col):
            continue
        code = row[code_col].strip()
        if code not in wanted or row[ind_col].strip() != indicator:
            continue
        values = {}
        for y in years:
            j = year_cols.get(y)
            cell = row[j].strip() if j is not None and j < len(row) else ""
            if cell:
                # 1-based row/column positions, as a spreadsheet shows them
                values[y] = _number(cell, i + 1, j + 1)
        found[code] = values
    return found


def _parse_long(rows, indicator, wanted, years):
    header = [c.strip().lower() for c in rows[0]]
    try:
        c_col, y_col, v_col = (header.index(k) for k in ("country", "year", "value"))
    except ValueError:
        raise IngestError(
            "unrecognised CSV layout: need World Bank wide header or country,year,value"
        ) from None
    i_col = header.index("indicator") if "indicator" in header else None
    lo, hi = years[0], years[-1]
    found: dict[str, dict[int, float]] = {}
    for i, row in enumerate(rows[1:], start=2):
        if not any(c.strip() for c in row):
            continue
        code = row[c_col].strip()
        if code not in wanted:
            continue
        if i_col is not None and row[i_col].strip() != indicator:
            continue
        try:
            year = int(row[y_col])
        except ValueError:
            raise IngestError(f"unparseable year {row[y_col]!r} at row {i}, "
                              f"column {y_col + 1}") from None
        found.setdefault(code, {})
        if not lo <= year <= hi:
            continue
        cell = row[v_col].strip()
        if cell:
            found[code][year] = _number(cell, i, v_col + 1)
    return found


def parse_worldbank_csv(content: str, countries: Sequence[str] = DEFAULT_COUNTRIES,
                        indicator: str = DEFAULT_INDICATOR,
                        span: tuple[int, int] = DEFAULT_SPAN) -> list[AnnualSeries]:
    """Extract one validated :class:`AnnualSeries` per requested country.

    Output order follows ``countries``. Any country absent from the file, or
    any empty year cell inside ``span``, is an error; there is no imputation.
    """
    countries = [country_code(c) for c in countries]
    wanted = set(countries)
    years = list(range(span[0], span[1] + 1))
    rows = list(csv.reader(io.StringIO(content.lstrip("\ufeff"))))
    if not rows:
        raise IngestError("empty CSV content")

    header_at = _find_wide_header(rows)
    if header_at is not None:
        found = _parse_wide(rows, header_at, indicator, wanted, years)
    else:
        found = _parse_long(rows, indicator, wanted, years)

    out = []
    for code in countries:
        if code not in found:
            raise IngestError(f"country {code} not found")
        values = found[code]
        for y in years:
            if y not in values:
                raise IngestError(f"country {code}: missing value for year {y}")
        series = AnnualSeries(code, span[0], np.array([values[y] for y in years]))
        out.append(validate_series(series, span))
    return out


def emit_long_csv(series: Iterable[AnnualSeries]) -> str:
    """Write series in the long ``country,year,value`` layout.

    Values use ``repr`` so parsing the output recovers identical floats.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["country", "year", "value"])
    for s in series:
        for year, v in zip(s.years, s.values):
            w.writerow([s.country, year, repr(float(v))])
    return buf.getvalue()
