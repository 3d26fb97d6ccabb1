import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exportcast.ingest import (AnnualSeries, IngestError, country_code, emit_long_csv,
                               parse_worldbank_csv, validate_series)
from exportcast.synthetic import synthetic_panel, wide_csv


def test_wide_format_usa():
    panel = synthetic_panel(["USA", "IRN"])
    series = parse_worldbank_csv(wide_csv(panel), ["USA"])
    assert len(series) == 1
    s = series[0]
    assert s.country == "USA" and s.start_year == 1970 and len(s.values) == 50
    np.testing.assert_array_equal(s.values, panel["USA"])


def test_long_format_two_rows():
    text = "country,year,value\nIRN,1970,2.4e9\nIRN,1971,3.9e9\n"
    (s,) = parse_worldbank_csv(text, ["IRN"], span=(1970, 1971))
    assert s == AnnualSeries("IRN", 1970, [2.4e9, 3.9e9])


def test_long_format_unsorted_and_extra_years():
    text = ("country,year,value\n"
            "IRN,1972,5e9\nIRN,1971,3.9e9\nUSA,1970,1e10\nIRN,1970,2.4e9\nIRN,1969,1e9\n")
    (s,) = parse_worldbank_csv(text, ["IRN"], span=(1970, 1972))
    np.testing.assert_array_equal(s.values, [2.4e9, 3.9e9, 5e9])


def test_long_format_indicator_column_filters():
    text = ("country,indicator,year,value\n"
            "IRN,NE.IMP.GNFS.CD,1970,1.0\n"
            "IRN,NE.EXP.GNFS.CD,1970,2.0\n")
    (s,) = parse_worldbank_csv(text, ["IRN"], span=(1970, 1970))
    assert s.values.tolist() == [2.0]


def test_missing_country():
    text = wide_csv(synthetic_panel(["USA"]))
    with pytest.raises(IngestError, match="country GRC not found"):
        parse_worldbank_csv(text, ["GRC"])


def test_missing_year_names_country_and_year():
    panel = synthetic_panel(["USA"])
    text = wide_csv(panel).replace(repr(float(panel["USA"][13])), "")
    with pytest.raises(IngestError, match="USA.*1983"):
        parse_worldbank_csv(text, ["USA"])


def test_unparseable_cell_reports_position():
    text = "country,year,value\nIRN,1970,2.4e9\nIRN,1971,lots\n"
    with pytest.raises(IngestError, match="row 3, column 3"):
        parse_worldbank_csv(text, ["IRN"], span=(1970, 1971))


def test_wide_indicator_mismatch_is_not_found():
    text = wide_csv(synthetic_panel(["USA"]), indicator="NE.IMP.GNFS.CD")
    with pytest.raises(IngestError, match="not found"):
        parse_worldbank_csv(text, ["USA"])
    (s,) = parse_worldbank_csv(text, ["USA"], indicator="NE.IMP.GNFS.CD")
    assert len(s.values) == 50


def test_output_order_follows_request():
    text = wide_csv(synthetic_panel())
    order = ["IRN", "USA", "GRC", "JPN"]
    assert [s.country for s in parse_worldbank_csv(text, order)] == order


def test_wide_header_without_preamble_and_bom():
    text = wide_csv(synthetic_panel(["CAN"]))
    body = text[text.index('"Country Name"'):]
    (s,) = parse_worldbank_csv("﻿" + body, ["CAN"])
    assert len(s.values) == 50


def test_negative_value_rejected_at_parse():
    text = "country,year,value\nIRN,1970,-1\n"
    with pytest.raises(IngestError, match="non-positive"):
        parse_worldbank_csv(text, ["IRN"], span=(1970, 1970))


def test_validate_series_guards():
    good = AnnualSeries("USA", 1970, np.full(50, 1e9))
    assert validate_series(good, (1970, 2019)) is good
    with pytest.raises(IngestError, match="expected 50 values, got 49"):
        validate_series(AnnualSeries("USA", 1970, np.full(49, 1e9)), (1970, 2019))
    vals = np.full(50, 1e9)
    vals[3] = 0.0
    with pytest.raises(IngestError, match="non-positive export value"):
        validate_series(AnnualSeries("USA", 1970, vals), (1970, 2019))
    vals[3] = np.inf
    with pytest.raises(IngestError, match="non-finite"):
        validate_series(AnnualSeries("USA", 1970, vals), (1970, 2019))


@pytest.mark.parametrize("bad", ["usa", "US", "USAA", "U5A", 12])
def test_country_code_rejects(bad):
    with pytest.raises(IngestError):
        country_code(bad)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(1e3, 1e13), min_size=1, max_size=60),
       st.sampled_from(["USA", "IRN", "KOR"]))
def test_parse_emit_is_idempotent(values, code):
    span = (1970, 1970 + len(values) - 1)
    s = AnnualSeries(code, 1970, values)
    (back,) = parse_worldbank_csv(emit_long_csv([s]), [code], span=span)
    assert back == s
    (again,) = parse_worldbank_csv(emit_long_csv([back]), [code], span=span)
    assert again == back


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_every_parsed_series_validates(seed):
    panel = synthetic_panel(seed=seed)
    for s in parse_worldbank_csv(wide_csv(panel)):
        assert validate_series(s, (1970, 2019)) is s
