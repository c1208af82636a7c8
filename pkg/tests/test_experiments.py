from __future__ import annotations

import json
from decimal import Decimal

import pytest

from maskirental.experiments import (
    TABLE_ROWS,
    figure3,
    figure3_csv,
    figure3_json,
    parse_table_csv,
    region,
    reproduce_table3,
)
from maskirental.model import GroupState


@pytest.fixture(scope="module")
def closed_table():
    return reproduce_table3("closed-form")


def test_table_layout(closed_table):
    text = closed_table.to_csv()
    lines = text.splitlines()
    assert lines[0] == "row," + ",".join(f"ell{i}" for i in range(10))
    assert [line.split(",")[0] for line in lines[1:]] == list(TABLE_ROWS)
    assert parse_table_csv(text) == closed_table.rounded()
    assert json.loads(closed_table.to_json())["schema"] == "1"


def test_closed_form_table_first_column(closed_table):
    first = {name: values[0] for name, values in closed_table.rounded().items()}
    assert first["sd_det_sd"] == Decimal("1.833")
    assert first["sd_rand_sd"] == Decimal("1.504")
    assert first["ov_rand_ov"] == Decimal("1.504")


def test_figure_series_values():
    a = {(r["series"], r["ell"]): r for r in figure3("a", "closed-form")}
    assert round(float(a[("ov_det_ov", 5)]["ratio"]), 3) == 1.750
    b = figure3("b", "closed-form")
    blue = [r["ratio"] for r in b if r["colour"] == "blue"]
    red = [r["ratio"] for r in b if r["colour"] == "red"]
    assert blue[7:] == red[7:]
    c = figure3("c", "closed-form")
    assert round(float(c[0]["ratio"]), 3) == 1.504


def test_regions(figure_params, figure_instance):
    labels = [region(figure_params, GroupState.of(figure_instance, ell)) for ell in range(10)]
    assert labels[0] == "A"
    assert labels[-1] == "C"
    assert labels == sorted(labels)


def test_figure_output_formats():
    records = figure3("b", "closed-form")
    csv = figure3_csv(records)
    assert csv.splitlines()[0] == "series,colour,ell,ratio,region"
    assert len(csv.splitlines()) == 21
    body = json.loads(figure3_json(records))
    assert len(body["points"]) == 20


def test_unknown_options_rejected():
    with pytest.raises(ValueError):
        figure3("d")
    with pytest.raises(ValueError):
        reproduce_table3("guess")
