import json
import math
from importlib.resources import files

import jsonschema
import numpy as np
import pytest

from prl import pipeline as pl
from prl.circles import gram_matrix


@pytest.fixture(scope="module")
def report():
    return pl.run_counterexample()


@pytest.fixture(scope="module")
def schema():
    return json.loads(files("prl").joinpath("report.schema.json").read_text())


def _status(rep):
    return {s["name"]: s["status"] for s in rep["stages"]}


def test_default_run_certifies(report):
    assert report["verdict"] == pl.PASS
    assert report["failed_stage"] is None
    assert set(_status(report).values()) == {pl.PASS}
    assert [s["name"] for s in report["stages"]] == list(pl.STAGES)


def test_edge_inversive_equal(report):
    for row in report["packing"]["inversive"]:
        assert row["deviation"] <= 1e-10
        assert row["P_t"] >= 1  # disjoint or tangent circles
    assert report["gram"]["edge_max_deviation"] <= 1e-10


def test_diagonal_gram_differs(report):
    gram = report["gram"]
    assert gram["diagonal_min_deviation"] >= 1e-4
    assert gram["diagonal_deviation_per_t"] == pytest.approx(gram["diagonal_min_deviation"] / 0.01)


def test_edges_anti_aligned(report):
    for row in report["edge_timelike"]["edges"]:
        for key in ("P_t", "P_minus_t"):
            assert row[key]["kind"] == "time-like"
            assert row[key]["sign_flag"] == "anti-aligned"


def test_radii(report):
    assert report["packing"]["bottom_radius_max_deviation"] <= 1e-12
    assert report["packing"]["top_radius_min_deviation"] >= 1e-4


def test_mobius(report):
    mob = report["mobius"]
    assert mob["verdict"] == "inequivalent"
    assert mob["n_automorphisms"] == 48
    assert mob["max_deviation"] >= 1e-4
    # the witness is a diagonal pair
    assert set(mob["witness_entry"]) in ({"A", "A0"}, {"B", "B0"}, {"C", "C0"})


def test_gram_rebuilt_from_circle_tables(report):
    cfgs = pl.configurations_from_report(report)
    np.testing.assert_allclose(gram_matrix(cfgs["P_t"]), report["gram"]["P_t"], atol=1e-9)
    np.testing.assert_allclose(gram_matrix(cfgs["P_minus_t"]), report["gram"]["P_minus_t"], atol=1e-9)


def test_report_matches_schema(report, schema):
    jsonschema.validate(json.loads(pl.report_json(report)), schema)


@pytest.mark.parametrize("params", [
    pl.CounterexampleParams(t=0.0),
    pl.CounterexampleParams(a=1.4),
    pl.CounterexampleParams(a=math.sqrt(3), h=1.0),
    pl.CounterexampleParams(t=-0.02, convention="paper-verbatim"),
])
def test_other_reports_match_schema(params, schema):
    jsonschema.validate(json.loads(pl.report_json(pl.run_counterexample(params))), schema)


def test_zero_flex_is_not_a_counterexample():
    rep = pl.run_counterexample(pl.CounterexampleParams(t=0.0))
    assert rep["verdict"] == pl.NOT_A_COUNTEREXAMPLE
    assert rep["failed_stage"] == "mobius"
    assert rep["mobius"]["verdict"] == "equivalent"
    assert rep["euclidean"]["min_diagonal_deviation"] == 0
    assert rep["gram"]["diagonal_min_deviation"] == 0


def test_boundary_aborts_at_admissibility():
    rep = pl.run_counterexample(pl.CounterexampleParams(a=math.sqrt(3), h=1.0))
    assert rep["failed_stage"] == "admissibility"
    assert rep["admissibility"]["Q"]["ineq3"] is False
    # later stages are never stale
    for name in pl.STAGES[1:]:
        assert rep[name] == pl.NOT_EVALUATED
        assert _status(rep)[name] == pl.NOT_EVALUATED


def test_paper_verbatim_negates(report):
    rep = pl.run_counterexample(pl.CounterexampleParams(convention="paper-verbatim"))
    assert rep["verdict"] == pl.PASS
    for a, b in zip(report["packing"]["inversive"], rep["packing"]["inversive"]):
        assert b["P_t"] == pytest.approx(-a["P_t"], abs=1e-15)


def test_deterministic():
    p = pl.CounterexampleParams(a=1.6, h=0.45, t=0.02)
    assert pl.report_json(pl.run_counterexample(p)) == pl.report_json(pl.run_counterexample(p))


@pytest.mark.parametrize("kwargs", [dict(a=-1.0), dict(h=float("nan")), dict(t=float("inf")),
                                    dict(convention="nope"), dict(tol_equal=0.0)])
def test_invalid_params(kwargs):
    with pytest.raises(pl.InvalidParams):
        pl.CounterexampleParams(**kwargs).validate()


class TestHyperideal:
    def test_default(self):
        rep = pl.hyperideal_report()
        assert rep["verdict"] == pl.PASS
        assert len(rep["edges"]) == 12
        assert rep["max_edge_deviation"] <= 1e-10
        assert rep["max_diagonal_deviation"] >= 1e-4

    def test_lengths_are_arcosh(self, report):
        rep = pl.hyperideal_report()
        inv = {r["edge"]: r["P_t"] for r in report["packing"]["inversive"]}
        for row in rep["edges"]:
            assert row["P_t"] == pytest.approx(math.acosh(inv[row["edge"]]), abs=1e-10)

    def test_failed(self):
        rep = pl.hyperideal_report(pl.CounterexampleParams(a=1.4))
        assert rep["verdict"] == pl.FAIL and rep["edges"] == pl.NOT_EVALUATED


class TestSweep:
    def test_linear_in_t(self):
        rows = pl.sweep([1.55], [0.5], [0.005, 0.01, 0.02])
        assert all(r["verdict"] == pl.PASS for r in rows)
        devs = [r["gram_diagonal_min_deviation"] for r in rows]
        assert devs[1] / devs[0] == pytest.approx(2, rel=0.01)
        assert devs[2] / devs[1] == pytest.approx(2, rel=0.01)

    def test_a_grid(self):
        rows = pl.sweep([1.4, 1.55, 1.7], [0.5], [0.01])
        assert [r["verdict"] for r in rows] == [pl.FAIL, pl.PASS, pl.PASS]
        assert rows[0]["failed_stage"] == "admissibility"

    def test_empty(self):
        assert pl.sweep([], [0.5], [0.01]) == []

    def test_invalid_point_does_not_abort(self):
        rows = pl.sweep([-1.0, 1.55], [0.5], [0.01])
        assert rows[0]["verdict"] == "invalid"
        assert rows[1]["verdict"] == pl.PASS
        assert set(rows[0]) == set(pl.SWEEP_COLUMNS)
