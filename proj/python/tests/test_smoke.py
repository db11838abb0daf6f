import os
import pathlib

import pytest

import zdcoord as z

SCENARIOS = pathlib.Path(os.environ.get("ZDC_SCENARIO_DIR", pathlib.Path(__file__).parents[2] / "scenarios"))
MS = 1_000_000


def load(name):
    return z.load_scenario(str(SCENARIOS / f"{name}.json"))


def test_path_increments_depend_on_order():
    zero, ten = z.AfterDelay.finite(0), z.AfterDelay.finite(10 * MS)
    assert z.path_increment([zero, ten]) == z.Tag(10 * MS, 0)
    assert z.path_increment([ten, zero]) == z.Tag(10 * MS, 1)
    assert z.delay_apply(z.Tag(5, 3), z.AfterDelay.forever()) == z.FOREVER


def test_zero_delay_cycle_runs_and_matches_oracle():
    sc = load("fig6_zdc")
    assert sorted(sc.zdc_nodes()) == ["A", "B"]
    trace = z.run(sc)
    assert trace.outcome == "completed"
    assert z.check_trace(trace, sc) == []
    ok, why = z.trace_equiv(trace, sc)
    assert ok, why
    assert len(trace.logical) == len(z.oracle_run(sc))


def test_ablations_deadlock():
    sc = load("fig6_zdc")
    assert z.run(sc, disable_ptag=True).outcome == "deadlock"
    assert z.run(sc, disable_tpo=True).outcome == "deadlock"


def test_in_transit_violation_is_reported():
    sc = load("fig7_in_transit")
    findings = z.check_trace(z.run(sc, disable_q=True), sc)
    assert [f[2] for f in findings] == ["TAG_R(200 ms) granted before MSG(200 ms) delivery"]


def test_causality_loop_raises():
    with pytest.raises(z.CausalityLoop):
        z.run(load("fig2_causality_loop"))


def test_schema_error_names_location():
    with pytest.raises(z.SchemaError, match="connections"):
        z.parse_scenario('{"nodes": [], "connections": [{"from": "X.out", "to": "Y.in"}]}')


def test_lag_series_has_ten_intervals():
    sc = load("fig6_zdc").with_timer_period(32 * MS)
    lag = z.measure_lag(z.run(sc), 0, 1, 1000 * MS, 32 * MS)
    assert len(lag["mean"]) == 10
    assert not lag["accumulating"]


def test_trace_is_json_lines():
    import json

    lines = z.run(load("fig6_zdc")).jsonl().splitlines()
    assert lines and all("kind" in json.loads(line) for line in lines)
