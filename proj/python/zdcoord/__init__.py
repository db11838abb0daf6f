"""Coordination toolkit for distributed discrete-event federations with zero-delay cycles."""

from ._core import (
    FOREVER,
    NEVER,
    AfterDelay,
    BehaviorFault,
    CausalityLoop,
    Error,
    InconsistentNes,
    Scenario,
    SchemaError,
    Tag,
    Trace,
    WireError,
    check_trace,
    delay_apply,
    load_scenario,
    measure_lag,
    oracle_run,
    parse_scenario,
    path_increment,
    run,
    trace_equiv,
)

__all__ = [
    "FOREVER",
    "NEVER",
    "AfterDelay",
    "BehaviorFault",
    "CausalityLoop",
    "Error",
    "InconsistentNes",
    "Scenario",
    "SchemaError",
    "Tag",
    "Trace",
    "WireError",
    "check_trace",
    "delay_apply",
    "load_scenario",
    "measure_lag",
    "oracle_run",
    "parse_scenario",
    "path_increment",
    "run",
    "trace_equiv",
]
