#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "zdc/errors.hpp"
#include "zdc/harness.hpp"
#include "zdc/reaction_graph.hpp"
#include "zdc/topology.hpp"

namespace py = pybind11;
using namespace zdc;

namespace {

py::tuple record_tuple(const LogicalRecord& r) {
  return py::make_tuple(py::make_tuple(r.tag.time, r.tag.microstep), r.node, r.reaction, r.inputs, r.output);
}

py::list records(const std::vector<LogicalRecord>& rs) {
  py::list out;
  for (const auto& r : rs) out.append(record_tuple(r));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Coordination core for federations with zero-delay cycles";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<SchemaError>(m, "SchemaError", base.ptr());
  py::register_exception<CausalityLoop>(m, "CausalityLoop", base.ptr());
  py::register_exception<InconsistentNes>(m, "InconsistentNes", base.ptr());
  py::register_exception<BehaviorFault>(m, "BehaviorFault", base.ptr());
  py::register_exception<WireError>(m, "WireError", base.ptr());

  py::class_<Tag>(m, "Tag")
      .def(py::init<Instant, Microstep>(), py::arg("time"), py::arg("microstep") = 0)
      .def_readonly("time", &Tag::time)
      .def_readonly("microstep", &Tag::microstep)
      .def("__eq__", [](const Tag& a, const Tag& b) { return a == b; })
      .def("__lt__", [](const Tag& a, const Tag& b) { return a < b; })
      .def("__le__", [](const Tag& a, const Tag& b) { return a <= b; })
      .def("__hash__", [](const Tag& a) { return py::hash(py::make_tuple(a.time, a.microstep)); })
      .def("__repr__", [](const Tag& t) { return "Tag" + to_string(t); });
  m.attr("FOREVER") = kForeverTag;
  m.attr("NEVER") = kNeverTag;

  py::class_<AfterDelay>(m, "AfterDelay")
      .def_static("none", &AfterDelay::none)
      .def_static("finite", &AfterDelay::finite, py::arg("ns"))
      .def_static("forever", &AfterDelay::forever)
      .def("__repr__", [](const AfterDelay& d) { return "AfterDelay(" + to_string(d) + ")"; });

  m.def("delay_apply", &delay_apply, py::arg("tag"), py::arg("delay"));
  m.def("path_increment", [](const std::vector<AfterDelay>& ds) { return path_increment(ds); }, py::arg("delays"));

  py::class_<Scenario>(m, "Scenario")
      .def_property_readonly("name", [](const Scenario& s) { return s.spec.name; })
      .def_property_readonly("nodes", [](const Scenario& s) {
        std::vector<std::string> names;
        for (const auto& n : s.spec.nodes) names.push_back(n.name);
        return names;
      })
      .def_property_readonly("timeout", [](const Scenario& s) { return s.spec.timeout; })
      .def_property("seed", [](const Scenario& s) { return s.transport.seed; },
                    [](Scenario& s, std::uint64_t v) { s.transport.seed = v; })
      .def_property("jitter", [](const Scenario& s) { return s.transport.jitter; },
                    [](Scenario& s, Instant v) { s.transport.jitter = v; })
      .def_property("latency", [](const Scenario& s) { return s.transport.latency; },
                    [](Scenario& s, Instant v) { s.transport.latency = v; })
      .def("with_timer_period", [](const Scenario& s, Instant p) {
        Scenario out = s;
        out.spec = with_timer_period(s.spec, p);
        return out;
      })
      .def("to_json", [](const Scenario& s) { return to_json(s); })
      .def("zdc_nodes", [](const Scenario& s) {
        auto topo = build_topology(neighbor_structures(s.spec));
        std::vector<std::string> out;
        for (NodeId i = 0; i < s.spec.nodes.size(); ++i)
          if (topo.zdc[i]) out.push_back(s.spec.nodes[i].name);
        return out;
      })
      .def("describe_graph", [](const Scenario& s, bool use_tpo) { return describe_graph(analyze_program(s.spec, use_tpo)); },
           py::arg("use_tpo") = true);

  m.def("load_scenario", [](const std::string& path) { return load_scenario(path); }, py::arg("path"));
  m.def("parse_scenario", &parse_scenario, py::arg("text"));

  py::class_<Trace>(m, "Trace")
      .def_property_readonly("outcome", [](const Trace& t) { return std::string(outcome_name(t.outcome)); })
      .def_property_readonly("detail", [](const Trace& t) { return t.outcome_detail; })
      .def_property_readonly("end_time", [](const Trace& t) { return t.end_time; })
      .def_property_readonly("event_count", [](const Trace& t) { return t.events.size(); })
      .def_property_readonly("logical", [](const Trace& t) { return records(t.logical); })
      .def("jsonl", [](const Trace& t) {
        std::ostringstream os;
        write_jsonl(os, t);
        return os.str();
      });

  m.def(
      "run",
      [](const Scenario& s, bool disable_q, bool disable_ptag, bool disable_tpo, const std::string& transport) {
        auto tc = s.transport;
        if (transport == "socket") tc.mode = TransportMode::Socket;
        else if (transport == "sim") tc.mode = TransportMode::Simulated;
        else if (!transport.empty()) throw Error("unknown transport '" + transport + "'");
        py::gil_scoped_release release;
        return run(s.spec, tc, RunFlags{disable_q, disable_ptag, disable_tpo});
      },
      py::arg("scenario"), py::arg("disable_q") = false, py::arg("disable_ptag") = false,
      py::arg("disable_tpo") = false, py::arg("transport") = "");

  m.def(
      "check_trace",
      [](const Trace& t, const Scenario& s) {
        py::list out;
        for (const auto& f : check_trace(t, s.spec).findings) out.append(py::make_tuple(f.kind, f.position, f.text));
        return out;
      },
      py::arg("trace"), py::arg("scenario"));

  m.def("oracle_run", [](const Scenario& s) { return records(oracle_run(s.spec)); }, py::arg("scenario"));

  m.def(
      "trace_equiv",
      [](const Trace& t, const Scenario& s) {
        auto v = trace_equiv(t.logical, oracle_run(s.spec), s.spec);
        return py::make_tuple(v.equivalent, v.divergence);
      },
      py::arg("trace"), py::arg("scenario"), "Compares a run with the oracle of the same scenario.");

  m.def(
      "measure_lag",
      [](const Trace& t, NodeId node, std::int32_t reaction, Instant horizon, Instant period) {
        auto lag = measure_lag(t, node, reaction, horizon);
        py::dict d;
        d["mean"] = lag.mean;
        d["samples"] = lag.samples;
        d["overall"] = lag.overall;
        d["accumulating"] = lag.accumulating(period);
        return d;
      },
      py::arg("trace"), py::arg("node"), py::arg("reaction"), py::arg("horizon"), py::arg("period"));
}
