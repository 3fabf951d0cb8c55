#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "granular/aco.hpp"
#include "granular/cli.hpp"
#include "granular/config.hpp"
#include "granular/dataset.hpp"
#include "granular/error.hpp"
#include "granular/fcm.hpp"
#include "granular/model.hpp"
#include "granular/orchestrator.hpp"
#include "granular/rst.hpp"
#include "granular/som.hpp"

namespace py = pybind11;

namespace {

gran::RunConfig to_config(const py::dict& d) {
  gran::RunConfig cfg;
  for (const auto& [k, v] : d) {
    const auto key = py::str(k).cast<std::string>();
    std::string value;
    if (py::isinstance<py::bool_>(v)) {
      value = v.cast<bool>() ? "true" : "false";
    } else if (py::isinstance<py::list>(v) || py::isinstance<py::tuple>(v)) {
      for (const auto& item : v) value += (value.empty() ? "" : ",") + py::str(item).cast<std::string>();
    } else {
      value = py::str(v).cast<std::string>();
    }
    gran::set_config_value(cfg, key, value);
  }
  cfg.validate();
  return cfg;
}

py::dict record_dict(const gran::IterationRecord& r) {
  py::dict d;
  d["iteration"] = r.iteration;
  d["event"] = r.event;
  d["k"] = r.k;
  d["c"] = r.c;
  d["t"] = r.t;
  d["grids"] = r.grids;
  d["granules"] = r.granules;
  d["rules"] = r.rules;
  d["train_error"] = r.train_error;
  d["test_error"] = r.test_error;
  d["threshold"] = r.threshold >= 0.0 ? py::object(py::float_(r.threshold)) : py::object(py::none());
  d["bins"] = r.bins;
  d["deltas"] = r.deltas;
  d["tau"] = r.tau;
  d["beta"] = r.beta;
  return d;
}

py::dict report_dict(const gran::RunReport& r) {
  py::dict d;
  py::list records;
  for (const auto& rec : r.records) records.append(record_dict(rec));
  d["records"] = records;
  d["termination"] = gran::to_string(r.termination);
  d["unclassifiable"] = r.unclassifiable;
  d["final_train_error"] = r.final_train_error();
  d["final_test_error"] = r.final_test_error();
  d["rules"] = gran::model_rules(r.model);
  d["step4_passes"] = r.step4_passes;
  d["pheromone_updates"] = r.pheromone_updates;
  d["best_chromosome"] = r.best_chromosome;
  std::ostringstream trace;
  gran::write_trace(trace, r);
  d["trace"] = trace.str();
  std::ostringstream model;
  gran::write_config(model, r.config, true);
  gran::write_model(model, r.model);
  d["model"] = model.str();
  return d;
}


}  // namespace

PYBIND11_MODULE(_granular, m) {
  m.doc() = "Granular computing toolkit: SOM granulation with neuro-fuzzy, rough-set and collaborative reasoning";

  // Translators run newest first, so the base class goes in first.
  py::register_exception<gran::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<gran::ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<gran::ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<gran::EmptyInputError>(m, "EmptyInputError", PyExc_ValueError);

  m.def("config_keys", [] {
    py::list out;
    for (const auto& k : gran::config_keys()) out.append(py::make_tuple(k.name, k.doc, k.sweepable));
    return out;
  });
  m.def("default_config", [] {
    py::dict d;
    for (const auto& [k, v] : gran::dump_config(gran::RunConfig{})) d[py::str(k)] = v;
    return d;
  });
  m.def("effective_config", [](const py::dict& overrides) {
    py::dict d;
    for (const auto& [k, v] : gran::dump_config(to_config(overrides))) d[py::str(k)] = v;
    return d;
  }, py::arg("config"));

  m.def("run", [](const py::dict& config) {
    const auto cfg = to_config(config);
    gran::RunReport report;
    {
      py::gil_scoped_release release;
      gran::TableSchema schema;
      schema.output = cfg.target;
      schema.delimiter = cfg.delimiter;
      report = gran::run(cfg, gran::load_table_file(cfg.data, schema));
    }
    return report_dict(report);
  }, py::arg("config"), "Runs the configured variant on cfg['data'] and returns the report as a dict.");

  m.def("evaluate", [](const std::string& model_text, const std::string& data_path) {
    std::istringstream in(model_text);
    const auto model = gran::read_model(in);
    gran::TableSchema schema;
    schema.output = model.output_name;
    schema.inputs = model.input_names;
    const auto metrics = gran::evaluate(model, gran::load_table_file(data_path, schema));
    py::dict d;
    d["metric"] = metrics.metric;
    d["error"] = metrics.error;
    d["abstention_rate"] = metrics.abstention_rate;
    d["n"] = metrics.n;
    return d;
  }, py::arg("model"), py::arg("data"));

  m.def("cli", [](const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = gran::run_cli(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"), "Runs the command-line front end; returns (status, stdout, stderr).");

  m.def("som_granules", [](const std::vector<gran::Vector>& rows, int grid_rows, int grid_cols, int epochs,
                           std::uint64_t seed) {
    if (rows.empty()) throw gran::ParameterError("no rows");
    auto grid = gran::init_grid(grid_rows, grid_cols, static_cast<int>(rows.front().size()),
                                gran::SomInit::kSampledRows, seed, rows);
    grid = gran::train_som(grid, rows, epochs, 0.5, 1.0);
    const auto g = gran::extract_granules(grid, rows);
    return py::make_tuple(g.centers, g.membership);
  }, py::arg("rows"), py::arg("grid_rows"), py::arg("grid_cols"), py::arg("epochs") = 40, py::arg("seed") = 1);

  m.def("fcm", [](const std::vector<gran::Vector>& rows, int clusters, double fuzzifier, std::uint64_t seed) {
    gran::FcmOptions opts;
    opts.clusters = clusters;
    opts.fuzzifier = fuzzifier;
    opts.seed = seed;
    const auto p = gran::fcm_cluster(rows, opts);
    return py::make_tuple(p.memberships, p.prototypes, p.objective);
  }, py::arg("rows"), py::arg("clusters"), py::arg("fuzzifier") = 2.0, py::arg("seed") = 0);

  m.def("approximate", [](const std::vector<std::vector<int>>& objects, int decision) {
    gran::InformationSystem is;
    is.objects = objects;
    const auto width = objects.empty() ? 0 : objects.front().size();
    for (std::size_t a = 0; a + 1 < width; ++a) is.condition_attrs.push_back("a" + std::to_string(a + 1));
    is.decision_attr = "d";
    const auto attrs = gran::all_conditions(is);
    const auto ap = gran::approximate(is, attrs, decision);
    return py::make_tuple(ap.lower, ap.upper, ap.gamma);
  }, py::arg("objects"), py::arg("decision"),
     "Lower/upper approximation on all condition columns; the last column is the decision.");

  m.def("normalize_errors", [](const std::vector<double>& d) { return gran::normalize_errors(d); });
  m.def("delta_pheromone", [](const std::vector<double>& shares, double cap) {
    return gran::delta_pheromone(shares, cap);
  }, py::arg("shares"), py::arg("dtau_cap") = 1e3);
  m.def("close_open_restart", [](const std::string& mode, int k, int c, int k_star, int c_star) {
    gran::RunConfig cfg;
    gran::set_config_value(cfg, "restart", mode);
    return std::string(gran::to_string(gran::close_open_restart(cfg.restart, k, c, k_star, c_star)));
  }, py::arg("mode"), py::arg("k"), py::arg("c"), py::arg("k_star"), py::arg("c_star"));
}
