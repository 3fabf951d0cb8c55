#include "granular/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

#include "granular/error.hpp"
#include "granular/textio.hpp"

namespace gran {

namespace {

struct Entry {
  ConfigKey key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& want) {
  throw ParameterError("config key '" + key + "': cannot parse '" + value + "' as " + want);
}

long long parse_ll(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) bad_value(key, v, "an integer");
  return out;
}

double parse_real(const std::string& key, const std::string& v) {
  if (v == "inf" || v == "+inf") return HUGE_VAL;
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || std::isnan(out)) bad_value(key, v, "a number");
  return out;
}

std::string fmt_real(double v) { return std::isinf(v) ? (v > 0 ? "inf" : "-inf") : textio::fmt(v); }

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, v, "a boolean");
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(static_cast<int>(parse_ll(key, item)));
  if (out.empty()) bad_value(key, v, "a comma-separated integer list");
  return out;
}

std::string fmt_int_list(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

template <class T>
Entry int_entry(std::string name, std::string doc, T RunConfig::*field, bool sweep = true) {
  return {{std::move(name), std::move(doc), sweep},
          [field](const RunConfig& c) { return std::to_string(c.*field); },
          [field, n = name](RunConfig& c, const std::string& v) {
            c.*field = static_cast<T>(parse_ll(n, v));
          }};
}

Entry real_entry(std::string name, std::string doc, double RunConfig::*field, bool sweep = true) {
  return {{name, std::move(doc), sweep},
          [field](const RunConfig& c) { return fmt_real(c.*field); },
          [field, name](RunConfig& c, const std::string& v) { c.*field = parse_real(name, v); }};
}

Entry aco_entry(std::string name, std::string doc, double AcoParams::*field) {
  return {{name, std::move(doc), true},
          [field](const RunConfig& c) { return fmt_real(c.aco.*field); },
          [field, name](RunConfig& c, const std::string& v) { c.aco.*field = parse_real(name, v); }};
}

Entry bool_entry(std::string name, std::string doc, bool RunConfig::*field) {
  return {{name, std::move(doc), true},
          [field](const RunConfig& c) { return std::string(c.*field ? "true" : "false"); },
          [field, name](RunConfig& c, const std::string& v) { c.*field = parse_bool(name, v); }};
}

template <class E>
Entry enum_entry(std::string name, std::string doc, E RunConfig::*field,
                 std::vector<std::pair<std::string, E>> names, bool sweep = false) {
  return {{name, std::move(doc), sweep},
          [field, names](const RunConfig& c) {
            for (const auto& [s, e] : names) {
              if (e == c.*field) return s;
            }
            return std::string("?");
          },
          [field, names, name](RunConfig& c, const std::string& v) {
            for (const auto& [s, e] : names) {
              if (s == v) {
                c.*field = e;
                return;
              }
            }
            std::string options;
            for (const auto& [s, e] : names) options += (options.empty() ? "" : "|") + s;
            bad_value(name, v, options);
          }};
}

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = [] {
    std::vector<Entry> e;
    e.push_back(enum_entry<Variant>("variant", "sonfis|sorst-r|sorst-as|e-sonfis|sovcc",
                                    &RunConfig::variant,
                                    {{"sonfis", Variant::kSonfis},
                                     {"sorst-r", Variant::kSorstR},
                                     {"sorst-as", Variant::kSorstAs},
                                     {"e-sonfis", Variant::kESonfis},
                                     {"sovcc", Variant::kSovcc}}));
    e.push_back({{"data", "input table path", false},
                 [](const RunConfig& c) { return c.data; },
                 [](RunConfig& c, const std::string& v) { c.data = v; }});
    e.push_back({{"target", "output column name", false},
                 [](const RunConfig& c) { return c.target; },
                 [](RunConfig& c, const std::string& v) { c.target = v; }});
    e.push_back({{"delimiter", "auto|comma|tab", false},
                 [](const RunConfig& c) {
                   return std::string(c.delimiter == ',' ? "comma" : c.delimiter == '\t' ? "tab" : "auto");
                 },
                 [](RunConfig& c, const std::string& v) {
                   if (v == "auto") c.delimiter = 0;
                   else if (v == "comma") c.delimiter = ',';
                   else if (v == "tab") c.delimiter = '\t';
                   else bad_value("delimiter", v, "auto|comma|tab");
                 }});
    e.push_back({{"seed", "master seed", true},
                 [](const RunConfig& c) { return std::to_string(c.seed); },
                 [](RunConfig& c, const std::string& v) {
                   const auto x = parse_ll("seed", v);
                   if (x < 0) bad_value("seed", v, "a non-negative integer");
                   c.seed = static_cast<std::uint64_t>(x);
                 }});
    e.push_back(real_entry("ratio", "training share of the split", &RunConfig::ratio));
    e.push_back(enum_entry<NormMethod>("normalize", "minmax|zscore|none", &RunConfig::normalize,
                                       {{"minmax", NormMethod::kMinMax},
                                        {"zscore", NormMethod::kZScore},
                                        {"none", NormMethod::kNone}}));
    e.push_back({{"som_grid", "initial SOM lattice RxC", true},
                 [](const RunConfig& c) { return std::to_string(c.som_rows) + "x" + std::to_string(c.som_cols); },
                 [](RunConfig& c, const std::string& v) {
                   const auto x = v.find('x');
                   if (x == std::string::npos) bad_value("som_grid", v, "RxC");
                   c.som_rows = static_cast<int>(parse_ll("som_grid", v.substr(0, x)));
                   c.som_cols = static_cast<int>(parse_ll("som_grid", v.substr(x + 1)));
                 }});
    e.push_back(enum_entry<SomInit>("som_init", "sampled|random", &RunConfig::som_init,
                                    {{"sampled", SomInit::kSampledRows},
                                     {"random", SomInit::kRandomInRange}}));
    e.push_back(int_entry("som_epochs", "SOM training epochs", &RunConfig::som_epochs));
    e.push_back(real_entry("som_lr", "initial SOM learning rate", &RunConfig::som_lr));
    e.push_back(real_entry("som_radius", "initial lattice neighbourhood radius", &RunConfig::som_radius));
    e.push_back(enum_entry<GrowthKind>("growth", "regular|random (sonfis)", &RunConfig::growth,
                                       {{"regular", GrowthKind::kRegular},
                                        {"random", GrowthKind::kRandom}}));
    e.push_back(int_entry("growth_step", "cells added per regular growth", &RunConfig::growth_step));
    e.push_back(int_entry("max_neurons", "growth limit on lattice cells", &RunConfig::max_neurons));
    e.push_back({{"nfis_mfs", "MFs per input (one value is broadcast)", true},
                 [](const RunConfig& c) { return fmt_int_list(c.nfis_mfs); },
                 [](RunConfig& c, const std::string& v) { c.nfis_mfs = parse_int_list("nfis_mfs", v); }});
    e.push_back(int_entry("nfis_max_rules", "rule-count ceiling", &RunConfig::nfis_max_rules));
    e.push_back(int_entry("nfis_epochs", "hybrid-learning epochs", &RunConfig::nfis_epochs));
    e.push_back(real_entry("nfis_lr", "premise gradient step", &RunConfig::nfis_lr));
    e.push_back(int_entry("nfis_gd_steps", "gradient steps per epoch", &RunConfig::nfis_gd_steps));
    e.push_back(enum_entry<NfisData>("nfis_data", "centers|rows", &RunConfig::nfis_data,
                                     {{"centers", NfisData::kCenters}, {"rows", NfisData::kRows}}));
    e.push_back(bool_entry("nfis_weighted", "weight granule centres by occupancy", &RunConfig::nfis_weighted));
    e.push_back({{"rst_bins", "bins per condition attribute (one value is broadcast)", true},
                 [](const RunConfig& c) { return fmt_int_list(c.rst_bins); },
                 [](RunConfig& c, const std::string& v) { c.rst_bins = parse_int_list("rst_bins", v); }});
    e.push_back(int_entry("rst_decision_bins", "bins of the decision attribute", &RunConfig::rst_decision_bins));
    e.push_back(enum_entry<BinStrategy>("rst_strategy", "equal-width|equal-frequency", &RunConfig::rst_strategy,
                                        {{"equal-width", BinStrategy::kEqualWidth},
                                         {"equal-frequency", BinStrategy::kEqualFrequency}}));
    e.push_back(int_entry("rst_max_bins", "adaptive scaling ceiling", &RunConfig::rst_max_bins));
    e.push_back(real_entry("strength_threshold", "initial rule strength threshold", &RunConfig::strength_threshold));
    e.push_back(bool_entry("strength_adaptive", "adapt the threshold (sorst-r)", &RunConfig::strength_adaptive));
    e.push_back(real_entry("strength_step", "threshold adaptation step", &RunConfig::strength_step));
    e.push_back(real_entry("strength_min", "threshold lower bound", &RunConfig::strength_min));
    e.push_back(real_entry("strength_max", "threshold upper bound", &RunConfig::strength_max));
    e.push_back(bool_entry("sorst_as_grow", "also grow the lattice in sorst-as", &RunConfig::sorst_as_grow));
    e.push_back(real_entry("error_target", "RMSE or misclassification target", &RunConfig::error_target));
    e.push_back(int_entry("max_outer_iters", "outer loop limit", &RunConfig::max_outer_iters));
    e.push_back(int_entry("ga_population", "GA population size", &RunConfig::ga_population));
    e.push_back(int_entry("ga_generations", "GA generations", &RunConfig::ga_generations));
    e.push_back(int_entry("ga_tournament", "tournament size", &RunConfig::ga_tournament));
    e.push_back(real_entry("ga_crossover", "one-point crossover probability", &RunConfig::ga_crossover));
    e.push_back(real_entry("ga_mutation", "per-gene mutation probability", &RunConfig::ga_mutation));
    e.push_back(real_entry("ga_rule_penalty", "fitness penalty per rule", &RunConfig::ga_rule_penalty));
    e.push_back(int_entry("ga_max_rows", "largest SOM row count searched", &RunConfig::ga_max_rows));
    e.push_back(int_entry("ga_max_cols", "largest SOM column count searched", &RunConfig::ga_max_cols));
    e.push_back(int_entry("ga_max_mfs", "largest MF count per input searched", &RunConfig::ga_max_mfs));
    e.push_back(int_entry("sites", "number of collaborating sites p", &RunConfig::sites));
    e.push_back(int_entry("clusters", "initial cluster count c", &RunConfig::clusters));
    e.push_back(int_entry("c_star", "largest cluster count c*", &RunConfig::c_star));
    e.push_back(int_entry("k_star", "re-granulation limit k*", &RunConfig::k_star));
    e.push_back(int_entry("vcc_sweeps", "collaboration sweeps per pass", &RunConfig::vcc_sweeps));
    e.push_back(enum_entry<RestartMode>("restart", "close-open|open-close", &RunConfig::restart,
                                        {{"close-open", RestartMode::kCloseOpen},
                                         {"open-close", RestartMode::kOpenClose}}));
    e.push_back(int_entry("site_min_side", "smallest site lattice side", &RunConfig::site_min_side));
    e.push_back(int_entry("site_max_side", "largest site lattice side", &RunConfig::site_max_side));
    e.push_back(bool_entry("equal_sites", "give every site the same lattice and seeds", &RunConfig::equal_sites));
    e.push_back(real_entry("fcm_tol", "FCM objective tolerance", &RunConfig::fcm_tol));
    e.push_back(int_entry("fcm_max_iter", "FCM iteration limit", &RunConfig::fcm_max_iter));
    e.push_back(aco_entry("aco_rho", "pheromone evaporation rho", &AcoParams::rho));
    e.push_back(aco_entry("aco_lambda", "beta = lambda * tau", &AcoParams::lambda));
    e.push_back(aco_entry("aco_xi", "site error tolerance xi", &AcoParams::xi));
    e.push_back({{"aco_t_star", "pheromone cycle length t*", true},
                 [](const RunConfig& c) { return std::to_string(c.aco.t_star); },
                 [](RunConfig& c, const std::string& v) {
                   c.aco.t_star = static_cast<int>(parse_ll("aco_t_star", v));
                 }});
    e.push_back(aco_entry("aco_dtau_cap", "deposit cap", &AcoParams::dtau_cap));
    e.push_back(aco_entry("aco_tau_cap", "pheromone cap", &AcoParams::tau_cap));
    e.push_back(aco_entry("aco_tau0", "initial pheromone", &AcoParams::tau0));
    e.push_back(aco_entry("aco_beta_max", "collaboration ceiling", &AcoParams::beta_max));
    return e;
  }();
  return entries;
}

const Entry& find_entry(const std::string& key) {
  for (const auto& e : registry()) {
    if (e.key.name == key) return e;
  }
  throw ParameterError("unknown config key '" + key + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void RunConfig::validate() const {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw ParameterError(what);
  };
  need(ratio > 0.0 && ratio < 1.0, "ratio must lie in (0,1)");
  need(som_rows >= 1 && som_cols >= 1, "som_grid sides must be >= 1");
  need(som_epochs >= 1, "som_epochs must be >= 1");
  need(som_lr > 0.0 && som_lr <= 1.0, "som_lr must lie in (0,1]");
  need(som_radius >= 0.0, "som_radius must be >= 0");
  need(growth_step >= 1, "growth_step must be >= 1");
  need(max_neurons >= som_rows * som_cols, "max_neurons must be >= the initial lattice size");
  need(!nfis_mfs.empty(), "nfis_mfs must not be empty");
  for (int m : nfis_mfs) need(m >= 1, "nfis_mfs entries must be >= 1");
  need(nfis_max_rules >= 1, "nfis_max_rules must be >= 1");
  need(nfis_epochs >= 1, "nfis_epochs must be >= 1");
  need(nfis_lr > 0.0, "nfis_lr must be > 0");
  need(nfis_gd_steps >= 1, "nfis_gd_steps must be >= 1");
  need(!rst_bins.empty(), "rst_bins must not be empty");
  for (int b : rst_bins) need(b >= 1, "rst_bins entries must be >= 1");
  need(rst_decision_bins >= 1, "rst_decision_bins must be >= 1");
  need(rst_max_bins >= 1, "rst_max_bins must be >= 1");
  need(strength_min <= strength_max, "strength_min must not exceed strength_max");
  need(strength_threshold >= strength_min && strength_threshold <= strength_max,
       "strength_threshold must lie within [strength_min, strength_max]");
  need(strength_step > 0.0, "strength_step must be > 0");
  need(error_target > 0.0, "error_target must be > 0");
  need(max_outer_iters >= 1, "max_outer_iters must be >= 1");
  need(ga_population >= 2, "ga_population must be >= 2");
  need(ga_generations >= 1, "ga_generations must be >= 1");
  need(ga_tournament >= 1, "ga_tournament must be >= 1");
  need(ga_crossover >= 0.0 && ga_crossover <= 1.0, "ga_crossover must lie in [0,1]");
  need(ga_mutation >= 0.0 && ga_mutation <= 1.0, "ga_mutation must lie in [0,1]");
  need(ga_rule_penalty >= 0.0, "ga_rule_penalty must be >= 0");
  need(ga_max_rows >= 1 && ga_max_cols >= 1 && ga_max_mfs >= 1, "GA bounds must be >= 1");
  need(sites >= 2, "sites must be >= 2");
  need(clusters >= 1, "clusters must be >= 1");
  need(c_star >= clusters, "c_star must be >= clusters");
  need(k_star >= 0, "k_star must be >= 0");
  need(vcc_sweeps >= 1, "vcc_sweeps must be >= 1");
  need(site_min_side >= 1 && site_max_side >= site_min_side, "site lattice side bounds invalid");
  need(fcm_tol > 0.0, "fcm_tol must be > 0");
  need(fcm_max_iter >= 1, "fcm_max_iter must be >= 1");
  aco.validate();
  need(variant != Variant::kSovcc || aco.t_star <= max_outer_iters,
       "aco_t_star must not exceed max_outer_iters");
}

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> k;
    for (const auto& e : registry()) k.push_back(e.key);
    return k;
  }();
  return keys;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  find_entry(key).set(cfg, trim(value));
}

std::string get_config_value(const RunConfig& cfg, const std::string& key) {
  return find_entry(key).get(cfg);
}

bool is_sweepable(const std::string& key) { return find_entry(key).key.sweepable; }

std::vector<std::pair<std::string, std::string>> dump_config(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : registry()) out.emplace_back(e.key.name, e.get(cfg));
  return out;
}

void apply_config_text(RunConfig& cfg, std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const auto body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected key=value");
    try {
      set_config_value(cfg, trim(body.substr(0, eq)), body.substr(eq + 1));
    } catch (const ParameterError& e) {
      throw ParseError(line_no, e.what());
    }
  }
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open config file: " + path);
  apply_config_text(cfg, in);
}

void write_config(std::ostream& out, const RunConfig& cfg, bool as_comment) {
  for (const auto& [k, v] : dump_config(cfg)) out << (as_comment ? "# " : "") << k << '=' << v << '\n';
}

const char* to_string(Variant v) {
  switch (v) {
    case Variant::kSonfis: return "sonfis";
    case Variant::kSorstR: return "sorst-r";
    case Variant::kSorstAs: return "sorst-as";
    case Variant::kESonfis: return "e-sonfis";
    case Variant::kSovcc: return "sovcc";
  }
  return "?";
}

Variant parse_variant(const std::string& s) {
  RunConfig c;
  set_config_value(c, "variant", s);
  return c.variant;
}

const char* to_string(RestartMode m) {
  return m == RestartMode::kCloseOpen ? "close-open" : "open-close";
}

}  // namespace gran
