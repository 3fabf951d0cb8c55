#include "granular/cli.hpp"

#include <CLI11.hpp>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "granular/config.hpp"
#include "granular/error.hpp"
#include "granular/model.hpp"
#include "granular/orchestrator.hpp"
#include "granular/textio.hpp"

namespace gran {

namespace {

namespace fs = std::filesystem;

struct RunFlags {
  std::string config_file;
  std::vector<std::string> sets;
  std::optional<std::string> variant;
  std::optional<std::string> data;
  std::optional<std::string> target;
  std::optional<std::uint64_t> seed;
  std::optional<double> ratio;
  std::string out = ".";
};

void add_run_options(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--config", f.config_file, "key=value configuration file");
  cmd->add_option("--set", f.sets, "override one key (key=value); repeatable");
  cmd->add_option("--variant", f.variant, "sonfis|sorst-r|sorst-as|e-sonfis|sovcc");
  cmd->add_option("--data", f.data, "input table (CSV or TSV with header)");
  cmd->add_option("--target", f.target, "output column");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--ratio", f.ratio, "training share of the split");
}

RunConfig effective_config(const RunFlags& f) {
  RunConfig cfg;
  if (!f.config_file.empty()) apply_config_file(cfg, f.config_file);
  for (const auto& s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParameterError("--set expects key=value, got '" + s + "'");
    set_config_value(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  if (f.variant) set_config_value(cfg, "variant", *f.variant);
  if (f.data) cfg.data = *f.data;
  if (f.target) cfg.target = *f.target;
  if (f.seed) cfg.seed = *f.seed;
  if (f.ratio) cfg.ratio = *f.ratio;
  cfg.validate();
  return cfg;
}

Dataset load_for(const RunConfig& cfg) {
  if (cfg.data.empty()) throw ParameterError("no data file given (--data)");
  if (cfg.target.empty()) throw ParameterError("no output column given (--target)");
  TableSchema schema;
  schema.output = cfg.target;
  schema.delimiter = cfg.delimiter;
  return load_table_file(cfg.data, schema);
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParameterError("cannot write " + path.string());
  return f;
}

RunReport train_into(const RunConfig& cfg, const fs::path& dir) {
  const auto data = load_for(cfg);
  auto report = run(cfg, data);
  fs::create_directories(dir);
  {
    auto f = open_out(dir / "model.txt");
    write_config(f, cfg, true);
    write_model(f, report.model);
  }
  {
    auto f = open_out(dir / "rules.txt");
    write_config(f, cfg, true);
    for (const auto& line : model_rules(report.model)) f << line << '\n';
  }
  {
    auto f = open_out(dir / "trace.csv");
    write_trace(f, report);
  }
  return report;
}

void print_summary(std::ostream& out, const RunReport& r) {
  out << "variant=" << to_string(r.config.variant) << " iterations=" << r.records.size()
      << " final_error=" << textio::fmt(r.final_test_error())
      << " termination=" << to_string(r.termination) << " rules=" << r.model.rule_count();
  if (r.unclassifiable) out << " unclassifiable=true";
  out << '\n';
}

int cmd_train(const RunFlags& f, std::ostream& out) {
  const auto cfg = effective_config(f);
  const auto report = train_into(cfg, f.out);
  print_summary(out, report);
  return report.unclassifiable ? kExitDegenerate : kExitOk;
}

int cmd_evaluate(const std::string& model_path, const std::string& data_path, const std::string& metrics_path,
                 char delimiter, const std::string& subset, std::ostream& out) {
  std::ifstream mf(model_path);
  if (!mf) throw ParameterError("cannot open model file: " + model_path);
  std::string header;
  {
    std::string line;
    while (mf.peek() == '#' && std::getline(mf, line)) header += line + '\n';
  }
  const auto model = read_model(mf);
  TableSchema schema;
  schema.output = model.output_name;
  schema.inputs = model.input_names;
  schema.delimiter = delimiter;
  auto data = load_table_file(data_path, schema);
  if (subset != "all") {
    // The header carries the run configuration, hence the split seed and ratio.
    RunConfig cfg;
    std::istringstream lines(header);
    std::string line;
    std::ostringstream stripped;
    while (std::getline(lines, line)) stripped << line.substr(std::min<std::size_t>(2, line.size())) << '\n';
    std::istringstream text(stripped.str());
    apply_config_text(cfg, text);
    auto parts = run_split(cfg, data);
    data = subset == "train" ? std::move(parts.train) : std::move(parts.test);
  }
  const auto m = evaluate(model, data);

  std::ostringstream body;
  body << "metric=" << m.metric << '\n'
       << "error=" << textio::fmt(m.error) << '\n'
       << "abstention_rate=" << textio::fmt(m.abstention_rate) << '\n'
       << "n=" << m.n << '\n';
  out << body.str();
  if (!metrics_path.empty()) {
    auto f = open_out(metrics_path);
    f << header << body.str();
  }
  return kExitOk;
}

std::string dir_name(const std::string& key, const std::string& value) {
  std::string s = key + "=";
  for (char ch : value) s += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '-') ? ch : '_';
  return s;
}

int cmd_sweep(const RunFlags& f, const std::string& key, const std::vector<std::string>& values,
              std::ostream& out) {
  if (!is_sweepable(key)) throw ParameterError("config key '" + key + "' cannot be swept");
  const auto base = effective_config(f);
  const fs::path dir = f.out;
  fs::create_directories(dir);
  std::ostringstream table;
  table << "value,final_error,rule_count,iterations,termination\n";
  bool degenerate = false;
  for (const auto& v : values) {
    RunConfig cfg = base;
    set_config_value(cfg, key, v);
    cfg.validate();
    const auto report = train_into(cfg, dir / dir_name(key, v));
    degenerate = degenerate || report.unclassifiable;
    table << v << ',' << textio::fmt(report.final_test_error()) << ',' << report.model.rule_count() << ','
          << report.records.size() << ',' << to_string(report.termination) << '\n';
  }
  auto t = open_out(dir / "sweep.csv");
  write_config(t, base, true);
  t << "# sweep=" << key << '\n' << table.str();
  out << table.str();
  return degenerate ? kExitDegenerate : kExitOk;
}

std::string keys_footer() {
  std::ostringstream os;
  os << "Configuration keys (--set key=value or --config file):\n";
  const RunConfig defaults;
  for (const auto& k : config_keys()) {
    os << "  " << k.name << " [" << get_config_value(defaults, k.name) << "]"
       << (k.sweepable ? " (sweepable)" : "") << "  " << k.doc << '\n';
  }
  return os.str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Granular computing toolkit: SOM granulation with neuro-fuzzy, rough-set and collaborative reasoning"};
  app.name("granular");
  app.require_subcommand(1);
  app.footer(keys_footer());

  RunFlags train_flags;
  auto* train = app.add_subcommand("train", "run a variant and write model, rules and trace");
  add_run_options(train, train_flags);
  train->add_option("--out", train_flags.out, "output directory");

  std::string model_path;
  std::string eval_data;
  std::string metrics_path;
  std::string eval_delim = "auto";
  auto* eval = app.add_subcommand("evaluate", "score a saved model on a data file");
  eval->add_option("--model", model_path, "model file")->required();
  eval->add_option("--data", eval_data, "data file")->required();
  eval->add_option("--out", metrics_path, "metrics file");
  eval->add_option("--delimiter", eval_delim, "auto|comma|tab");
  std::string subset = "all";
  eval->add_option("--subset", subset, "all rows, or the training/test part of the run split")
      ->check(CLI::IsMember({"all", "train", "test"}));

  RunFlags sweep_flags;
  std::string sweep_key;
  std::vector<std::string> sweep_values;
  auto* sweep = app.add_subcommand("sweep", "one run per value of a config key");
  add_run_options(sweep, sweep_flags);
  sweep->add_option("--out", sweep_flags.out, "output directory");
  sweep->add_option("--key", sweep_key, "config key to vary")->required();
  sweep->add_option("--values", sweep_values, "values, space separated")->required();

  RunFlags dump_flags;
  auto* config = app.add_subcommand("config", "configuration utilities");
  config->require_subcommand(1);
  auto* dump = config->add_subcommand("dump", "print the effective configuration");
  add_run_options(dump, dump_flags);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train) return cmd_train(train_flags, out);
    if (*eval) {
      RunConfig tmp;
      set_config_value(tmp, "delimiter", eval_delim);
      return cmd_evaluate(model_path, eval_data, metrics_path, tmp.delimiter, subset, out);
    }
    if (*sweep) return cmd_sweep(sweep_flags, sweep_key, sweep_values, out);
    if (*dump) {
      write_config(out, effective_config(dump_flags));
      return kExitOk;
    }
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const EmptyInputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace gran
