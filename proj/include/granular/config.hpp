#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "granular/aco.hpp"
#include "granular/dataset.hpp"
#include "granular/som.hpp"

namespace gran {

enum class Variant { kSonfis, kSorstR, kSorstAs, kESonfis, kSovcc };
enum class RestartMode { kCloseOpen, kOpenClose };
enum class NfisData { kCenters, kRows };

/// Every knob of a run. Defaults are the documented values of `config dump`.
struct RunConfig {
  Variant variant = Variant::kSonfis;
  std::string data;
  std::string target;
  char delimiter = 0;  // 0 = detect

  std::uint64_t seed = 1;
  double ratio = 0.8;
  NormMethod normalize = NormMethod::kMinMax;

  // Crisp granulation
  int som_rows = 2;
  int som_cols = 2;
  SomInit som_init = SomInit::kSampledRows;
  int som_epochs = 40;
  double som_lr = 0.5;
  double som_radius = 1.0;
  GrowthKind growth = GrowthKind::kRegular;
  int growth_step = 1;
  int max_neurons = 100;

  // Fuzzy granulation
  std::vector<int> nfis_mfs = {3};
  int nfis_max_rules = 1000;
  int nfis_epochs = 30;
  double nfis_lr = 0.01;
  int nfis_gd_steps = 1;
  NfisData nfis_data = NfisData::kCenters;
  bool nfis_weighted = false;

  // Rough granulation
  std::vector<int> rst_bins = {2};
  int rst_decision_bins = 2;
  BinStrategy rst_strategy = BinStrategy::kEqualWidth;
  int rst_max_bins = 8;
  double strength_threshold = 0.0;
  bool strength_adaptive = true;
  double strength_step = 0.01;
  double strength_min = 0.0;
  double strength_max = 0.5;
  bool sorst_as_grow = false;

  // Loop control
  double error_target = 0.05;
  int max_outer_iters = 20;

  // Evolutionary search
  int ga_population = 20;
  int ga_generations = 15;
  int ga_tournament = 3;
  double ga_crossover = 0.9;
  double ga_mutation = 0.1;
  double ga_rule_penalty = 1e-3;
  int ga_max_rows = 6;
  int ga_max_cols = 6;
  int ga_max_mfs = 4;

  // Collaborative clustering
  int sites = 2;
  int clusters = 2;
  int c_star = 3;
  int k_star = 2;
  int vcc_sweeps = 5;
  RestartMode restart = RestartMode::kCloseOpen;
  int site_min_side = 2;
  int site_max_side = 5;
  bool equal_sites = false;
  double fcm_tol = 1e-6;
  int fcm_max_iter = 300;
  AcoParams aco;

  /// Throws ParameterError on out-of-range values.
  void validate() const;
};

struct ConfigKey {
  std::string name;
  std::string doc;
  bool sweepable = false;
};

const std::vector<ConfigKey>& config_keys();

/// Sets `key` from its textual value; unknown keys and bad values throw
/// ParameterError.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);
std::string get_config_value(const RunConfig& cfg, const std::string& key);
bool is_sweepable(const std::string& key);

/// (key, value) for every key, in registry order.
std::vector<std::pair<std::string, std::string>> dump_config(const RunConfig& cfg);

/// key=value lines; '#' starts a comment; blank lines ignored.
void apply_config_text(RunConfig& cfg, std::istream& in);
void apply_config_file(RunConfig& cfg, const std::string& path);

/// key=value lines, or the same lines prefixed with "# " for artifact headers.
void write_config(std::ostream& out, const RunConfig& cfg, bool as_comment = false);

const char* to_string(Variant v);
Variant parse_variant(const std::string& s);
const char* to_string(RestartMode m);

}  // namespace gran
