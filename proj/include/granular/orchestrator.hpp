#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "granular/config.hpp"
#include "granular/dataset.hpp"
#include "granular/model.hpp"

namespace gran {

enum class Termination { kConverged, kGrowthExhausted, kIterationLimit };

/// One row of the run trace. Multi-site runs fill the per-site lists.
struct IterationRecord {
  int iteration = 0;
  std::string event;
  int k = 0;
  int c = 0;
  int t = 0;
  std::vector<std::pair<int, int>> grids;
  std::vector<int> granules;
  int rules = 0;
  double train_error = 0.0;
  double test_error = 0.0;
  double threshold = -1.0;  // negative when not applicable
  std::vector<int> bins;
  Vector deltas;
  Eigen::MatrixXd tau;
  Eigen::MatrixXd beta;
};

struct RunReport {
  RunConfig config;
  std::vector<IterationRecord> records;
  Termination termination = Termination::kIterationLimit;
  /// Rough-set runs that ended with no usable rule.
  bool unclassifiable = false;
  Model model;
  int step4_passes = 0;
  int pheromone_updates = 0;
  /// E-SONFIS only: the winning chromosome (rows, cols, mfs...).
  std::vector<int> best_chromosome;

  double final_train_error() const { return records.empty() ? 0.0 : records.back().train_error; }
  double final_test_error() const { return records.empty() ? 0.0 : records.back().test_error; }
};

/// Train/test split exactly as the runs draw it from `cfg.seed` and `cfg.ratio`.
SplitPair run_split(const RunConfig& cfg, const Dataset& raw);

RunReport run_sonfis(const RunConfig& cfg, const Dataset& data);
RunReport run_sorst(const RunConfig& cfg, const Dataset& data);
RunReport run_esonfis(const RunConfig& cfg, const Dataset& data);
RunReport run_sovcc(const RunConfig& cfg, const Dataset& data);

/// Dispatches on cfg.variant.
RunReport run(const RunConfig& cfg, const Dataset& data);

enum class RestartAction { kRegranulate, kIncreaseC, kStop };

/// Decision taken once a pheromone cycle is spent. Close-open re-granulates
/// first and falls back to a larger c; open-close tries c first.
RestartAction close_open_restart(RestartMode mode, int k, int c, int k_star, int c_star);

/// '#' config header, one CSV row per record, '#' summary lines.
void write_trace(std::ostream& out, const RunReport& report);

const char* to_string(Termination t);
const char* to_string(RestartAction a);

}  // namespace gran
