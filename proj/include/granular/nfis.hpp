#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "granular/dataset.hpp"
#include "granular/som.hpp"

namespace gran {

inline constexpr double kWidthFloor = 1e-6;
inline constexpr double kDenominatorFloor = 1e-12;

struct GaussianMf {
  double center = 0.0;
  double width = 1.0;

  double operator()(double x) const;
};

/// One premise cell of the rule grid with its linear consequent
/// y = coeffs[0] + sum_i coeffs[i+1] * x_i.
struct TskRule {
  std::vector<int> premise;
  Vector coeffs;
};

/// First-order Takagi-Sugeno rule base over the full grid of premise
/// combinations. Rules are ordered lexicographically by premise with the last
/// input varying fastest.
struct TskRuleBase {
  int n_inputs = 0;
  std::vector<std::vector<GaussianMf>> mfs;
  std::vector<TskRule> rules;

  std::vector<int> granularity() const;
  std::size_t premise_parameter_count() const;
};

struct GranularityLevel {
  std::vector<int> mfs_per_input;
  int max_rules = 1000;
  double error_target = 0.0;

  int rule_count() const;
};

/// Training rows hold the inputs followed by the target; `weights`, when
/// non-empty, weight each row's squared residual.
struct TrainingSet {
  std::span<const Vector> rows;
  std::span<const double> weights = {};
};

/// MF centres at equal quantiles of each input coordinate (min and max for two
/// or more MFs, the median for one); widths half the mean adjacent gap.
TskRuleBase init_tsk(std::span<const Vector> rows, const GranularityLevel& level);
TskRuleBase init_tsk(const CrispGranules& granules, const GranularityLevel& level);

/// Normalized firing strengths; sums to 1.
Vector firing_strengths(const TskRuleBase& rb, std::span<const double> x);
double infer(const TskRuleBase& rb, std::span<const double> x);

double sse(const TskRuleBase& rb, const TrainingSet& data);
double mse(const TskRuleBase& rb, const TrainingSet& data);
double rmse(const TskRuleBase& rb, const TrainingSet& data);

struct LseFit {
  TskRuleBase base;
  bool rank_deficient = false;
  int rank = 0;
};

/// Consequent-only least squares with premises fixed. Rank-deficient systems
/// receive the minimum-norm solution.
LseFit fit_consequents_lse(const TskRuleBase& rb, const TrainingSet& data);

/// Analytic gradient of the (weighted) mean squared error with respect to the
/// premise parameters, ordered input-major: (c, sigma) for every MF.
Vector premise_gradient(const TskRuleBase& rb, const TrainingSet& data);
Vector premise_parameters(const TskRuleBase& rb);
TskRuleBase with_premise_parameters(const TskRuleBase& rb, std::span<const double> params);

/// Full-batch gradient descent on the premises; widths clamp to kWidthFloor.
TskRuleBase fit_premises_gd(const TskRuleBase& rb, const TrainingSet& data, double lr, int steps);

struct HybridFit {
  TskRuleBase base;
  /// Training RMSE after each epoch.
  Vector rmse;
  bool rank_deficient = false;
};

/// Each epoch runs the least-squares pass, then `gd_steps` gradient steps.
HybridFit train_hybrid(const TskRuleBase& rb, const TrainingSet& data, int epochs, double lr,
                       int gd_steps = 1);

/// One line per rule: "IF x1 is G(c, s) AND ... THEN y = a0 + a1*x1 ...",
/// six significant digits.
std::vector<std::string> extract_fuzzy_rules(const TskRuleBase& rb,
                                             const std::vector<std::string>& input_names = {},
                                             const std::string& output_name = "y");

struct ParsedFuzzyRule {
  std::vector<std::string> inputs;
  Vector centers;
  Vector widths;
  Vector coeffs;
};

ParsedFuzzyRule parse_fuzzy_rule(const std::string& line);

void write_tsk(std::ostream& out, const TskRuleBase& rb);
TskRuleBase read_tsk(std::istream& in);

}  // namespace gran
