#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "granular/dataset.hpp"
#include "granular/nfis.hpp"
#include "granular/rst.hpp"
#include "granular/som.hpp"
#include "granular/vcc.hpp"

namespace gran {

enum class ModelKind { kNfis, kRst, kVcc };

/// Frozen state of one collaborating site: its local linear rules plus the
/// rough-set rules induced over its granules at termination.
struct SiteModel {
  std::vector<LinearRule> linear_rules;
  std::vector<DecisionRule> rough_rules;
};

/// Everything needed to score raw rows. All internal parameters live in the
/// normalized space described by `normalization`.
struct Model {
  ModelKind kind = ModelKind::kNfis;
  std::vector<std::string> input_names;
  std::string output_name;
  Normalization normalization;

  SomGrid grid;               // nfis, rst
  TskRuleBase tsk;            // nfis
  std::vector<Vector> cuts;   // rst, vcc: conditions then decision
  std::vector<DecisionRule> rules;  // rst
  std::vector<SiteModel> sites;     // vcc

  std::size_t rule_count() const;
};

struct Metrics {
  std::string metric;  // "rmse" or "misclassification"
  double error = 0.0;
  double abstention_rate = 0.0;
  std::size_t n = 0;
};

/// Prediction in raw output units (nfis, vcc).
double predict(const Model& m, std::span<const double> raw_inputs);

/// Decision code of a raw input vector, or nullopt when no rule matches (rst).
std::optional<int> classify_raw(const Model& m, std::span<const double> raw_inputs);
int decision_code(const Model& m, double raw_output);

/// Scores raw rows laid out like the model's schema. RST abstentions count as
/// errors and are also reported on their own.
Metrics evaluate(const Model& m, const Dataset& raw);

/// Human-readable rules, one per line.
std::vector<std::string> model_rules(const Model& m);

void write_model(std::ostream& out, const Model& m);
Model read_model(std::istream& in);

const char* to_string(ModelKind k);

}  // namespace gran
