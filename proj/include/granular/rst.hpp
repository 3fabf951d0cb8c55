#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "granular/dataset.hpp"

namespace gran {

using Block = std::vector<std::size_t>;
using Partition = std::vector<Block>;

struct ApproximationPair {
  std::vector<std::size_t> lower;
  std::vector<std::size_t> upper;
  int decision = 0;
  /// Quality of classification: |union of all lower approximations| / |U|.
  double gamma = 0.0;

  std::vector<std::size_t> boundary() const;
};

struct Condition {
  std::size_t attribute = 0;
  int code = 0;

  auto operator<=>(const Condition&) const = default;
};

struct DecisionRule {
  std::vector<Condition> conditions;  // ascending by attribute
  int decision = 0;
  int support = 0;
  /// support / |objects|
  double strength = 0.0;
  /// support / objects matching the conditions
  double certainty = 0.0;

  bool matches(std::span<const int> object) const;
};

struct StrengthPolicy {
  double threshold = 0.0;
  bool adaptive = false;
  double step = 0.05;
  double min = 0.0;
  double max = 1.0;
};

struct RuleInduction {
  std::vector<DecisionRule> rules;
  /// Set when the threshold pruned every candidate.
  bool empty_after_threshold = false;
};

struct Classification {
  int decision = 0;
  double confidence = 0.0;
};

/// Equivalence classes on `attrs`, ordered by smallest member.
Partition indiscernibility(const InformationSystem& is, std::span<const std::size_t> attrs);

ApproximationPair approximate(const InformationSystem& is, std::span<const std::size_t> attrs,
                              int decision_value);

/// |objects in decision-consistent blocks| / |objects|.
double classification_quality(const InformationSystem& is, std::span<const std::size_t> attrs);

std::vector<std::size_t> all_conditions(const InformationSystem& is);

/// Block-wise candidates over all condition attributes, simplified by
/// dropping conditions whose removal keeps certainty, then thresholded on
/// strength. Ordered by descending strength, ascending condition count,
/// lexicographic conditions, ascending decision.
RuleInduction induce_rules(const InformationSystem& is, const StrengthPolicy& policy);

/// Strength*certainty weighted vote among matching rules; nullopt abstains.
std::optional<Classification> classify(std::span<const DecisionRule> rules,
                                       std::span<const int> object);

StrengthPolicy adapt_strength(const StrengthPolicy& policy, double misclassification_rate,
                              double target);

/// Boundary-region size of each single condition attribute's partition,
/// summed over concepts, as a fraction of |objects|.
std::vector<double> boundary_contributions(const InformationSystem& is);

/// Bin-count adaptation. Above target: refine the attribute with the largest
/// boundary contribution (ties to fewer bins, then lower index) among those
/// below max_bins. At or below target: coarsen the largest bin count.
std::vector<int> adapt_scaling(std::span<const int> bins, double misclassification_rate,
                               double target, int max_bins,
                               std::span<const double> boundary_contribution);

/// "IF a1=2 AND a3=0 THEN d=1 [support=5, strength=0.12, certainty=0.83]"
std::string format_rule(const DecisionRule& rule, const std::vector<std::string>& condition_names,
                        const std::string& decision_name);

void write_rules(std::ostream& out, std::span<const DecisionRule> rules);
std::vector<DecisionRule> read_rules(std::istream& in);

}  // namespace gran
