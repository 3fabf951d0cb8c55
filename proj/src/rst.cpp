#include "granular/rst.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "granular/error.hpp"
#include "granular/textio.hpp"

namespace gran {

namespace {

void check_attrs(const InformationSystem& is, std::span<const std::size_t> attrs) {
  if (attrs.empty()) throw ParameterError("attribute subset must not be empty");
  for (auto a : attrs) {
    if (a >= is.n_conditions()) {
      throw ParameterError("unknown condition attribute index " + std::to_string(a));
    }
  }
}

struct Counts {
  int matches = 0;
  int support = 0;
};

Counts count(const InformationSystem& is, const std::vector<Condition>& conds, int decision) {
  Counts c;
  for (const auto& obj : is.objects) {
    bool ok = true;
    for (const auto& cond : conds) {
      if (obj[cond.attribute] != cond.code) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    ++c.matches;
    if (obj.back() == decision) ++c.support;
  }
  return c;
}

bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

std::vector<std::size_t> ApproximationPair::boundary() const {
  std::vector<std::size_t> out;
  std::set_difference(upper.begin(), upper.end(), lower.begin(), lower.end(),
                      std::back_inserter(out));
  return out;
}

bool DecisionRule::matches(std::span<const int> object) const {
  for (const auto& c : conditions) {
    if (c.attribute >= object.size() || object[c.attribute] != c.code) return false;
  }
  return true;
}

std::vector<std::size_t> all_conditions(const InformationSystem& is) {
  std::vector<std::size_t> a(is.n_conditions());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = i;
  return a;
}

Partition indiscernibility(const InformationSystem& is, std::span<const std::size_t> attrs) {
  check_attrs(is, attrs);
  // First appearance order of a key is the order of its smallest member.
  std::map<std::vector<int>, std::size_t> index;
  Partition blocks;
  std::vector<int> key(attrs.size());
  for (std::size_t o = 0; o < is.size(); ++o) {
    for (std::size_t k = 0; k < attrs.size(); ++k) key[k] = is.objects[o][attrs[k]];
    const auto [it, inserted] = index.emplace(key, blocks.size());
    if (inserted) blocks.emplace_back();
    blocks[it->second].push_back(o);
  }
  return blocks;
}

double classification_quality(const InformationSystem& is, std::span<const std::size_t> attrs) {
  if (is.size() == 0) return 0.0;
  std::size_t consistent = 0;
  for (const auto& b : indiscernibility(is, attrs)) {
    const int d = is.decision(b.front());
    if (std::all_of(b.begin(), b.end(), [&](std::size_t o) { return is.decision(o) == d; })) {
      consistent += b.size();
    }
  }
  return static_cast<double>(consistent) / static_cast<double>(is.size());
}

ApproximationPair approximate(const InformationSystem& is, std::span<const std::size_t> attrs,
                              int decision_value) {
  check_attrs(is, attrs);
  bool present = false;
  for (std::size_t o = 0; o < is.size(); ++o) present = present || is.decision(o) == decision_value;
  if (!present) {
    throw ParameterError("decision value " + std::to_string(decision_value) + " does not occur");
  }
  ApproximationPair out;
  out.decision = decision_value;
  for (const auto& b : indiscernibility(is, attrs)) {
    const auto hits = std::count_if(b.begin(), b.end(),
                                    [&](std::size_t o) { return is.decision(o) == decision_value; });
    if (hits == 0) continue;
    out.upper.insert(out.upper.end(), b.begin(), b.end());
    if (static_cast<std::size_t>(hits) == b.size()) out.lower.insert(out.lower.end(), b.begin(), b.end());
  }
  std::sort(out.lower.begin(), out.lower.end());
  std::sort(out.upper.begin(), out.upper.end());
  out.gamma = classification_quality(is, attrs);
  return out;
}

RuleInduction induce_rules(const InformationSystem& is, const StrengthPolicy& policy) {
  if (is.size() == 0) throw ParameterError("rule induction on an empty table");
  if (is.n_conditions() == 0) throw ParameterError("rule induction needs condition attributes");
  const auto attrs = all_conditions(is);
  const auto n = static_cast<double>(is.size());

  std::set<std::pair<std::vector<Condition>, int>> seen;
  std::vector<DecisionRule> candidates;
  for (const auto& block : indiscernibility(is, attrs)) {
    std::set<int> decisions;
    for (auto o : block) decisions.insert(is.decision(o));
    const auto& rep = is.objects[block.front()];
    for (int d : decisions) {
      std::vector<Condition> conds;
      for (auto a : attrs) conds.push_back({a, rep[a]});
      Counts c = count(is, conds, d);
      for (std::size_t k = 0; k < conds.size() && conds.size() > 1;) {
        auto trial = conds;
        trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(k));
        const Counts t = count(is, trial, d);
        // Keep the removal when certainty does not drop: t.s/t.m >= c.s/c.m.
        if (static_cast<long long>(t.support) * c.matches >=
            static_cast<long long>(c.support) * t.matches) {
          conds = std::move(trial);
          c = t;
        } else {
          ++k;
        }
      }
      if (!seen.emplace(conds, d).second) continue;
      DecisionRule r;
      r.conditions = std::move(conds);
      r.decision = d;
      r.support = c.support;
      r.strength = c.support / n;
      r.certainty = static_cast<double>(c.support) / c.matches;
      candidates.push_back(std::move(r));
    }
  }

  RuleInduction out;
  for (auto& r : candidates) {
    if (r.strength >= policy.threshold) out.rules.push_back(std::move(r));
  }
  std::sort(out.rules.begin(), out.rules.end(), [](const DecisionRule& a, const DecisionRule& b) {
    if (a.support != b.support) return a.support > b.support;
    if (a.conditions.size() != b.conditions.size()) return a.conditions.size() < b.conditions.size();
    if (a.conditions != b.conditions) return a.conditions < b.conditions;
    return a.decision < b.decision;
  });
  out.empty_after_threshold = out.rules.empty();
  return out;
}

std::optional<Classification> classify(std::span<const DecisionRule> rules,
                                       std::span<const int> object) {
  struct Vote {
    double weight = 0.0;
    std::size_t specificity = 0;
  };
  std::map<int, Vote> votes;
  double strength_total = 0.0;
  for (const auto& r : rules) {
    if (!r.matches(object)) continue;
    auto& v = votes[r.decision];
    v.weight += r.strength * r.certainty;
    v.specificity = std::max(v.specificity, r.conditions.size());
    strength_total += r.strength;
  }
  if (votes.empty()) return std::nullopt;

  auto best = votes.begin();
  for (auto it = std::next(votes.begin()); it != votes.end(); ++it) {
    // Map order already prefers the lower decision code on a full tie.
    if (nearly_equal(it->second.weight, best->second.weight)) {
      if (it->second.specificity > best->second.specificity) best = it;
    } else if (it->second.weight > best->second.weight) {
      best = it;
    }
  }
  return Classification{best->first,
                        strength_total > 0.0 ? best->second.weight / strength_total : 0.0};
}

StrengthPolicy adapt_strength(const StrengthPolicy& policy, double misclassification_rate,
                              double target) {
  if (!policy.adaptive) throw ParameterError("strength policy is not adaptive");
  StrengthPolicy out = policy;
  out.threshold += misclassification_rate > target ? policy.step : -policy.step;
  out.threshold = std::clamp(out.threshold, policy.min, policy.max);
  return out;
}

std::vector<double> boundary_contributions(const InformationSystem& is) {
  std::vector<double> out(is.n_conditions(), 0.0);
  if (is.size() == 0) return out;
  for (std::size_t a = 0; a < is.n_conditions(); ++a) {
    const std::size_t attr[] = {a};
    double boundary = 0.0;
    for (const auto& b : indiscernibility(is, attr)) {
      std::set<int> decisions;
      for (auto o : b) decisions.insert(is.decision(o));
      if (decisions.size() > 1) boundary += static_cast<double>(b.size() * decisions.size());
    }
    out[a] = boundary / static_cast<double>(is.size());
  }
  return out;
}

std::vector<int> adapt_scaling(std::span<const int> bins, double misclassification_rate,
                               double target, int max_bins,
                               std::span<const double> boundary_contribution) {
  for (int b : bins) {
    if (b < 1) throw ParameterError("bin counts must be >= 1");
  }
  std::vector<int> out(bins.begin(), bins.end());
  if (out.empty()) return out;

  if (misclassification_rate > target) {
    if (!boundary_contribution.empty() && boundary_contribution.size() != out.size()) {
      throw ParameterError("one boundary contribution per attribute expected");
    }
    auto contrib = [&](std::size_t a) {
      return boundary_contribution.empty() ? 0.0 : boundary_contribution[a];
    };
    std::optional<std::size_t> pick;
    for (std::size_t a = 0; a < out.size(); ++a) {
      if (out[a] >= max_bins) continue;
      if (!pick) {
        pick = a;
        continue;
      }
      const double ca = contrib(a);
      const double cp = contrib(*pick);
      if (ca > cp || (ca == cp && out[a] < out[*pick])) pick = a;
    }
    if (pick) ++out[*pick];
    return out;
  }

  const auto largest = std::max_element(out.begin(), out.end());
  *largest = std::max(1, *largest - 1);
  for (auto& b : out) b = std::min(b, std::max(max_bins, 1));
  return out;
}

std::string format_rule(const DecisionRule& rule, const std::vector<std::string>& condition_names,
                        const std::string& decision_name) {
  std::ostringstream os;
  os << "IF ";
  for (std::size_t i = 0; i < rule.conditions.size(); ++i) {
    const auto a = rule.conditions[i].attribute;
    if (i) os << " AND ";
    os << (a < condition_names.size() ? condition_names[a] : "a" + std::to_string(a + 1)) << '='
       << rule.conditions[i].code;
  }
  os << " THEN " << decision_name << '=' << rule.decision << " [support=" << rule.support
     << ", strength=" << textio::fmt_sig(rule.strength, 2)
     << ", certainty=" << textio::fmt_sig(rule.certainty, 2) << ']';
  return os.str();
}

void write_rules(std::ostream& out, std::span<const DecisionRule> rules) {
  out << "granular-rules 1\n";
  out << "count " << rules.size() << '\n';
  for (const auto& r : rules) {
    out << r.decision << ' ' << r.support << ' ' << textio::fmt(r.strength) << ' '
        << textio::fmt(r.certainty) << ' ' << r.conditions.size();
    for (const auto& c : r.conditions) out << ' ' << c.attribute << ' ' << c.code;
    out << '\n';
  }
  out << "end-rules\n";
}

std::vector<DecisionRule> read_rules(std::istream& in) {
  using namespace textio;
  expect(in, "granular-rules");
  if (read_int(in) != 1) throw ParseError(0, "unsupported rule format version");
  expect(in, "count");
  const auto n = read_int(in);
  if (n < 0) throw ParseError(0, "negative rule count");
  std::vector<DecisionRule> rules;
  for (long long i = 0; i < n; ++i) {
    DecisionRule r;
    r.decision = static_cast<int>(read_int(in));
    r.support = static_cast<int>(read_int(in));
    r.strength = read_double(in);
    r.certainty = read_double(in);
    const auto k = read_int(in);
    for (long long j = 0; j < k; ++j) {
      Condition c;
      c.attribute = static_cast<std::size_t>(read_uint(in));
      c.code = static_cast<int>(read_int(in));
      r.conditions.push_back(c);
    }
    rules.push_back(std::move(r));
  }
  expect(in, "end-rules");
  return rules;
}

}  // namespace gran
