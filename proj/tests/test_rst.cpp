#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "granular/error.hpp"
#include "granular/rng.hpp"
#include "granular/rst.hpp"

using namespace gran;

namespace {

InformationSystem table(std::vector<std::vector<int>> objects) {
  InformationSystem is;
  is.objects = std::move(objects);
  for (std::size_t a = 0; a + 1 < is.objects.front().size(); ++a) {
    is.condition_attrs.push_back("a" + std::to_string(a + 1));
  }
  is.decision_attr = "d";
  return is;
}

InformationSystem random_table(Rng& rng, int n, int attrs, int codes, int decisions) {
  std::vector<std::vector<int>> objs;
  for (int i = 0; i < n; ++i) {
    std::vector<int> o;
    for (int a = 0; a < attrs; ++a) o.push_back(rng.between(0, codes - 1));
    o.push_back(rng.between(0, decisions - 1));
    objs.push_back(o);
  }
  return table(objs);
}

// Pairwise-equality grouping.
Partition brute_partition(const InformationSystem& is, const std::vector<std::size_t>& attrs) {
  Partition out;
  std::vector<bool> used(is.size(), false);
  for (std::size_t i = 0; i < is.size(); ++i) {
    if (used[i]) continue;
    Block b;
    for (std::size_t j = i; j < is.size(); ++j) {
      bool same = true;
      for (auto a : attrs) same = same && is.objects[i][a] == is.objects[j][a];
      if (same) {
        b.push_back(j);
        used[j] = true;
      }
    }
    out.push_back(b);
  }
  return out;
}

std::set<std::size_t> extension(const InformationSystem& is, int d) {
  std::set<std::size_t> out;
  for (std::size_t o = 0; o < is.size(); ++o) {
    if (is.decision(o) == d) out.insert(o);
  }
  return out;
}

bool subset(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

InformationSystem golden_table() {
  return table({{0, 0, 0}, {0, 1, 0}, {1, 0, 1}, {1, 1, 1}, {1, 1, 0}});
}

}  // namespace

TEST_CASE("indiscernibility examples") {
  const auto is = table({{0, 5}, {0, 6}, {1, 5}});
  const std::vector<std::size_t> a0{0};
  CHECK(indiscernibility(is, a0) == Partition{{0, 1}, {2}});

  const auto distinct = table({{0, 1, 0}, {1, 1, 0}, {1, 0, 1}});
  CHECK(indiscernibility(distinct, all_conditions(distinct)) == Partition{{0}, {1}, {2}});

  const std::vector<std::size_t> bad{3};
  CHECK_THROWS_AS(indiscernibility(is, bad), ParameterError);
  CHECK_THROWS_AS(indiscernibility(is, std::vector<std::size_t>{}), ParameterError);
}

TEST_CASE("indiscernibility equals the pairwise oracle and is a partition") {
  Rng rng(19);
  for (int trial = 0; trial < 30; ++trial) {
    const auto is = random_table(rng, 20, 3, 3, 2);
    std::vector<std::size_t> attrs;
    for (std::size_t a = 0; a < 3; ++a) {
      if (rng.uniform() < 0.6) attrs.push_back(a);
    }
    if (attrs.empty()) attrs.push_back(1);
    const auto p = indiscernibility(is, attrs);
    CHECK(p == brute_partition(is, attrs));
    std::vector<std::size_t> all;
    for (const auto& b : p) all.insert(all.end(), b.begin(), b.end());
    std::sort(all.begin(), all.end());
    CHECK(all.size() == is.size());
    CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
  }
}

TEST_CASE("approximation examples") {
  const auto is = table({{0, 1}, {0, 0}, {1, 1}});
  const std::vector<std::size_t> a{0};
  const auto ap = approximate(is, a, 1);
  CHECK(ap.lower == std::vector<std::size_t>{2});
  CHECK(ap.upper == std::vector<std::size_t>{0, 1, 2});
  CHECK(ap.boundary() == std::vector<std::size_t>{0, 1});
  CHECK(ap.gamma == doctest::Approx(1.0 / 3.0));

  const auto consistent = table({{0, 1}, {0, 1}, {1, 0}});
  const auto cp = approximate(consistent, a, 1);
  CHECK(cp.lower == cp.upper);
  CHECK(cp.lower == std::vector<std::size_t>{0, 1});
  CHECK(cp.boundary().empty());
  CHECK(cp.gamma == 1.0);

  const auto full = table({{0, 4}, {1, 4}});
  const auto fp = approximate(full, a, 4);
  CHECK(fp.lower == std::vector<std::size_t>{0, 1});
  CHECK(fp.upper == fp.lower);

  CHECK_THROWS_AS(approximate(full, a, 9), ParameterError);
}

TEST_CASE("containment, refinement monotonicity and gamma on random tables") {
  Rng rng(29);
  for (int trial = 0; trial < 40; ++trial) {
    const auto is = random_table(rng, 25, 3, 2 + trial % 2, 2 + trial % 3);
    const std::vector<std::size_t> coarse{0};
    const std::vector<std::size_t> fine{0, 2};
    std::set<int> decisions;
    for (std::size_t o = 0; o < is.size(); ++o) decisions.insert(is.decision(o));
    for (int d : decisions) {
      const auto ext_set = extension(is, d);
      const std::vector<std::size_t> ext(ext_set.begin(), ext_set.end());
      const auto c = approximate(is, coarse, d);
      const auto f = approximate(is, fine, d);
      CHECK(subset(c.lower, ext));
      CHECK(subset(ext, c.upper));
      CHECK(subset(c.lower, f.lower));
      CHECK(subset(f.upper, c.upper));
      CHECK(c.gamma >= 0.0);
      CHECK(c.gamma <= 1.0);
    }
    const auto all = all_conditions(is);
    std::size_t lower_union = 0;
    for (int d : decisions) lower_union += approximate(is, all, d).lower.size();
    const double gamma = classification_quality(is, all);
    CHECK(gamma == doctest::Approx(static_cast<double>(lower_union) / is.size()));
    bool consistent = true;
    for (const auto& b : indiscernibility(is, all)) {
      for (auto o : b) consistent = consistent && is.decision(o) == is.decision(b.front());
    }
    CHECK((gamma == 1.0) == consistent);
  }
}

TEST_CASE("rule induction examples") {
  const auto simple = table({{0, 0}, {1, 1}});
  const auto r = induce_rules(simple, {});
  REQUIRE(r.rules.size() == 2);
  for (const auto& rule : r.rules) {
    CHECK(rule.certainty == 1.0);
    CHECK(rule.strength == 0.5);
  }

  const auto none = induce_rules(golden_table(), StrengthPolicy{1.0});
  CHECK(none.rules.empty());
  CHECK(none.empty_after_threshold);

  const auto clash = table({{0, 0}, {0, 1}, {0, 1}});
  const auto cr = induce_rules(clash, {});
  REQUIRE(cr.rules.size() == 2);
  for (const auto& rule : cr.rules) CHECK(rule.certainty < 1.0);
  CHECK(cr.rules[0].decision == 1);
  CHECK(cr.rules[0].certainty == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("every induced rule recounts exactly against its table") {
  Rng rng(37);
  for (int trial = 0; trial < 30; ++trial) {
    const auto is = random_table(rng, 30, 3, 3, 2);
    StrengthPolicy policy;
    policy.threshold = 0.05 * (trial % 3);
    const auto ind = induce_rules(is, policy);
    for (const auto& rule : ind.rules) {
      int matches = 0;
      int support = 0;
      for (const auto& o : is.objects) {
        if (!rule.matches(o)) continue;
        ++matches;
        if (o.back() == rule.decision) ++support;
      }
      CHECK(rule.support == support);
      CHECK(rule.support >= 1);
      CHECK(rule.strength == static_cast<double>(support) / static_cast<double>(is.size()));
      CHECK(rule.certainty == static_cast<double>(support) / matches);
      CHECK(rule.strength >= policy.threshold);
      CHECK(std::is_sorted(rule.conditions.begin(), rule.conditions.end()));
    }
    for (std::size_t i = 1; i < ind.rules.size(); ++i) CHECK(ind.rules[i - 1].strength >= ind.rules[i].strength);
  }
}

TEST_CASE("classification voting") {
  DecisionRule a{{{0, 1}}, 1, 3, 0.3, 0.75};
  const std::vector<int> hit{1, 0};
  const std::vector<int> miss{0, 0};
  const std::vector<DecisionRule> one{a};
  const auto c = classify(one, hit);
  REQUIRE(c.has_value());
  CHECK(c->decision == 1);
  CHECK(c->confidence == doctest::Approx(0.75));
  CHECK_FALSE(classify(one, miss).has_value());

  DecisionRule general{{{0, 1}}, 4, 2, 0.2, 1.0};
  DecisionRule specific{{{0, 1}, {1, 0}}, 2, 2, 0.2, 1.0};
  const std::vector<DecisionRule> tie{general, specific};
  CHECK(classify(tie, hit)->decision == 2);

  DecisionRule low{{{0, 1}}, 7, 2, 0.2, 1.0};
  DecisionRule high{{{0, 1}}, 3, 2, 0.2, 1.0};
  const std::vector<DecisionRule> flat{low, high};
  CHECK(classify(flat, hit)->decision == 3);
}

TEST_CASE("adaptive strength steps") {
  StrengthPolicy p{0.1, true, 0.05, 0.0, 1.0};
  CHECK(adapt_strength(p, 0.5, 0.2).threshold == doctest::Approx(0.15));
  CHECK(adapt_strength(p, 0.2, 0.2).threshold == doctest::Approx(0.05));
  StrengthPolicy top{1.0, true, 0.05, 0.0, 1.0};
  CHECK(adapt_strength(top, 0.9, 0.1).threshold == 1.0);
  StrengthPolicy bottom{0.0, true, 0.05, 0.0, 1.0};
  CHECK(adapt_strength(bottom, 0.0, 0.1).threshold == 0.0);
  CHECK_THROWS_AS(adapt_strength(StrengthPolicy{}, 0.5, 0.1), ParameterError);
}

TEST_CASE("adaptive scaling") {
  const std::vector<int> two{2, 2};
  const std::vector<double> first{0.6, 0.2};
  CHECK(adapt_scaling(two, 0.4, 0.1, 10, first) == std::vector<int>{3, 2});
  const std::vector<double> second{0.1, 0.2};
  CHECK(adapt_scaling(two, 0.4, 0.1, 10, second) == std::vector<int>{2, 3});
  const std::vector<int> maxed{4, 4};
  CHECK(adapt_scaling(maxed, 0.4, 0.1, 4, first) == maxed);
  const std::vector<int> down{3, 2};
  CHECK(adapt_scaling(down, 0.1, 0.1, 10, first) == std::vector<int>{2, 2});
  const std::vector<int> ones{1, 1};
  CHECK(adapt_scaling(ones, 0.0, 0.1, 10, first) == ones);
  const std::vector<int> zero{0, 1};
  CHECK_THROWS_AS(adapt_scaling(zero, 0.5, 0.1, 10, first), ParameterError);
}

TEST_CASE("boundary contributions follow the inconsistent attribute") {
  // a1 separates the decisions, a2 mixes them.
  const auto is = table({{0, 0, 0}, {0, 1, 0}, {1, 0, 1}, {1, 1, 1}});
  const auto bc = boundary_contributions(is);
  CHECK(bc[0] == 0.0);
  CHECK(bc[1] > 0.0);
}

TEST_CASE("rule text matches the golden files") {
  const auto is = golden_table();
  const auto rules = induce_rules(is, {}).rules;
  std::string text;
  for (const auto& r : rules) text += format_rule(r, is.condition_attrs, is.decision_attr) + "\n";
  CHECK(text == slurp(std::string(GRANULAR_TEST_DATA) + "/golden_rules.txt"));

  std::ostringstream out;
  write_rules(out, rules);
  CHECK(out.str() == slurp(std::string(GRANULAR_TEST_DATA) + "/golden_rules.dat"));

  std::istringstream in(out.str());
  const auto back = read_rules(in);
  REQUIRE(back.size() == rules.size());
  for (std::size_t i = 0; i < rules.size(); ++i) {
    CHECK(back[i].conditions == rules[i].conditions);
    CHECK(back[i].decision == rules[i].decision);
    CHECK(back[i].support == rules[i].support);
    CHECK(back[i].strength == rules[i].strength);
    CHECK(back[i].certainty == rules[i].certainty);
  }
  std::istringstream truncated("granular-rules 1\ncount 2\n0 1 0.5 1 0\n");
  CHECK_THROWS_AS(read_rules(truncated), ParseError);
}
