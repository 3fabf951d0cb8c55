#include "granular/nfis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "granular/error.hpp"
#include "granular/textio.hpp"

namespace gran {

namespace {

double quantile(const Vector& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

void check_rows(const TskRuleBase& rb, const TrainingSet& data) {
  const auto w = static_cast<std::size_t>(rb.n_inputs) + 1;
  for (const auto& r : data.rows) {
    if (r.size() != w) {
      throw ParameterError("training row has " + std::to_string(r.size()) + " values, expected " +
                           std::to_string(w));
    }
  }
  if (!data.weights.empty() && data.weights.size() != data.rows.size()) {
    throw ParameterError("weight count does not match row count");
  }
}

double weight_of(const TrainingSet& data, std::size_t k) {
  return data.weights.empty() ? 1.0 : data.weights[k];
}

double rule_output(const TskRule& rule, std::span<const double> x) {
  double y = rule.coeffs[0];
  for (std::size_t i = 0; i < x.size(); ++i) y += rule.coeffs[i + 1] * x[i];
  return y;
}

std::vector<std::vector<int>> premise_grid(const std::vector<int>& mfs_per_input) {
  std::vector<std::vector<int>> out;
  std::vector<int> digits(mfs_per_input.size(), 0);
  for (;;) {
    out.push_back(digits);
    int i = static_cast<int>(digits.size()) - 1;
    while (i >= 0 && ++digits[static_cast<std::size_t>(i)] == mfs_per_input[static_cast<std::size_t>(i)]) {
      digits[static_cast<std::size_t>(i)] = 0;
      --i;
    }
    if (i < 0) break;
  }
  return out;
}

// Offset of input i's first MF in the flattened premise parameter vector.
std::vector<std::size_t> mf_offsets(const TskRuleBase& rb) {
  std::vector<std::size_t> off(rb.mfs.size(), 0);
  std::size_t acc = 0;
  for (std::size_t i = 0; i < rb.mfs.size(); ++i) {
    off[i] = acc;
    acc += rb.mfs[i].size();
  }
  return off;
}

}  // namespace

double GaussianMf::operator()(double x) const {
  const double z = (x - center) / width;
  return std::exp(-0.5 * z * z);
}

std::vector<int> TskRuleBase::granularity() const {
  std::vector<int> g;
  for (const auto& m : mfs) g.push_back(static_cast<int>(m.size()));
  return g;
}

std::size_t TskRuleBase::premise_parameter_count() const {
  std::size_t n = 0;
  for (const auto& m : mfs) n += 2 * m.size();
  return n;
}

int GranularityLevel::rule_count() const {
  long long p = 1;
  for (int m : mfs_per_input) {
    p *= m;
    if (p > std::numeric_limits<int>::max()) return std::numeric_limits<int>::max();
  }
  return static_cast<int>(p);
}

TskRuleBase init_tsk(std::span<const Vector> rows, const GranularityLevel& level) {
  if (rows.empty()) throw ParameterError("rule base initialization needs at least one row");
  const auto n = rows.front().size() - 1;
  if (n < 1) throw ParameterError("rows need at least one input and the target");
  if (level.mfs_per_input.size() != n) {
    throw ParameterError("granularity lists " + std::to_string(level.mfs_per_input.size()) +
                         " inputs, data has " + std::to_string(n));
  }
  for (int m : level.mfs_per_input) {
    if (m < 1) throw ParameterError("every input needs at least one MF");
  }
  if (level.rule_count() > level.max_rules) {
    throw ParameterError("granularity yields " + std::to_string(level.rule_count()) +
                         " rules, above max_rules " + std::to_string(level.max_rules));
  }

  TskRuleBase rb;
  rb.n_inputs = static_cast<int>(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vector col;
    col.reserve(rows.size());
    for (const auto& r : rows) {
      if (r.size() != n + 1) throw ParameterError("ragged training rows");
      col.push_back(r[i]);
    }
    std::sort(col.begin(), col.end());
    const double spread = col.back() - col.front();
    const int k = level.mfs_per_input[i];
    std::vector<GaussianMf> mfs(static_cast<std::size_t>(k));
    if (k == 1) {
      mfs[0] = {quantile(col, 0.5), spread > 0.0 ? spread / 2.0 : 1.0};
    } else {
      if (!(spread > 0.0)) {
        throw ParameterError("input " + std::to_string(i) + " has zero spread; use 1 MF instead of " +
                             std::to_string(k));
      }
      for (int j = 0; j < k; ++j) {
        mfs[static_cast<std::size_t>(j)].center = quantile(col, static_cast<double>(j) / (k - 1));
      }
      // Coinciding quantiles would give a vanishing width; a quarter of the
      // uniform spacing is the floor.
      const double floor = std::max(kWidthFloor, 0.25 * spread / (k - 1));
      for (int j = 0; j < k; ++j) {
        double gaps = 0.0;
        int count = 0;
        if (j > 0) {
          gaps += mfs[j].center - mfs[j - 1].center;
          ++count;
        }
        if (j + 1 < k) {
          gaps += mfs[j + 1].center - mfs[j].center;
          ++count;
        }
        mfs[static_cast<std::size_t>(j)].width = std::max(0.5 * gaps / count, floor);
      }
    }
    rb.mfs.push_back(std::move(mfs));
  }
  for (auto& premise : premise_grid(level.mfs_per_input)) {
    rb.rules.push_back({std::move(premise), Vector(n + 1, 0.0)});
  }
  return rb;
}

TskRuleBase init_tsk(const CrispGranules& granules, const GranularityLevel& level) {
  return init_tsk(std::span<const Vector>(granules.centers), level);
}

Vector firing_strengths(const TskRuleBase& rb, std::span<const double> x) {
  if (static_cast<int>(x.size()) < rb.n_inputs) throw ParameterError("input vector too short");
  // Log domain keeps the normalized strengths exact far from every centre.
  std::vector<Vector> log_mu(rb.mfs.size());
  for (std::size_t i = 0; i < rb.mfs.size(); ++i) {
    for (const auto& mf : rb.mfs[i]) {
      const double z = (x[i] - mf.center) / mf.width;
      log_mu[i].push_back(-0.5 * z * z);
    }
  }
  Vector w(rb.rules.size());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < rb.rules.size(); ++r) {
    double s = 0.0;
    for (std::size_t i = 0; i < log_mu.size(); ++i) {
      s += log_mu[i][static_cast<std::size_t>(rb.rules[r].premise[i])];
    }
    w[r] = s;
    top = std::max(top, s);
  }
  double total = 0.0;
  for (auto& v : w) {
    v = std::exp(v - top);
    total += v;
  }
  total = std::max(total, kDenominatorFloor);
  for (auto& v : w) v /= total;
  return w;
}

double infer(const TskRuleBase& rb, std::span<const double> x) {
  const auto w = firing_strengths(rb, x);
  const auto xs = x.first(static_cast<std::size_t>(rb.n_inputs));
  double y = 0.0;
  for (std::size_t r = 0; r < rb.rules.size(); ++r) y += w[r] * rule_output(rb.rules[r], xs);
  return y;
}

double sse(const TskRuleBase& rb, const TrainingSet& data) {
  check_rows(rb, data);
  double s = 0.0;
  for (std::size_t k = 0; k < data.rows.size(); ++k) {
    const auto& r = data.rows[k];
    const double e = r.back() - infer(rb, r);
    s += weight_of(data, k) * e * e;
  }
  return s;
}

double mse(const TskRuleBase& rb, const TrainingSet& data) {
  if (data.rows.empty()) throw ParameterError("error of an empty training set");
  double wsum = 0.0;
  for (std::size_t k = 0; k < data.rows.size(); ++k) wsum += weight_of(data, k);
  return sse(rb, data) / wsum;
}

double rmse(const TskRuleBase& rb, const TrainingSet& data) { return std::sqrt(mse(rb, data)); }

LseFit fit_consequents_lse(const TskRuleBase& rb, const TrainingSet& data) {
  check_rows(rb, data);
  if (data.rows.empty()) throw ParameterError("least squares needs data");
  const auto n = static_cast<std::size_t>(rb.n_inputs);
  const auto per_rule = n + 1;
  const auto cols = rb.rules.size() * per_rule;
  Eigen::MatrixXd a(static_cast<Eigen::Index>(data.rows.size()), static_cast<Eigen::Index>(cols));
  Eigen::VectorXd b(static_cast<Eigen::Index>(data.rows.size()));
  for (std::size_t k = 0; k < data.rows.size(); ++k) {
    const auto& row = data.rows[k];
    const double sw = std::sqrt(weight_of(data, k));
    const auto w = firing_strengths(rb, row);
    const auto rk = static_cast<Eigen::Index>(k);
    for (std::size_t r = 0; r < rb.rules.size(); ++r) {
      const auto base = static_cast<Eigen::Index>(r * per_rule);
      a(rk, base) = sw * w[r];
      for (std::size_t i = 0; i < n; ++i) a(rk, base + static_cast<Eigen::Index>(i + 1)) = sw * w[r] * row[i];
    }
    b(rk) = sw * row.back();
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
  const Eigen::VectorXd theta = cod.solve(b);

  LseFit fit;
  fit.base = rb;
  fit.rank = static_cast<int>(cod.rank());
  fit.rank_deficient = static_cast<std::size_t>(fit.rank) < cols;
  for (std::size_t r = 0; r < rb.rules.size(); ++r) {
    for (std::size_t j = 0; j < per_rule; ++j) {
      const double v = theta(static_cast<Eigen::Index>(r * per_rule + j));
      if (!std::isfinite(v)) throw NumericError("non-finite consequent coefficient");
      fit.base.rules[r].coeffs[j] = v;
    }
  }
  return fit;
}

Vector premise_parameters(const TskRuleBase& rb) {
  Vector p;
  p.reserve(rb.premise_parameter_count());
  for (const auto& input : rb.mfs) {
    for (const auto& mf : input) {
      p.push_back(mf.center);
      p.push_back(mf.width);
    }
  }
  return p;
}

TskRuleBase with_premise_parameters(const TskRuleBase& rb, std::span<const double> params) {
  if (params.size() != rb.premise_parameter_count()) {
    throw ParameterError("premise parameter count mismatch");
  }
  TskRuleBase out = rb;
  std::size_t k = 0;
  for (auto& input : out.mfs) {
    for (auto& mf : input) {
      mf.center = params[k++];
      mf.width = params[k++];
    }
  }
  return out;
}

Vector premise_gradient(const TskRuleBase& rb, const TrainingSet& data) {
  check_rows(rb, data);
  if (data.rows.empty()) throw ParameterError("gradient of an empty training set");
  const auto offsets = mf_offsets(rb);
  Vector grad(rb.premise_parameter_count(), 0.0);
  double wsum = 0.0;
  const auto n = static_cast<std::size_t>(rb.n_inputs);

  for (std::size_t k = 0; k < data.rows.size(); ++k) {
    const auto& row = data.rows[k];
    const std::span<const double> x(row.data(), n);
    const double omega = weight_of(data, k);
    wsum += omega;
    const auto w = firing_strengths(rb, x);
    Vector f(rb.rules.size());
    double y_hat = 0.0;
    for (std::size_t r = 0; r < rb.rules.size(); ++r) {
      f[r] = rule_output(rb.rules[r], x);
      y_hat += w[r] * f[r];
    }
    // dE/dy_hat for E = omega * (y - y_hat)^2
    const double outer = -2.0 * omega * (row.back() - y_hat);
    for (std::size_t r = 0; r < rb.rules.size(); ++r) {
      const double dy_dlogw = w[r] * (f[r] - y_hat);
      if (dy_dlogw == 0.0) continue;
      for (std::size_t i = 0; i < n; ++i) {
        const auto j = static_cast<std::size_t>(rb.rules[r].premise[i]);
        const auto& mf = rb.mfs[i][j];
        const double d = x[i] - mf.center;
        const double s2 = mf.width * mf.width;
        const auto p = 2 * (offsets[i] + j);
        grad[p] += outer * dy_dlogw * d / s2;
        grad[p + 1] += outer * dy_dlogw * d * d / (s2 * mf.width);
      }
    }
  }
  for (auto& g : grad) g /= wsum;
  return grad;
}

TskRuleBase fit_premises_gd(const TskRuleBase& rb, const TrainingSet& data, double lr, int steps) {
  if (!(lr > 0.0)) throw ParameterError("gradient learning rate must be > 0");
  if (steps < 1) throw ParameterError("gradient steps must be >= 1");
  TskRuleBase cur = rb;
  for (int s = 0; s < steps; ++s) {
    const auto g = premise_gradient(cur, data);
    auto p = premise_parameters(cur);
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (!std::isfinite(g[k])) throw NumericError("non-finite premise gradient");
      p[k] -= lr * g[k];
      if (k % 2 == 1) p[k] = std::max(p[k], kWidthFloor);
    }
    cur = with_premise_parameters(cur, p);
  }
  return cur;
}

HybridFit train_hybrid(const TskRuleBase& rb, const TrainingSet& data, int epochs, double lr,
                       int gd_steps) {
  if (epochs < 1) throw ParameterError("epochs must be >= 1");
  HybridFit out;
  out.base = rb;
  for (int e = 0; e < epochs; ++e) {
    auto lse = fit_consequents_lse(out.base, data);
    out.rank_deficient = lse.rank_deficient;
    out.base = fit_premises_gd(lse.base, data, lr, gd_steps);
    out.rmse.push_back(rmse(out.base, data));
  }
  return out;
}

std::vector<std::string> extract_fuzzy_rules(const TskRuleBase& rb,
                                             const std::vector<std::string>& input_names,
                                             const std::string& output_name) {
  auto name = [&](std::size_t i) {
    return i < input_names.size() ? input_names[i] : "x" + std::to_string(i + 1);
  };
  std::vector<std::string> lines;
  for (const auto& rule : rb.rules) {
    std::ostringstream os;
    os << "IF ";
    for (std::size_t i = 0; i < rule.premise.size(); ++i) {
      const auto& mf = rb.mfs[i][static_cast<std::size_t>(rule.premise[i])];
      if (i) os << " AND ";
      os << name(i) << " is G(" << textio::fmt_sig(mf.center, 6) << ", "
         << textio::fmt_sig(mf.width, 6) << ")";
    }
    os << " THEN " << output_name << " = " << textio::fmt_sig(rule.coeffs[0], 6);
    for (std::size_t i = 0; i + 1 < rule.coeffs.size(); ++i) {
      const double a = rule.coeffs[i + 1];
      os << (std::signbit(a) ? " - " : " + ") << textio::fmt_sig(std::abs(a), 6) << '*' << name(i);
    }
    lines.push_back(os.str());
  }
  return lines;
}

ParsedFuzzyRule parse_fuzzy_rule(const std::string& line) {
  auto fail = [&](const std::string& why) -> ParseError {
    return ParseError(1, "fuzzy rule: " + why + " in '" + line + "'");
  };
  const auto then = line.find(" THEN ");
  if (line.rfind("IF ", 0) != 0 || then == std::string::npos) throw fail("missing IF/THEN");

  ParsedFuzzyRule out;
  std::string premise = line.substr(3, then - 3);
  std::size_t pos = 0;
  for (;;) {
    const auto next = premise.find(" AND ", pos);
    const auto clause = premise.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    const auto is = clause.find(" is G(");
    const auto comma = clause.find(", ", is);
    const auto close = clause.rfind(')');
    if (is == std::string::npos || comma == std::string::npos || close == std::string::npos) {
      throw fail("bad premise clause");
    }
    out.inputs.push_back(clause.substr(0, is));
    out.centers.push_back(std::stod(clause.substr(is + 6, comma - is - 6)));
    out.widths.push_back(std::stod(clause.substr(comma + 2, close - comma - 2)));
    if (next == std::string::npos) break;
    pos = next + 5;
  }

  std::istringstream rhs(line.substr(then + 6));
  std::string tok;
  rhs >> tok;  // output name
  rhs >> tok;
  if (tok != "=") throw fail("missing '='");
  rhs >> tok;
  out.coeffs.push_back(std::stod(tok));
  std::string sign;
  while (rhs >> sign) {
    if (!(rhs >> tok)) throw fail("dangling sign");
    const auto star = tok.find('*');
    if (star == std::string::npos) throw fail("term without '*'");
    const double mag = std::stod(tok.substr(0, star));
    out.coeffs.push_back(sign == "-" ? -mag : mag);
  }
  if (out.coeffs.size() != out.inputs.size() + 1) throw fail("coefficient count mismatch");
  return out;
}

void write_tsk(std::ostream& out, const TskRuleBase& rb) {
  using textio::fmt;
  out << "granular-tsk 1\n";
  out << "inputs " << rb.n_inputs << '\n';
  for (const auto& input : rb.mfs) {
    out << "mfs " << input.size();
    for (const auto& mf : input) out << ' ' << fmt(mf.center) << ' ' << fmt(mf.width);
    out << '\n';
  }
  out << "rules " << rb.rules.size() << '\n';
  for (const auto& rule : rb.rules) {
    for (std::size_t i = 0; i < rule.premise.size(); ++i) out << (i ? " " : "") << rule.premise[i];
    for (double c : rule.coeffs) out << ' ' << fmt(c);
    out << '\n';
  }
  out << "end-tsk\n";
}

TskRuleBase read_tsk(std::istream& in) {
  using namespace textio;
  expect(in, "granular-tsk");
  if (read_int(in) != 1) throw ParseError(0, "unsupported rule base format version");
  TskRuleBase rb;
  expect(in, "inputs");
  rb.n_inputs = static_cast<int>(read_int(in));
  if (rb.n_inputs < 1) throw ParseError(0, "rule base needs inputs");
  const auto n = static_cast<std::size_t>(rb.n_inputs);
  for (std::size_t i = 0; i < n; ++i) {
    expect(in, "mfs");
    const auto k = read_int(in);
    if (k < 1) throw ParseError(0, "input without MFs");
    std::vector<GaussianMf> mfs(static_cast<std::size_t>(k));
    for (auto& mf : mfs) {
      mf.center = read_double(in);
      mf.width = read_double(in);
      if (!(mf.width > 0.0)) throw ParseError(0, "non-positive MF width");
    }
    rb.mfs.push_back(std::move(mfs));
  }
  expect(in, "rules");
  const auto count = read_int(in);
  const auto expected = premise_grid(rb.granularity());
  if (count != static_cast<long long>(expected.size())) throw ParseError(0, "rule count mismatch");
  for (long long r = 0; r < count; ++r) {
    TskRule rule;
    for (std::size_t i = 0; i < n; ++i) rule.premise.push_back(static_cast<int>(read_int(in)));
    if (rule.premise != expected[static_cast<std::size_t>(r)]) throw ParseError(0, "rule out of grid order");
    for (std::size_t j = 0; j <= n; ++j) rule.coeffs.push_back(read_double(in));
    rb.rules.push_back(std::move(rule));
  }
  expect(in, "end-tsk");
  return rb;
}

}  // namespace gran
