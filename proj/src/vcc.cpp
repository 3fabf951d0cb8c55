#include "granular/vcc.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <sstream>

#include "granular/error.hpp"
#include "granular/rng.hpp"
#include "granular/textio.hpp"

namespace gran {

namespace {

void check_aligned(const std::vector<SiteState>& sites) {
  if (sites.empty()) return;
  const int c = sites.front().partition.clusters;
  const auto dim = sites.front().n_inputs();
  for (const auto& s : sites) {
    if (s.partition.clusters != c || s.n_inputs() != dim) {
      throw ParameterError("sites disagree on cluster count or input dimension");
    }
    if (s.partition.memberships.cols() != static_cast<Eigen::Index>(s.inputs.size())) {
      throw ParameterError("site " + std::to_string(s.site_id) + " partition does not cover its data");
    }
  }
}

SiteState permute_clusters(SiteState s, const std::vector<int>& perm) {
  Eigen::MatrixXd u(s.partition.memberships.rows(), s.partition.memberships.cols());
  std::vector<Vector> protos(perm.size());
  std::vector<LinearRule> rules;
  for (std::size_t k = 0; k < perm.size(); ++k) {
    u.row(static_cast<Eigen::Index>(k)) = s.partition.memberships.row(perm[k]);
    protos[k] = s.partition.prototypes[static_cast<std::size_t>(perm[k])];
    if (!s.linear_rules.empty()) rules.push_back(s.linear_rules[static_cast<std::size_t>(perm[k])]);
  }
  s.partition.memberships = std::move(u);
  s.partition.prototypes = std::move(protos);
  s.linear_rules = std::move(rules);
  return s;
}

}  // namespace

SiteState make_site(int site_id, std::span<const Vector> joint_rows, const FcmOptions& options) {
  if (joint_rows.empty()) throw ParameterError("site has no data");
  SiteState s;
  s.site_id = site_id;
  for (const auto& r : joint_rows) {
    if (r.size() < 2) throw ParameterError("site rows need inputs and an output");
    s.inputs.emplace_back(r.begin(), r.end() - 1);
    s.outputs.push_back(r.back());
  }
  FcmOptions opts = options;
  opts.fuzzifier = kVccFuzzifier;
  s.partition = fcm_cluster(s.inputs, opts);
  return s;
}

SiteState make_site(int site_id, const CrispGranules& granules, const FcmOptions& options) {
  return make_site(site_id, std::span<const Vector>(granules.centers), options);
}

CollaborationMatrix init_beta(int p, std::uint64_t seed, double beta_max) {
  if (p < 2) throw ParameterError("collaboration needs at least 2 sites");
  if (!(beta_max >= 0.0)) throw ParameterError("beta_max must be >= 0");
  Rng rng(seed);
  CollaborationMatrix m{Eigen::MatrixXd::Zero(p, p)};
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      if (i != j) m.beta(i, j) = rng.uniform(0.0, beta_max);
    }
  }
  return m;
}

std::vector<SiteState> align_clusters(std::vector<SiteState> sites) {
  if (sites.size() < 2) return sites;
  check_aligned(sites);
  const auto& ref = sites.front().partition.prototypes;
  const auto c = ref.size();
  for (std::size_t s = 1; s < sites.size(); ++s) {
    const auto& other = sites[s].partition.prototypes;
    std::vector<int> perm(c, -1);
    std::vector<bool> used(c, false);
    for (std::size_t round = 0; round < c; ++round) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t bi = 0;
      std::size_t bj = 0;
      for (std::size_t i = 0; i < c; ++i) {
        if (perm[i] >= 0) continue;
        for (std::size_t j = 0; j < c; ++j) {
          if (used[j]) continue;
          const double d = squared_distance(ref[i], other[j]);
          if (d < best) {
            best = d;
            bi = i;
            bj = j;
          }
        }
      }
      perm[bi] = static_cast<int>(bj);
      used[bj] = true;
    }
    sites[s] = permute_clusters(std::move(sites[s]), perm);
  }
  return sites;
}

Eigen::MatrixXd induced_memberships(std::span<const Vector> data, std::span<const Vector> prototypes) {
  return fcm_memberships(data, prototypes, kVccFuzzifier);
}

double collaborative_objective(const SiteState& site, std::span<const Eigen::MatrixXd> induced,
                               std::span<const double> beta_row) {
  const auto& u = site.partition.memberships;
  double q = 0.0;
  for (Eigen::Index k = 0; k < u.rows(); ++k) {
    for (Eigen::Index t = 0; t < u.cols(); ++t) {
      const double d2 = squared_distance(site.inputs[static_cast<std::size_t>(t)],
                                         site.partition.prototypes[static_cast<std::size_t>(k)]);
      double w = u(k, t) * u(k, t);
      for (std::size_t j = 0; j < induced.size(); ++j) {
        const double diff = u(k, t) - induced[j](k, t);
        w += beta_row[j] * diff * diff;
      }
      q += w * d2;
    }
  }
  return q;
}

SiteState vcc_update_site(const SiteState& site, std::span<const Eigen::MatrixXd> induced,
                          std::span<const double> beta_row, int inner_iterations) {
  if (induced.size() != beta_row.size()) throw ParameterError("one beta per partner site expected");
  SiteState s = site;
  auto& p = s.partition;
  const auto c = p.memberships.rows();
  const auto n = p.memberships.cols();
  const auto dim = s.n_inputs();
  double beta_total = 0.0;
  for (double b : beta_row) beta_total += b;

  for (int it = 0; it < inner_iterations; ++it) {
    // Prototypes: weights u^2 + sum_j beta_j (u - f_j)^2.
    std::vector<Vector> protos(static_cast<std::size_t>(c), Vector(dim, 0.0));
    for (Eigen::Index k = 0; k < c; ++k) {
      double wsum = 0.0;
      auto& v = protos[static_cast<std::size_t>(k)];
      for (Eigen::Index t = 0; t < n; ++t) {
        const double ukt = p.memberships(k, t);
        double w = ukt * ukt;
        for (std::size_t j = 0; j < induced.size(); ++j) {
          const double diff = ukt - induced[j](k, t);
          w += beta_row[j] * diff * diff;
        }
        wsum += w;
        const auto& x = s.inputs[static_cast<std::size_t>(t)];
        for (std::size_t d = 0; d < dim; ++d) v[d] += w * x[d];
      }
      if (wsum > 0.0) {
        for (auto& x : v) x /= wsum;
      } else {
        v = p.prototypes[static_cast<std::size_t>(k)];
      }
    }
    p.prototypes = std::move(protos);

    // Memberships: (fcm term + sum_j beta_j f_j) / (1 + sum_j beta_j).
    Eigen::MatrixXd u = fcm_memberships(s.inputs, p.prototypes, kVccFuzzifier);
    if (beta_total > 0.0) {
      for (std::size_t j = 0; j < induced.size(); ++j) u += beta_row[j] * induced[j];
      u /= 1.0 + beta_total;
    }
    p.memberships = std::move(u);
    p.iterations += 1;
  }
  p.objective = collaborative_objective(s, induced, beta_row);
  return s;
}

std::vector<SiteState> vcc_iterate(std::vector<SiteState> sites, const CollaborationMatrix& beta,
                                   int sweeps, const VccOptions& options) {
  if (sweeps < 0) throw ParameterError("sweeps must be >= 0");
  const auto p = static_cast<Eigen::Index>(sites.size());
  if (beta.beta.rows() != p || beta.beta.cols() != p) {
    throw ParameterError("collaboration matrix shape does not match site count");
  }
  check_aligned(sites);
  if (options.inner_iterations < 1) throw ParameterError("inner iterations must be >= 1");

  for (int sweep = 0; sweep < sweeps; ++sweep) {
    if (options.align) sites = align_clusters(std::move(sites));
    std::vector<std::vector<Vector>> previous;
    previous.reserve(sites.size());
    for (const auto& s : sites) previous.push_back(s.partition.prototypes);

    std::vector<SiteState> next;
    next.reserve(sites.size());
    for (Eigen::Index i = 0; i < p; ++i) {
      const auto& site = sites[static_cast<std::size_t>(i)];
      std::vector<Eigen::MatrixXd> induced;
      std::vector<double> row;
      for (Eigen::Index j = 0; j < p; ++j) {
        if (j == i) continue;
        induced.push_back(induced_memberships(site.inputs, previous[static_cast<std::size_t>(j)]));
        row.push_back(beta.beta(i, j));
      }
      next.push_back(vcc_update_site(site, induced, row, options.inner_iterations));
    }
    sites = std::move(next);
  }
  return sites;
}

LinearRuleFit extract_linear_rules(const SiteState& site) {
  const auto& u = site.partition.memberships;
  const auto n = site.inputs.size();
  const auto dim = site.n_inputs();
  LinearRuleFit fit;
  for (Eigen::Index k = 0; k < u.rows(); ++k) {
    Eigen::MatrixXd a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim + 1));
    Eigen::VectorXd b(static_cast<Eigen::Index>(n));
    for (std::size_t t = 0; t < n; ++t) {
      const auto row = static_cast<Eigen::Index>(t);
      const double ukt = u(k, row);
      const double sw = std::abs(ukt);  // sqrt(u^2)
      a(row, 0) = sw;
      for (std::size_t d = 0; d < dim; ++d) a(row, static_cast<Eigen::Index>(d + 1)) = sw * site.inputs[t][d];
      b(row) = sw * site.outputs[t];
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
    const Eigen::VectorXd theta = cod.solve(b);
    if (cod.rank() < static_cast<Eigen::Index>(dim + 1)) fit.rank_deficient = true;
    LinearRule rule;
    rule.prototype = site.partition.prototypes[static_cast<std::size_t>(k)];
    rule.coeffs.assign(theta.data(), theta.data() + theta.size());
    fit.rules.push_back(std::move(rule));
  }
  return fit;
}

double site_predict(const SiteState& site, std::span<const double> x) {
  if (site.linear_rules.empty()) throw ParameterError("site has no linear rules");
  if (x.size() != site.n_inputs()) throw ParameterError("input dimension mismatch");
  std::vector<Vector> protos;
  for (const auto& r : site.linear_rules) protos.push_back(r.prototype);
  const Vector point(x.begin(), x.end());
  const auto u = fcm_memberships(std::span<const Vector>(&point, 1), protos, kVccFuzzifier);
  double y = 0.0;
  for (std::size_t k = 0; k < site.linear_rules.size(); ++k) {
    const auto& a = site.linear_rules[k].coeffs;
    double f = a[0];
    for (std::size_t d = 0; d < x.size(); ++d) f += a[d + 1] * x[d];
    y += u(static_cast<Eigen::Index>(k), 0) * f;
  }
  return y;
}

double site_error(const SiteState& site, const Dataset& test) {
  if (test.empty()) throw ParameterError("site error on an empty test set");
  double s = 0.0;
  for (const auto& row : test.rows) {
    const double e = row.back() - site_predict(site, std::span<const double>(row.data(), row.size() - 1));
    s += e * e;
  }
  return std::sqrt(s / static_cast<double>(test.size())) * output_scale(test);
}

bool converged(std::span<const double> deltas, double xi) {
  if (!(xi > 0.0)) throw ParameterError("xi must be > 0");
  for (double d : deltas) {
    if (!(std::abs(d) <= xi)) return false;
  }
  return true;
}

std::vector<std::string> format_linear_rules(const SiteState& site,
                                             const std::vector<std::string>& input_names,
                                             const std::string& output_name) {
  auto name = [&](std::size_t i) {
    return i < input_names.size() ? input_names[i] : "x" + std::to_string(i + 1);
  };
  std::vector<std::string> lines;
  for (const auto& r : site.linear_rules) {
    std::ostringstream os;
    os << "IF x near (";
    for (std::size_t d = 0; d < r.prototype.size(); ++d) {
      os << (d ? ", " : "") << textio::fmt_sig(r.prototype[d], 6);
    }
    os << ") THEN " << output_name << " = " << textio::fmt_sig(r.coeffs[0], 6);
    for (std::size_t d = 1; d < r.coeffs.size(); ++d) {
      const double a = r.coeffs[d];
      os << (std::signbit(a) ? " - " : " + ") << textio::fmt_sig(std::abs(a), 6) << '*' << name(d - 1);
    }
    lines.push_back(os.str());
  }
  return lines;
}

}  // namespace gran
