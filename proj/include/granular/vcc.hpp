#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "granular/dataset.hpp"
#include "granular/fcm.hpp"
#include "granular/som.hpp"

namespace gran {

/// Per-cluster local model: y = coeffs[0] + coeffs[1..] . x near `prototype`.
struct LinearRule {
  Vector prototype;
  Vector coeffs;
};

/// One collaborating site. Clustering runs on the input coordinates of the
/// site's granules; outputs feed the local linear models.
struct SiteState {
  int site_id = 0;
  std::vector<Vector> inputs;
  Vector outputs;
  FuzzyPartition partition;
  std::vector<LinearRule> linear_rules;
  double delta_eps = 0.0;
  bool rank_deficient = false;

  std::size_t n_inputs() const noexcept { return inputs.empty() ? 0 : inputs.front().size(); }
};

/// Collaboration intensities; zero diagonal, entries in [0, beta_max].
struct CollaborationMatrix {
  Eigen::MatrixXd beta;
};

inline constexpr double kVccFuzzifier = 2.0;

/// Builds a site from its granule centres (inputs followed by output) and
/// clusters it with FCM at m = 2.
SiteState make_site(int site_id, const CrispGranules& granules, const FcmOptions& options);
SiteState make_site(int site_id, std::span<const Vector> joint_rows, const FcmOptions& options);

CollaborationMatrix init_beta(int p, std::uint64_t seed, double beta_max);

/// Relabels the clusters of sites 1..p-1 to best match site 0 by greedy
/// minimum prototype distance.
std::vector<SiteState> align_clusters(std::vector<SiteState> sites);

/// Memberships that `prototypes` induce on `data` (m = 2).
Eigen::MatrixXd induced_memberships(std::span<const Vector> data, std::span<const Vector> prototypes);

/// Collaborative objective of site i with the other sites' prototypes held
/// fixed (their induced memberships on site i's data).
double collaborative_objective(const SiteState& site, std::span<const Eigen::MatrixXd> induced,
                               std::span<const double> beta_row);

struct VccOptions {
  int inner_iterations = 1;
  bool align = true;
};

/// Jacobi sweeps: every site updates against the other sites' prototypes
/// from the previous sweep, so results do not depend on site order.
std::vector<SiteState> vcc_iterate(std::vector<SiteState> sites, const CollaborationMatrix& beta,
                                   int sweeps, const VccOptions& options = {});

/// Single site update against fixed induced memberships; exposed for tests.
SiteState vcc_update_site(const SiteState& site, std::span<const Eigen::MatrixXd> induced,
                          std::span<const double> beta_row, int inner_iterations);

struct LinearRuleFit {
  std::vector<LinearRule> rules;
  bool rank_deficient = false;
};

/// Weighted least squares per cluster with weights u^2 over the site's data.
LinearRuleFit extract_linear_rules(const SiteState& site);

/// Fuzzy-weighted piecewise-linear prediction for one input vector.
double site_predict(const SiteState& site, std::span<const double> x);

/// Test RMSE in raw output units (uses the test set's normalization).
double site_error(const SiteState& site, const Dataset& test);

bool converged(std::span<const double> deltas, double xi);

std::vector<std::string> format_linear_rules(const SiteState& site,
                                             const std::vector<std::string>& input_names,
                                             const std::string& output_name);

}  // namespace gran
