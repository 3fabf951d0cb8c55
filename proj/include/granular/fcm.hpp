#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "granular/dataset.hpp"

namespace gran {

struct FuzzyPartition {
  /// clusters x points; every column sums to one.
  Eigen::MatrixXd memberships;
  std::vector<Vector> prototypes;
  int clusters = 0;
  double fuzzifier = 2.0;
  double objective = 0.0;
  int iterations = 0;
};

struct FcmOptions {
  int clusters = 2;
  double fuzzifier = 2.0;
  double tol = 1e-6;
  int max_iter = 300;
  std::uint64_t seed = 0;
};

/// Called after every membership update with the current partition.
using FcmObserver = std::function<void(const FuzzyPartition&)>;

/// Alternating optimization from a seeded random column-stochastic start.
/// Stops when the objective changes by less than `tol` or after `max_iter`.
FuzzyPartition fcm_cluster(std::span<const Vector> data, const FcmOptions& options,
                           const FcmObserver& observer = {});

/// Same iteration from a caller-supplied membership matrix.
FuzzyPartition fcm_from(std::span<const Vector> data, Eigen::MatrixXd initial,
                        const FcmOptions& options, const FcmObserver& observer = {});

Eigen::MatrixXd random_memberships(int clusters, std::size_t points, std::uint64_t seed);

/// Membership-weighted means with weights u^m.
std::vector<Vector> fcm_prototypes(std::span<const Vector> data, const Eigen::MatrixXd& u, double m);

/// Inverse-distance memberships with exponent 2/(m-1). A point that coincides
/// with a prototype belongs fully to the first coincident one.
Eigen::MatrixXd fcm_memberships(std::span<const Vector> data, std::span<const Vector> prototypes,
                                double m);

double fcm_objective(std::span<const Vector> data, const Eigen::MatrixXd& u,
                     std::span<const Vector> prototypes, double m);

double squared_distance(std::span<const double> a, std::span<const double> b);

}  // namespace gran
