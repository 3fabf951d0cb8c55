#include "granular/fcm.hpp"

#include <cmath>

#include "granular/error.hpp"
#include "granular/rng.hpp"

namespace gran {

namespace {

// Plain product for the default fuzzifier keeps FCM and the collaborative
// update bit-identical when collaboration is switched off.
double membership_power(double u, double m) { return m == 2.0 ? u * u : std::pow(u, m); }

}  // namespace

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

Eigen::MatrixXd random_memberships(int clusters, std::size_t points, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd u(clusters, static_cast<Eigen::Index>(points));
  for (Eigen::Index k = 0; k < u.cols(); ++k) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      // Bounded away from zero so every cluster starts populated.
      u(i, k) = 0.01 + rng.uniform();
      total += u(i, k);
    }
    u.col(k) /= total;
  }
  return u;
}

std::vector<Vector> fcm_prototypes(std::span<const Vector> data, const Eigen::MatrixXd& u, double m) {
  const auto dim = data.empty() ? 0 : data.front().size();
  std::vector<Vector> protos(static_cast<std::size_t>(u.rows()), Vector(dim, 0.0));
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    double wsum = 0.0;
    auto& v = protos[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < data.size(); ++k) {
      const double w = membership_power(u(i, static_cast<Eigen::Index>(k)), m);
      wsum += w;
      for (std::size_t d = 0; d < dim; ++d) v[d] += w * data[k][d];
    }
    if (wsum > 0.0) {
      for (auto& x : v) x /= wsum;
    }
  }
  return protos;
}

Eigen::MatrixXd fcm_memberships(std::span<const Vector> data, std::span<const Vector> prototypes,
                                double m) {
  const auto c = static_cast<Eigen::Index>(prototypes.size());
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(c, static_cast<Eigen::Index>(data.size()));
  const double expo = 1.0 / (m - 1.0);
  std::vector<double> d2(static_cast<std::size_t>(c));
  for (std::size_t k = 0; k < data.size(); ++k) {
    const auto col = static_cast<Eigen::Index>(k);
    Eigen::Index coincident = -1;
    for (Eigen::Index i = 0; i < c; ++i) {
      d2[static_cast<std::size_t>(i)] = squared_distance(data[k], prototypes[static_cast<std::size_t>(i)]);
      if (coincident < 0 && d2[static_cast<std::size_t>(i)] == 0.0) coincident = i;
    }
    if (coincident >= 0) {
      u(coincident, col) = 1.0;
      continue;
    }
    for (Eigen::Index i = 0; i < c; ++i) {
      double s = 0.0;
      for (Eigen::Index j = 0; j < c; ++j) {
        s += std::pow(d2[static_cast<std::size_t>(i)] / d2[static_cast<std::size_t>(j)], expo);
      }
      u(i, col) = 1.0 / s;
    }
  }
  return u;
}

double fcm_objective(std::span<const Vector> data, const Eigen::MatrixXd& u,
                     std::span<const Vector> prototypes, double m) {
  double j = 0.0;
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    for (std::size_t k = 0; k < data.size(); ++k) {
      j += membership_power(u(i, static_cast<Eigen::Index>(k)), m) *
           squared_distance(data[k], prototypes[static_cast<std::size_t>(i)]);
    }
  }
  return j;
}

FuzzyPartition fcm_from(std::span<const Vector> data, Eigen::MatrixXd initial,
                        const FcmOptions& options, const FcmObserver& observer) {
  if (options.clusters < 1) throw ParameterError("cluster count must be >= 1");
  if (!(options.fuzzifier > 1.0)) throw ParameterError("fuzzifier must be > 1");
  if (options.max_iter < 1) throw ParameterError("max_iter must be >= 1");
  if (data.size() < static_cast<std::size_t>(options.clusters)) {
    throw ParameterError("fewer points (" + std::to_string(data.size()) + ") than clusters (" +
                         std::to_string(options.clusters) + ")");
  }
  if (initial.rows() != options.clusters || initial.cols() != static_cast<Eigen::Index>(data.size())) {
    throw ParameterError("initial membership matrix has the wrong shape");
  }

  FuzzyPartition p;
  p.clusters = options.clusters;
  p.fuzzifier = options.fuzzifier;
  p.memberships = std::move(initial);
  double previous = 0.0;
  for (int it = 1; it <= options.max_iter; ++it) {
    p.prototypes = fcm_prototypes(data, p.memberships, options.fuzzifier);
    p.memberships = fcm_memberships(data, p.prototypes, options.fuzzifier);
    p.objective = fcm_objective(data, p.memberships, p.prototypes, options.fuzzifier);
    p.iterations = it;
    if (observer) observer(p);
    if (it > 1 && std::abs(previous - p.objective) < options.tol) break;
    previous = p.objective;
  }
  return p;
}

FuzzyPartition fcm_cluster(std::span<const Vector> data, const FcmOptions& options,
                           const FcmObserver& observer) {
  if (options.clusters < 1) throw ParameterError("cluster count must be >= 1");
  return fcm_from(data, random_memberships(options.clusters, data.size(), options.seed), options,
                  observer);
}

}  // namespace gran
