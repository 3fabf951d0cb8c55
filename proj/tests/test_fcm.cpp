#include <doctest.h>

#include <cmath>

#include "granular/error.hpp"
#include "granular/fcm.hpp"
#include "granular/rng.hpp"

using namespace gran;

namespace {

std::vector<Vector> blobs(Rng& rng, int per_blob) {
  std::vector<Vector> pts;
  for (int i = 0; i < per_blob; ++i) pts.push_back({rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1)});
  for (int i = 0; i < per_blob; ++i) pts.push_back({10 + rng.uniform(-0.1, 0.1), 10 + rng.uniform(-0.1, 0.1)});
  return pts;
}

void check_stochastic(const Eigen::MatrixXd& u) {
  for (Eigen::Index k = 0; k < u.cols(); ++k) {
    CHECK(std::abs(u.col(k).sum() - 1.0) < 1e-9);
    CHECK(u.col(k).minCoeff() >= 0.0);
    CHECK(u.col(k).maxCoeff() <= 1.0 + 1e-12);
  }
}

}  // namespace

TEST_CASE("one cluster is the centroid") {
  const std::vector<Vector> pts = {{0, 0}, {2, 0}, {1, 3}};
  FcmOptions o;
  o.clusters = 1;
  const auto p = fcm_cluster(pts, o);
  for (Eigen::Index k = 0; k < 3; ++k) CHECK(p.memberships(0, k) == 1.0);
  CHECK(p.prototypes[0][0] == doctest::Approx(1.0));
  CHECK(p.prototypes[0][1] == doctest::Approx(1.0));
}

TEST_CASE("two distant blobs separate") {
  Rng rng(3);
  const auto pts = blobs(rng, 20);
  FcmOptions o;
  o.seed = 9;
  const auto p = fcm_cluster(pts, o);
  const Eigen::Index a = p.memberships(0, 0) > 0.5 ? 0 : 1;
  for (Eigen::Index k = 0; k < 20; ++k) CHECK(p.memberships(a, k) > 0.95);
  for (Eigen::Index k = 20; k < 40; ++k) CHECK(p.memberships(1 - a, k) > 0.95);
}

TEST_CASE("a point on a prototype belongs to it fully") {
  const std::vector<Vector> pts = {{0.0}, {1.0}, {4.0}};
  const std::vector<Vector> protos = {{1.0}, {4.0}};
  const auto u = fcm_memberships(pts, protos, 2.0);
  CHECK(u(0, 1) == 1.0);
  CHECK(u(1, 1) == 0.0);
  CHECK(u(1, 2) == 1.0);
  CHECK(u(0, 2) == 0.0);
  // Equidistant-ratio oracle for the remaining point: d^2 = 1 and 16.
  CHECK(u(0, 0) == doctest::Approx(16.0 / 17.0));
}

TEST_CASE("memberships stay column-stochastic and the objective never rises") {
  Rng rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Vector> pts;
    for (int i = 0; i < 40; ++i) pts.push_back({rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 1)});
    FcmOptions o;
    o.clusters = 2 + trial % 4;
    o.fuzzifier = trial % 2 ? 2.0 : 1.7;
    o.seed = static_cast<std::uint64_t>(trial);
    o.tol = 0.0;
    o.max_iter = 60;
    double last = 1e300;
    int steps = 0;
    const auto p = fcm_cluster(pts, o, [&](const FuzzyPartition& cur) {
      check_stochastic(cur.memberships);
      CHECK(cur.objective <= last * (1.0 + 1e-12));
      last = cur.objective;
      ++steps;
    });
    CHECK(steps == 60);
    CHECK(p.objective == last);
    for (const auto& v : p.prototypes) {
      for (double x : v) CHECK(std::isfinite(x));
    }
  }
}

TEST_CASE("relabeling clusters leaves the objective unchanged") {
  Rng rng(2);
  std::vector<Vector> pts;
  for (int i = 0; i < 30; ++i) pts.push_back({rng.uniform(0, 1), rng.uniform(0, 1)});
  FcmOptions o;
  o.clusters = 3;
  const auto p = fcm_cluster(pts, o);
  Eigen::MatrixXd u(3, p.memberships.cols());
  u.row(0) = p.memberships.row(2);
  u.row(1) = p.memberships.row(0);
  u.row(2) = p.memberships.row(1);
  const std::vector<Vector> protos = {p.prototypes[2], p.prototypes[0], p.prototypes[1]};
  CHECK(fcm_objective(pts, u, protos, 2.0) == doctest::Approx(p.objective).epsilon(1e-12));
}

TEST_CASE("seeded starts are reproducible") {
  const auto a = random_memberships(3, 10, 5);
  const auto b = random_memberships(3, 10, 5);
  CHECK(a == b);
  check_stochastic(a);
  CHECK(a != random_memberships(3, 10, 6));
}

TEST_CASE("fcm parameter errors") {
  const std::vector<Vector> pts = {{0.0}, {1.0}};
  FcmOptions o;
  o.clusters = 3;
  CHECK_THROWS_AS(fcm_cluster(pts, o), ParameterError);
  o.clusters = 0;
  CHECK_THROWS_AS(fcm_cluster(pts, o), ParameterError);
  o.clusters = 2;
  o.fuzzifier = 1.0;
  CHECK_THROWS_AS(fcm_cluster(pts, o), ParameterError);
}
