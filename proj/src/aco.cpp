#include "granular/aco.hpp"

#include <algorithm>
#include <cmath>

#include "granular/error.hpp"

namespace gran {

void AcoParams::validate() const {
  if (!(rho > 0.0 && rho < 1.0)) throw ParameterError("rho must lie in (0,1)");
  if (!(lambda >= 0.0)) throw ParameterError("lambda must be >= 0");
  if (!(xi > 0.0)) throw ParameterError("xi must be > 0");
  if (t_star < 1) throw ParameterError("t_star must be >= 1");
  if (!(dtau_cap > 0.0) || !(tau_cap > 0.0)) throw ParameterError("pheromone caps must be > 0");
  if (!(tau0 > 0.0)) throw ParameterError("tau0 must be > 0");
  if (!(beta_max >= 0.0)) throw ParameterError("beta_max must be >= 0");
}

PheromoneState init_pheromone(int p, const AcoParams& params) {
  params.validate();
  if (p < 1) throw ParameterError("pheromone matrix needs at least one site");
  PheromoneState s;
  s.tau = Eigen::MatrixXd::Constant(p, p, std::min(params.tau0, params.tau_cap));
  s.tau.diagonal().setZero();
  s.rho = params.rho;
  s.lambda = params.lambda;
  s.tau_cap = params.tau_cap;
  s.beta_max = params.beta_max;
  s.t_star = params.t_star;
  return s;
}

Vector normalize_errors(std::span<const double> deltas) {
  double total = 0.0;
  for (double d : deltas) {
    if (!(d >= 0.0)) throw ParameterError("site errors must be >= 0");
    total += d;
  }
  Vector out(deltas.size());
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    out[i] = total > 0.0 ? deltas[i] / total : 1.0 / static_cast<double>(deltas.size());
  }
  return out;
}

Eigen::MatrixXd delta_pheromone(std::span<const double> normalized, double dtau_cap) {
  if (!(dtau_cap > 0.0)) throw ParameterError("dtau_cap must be > 0");
  double total = 0.0;
  for (double v : normalized) total += v;
  if (!normalized.empty() && std::abs(total - 1.0) > 1e-9) {
    throw ParameterError("normalized errors must sum to 1");
  }
  const auto p = static_cast<Eigen::Index>(normalized.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) {
      const double gap = std::abs(normalized[static_cast<std::size_t>(i)] -
                                  normalized[static_cast<std::size_t>(j)]);
      const double v = gap > 0.0 ? std::min(1.0 / gap, dtau_cap) : dtau_cap;
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

PheromoneState update_pheromone(const PheromoneState& state, const Eigen::MatrixXd& dtau) {
  if (dtau.rows() != state.tau.rows() || dtau.cols() != state.tau.cols()) {
    throw ParameterError("pheromone deposit shape mismatch");
  }
  if (!(state.rho > 0.0 && state.rho < 1.0)) throw ParameterError("rho must lie in (0,1)");
  PheromoneState next = state;
  for (Eigen::Index i = 0; i < next.tau.rows(); ++i) {
    for (Eigen::Index j = 0; j < next.tau.cols(); ++j) {
      if (i == j) continue;
      next.tau(i, j) = std::min((1.0 - state.rho) * state.tau(i, j) + dtau(i, j), state.tau_cap);
    }
  }
  next.t = state.t + 1;
  return next;
}

CollaborationMatrix beta_from_pheromone(const PheromoneState& state) {
  CollaborationMatrix m{Eigen::MatrixXd::Zero(state.tau.rows(), state.tau.cols())};
  for (Eigen::Index i = 0; i < m.beta.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.beta.cols(); ++j) {
      if (i != j) m.beta(i, j) = std::min(state.lambda * state.tau(i, j), state.beta_max);
    }
  }
  return m;
}

}  // namespace gran
