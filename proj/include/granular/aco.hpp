#pragma once

#include <Eigen/Core>
#include <span>

#include "granular/dataset.hpp"
#include "granular/vcc.hpp"

namespace gran {

/// Constants of the pheromone bookkeeping that balances collaboration.
struct AcoParams {
  double rho = 0.1;       // evaporation
  double lambda = 0.05;   // beta = lambda * tau
  double xi = 0.05;       // convergence tolerance on site errors
  int t_star = 5;         // pheromone updates per cycle limit
  double dtau_cap = 1e3;  // caps 1/|gap| when two errors coincide
  double tau_cap = 1e4;
  double tau0 = 1.0;
  double beta_max = 2.0;

  void validate() const;
};

struct PheromoneState {
  Eigen::MatrixXd tau;
  double rho = 0.1;
  double lambda = 0.05;
  double tau_cap = 1e4;
  double beta_max = 2.0;
  int t = 0;
  int t_star = 5;
};

PheromoneState init_pheromone(int p, const AcoParams& params);

/// Shares of the total error; all-zero input maps to the uniform vector.
Vector normalize_errors(std::span<const double> deltas);

/// Symmetric deposit min(1/|e_i - e_j|, dtau_cap), zero diagonal.
Eigen::MatrixXd delta_pheromone(std::span<const double> normalized, double dtau_cap);

/// tau <- (1 - rho) tau + dtau off the diagonal, clamped to tau_cap; t += 1.
PheromoneState update_pheromone(const PheromoneState& state, const Eigen::MatrixXd& dtau);

/// beta = min(lambda * tau, beta_max), zero diagonal.
CollaborationMatrix beta_from_pheromone(const PheromoneState& state);

}  // namespace gran
