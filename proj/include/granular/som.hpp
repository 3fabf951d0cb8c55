#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "granular/dataset.hpp"

namespace gran {

/// Rectangular Kohonen lattice. Codebooks are stored row-major: cell
/// index = r * cols + c.
struct SomGrid {
  int rows = 0;
  int cols = 0;
  int dim = 0;
  /// Trailing coordinates (the output) that queries may withhold.
  int output_dims = 0;
  std::vector<Vector> codebooks;
  bool trained = false;
  std::uint64_t seed = 0;

  int cells() const noexcept { return rows * cols; }
  std::pair<int, int> position(int cell) const noexcept { return {cell / cols, cell % cols}; }
};

/// Crisp granules: occupied codebooks and the row-to-granule assignment.
struct CrispGranules {
  std::vector<Vector> centers;
  /// Index into `centers` for each training row.
  std::vector<int> membership;
  std::vector<int> occupancy;
  /// Lattice cell each center came from.
  std::vector<int> cells;

  std::size_t size() const noexcept { return centers.size(); }
};

enum class SomInit { kRandomInRange, kSampledRows };

enum class GrowthKind { kRegular, kRandom };

struct GrowthPolicy {
  GrowthKind kind = GrowthKind::kRegular;
  int step = 1;
  int max_neurons = 100;
  std::uint64_t seed = 0;
};

enum class GrowStatus { kGrown, kNotNeeded, kExhausted };

struct GrowResult {
  GrowStatus status = GrowStatus::kExhausted;
  SomGrid grid;
};

/// Fresh lattice. `data` supplies the ranges (random-in-range) or the rows
/// (sampled-rows); with no data random-in-range draws from [0,1].
/// Sampled-rows draws distinct rows when there are at least as many rows as
/// cells and falls back to sampling with replacement otherwise.
SomGrid init_grid(int rows, int cols, int dim, SomInit init, std::uint64_t seed,
                  std::span<const Vector> data = {}, int output_dims = 0);

/// Online training, one sample at a time. Epoch e (0-based) uses
/// lr0*exp(-e/epochs) and radius0*exp(-e/epochs) with a Gaussian lattice
/// neighbourhood; radius 0 updates the winner only. Presentation order is
/// reshuffled every epoch from the grid seed.
SomGrid train_som(const SomGrid& g, std::span<const Vector> rows, int epochs, double lr0,
                  double radius0);
SomGrid train_som(const SomGrid& g, const Dataset& train, int epochs, double lr0, double radius0);

double som_learning_rate(double lr0, int epoch, int epochs);
double som_radius(double radius0, int epoch, int epochs);

/// Winner by Euclidean distance, lowest index on ties. `x` may carry the full
/// codebook dimension or only the input part (dim - output_dims).
int best_matching_unit(const SomGrid& g, std::span<const double> x);

CrispGranules extract_granules(const SomGrid& g, std::span<const Vector> rows);
CrispGranules extract_granules(const SomGrid& g, const Dataset& train);

/// Regular growth adds `step` to the smaller lattice side (columns on ties)
/// when `error_signal` exceeds `error_target`; random growth draws a new
/// shape uniformly among those with more cells, up to max_neurons. The grown
/// grid is re-initialized within the old codebook ranges and untrained.
GrowResult grow(const SomGrid& g, const GrowthPolicy& policy,
                std::optional<double> error_signal = std::nullopt, double error_target = 0.0);

/// Candidate shapes for random growth, in (rows, cols) lexicographic order.
std::vector<std::pair<int, int>> random_growth_candidates(int current_cells, int max_neurons);

double quantization_error(const SomGrid& g, std::span<const Vector> rows);
double quantization_error(const SomGrid& g, const Dataset& d);

void write_som(std::ostream& out, const SomGrid& g);
SomGrid read_som(std::istream& in);

}  // namespace gran
