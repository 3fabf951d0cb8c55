#include "granular/som.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>
#include <ostream>

#include "granular/error.hpp"
#include "granular/rng.hpp"
#include "granular/textio.hpp"

namespace gran {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void check_rows(const SomGrid& g, std::span<const Vector> rows) {
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != g.dim) {
      throw ParameterError("row dimension " + std::to_string(r.size()) +
                           " does not match codebook dimension " + std::to_string(g.dim));
    }
  }
}

}  // namespace

SomGrid init_grid(int rows, int cols, int dim, SomInit init, std::uint64_t seed,
                  std::span<const Vector> data, int output_dims) {
  if (rows < 1 || cols < 1 || dim < 1) throw ParameterError("grid rows, cols and dim must be >= 1");
  if (output_dims < 0 || output_dims >= dim) throw ParameterError("output_dims must lie in [0, dim)");
  for (const auto& r : data) {
    if (static_cast<int>(r.size()) != dim) {
      throw ParameterError("data dimension " + std::to_string(r.size()) +
                           " does not match grid dimension " + std::to_string(dim));
    }
  }

  SomGrid g;
  g.rows = rows;
  g.cols = cols;
  g.dim = dim;
  g.output_dims = output_dims;
  g.seed = seed;
  const int n = rows * cols;
  g.codebooks.reserve(static_cast<std::size_t>(n));
  Rng rng(seed);

  if (init == SomInit::kSampledRows) {
    if (data.empty()) throw ParameterError("sampled-rows initialization needs data");
    if (data.size() >= static_cast<std::size_t>(n)) {
      // Partial Fisher-Yates: the first n slots are distinct rows.
      std::vector<std::size_t> idx(data.size());
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      for (int i = 0; i < n; ++i) {
        const auto j = static_cast<std::size_t>(i) + rng.below(idx.size() - static_cast<std::size_t>(i));
        std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
        g.codebooks.push_back(data[idx[static_cast<std::size_t>(i)]]);
      }
    } else {
      for (int i = 0; i < n; ++i) g.codebooks.push_back(data[rng.below(data.size())]);
    }
    return g;
  }

  Vector lo(static_cast<std::size_t>(dim), 0.0);
  Vector hi(static_cast<std::size_t>(dim), 1.0);
  if (!data.empty()) {
    lo = data.front();
    hi = data.front();
    for (const auto& r : data) {
      for (std::size_t k = 0; k < r.size(); ++k) {
        lo[k] = std::min(lo[k], r[k]);
        hi[k] = std::max(hi[k], r[k]);
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    Vector w(static_cast<std::size_t>(dim));
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = rng.uniform(lo[k], hi[k]);
    g.codebooks.push_back(std::move(w));
  }
  return g;
}

double som_learning_rate(double lr0, int epoch, int epochs) {
  return lr0 * std::exp(-static_cast<double>(epoch) / epochs);
}

double som_radius(double radius0, int epoch, int epochs) {
  return radius0 * std::exp(-static_cast<double>(epoch) / epochs);
}

SomGrid train_som(const SomGrid& g, std::span<const Vector> rows, int epochs, double lr0,
                  double radius0) {
  if (rows.empty()) throw ParameterError("SOM training set is empty");
  if (epochs < 1) throw ParameterError("epochs must be >= 1");
  if (!(lr0 > 0.0 && lr0 <= 1.0)) throw ParameterError("lr0 must lie in (0,1]");
  if (!(radius0 >= 0.0)) throw ParameterError("radius0 must be >= 0");
  check_rows(g, rows);

  SomGrid out = g;
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto dim = static_cast<std::size_t>(g.dim);

  for (int e = 0; e < epochs; ++e) {
    Rng rng(mix_seed(g.seed, static_cast<std::uint64_t>(e)));
    rng.shuffle(order);
    const double lr = som_learning_rate(lr0, e, epochs);
    const double radius = som_radius(radius0, e, epochs);
    const double denom = 2.0 * radius * radius;

    for (auto idx : order) {
      const auto& x = rows[idx];
      int bmu = 0;
      double best = std::numeric_limits<double>::infinity();
      for (int c = 0; c < out.cells(); ++c) {
        const double d = squared_distance(out.codebooks[static_cast<std::size_t>(c)], x, dim);
        if (d < best) {
          best = d;
          bmu = c;
        }
      }
      const auto [br, bc] = out.position(bmu);
      for (int c = 0; c < out.cells(); ++c) {
        const auto [r, cc] = out.position(c);
        const double lattice = static_cast<double>((r - br) * (r - br) + (cc - bc) * (cc - bc));
        double h = 0.0;
        if (c == bmu) {
          h = 1.0;
        } else if (radius > 0.0) {
          h = std::exp(-lattice / denom);
        }
        if (h == 0.0) continue;
        auto& w = out.codebooks[static_cast<std::size_t>(c)];
        for (std::size_t k = 0; k < dim; ++k) w[k] += lr * h * (x[k] - w[k]);
      }
    }
  }
  out.trained = true;
  return out;
}

SomGrid train_som(const SomGrid& g, const Dataset& train, int epochs, double lr0, double radius0) {
  return train_som(g, std::span<const Vector>(train.rows), epochs, lr0, radius0);
}

int best_matching_unit(const SomGrid& g, std::span<const double> x) {
  const auto n = x.size();
  const bool full = static_cast<int>(n) == g.dim;
  const bool inputs_only = g.output_dims > 0 && static_cast<int>(n) == g.dim - g.output_dims;
  if (!full && !inputs_only) {
    throw ParameterError("query dimension " + std::to_string(n) + " does not match grid (" +
                         std::to_string(g.dim) + " with " + std::to_string(g.output_dims) +
                         " output coordinates)");
  }
  int bmu = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int c = 0; c < g.cells(); ++c) {
    const double d = squared_distance(g.codebooks[static_cast<std::size_t>(c)], x, n);
    if (d < best) {
      best = d;
      bmu = c;
    }
  }
  return bmu;
}

CrispGranules extract_granules(const SomGrid& g, std::span<const Vector> rows) {
  if (!g.trained) throw ParameterError("granules require a trained grid");
  check_rows(g, rows);
  std::vector<int> cell_of(rows.size());
  std::vector<int> count(static_cast<std::size_t>(g.cells()), 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    cell_of[i] = best_matching_unit(g, rows[i]);
    ++count[static_cast<std::size_t>(cell_of[i])];
  }
  CrispGranules out;
  std::vector<int> compact(count.size(), -1);
  for (int c = 0; c < g.cells(); ++c) {
    if (count[static_cast<std::size_t>(c)] == 0) continue;
    compact[static_cast<std::size_t>(c)] = static_cast<int>(out.centers.size());
    out.centers.push_back(g.codebooks[static_cast<std::size_t>(c)]);
    out.occupancy.push_back(count[static_cast<std::size_t>(c)]);
    out.cells.push_back(c);
  }
  if (out.centers.empty() && !rows.empty()) throw InternalError("no occupied SOM cell");
  out.membership.reserve(rows.size());
  for (int c : cell_of) out.membership.push_back(compact[static_cast<std::size_t>(c)]);
  return out;
}

CrispGranules extract_granules(const SomGrid& g, const Dataset& train) {
  return extract_granules(g, std::span<const Vector>(train.rows));
}

std::vector<std::pair<int, int>> random_growth_candidates(int current_cells, int max_neurons) {
  std::vector<std::pair<int, int>> out;
  for (int r = 1; r <= max_neurons; ++r) {
    for (int c = 1; r * c <= max_neurons; ++c) {
      if (r * c > current_cells) out.emplace_back(r, c);
    }
  }
  return out;
}

GrowResult grow(const SomGrid& g, const GrowthPolicy& policy, std::optional<double> error_signal,
                double error_target) {
  if (policy.step < 1) throw ParameterError("growth step must be >= 1");
  GrowResult res;
  if (g.cells() >= policy.max_neurons) {
    res.status = GrowStatus::kExhausted;
    res.grid = g;
    return res;
  }

  int rows = g.rows;
  int cols = g.cols;
  if (policy.kind == GrowthKind::kRegular) {
    if (error_signal && *error_signal <= error_target) {
      res.status = GrowStatus::kNotNeeded;
      res.grid = g;
      return res;
    }
    if (rows < cols) {
      rows += policy.step;
    } else {
      cols += policy.step;
    }
    if (rows * cols > policy.max_neurons) {
      res.status = GrowStatus::kExhausted;
      res.grid = g;
      return res;
    }
  } else {
    const auto candidates = random_growth_candidates(g.cells(), policy.max_neurons);
    Rng rng(mix_seed(policy.seed, static_cast<std::uint64_t>(g.cells())));
    std::tie(rows, cols) = candidates[rng.below(candidates.size())];
  }

  const auto seed = mix_seed(g.seed, static_cast<std::uint64_t>(rows * 1000 + cols));
  res.grid = init_grid(rows, cols, g.dim, SomInit::kRandomInRange, seed, g.codebooks, g.output_dims);
  res.status = GrowStatus::kGrown;
  return res;
}

double quantization_error(const SomGrid& g, std::span<const Vector> rows) {
  if (rows.empty()) throw ParameterError("quantization error of an empty dataset");
  check_rows(g, rows);
  double total = 0.0;
  for (const auto& r : rows) {
    const int bmu = best_matching_unit(g, r);
    total += std::sqrt(squared_distance(g.codebooks[static_cast<std::size_t>(bmu)], r, r.size()));
  }
  return total / static_cast<double>(rows.size());
}

double quantization_error(const SomGrid& g, const Dataset& d) {
  return quantization_error(g, std::span<const Vector>(d.rows));
}

void write_som(std::ostream& out, const SomGrid& g) {
  out << "granular-som 1\n";
  out << "shape " << g.rows << ' ' << g.cols << ' ' << g.dim << ' ' << g.output_dims << '\n';
  out << "seed " << g.seed << '\n';
  out << "trained " << (g.trained ? 1 : 0) << '\n';
  for (const auto& w : g.codebooks) {
    for (std::size_t k = 0; k < w.size(); ++k) out << (k ? " " : "") << textio::fmt(w[k]);
    out << '\n';
  }
  out << "end-som\n";
}

SomGrid read_som(std::istream& in) {
  using namespace textio;
  expect(in, "granular-som");
  if (read_int(in) != 1) throw ParseError(0, "unsupported SOM format version");
  SomGrid g;
  expect(in, "shape");
  g.rows = static_cast<int>(read_int(in));
  g.cols = static_cast<int>(read_int(in));
  g.dim = static_cast<int>(read_int(in));
  g.output_dims = static_cast<int>(read_int(in));
  if (g.rows < 1 || g.cols < 1 || g.dim < 1 || g.output_dims < 0 || g.output_dims >= g.dim) {
    throw ParseError(0, "invalid SOM shape");
  }
  expect(in, "seed");
  g.seed = read_uint(in);
  expect(in, "trained");
  g.trained = read_int(in) != 0;
  g.codebooks.assign(static_cast<std::size_t>(g.cells()), Vector(static_cast<std::size_t>(g.dim)));
  for (auto& w : g.codebooks) {
    for (auto& v : w) v = read_double(in);
  }
  expect(in, "end-som");
  return g;
}

}  // namespace gran
