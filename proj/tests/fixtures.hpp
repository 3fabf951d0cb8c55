#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "granular/config.hpp"
#include "granular/dataset.hpp"
#include "granular/rng.hpp"

namespace fixtures {

using gran::Dataset;

inline Dataset make(std::vector<std::string> inputs, std::string output) {
  Dataset d;
  d.input_names = std::move(inputs);
  d.output_name = std::move(output);
  return d;
}

/// y = sin(x) on [0, pi] with Gaussian noise.
inline Dataset sine(int n = 200, double noise = 0.02, std::uint64_t seed = 7) {
  gran::Rng rng(seed);
  auto d = make({"x"}, "y");
  for (int i = 0; i < n; ++i) {
    const double x = std::numbers::pi * i / (n - 1);
    d.rows.push_back({x, std::sin(x) + noise * rng.normal()});
  }
  return d;
}

inline Dataset line(int n = 40) {
  auto d = make({"x"}, "y");
  for (int i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / (n - 1);
    d.rows.push_back({x, 2.0 * x});
  }
  return d;
}

/// Two classes split by a margin on the first axis.
inline Dataset separable(int n = 200, std::uint64_t seed = 3) {
  gran::Rng rng(seed);
  auto d = make({"a", "b"}, "cls");
  for (int i = 0; i < n; ++i) {
    const int cls = i % 2;
    const double a = cls ? rng.uniform(0.6, 1.0) : rng.uniform(0.0, 0.4);
    d.rows.push_back({a, rng.uniform(0, 1), static_cast<double>(cls)});
  }
  return d;
}

/// Four corner clusters labelled by XOR of the quadrant.
inline Dataset xor_pattern(int n = 200, std::uint64_t seed = 5) {
  gran::Rng rng(seed);
  auto d = make({"a", "b"}, "cls");
  for (int i = 0; i < n; ++i) {
    const int qa = i % 2;
    const int qb = (i / 2) % 2;
    const double a = qa ? rng.uniform(0.65, 1.0) : rng.uniform(0.0, 0.35);
    const double b = qb ? rng.uniform(0.65, 1.0) : rng.uniform(0.0, 0.35);
    d.rows.push_back({a, b, static_cast<double>(qa ^ qb)});
  }
  return d;
}

inline std::string to_csv(const Dataset& d) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& n : d.input_names) out << n << ',';
  out << d.output_name << '\n';
  for (const auto& r : d.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
    out << '\n';
  }
  return out.str();
}

inline std::string write_csv(const std::filesystem::path& path, const Dataset& d) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream(path) << to_csv(d);
  return path.string();
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

inline gran::RunConfig config(gran::Variant v) {
  gran::RunConfig cfg;
  cfg.variant = v;
  return cfg;
}

}  // namespace fixtures
