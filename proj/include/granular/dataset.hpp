#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gran {

using Vector = std::vector<double>;

enum class NormMethod { kNone, kMinMax, kZScore };

/// normalized = (raw - offset) / scale
struct AttributeScale {
  double offset = 0.0;
  double scale = 1.0;
};

/// Per-attribute affine maps, one entry per column (inputs then output).
struct Normalization {
  NormMethod method = NormMethod::kNone;
  std::vector<AttributeScale> attributes;
};

/// Numeric table. Every row holds the inputs in `input_names` order followed
/// by the single output value.
struct Dataset {
  std::vector<Vector> rows;
  std::vector<std::string> input_names;
  std::string output_name;
  std::optional<Normalization> normalization;

  std::size_t size() const noexcept { return rows.size(); }
  bool empty() const noexcept { return rows.empty(); }
  std::size_t n_inputs() const noexcept { return input_names.size(); }
  std::size_t width() const noexcept { return input_names.size() + 1; }
  double output(std::size_t i) const { return rows[i].back(); }
  Vector inputs(std::size_t i) const {
    return Vector(rows[i].begin(), rows[i].end() - 1);
  }

  /// Throws ParameterError on ragged or non-finite rows.
  void validate() const;
};

struct SplitPair {
  Dataset train;
  Dataset test;
  std::uint64_t seed = 0;
  double ratio = 0.0;
};

struct TableSchema {
  std::string output;
  /// Empty selects every non-output column, in file order.
  std::vector<std::string> inputs;
  /// 0 picks ',' unless the header contains a tab.
  char delimiter = 0;
};

Dataset load_table(std::istream& source, const TableSchema& schema);
Dataset load_table_file(const std::string& path, const TableSchema& schema);

SplitPair split(const Dataset& d, double ratio, std::uint64_t seed);

Normalization fit_normalization(const Dataset& d, NormMethod method);
Dataset apply_normalization(const Dataset& d, const Normalization& norm);
Dataset normalize(const Dataset& d, NormMethod method);
Dataset denormalize(const Dataset& d);
double denormalize_value(const Normalization& norm, std::size_t attribute, double v);
double normalize_value(const Normalization& norm, std::size_t attribute, double v);
/// Factor converting an output-space distance back to raw units.
double output_scale(const Dataset& d);

// ---------------------------------------------------------------------------
// Discretization

enum class BinStrategy { kEqualWidth, kEqualFrequency };

/// Decision table of integer codes. Each object row holds the condition codes
/// followed by the decision code.
struct InformationSystem {
  std::vector<std::vector<int>> objects;
  std::vector<std::string> condition_attrs;
  std::string decision_attr;
  /// One ascending list per attribute, decision last.
  std::vector<Vector> cut_points;

  std::size_t size() const noexcept { return objects.size(); }
  std::size_t n_conditions() const noexcept { return condition_attrs.size(); }
  int decision(std::size_t object) const { return objects[object].back(); }
};

/// Number of cuts <= v. Values outside the fitted range clamp to the end bins.
int code_of(double v, std::span<const double> cuts);

std::vector<Vector> compute_cuts(const Dataset& d, std::span<const int> bins_per_attr,
                                 BinStrategy strategy);
InformationSystem apply_cuts(const Dataset& d, const std::vector<Vector>& cuts);
InformationSystem discretize(const Dataset& d, std::span<const int> bins_per_attr,
                             BinStrategy strategy);

const char* to_string(NormMethod m);
const char* to_string(BinStrategy s);

}  // namespace gran
