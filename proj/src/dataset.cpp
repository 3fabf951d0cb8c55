#include "granular/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <string_view>

#include "granular/error.hpp"
#include "granular/rng.hpp"

namespace gran {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(delim, start);
    const auto field = line.substr(start, pos == std::string_view::npos ? line.npos : pos - start);
    out.push_back(trim(field));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end && std::isfinite(out);
}

}  // namespace

void Dataset::validate() const {
  const std::size_t w = width();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != w) {
      throw ParameterError("row " + std::to_string(i) + " has " +
                           std::to_string(rows[i].size()) + " values, expected " +
                           std::to_string(w));
    }
    for (double v : rows[i]) {
      if (!std::isfinite(v)) throw ParameterError("row " + std::to_string(i) + " is not finite");
    }
  }
}

Dataset load_table(std::istream& source, const TableSchema& schema) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  char delim = schema.delimiter;

  while (std::getline(source, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (delim == 0) delim = line.find('\t') != std::string::npos ? '\t' : ',';
    for (auto f : split_fields(line, delim)) header.emplace_back(f);
    break;
  }
  if (header.empty()) throw EmptyInputError("input has no header row");

  auto column_of = [&](const std::string& name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ParseError(line_no, "no column named '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i].empty()) throw ParseError(line_no, "empty column name");
    for (std::size_t j = 0; j < i; ++j) {
      if (header[i] == header[j]) throw ParseError(line_no, "duplicate column '" + header[i] + "'");
    }
  }

  Dataset d;
  d.output_name = schema.output;
  const std::size_t out_col = column_of(schema.output);
  std::vector<std::size_t> in_cols;
  if (schema.inputs.empty()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i == out_col) continue;
      in_cols.push_back(i);
      d.input_names.push_back(header[i]);
    }
  } else {
    for (const auto& name : schema.inputs) {
      if (name == schema.output) throw ParseError(line_no, "output column listed as input");
      in_cols.push_back(column_of(name));
      d.input_names.push_back(name);
    }
  }
  if (in_cols.empty()) throw ParseError(line_no, "no input columns");

  std::vector<double> cells(header.size());
  while (std::getline(source, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line, delim);
    if (fields.size() != header.size()) {
      throw ParseError(line_no, "expected " + std::to_string(header.size()) + " fields, found " +
                                    std::to_string(fields.size()));
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (fields[i].empty()) throw ParseError(line_no, "missing value in column " + header[i]);
      if (!parse_double(fields[i], cells[i])) {
        throw ParseError(line_no, "non-numeric value '" + std::string(fields[i]) + "' in column " +
                                      header[i]);
      }
    }
    Vector row;
    row.reserve(in_cols.size() + 1);
    for (auto c : in_cols) row.push_back(cells[c]);
    row.push_back(cells[out_col]);
    d.rows.push_back(std::move(row));
  }
  if (d.rows.empty()) throw EmptyInputError("input has a header but no data rows");
  return d;
}

Dataset load_table_file(const std::string& path, const TableSchema& schema) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open data file: " + path);
  return load_table(in, schema);
}

SplitPair split(const Dataset& d, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw ParameterError("split ratio must lie in (0,1)");
  if (d.size() < 2) throw ParameterError("split needs at least 2 rows");
  const auto n = d.size();
  const auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
  if (n_train == 0 || n_train == n) {
    throw ParameterError("split ratio leaves an empty train or test part");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(order);

  SplitPair out;
  out.seed = seed;
  out.ratio = ratio;
  for (Dataset* part : {&out.train, &out.test}) {
    part->input_names = d.input_names;
    part->output_name = d.output_name;
    part->normalization = d.normalization;
  }
  out.train.rows.reserve(n_train);
  out.test.rows.reserve(n - n_train);
  for (std::size_t i = 0; i < n; ++i) {
    (i < n_train ? out.train : out.test).rows.push_back(d.rows[order[i]]);
  }
  return out;
}

Normalization fit_normalization(const Dataset& d, NormMethod method) {
  if (d.empty()) throw ParameterError("cannot fit normalization on an empty dataset");
  Normalization norm;
  norm.method = method;
  const std::size_t w = d.width();
  norm.attributes.resize(w);
  if (method == NormMethod::kNone) return norm;

  for (std::size_t a = 0; a < w; ++a) {
    if (method == NormMethod::kMinMax) {
      double lo = d.rows[0][a];
      double hi = lo;
      for (const auto& r : d.rows) {
        lo = std::min(lo, r[a]);
        hi = std::max(hi, r[a]);
      }
      // A constant attribute maps to 0 and still round-trips.
      norm.attributes[a] = {lo, hi > lo ? hi - lo : 1.0};
    } else {
      double mean = 0.0;
      for (const auto& r : d.rows) mean += r[a];
      mean /= static_cast<double>(d.size());
      double var = 0.0;
      for (const auto& r : d.rows) var += (r[a] - mean) * (r[a] - mean);
      const double sd = std::sqrt(var / static_cast<double>(d.size()));
      if (!(sd > 0.0)) {
        throw ParameterError("z-score normalization of constant attribute " +
                             (a < d.n_inputs() ? d.input_names[a] : d.output_name));
      }
      norm.attributes[a] = {mean, sd};
    }
  }
  return norm;
}

double normalize_value(const Normalization& norm, std::size_t attribute, double v) {
  const auto& s = norm.attributes.at(attribute);
  return (v - s.offset) / s.scale;
}

double denormalize_value(const Normalization& norm, std::size_t attribute, double v) {
  const auto& s = norm.attributes.at(attribute);
  return v * s.scale + s.offset;
}

Dataset apply_normalization(const Dataset& d, const Normalization& norm) {
  if (norm.attributes.size() != d.width()) {
    throw ParameterError("normalization covers " + std::to_string(norm.attributes.size()) +
                         " attributes, dataset has " + std::to_string(d.width()));
  }
  Dataset out = d.normalization ? denormalize(d) : d;
  for (auto& r : out.rows) {
    for (std::size_t a = 0; a < r.size(); ++a) r[a] = normalize_value(norm, a, r[a]);
  }
  out.normalization = norm;
  return out;
}

Dataset normalize(const Dataset& d, NormMethod method) {
  const Dataset raw = d.normalization ? denormalize(d) : d;
  return apply_normalization(raw, fit_normalization(raw, method));
}

Dataset denormalize(const Dataset& d) {
  Dataset out = d;
  if (!d.normalization) return out;
  for (auto& r : out.rows) {
    for (std::size_t a = 0; a < r.size(); ++a) r[a] = denormalize_value(*d.normalization, a, r[a]);
  }
  out.normalization.reset();
  return out;
}

double output_scale(const Dataset& d) {
  if (!d.normalization || d.normalization->attributes.empty()) return 1.0;
  return std::abs(d.normalization->attributes.back().scale);
}

int code_of(double v, std::span<const double> cuts) {
  return static_cast<int>(std::upper_bound(cuts.begin(), cuts.end(), v) - cuts.begin());
}

std::vector<Vector> compute_cuts(const Dataset& d, std::span<const int> bins_per_attr,
                                 BinStrategy strategy) {
  if (bins_per_attr.size() != d.width()) {
    throw ParameterError("need one bin count per attribute including the decision (" +
                         std::to_string(d.width()) + "), got " +
                         std::to_string(bins_per_attr.size()));
  }
  if (d.empty()) throw ParameterError("cannot discretize an empty dataset");
  std::vector<Vector> cuts(d.width());
  for (std::size_t a = 0; a < d.width(); ++a) {
    const int bins = bins_per_attr[a];
    if (bins < 1) throw ParameterError("bin count must be >= 1");
    Vector col(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) col[i] = d.rows[i][a];
    std::sort(col.begin(), col.end());
    const double lo = col.front();
    const double hi = col.back();
    Vector raw;
    for (int k = 1; k < bins; ++k) {
      if (strategy == BinStrategy::kEqualWidth) {
        raw.push_back(lo + (hi - lo) * static_cast<double>(k) / bins);
      } else {
        const auto idx = static_cast<std::size_t>(k) * col.size() / static_cast<std::size_t>(bins);
        raw.push_back(col[std::min(idx, col.size() - 1)]);
      }
    }
    // Ties and constant columns collapse bins; cuts stay strictly ascending.
    for (double c : raw) {
      if (c > lo && (cuts[a].empty() || c > cuts[a].back())) cuts[a].push_back(c);
    }
  }
  return cuts;
}

InformationSystem apply_cuts(const Dataset& d, const std::vector<Vector>& cuts) {
  if (cuts.size() != d.width()) throw ParameterError("cut list does not match dataset width");
  InformationSystem is;
  is.condition_attrs = d.input_names;
  is.decision_attr = d.output_name;
  is.cut_points = cuts;
  is.objects.reserve(d.size());
  for (const auto& r : d.rows) {
    std::vector<int> codes(r.size());
    for (std::size_t a = 0; a < r.size(); ++a) codes[a] = code_of(r[a], cuts[a]);
    is.objects.push_back(std::move(codes));
  }
  return is;
}

InformationSystem discretize(const Dataset& d, std::span<const int> bins_per_attr,
                             BinStrategy strategy) {
  return apply_cuts(d, compute_cuts(d, bins_per_attr, strategy));
}

const char* to_string(NormMethod m) {
  switch (m) {
    case NormMethod::kNone: return "none";
    case NormMethod::kMinMax: return "minmax";
    case NormMethod::kZScore: return "zscore";
  }
  return "?";
}

const char* to_string(BinStrategy s) {
  return s == BinStrategy::kEqualWidth ? "equal-width" : "equal-frequency";
}

}  // namespace gran
