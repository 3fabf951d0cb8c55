#include "granular/model.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "granular/error.hpp"
#include "granular/fcm.hpp"
#include "granular/textio.hpp"

namespace gran {

namespace {

// Names travel as single tokens.
std::string escape_name(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '%' || ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r') {
      static const char* hex = "0123456789ABCDEF";
      out += '%';
      out += hex[(static_cast<unsigned char>(ch) >> 4) & 0xF];
      out += hex[static_cast<unsigned char>(ch) & 0xF];
    } else {
      out += ch;
    }
  }
  return out.empty() ? "%" : out;
}

std::string unescape_name(const std::string& s) {
  if (s == "%") return {};
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      out += static_cast<char>(std::stoi(s.substr(i + 1, 2), nullptr, 16));
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

Vector normalized_inputs(const Model& m, std::span<const double> raw) {
  if (raw.size() != m.input_names.size()) throw ParameterError("input dimension mismatch");
  Vector x(raw.begin(), raw.end());
  if (m.normalization.method != NormMethod::kNone) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = normalize_value(m.normalization, i, x[i]);
  }
  return x;
}

double normalized_output(const Model& m, double raw) {
  if (m.normalization.method == NormMethod::kNone) return raw;
  return normalize_value(m.normalization, m.input_names.size(), raw);
}

double raw_output(const Model& m, double y) {
  if (m.normalization.method == NormMethod::kNone) return y;
  return denormalize_value(m.normalization, m.input_names.size(), y);
}

double linear_predict(const std::vector<LinearRule>& rules, const Vector& x) {
  std::vector<Vector> protos;
  protos.reserve(rules.size());
  for (const auto& r : rules) protos.push_back(r.prototype);
  const auto u = fcm_memberships(std::span<const Vector>(&x, 1), protos, kVccFuzzifier);
  double y = 0.0;
  for (std::size_t k = 0; k < rules.size(); ++k) {
    const auto& a = rules[k].coeffs;
    double f = a[0];
    for (std::size_t d = 0; d < x.size(); ++d) f += a[d + 1] * x[d];
    y += u(static_cast<Eigen::Index>(k), 0) * f;
  }
  return y;
}

std::vector<int> condition_codes(const Model& m, const Vector& x) {
  if (m.cuts.size() != x.size() + 1) throw ParameterError("model cut points do not match its inputs");
  std::vector<int> codes(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) codes[i] = code_of(x[i], m.cuts[i]);
  return codes;
}

void write_cuts(std::ostream& out, const std::vector<Vector>& cuts) {
  out << "cuts " << cuts.size() << '\n';
  for (const auto& c : cuts) {
    out << c.size();
    for (double v : c) out << ' ' << textio::fmt(v);
    out << '\n';
  }
}

std::vector<Vector> read_cuts(std::istream& in) {
  using namespace textio;
  expect(in, "cuts");
  const auto n = read_uint(in);
  std::vector<Vector> cuts(n);
  for (auto& c : cuts) {
    const auto k = read_uint(in);
    for (unsigned long long j = 0; j < k; ++j) c.push_back(read_double(in));
  }
  return cuts;
}

}  // namespace

std::size_t Model::rule_count() const {
  switch (kind) {
    case ModelKind::kNfis: return tsk.rules.size();
    case ModelKind::kRst: return rules.size();
    case ModelKind::kVcc: {
      std::size_t n = 0;
      for (const auto& s : sites) n += s.linear_rules.size();
      return n;
    }
  }
  return 0;
}

double predict(const Model& m, std::span<const double> raw_inputs) {
  const auto x = normalized_inputs(m, raw_inputs);
  switch (m.kind) {
    case ModelKind::kNfis: return raw_output(m, infer(m.tsk, x));
    case ModelKind::kVcc: {
      if (m.sites.empty()) throw ParameterError("model has no sites");
      double y = 0.0;
      for (const auto& s : m.sites) y += linear_predict(s.linear_rules, x);
      return raw_output(m, y / static_cast<double>(m.sites.size()));
    }
    case ModelKind::kRst: break;
  }
  throw ParameterError("rough-set models classify; use classify_raw");
}

std::optional<int> classify_raw(const Model& m, std::span<const double> raw_inputs) {
  if (m.kind != ModelKind::kRst) throw ParameterError("only rough-set models classify");
  const auto codes = condition_codes(m, normalized_inputs(m, raw_inputs));
  const auto c = classify(m.rules, codes);
  if (!c) return std::nullopt;
  return c->decision;
}

int decision_code(const Model& m, double raw_output_value) {
  if (m.cuts.empty()) throw ParameterError("model has no decision cut points");
  return code_of(normalized_output(m, raw_output_value), m.cuts.back());
}

Metrics evaluate(const Model& m, const Dataset& raw) {
  if (raw.empty()) throw EmptyInputError("evaluation data is empty");
  if (raw.n_inputs() != m.input_names.size()) throw ParameterError("evaluation data has the wrong width");
  Metrics out;
  out.n = raw.size();
  if (m.kind == ModelKind::kRst) {
    out.metric = "misclassification";
    std::size_t wrong = 0;
    std::size_t abstained = 0;
    for (const auto& row : raw.rows) {
      const auto d = classify_raw(m, std::span<const double>(row.data(), row.size() - 1));
      if (!d) {
        ++abstained;
        ++wrong;
      } else if (*d != decision_code(m, row.back())) {
        ++wrong;
      }
    }
    out.error = static_cast<double>(wrong) / static_cast<double>(raw.size());
    out.abstention_rate = static_cast<double>(abstained) / static_cast<double>(raw.size());
    return out;
  }
  out.metric = "rmse";
  double s = 0.0;
  for (const auto& row : raw.rows) {
    const double e = row.back() - predict(m, std::span<const double>(row.data(), row.size() - 1));
    s += e * e;
  }
  out.error = std::sqrt(s / static_cast<double>(raw.size()));
  return out;
}

std::vector<std::string> model_rules(const Model& m) {
  std::vector<std::string> lines;
  switch (m.kind) {
    case ModelKind::kNfis:
      return extract_fuzzy_rules(m.tsk, m.input_names, m.output_name);
    case ModelKind::kRst:
      for (const auto& r : m.rules) lines.push_back(format_rule(r, m.input_names, m.output_name));
      return lines;
    case ModelKind::kVcc:
      for (std::size_t i = 0; i < m.sites.size(); ++i) {
        lines.push_back("# site " + std::to_string(i + 1));
        SiteState s;
        s.linear_rules = m.sites[i].linear_rules;
        for (auto& l : format_linear_rules(s, m.input_names, m.output_name)) lines.push_back(std::move(l));
        for (const auto& r : m.sites[i].rough_rules) {
          lines.push_back(format_rule(r, m.input_names, m.output_name));
        }
      }
      return lines;
  }
  return lines;
}

void write_model(std::ostream& out, const Model& m) {
  using textio::fmt;
  out << "granular-model 1\n";
  out << "kind " << to_string(m.kind) << '\n';
  out << "inputs " << m.input_names.size();
  for (const auto& n : m.input_names) out << ' ' << escape_name(n);
  out << '\n';
  out << "output " << escape_name(m.output_name) << '\n';
  out << "normalization " << to_string(m.normalization.method) << ' '
      << m.normalization.attributes.size() << '\n';
  for (const auto& a : m.normalization.attributes) out << fmt(a.offset) << ' ' << fmt(a.scale) << '\n';
  switch (m.kind) {
    case ModelKind::kNfis:
      write_som(out, m.grid);
      write_tsk(out, m.tsk);
      break;
    case ModelKind::kRst:
      write_som(out, m.grid);
      write_cuts(out, m.cuts);
      write_rules(out, m.rules);
      break;
    case ModelKind::kVcc:
      write_cuts(out, m.cuts);
      out << "sites " << m.sites.size() << '\n';
      for (const auto& s : m.sites) {
        out << "linear " << s.linear_rules.size() << '\n';
        for (const auto& r : s.linear_rules) {
          out << r.prototype.size();
          for (double v : r.prototype) out << ' ' << fmt(v);
          out << ' ' << r.coeffs.size();
          for (double v : r.coeffs) out << ' ' << fmt(v);
          out << '\n';
        }
        write_rules(out, s.rough_rules);
      }
      break;
  }
  out << "end-model\n";
}

Model read_model(std::istream& in) {
  using namespace textio;
  skip_comments(in);
  expect(in, "granular-model");
  if (read_int(in) != 1) throw ParseError(0, "unsupported model format version");
  Model m;
  expect(in, "kind");
  const auto kind = token(in);
  if (kind == "nfis") m.kind = ModelKind::kNfis;
  else if (kind == "rst") m.kind = ModelKind::kRst;
  else if (kind == "vcc") m.kind = ModelKind::kVcc;
  else throw ParseError(0, "unknown model kind '" + kind + "'");
  expect(in, "inputs");
  const auto n = read_uint(in);
  for (unsigned long long i = 0; i < n; ++i) m.input_names.push_back(unescape_name(token(in)));
  expect(in, "output");
  m.output_name = unescape_name(token(in));
  expect(in, "normalization");
  const auto method = token(in);
  if (method == "none") m.normalization.method = NormMethod::kNone;
  else if (method == "minmax") m.normalization.method = NormMethod::kMinMax;
  else if (method == "zscore") m.normalization.method = NormMethod::kZScore;
  else throw ParseError(0, "unknown normalization '" + method + "'");
  const auto attrs = read_uint(in);
  for (unsigned long long i = 0; i < attrs; ++i) {
    AttributeScale a;
    a.offset = read_double(in);
    a.scale = read_double(in);
    m.normalization.attributes.push_back(a);
  }
  if (m.normalization.method != NormMethod::kNone && attrs != n + 1) {
    throw ParseError(0, "normalization does not cover every column");
  }
  switch (m.kind) {
    case ModelKind::kNfis:
      m.grid = read_som(in);
      m.tsk = read_tsk(in);
      break;
    case ModelKind::kRst:
      m.grid = read_som(in);
      m.cuts = read_cuts(in);
      m.rules = read_rules(in);
      break;
    case ModelKind::kVcc: {
      m.cuts = read_cuts(in);
      expect(in, "sites");
      const auto p = read_uint(in);
      for (unsigned long long s = 0; s < p; ++s) {
        SiteModel site;
        expect(in, "linear");
        const auto c = read_uint(in);
        for (unsigned long long k = 0; k < c; ++k) {
          LinearRule r;
          const auto dim = read_uint(in);
          for (unsigned long long d = 0; d < dim; ++d) r.prototype.push_back(read_double(in));
          const auto nc = read_uint(in);
          if (nc != dim + 1) throw ParseError(0, "linear rule coefficient count mismatch");
          for (unsigned long long d = 0; d < nc; ++d) r.coeffs.push_back(read_double(in));
          site.linear_rules.push_back(std::move(r));
        }
        site.rough_rules = read_rules(in);
        m.sites.push_back(std::move(site));
      }
      break;
    }
  }
  expect(in, "end-model");
  return m;
}

const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::kNfis: return "nfis";
    case ModelKind::kRst: return "rst";
    case ModelKind::kVcc: return "vcc";
  }
  return "?";
}

}  // namespace gran
