#include "granular/textio.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "granular/error.hpp"

namespace gran::textio {

std::string fmt(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw InternalError("double formatting failed");
  return std::string(buf, ptr);
}

std::string fmt_sig(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string token(std::istream& in) {
  std::string t;
  if (!(in >> t)) throw ParseError(0, "unexpected end of model text");
  return t;
}

void expect(std::istream& in, std::string_view expected) {
  const auto t = token(in);
  if (t != expected) {
    throw ParseError(0, "expected '" + std::string(expected) + "', found '" + t + "'");
  }
}

double read_double(std::istream& in) {
  const auto t = token(in);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw ParseError(0, "bad number '" + t + "'");
  }
  return v;
}

long long read_int(std::istream& in) {
  const auto t = token(in);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size()) throw ParseError(0, "bad integer '" + t + "'");
  return v;
}

unsigned long long read_uint(std::istream& in) {
  const auto t = token(in);
  unsigned long long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size()) throw ParseError(0, "bad integer '" + t + "'");
  return v;
}

void skip_comments(std::istream& in) {
  for (;;) {
    in >> std::ws;
    if (in.peek() != '#') return;
    std::string discard;
    std::getline(in, discard);
  }
}

}  // namespace gran::textio
