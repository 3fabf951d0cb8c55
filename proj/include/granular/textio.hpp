#pragma once

#include <istream>
#include <string>
#include <string_view>

namespace gran::textio {

/// Shortest decimal that round-trips to the same double.
std::string fmt(double v);

/// printf-style "%.<digits>g".
std::string fmt_sig(double v, int digits);

/// Reads the next whitespace token; throws ParseError at end of input.
std::string token(std::istream& in);

/// Reads a token and checks it equals `expected`.
void expect(std::istream& in, std::string_view expected);

double read_double(std::istream& in);
long long read_int(std::istream& in);
unsigned long long read_uint(std::istream& in);

/// Discards leading lines that start with '#'.
void skip_comments(std::istream& in);

}  // namespace gran::textio
