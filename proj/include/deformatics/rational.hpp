#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace deformatics {

using Rational = mpq_class;

/// Parses "num/den" or "num". Throws ParseError on malformed input.
Rational parse_rational(std::string_view s);

/// Always emits "num/den" (den = 1 included).
std::string format_rational(const Rational& q);

inline bool is_zero(const Rational& q) { return sgn(q) == 0; }

}  // namespace deformatics
