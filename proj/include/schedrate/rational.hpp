#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace schedrate {

// Exact arithmetic for makespans, bounds and thresholds.
using Rational = boost::rational<std::int64_t>;

// Accepts "3", "-2", "1.5", "0.125", "2/3". Throws DomainError otherwise.
Rational parse_rational(std::string_view text);

// Always "p/q", including integers ("3/1").
std::string to_string(const Rational& r);

double to_double(const Rational& r);

// Largest integer <= r.
std::int64_t floor(const Rational& r);

// Smallest-denominator rational within `tolerance` of x (Stern-Brocot walk).
// Used to recover exact values such as 4/9 from floating-point model
// parameters; denominators above `max_denominator` raise NumericError.
Rational rationalize(double x, double tolerance = 1e-10,
                     std::int64_t max_denominator = 1'000'000'000);

}  // namespace schedrate
