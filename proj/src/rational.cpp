#include "schedrate/rational.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

#include "schedrate/errors.hpp"

namespace schedrate {

namespace {

std::int64_t parse_int(std::string_view digits, std::string_view whole) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
    throw DomainError("not a rational number: '" + std::string(whole) + "'");
  }
  return value;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) throw DomainError("not a rational number: '" + std::string(text) + "'");

  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto num_text = s.substr(0, slash);
    auto den_text = s.substr(slash + 1);
    bool negative = !num_text.empty() && num_text.front() == '-';
    if (negative) num_text.remove_prefix(1);
    if (!all_digits(num_text) || !all_digits(den_text)) {
      throw DomainError("not a rational number: '" + std::string(text) + "'");
    }
    std::int64_t num = parse_int(num_text, text);
    std::int64_t den = parse_int(den_text, text);
    if (den == 0) throw DomainError("zero denominator in '" + std::string(text) + "'");
    return Rational(negative ? -num : num, den);
  }

  bool negative = s.front() == '-';
  if (negative || s.front() == '+') s.remove_prefix(1);
  auto dot = s.find('.');
  std::string_view int_part = s.substr(0, dot);
  std::string_view frac_part = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
  if (int_part.empty() && frac_part.empty()) {
    throw DomainError("not a rational number: '" + std::string(text) + "'");
  }
  if ((!int_part.empty() && !all_digits(int_part)) ||
      (dot != std::string_view::npos && !frac_part.empty() && !all_digits(frac_part))) {
    throw DomainError("not a rational number: '" + std::string(text) + "'");
  }
  if (frac_part.size() > 17) {
    throw DomainError("too many decimal digits in '" + std::string(text) + "'");
  }
  std::int64_t scale = 1;
  for (std::size_t i = 0; i < frac_part.size(); ++i) scale *= 10;
  std::int64_t whole = int_part.empty() ? 0 : parse_int(int_part, text);
  std::int64_t frac = frac_part.empty() ? 0 : parse_int(frac_part, text);
  if (whole > (std::numeric_limits<std::int64_t>::max() - frac) / scale) {
    throw DomainError("rational out of range: '" + std::string(text) + "'");
  }
  Rational r(whole * scale + frac, scale);
  return negative ? -r : r;
}

std::string to_string(const Rational& r) {
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

std::int64_t floor(const Rational& r) {
  std::int64_t q = r.numerator() / r.denominator();
  if (r.numerator() % r.denominator() != 0 && r.numerator() < 0) --q;
  return q;
}

namespace {

// Simplest fraction in [lo, hi], 0 <= lo <= hi.
Rational simplest_between(long double lo, long double hi, std::int64_t max_den, int depth) {
  if (depth > 90) throw NumericError("rationalize: continued fraction did not terminate");
  long double fl = std::floor(lo);
  if (fl == lo) return Rational(static_cast<std::int64_t>(fl));
  if (fl + 1 <= hi) return Rational(static_cast<std::int64_t>(fl) + 1);
  Rational tail = simplest_between(1.0L / (hi - fl), 1.0L / (lo - fl), max_den, depth + 1);
  Rational result = Rational(static_cast<std::int64_t>(fl)) + Rational(1) / tail;
  if (result.denominator() > max_den) {
    throw NumericError("rationalize: denominator exceeds limit");
  }
  return result;
}

}  // namespace

Rational rationalize(double x, double tolerance, std::int64_t max_denominator) {
  if (!std::isfinite(x)) throw NumericError("rationalize: non-finite value");
  if (x < 0) return -rationalize(-x, tolerance, max_denominator);
  long double lo = std::max(0.0L, static_cast<long double>(x) - tolerance);
  long double hi = static_cast<long double>(x) + tolerance;
  return simplest_between(lo, hi, max_denominator, 0);
}

}  // namespace schedrate
