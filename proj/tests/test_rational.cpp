#include <doctest.h>

#include <random>

#include "schedrate/errors.hpp"
#include "schedrate/rational.hpp"

using namespace schedrate;

TEST_CASE("parse_rational accepts integers, decimals and fractions") {
  CHECK(parse_rational("3") == Rational(3));
  CHECK(parse_rational("-2") == Rational(-2));
  CHECK(parse_rational("1.5") == Rational(3, 2));
  CHECK(parse_rational("0.125") == Rational(1, 8));
  CHECK(parse_rational("2/3") == Rational(2, 3));
  CHECK(parse_rational("4/6") == Rational(2, 3));
}

TEST_CASE("parse_rational rejects junk") {
  for (const char* bad : {"", "abc", "1/0", "1.2.3", "1/", "/2", "1e3", "1 2"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_rational(bad), DomainError);
  }
}

TEST_CASE("to_string always writes p/q") {
  CHECK(to_string(Rational(2, 3)) == "2/3");
  CHECK(to_string(Rational(3)) == "3/1");
  CHECK(to_string(Rational(-1, 2)) == "-1/2");
}

TEST_CASE("floor rounds toward minus infinity") {
  CHECK(floor(Rational(7, 2)) == 3);
  CHECK(floor(Rational(-7, 2)) == -4);
  CHECK(floor(Rational(6, 3)) == 2);
}

TEST_CASE("rationalize recovers small fractions from doubles") {
  CHECK(rationalize(4.0 / 9.0) == Rational(4, 9));
  CHECK(rationalize(2.0 / 3.0) == Rational(2, 3));
  CHECK(rationalize(1.5) == Rational(3, 2));
  CHECK(rationalize(0.0) == Rational(0));
  CHECK(rationalize(5.0 / 6.0 * 1 + 1.0 / 6.0 * 3) == Rational(4, 3));
}

TEST_CASE("round trip through text for random fractions") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> num(-100000, 100000), den(1, 100000);
  for (int i = 0; i < 2000; ++i) {
    const Rational r(num(rng), den(rng));
    CHECK(parse_rational(to_string(r)) == r);
    CHECK(rationalize(to_double(r), 1e-12) == r);
  }
}
