#include <doctest.h>

#include "qsst/rational.hpp"

using qsst::Rational;

TEST_CASE("rational arithmetic reduces eagerly") {
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK((Rational(1, 3) + Rational(1, 6)) == Rational(1, 2));
    CHECK((Rational(3, 4) * Rational(2, 3)) == Rational(1, 2));
    CHECK((Rational(1) - Rational(1, 16)) == Rational(15, 16));
    CHECK((Rational(4, 9) / Rational(2, 9)) == Rational(2));
    CHECK(Rational(1, 2).pow(3) == Rational(1, 8));
    CHECK(Rational(-2, -4) == Rational(1, 2));
    CHECK(Rational(2, -4).str() == "-1/2");
}

TEST_CASE("rational parsing accepts fractions and terminating decimals") {
    CHECK(Rational::parse("3/4") == Rational(3, 4));
    CHECK(Rational::parse("1") == Rational(1));
    CHECK(Rational::parse("0.5") == Rational(1, 2));
    CHECK(Rational::parse("0.25") == Rational(1, 4));
    CHECK(Rational::parse("-0.1") == Rational(-1, 10));
    CHECK_THROWS(Rational::parse(""));
    CHECK_THROWS(Rational(1, 0));
    CHECK_THROWS(Rational(1, 2) / Rational(0));
}

TEST_CASE("rational formatting") {
    CHECK(Rational(3, 4).str() == "3/4");
    CHECK(Rational(8, 4).str() == "2");
    CHECK(Rational(0, 7).str() == "0");
    CHECK(Rational(63, 64).value() == doctest::Approx(0.984375));
}
