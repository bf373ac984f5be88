#include <doctest.h>

#include "bergman/exact.hpp"

using namespace bergman;

TEST_CASE("rationals are kept canonical") {
    CHECK(ExactScalar::rational(2714, 648) == ExactScalar::rational(1357, 324));
    CHECK(ExactScalar::rational(4, 2) == ExactScalar(2));
    CHECK(ExactScalar::rational(0, 5).is_zero());
}

TEST_CASE("pi-Laurent arithmetic") {
    const ExactScalar pi = ExactScalar::pi(), i = ExactScalar::i();
    CHECK(pi * ExactScalar::pi(-1) == ExactScalar(1));
    CHECK(i * i == ExactScalar(-1));
    CHECK((pi + ExactScalar(1)) - pi == ExactScalar(1));
    CHECK((ExactScalar(3) * pi).inverse() == ExactScalar::rational(1, 3) * ExactScalar::pi(-1));
    CHECK_THROWS_AS((pi + ExactScalar(1)).inverse(), std::domain_error);
    CHECK((i * pi).conj() == -(i * pi));
    CHECK((ExactScalar(2) + i).real_part() == ExactScalar(2));
    CHECK((ExactScalar(2) + i).imag_part() == ExactScalar(1));
    CHECK(ExactScalar(1).times_pi(2) == ExactScalar::pi(2));
}

TEST_CASE("text round trip") {
    const ExactScalar x = ExactScalar::rational(-3, 7) * ExactScalar::pi(-2) + ExactScalar::i() * ExactScalar::pi() +
                          ExactScalar::rational(5, 2);
    CHECK(ExactScalar::parse(x.to_string()) == x);
    CHECK(ExactScalar::parse("1/2*π") == ExactScalar::rational(1, 2) * ExactScalar::pi());
    CHECK(ExactScalar::from_json(x.to_json()) == x);
    CHECK(ExactScalar().to_string() == "0");
}

TEST_CASE("numeric reporting") {
    CHECK(ExactScalar::pi().to_double_re() == doctest::Approx(3.141592653589793));
    CHECK((ExactScalar::i() * ExactScalar(2)).to_double_im() == doctest::Approx(2.0));
}
