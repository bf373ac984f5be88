#include <doctest.h>

#include "bergman/series.hpp"

using namespace bergman;

namespace {
Series x(int nv, int i) { return Series::variable(nv, i); }
ExactScalar r(long a, long b = 1) { return ExactScalar::rational(a, b); }
}  // namespace

TEST_CASE("products track the truncation cap") {
    Series a = (Series::constant(2, r(1)) + x(2, 0)).with_cap(3);
    Series b = x(2, 1).with_cap(2);
    Series p = a * b;
    CHECK(p.cap() == 2);
    CHECK(p.coeff(Mono{1, 1}) == r(1));
    CHECK_THROWS_AS(p.coeff(Mono{2, 1}), TruncationInsufficient);
}

TEST_CASE("inverse and composition") {
    Series one_plus_x = (Series::constant(1, r(1)) + x(1, 0)).with_cap(5);
    Series inv = one_plus_x.inverse();
    Series prod = (inv * one_plus_x).with_cap(5);
    CHECK(prod.at_zero() == r(1));
    for (int k = 1; k <= 5; ++k) CHECK(prod.coeff(Mono{static_cast<std::uint8_t>(k)}).is_zero());
    CHECK(inv.coeff(Mono{3}) == r(-1));
    // (1 + x) o (2x) = 1 + 2x
    Series c = one_plus_x.compose({r(2) * x(1, 0)});
    CHECK(c.coeff(Mono{1}) == r(2));
}

TEST_CASE("derivative and conjugation") {
    Series s = r(3) * x(2, 0) * x(2, 0) * x(2, 1) + ExactScalar::i() * x(2, 1);
    Series d = s.derivative(0);
    CHECK(d.coeff(Mono{1, 1}) == r(6));
    CHECK(s.conj().coeff(Mono{0, 1}) == -ExactScalar::i());
}

TEST_CASE("matrix square root by Newton iteration") {
    SMat a = smat_identity(2, 1);
    a[0][1] = x(1, 0).with_cap(4);
    a[1][0] = x(1, 0).with_cap(4);
    a[0][0] = (Series::constant(1, r(1)) + x(1, 0) * x(1, 0)).with_cap(4);
    SMat s = smat_sqrt(a);
    SMat sq = smat_mul(s, s);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k <= 4; ++k) CHECK(sq[i][j].coeff(Mono{static_cast<std::uint8_t>(k)}) == a[i][j].coeff(Mono{static_cast<std::uint8_t>(k)}));
    SMat bad = smat_identity(2, 1);
    bad[0][0] = Series::constant(1, r(2));
    CHECK_THROWS(smat_sqrt(bad));
}
