#include <doctest.h>

#include <random>

#include "bergman/oscillator.hpp"

using namespace bergman;

namespace {

ExactScalar r(long a, long b = 1) { return ExactScalar(Rational(a, b)); }
ExactScalar pi(int k = 1) { return ExactScalar::pi(k); }

FibreShape shape(int n, int q, int rk = 1) { return {n, q, rk}; }

TwoPointState random_state(std::mt19937_64& rng, FibreShape s, int max_deg) {
    TwoPointState st(s);
    std::uniform_int_distribution<int> coin(-3, 3);
    for (int t = 0; t < 4; ++t) {
        Exponents k{};
        int budget = max_deg;
        for (int block = 0; block < 4; ++block)
            for (int j = 0; j < s.n; ++j) {
                int e = std::uniform_int_distribution<int>(0, std::min(budget, 1))(rng);
                k.at(block, j) = static_cast<std::uint8_t>(e);
                budget -= e;
            }
        ExteriorEndo m(s);
        for (int a = 0; a < s.dim(); ++a)
            for (int b = 0; b < s.dim(); ++b) {
                int c = coin(rng);
                if (c != 0 && (a + b + t) % 3 == 0) m.set(a, b, ExactScalar(GaussRat(c, coin(rng))));
            }
        st.add(k, m);
    }
    return st;
}

}  // namespace

TEST_CASE("vacuum is annihilated by b+ and b acts by 2 pi (xibar - xibar')") {
    FibreShape s = shape(2, 1);
    TwoPointState v = TwoPointState::vacuum(s);
    CHECK(evaluate_origin(v) == ExteriorEndo::identity(s));
    for (int j = 0; j < 2; ++j) {
        CHECK(apply_bdag(j, v).is_zero());
        PolyGaussianForm p = to_poly(apply_b(j, v));
        PolyGaussianForm expect(s);
        Exponents a{}, b{};
        a.at(1, j) = 1;
        b.at(3, j) = 1;
        expect.add(a, ExteriorEndo::scalar(s, r(2) * pi()));
        expect.add(b, ExteriorEndo::scalar(s, r(-2) * pi()));
        CHECK(p == expect);
    }
}

TEST_CASE("multiplication by xibar on the vacuum") {
    FibreShape s = shape(1, 0);
    TwoPointState v = TwoPointState::vacuum(s);
    Exponents d{};
    d.at(3, 0) = 1;
    TwoPointState expect = ExactScalar(Rational(1, 2)) * pi(-1) * apply_b(0, v) + mul_primed(d, v);
    CHECK(mul_xibar(0, v) == expect);
}

TEST_CASE("derivative of the vacuum in xi") {
    FibreShape s = shape(2, 0);
    TwoPointState v = TwoPointState::vacuum(s);
    PolyGaussianForm p = to_poly(differentiate_xi(1, v));
    PolyGaussianForm expect(s);
    Exponents a{}, b{};
    a.at(1, 1) = 1;
    b.at(3, 1) = 1;
    expect.add(a, ExteriorEndo::scalar(s, r(-1, 2) * pi()));
    expect.add(b, ExteriorEndo::scalar(s, pi()));
    CHECK(p == expect);
}

TEST_CASE("commutator [b, b+] = -4 pi") {
    std::mt19937_64 rng(7);
    FibreShape s = shape(2, 1);
    for (int t = 0; t < 20; ++t) {
        TwoPointState st = random_state(rng, s, 4);
        for (int j = 0; j < 2; ++j) {
            TwoPointState c = apply_b(j, apply_bdag(j, st)) - apply_bdag(j, apply_b(j, st));
            CHECK(c == r(-4) * pi() * st);
        }
        TwoPointState c01 = apply_b(0, apply_bdag(1, st)) - apply_bdag(1, apply_b(0, st));
        CHECK(c01.is_zero());
    }
}

TEST_CASE("L0 spectrum on basis states") {
    FibreShape s = shape(3, 0);
    TwoPointState v = TwoPointState::vacuum(s);
    CHECK(apply_L0(v).is_zero());
    TwoPointState b1 = apply_b(0, v);
    CHECK(apply_L0(b1) == r(4) * pi() * b1);
    TwoPointState w = apply_b(0, apply_b(1, TwoPointState::basis(s, [] {
                                             Exponents k{};
                                             k.at(1, 2) = 1;
                                             return k;
                                         }(), ExteriorEndo::identity(s))));
    CHECK(apply_L0(w) == r(8) * pi() * w);
}

TEST_CASE("resolvent of L_2^0") {
    FibreShape s = shape(2, 1);
    ExteriorEndo det = project_det_W(s);
    TwoPointState b1 = apply_b(0, TwoPointState::vacuum(s, det));
    CHECK(resolvent_L20(b1) == r(1, 4) * pi(-1) * b1);
    // Word {2}: the j<=q generator missing, the k>q generator present -> defect 2.
    const auto& wb = WordBasis::get(2);
    int idx = wb.index_of(0b10);
    ExteriorEndo e(s);
    e.set(idx, idx, r(1));
    TwoPointState v = TwoPointState::vacuum(s, e);
    CHECK(resolvent_L20(v) == r(1, 8) * pi(-1) * v);
    CHECK_THROWS_AS(resolvent_L20(TwoPointState::vacuum(s, det)), KernelComponent);
    std::mt19937_64 rng(3);
    for (int t = 0; t < 20; ++t) {
        TwoPointState st = random_state(rng, s, 4);
        CHECK(resolvent_L20(apply_L20(st)) == project_Nperp(st));
        CHECK(project_N(st) + project_Nperp(st) == st);
    }
}

TEST_CASE("origin values of resolvent sub-pipelines") {
    // scalar resolvent with h = xi_j
    FibreShape s0 = shape(2, 0);
    TwoPointState v = TwoPointState::vacuum(s0, project_det_W(s0));
    TwoPointState a = resolvent_L20(project_Nperp(mul_xi(1, apply_b(1, v))));
    CHECK(evaluate_origin(a) == ExteriorEndo::scalar(s0, r(-1, 2) * pi(-1)) * project_det_W(s0));
    TwoPointState f = resolvent_L20(project_Nperp(mul_xi(0, mul_xibar(0, v))));
    CHECK(evaluate_origin(f) == ExteriorEndo::scalar(s0, r(-1, 4) * pi(-2)) * project_det_W(s0));
}

TEST_CASE("Gaussian moments and composition") {
    CHECK(gaussian_moment(1, 1) == pi(-1));
    CHECK(gaussian_moment(0, 0) == r(1));
    CHECK(gaussian_moment(2, 1).is_zero());
    FibreShape s = shape(1, 0);
    TwoPointState v = TwoPointState::vacuum(s);
    CHECK(compose(v, v) == v);
    TwoPointState b = apply_b(0, v);
    CHECK(compose(b, v) == b);
    CHECK(compose(v, b).is_zero());
}

TEST_CASE("adjoint is an involution and additive") {
    std::mt19937_64 rng(11);
    FibreShape s = shape(2, 1);
    CHECK(adjoint(TwoPointState::vacuum(s)) == TwoPointState::vacuum(s));
    for (int t = 0; t < 10; ++t) {
        TwoPointState a = random_state(rng, s, 3), b = random_state(rng, s, 3);
        CHECK(adjoint(adjoint(a)) == a);
        CHECK(adjoint(a + b) == adjoint(a) + adjoint(b));
    }
}

TEST_CASE("state to polynomial round trip") {
    std::mt19937_64 rng(5);
    for (int n = 1; n <= 2; ++n)
        for (int t = 0; t < 100; ++t) {
            TwoPointState st = random_state(rng, shape(n, n - 1), 4);
            CHECK(from_poly(to_poly(st)) == st);
        }
}

TEST_CASE("compose is associative for n = 1") {
    std::mt19937_64 rng(13);
    FibreShape s = shape(1, 0);
    for (int t = 0; t < 10; ++t) {
        TwoPointState a = random_state(rng, s, 2), b = random_state(rng, s, 2), c = random_state(rng, s, 2);
        CHECK(compose(compose(a, b), c) == compose(a, compose(b, c)));
    }
}

TEST_CASE("L0 and L_2^0 are self-adjoint") {
    std::mt19937_64 rng(17);
    FibreShape s = shape(2, 1);
    for (int t = 0; t < 10; ++t) {
        TwoPointState a = random_state(rng, s, 3), b = random_state(rng, s, 3);
        CHECK(compose(adjoint(apply_L0(a)), b) == compose(adjoint(a), apply_L0(b)));
        CHECK(compose(adjoint(apply_L20(a)), b) == compose(adjoint(a), apply_L20(b)));
    }
}

TEST_CASE("degree cap is enforced") {
    FibreShape s = shape(1, 0);
    TwoPointState v = TwoPointState::vacuum(s);
    set_degree_cap(3);
    CHECK_THROWS_AS(apply_b(0, apply_b(0, apply_b(0, apply_b(0, v)))), DegreeCapExceeded);
    set_degree_cap(8);
}
