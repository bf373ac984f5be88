#include <doctest.h>

#include <random>

#include "bergman/exterior.hpp"

using namespace bergman;

namespace {
ExactScalar r(long a, long b = 1) { return ExactScalar::rational(a, b); }

std::vector<ExactScalar> random_two_form(std::mt19937_64& rng, int d) {
    std::uniform_int_distribution<int> c(-4, 4);
    std::vector<ExactScalar> a(static_cast<std::size_t>(d * d));
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            ExactScalar v(GaussRat(c(rng), c(rng)));
            a[i * d + j] = v;
            a[j * d + i] = -v;
        }
    return a;
}
}  // namespace

TEST_CASE("Clifford relations c(e_i)c(e_j) + c(e_j)c(e_i) = -2 delta_ij") {
    for (int n = 1; n <= 3; ++n)
        for (int q = 0; q <= n; ++q) {
            const FibreShape s{n, q, 1};
            for (int i = 0; i < 2 * n; ++i)
                for (int j = 0; j < 2 * n; ++j) {
                    const auto ci = clifford_vector(s, Frame::Real, i), cj = clifford_vector(s, Frame::Real, j);
                    const ExteriorEndo anti = (ci * cj).exact() + (cj * ci).exact();
                    CHECK(anti == ExteriorEndo::scalar(s, r(i == j ? -2 : 0)));
                }
        }
}

TEST_CASE("single Clifford factor carries sqrt 2") {
    const FibreShape s{1, 0, 1};
    const Sqrt2Endo c = clifford_vector(s, Frame::VBar, 0);
    CHECK(c.half % 2 == 1);
    CHECK_THROWS(c.exact());
    CHECK_THROWS(parse_frame("w"));
}

TEST_CASE("degree operator and det projection") {
    const FibreShape s{3, 1, 2};
    const ExteriorEndo w = omega_d(s);
    CHECK(w.is_self_adjoint());
    CHECK(omega_d_eigenvalue(s, det_word(s)).is_zero());
    const auto& wb = WordBasis::get(3);
    for (int idx = 0; idx < s.words(); ++idx) {
        const auto mask = wb.mask_at(idx);
        if (mask != det_word(s)) CHECK(omega_d_eigenvalue(s, mask).to_double_re() <= -2 * 3.14159);
    }
    const ExteriorEndo det = project_det_W(s);
    CHECK(det * det == det);
    CHECK(det.trace() == r(2));
    CHECK(omega_d_eigenvalue(FibreShape{1, 0, 1}, 0b1) == r(-2) * ExactScalar::pi());
}

TEST_CASE("two-form action matches brute-force Clifford products") {
    std::mt19937_64 rng(1);
    for (int n = 1; n <= 3; ++n) {
        const FibreShape s{n, n / 2, 1};
        for (int t = 0; t < 5; ++t) {
            const auto a = random_two_form(rng, 2 * n);
            ExteriorEndo brute(s);
            for (int i = 0; i < 2 * n; ++i)
                for (int j = 0; j < 2 * n; ++j)
                    if (!a[i * 2 * n + j].is_zero())
                        brute += (clifford_vector(s, Frame::Real, i) * clifford_vector(s, Frame::Real, j)).exact() *
                                 (a[i * 2 * n + j] * r(1, 4));
            CHECK(action_two_form(s, a) == brute);
            CHECK(two_form_blocks(s, a) == brute);
        }
    }
    CHECK(action_two_form(FibreShape{2, 1, 1}, std::vector<ExactScalar>(16)).is_zero());
}

// The block formula is stated for c(A) = sum_{i<j} A(e_i,e_j) c(e_i) c(e_j), twice the 1/4-normalized action.
TEST_CASE("compressed two-form block formula equals Clifford image composed with det projection") {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 50; ++t) {
        const int n = 1 + t % 3;
        const FibreShape s{n, t % (n + 1), 1};
        const auto a = random_two_form(rng, 2 * n);
        CHECK(compress_two_form_on_det(s, a) == action_two_form(s, a) * ExactScalar(2) * project_det_W(s));
    }
}

TEST_CASE("Clifford image of forms") {
    const FibreShape s{1, 0, 1};
    RealForm b{2, 2, std::vector<ExactScalar>(4)};
    b.comp[1] = r(1);
    b.comp[2] = r(-1);
    CHECK(clifford_of_form(s, b) ==
          (clifford_vector(s, Frame::Real, 0) * clifford_vector(s, Frame::Real, 1)).exact());
    RealForm zero{2, 2, std::vector<ExactScalar>(4)};
    CHECK(clifford_of_form(s, zero).is_zero());
    RealForm bad{2, 2, std::vector<ExactScalar>(4)};
    bad.comp[1] = r(1);
    CHECK_THROWS_AS(clifford_of_form(s, bad), std::invalid_argument);
}

TEST_CASE("endomorphism algebra") {
    const FibreShape s{2, 1, 2};
    CHECK(ExteriorEndo::identity(s).trace() == r(8));
    const ExteriorEndo a = ExteriorEndo::creation(s, 0), b = ExteriorEndo::annihilation(s, 0);
    CHECK(a.adjoint() == b);
    CHECK(a * b + b * a == ExteriorEndo::identity(s));
    CHECK(ExteriorEndo::from_json(s, a.to_json()) == a);
    CHECK(project_degree(s, 1).trace() == r(4));
}
