#include <doctest.h>

#include "bergman/model_kernels.hpp"

using namespace bergman;

namespace {
std::vector<Rational> ints(std::initializer_list<long> v) {
    std::vector<Rational> out;
    for (long x : v) out.emplace_back(x);
    return out;
}
}  // namespace

TEST_CASE("traces on products of projective lines") {
    CHECK(cp1_product_trace(5, 1, 0) == 6);
    CHECK(cp1_product_trace(5, 1, 1) == 4);
    CHECK(cp1_product_trace(7, 2, 1) == 48);
    CHECK_THROWS_AS(cp1_product_trace(1, 1, 0), std::invalid_argument);
}

TEST_CASE("exact fits") {
    CHECK(fit_expansion({{2, 3}, {3, 4}}, 1) == ints({1, 1}));
    CHECK(fit_expansion({{2, 1}, {3, 2}}, 1) == ints({1, -1}));
    CHECK(fit_expansion({{2, 7}, {9, 7}}, 0) == ints({7}));
    CHECK_THROWS_AS(fit_expansion({{2, 3}}, 1), InsufficientSamples);
    CHECK_THROWS_AS(fit_expansion({{2, 3}, {2, 3}}, 1), InsufficientSamples);
    CHECK_THROWS_AS(fit_expansion({{2, 3}, {2, 4}}, 0), std::invalid_argument);
    CHECK_THROWS_AS(fit_expansion({{1, 1}, {2, 4}, {3, 9}}, 1), std::invalid_argument);
    // Independent of which samples are used.
    for (int n = 1; n <= 3; ++n)
        for (int q = 0; q <= n; ++q) {
            std::vector<std::pair<long, Rational>> a, b;
            for (int p = 2; p <= n + 2; ++p) a.emplace_back(p, cp1_product_trace(p, n, q));
            for (int p = 10; p <= 10 + 2 * n + 1; p += 2) b.emplace_back(p, cp1_product_trace(p, n, q));
            CHECK(fit_expansion(a, n) == fit_expansion(b, n));
            CHECK(fit_expansion(a, n)[0] == 1);
            CHECK(fit_expansion(a, n)[1] == n - 2 * q);
        }
    const auto t = cp1_product_table(2, 1, 2, 5, true);
    CHECK(t["coefficients"] == nlohmann::json::array({"1", "0", "-1"}));
}

TEST_CASE("Riemann-Roch-Hirzebruch coefficients") {
    CHECK(rrh_coefficients(1, 0, 1).coefficients() == std::pair<Rational, Rational>(1, 1));
    CHECK(rrh_coefficients(2, 1, 1).coefficients() == std::pair<Rational, Rational>(1, 0));
    CHECK(rrh_coefficients(2, 2, 1).coefficients() == std::pair<Rational, Rational>(1, -2));
    CHECK(rrh_coefficients(2, 2, 2).coefficients() == std::pair<Rational, Rational>(2, -4));
    for (int n = 1; n <= 3; ++n)
        for (int q = 0; q <= n; ++q)
            for (int rk = 1; rk <= 2; ++rk) CHECK(rrh_coefficients(n, q, rk).consistent);
    CHECK_THROWS(rrh_coefficients(4, 0, 1));
}

TEST_CASE("section kernel of O(p) is constant") {
    CHECK(cp1_sections_kernel(3, {{0, 0}}).values[0] == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(cp1_sections_kernel(3, {{1, 0}}).values[0] == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(cp1_sections_kernel(0, {{2, 5}}).values[0] == 1.0);
    CHECK(cp1_sections_kernel(30, {{0.5, -2}, {7, 1}}).max_deviation < 1e-9);
    CHECK_THROWS(cp1_sections_kernel(61, {}));
}
