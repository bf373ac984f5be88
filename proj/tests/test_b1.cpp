#include <doctest.h>

#include "bergman/b1.hpp"

using namespace bergman;

TEST_CASE("flat jet gives zero") {
    for (int n = 1; n <= 3; ++n)
        for (int q = 0; q <= n; ++q) {
            const B1Result r = b1_formula(flat_jet(n, q));
            CHECK(r.endo.is_zero());
            CHECK(r.trace.is_zero());
        }
}

TEST_CASE("product of projective lines gives (n - 2q) on det") {
    for (int n = 1; n <= 3; ++n)
        for (int q = 0; q <= n; ++q) {
            const GeometryJet j = fubini_study_jet(n, q);
            const FibreShape s = shape_of(j);
            const B1Result r = b1_formula(j);
            CHECK(r.endo == project_det_W(s) * ExactScalar(n - 2 * q));
            CHECK(b1_trace(j) == ExactScalar(n - 2 * q));
        }
    const GeometryJet line = fubini_study_jet(1, 0);
    CHECK(b1_positive(line).endo == ExteriorEndo::identity(shape_of(line)) * ExactScalar(1) * project_det_W(shape_of(line)));
}

TEST_CASE("trace, self-adjointness and specializations on pipeline jets") {
    for (int n = 1; n <= 2; ++n)
        for (int q = 0; q <= n; ++q)
            for (std::uint64_t seed : {1u, 2u, 3u}) {
                const GeometryJet j = random_jet(n, q, 1 + static_cast<int>(seed % 2), seed);
                INFO(j.id);
                const B1Result r = b1_formula(j);
                CHECK(r.trace == r.endo.trace());
                CHECK(b1_trace(j) == r.trace);
                CHECK(r.endo.is_self_adjoint());
                CHECK(r.endo == project_degree(shape_of(j), q) * r.endo * project_degree(shape_of(j), q));
                if (is_kahler(j)) {
                    CHECK(b1_kahler(j).endo == r.endo);
                } else {
                    CHECK_THROWS_AS(b1_kahler(j), NotKahler);
                }
                if (q == 0) {
                    CHECK(b1_positive(j).endo == r.endo);
                } else {
                    CHECK_THROWS_AS(b1_positive(j), NotPositive);
                }
            }
}

TEST_CASE("result serialization and table") {
    const B1Result r = b1_formula(fubini_study_jet(2, 1));
    CHECK(r.to_json()["route"] == "closed-form");
    CHECK(b1_table(b1_formula(flat_jet(1, 0))).find("(zero matrix)") != std::string::npos);
    CHECK(b1_table(r).find("trace: 0") != std::string::npos);
}
