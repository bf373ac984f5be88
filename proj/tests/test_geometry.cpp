#include <doctest.h>

#include "bergman/geometry.hpp"

using namespace bergman;

namespace {
bool all_identities_hold(const GeometryJet& j) {
    for (const auto& r : identity_suite(j))
        if (!r.ok()) return false;
    return true;
}
}  // namespace

TEST_CASE("flat jet has no curvature beyond the model form") {
    for (int n = 1; n <= 3; ++n)
        for (int q = 0; q <= n; ++q) {
            const GeometryJet j = flat_jet(n, q);
            CHECK(validate_jet(j).all_ok());
            CHECK(j.RTX.is_zero());
            CHECK(j.dRL1.is_zero());
            CHECK(j.dRL2.is_zero());
            CHECK(j.Tas.is_zero());
            CHECK(j.rX.is_zero());
            CHECK_FALSE(j.RL0.is_zero());
            for (const auto& r : identity_suite(j)) {
                CHECK(r.lhs.is_zero());
                CHECK(r.rhs.is_zero());
            }
        }
}

TEST_CASE("Fubini-Study line has scalar curvature 8 pi") {
    const GeometryJet j = fubini_study_jet(1, 0);
    CHECK(j.rX == ExactScalar(8) * ExactScalar::pi());
    CHECK(validate_jet(j).all_ok());
    CHECK(is_kahler(j));
}

TEST_CASE("pipeline jets validate and satisfy the identity suite") {
    for (int n = 1; n <= 2; ++n)
        for (int q = 0; q <= n; ++q)
            for (std::uint64_t seed : {1u, 2u}) {
                const GeometryJet j = random_jet(n, q, 1 + static_cast<int>(seed % 2), seed);
                INFO(j.id);
                CHECK(validate_jet(j).all_ok());
                CHECK(all_identities_hold(j));
                if (q == 0) CHECK(j.Tas.is_zero());
            }
    const GeometryJet j3 = random_jet(3, 1, 1, 5);
    CHECK(validate_jet(j3).all_ok());
    CHECK(all_identities_hold(j3));
}

TEST_CASE("mixed signature produces torsion, Kähler identities apply otherwise") {
    const GeometryJet mixed = random_jet(2, 1, 1, 3);
    CHECK_FALSE(is_kahler(mixed));
    const GeometryJet kahler = random_jet(2, 0, 1, 3);
    CHECK(is_kahler(kahler));
    bool saw_kahler_identity = false;
    for (const auto& r : identity_suite(kahler))
        if (r.name.rfind("kahler", 0) == 0) saw_kahler_identity = true;
    CHECK(saw_kahler_identity);
    CHECK(lambda_scalars(kahler).dLambdaT.is_zero());
}

TEST_CASE("corrupted curvature fails validation") {
    GeometryJet j = random_jet(2, 1, 1, 4);
    j.RTX(0, 1, 0, 1) += ExactScalar(1);
    CHECK_FALSE(validate_jet(j).all_ok());
}

TEST_CASE("jet JSON round trip") {
    const GeometryJet j = random_jet(2, 1, 2, 9);
    CHECK(jet_from_json(jet_to_json(j)) == j);
}

TEST_CASE("potentials") {
    const nlohmann::json fs = {{"z1 z̄1", "1/2"}, {"z1^2 zb1^2", "-1/4*pi"}};
    const ComplexPoly p = parse_potential(fs, 1);
    CHECK(p.is_real());
    CHECK(p.degree() == 4);
    CHECK_THROWS_AS(parse_potential(nlohmann::json{{"w1", "1"}}, 1), InvalidPotential);
    const ComplexPoly std2 = standard_potential(2, 1);
    CHECK(validate_jet(jet_from_potential(std2, {}, 2, 1)).all_ok());
    CHECK_THROWS_AS(jet_from_potential(standard_potential(2, 1), {}, 2, 0), DegenerateCurvature);
}
