#include <doctest.h>

#include "bergman/perturbation.hpp"

using namespace bergman;

namespace {

// Low-degree spanning states: vacuum, b_0 vacuum and xi_last vacuum on each diagonal fibre unit.
std::vector<TwoPointState> spanning_states(FibreShape s) {
    std::vector<TwoPointState> out;
    for (int w = 0; w < s.dim(); w += 1 + s.dim() / 4) {
        ExteriorEndo e(s);
        e.set(w, w, ExactScalar(1));
        const TwoPointState v = TwoPointState::vacuum(s, e);
        out.push_back(v);
        out.push_back(apply_b(0, v));
        out.push_back(mul_xi(s.n - 1, v));
    }
    return out;
}

bool self_adjoint_on(const ModelOperator& op, const std::vector<TwoPointState>& states) {
    for (const auto& a : states)
        for (const auto& b : states)
            if (!(compose(adjoint(op.apply(a)), b) == compose(adjoint(a), op.apply(b)))) return false;
    return true;
}

}  // namespace

TEST_CASE("flat jet: operators and b1 vanish") {
    const GeometryJet j = flat_jet(2, 1);
    CHECK(build_O1(j).is_zero());
    CHECK(build_O2(j).is_zero());
    CHECK(b1_engine(j).endo.is_zero());
}

TEST_CASE("engine equals the closed form") {
    std::vector<GeometryJet> jets;
    for (int n = 1; n <= 2; ++n)
        for (int q = 0; q <= n; ++q) {
            jets.push_back(fubini_study_jet(n, q));
            jets.push_back(random_jet(n, q, 1, 10 + n + q));
        }
    jets.push_back(random_jet(2, 1, 2, 7));
    jets.push_back(fubini_study_jet(3, 1));
    for (const auto& j : jets) {
        INFO(j.id);
        const F2Terms f = compute_F2_origin(j, true);
        CHECK(f.direct_checked);
        CHECK(f.direct_agrees);
        CHECK(f.terms.size() == 6);
        const B1Result e = b1_from_F2(j, f);
        CHECK(e.route == "engine");
        CHECK(e.endo == b1_formula(j).endo);
        CHECK(e.endo.is_self_adjoint());
        CHECK(f.to_json()["terms"].size() == 6);
    }
}

TEST_CASE("O1 vanishes between kernel projections") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const GeometryJet j = random_jet(2, 1, 1, seed);
        const FibreShape s = shape_of(j);
        CHECK(project_N(build_O1(j).apply(TwoPointState::vacuum(s, project_det_W(s)))).is_zero());
    }
}

TEST_CASE("named intermediate values match their closed expressions") {
    for (const auto& j : {random_jet(2, 1, 1, 21), random_jet(2, 1, 2, 22), random_jet(2, 0, 1, 23),
                          random_jet(2, 2, 1, 24), fubini_study_jet(2, 1), flat_jet(2, 1)}) {
        const auto subs = sub_results(j);
        CHECK(subs.size() == 19);
        for (const auto& sr : subs) {
            INFO(j.id << " " << sr.name);
            CHECK(sr.ok());
        }
    }
}

TEST_CASE("model operators are self-adjoint") {
    const GeometryJet j = random_jet(2, 1, 1, 1);
    const auto states = spanning_states(shape_of(j));
    CHECK(self_adjoint_on(build_O1(j), states));
    CHECK(self_adjoint_on(build_O2(j), states));
    CHECK(self_adjoint_on(build_L20(shape_of(j)), states));
}

TEST_CASE("formal adjoint is an involution") {
    const GeometryJet j = random_jet(2, 1, 1, 2);
    const ModelOperator o1 = build_O1(j);
    const auto states = spanning_states(shape_of(j));
    const ModelOperator back = formal_adjoint(formal_adjoint(o1));
    for (const auto& s : states) CHECK(back.apply(s) == o1.apply(s));
}
