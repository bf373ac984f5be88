// Acceptance run: one PASS/FAIL line per criterion, each with its timing.
// Exit status is non-zero if any criterion fails.

#include <chrono>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bergman/b1.hpp"
#include "bergman/exterior.hpp"
#include "bergman/geometry.hpp"
#include "bergman/model_kernels.hpp"
#include "bergman/oscillator.hpp"
#include "bergman/perturbation.hpp"
#include "bergman/selftest.hpp"

using namespace bergman;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool ok = true;
    std::vector<std::string> failures;
    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (failures.size() < 8) failures.push_back(what);
        }
    }
};

ExactScalar r(long a, long b = 1) { return ExactScalar::rational(a, b); }

// Seeded jets of the intermediate-display batch: 20 random degree-4 potentials plus flat and FS.
std::vector<GeometryJet> display_batch() {
    std::vector<GeometryJet> jets;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) jets.push_back(random_jet(2, 1, 1, seed));
    jets.push_back(flat_jet(2, 1));
    jets.push_back(fubini_study_jet(2, 1));
    return jets;
}

// Every pipeline jet with n <= 2 and q in {0,1,2}: flat, FS and seeded random, E of rank 1 and 2.
std::vector<GeometryJet> pipeline_jets() {
    std::vector<GeometryJet> jets;
    for (int n = 1; n <= 2; ++n)
        for (int q = 0; q <= n; ++q)
            for (int rk = 1; rk <= 2; ++rk) {
                jets.push_back(flat_jet(n, q, rk));
                jets.push_back(fubini_study_jet(n, q, rk));
                for (std::uint64_t seed = 100; seed < 103; ++seed) jets.push_back(random_jet(n, q, rk, seed));
            }
    return jets;
}

TwoPointState random_state(std::mt19937_64& rng, FibreShape s, int max_deg) {
    TwoPointState st(s);
    std::uniform_int_distribution<int> coin(-3, 3);
    for (int t = 0; t < 3; ++t) {
        Exponents k{};
        int budget = max_deg;
        for (int block = 0; block < 4; ++block)
            for (int j = 0; j < s.n; ++j) {
                const int e = std::uniform_int_distribution<int>(0, std::min(budget, 2))(rng);
                k.at(block, j) = static_cast<std::uint8_t>(e);
                budget -= e;
            }
        ExteriorEndo m(s);
        for (int a = 0; a < s.dim(); ++a)
            for (int b = 0; b < s.dim(); ++b) {
                const int c = coin(rng);
                if (c != 0 && (a * 7 + b * 3 + t) % 4 == 0) m.set(a, b, ExactScalar(GaussRat(c, coin(rng))));
            }
        st.add(k, m);
    }
    return st;
}

// L_0 recomputed as sum_j b_j b_j^+ must act on each canonical term by 4 pi |alpha|.
bool terms_are_L0_eigenvectors(const TwoPointState& st) {
    for (const auto& [key, endo] : st.terms()) {
        const TwoPointState t = TwoPointState::basis(st.shape(), key, endo);
        TwoPointState l0(st.shape());
        for (int j = 0; j < st.n(); ++j) l0 += apply_b(j, apply_bdag(j, t));
        if (!(l0 == r(4 * key.block_degree(0)) * ExactScalar::pi() * t)) return false;
    }
    return true;
}

Outcome criterion_oracles() {
    Outcome o;
    for (const auto& c : oracle_suite()) o.require(c.ok, c.name);
    return o;
}

Outcome criterion_displays() {
    Outcome o;
    for (const auto& j : display_batch()) {
        const auto subs = sub_results(j);
        o.require(subs.size() == 19, j.id + ": expected 19 named intermediate values");
        for (const auto& s : subs) o.require(s.ok(), j.id + ": " + s.name);
    }
    return o;
}

Outcome criterion_crosscheck() {
    Outcome o;
    std::vector<GeometryJet> jets = display_batch();
    for (auto& j : pipeline_jets()) jets.push_back(std::move(j));
    for (const auto& j : jets) o.require(b1_engine(j).endo == b1_formula(j).endo, j.id);
    return o;
}

Outcome criterion_products() {
    Outcome o;
    for (int n = 1; n <= 3; ++n)
        for (int q = 0; q <= n; ++q) {
            const GeometryJet j = fubini_study_jet(n, q);
            const ExteriorEndo expect = project_det_W(shape_of(j)) * ExactScalar(n - 2 * q);
            o.require(b1_formula(j).endo == expect, j.id + " closed form");
            o.require(b1_engine(j).endo == expect, j.id + " engine");
        }
    const GeometryJet line = fubini_study_jet(1, 0);
    o.require(line.rX == r(8) * ExactScalar::pi(), "scalar curvature of the line");
    const ExteriorEndo one = project_det_W(shape_of(line));
    o.require(b1_formula(line).endo == one, "b1 = 1 on the line");
    o.require(b1_positive(line).endo == one, "positive-case route on the line");
    return o;
}

Outcome criterion_fit() {
    Outcome o;
    for (int n = 1; n <= 3; ++n)
        for (int q = 0; q <= n; ++q) {
            std::vector<std::pair<long, Rational>> samples;
            for (int p = 2; p <= n + 3; ++p) samples.emplace_back(p, cp1_product_trace(p, n, q));
            const auto c = fit_expansion(samples, n);
            const std::string tag = "n=" + std::to_string(n) + " q=" + std::to_string(q);
            o.require(c[0] == 1, tag + ": Tr b0");
            o.require(c[1] == n - 2 * q, tag + ": Tr b1");
            o.require(b1_trace(fubini_study_jet(n, q)) == ExactScalar(c[1]), tag + ": trace formula on the jet");
        }
    return o;
}

Outcome criterion_rrh() {
    Outcome o;
    for (int n = 1; n <= 3; ++n)
        for (int q = 0; q <= n; ++q)
            for (int rk = 1; rk <= 2; ++rk) {
                const RrhReport rep = rrh_coefficients(n, q, rk);
                o.require(rep.consistent, rep.to_json().dump());
            }
    return o;
}

Outcome criterion_identities() {
    Outcome o;
    std::vector<GeometryJet> jets = display_batch();
    for (auto& j : pipeline_jets()) jets.push_back(std::move(j));
    for (int q = 0; q <= 3; ++q) {
        jets.push_back(fubini_study_jet(3, q));
        jets.push_back(random_jet(3, q, 1, 200 + q));
    }
    for (const auto& j : jets) {
        o.require(validate_jet(j).all_ok(), j.id + ": validation");
        bool kahler_checked = false;
        for (const auto& id : identity_suite(j)) {
            o.require(id.ok(), j.id + ": " + id.name);
            if (id.name.rfind("kahler", 0) == 0) kahler_checked = true;
        }
        if (is_kahler(j)) o.require(kahler_checked, j.id + ": Kähler identities evaluated");
    }
    return o;
}

Outcome criterion_properties() {
    Outcome o;
    // Clifford relations, exhaustive for n <= 3.
    for (int n = 1; n <= 3; ++n)
        for (int q = 0; q <= n; ++q) {
            const FibreShape s{n, q, 1};
            for (int i = 0; i < 2 * n; ++i)
                for (int k = 0; k < 2 * n; ++k) {
                    const auto ci = clifford_vector(s, Frame::Real, i), ck = clifford_vector(s, Frame::Real, k);
                    o.require((ci * ck).exact() + (ck * ci).exact() == ExteriorEndo::scalar(s, r(i == k ? -2 : 0)),
                              "Clifford relation");
                }
        }

    // L_0 eigenbasis invariant under 10^4 random oscillator operations.
    {
        std::mt19937_64 rng(2024);
        const FibreShape s{2, 1, 1};
        TwoPointState st = random_state(rng, s, 2);
        std::uniform_int_distribution<int> pick(0, 9), idx(0, 1);
        for (int step = 0; step < 10000; ++step) {
            const int j = idx(rng);
            switch (pick(rng)) {
                case 0: st = apply_b(j, st); break;
                case 1: st = apply_bdag(j, st); break;
                case 2: st = mul_xi(j, st); break;
                case 3: st = mul_xibar(j, st); break;
                case 4: st = differentiate_xi(j, st); break;
                case 5: st = differentiate_xibar(j, st); break;
                case 6: st = apply_L20(st); break;
                case 7: st = resolvent_L20(project_Nperp(st)); break;
                case 8: st = project_Nperp(st) + project_N(st); break;
                default: {
                    Exponents m{};
                    m.at(2 + idx(rng), j) = 1;
                    st = mul_primed(m, st);
                }
            }
            o.require(terms_are_L0_eigenvectors(st), "L0 eigenbasis after step " + std::to_string(step));
            if (st.is_zero() || st.max_degree() > 5) st = random_state(rng, s, 2);
        }
    }

    // Self-adjointness of O1, O2, L_2^0 and of both b1 routes.
    {
        const GeometryJet j = random_jet(2, 1, 1, 1);
        const FibreShape s = shape_of(j);
        std::vector<TwoPointState> states;
        for (int w = 0; w < s.dim(); ++w) {
            ExteriorEndo e(s);
            e.set(w, w, r(1));
            const TwoPointState v = TwoPointState::vacuum(s, e);
            states.push_back(v);
            states.push_back(apply_b(0, v));
        }
        const std::vector<std::pair<std::string, ModelOperator>> ops = {
            {"O1", build_O1(j)}, {"O2", build_O2(j)}, {"L20", build_L20(s)}};
        for (const auto& [name, op] : ops)
            for (const auto& a : states)
                for (const auto& b : states)
                    o.require(compose(adjoint(op.apply(a)), b) == compose(adjoint(a), op.apply(b)),
                              name + " self-adjoint");
        for (const auto& jj : pipeline_jets()) {
            o.require(b1_formula(jj).endo.is_self_adjoint(), jj.id + ": closed form self-adjoint");
            o.require(b1_engine(jj).endo.is_self_adjoint(), jj.id + ": engine self-adjoint");
        }
    }

    // Round trip between the oscillator basis and polynomial-Gaussian form.
    {
        std::mt19937_64 rng(5);
        for (int t = 0; t < 200; ++t) {
            const int n = 1 + t % 2;
            const TwoPointState st = random_state(rng, FibreShape{n, t % (n + 1), 1}, 4);
            o.require(from_poly(to_poly(st)) == st, "round trip");
        }
    }

    // Associativity of kernel composition for n = 1.
    {
        std::mt19937_64 rng(13);
        const FibreShape s{1, 0, 1};
        for (int t = 0; t < 20; ++t) {
            const TwoPointState a = random_state(rng, s, 2), b = random_state(rng, s, 2), c = random_state(rng, s, 2);
            o.require(compose(compose(a, b), c) == compose(a, compose(b, c)), "compose associativity");
        }
    }
    return o;
}

Outcome criterion_numeric_witness() {
    Outcome o;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    std::vector<std::complex<double>> pts;
    for (int i = 0; i < 20; ++i) {
        const double re = u(rng), im = u(rng);
        pts.emplace_back(re, im);
    }
    double worst = 0.0;
    for (int p = 0; p <= 30; ++p) {
        const SectionsKernelReport rep = cp1_sections_kernel(p, pts);
        worst = std::max(worst, rep.max_deviation);
        o.require(rep.max_deviation < 1e-9, "p=" + std::to_string(p));
    }
    std::ostringstream os;
    os << "max deviation " << std::scientific << std::setprecision(2) << worst;
    if (o.ok) o.failures.push_back(os.str());
    return o;
}

struct Criterion {
    int number;
    std::string title;
    double time_limit_s;  // 0: none stated
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "oracle suite", 1.0, criterion_oracles},
        {2, "intermediate values on 20 random + flat + FS jets", 300.0, criterion_displays},
        {3, "engine equals closed form on batch and pipeline jets", 600.0, criterion_crosscheck},
        {4, "product of projective lines: b1 = (n-2q) I_det", 0.0, criterion_products},
        {5, "expansion fit: Tr b0 = 1, Tr b1 = n-2q", 0.0, criterion_fit},
        {6, "Riemann-Roch-Hirzebruch coefficients", 0.0, criterion_rrh},
        {7, "tensor identity suite", 0.0, criterion_identities},
        {8, "property suites", 0.0, criterion_properties},
        {9, "numeric section-kernel witness", 10.0, criterion_numeric_witness},
    };
    bool all = true;
    for (const auto& c : criteria) {
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.ok = false;
            o.failures.push_back(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        if (c.time_limit_s > 0 && secs >= c.time_limit_s) {
            o.ok = false;
            o.failures.push_back("time limit " + std::to_string(c.time_limit_s) + " s exceeded");
        }
        all = all && o.ok;
        std::cout << "criterion " << c.number << ": " << (o.ok ? "PASS" : "FAIL") << " — " << c.title << " ("
                  << std::fixed << std::setprecision(2) << secs << " s)";
        if (o.ok && !o.failures.empty()) std::cout << " [" << o.failures.front() << "]";
        std::cout << "\n";
        if (!o.ok)
            for (const auto& f : o.failures) std::cout << "    " << f << "\n";
        std::cout.flush();
    }
    return all ? 0 : 1;
}
