#include "bergman/perturbation.hpp"

#include <functional>

namespace bergman {

namespace {

using Word = ModelOperator::Word;

PrimOp Z(int a) { return {Prim::MulZ, a}; }
PrimOp N(int a) { return {Prim::Nabla0, a}; }

struct Cliff {
    FibreShape s;
    std::vector<ExteriorEndo> c;  // c(e_a)

    explicit Cliff(FibreShape sh) : s(sh) {
        const int d = 2 * sh.n;
        for (int a = 0; a < d; ++a) {
            std::vector<ExactScalar> v(d);
            v[a] = ExactScalar(1);
            c.push_back(clifford_real(sh, v));
        }
    }
    // sum_{kl} A(k,l) c(e_k) c(e_l) for a scalar coefficient function.
    template <class F>
    ExteriorEndo pair_sum(F&& coeff) const {
        ExteriorEndo out(s);
        const int d = 2 * s.n;
        for (int k = 0; k < d; ++k)
            for (int l = 0; l < d; ++l) {
                ExactScalar x = coeff(k, l);
                if (!x.is_zero()) out += (c[k] * c[l]) * x;
            }
        return out;
    }
};

std::vector<ExactScalar> bundle_block(const BundleForm& f, int i, int jj) {
    std::vector<ExactScalar> m(static_cast<std::size_t>(f.rk * f.rk));
    for (int e = 0; e < f.rk; ++e)
        for (int g = 0; g < f.rk; ++g) m[e * f.rk + g] = f.at(i, jj, e, g);
    return m;
}

const ExactScalar kThird = ExactScalar::rational(1, 3);

}  // namespace

ModelOperator build_O1_prime(const GeometryJet& j) {
    const FibreShape s = shape_of(j);
    const int d = j.dim();
    ModelOperator op(s);
    for (int i = 0; i < d; ++i)
        for (int a = 0; a < d; ++a) {
            // -(2/3) (d_k R^L)(R, e_i) Z_k nabla_{0,e_i}
            for (int k = 0; k < d; ++k)
                op.add(Word{Z(a), Z(k), N(i)}, ExactScalar::rational(-2, 3) * j.dRL1(k, a, i));
            // -(1/3) (d_i R^L)(R, e_i)
            op.add(Word{Z(a)}, -kThird * j.dRL1(i, a, i));
        }
    return op;
}

ModelOperator build_O1(const GeometryJet& j) {
    const FibreShape s = shape_of(j);
    const int d = j.dim();
    const Cliff cl(s);
    ModelOperator op = build_O1_prime(j);
    // -pi i <(nabla^B_R J) e_k, e_l> c(e_k) c(e_l)
    const ExactScalar f = -(ExactScalar::pi() * ExactScalar::i());
    for (int a = 0; a < d; ++a)
        op.add(Word{Z(a)}, cl.pair_sum([&](int k, int l) { return f * j.nablaBJ(a, k, l); }));
    return op;
}

ModelOperator build_O2_prime(const GeometryJet& j) {
    const FibreShape s = shape_of(j);
    const int d = j.dim();
    ModelOperator op(s);
    for (int i = 0; i < d; ++i)
        for (int a = 0; a < d; ++a) {
            // (1/3) <R^TX(R,e_i)R, e_l> nabla_i nabla_l
            for (int b = 0; b < d; ++b)
                for (int l = 0; l < d; ++l) op.add(Word{Z(a), Z(b), N(i), N(l)}, kThird * j.RTX(a, i, b, l));
            // (2/3) <R^TX(R,e_l)e_l, e_i> nabla_i
            ExactScalar ric;
            for (int l = 0; l < d; ++l) ric += j.RTX(a, l, l, i);
            op.add(Word{Z(a), N(i)}, ExactScalar::rational(2, 3) * ric);
            // -R^E(R, e_i) nabla_i
            op.add(Word{Z(a), N(i)}, -ExteriorEndo::on_bundle(s, bundle_block(j.RE, a, i)));
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l) {
                    const ExactScalar& h = j.dRL2(k, l, a, i);
                    if (h.is_zero()) continue;
                    // -1/2 (sum_{|alpha|=2} d^alpha R^L Z^alpha/alpha!)(R, e_i) nabla_i, the sum being
                    // 1/2 d_k d_l R^L Z_k Z_l.
                    op.add(Word{Z(k), Z(l), Z(a), N(i)}, ExactScalar::rational(-1, 4) * h);
                    // -1/4 d/dZ_i of the same cubic function.
                    const ExactScalar g = ExactScalar::rational(-1, 8) * h;
                    if (k == i) op.add(Word{Z(l), Z(a)}, g);
                    if (l == i) op.add(Word{Z(k), Z(a)}, g);
                    if (a == i) op.add(Word{Z(k), Z(l)}, g);
                }
        }
    // -(1/9) sum_i [ (d_k R^L)(R, e_i) Z_k ]^2
    for (int i = 0; i < d; ++i)
        for (int a = 0; a < d; ++a)
            for (int k = 0; k < d; ++k) {
                const ExactScalar& x = j.dRL1(k, a, i);
                if (x.is_zero()) continue;
                for (int b = 0; b < d; ++b)
                    for (int l = 0; l < d; ++l) {
                        const ExactScalar& y = j.dRL1(l, b, i);
                        if (!y.is_zero()) op.add(Word{Z(a), Z(k), Z(b), Z(l)}, ExactScalar::rational(-1, 9) * x * y);
                    }
            }
    // -(1/12) [L_0, <R^TX(R,e_i)R, e_i>]
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            ExactScalar r;
            for (int i = 0; i < d; ++i) r += j.RTX(a, i, b, i);
            if (r.is_zero()) continue;
            const ExactScalar c = ExactScalar::rational(-1, 12) * r;
            op.add(Word{{Prim::L0, 0}, Z(a), Z(b)}, c);
            op.add(Word{Z(a), Z(b), {Prim::L0, 0}}, -c);
        }
    return op;
}

ModelOperator build_Psi(const GeometryJet& j) {
    const FibreShape s = shape_of(j);
    RealForm dt{j.dim(), 4, j.dTas.data};
    ModelOperator op(s);
    op.add(Word{}, clifford_of_form(s, dt) * ExactScalar::rational(1, 4));
    return op;
}

ModelOperator build_O2(const GeometryJet& j) {
    const FibreShape s = shape_of(j);
    const int d = j.dim();
    const Cliff cl(s);
    ModelOperator op = build_O2_prime(j);
    // -R^{B,Lambda}(R, e_i) nabla_i with R^{B,Lambda} = 1/4 <R^B e_k,e_l> c c + 1/2 Tr R^{T(1,0)}
    for (int a = 0; a < d; ++a)
        for (int i = 0; i < d; ++i) {
            ExteriorEndo m = cl.pair_sum([&](int k, int l) { return ExactScalar::rational(1, 4) * j.RB(a, i, k, l); });
            m += ExteriorEndo::scalar(s, ExactScalar::rational(1, 2) * j.trRT10(a, i));
            op.add(Word{Z(a), N(i)}, -m);
        }
    // -(pi/2) i <(nabla^B nabla^B J)_{(R,R)} e_k, e_l> c c
    const ExactScalar f = -(ExactScalar::rational(1, 2) * ExactScalar::pi() * ExactScalar::i());
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            op.add(Word{Z(a), Z(b)}, cl.pair_sum([&](int k, int l) { return f * j.nablaB2J(a, b, k, l); }));
    // 1/2 (R^E + 1/2 Tr R^{T(1,0)})(e_k,e_l) c c + r^X/4 - Psi
    ExteriorEndo m = cl.pair_sum([&](int k, int l) { return ExactScalar::rational(1, 4) * j.trRT10(k, l); });
    for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
            auto blk = bundle_block(j.RE, k, l);
            bool zero = true;
            for (auto& x : blk) zero = zero && x.is_zero();
            if (zero) continue;
            m += (cl.c[k] * cl.c[l]) * ExteriorEndo::on_bundle(s, blk) * ExactScalar::rational(1, 2);
        }
    m += ExteriorEndo::scalar(s, ExactScalar::rational(1, 4) * j.rX);
    op.add(Word{}, m);
    ModelOperator psi = build_Psi(j);
    op += ExactScalar(-1) * psi;
    return op;
}

ModelOperator build_L20(FibreShape s) {
    ModelOperator op(s);
    op.add(Word{{Prim::L0, 0}}, ExactScalar(1));
    op.add(Word{}, omega_d(s) * ExactScalar(-2));
    return op;
}

ModelOperator formal_adjoint(const ModelOperator& op) {
    ModelOperator out(op.shape());
    for (const auto& [w, c] : op.words()) {
        Word r;
        ExactScalar sign(1);
        for (auto it = w.rbegin(); it != w.rend(); ++it) {
            PrimOp p = *it;
            switch (p.kind) {
                case Prim::MulZ:
                case Prim::L0: break;
                case Prim::Nabla0: sign = -sign; break;
                case Prim::B: p.kind = Prim::Bdag; break;
                case Prim::Bdag: p.kind = Prim::B; break;
                case Prim::MulXi: p.kind = Prim::MulXibar; break;
                case Prim::MulXibar: p.kind = Prim::MulXi; break;
            }
            r.push_back(p);
        }
        out.add(std::move(r), c.adjoint() * sign);
    }
    return out;
}

TwoPointState resolvent_perp(const TwoPointState& s) { return resolvent_L20(project_Nperp(s)); }

nlohmann::json F2Terms::to_json() const {
    nlohmann::json out = nlohmann::json::object();
    nlohmann::json t = nlohmann::json::array();
    for (const auto& [name, e] : terms) t.push_back({{"name", name}, {"value", e.to_json()}});
    out["terms"] = t;
    out["total"] = total.to_json();
    if (direct_checked) out["adjoint_terms_direct_agree"] = direct_agrees;
    return out;
}

F2Terms compute_F2_origin(const GeometryJet& j, bool direct_check) {
    if (!validate_jet(j).all_ok()) throw InvalidJet("jet failed validation");
    const FibreShape s = shape_of(j);
    const ModelOperator o1 = build_O1(j), o2 = build_O2(j);
    const TwoPointState v = TwoPointState::vacuum(s, project_det_W(s));

    const TwoPointState a = resolvent_perp(o1.apply(v));   // R O1 P
    const TwoPointState t1 = resolvent_perp(o1.apply(a));  // R O1 R O1 P
    const TwoPointState t2 = ExactScalar(-1) * resolvent_perp(o2.apply(v));
    const TwoPointState t3 = adjoint(t1);
    const TwoPointState t4 = adjoint(t2);
    const TwoPointState ad = adjoint(a);                   // P O1 R
    const TwoPointState t5 = compose(a, ad);
    const TwoPointState t6 = ExactScalar(-1) * compose(ad, a);

    F2Terms out;
    out.terms = {
        {"resolvent-O1-resolvent-O1-projection", evaluate_origin(t1)},
        {"minus-resolvent-O2-projection", evaluate_origin(t2)},
        {"projection-O1-resolvent-O1-resolvent", evaluate_origin(t3)},
        {"minus-projection-O2-resolvent", evaluate_origin(t4)},
        {"resolvent-O1-projection-O1-resolvent", evaluate_origin(t5)},
        {"minus-projection-O1-resolvent-squared-O1-projection", evaluate_origin(t6)},
    };
    out.total = ExteriorEndo(s);
    for (const auto& [name, e] : out.terms) out.total += e;

    if (direct_check) {
        // P O1 R O1 R = (R O1^* R O1^* P)^*, built from the formal adjoint operators.
        const ModelOperator o1s = formal_adjoint(o1), o2s = formal_adjoint(o2);
        const TwoPointState t3d = adjoint(resolvent_perp(o1s.apply(resolvent_perp(o1s.apply(v)))));
        const TwoPointState t4d = ExactScalar(-1) * adjoint(resolvent_perp(o2s.apply(v)));
        out.direct_checked = true;
        out.direct_agrees = t3d == t3 && t4d == t4;
    }
    return out;
}

B1Result b1_from_F2(const GeometryJet& j, const F2Terms& f) {
    const FibreShape s = shape_of(j);
    const ExteriorEndo ie = project_degree(s, j.q);
    B1Result r;
    r.endo = ie * f.total * ie;
    r.trace = r.endo.trace();
    r.route = "engine";
    r.jet_id = j.id;
    return r;
}

B1Result b1_engine(const GeometryJet& j) { return b1_from_F2(j, compute_F2_origin(j)); }

namespace {

// Builders for the closed displays.  X(i) = d/dxi_i, Y(i) = d/dxibar_i.
struct Displays {
    const GeometryJet& j;
    FibreShape s;
    int n, q;
    ExteriorEndo det;
    std::vector<ExactScalar> J;

    explicit Displays(const GeometryJet& jet)
        : j(jet), s(shape_of(jet)), n(jet.n), q(jet.q), det(project_det_W(s)), J(jfrak_origin(jet.n, jet.q)) {}

    CVec X(int i) const { return xi_vector(j, i, false); }
    CVec Y(int i) const { return xi_vector(j, i, true); }
    CVec applyJ(const CVec& u) const {
        const int d = j.dim();
        CVec r(d);
        for (int c = 0; c < d; ++c)
            for (int b = 0; b < d; ++b) r[c] += J[c * d + b] * u[b];
        return r;
    }
    ExactScalar nB(const CVec& a, const CVec& b, const CVec& c) const { return contract(j.nablaBJ, {a, b, c}); }
    ExactScalar nX(const CVec& a, const CVec& b, const CVec& c) const { return contract(j.nablaXJ, {a, b, c}); }
    ExactScalar rb(const CVec& a, const CVec& b, const CVec& u, const CVec& v) const {
        return contract(j.RB, {a, b, u, v});
    }
    ExactScalar rtx(const CVec& a, const CVec& b, const CVec& u, const CVec& v) const {
        return contract(j.RTX, {a, b, u, v});
    }
    ExactScalar b2j(const CVec& a, const CVec& b, const CVec& u, const CVec& v) const {
        return contract(j.nablaB2J, {a, b, u, v});
    }
    ExactScalar dt(const CVec& a, const CVec& b, const CVec& u, const CVec& v) const {
        return contract(j.dTas, {a, b, u, v});
    }
    ExactScalar trr(const CVec& a, const CVec& b) const { return contract(j.trRT10, {a, b}); }
    // <[R^B(a,b), J] u, v>
    ExactScalar rb_comm_J(const CVec& a, const CVec& b, const CVec& u, const CVec& v) const {
        return rb(a, b, applyJ(u), v) + rb(a, b, u, applyJ(v));
    }
    ExteriorEndo re(const CVec& a, const CVec& b) const { return ExteriorEndo::on_bundle(s, j.RE.evaluate(a, b)); }
    ExteriorEndo scalar(const ExactScalar& c) const { return ExteriorEndo::scalar(s, c); }

    // dxibar_k ^ i_{d/dxi_j}
    ExteriorEndo flip(int k, int jj) const { return (wedge_dxibar(s, k) * interior_dxi(s, jj)).exact(); }
    // dxi_j ^ i_{d/dxibar_k}
    ExteriorEndo flip_adj(int jj, int k) const { return (wedge_dxi(s, jj) * interior_dxibar(s, k)).exact(); }
    // dxibar_k ^ dxibar_l ^ i_{d/dxi_i} i_{d/dxi_j}
    ExteriorEndo double_flip(int k, int l, int i, int jj) const {
        return (wedge_dxibar(s, k) * wedge_dxibar(s, l) * interior_dxi(s, i) * interior_dxi(s, jj)).exact();
    }
    ExactScalar sum_m(const std::function<ExactScalar(int)>& f) const {
        ExactScalar r;
        for (int m = 0; m < n; ++m) r += f(m);
        return r;
    }
};

Exponents unit_key(int block, int idx) {
    Exponents e{};
    e.at(block, idx) = 1;
    return e;
}

Exponents key_sum(Exponents a, const Exponents& b) {
    for (std::size_t i = 0; i < a.e.size(); ++i) a.e[i] += b.e[i];
    return a;
}

PolyGaussianForm at_origin(FibreShape s, const ExteriorEndo& e) {
    PolyGaussianForm p(s);
    p.add(Exponents{}, e);
    return p;
}

// Keep the part of a kernel that survives at Z = 0 (first) or Z' = 0 (second).
PolyGaussianForm restrict_origin(const PolyGaussianForm& p, bool first) {
    PolyGaussianForm r(p.shape());
    for (const auto& [k, v] : p.terms()) {
        const int deg = first ? k.block_degree(0) + k.block_degree(1) : k.block_degree(2) + k.block_degree(3);
        if (deg == 0) r.add(k, v);
    }
    return r;
}

ExactScalar abs2(const ExactScalar& x) { return x * x.conj(); }

// -(L_0^{-1} P^{N perp} K)(0,0) for a kernel built on the identity fibre endomorphism.
ExteriorEndo minus_scalar_resolvent_origin(const TwoPointState& st) {
    ExteriorEndo out(st.shape());
    for (const auto& [k, v] : st.terms()) {
        const int a = k.block_degree(0);
        if (a == 0) continue;
        TwoPointState one(st.shape());
        one.add(k, v);
        out -= evaluate_origin(one) * (ExactScalar(Rational(1, 4 * a)) * ExactScalar::pi(-1));
    }
    return out;
}

}  // namespace

std::vector<SubResult> sub_results(const GeometryJet& j) {
    if (!validate_jet(j).all_ok()) throw InvalidJet("jet failed validation");
    const Displays D(j);
    const FibreShape s = D.s;
    const int n = D.n, q = D.q;
    const ExactScalar I = ExactScalar::i(), pi = ExactScalar::pi(), ipi = ExactScalar::pi(-1);
    auto r = [](long a, long b) { return ExactScalar::rational(a, b); };

    const ModelOperator o1 = build_O1(j), o1p = build_O1_prime(j), o2 = build_O2(j), o2p = build_O2_prime(j);
    const ModelOperator psi = build_Psi(j);
    const TwoPointState v = TwoPointState::vacuum(s, D.det);
    const TwoPointState o1v = o1.apply(v);
    const TwoPointState A = resolvent_perp(o1v);
    const TwoPointState Ad = adjoint(A);
    const TwoPointState T1 = resolvent_perp(o1.apply(A));

    std::vector<SubResult> out;
    auto push = [&](const std::string& name, const PolyGaussianForm& eng, const PolyGaussianForm& disp) {
        out.push_back(SubResult{name, eng, disp});
    };

    // Frequently used blocks: flip(k,j) det with j < q <= k.
    auto flip_det = [&](int k, int jj) { return D.flip(k, jj) * D.det; };
    auto det_flip_adj = [&](int jj, int k) { return D.det * D.flip_adj(jj, k); };

    // ---- O1 on the kernel sector, (Z,Z') dependence.
    {
        TwoPointState disp(s);
        for (int i = 0; i < n; ++i)
            for (int jj = 0; jj < n; ++jj)
                for (int m = 0; m < n; ++m) {
                    // -(2i/3) b_i b_j <(nabla^X_{Y(j)} J) xibar', Y(i)>
                    ExactScalar c = r(-2, 3) * I * D.nX(D.Y(jj), D.Y(m), D.Y(i));
                    Exponents k = key_sum(key_sum(unit_key(0, i), unit_key(0, jj)), unit_key(3, m));
                    disp += TwoPointState::basis(s, k, D.det * c);
                }
        for (int i = 0; i < n; ++i)
            for (int m = 0; m < n; ++m)
                for (int l = 0; l < n; ++l) {
                    // -(4 pi i/3) b_i <(nabla^X_{xibar'} J) xibar', Y(i)>
                    ExactScalar c = r(-4, 3) * pi * I * D.nX(D.Y(m), D.Y(l), D.Y(i));
                    Exponents k = key_sum(key_sum(unit_key(0, i), unit_key(3, m)), unit_key(3, l));
                    disp += TwoPointState::basis(s, k, D.det * c);
                }
        for (int jj = 0; jj < q; ++jj)
            for (int k = q; k < n; ++k)
                for (int m = 0; m < n; ++m) {
                    // -4i <(nabla^B_{Y(m)} J) Y(j), Y(k)> flip (b_m + 2 pi xibar'_m)
                    ExactScalar c = r(-4, 1) * I * D.nB(D.Y(m), D.Y(jj), D.Y(k));
                    disp += TwoPointState::basis(s, unit_key(0, m), flip_det(k, jj) * c);
                    disp += TwoPointState::basis(s, unit_key(3, m), flip_det(k, jj) * (c * pi * ExactScalar(2)));
                    // -8 pi i <(nabla^B_xi J) Y(j), Y(k)> flip
                    ExactScalar c2 = r(-8, 1) * pi * I * D.nB(D.X(m), D.Y(jj), D.Y(k));
                    disp += TwoPointState::basis(s, unit_key(1, m), flip_det(k, jj) * c2);
                }
        push("O1-on-kernel-sector", to_poly(o1v), to_poly(disp));
    }

    // ---- (L_2^0)^{-1} P^perp O1 P^N, full kernel.
    {
        TwoPointState disp(s);
        for (int i = 0; i < n; ++i)
            for (int jj = 0; jj < n; ++jj)
                for (int m = 0; m < n; ++m) {
                    ExactScalar c = -I * r(1, 12) * ipi * D.nX(D.Y(jj), D.Y(m), D.Y(i));
                    Exponents k = key_sum(key_sum(unit_key(0, i), unit_key(0, jj)), unit_key(3, m));
                    disp += TwoPointState::basis(s, k, D.det * c);
                }
        for (int i = 0; i < n; ++i)
            for (int m = 0; m < n; ++m)
                for (int l = 0; l < n; ++l) {
                    ExactScalar c = -I * r(1, 3) * D.nX(D.Y(m), D.Y(l), D.Y(i));
                    Exponents k = key_sum(key_sum(unit_key(0, i), unit_key(3, m)), unit_key(3, l));
                    disp += TwoPointState::basis(s, k, D.det * c);
                }
        for (int jj = 0; jj < q; ++jj)
            for (int k = q; k < n; ++k)
                for (int m = 0; m < n; ++m) {
                    ExactScalar c = -I * D.nB(D.Y(m), D.Y(jj), D.Y(k));
                    disp += TwoPointState::basis(s, unit_key(0, m), flip_det(k, jj) * (c * r(1, 3) * ipi));
                    disp += TwoPointState::basis(s, unit_key(3, m), flip_det(k, jj) * c);
                    ExactScalar c2 = -I * D.nB(D.X(m), D.Y(jj), D.Y(k));
                    disp += TwoPointState::basis(s, unit_key(1, m), flip_det(k, jj) * c2);
                }
        push("resolvent-O1-on-kernel-sector", to_poly(A), to_poly(disp));
    }

    // ---- restrictions of the same kernel and of its adjoint.
    {
        const PolyGaussianForm pa = to_poly(A), pad = to_poly(Ad);
        PolyGaussianForm d49(s), d50(s), d51(s), d52(s);
        for (int jj = 0; jj < q; ++jj)
            for (int k = q; k < n; ++k)
                for (int m = 0; m < n; ++m) {
                    d49.add(unit_key(3, m), flip_det(k, jj) * (r(-1, 3) * I * D.nB(D.Y(m), D.Y(jj), D.Y(k))));
                    d50.add(unit_key(1, m), flip_det(k, jj) * (r(-2, 3) * I * D.nB(D.Y(m), D.Y(jj), D.Y(k))));
                    d50.add(unit_key(0, m), flip_det(k, jj) * (-I * D.nB(D.X(m), D.Y(jj), D.Y(k))));
                    // adjoint kernel: first argument carries the unprimed variables
                    d51.add(unit_key(0, m), det_flip_adj(jj, k) * (r(1, 3) * I * D.nB(D.X(m), D.X(jj), D.X(k))));
                    d52.add(unit_key(2, m), det_flip_adj(jj, k) * (r(2, 3) * I * D.nB(D.X(m), D.X(jj), D.X(k))));
                    d52.add(unit_key(3, m), det_flip_adj(jj, k) * (I * D.nB(D.Y(m), D.X(jj), D.X(k))));
                }
        push("resolvent-O1-on-kernel-sector-at-first-origin", restrict_origin(pa, true), d49);
        push("resolvent-O1-on-kernel-sector-at-second-origin", restrict_origin(pa, false), d50);
        push("projection-O1-resolvent-at-second-origin", restrict_origin(pad, false), d51);
        push("projection-O1-resolvent-at-first-origin", restrict_origin(pad, true), d52);
    }

    // ---- fifth and sixth terms.
    {
        const ExteriorEndo e6 = evaluate_origin(compose(Ad, A));
        ExactScalar hol, mixed;
        for (int jj = 0; jj < q; ++jj)
            for (int k = q; k < n; ++k)
                for (int m = 0; m < n; ++m) {
                    hol += abs2(D.nB(D.X(m), D.X(jj), D.X(k)));
                    mixed += abs2(D.nB(D.Y(m), D.X(jj), D.X(k)));
                }
        push("projection-O1-resolvent-squared-O1-projection-components", at_origin(s, e6),
             at_origin(s, D.det * ((r(4, 9) * hol + mixed) * ipi)));
        push("projection-O1-resolvent-squared-O1-projection-norms", at_origin(s, e6),
             at_origin(s, D.det * (r(1, 72) * ipi * (norm_sq_nablaBJ(j) + ExactScalar(10) * norm_sq_S_bar(j)))));

        const ExteriorEndo e5 = evaluate_origin(compose(A, Ad));
        ExteriorEndo d5(s);
        for (int i = 0; i < q; ++i)
            for (int jj = 0; jj < q; ++jj)
                for (int k = q; k < n; ++k)
                    for (int l = q; l < n; ++l) {
                        ExactScalar c = D.sum_m([&](int m) {
                            return D.nB(D.Y(m), D.Y(i), D.Y(l)) * D.nB(D.X(m), D.X(jj), D.X(k));
                        });
                        if (!c.is_zero()) d5 += (D.flip(l, i) * D.det * D.flip_adj(jj, k)) * (r(1, 9) * ipi * c);
                    }
        push("resolvent-O1-projection-O1-resolvent", at_origin(s, e5), at_origin(s, d5));
    }

    // ---- first term.
    {
        push("primed-O1-second-order-vanishes", at_origin(s, evaluate_origin(resolvent_perp(o1p.apply(A)))),
             at_origin(s, ExteriorEndo(s)));
        const ExteriorEndo e1 = evaluate_origin(T1);
        ExactScalar hol, mixed;
        for (int jj = 0; jj < q; ++jj)
            for (int k = q; k < n; ++k)
                for (int m = 0; m < n; ++m) {
                    hol += abs2(D.nB(D.X(m), D.X(jj), D.X(k)));
                    mixed += abs2(D.nB(D.Y(m), D.X(jj), D.X(k)));
                }
        ExteriorEndo i12(s);
        for (int i = 0; i < q; ++i)
            for (int jj = 0; jj < q; ++jj)
                for (int k = q; k < n; ++k)
                    for (int l = q; l < n; ++l) {
                        ExactScalar c = D.sum_m([&](int m) {
                            return r(-1, 15) * D.nB(D.X(m), D.Y(i), D.Y(l)) * D.nB(D.Y(m), D.Y(jj), D.Y(k)) +
                                   r(-1, 10) * D.nB(D.Y(m), D.Y(i), D.Y(l)) * D.nB(D.X(m), D.Y(jj), D.Y(k));
                        });
                        if (!c.is_zero()) i12 += (D.double_flip(k, l, i, jj) * D.det) * (c * ipi);
                    }
        push("resolvent-O1-resolvent-O1-projection-components", at_origin(s, e1),
             at_origin(s, D.det * ((r(-4, 3) * hol + r(-2, 1) * mixed) * ipi) + i12));
        push("resolvent-O1-resolvent-O1-projection-norms", at_origin(s, e1),
             at_origin(s, D.det * (r(-1, 24) * ipi * (norm_sq_nablaBJ(j) + ExactScalar(4) * norm_sq_S_bar(j))) + i12));
    }

    // ---- O'_2 against the scalar resolvent.
    {
        const ExteriorEndo e = minus_scalar_resolvent_origin(o2p.apply(TwoPointState::vacuum(s)));
        ExteriorEndo d(s);
        for (int i = 0; i < n; ++i) {
            d += D.re(D.X(i), D.Y(i));
            for (int jj = 0; jj < n; ++jj) d += D.scalar(D.rtx(D.X(i), D.Y(jj), D.X(jj), D.Y(i)));
        }
        push("scalar-resolvent-O2-prime", at_origin(s, e), at_origin(s, d * (r(1, 2) * ipi)));
    }

    // Shared pieces of the O2 displays.
    ExactScalar trr_c, rb_c, b2j_c, comm_c, rtx_c;
    ExteriorEndo re_c(s);
    for (int i = 0; i < n; ++i) {
        trr_c += D.trr(D.X(i), D.Y(i));
        re_c += D.re(D.X(i), D.Y(i));
        for (int jj = 0; jj < n; ++jj) {
            rb_c += D.rb(D.X(i), D.Y(i), D.X(jj), D.Y(jj));
            rtx_c += D.rtx(D.X(i), D.Y(i), D.X(jj), D.Y(jj));
            b2j_c += D.b2j(D.X(i), D.Y(i), D.X(jj), D.Y(jj));
            comm_c += D.rb_comm_J(D.X(i), D.Y(i), D.X(jj), D.Y(jj));
        }
    }
    auto off_sum = [&](const std::function<ExteriorEndo(int, int)>& coef) {
        ExteriorEndo t(s);
        for (int jj = 0; jj < q; ++jj)
            for (int k = q; k < n; ++k) t += coef(jj, k) * flip_det(k, jj);
        return t;
    };
    auto trace_i = [&](const std::function<ExactScalar(const CVec&, const CVec&)>& f) {
        ExactScalar t;
        for (int i = 0; i < n; ++i) t += f(D.X(i), D.Y(i));
        return t;
    };
    ExteriorEndo dt_double(s);
    for (int i = 0; i < q; ++i)
        for (int jj = 0; jj < q; ++jj)
            for (int k = q; k < n; ++k)
                for (int l = q; l < n; ++l) {
                    ExactScalar c = D.dt(D.Y(i), D.Y(jj), D.Y(k), D.Y(l));
                    if (!c.is_zero()) dt_double += (D.double_flip(k, l, i, jj) * D.det) * c;
                }

    // ---- Psi.
    {
        const ExteriorEndo e = evaluate_origin(resolvent_perp(psi.apply(v)));
        ExteriorEndo d = dt_double + off_sum([&](int jj, int k) {
                             return D.scalar(r(-4, 1) * trace_i([&](const CVec& x, const CVec& y) {
                                 return D.dt(x, y, D.Y(jj), D.Y(k));
                             }));
                         });
        push("resolvent-Psi-on-kernel-sector", at_origin(s, e), at_origin(s, d * (r(1, 16) * ipi)));
    }

    // ---- O2 - O'_2 + Psi.
    {
        ModelOperator diff = o2;
        diff += ExactScalar(-1) * o2p;
        diff += psi;
        const ExteriorEndo e = ExactScalar(-1) * evaluate_origin(resolvent_perp(diff.apply(v)));
        auto sc = [&](const ExactScalar& c) { return D.det * c; };

        ExteriorEndo d98 = sc(r(1, 4) * ipi * trr_c - r(1, 2) * ipi * rb_c + r(1, 2) * I * ipi * (ExactScalar(2) * b2j_c - comm_c));
        d98 -= off_sum([&](int jj, int k) {
            ExactScalar rbjk = trace_i([&](const CVec& x, const CVec& y) { return D.rb(x, y, D.Y(jj), D.Y(k)); });
            ExactScalar b2jk = trace_i([&](const CVec& x, const CVec& y) { return D.b2j(x, y, D.Y(jj), D.Y(k)); });
            ExactScalar cjk = trace_i([&](const CVec& x, const CVec& y) { return D.rb_comm_J(x, y, D.Y(jj), D.Y(k)); });
            ExteriorEndo m = D.scalar(r(1, 6) * ipi * rbjk + r(1, 4) * ipi * D.trr(D.Y(jj), D.Y(k)) -
                                      r(1, 6) * I * ipi * (ExactScalar(2) * b2jk - cjk));
            m += D.re(D.Y(jj), D.Y(k)) * (r(1, 2) * ipi);
            return m;
        });
        push("O2-correction-resolvent", at_origin(s, e), at_origin(s, d98));

        auto bracket = [&](int jj, int k, bool with_re_twice) {
            ExactScalar rbjk = trace_i([&](const CVec& x, const CVec& y) { return D.rb(x, y, D.Y(jj), D.Y(k)); });
            ExactScalar b2jk = trace_i([&](const CVec& x, const CVec& y) { return D.b2j(x, y, D.Y(jj), D.Y(k)); });
            ExteriorEndo m = D.scalar(rbjk - r(2, 3) * I * b2jk + r(1, 2) * D.trr(D.Y(jj), D.Y(k)));
            m += D.re(D.Y(jj), D.Y(k));
            if (with_re_twice) m += D.re(D.Y(jj), D.Y(k));
            return m;
        };
        ExteriorEndo d99 = sc(r(1, 4) * ipi * trr_c - r(1, 2) * ipi * rb_c + I * ipi * b2j_c);
        d99 -= off_sum([&](int jj, int k) { return bracket(jj, k, false); }) * (r(1, 2) * ipi);
        push("O2-correction-resolvent-simplified", at_origin(s, e), at_origin(s, d99));

        ExteriorEndo d100a = sc(r(1, 16) * ipi * norm_sq_nablaBJ(j) - r(1, 2) * ipi * rb_c + r(1, 4) * ipi * trr_c);
        d100a -= off_sum([&](int jj, int k) { return bracket(jj, k, false); }) * (r(1, 2) * ipi);
        push("O2-correction-resolvent-with-norm", at_origin(s, e), at_origin(s, d100a));
    }

    // ---- full O2.
    {
        const ExteriorEndo e = ExactScalar(-1) * evaluate_origin(resolvent_perp(o2.apply(v)));
        ExteriorEndo d100b = D.det * (r(1, 16) * ipi * norm_sq_nablaBJ(j) - r(1, 64) * ipi * norm_sq_nablaXJ(j) +
                                      r(1, 4) * ipi * trr_c - r(1, 2) * ipi * (rb_c - rtx_c));
        d100b += D.det * re_c * (r(1, 2) * ipi);
        d100b -= off_sum([&](int jj, int k) {
            ExactScalar rbjk = trace_i([&](const CVec& x, const CVec& y) { return D.rb(x, y, D.Y(jj), D.Y(k)); });
            ExactScalar dtjk = trace_i([&](const CVec& x, const CVec& y) { return D.dt(x, y, D.Y(jj), D.Y(k)); });
            ExactScalar b2jk = trace_i([&](const CVec& x, const CVec& y) { return D.b2j(x, y, D.Y(jj), D.Y(k)); });
            ExteriorEndo m = D.scalar(r(1, 2) * ipi * rbjk + r(1, 4) * ipi * dtjk - r(1, 3) * I * ipi * b2jk +
                                      r(1, 4) * ipi * D.trr(D.Y(jj), D.Y(k)));
            m += D.re(D.Y(jj), D.Y(k)) * (r(1, 2) * ipi);
            return m;
        });
        d100b += dt_double * (r(1, 16) * ipi);
        push("resolvent-O2-on-kernel-sector", at_origin(s, e), at_origin(s, d100b));

        const LambdaScalars lam = lambda_scalars(j);
        ExteriorEndo d100c = D.det * (r(1, 4) * ipi * trr_c - r(1, 32) * ipi * lam.dLambdaT +
                                      r(3, 64) * ipi * norm_sq_nablaBJ(j) + r(2, 1) * ipi * r(1, 8) * norm_sq_S_bar(j));
        d100c += D.det * re_c * (r(1, 2) * ipi);
        d100c -= off_sum([&](int jj, int k) {
            ExactScalar b2jk = trace_i([&](const CVec& x, const CVec& y) { return D.b2j(x, y, D.Y(jj), D.Y(k)); });
            // P already contains R^E, so the bundle curvature enters only through P here.
            ExteriorEndo m = ExteriorEndo::on_bundle(s, lam.P.evaluate(D.Y(jj), D.Y(k)));
            m += D.scalar(r(-2, 3) * I * b2jk);
            return m;
        }) * (r(1, 2) * ipi);
        d100c += dt_double * (r(1, 16) * ipi);
        push("resolvent-O2-on-kernel-sector-final", at_origin(s, e), at_origin(s, d100c));
    }
    return out;
}

}  // namespace bergman
