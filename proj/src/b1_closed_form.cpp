#include "bergman/b1.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

namespace bergman {

namespace {

struct Frames {
    const GeometryJet& j;
    CVec x(int a) const { return xi_vector(j, a, false); }  // d/dxi_a = u_a / sqrt2
    CVec y(int a) const { return xi_vector(j, a, true); }   // d/dxibar_a
};

// Terminal column count of a UTF-8 string (continuation bytes take no column).
std::size_t display_width(const std::string& s) {
    return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) { return (c & 0xC0) != 0x80; }));
}

ExactScalar abs2(const ExactScalar& v) { return v * v.conj(); }

ExteriorEndo bundle_matrix(FibreShape s, const std::vector<ExactScalar>& m) { return ExteriorEndo::on_bundle(s, m); }

std::vector<ExactScalar> scaled(std::vector<ExactScalar> m, const ExactScalar& c) {
    for (auto& v : m) v = v * c;
    return m;
}

std::vector<ExactScalar> identity_matrix(int rk, const ExactScalar& c) {
    std::vector<ExactScalar> m(static_cast<std::size_t>(rk * rk));
    for (int e = 0; e < rk; ++e) m[e * rk + e] = c;
    return m;
}

std::vector<ExactScalar> add(std::vector<ExactScalar> a, const std::vector<ExactScalar>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}

// sum_j R^E(u_j, ubar_j) as an rk x rk matrix.
std::vector<ExactScalar> re_trace(const GeometryJet& j, const Frames& f) {
    std::vector<ExactScalar> m = identity_matrix(j.rk, ExactScalar());
    for (int a = 0; a < j.n; ++a) m = add(m, scaled(j.RE.evaluate(f.x(a), f.y(a)), ExactScalar(2)));
    return m;
}

ExactScalar trr_trace(const GeometryJet& j, const Frames& f) {
    ExactScalar s;
    for (int a = 0; a < j.n; ++a) s += contract(j.trRT10, {f.x(a), f.y(a)}) * ExactScalar(2);
    return s;
}

// sum_{ij} |(nabla_{u_i} J) u_j|^2 for the given nabla J tensor.
ExactScalar hol_norm(const GeometryJet& j, const Tensor& nj, const Frames& f) {
    const int nv = j.dim();
    ExactScalar s;
    for (int a = 0; a < j.n; ++a)
        for (int b = 0; b < j.n; ++b)
            for (int c = 0; c < nv; ++c) {
                CVec e(nv);
                e[c] = ExactScalar(1);
                s += abs2(contract(nj, {f.x(a), f.x(b), e}));
            }
    return s * ExactScalar(4);
}

ExteriorEndo divide_by_pi(const ExteriorEndo& m) {
    ExteriorEndo out(m.shape());
    for (const auto& [k, v] : m.entries()) out.add(k.first, k.second, v.times_pi(-1));
    return out;
}

B1Result finish(const GeometryJet& j, const ExteriorEndo& pi_b1, const char* route) {
    B1Result r;
    r.endo = divide_by_pi(pi_b1);
    r.trace = r.endo.trace();
    r.route = route;
    r.jet_id = j.id;
    return r;
}

}  // namespace

FibreShape shape_of(const GeometryJet& j) { return FibreShape{j.n, j.q, j.rk}; }

nlohmann::json B1Result::to_json() const {
    nlohmann::json out;
    out["route"] = route;
    out["jet_id"] = jet_id;
    out["trace"] = trace.to_json();
    out["trace_text"] = trace.to_string();
    out["endo"] = endo.to_json();
    return out;
}

B1Result b1_formula(const GeometryJet& j) {
    if (!validate_jet(j).all_ok()) throw InvalidJet("jet failed validation");
    const FibreShape s = shape_of(j);
    const Frames f{j};
    const int n = j.n, q = j.q;
    const ExteriorEndo det = project_det_W(s);
    auto cre = [&](int k) { return ExteriorEndo::creation(s, k); };
    auto ann = [&](int k) { return ExteriorEndo::annihilation(s, k); };
    const LambdaScalars lam = lambda_scalars(j);
    auto nB = [&](const CVec& a, const CVec& b, const CVec& c) { return contract(j.nablaBJ, {a, b, c}); };

    ExteriorEndo out(s);
    // Scalar block.
    {
        std::vector<ExactScalar> m = scaled(re_trace(j, f), ExactScalar::rational(1, 2));
        ExactScalar sc = ExactScalar::rational(1, 4) * trr_trace(j, f) - ExactScalar::rational(1, 16) * lam.dLambdaT -
                         ExactScalar::rational(1, 144) * hol_norm(j, j.nablaBJ, f);
        m = add(m, identity_matrix(j.rk, sc));
        out += bundle_matrix(s, m) * det;
    }
    // (1/72) <(nabla_{u_m} J)u_j,u_k><(nabla_{ubar_m} J)ubar_i,ubar_l> ubar^l ^ i_{u_i} I u^j ^ i_{ubar_k}
    for (int i = 0; i < q; ++i)
        for (int jj = 0; jj < q; ++jj)
            for (int k = q; k < n; ++k)
                for (int l = q; l < n; ++l) {
                    ExactScalar c;
                    for (int m = 0; m < n; ++m)
                        c += nB(f.x(m), f.x(jj), f.x(k)) * nB(f.y(m), f.y(i), f.y(l));
                    if (c.is_zero()) continue;
                    out += (cre(l) * ann(i) * det * cre(jj) * ann(k)) * (c * ExactScalar::rational(8, 72));
                }
    // -(1/4) [P(ubar_j,ubar_k) - (i/3)<(nabla^B nabla^B J)_{(u_i,ubar_i)} ubar_j, ubar_k>] ubar^k ^ i_{u_j} I
    // -(1/4) [P(u_k,u_j) - (i/3)<(nabla^B nabla^B J)_{(ubar_i,u_i)} u_k, u_j>] I u^j ^ i_{ubar_k}
    for (int jj = 0; jj < q; ++jj)
        for (int k = q; k < n; ++k) {
            ExactScalar c1, c2;
            for (int i = 0; i < n; ++i) {
                c1 += contract(j.nablaB2J, {f.x(i), f.y(i), f.y(jj), f.y(k)});
                c2 += contract(j.nablaB2J, {f.y(i), f.x(i), f.x(k), f.x(jj)});
            }
            const ExactScalar w = ExactScalar::i() * ExactScalar::rational(4, 3);  // (i/3) * 2^2
            std::vector<ExactScalar> m1 = add(scaled(lam.P.evaluate(f.y(jj), f.y(k)), ExactScalar(2)),
                                              identity_matrix(j.rk, -(w * c1)));
            std::vector<ExactScalar> m2 = add(scaled(lam.P.evaluate(f.x(k), f.x(jj)), ExactScalar(2)),
                                              identity_matrix(j.rk, -(w * c2)));
            out += bundle_matrix(s, scaled(m1, ExactScalar::rational(-1, 4))) * (cre(k) * ann(jj) * det);
            out += bundle_matrix(s, scaled(m2, ExactScalar::rational(-1, 4))) * (det * cre(jj) * ann(k));
        }
    // Double-flip blocks.
    for (int i = 0; i < q; ++i)
        for (int jj = 0; jj < q; ++jj)
            for (int k = q; k < n; ++k)
                for (int l = q; l < n; ++l) {
                    ExactScalar a1 = ExactScalar::rational(4, 8) *
                                     contract(j.dTas, {f.y(i), f.y(jj), f.y(k), f.y(l)});
                    ExactScalar a2 = ExactScalar::rational(4, 8) *
                                     contract(j.dTas, {f.x(i), f.x(jj), f.x(k), f.x(l)});
                    for (int m = 0; m < n; ++m) {
                        a1 -= ExactScalar::rational(8, 15) * nB(f.x(m), f.y(i), f.y(l)) * nB(f.y(m), f.y(jj), f.y(k));
                        a1 -= ExactScalar::rational(8, 10) * nB(f.y(m), f.y(i), f.y(l)) * nB(f.x(m), f.y(jj), f.y(k));
                        a2 -= ExactScalar::rational(8, 15) * nB(f.y(m), f.x(i), f.x(l)) * nB(f.x(m), f.x(jj), f.x(k));
                        a2 -= ExactScalar::rational(8, 10) * nB(f.x(m), f.x(i), f.x(l)) * nB(f.y(m), f.x(jj), f.x(k));
                    }
                    const ExactScalar eighth = ExactScalar::rational(1, 8);
                    if (!a1.is_zero()) out += (cre(k) * cre(l) * ann(i) * ann(jj) * det) * (eighth * a1);
                    if (!a2.is_zero()) out += (det * cre(i) * cre(jj) * ann(l) * ann(k)) * (eighth * a2);
                }
    return finish(j, out, "closed-form");
}

ExactScalar b1_trace(const GeometryJet& j) {
    if (!validate_jet(j).all_ok()) throw InvalidJet("jet failed validation");
    const Frames f{j};
    ExactScalar tr;
    auto m = re_trace(j, f);
    for (int e = 0; e < j.rk; ++e) tr += ExactScalar::rational(1, 2) * m[e * j.rk + e];
    const LambdaScalars lam = lambda_scalars(j);
    tr += ExactScalar(j.rk) * (ExactScalar::rational(1, 4) * trr_trace(j, f) - ExactScalar::rational(1, 16) * lam.dLambdaT);
    return tr.times_pi(-1);
}

B1Result b1_kahler(const GeometryJet& j) {
    if (!validate_jet(j).all_ok()) throw InvalidJet("jet failed validation");
    if (!is_kahler(j)) throw NotKahler("jet has nonzero torsion; the Kähler specialization does not apply");
    const FibreShape s = shape_of(j);
    const Frames f{j};
    const int n = j.n, q = j.q;
    const ExteriorEndo det = project_det_W(s);
    auto cre = [&](int k) { return ExteriorEndo::creation(s, k); };
    auto ann = [&](int k) { return ExteriorEndo::annihilation(s, k); };
    auto nX = [&](const CVec& a, const CVec& b, const CVec& c) { return contract(j.nablaXJ, {a, b, c}); };

    ExteriorEndo out(s);
    {
        std::vector<ExactScalar> m = scaled(re_trace(j, f), ExactScalar::rational(1, 2));
        ExactScalar sc = ExactScalar::rational(1, 4) * trr_trace(j, f) - ExactScalar::rational(1, 144) * hol_norm(j, j.nablaXJ, f);
        m = add(m, identity_matrix(j.rk, sc));
        out += bundle_matrix(s, m) * det;
    }
    for (int i = 0; i < q; ++i)
        for (int jj = 0; jj < q; ++jj)
            for (int k = q; k < n; ++k)
                for (int l = q; l < n; ++l) {
                    ExactScalar c;
                    for (int m = 0; m < n; ++m) c += nX(f.x(m), f.x(jj), f.x(k)) * nX(f.y(m), f.y(i), f.y(l));
                    if (c.is_zero()) continue;
                    out += (cre(l) * ann(i) * det * cre(jj) * ann(k)) * (c * ExactScalar::rational(8, 72));
                }
    for (int jj = 0; jj < q; ++jj)
        for (int k = q; k < n; ++k) {
            ExactScalar r1, r2;
            for (int i = 0; i < n; ++i) {
                r1 += contract(j.RTX, {f.x(i), f.y(i), f.y(jj), f.y(k)});
                r2 += contract(j.RTX, {f.x(i), f.y(i), f.x(k), f.x(jj)});
            }
            auto bracket = [&](const CVec& a, const CVec& b, const ExactScalar& r) {
                // (1/2 Tr R^{T(1,0)} + R^E)(a,b) - (1/6) <R^TX(u_i,ubar_i) a, b>, u-factors: 2 and 4.
                std::vector<ExactScalar> m = scaled(j.RE.evaluate(a, b), ExactScalar(2));
                ExactScalar sc = contract(j.trRT10, {a, b}) - ExactScalar::rational(4, 6) * r;
                return add(m, identity_matrix(j.rk, sc));
            };
            out += bundle_matrix(s, scaled(bracket(f.y(jj), f.y(k), r1), ExactScalar::rational(-1, 4))) *
                   (cre(k) * ann(jj) * det);
            out += bundle_matrix(s, scaled(bracket(f.x(k), f.x(jj), r2), ExactScalar::rational(-1, 4))) *
                   (det * cre(jj) * ann(k));
        }
    return finish(j, out, "closed-form-kahler");
}

B1Result b1_positive(const GeometryJet& j) {
    if (!validate_jet(j).all_ok()) throw InvalidJet("jet failed validation");
    if (j.q != 0) throw NotPositive("the positive specialization requires q = 0");
    const FibreShape s = shape_of(j);
    // v_j = sqrt2 d/dz_j: R^E(v_j, vbar_j) = 2 R^E(d/dz_j, d/dzbar_j).
    std::vector<ExactScalar> m = identity_matrix(j.rk, ExactScalar::rational(1, 8) * j.rX);
    for (int a = 0; a < j.n; ++a) m = add(m, j.RE.evaluate(dz_vector(j.n, a, false), dz_vector(j.n, a, true)));
    return finish(j, bundle_matrix(s, m) * project_det_W(s), "closed-form-positive");
}

std::string b1_table(const B1Result& r) {
    std::ostringstream os;
    const FibreShape s = r.endo.shape();
    const WordBasis& wb = WordBasis::get(s.n);
    auto label = [&](int idx) {
        std::string l = WordBasis::label(wb.mask_at(idx / s.rk));
        if (s.rk > 1) l += "⊗e" + std::to_string(idx % s.rk + 1);
        return l;
    };
    os << "route: " << r.route << "\n";
    if (!r.jet_id.empty()) os << "jet:   " << r.jet_id << "\n";
    os << "trace: " << r.trace.to_string() << "\n";
    std::size_t w1 = 3, w2 = 6;
    std::vector<std::tuple<std::string, std::string, std::string>> rows;
    for (const auto& [k, v] : r.endo.entries()) {
        rows.emplace_back(label(k.first), label(k.second), v.to_string());
        w1 = std::max(w1, display_width(std::get<0>(rows.back())));
        w2 = std::max(w2, display_width(std::get<1>(rows.back())));
    }
    os << "row" << std::string(w1 - 3 + 2, ' ') << "column" << std::string(w2 - 6 + 2, ' ') << "value\n";
    for (const auto& [a, b, v] : rows)
        os << a << std::string(w1 - display_width(a) + 2, ' ') << b << std::string(w2 - display_width(b) + 2, ' ') << v << "\n";
    if (rows.empty()) os << "(zero matrix)\n";
    return os.str();
}

}  // namespace bergman
