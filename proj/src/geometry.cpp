#include "bergman/geometry.hpp"

#include <algorithm>
#include <functional>
#include <regex>
#include <sstream>

#include "bergman/exterior.hpp"

namespace bergman {

namespace {

constexpr int kPotentialCap = 4;
constexpr int kZbarOffset = 3;

ExactScalar half() { return ExactScalar::rational(1, 2); }
ExactScalar I() { return ExactScalar::i(); }

// Value of dz_j (bar=false) or dzbar_j (bar=true) on the real frame vector e_a.
ExactScalar dz_form(int j, bool bar, int a) {
    if (a == 2 * j) return ExactScalar(1);
    if (a == 2 * j + 1) return bar ? -I() : I();
    return {};
}

Series d_z(const Series& s, int j) { return half() * (s.derivative(2 * j) - I() * s.derivative(2 * j + 1)); }
Series d_zbar(const Series& s, int j) { return half() * (s.derivative(2 * j) + I() * s.derivative(2 * j + 1)); }

// Real-variable series of a polynomial in z, zbar.
Series to_real_series(const ComplexPoly& p, int n, int cap) {
    const int nv = 2 * n;
    std::vector<Series> z(n), zb(n);
    for (int j = 0; j < n; ++j) {
        Series x = Series::variable(nv, 2 * j), y = Series::variable(nv, 2 * j + 1);
        z[j] = x + I() * y;
        zb[j] = x - I() * y;
    }
    Series out(nv, cap);
    for (const auto& [e, c] : p.terms) {
        Series term = Series::constant(nv, c);
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < e[j]; ++k) term = term * z[j];
            for (int k = 0; k < e[kZbarOffset + j]; ++k) term = term * zb[j];
        }
        out += term.with_cap(cap);
    }
    return out;
}

// Complex Hessian H_{jk} = d^2 phi / dz_j dzbar_k.
SMat complex_hessian(const Series& phi, int n) {
    SMat h = smat_zero(n, phi.nvars());
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) h[j][k] = d_zbar(d_z(phi, j), k);
    return h;
}

// Real components of sum_{jk} H_{jk} dz_j ^ dzbar_k.
SMat form_from_hessian(const SMat& h, int n) {
    const int nv = 2 * n;
    SMat a = smat_zero(nv, h[0][0].nvars());
    for (int x = 0; x < nv; ++x)
        for (int y = 0; y < nv; ++y) {
            Series s(h[0][0].nvars(), kExactCap);
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    ExactScalar c = dz_form(j, false, x) * dz_form(k, true, y) - dz_form(j, false, y) * dz_form(k, true, x);
                    if (!c.is_zero()) s += c * h[j][k];
                }
            a[x][y] = s;
        }
    return a;
}

Tensor origin2(const SMat& m) {
    const int d = static_cast<int>(m.size());
    Tensor t(d, 2);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) t(i, j) = m[i][j].at_zero();
    return t;
}

Series euler(const Series& s) {
    Series r(s.nvars(), s.cap());
    for (const auto& [m, c] : s.terms()) r.add_term(m, c * ExactScalar(mono_degree(m)));
    return r;
}

Mono unit_mono(int a) {
    Mono m{};
    m[a] = 1;
    return m;
}

Mono pair_mono(int a, int b) {
    Mono m{};
    m[a] += 1;
    m[b] += 1;
    return m;
}

// d_a d_b s at the origin.
ExactScalar second_derivative_origin(const Series& s, int a, int b) {
    ExactScalar c = s.coeff(pair_mono(a, b));
    return a == b ? c * ExactScalar(2) : c;
}

std::string scalar_list(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size() && i < 6; ++i) out += (i ? "; " : "") + items[i];
    if (items.size() > 6) out += "; ... (" + std::to_string(items.size()) + " total)";
    return out;
}

}  // namespace

// ---------------------------------------------------------------- Tensor

Tensor::Tensor(int dim_, int rank_) : dim(dim_), rank(rank_) {
    std::size_t size = 1;
    for (int r = 0; r < rank_; ++r) size *= static_cast<std::size_t>(dim_);
    data.resize(size);
}

bool Tensor::is_zero() const {
    return std::all_of(data.begin(), data.end(), [](const ExactScalar& s) { return s.is_zero(); });
}

ExactScalar contract(const Tensor& t, const std::vector<CVec>& args) {
    if (static_cast<int>(args.size()) != t.rank) throw std::invalid_argument("contract: rank mismatch");
    // Iterate only over nonzero components of the arguments.
    std::vector<std::vector<int>> support(args.size());
    for (std::size_t r = 0; r < args.size(); ++r)
        for (int a = 0; a < t.dim; ++a)
            if (!args[r][a].is_zero()) support[r].push_back(a);
    ExactScalar out;
    std::vector<std::size_t> pos(args.size(), 0);
    for (const auto& s : support)
        if (s.empty()) return out;
    while (true) {
        std::size_t flat = 0;
        ExactScalar w(1);
        for (std::size_t r = 0; r < args.size(); ++r) {
            int a = support[r][pos[r]];
            flat = flat * t.dim + a;
            w = w * args[r][a];
        }
        if (!t.data[flat].is_zero()) out += w * t.data[flat];
        std::size_t r = args.size();
        while (r > 0) {
            --r;
            if (++pos[r] < support[r].size()) break;
            pos[r] = 0;
            if (r == 0) return out;
        }
        if (args.empty()) return out;
    }
}

std::vector<ExactScalar> BundleForm::evaluate(const CVec& u, const CVec& v) const {
    std::vector<ExactScalar> m(static_cast<std::size_t>(rk * rk));
    for (int i = 0; i < dim; ++i) {
        if (u[i].is_zero()) continue;
        for (int j = 0; j < dim; ++j) {
            if (v[j].is_zero()) continue;
            ExactScalar w = u[i] * v[j];
            for (int e = 0; e < rk; ++e)
                for (int f = 0; f < rk; ++f) m[e * rk + f] += w * at(i, j, e, f);
        }
    }
    return m;
}

// ---------------------------------------------------------------- potentials

void ComplexPoly::add(const std::array<std::uint8_t, 6>& e, const ExactScalar& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms.try_emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) terms.erase(it);
    }
}

bool ComplexPoly::is_real() const {
    for (const auto& [e, c] : terms) {
        std::array<std::uint8_t, 6> f{};
        for (int j = 0; j < kZbarOffset; ++j) {
            f[j] = e[kZbarOffset + j];
            f[kZbarOffset + j] = e[j];
        }
        auto it = terms.find(f);
        if (it == terms.end() || !(it->second == c.conj())) return false;
    }
    return true;
}

int ComplexPoly::degree() const {
    int d = 0;
    for (const auto& [e, c] : terms) {
        int s = 0;
        for (auto x : e) s += x;
        d = std::max(d, s);
    }
    return d;
}

ComplexPoly parse_potential(const nlohmann::json& j, int n) {
    if (!j.is_object()) throw InvalidPotential("potential must be a JSON object mapping monomials to coefficients");
    if (n < 1 || n > kZbarOffset) throw InvalidPotential("complex dimension must be between 1 and 3");
    ComplexPoly p;
    p.n = n;
    static const std::regex token(R"((z̄|zbar|zb|z)([0-9]+)(\^([0-9]+))?)");
    for (const auto& [key, value] : j.items()) {
        std::array<std::uint8_t, 6> e{};
        std::string k = key;
        std::replace(k.begin(), k.end(), '*', ' ');
        std::istringstream in(k);
        std::string word;
        while (in >> word) {
            if (word == "1") continue;
            std::smatch m;
            if (!std::regex_match(word, m, token)) throw InvalidPotential("bad monomial factor '" + word + "'");
            int idx = std::stoi(m[2].str());
            int pw = m[4].matched ? std::stoi(m[4].str()) : 1;
            if (idx < 1 || idx > n) throw InvalidPotential("variable index out of range in '" + word + "'");
            bool bar = m[1].str() != "z";
            e[(bar ? kZbarOffset : 0) + idx - 1] += static_cast<std::uint8_t>(pw);
        }
        ExactScalar c = value.is_string() ? ExactScalar::parse(value.get<std::string>())
                        : value.is_number_integer() ? ExactScalar(value.get<long>())
                                                    : throw InvalidPotential("coefficient must be a string or integer");
        p.add(e, c);
    }
    if (!p.is_real()) throw InvalidPotential("potential is not real: coefficients of conjugate monomials must be conjugate");
    return p;
}

nlohmann::json potential_to_json(const ComplexPoly& p) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [e, c] : p.terms) {
        std::string key;
        for (int b = 0; b < 2; ++b)
            for (int j = 0; j < p.n; ++j) {
                int pw = e[b * kZbarOffset + j];
                if (pw == 0) continue;
                if (!key.empty()) key += " ";
                key += (b ? "z̄" : "z") + std::to_string(j + 1);
                if (pw > 1) key += "^" + std::to_string(pw);
            }
        out[key.empty() ? "1" : key] = c.to_string();
    }
    return out;
}

ComplexPoly standard_potential(int n, int q) {
    ComplexPoly p;
    p.n = n;
    for (int j = 0; j < n; ++j) {
        std::array<std::uint8_t, 6> e{};
        e[j] = 1;
        e[kZbarOffset + j] = 1;
        p.add(e, ExactScalar::rational(j < q ? -1 : 1, 2));
    }
    return p;
}

ComplexPoly fubini_study_potential(int n, int q) {
    // (1/2pi) log(1 + pi|z|^2) = |z|^2/2 - pi |z|^4 / 4 + O(|z|^6)
    ComplexPoly p;
    p.n = n;
    for (int j = 0; j < n; ++j) {
        const long s = j < q ? -1 : 1;
        std::array<std::uint8_t, 6> e2{}, e4{};
        e2[j] = 1;
        e2[kZbarOffset + j] = 1;
        e4[j] = 2;
        e4[kZbarOffset + j] = 2;
        p.add(e2, ExactScalar::rational(s, 2));
        p.add(e4, ExactScalar::rational(-s, 4) * ExactScalar::pi());
    }
    return p;
}

namespace {

ExactScalar random_gauss(std::mt19937_64& rng, bool real_only) {
    std::uniform_int_distribution<long> num(-3, 3), den(1, 4);
    Rational re(num(rng), den(rng));
    re.canonicalize();
    Rational im = 0;
    if (!real_only) {
        im = Rational(num(rng), den(rng));
        im.canonicalize();
    }
    return ExactScalar(GaussRat(re, im));
}

void add_random_real_terms(ComplexPoly& p, int n, int degree, std::mt19937_64& rng, double density) {
    std::bernoulli_distribution keep(density);
    // Enumerate exponent vectors (a in z, b in zbar) with |a|+|b| = degree.
    std::vector<std::array<std::uint8_t, 6>> monos;
    std::array<std::uint8_t, 6> e{};
    std::function<void(int, int)> rec = [&](int slot, int left) {
        if (slot == 2 * n) {
            if (left == 0) monos.push_back(e);
            return;
        }
        int idx = slot < n ? slot : kZbarOffset + slot - n;
        for (int k = 0; k <= left; ++k) {
            e[idx] = static_cast<std::uint8_t>(k);
            rec(slot + 1, left - k);
        }
        e[idx] = 0;
    };
    rec(0, degree);
    for (const auto& m : monos) {
        std::array<std::uint8_t, 6> c{};
        for (int j = 0; j < kZbarOffset; ++j) {
            c[j] = m[kZbarOffset + j];
            c[kZbarOffset + j] = m[j];
        }
        if (c < m) continue;  // handle each conjugate pair once
        if (!keep(rng)) continue;
        ExactScalar coef = random_gauss(rng, c == m);
        p.add(m, coef);
        if (!(c == m)) p.add(c, coef.conj());
    }
}

}  // namespace

ComplexPoly random_potential(int n, int q, std::mt19937_64& rng) {
    ComplexPoly p = standard_potential(n, q);
    add_random_real_terms(p, n, 3, rng, 0.6);
    add_random_real_terms(p, n, 4, rng, 0.6);
    return p;
}

ComplexPoly random_bundle_potential(int n, std::mt19937_64& rng) {
    ComplexPoly p;
    p.n = n;
    add_random_real_terms(p, n, 2, rng, 1.0);
    return p;
}

// ---------------------------------------------------------------- pipeline

GeometryJet jet_from_potential(const ComplexPoly& phiL, const std::vector<ComplexPoly>& phiE, int n, int q) {
    if (n < 1 || n > 3) throw InvalidPotential("complex dimension must be between 1 and 3");
    if (q < 0 || q > n) throw InvalidPotential("signature index q must satisfy 0 <= q <= n");
    if (phiE.size() > 2) throw InvalidPotential("rank of E must be 1 or 2");
    if (!phiL.is_real()) throw InvalidPotential("potential of L is not real");
    const int nv = 2 * n;
    GeometryJet jet;
    jet.n = n;
    jet.q = q;
    jet.rk = phiE.empty() ? 1 : static_cast<int>(phiE.size());

    // (i) omega = i dd^bar phi, R^L = 2 pi dd^bar phi.
    Series phi = to_real_series(phiL, n, kPotentialCap);
    SMat hess = complex_hessian(phi, n);
    SMat omega = smat_scale(form_from_hessian(hess, n), I());
    for (int j = 0; j < n; ++j)
        for (int a = 0; a < nv; ++a)
            for (int b = 0; b < nv; ++b) {
                ExactScalar expect;
                if (a == 2 * j && b == 2 * j + 1) expect = ExactScalar(j < q ? -1 : 1);
                if (b == 2 * j && a == 2 * j + 1) expect = ExactScalar(j < q ? 1 : -1);
                if (a / 2 == j && !(omega[a][b].at_zero() == expect))
                    throw DegenerateCurvature(
                        "curvature form at the origin is not the normalized form of signature (" +
                        std::to_string(q) + ", " + std::to_string(n - q) + "); component (" + std::to_string(a) +
                        "," + std::to_string(b) + ") = " + omega[a][b].at_zero().to_string());
            }
    SMat RL = smat_scale(omega, ExactScalar::pi() * ExactScalar(-2) * I());
    jet.RL0 = origin2(RL);

    // (ii) B = omega(., J .), g = (B^2)^{1/2}, **J** = -g^{-1} omega.
    SMat J0 = smat_zero(nv, nv);
    for (int j = 0; j < n; ++j) {
        J0[2 * j + 1][2 * j] = Series::constant(nv, ExactScalar(1));
        J0[2 * j][2 * j + 1] = Series::constant(nv, ExactScalar(-1));
    }
    SMat B = smat_mul(omega, J0);
    SMat g = smat_sqrt(smat_mul(B, B));
    SMat ginv = smat_inverse(g);
    SMat Jf = smat_scale(smat_mul(ginv, omega), ExactScalar(-1));

    // (iii) Levi-Civita connection matrices (Gamma_a)[c][b] = Gamma^c_{ab}.
    std::vector<SMat> dg(nv);
    for (int d = 0; d < nv; ++d) dg[d] = smat_derivative(g, d);
    std::vector<SMat> Gam(nv, smat_zero(nv, nv));
    for (int a = 0; a < nv; ++a)
        for (int b = 0; b < nv; ++b)
            for (int c = 0; c < nv; ++c) {
                Series s(nv, kExactCap);
                for (int d = 0; d < nv; ++d) {
                    s += ginv[c][d] * (dg[a][d][b] + dg[b][d][a] - dg[d][a][b]);
                }
                Gam[a][c][b] = half() * s;
            }
    auto curvature = [&](const std::vector<SMat>& G) {
        Tensor R(nv, 4);
        for (int i = 0; i < nv; ++i)
            for (int j = 0; j < nv; ++j) {
                SMat F = smat_add(smat_sub(smat_derivative(G[j], i), smat_derivative(G[i], j)), smat_commutator(G[i], G[j]));
                for (int k = 0; k < nv; ++k)
                    for (int l = 0; l < nv; ++l) R(i, j, k, l) = F[l][k].at_zero();
            }
        return R;
    };
    jet.RTX = curvature(Gam);
    for (int i = 0; i < nv; ++i)
        for (int j = 0; j < nv; ++j) jet.rX += jet.RTX(i, j, j, i);

    // (iv) Chern connection on T^(1,0): h_{jm} = g(d/dz_j, d/dzbar_m).
    SMat hc = smat_zero(n, nv);
    for (int j = 0; j < n; ++j)
        for (int m = 0; m < n; ++m) {
            CVec u = dz_vector(n, j, false), v = dz_vector(n, m, true);
            Series s(nv, kExactCap);
            for (int a = 0; a < nv; ++a)
                for (int b = 0; b < nv; ++b)
                    if (!u[a].is_zero() && !v[b].is_zero()) s += (u[a] * v[b]) * g[a][b];
            hc[j][m] = s;
        }
    SMat hcinv = smat_inverse(hc);
    // theta_j^k = sum_m (d h_{jm}) h^{mk}; tcoef[c][k][j] = coefficient of dz_c.
    std::vector<SMat> tcoef(n, smat_zero(n, nv));
    for (int c = 0; c < n; ++c)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                Series s(nv, kExactCap);
                for (int m = 0; m < n; ++m) s += d_z(hc[j][m], c) * hcinv[m][k];
                tcoef[c][k][j] = s;
            }
    // Complex frame (d/dz_1..n, d/dzbar_1..n) -> real frame: d/dx = dz + dzbar, d/dy = i(dz - dzbar).
    std::vector<std::vector<ExactScalar>> P(nv, std::vector<ExactScalar>(nv)), Pinv(nv, std::vector<ExactScalar>(nv));
    for (int j = 0; j < n; ++j) {
        P[j][2 * j] = ExactScalar(1);
        P[n + j][2 * j] = ExactScalar(1);
        P[j][2 * j + 1] = I();
        P[n + j][2 * j + 1] = -I();
    }
    Pinv = const_inverse(P);
    auto const_smat = [&](const std::vector<std::vector<ExactScalar>>& m) {
        SMat r = smat_zero(nv, nv);
        for (int i = 0; i < nv; ++i)
            for (int j = 0; j < nv; ++j) r[i][j] = Series::constant(nv, m[i][j]);
        return r;
    };
    const SMat Ps = const_smat(P), Pinvs = const_smat(Pinv);
    std::vector<SMat> GamC(nv);
    SMat trtheta(1, std::vector<Series>(nv, Series(nv, kExactCap)));
    for (int a = 0; a < nv; ++a) {
        const int c = a / 2;
        const ExactScalar factor = (a % 2 == 0) ? ExactScalar(1) : I();  // theta(d/dy_c) = i t_c
        SMat M = smat_zero(nv, nv);
        Series tr(nv, kExactCap);
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                Series t = factor * tcoef[c][k][j];
                M[k][j] = t;
                M[n + k][n + j] = t.conj();
                if (j == k) tr += t;
            }
        trtheta[0][a] = tr;
        GamC[a] = smat_mul(smat_mul(Pinvs, M), Ps);
    }
    for (int a = 0; a < nv; ++a)
        for (int b = 0; b < nv; ++b)
            for (int c = 0; c < nv; ++c)
                if (GamC[a][b][c].conj().terms() != GamC[a][b][c].terms())
                    throw std::logic_error("Chern connection is not real in the real frame");

    // Torsion and its anti-symmetrization (as series, valid to degree 1).
    std::vector<Series> Tlow(static_cast<std::size_t>(nv * nv * nv), Series(nv, kExactCap));  // <T(a,b), d>
    auto tidx = [nv](int a, int b, int c) { return (a * nv + b) * nv + c; };
    for (int a = 0; a < nv; ++a)
        for (int b = 0; b < nv; ++b)
            for (int d = 0; d < nv; ++d) {
                Series s(nv, kExactCap);
                for (int c = 0; c < nv; ++c) s += g[d][c] * (GamC[a][c][b] - GamC[b][c][a]);
                Tlow[tidx(a, b, d)] = s;
            }
    std::vector<Series> Tas(Tlow.size());
    for (int a = 0; a < nv; ++a)
        for (int b = 0; b < nv; ++b)
            for (int c = 0; c < nv; ++c) Tas[tidx(a, b, c)] = Tlow[tidx(a, b, c)] + Tlow[tidx(b, c, a)] + Tlow[tidx(c, a, b)];
    jet.Tas = Tensor(nv, 3);
    jet.covTas = Tensor(nv, 4);
    jet.dTas = Tensor(nv, 4);
    for (int a = 0; a < nv; ++a)
        for (int b = 0; b < nv; ++b)
            for (int c = 0; c < nv; ++c) jet.Tas(a, b, c) = Tas[tidx(a, b, c)].at_zero();
    for (int m = 0; m < nv; ++m)
        for (int a = 0; a < nv; ++a)
            for (int b = 0; b < nv; ++b)
                for (int c = 0; c < nv; ++c) {
                    ExactScalar v = Tas[tidx(a, b, c)].coeff(unit_mono(m));
                    for (int d = 0; d < nv; ++d) {
                        v -= Gam[m][d][a].at_zero() * jet.Tas(d, b, c);
                        v -= Gam[m][d][b].at_zero() * jet.Tas(a, d, c);
                        v -= Gam[m][d][c].at_zero() * jet.Tas(a, b, d);
                    }
                    jet.covTas(m, a, b, c) = v;
                }
    auto dT = [&](int a, int b, int c, int d) { return Tas[tidx(b, c, d)].coeff(unit_mono(a)); };
    for (int a = 0; a < nv; ++a)
        for (int b = 0; b < nv; ++b)
            for (int c = 0; c < nv; ++c)
                for (int d = 0; d < nv; ++d)
                    jet.dTas(a, b, c, d) = dT(a, b, c, d) - dT(b, a, c, d) + dT(c, a, b, d) - dT(d, a, b, c);

    // Cross-check: T_as = -i (d - dbar) Theta = -(d Theta)(J., J., J.), Theta(X,Y) = g(JX,Y).
    {
        std::vector<std::vector<Series>> Theta(nv, std::vector<Series>(nv, Series(nv, kExactCap)));
        for (int a = 0; a < nv; ++a)
            for (int b = 0; b < nv; ++b) {
                Series s(nv, kExactCap);
                for (int c = 0; c < nv; ++c)
                    if (!J0[c][a].is_zero()) s += J0[c][a].at_zero() * g[c][b];
                Theta[a][b] = s;
            }
        auto dTheta = [&](int a, int b, int c) {
            return Theta[b][c].derivative(a) - Theta[a][c].derivative(b) + Theta[a][b].derivative(c);
        };
        auto jimage = [&](int a) {  // J0 e_a = sign * e_other
            return a % 2 == 0 ? std::pair<int, long>{a + 1, 1} : std::pair<int, long>{a - 1, -1};
        };
        bool ok = true;
        for (int a = 0; a < nv && ok; ++a)
            for (int b = 0; b < nv && ok; ++b)
                for (int c = 0; c < nv && ok; ++c) {
                    auto [ja, sa] = jimage(a);
                    auto [jb, sb] = jimage(b);
                    auto [jc, sc] = jimage(c);
                    Series rhs = ExactScalar(-sa * sb * sc) * dTheta(ja, jb, jc);
                    Series diff = (Tas[tidx(a, b, c)] - rhs).with_cap(1);
                    ok = diff.is_zero();
                }
        jet.pipeline_checks["torsion equals -i(d - dbar) of the fundamental form"] = ok;
    }

    // Bismut connection: <S(e_a) e_b, e_d> = -1/2 T_as(a,b,d).
    std::vector<SMat> GamB = Gam;
    jet.SB = Tensor(nv, 3);
    for (int a = 0; a < nv; ++a)
        for (int b = 0; b < nv; ++b) {
            for (int c = 0; c < nv; ++c) {
                Series s(nv, kExactCap);
                for (int d = 0; d < nv; ++d) s += ginv[c][d] * Tas[tidx(a, b, d)];
                GamB[a][c][b] += ExactScalar::rational(-1, 2) * s;
            }
            for (int d = 0; d < nv; ++d) jet.SB(a, b, d) = ExactScalar::rational(-1, 2) * jet.Tas(a, b, d);
        }
    jet.RB = curvature(GamB);

    // nabla J, nabla nabla J (the second slot is differentiated with Levi-Civita).
    auto first_cov = [&](const std::vector<SMat>& G) {
        std::vector<SMat> K(nv);
        for (int a = 0; a < nv; ++a) K[a] = smat_add(smat_derivative(Jf, a), smat_commutator(G[a], Jf));
        return K;
    };
    auto second_cov = [&](const std::vector<SMat>& G, const std::vector<SMat>& K) {
        Tensor out(nv, 4);
        for (int a = 0; a < nv; ++a)
            for (int b = 0; b < nv; ++b) {
                SMat M = smat_add(smat_derivative(K[b], a), smat_commutator(G[a], K[b]));
                for (int k = 0; k < nv; ++k)
                    for (int l = 0; l < nv; ++l) {
                        ExactScalar v = M[l][k].at_zero();
                        for (int c = 0; c < nv; ++c) v -= Gam[a][c][b].at_zero() * K[c][l][k].at_zero();
                        out(a, b, k, l) = v;
                    }
            }
        return out;
    };
    auto KX = first_cov(Gam), KB = first_cov(GamB);
    jet.nablaXJ = Tensor(nv, 3);
    jet.nablaBJ = Tensor(nv, 3);
    for (int i = 0; i < nv; ++i)
        for (int j = 0; j < nv; ++j)
            for (int k = 0; k < nv; ++k) {
                jet.nablaXJ(i, j, k) = KX[i][k][j].at_zero();
                jet.nablaBJ(i, j, k) = KB[i][k][j].at_zero();
            }
    jet.nablaX2J = second_cov(Gam, KX);
    jet.nablaB2J = second_cov(GamB, KB);

    // Tr R^{T(1,0)X} = d(tr theta).
    jet.trRT10 = Tensor(nv, 2);
    for (int a = 0; a < nv; ++a)
        for (int b = 0; b < nv; ++b)
            jet.trRT10(a, b) = trtheta[0][b].coeff(unit_mono(a)) - trtheta[0][a].coeff(unit_mono(b));

    // R^E from the line-bundle potentials (diagonal).
    jet.RE = BundleForm(nv, jet.rk);
    for (std::size_t e = 0; e < phiE.size(); ++e) {
        if (!phiE[e].is_real()) throw InvalidPotential("potential of E is not real");
        Series phie = to_real_series(phiE[e], n, kPotentialCap);
        Tensor re = origin2(smat_scale(form_from_hessian(complex_hessian(phie, n), n), ExactScalar::pi() * ExactScalar(2)));
        for (int a = 0; a < nv; ++a)
            for (int b = 0; b < nv; ++b) jet.RE.at(a, b, static_cast<int>(e), static_cast<int>(e)) = re(a, b);
    }

    // Cross-check of d(Lambda T_as) data: theta'(W) = (i/2) sum g^{ab} T_as(d_a, **J** d_b, W).
    {
        std::vector<Series> thp(nv, Series(nv, kExactCap));
        for (int w = 0; w < nv; ++w) {
            Series s(nv, kExactCap);
            for (int a = 0; a < nv; ++a)
                for (int b = 0; b < nv; ++b)
                    for (int c = 0; c < nv; ++c) s += (ginv[a][b] * Jf[c][b]) * Tas[tidx(a, c, w)];
            thp[w] = (half() * I()) * s;
        }
        // Tensorial value from the jet (see lambda_scalars).
        auto J = jfrak_origin(n, q);
        bool ok = true;
        for (int x = 0; x < nv; ++x)
            for (int y = 0; y < nv; ++y) {
                ExactScalar coord = thp[y].coeff(unit_mono(x)) - thp[x].coeff(unit_mono(y));
                auto cov = [&](int m, int w) {
                    ExactScalar v;
                    for (int a = 0; a < nv; ++a)
                        for (int c = 0; c < nv; ++c) {
                            v += jet.covTas(m, a, c, w) * J[c * nv + a];
                            v += jet.Tas(a, c, w) * jet.nablaXJ(m, a, c);
                        }
                    return (half() * I()) * v;
                };
                ok = ok && (coord == cov(x, y) - cov(y, x));
            }
        jet.pipeline_checks["exterior derivative of the torsion trace matches its covariant form"] = ok;
    }

    // (v) Normal coordinates x(Z): (E^2 - E) x_d = -[Gamma(x)(Ex, Ex)]_d with E
    // the Euler operator; R^L is then expressed in the coordinate frame d/dZ_i.
    std::vector<Series> xs(nv);
    for (int a = 0; a < nv; ++a) xs[a] = Series::variable(nv, a, 3);
    std::vector<std::vector<Series>> GamAt(nv, std::vector<Series>(nv * nv));
    auto refresh_gamma = [&]() {
        for (int c = 0; c < nv; ++c)
            for (int a = 0; a < nv; ++a)
                for (int b = 0; b < nv; ++b) GamAt[c][a * nv + b] = Gam[a][c][b].compose(xs);
    };
    for (int iter = 0; iter < 3; ++iter) {
        refresh_gamma();
        std::vector<Series> Ex(nv);
        for (int a = 0; a < nv; ++a) Ex[a] = euler(xs[a]);
        std::vector<Series> next(nv);
        for (int c = 0; c < nv; ++c) {
            Series rhs(nv, 3);
            for (int a = 0; a < nv; ++a)
                for (int b = 0; b < nv; ++b) rhs -= GamAt[c][a * nv + b] * Ex[a] * Ex[b];
            Series x = Series::variable(nv, c, 3);
            rhs = rhs.with_cap(3);
            for (const auto& [m, v] : rhs.terms()) {
                int d = mono_degree(m);
                if (d >= 2) x.add_term(m, v * ExactScalar::rational(1, d * d - d));
            }
            next[c] = x;
        }
        xs = next;
    }
    // Coordinate frame d/dZ_i of the normal coordinates: frame[i][c] = dx_c/dZ_i.
    std::vector<std::vector<Series>> frame(nv, std::vector<Series>(nv));
    for (int i = 0; i < nv; ++i)
        for (int c = 0; c < nv; ++c) frame[i][c] = xs[c].derivative(i);
    std::vector<std::vector<Series>> RLx(nv, std::vector<Series>(nv));
    for (int c = 0; c < nv; ++c)
        for (int d = 0; d < nv; ++d) RLx[c][d] = RL[c][d].compose(xs);
    jet.dRL1 = Tensor(nv, 3);
    jet.dRL2 = Tensor(nv, 4);
    for (int i = 0; i < nv; ++i)
        for (int j = 0; j < nv; ++j) {
            Series F(nv, 2);
            for (int c = 0; c < nv; ++c)
                for (int d = 0; d < nv; ++d) F += RLx[c][d] * frame[i][c] * frame[j][d];
            F = F.with_cap(2);
            for (int k = 0; k < nv; ++k) {
                jet.dRL1(k, i, j) = F.coeff(unit_mono(k));
                for (int l = 0; l < nv; ++l) jet.dRL2(k, l, i, j) = second_derivative_origin(F, k, l);
            }
        }
    {
        bool ok = true;
        const ExactScalar f = ExactScalar::pi() * ExactScalar(-2) * I();
        for (int k = 0; k < nv; ++k)
            for (int i = 0; i < nv; ++i)
                for (int j = 0; j < nv; ++j) ok = ok && (jet.dRL1(k, i, j) == f * jet.nablaXJ(k, i, j));
        jet.pipeline_checks["first curvature derivative equals -2 pi i nabla J"] = ok;
    }
    return jet;
}

GeometryJet flat_jet(int n, int q, int rk) {
    std::vector<ComplexPoly> e(static_cast<std::size_t>(rk), ComplexPoly{n, {}});
    GeometryJet j = jet_from_potential(standard_potential(n, q), e, n, q);
    j.id = "flat-n" + std::to_string(n) + "-q" + std::to_string(q) + "-rk" + std::to_string(rk);
    return j;
}

GeometryJet fubini_study_jet(int n, int q, int rk) {
    std::vector<ComplexPoly> e(static_cast<std::size_t>(rk), ComplexPoly{n, {}});
    GeometryJet j = jet_from_potential(fubini_study_potential(n, q), e, n, q);
    j.id = "cp1-product-n" + std::to_string(n) + "-q" + std::to_string(q) + "-rk" + std::to_string(rk);
    return j;
}

GeometryJet random_jet(int n, int q, int rk, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    ComplexPoly phi = random_potential(n, q, rng);
    std::vector<ComplexPoly> e;
    for (int r = 0; r < rk; ++r) e.push_back(random_bundle_potential(n, rng));
    GeometryJet j = jet_from_potential(phi, e, n, q);
    j.id = "random-n" + std::to_string(n) + "-q" + std::to_string(q) + "-rk" + std::to_string(rk) + "-seed" +
           std::to_string(seed);
    return j;
}

// ---------------------------------------------------------------- frames

CVec xi_vector(const GeometryJet& j, int index, bool bar) { return dxi_vector(j.n, j.q, index, bar); }

std::vector<ExactScalar> jfrak_origin(int n, int q) {
    // omega(0) = s_j dx_j ^ dy_j with s_j = -1 for j < q; **J** = -omega at the origin.
    const int nv = 2 * n;
    std::vector<ExactScalar> J(static_cast<std::size_t>(nv * nv));
    for (int j = 0; j < n; ++j) {
        long s = j < q ? -1 : 1;
        // With g = I, omega(U,V) = <**J**U,V> gives **J**[c][b] = omega_{bc}.
        J[(2 * j + 1) * nv + 2 * j] = ExactScalar(s);
        J[(2 * j) * nv + 2 * j + 1] = ExactScalar(-s);
    }
    return J;
}

// ---------------------------------------------------------------- reports

bool Report::all_ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.ok; });
}

nlohmann::json Report::to_json() const {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& c : checks) out.push_back({{"name", c.name}, {"ok", c.ok}, {"detail", c.detail}});
    return out;
}

namespace {

std::string idx_str(std::initializer_list<int> idx) {
    std::string s = "(";
    bool first = true;
    for (int i : idx) {
        s += (first ? "" : ",") + std::to_string(i);
        first = false;
    }
    return s + ")";
}

}  // namespace

Report validate_jet(const GeometryJet& j) {
    Report rep;
    const int nv = j.dim();
    auto add = [&](const std::string& name, const std::vector<std::string>& bad) {
        rep.checks.push_back({name, bad.empty(), bad.empty() ? "" : scalar_list(bad)});
    };
    // Shapes.
    {
        std::vector<std::string> bad;
        auto shape = [&](const Tensor& t, int rank, const char* name) {
            if (t.dim != nv || t.rank != rank || t.data.size() != Tensor(nv, rank).data.size())
                bad.push_back(std::string(name) + " has the wrong shape");
        };
        shape(j.RL0, 2, "RL0");
        shape(j.dRL1, 3, "dRL1");
        shape(j.dRL2, 4, "dRL2");
        shape(j.RTX, 4, "RTX");
        shape(j.trRT10, 2, "trRT10");
        shape(j.Tas, 3, "Tas");
        shape(j.covTas, 4, "covTas");
        shape(j.dTas, 4, "dTas");
        shape(j.nablaXJ, 3, "nablaXJ");
        shape(j.nablaBJ, 3, "nablaBJ");
        shape(j.nablaX2J, 4, "nablaX2J");
        shape(j.nablaB2J, 4, "nablaB2J");
        shape(j.RB, 4, "RB");
        shape(j.SB, 3, "SB");
        if (j.RE.dim != nv || j.RE.rk != j.rk || j.RE.comp.size() != static_cast<std::size_t>(nv * nv * j.rk * j.rk))
            bad.push_back("RE has the wrong shape");
        if (j.n < 1 || j.n > 3 || j.q < 0 || j.q > j.n || j.rk < 1 || j.rk > 2) bad.push_back("dimensions out of range");
        add("tensor shapes", bad);
        if (!bad.empty()) return rep;
    }
    // R^L at the base point is the normalized model form.
    {
        std::vector<std::string> bad;
        auto J = jfrak_origin(j.n, j.q);
        const ExactScalar f = ExactScalar::pi() * ExactScalar(-2) * I();
        for (int a = 0; a < nv; ++a)
            for (int b = 0; b < nv; ++b)
                if (!(j.RL0(a, b) == f * J[b * nv + a])) bad.push_back("RL0" + idx_str({a, b}));
        add("R^L at the base point is -2 pi i omega_0", bad);
    }
    // Riemann symmetries.
    {
        std::vector<std::string> bad;
        for (int a = 0; a < nv; ++a)
            for (int b = 0; b < nv; ++b)
                for (int c = 0; c < nv; ++c)
                    for (int d = 0; d < nv; ++d) {
                        const auto& r = j.RTX;
                        if (!(r(a, b, c, d) == -r(b, a, c, d)) || !(r(a, b, c, d) == -r(a, b, d, c)) ||
                            !(r(a, b, c, d) == r(c, d, a, b)) ||
                            !(r(a, b, c, d) + r(b, c, a, d) + r(c, a, b, d)).is_zero())
                            bad.push_back("RTX" + idx_str({a, b, c, d}));
                    }
        add("Riemann symmetries of R^TX", bad);
        ExactScalar rx;
        for (int a = 0; a < nv; ++a)
            for (int b = 0; b < nv; ++b) rx += j.RTX(a, b, b, a);
        add("scalar curvature is the double contraction", rx == j.rX ? std::vector<std::string>{}
                                                                     : std::vector<std::string>{"rX = " + j.rX.to_string() + ", contraction = " + rx.to_string()});
    }
    // Cyclic identity for nabla^X J and the type constraint.
    {
        std::vector<std::string> bad;
        for (int a = 0; a < nv; ++a)
            for (int b = 0; b < nv; ++b)
                for (int c = 0; c < nv; ++c)
                    if (!(j.nablaXJ(a, b, c) + j.nablaXJ(b, c, a) + j.nablaXJ(c, a, b)).is_zero())
                        bad.push_back("nablaXJ" + idx_str({a, b, c}));
        add("cyclic identity of nabla^X J (d omega = 0)", bad);
        bad.clear();
        // Type (1,0)^3 + (0,1)^3 in the **J**-frame: mixed components in u, ubar vanish.
        for (int a = 0; a < j.n; ++a)
            for (int b = 0; b < j.n; ++b)
                for (int c = 0; c < j.n; ++c)
                    for (int mask = 1; mask < 7; ++mask) {
                        CVec x = xi_vector(j, a, mask & 1), y = xi_vector(j, b, mask & 2), z = xi_vector(j, c, mask & 4);
                        if (!contract(j.nablaXJ, {x, y, z}).is_zero()) bad.push_back("mixed type" + idx_str({a, b, c, mask}));
                    }
        add("type constraint of nabla^X J", bad);
    }
    // nabla^B J preserves T^(1,0) (commutes with J) and exchanges W and W-perp.
    {
        std::vector<std::string> bad;
        for (int i = 0; i < nv; ++i)
            for (int a = 0; a < j.n; ++a)
                for (int b = 0; b < j.n; ++b) {
                    CVec e(nv);
                    e[i] = ExactScalar(1);
                    // <(nabla_e J) d/dz_a, d/dz_b> = 0 : maps T^(1,0) into T^(1,0) (bilinear pairing with (1,0)).
                    CVec za = dz_vector(j.n, a, false), zb = dz_vector(j.n, b, false);
                    Tensor t = j.nablaBJ;
                    if (!contract(t, {e, za, zb}).is_zero()) bad.push_back("preserve" + idx_str({i, a, b}));
                    bool same_sector = (a < j.q) == (b < j.q);
                    CVec zbb = dz_vector(j.n, b, true);
                    if (same_sector && !contract(t, {e, za, zbb}).is_zero()) bad.push_back("exchange" + idx_str({i, a, b}));
                }
        add("nabla^B J preserves T^(1,0) and exchanges W, W-perp", bad);
    }
    // Antisymmetrized nabla^B nabla^B J equals [R^B, J].
    {
        std::vector<std::string> bad;
        auto J = jfrak_origin(j.n, j.q);
        for (int a = 0; a < nv; ++a)
            for (int b = 0; b < nv; ++b)
                for (int k = 0; k < nv; ++k)
                    for (int l = 0; l < nv; ++l) {
                        ExactScalar lhs = j.nablaB2J(a, b, k, l) - j.nablaB2J(b, a, k, l);
                        // <[R, J] e_k, e_l> = sum_c R[l][c] J[c][k] - J[l][c] R[c][k], R[l][c] = <R e_c, e_l>.
                        ExactScalar rhs;
                        for (int c = 0; c < nv; ++c)
                            rhs += j.RB(a, b, c, l) * J[c * nv + k] - J[l * nv + c] * j.RB(a, b, k, c);
                        if (!(lhs == rhs)) bad.push_back("nablaB2J" + idx_str({a, b, k, l}));
                    }
        add("antisymmetrized nabla^B nabla^B J equals [R^B, J]", bad);
    }
    // Antisymmetry of T_as and S^B.
    {
        std::vector<std::string> bad;
        for (int a = 0; a < nv; ++a)
            for (int b = 0; b < nv; ++b)
                for (int c = 0; c < nv; ++c) {
                    if (!(j.Tas(a, b, c) == -j.Tas(b, a, c)) || !(j.Tas(a, b, c) == -j.Tas(a, c, b)))
                        bad.push_back("Tas" + idx_str({a, b, c}));
                    if (!(j.SB(a, b, c) == -j.SB(a, c, b))) bad.push_back("SB" + idx_str({a, b, c}));
                    if (!(j.SB(a, b, c) == ExactScalar::rational(-1, 2) * j.Tas(a, b, c)))
                        bad.push_back("SB vs Tas" + idx_str({a, b, c}));
                }
        add("T_as totally antisymmetric, S^B antisymmetric and equal to -T_as/2", bad);
    }
    // Symmetries of the R^L derivatives.
    {
        std::vector<std::string> bad;
        for (int k = 0; k < nv; ++k)
            for (int a = 0; a < nv; ++a)
                for (int b = 0; b < nv; ++b) {
                    if (!(j.dRL1(k, a, b) == -j.dRL1(k, b, a))) bad.push_back("dRL1" + idx_str({k, a, b}));
                    for (int l = 0; l < nv; ++l)
                        if (!(j.dRL2(k, l, a, b) == -j.dRL2(k, l, b, a)) || !(j.dRL2(k, l, a, b) == j.dRL2(l, k, a, b)))
                            bad.push_back("dRL2" + idx_str({k, l, a, b}));
                }
        add("antisymmetry of dRL1, dRL2 and symmetry of dRL2 in derivatives", bad);
        bad.clear();
        const ExactScalar f = ExactScalar::pi() * ExactScalar(-2) * I();
        for (int k = 0; k < nv; ++k)
            for (int a = 0; a < nv; ++a)
                for (int b = 0; b < nv; ++b)
                    if (!(j.dRL1(k, a, b) == f * j.nablaXJ(k, a, b))) bad.push_back("dRL1" + idx_str({k, a, b}));
        add("dRL1 equals -2 pi i nabla^X J", bad);
    }
    // R^E antisymmetric.
    {
        std::vector<std::string> bad;
        for (int a = 0; a < nv; ++a)
            for (int b = 0; b < nv; ++b)
                for (int e = 0; e < j.rk; ++e)
                    for (int f = 0; f < j.rk; ++f)
                        if (!(j.RE.at(a, b, e, f) == -j.RE.at(b, a, e, f))) bad.push_back("RE" + idx_str({a, b, e, f}));
        add("R^E antisymmetric", bad);
    }
    for (const auto& [name, ok] : j.pipeline_checks)
        rep.checks.push_back({"pipeline: " + name, ok, ok ? "" : "failed during jet generation"});
    return rep;
}

// ---------------------------------------------------------------- scalars

namespace {

// Frame vector d/dxi_a (bar=false) or d/dxibar_a (bar=true).
CVec xv(const GeometryJet& j, int a, bool bar) { return xi_vector(j, a, bar); }

// Endomorphism applied to a vector: (A v)^c = sum_b A[c][b] v^b, with A given by
// the tensor slice <A e_b, e_c> = t(prefix..., b, c).
CVec apply_slice3(const Tensor& t, const CVec& w, const CVec& v) {
    // <(T(w)) v, e_c> = sum t(a,b,c) w^a v^b
    const int nv = t.dim;
    CVec out(nv);
    for (int a = 0; a < nv; ++a) {
        if (w[a].is_zero()) continue;
        for (int b = 0; b < nv; ++b) {
            if (v[b].is_zero()) continue;
            ExactScalar f = w[a] * v[b];
            for (int c = 0; c < nv; ++c)
                if (!t(a, b, c).is_zero()) out[c] += f * t(a, b, c);
        }
    }
    return out;
}

ExactScalar dot(const CVec& a, const CVec& b) {
    ExactScalar s;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!a[i].is_zero() && !b[i].is_zero()) s += a[i] * b[i];
    return s;
}

ExactScalar abs2(const ExactScalar& x) { return x * x.conj(); }

// Covariant derivative of theta'(W) = (i/2) sum_a T_as(e_a, **J** e_a, W).
ExactScalar nabla_theta_prime(const GeometryJet& j, const std::vector<ExactScalar>& J, const CVec& m, const CVec& w) {
    const int nv = j.dim();
    ExactScalar v;
    for (int mm = 0; mm < nv; ++mm) {
        if (m[mm].is_zero()) continue;
        for (int ww = 0; ww < nv; ++ww) {
            if (w[ww].is_zero()) continue;
            ExactScalar s;
            for (int a = 0; a < nv; ++a)
                for (int c = 0; c < nv; ++c) {
                    s += j.covTas(mm, a, c, ww) * J[c * nv + a];
                    s += j.Tas(a, c, ww) * j.nablaXJ(mm, a, c);
                }
            v += m[mm] * w[ww] * s;
        }
    }
    return (half() * I()) * v;
}

}  // namespace

ExactScalar norm_sq_nablaBJ(const GeometryJet& j) {
    ExactScalar s;
    for (const auto& x : j.nablaBJ.data) s += abs2(x);
    return s;
}

ExactScalar norm_sq_nablaXJ(const GeometryJet& j) {
    ExactScalar s;
    for (const auto& x : j.nablaXJ.data) s += abs2(x);
    return s;
}

ExactScalar norm_sq_S_bar(const GeometryJet& j) {
    // u = sqrt2 d/dxi: three u-factors, squared modulus gives 2^3.
    ExactScalar s;
    for (int a = 0; a < j.n; ++a)
        for (int b = 0; b < j.n; ++b)
            for (int c = 0; c < j.n; ++c) s += abs2(contract(j.SB, {xv(j, a, true), xv(j, b, false), xv(j, c, false)}));
    return s * ExactScalar(8);
}

ExactScalar norm_sq_S_hol(const GeometryJet& j) {
    ExactScalar s;
    for (int a = 0; a < j.n; ++a)
        for (int b = 0; b < j.n; ++b)
            for (int c = 0; c < j.n; ++c) s += abs2(contract(j.SB, {xv(j, a, false), xv(j, b, false), xv(j, c, false)}));
    return s * ExactScalar(8);
}

// Contraction constant for Lambda_omega Lambda_omega on 4-forms:
// Lambda Lambda (dT) = kLambdaLambda * sum_{ij} dT(u_i, ubar_i, u_j, ubar_j).
static const ExactScalar& lambda_lambda_constant() {
    static const ExactScalar c = ExactScalar(-4);
    return c;
}

LambdaScalars lambda_scalars(const GeometryJet& j) {
    LambdaScalars out;
    const auto J = jfrak_origin(j.n, j.q);
    // Lambda(d Lambda T) = -2 sum_i d theta'(u_i, ubar_i) = -4 sum_i d theta'(dxi_i, dxibar_i).
    for (int i = 0; i < j.n; ++i) {
        CVec x = xv(j, i, false), y = xv(j, i, true);
        ExactScalar d = nabla_theta_prime(j, J, x, y) - nabla_theta_prime(j, J, y, x);
        out.dLambdaT += d * ExactScalar(-4);
    }
    ExactScalar s;
    for (int a = 0; a < j.n; ++a)
        for (int b = 0; b < j.n; ++b) s += contract(j.dTas, {xv(j, a, false), xv(j, a, true), xv(j, b, false), xv(j, b, true)});
    out.LambdaLambdaDT = lambda_lambda_constant() * s * ExactScalar(4);  // u = sqrt2 dxi (four factors)

    // P(U,V) = 1/2 <R^B(u_j,ubar_j)U,V> + 1/4 dT_as(u_j,ubar_j,U,V) + (1/2 Tr R^{T(1,0)} + R^E)(U,V).
    const int nv = j.dim();
    out.P = BundleForm(nv, j.rk);
    for (int a = 0; a < nv; ++a)
        for (int b = 0; b < nv; ++b) {
            CVec ea(nv), eb(nv);
            ea[a] = ExactScalar(1);
            eb[b] = ExactScalar(1);
            ExactScalar scal;
            for (int m = 0; m < j.n; ++m) {
                CVec x = xv(j, m, false), y = xv(j, m, true);
                scal += contract(j.RB, {x, y, ea, eb});               // 1/2 * 2 (u = sqrt2 dxi)
                scal += half() * contract(j.dTas, {x, y, ea, eb});    // 1/4 * 2
            }
            scal += half() * j.trRT10(a, b);
            for (int e = 0; e < j.rk; ++e) {
                out.P.at(a, b, e, e) += scal;
                for (int f = 0; f < j.rk; ++f) out.P.at(a, b, e, f) += j.RE.at(a, b, e, f);
            }
        }
    return out;
}

bool is_kahler(const GeometryJet& j) { return j.Tas.is_zero() && j.covTas.is_zero() && j.dTas.is_zero(); }

std::vector<IdentityResult> identity_suite(const GeometryJet& j) {
    std::vector<IdentityResult> out;
    const int n = j.n;
    const auto lam = lambda_scalars(j);
    const ExactScalar nB = norm_sq_nablaBJ(j), nX = norm_sq_nablaXJ(j);
    const ExactScalar sBar = norm_sq_S_bar(j), sHol = norm_sq_S_hol(j);
    auto x = [&](int a) { return xv(j, a, false); };
    auto y = [&](int a) { return xv(j, a, true); };

    // Difference of Bismut and Levi-Civita norms of nabla J.
    {
        ExactScalar rhs = sHol + sBar;
        ExactScalar cross;
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                // (i/2)<S(u_i)u_j, (nabla^X_{ubar_i} J) ubar_j> - (i/2)<S(ubar_i)ubar_j, (nabla^X_{u_i} J) u_j>
                CVec s1 = apply_slice3(j.SB, x(i), x(k));
                CVec t1 = apply_slice3(j.nablaXJ, y(i), y(k));
                CVec s2 = apply_slice3(j.SB, y(i), y(k));
                CVec t2 = apply_slice3(j.nablaXJ, x(i), x(k));
                cross += dot(s1, t1) - dot(s2, t2);
            }
        rhs += cross * (half() * I()) * ExactScalar(4);  // four u-factors
        out.push_back({"bismut-minus-levi-civita-norm-of-nabla-J", (nB - nX) * ExactScalar::rational(1, 8), rhs});
    }
    // Curvature difference against torsion norms and Lambda Lambda dT.
    ExactScalar curvDiff;
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            curvDiff += contract(j.RB, {x(i), y(i), x(k), y(k)}) - contract(j.RTX, {x(i), y(i), x(k), y(k)});
        }
    curvDiff *= ExactScalar(4);
    out.push_back({"curvature-difference-via-torsion-norms", curvDiff,
                   sHol - sBar + ExactScalar::rational(1, 16) * lam.LambdaLambdaDT});
    // Mixed-sector norms of nabla^B J against S^B.
    {
        ExactScalar l1, l2;
        for (int i = 0; i < n; ++i)
            for (int a = 0; a < j.q; ++a)
                for (int b = j.q; b < n; ++b) {
                    l1 += abs2(contract(j.nablaBJ, {y(i), x(a), x(b)}));
                    l2 += abs2(contract(j.nablaBJ, {x(i), x(a), x(b)}));
                }
        out.push_back({"mixed-sector-nabla-B-J-antiholomorphic-direction", l1 * ExactScalar(8), ExactScalar(2) * sBar});
        out.push_back({"mixed-sector-nabla-B-J-holomorphic-direction", l2 * ExactScalar(8),
                       ExactScalar::rational(1, 4) * nB - ExactScalar(2) * sBar});
    }
    // Lambda d Lambda T against Lambda Lambda dT and connection terms.
    {
        // <nabla_{ubar_i} ubar_j, ubar_k> = (i/2)<(nabla_{ubar_i} J) ubar_j, ubar_k>;
        // <nabla_{u_i} u_j, u_k> = (-i/2)<(nabla_{u_i} J) u_j, u_k>.
        ExactScalar t;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c) {
                    ExactScalar s1 = contract(j.SB, {x(a), x(b), x(c)});
                    ExactScalar g1 = (half() * I()) * contract(j.nablaXJ, {y(a), y(b), y(c)});
                    ExactScalar s2 = contract(j.SB, {y(a), y(b), y(c)});
                    ExactScalar g2 = (ExactScalar::rational(-1, 2) * I()) * contract(j.nablaXJ, {x(a), x(b), x(c)});
                    t += s1 * g1 + s2 * g2;
                }
        t *= ExactScalar(8);  // six u-factors
        out.push_back({"lambda-d-lambda-torsion-decomposition", ExactScalar::rational(1, 4) * lam.dLambdaT,
                       ExactScalar::rational(1, 16) * lam.LambdaLambdaDT - t});
    }
    // Curvature difference in closed form.
    out.push_back({"bismut-minus-levi-civita-curvature-trace", curvDiff,
                   ExactScalar::rational(1, 8) * (nB - nX) + ExactScalar::rational(1, 4) * lam.dLambdaT -
                       ExactScalar(2) * sBar});
    // i sum <(nabla^B nabla^B J)_(dxi_i, dxibar_i) dxi_j, dxibar_j> = |nabla^B J|^2 / 16.
    {
        ExactScalar s;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) s += contract(j.nablaB2J, {x(a), y(a), x(b), y(b)});
        out.push_back({"second-bismut-derivative-of-J-trace", I() * s, ExactScalar::rational(1, 16) * nB});
    }
    // <R^TX(dxi_i, dxi_j) dxibar_i, dxibar_j> = |nabla^X J|^2 / 32.
    {
        ExactScalar s;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) s += contract(j.RTX, {x(a), x(b), y(a), y(b)});
        out.push_back({"holomorphic-curvature-trace-vs-nabla-X-J", s, ExactScalar::rational(1, 32) * nX});
    }
    if (is_kahler(j)) {
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) {
                ExactScalar s5, s6, r6;
                for (int a = 0; a < n; ++a) {
                    s5 += contract(j.nablaX2J, {y(a), x(a), y(b), y(c)});
                    s6 += contract(j.nablaX2J, {x(a), y(a), y(b), y(c)});
                    r6 += contract(j.RTX, {x(a), y(a), y(b), y(c)});
                }
                std::string suffix = "[" + std::to_string(b + 1) + "," + std::to_string(c + 1) + "]";
                out.push_back({"kahler-second-derivative-antiholomorphic-trace" + suffix, s5, ExactScalar()});
                out.push_back({"kahler-second-derivative-vs-curvature" + suffix, s6, ExactScalar(-2) * I() * r6});
            }
        ExactScalar dT;
        for (const auto& v : j.Tas.data) dT += abs2(v);
        out.push_back({"kahler-torsion-vanishes", dT, ExactScalar()});
        bool same = j.RB == j.RTX;
        out.push_back({"kahler-bismut-equals-levi-civita", ExactScalar(same ? 0 : 1), ExactScalar()});
    }
    return out;
}

// ---------------------------------------------------------------- JSON

namespace {

nlohmann::json tensor_json(const Tensor& t) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& s : t.data) a.push_back(s.to_json());
    return a;
}

Tensor tensor_from(const nlohmann::json& j, const char* key, int dim, int rank) {
    Tensor t(dim, rank);
    if (!j.contains(key)) throw InvalidJet(std::string("jet is missing field ") + key);
    const auto& a = j.at(key);
    if (!a.is_array() || a.size() != t.data.size())
        throw InvalidJet(std::string("field ") + key + " has the wrong number of components");
    for (std::size_t i = 0; i < a.size(); ++i) t.data[i] = ExactScalar::from_json(a[i]);
    return t;
}

}  // namespace

nlohmann::json jet_to_json(const GeometryJet& j) {
    nlohmann::json out;
    out["schema"] = "bergman-jet/1";
    out["id"] = j.id;
    out["n"] = j.n;
    out["q"] = j.q;
    out["rk"] = j.rk;
    out["frame"] =
        "real frame e_(2j-1) = d/dx_j, e_(2j) = d/dy_j, orthonormal at the base point; dense row-major components";
    out["RL0"] = tensor_json(j.RL0);
    out["dRL1"] = tensor_json(j.dRL1);
    out["dRL2"] = tensor_json(j.dRL2);
    out["RTX"] = tensor_json(j.RTX);
    out["rX"] = j.rX.to_json();
    nlohmann::json re = nlohmann::json::array();
    for (const auto& s : j.RE.comp) re.push_back(s.to_json());
    out["RE"] = re;
    out["trRT10"] = tensor_json(j.trRT10);
    out["Tas"] = tensor_json(j.Tas);
    out["covTas"] = tensor_json(j.covTas);
    out["dTas"] = tensor_json(j.dTas);
    out["nablaXJ"] = tensor_json(j.nablaXJ);
    out["nablaBJ"] = tensor_json(j.nablaBJ);
    out["nablaX2J"] = tensor_json(j.nablaX2J);
    out["nablaB2J"] = tensor_json(j.nablaB2J);
    out["RB"] = tensor_json(j.RB);
    out["SB"] = tensor_json(j.SB);
    nlohmann::json pc = nlohmann::json::object();
    for (const auto& [k, v] : j.pipeline_checks) pc[k] = v;
    out["pipeline_checks"] = pc;
    return out;
}

GeometryJet jet_from_json(const nlohmann::json& in) {
    if (!in.is_object() || in.value("schema", std::string()) != "bergman-jet/1")
        throw InvalidJet("not a bergman-jet/1 document");
    GeometryJet j;
    j.n = in.at("n").get<int>();
    j.q = in.at("q").get<int>();
    j.rk = in.value("rk", 1);
    j.id = in.value("id", std::string());
    if (j.n < 1 || j.n > 3 || j.q < 0 || j.q > j.n || j.rk < 1 || j.rk > 2) throw InvalidJet("dimensions out of range");
    const int nv = j.dim();
    j.RL0 = tensor_from(in, "RL0", nv, 2);
    j.dRL1 = tensor_from(in, "dRL1", nv, 3);
    j.dRL2 = tensor_from(in, "dRL2", nv, 4);
    j.RTX = tensor_from(in, "RTX", nv, 4);
    j.rX = ExactScalar::from_json(in.at("rX"));
    j.RE = BundleForm(nv, j.rk);
    const auto& re = in.at("RE");
    if (re.size() != j.RE.comp.size()) throw InvalidJet("field RE has the wrong number of components");
    for (std::size_t i = 0; i < re.size(); ++i) j.RE.comp[i] = ExactScalar::from_json(re[i]);
    j.trRT10 = tensor_from(in, "trRT10", nv, 2);
    j.Tas = tensor_from(in, "Tas", nv, 3);
    j.covTas = tensor_from(in, "covTas", nv, 4);
    j.dTas = tensor_from(in, "dTas", nv, 4);
    j.nablaXJ = tensor_from(in, "nablaXJ", nv, 3);
    j.nablaBJ = tensor_from(in, "nablaBJ", nv, 3);
    j.nablaX2J = tensor_from(in, "nablaX2J", nv, 4);
    j.nablaB2J = tensor_from(in, "nablaB2J", nv, 4);
    j.RB = tensor_from(in, "RB", nv, 4);
    j.SB = tensor_from(in, "SB", nv, 3);
    if (in.contains("pipeline_checks"))
        for (const auto& [k, v] : in.at("pipeline_checks").items()) j.pipeline_checks[k] = v.get<bool>();
    return j;
}

}  // namespace bergman
