#include "bergman/model_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "bergman/b1.hpp"
#include "bergman/geometry.hpp"

namespace bergman {

namespace {

using Poly = std::vector<Rational>;  // ascending powers of p

Poly poly_mul(const Poly& a, const Poly& b) {
    Poly r(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

// prod_k (eps_k p + 1) * scale, eps_k = -1 for k < q.
Poly linear_product(int n, int q, const Rational& scale) {
    Poly r{scale};
    for (int k = 0; k < n; ++k) r = poly_mul(r, Poly{Rational(1), Rational(k < q ? -1 : 1)});
    return r;
}

Rational coeff(const Poly& p, int k) { return k >= 0 && k < static_cast<int>(p.size()) ? p[k] : Rational(0); }

std::string rat(const Rational& r) { return rational_to_string(r); }

}  // namespace

Rational cp1_product_trace(int p, int n, int q) {
    if (p < 2) throw std::invalid_argument("tensor power p must be at least 2");
    if (n < 1 || q < 0 || q > n) throw std::invalid_argument("need 0 <= q <= n and n >= 1");
    mpz_class t = 1;
    for (int k = 0; k < n; ++k) t *= (k < q ? p - 1 : p + 1);
    return Rational(t);
}

std::vector<Rational> fit_expansion(const std::vector<std::pair<long, Rational>>& samples, int n) {
    if (n < 0) throw std::invalid_argument("degree must be non-negative");
    std::map<long, Rational> pts;
    for (const auto& [p, v] : samples) {
        auto [it, inserted] = pts.emplace(p, v);
        if (!inserted && it->second != v)
            throw std::invalid_argument("contradictory samples at p = " + std::to_string(p));
    }
    if (static_cast<int>(pts.size()) < n + 1)
        throw InsufficientSamples("insufficient samples: " + std::to_string(pts.size()) + " distinct p values, need " +
                                  std::to_string(n + 1));
    // Newton divided differences over all samples, then expansion to monomials.
    std::vector<long> xs;
    std::vector<Rational> dd;
    for (const auto& [p, v] : pts) {
        xs.push_back(p);
        dd.push_back(v);
    }
    const std::size_t m = xs.size();
    for (std::size_t level = 1; level < m; ++level)
        for (std::size_t i = m - 1; i >= level; --i) dd[i] = (dd[i] - dd[i - 1]) / Rational(xs[i] - xs[i - level]);
    Poly acc{dd[m - 1]};
    for (std::size_t i = m - 1; i-- > 0;) {
        acc = poly_mul(acc, Poly{Rational(-xs[i]), Rational(1)});
        acc[0] += dd[i];
    }
    for (std::size_t k = static_cast<std::size_t>(n) + 1; k < acc.size(); ++k)
        if (sgn(acc[k]) != 0)
            throw std::invalid_argument("samples are not interpolated by a polynomial of degree " + std::to_string(n));
    std::vector<Rational> out;
    for (int k = n; k >= 0; --k) out.push_back(coeff(acc, k));
    return out;
}

nlohmann::json cp1_product_table(int n, int q, int pmin, int pmax, bool fit) {
    if (pmin > pmax) throw std::invalid_argument("pmin must not exceed pmax");
    nlohmann::json rows = nlohmann::json::array();
    std::vector<std::pair<long, Rational>> samples;
    for (int p = pmin; p <= pmax; ++p) {
        Rational t = cp1_product_trace(p, n, q);
        samples.emplace_back(p, t);
        rows.push_back({{"p", p}, {"trace", rat(t)}});
    }
    nlohmann::json out = {{"n", n}, {"q", q}, {"samples", rows}};
    if (fit) {
        nlohmann::json c = nlohmann::json::array();
        for (const auto& r : fit_expansion(samples, n)) c.push_back(rat(r));
        out["coefficients"] = c;
    }
    return out;
}

std::pair<Rational, Rational> RrhReport::coefficients() const { return {h_pn, h_pn1}; }

nlohmann::json RrhReport::to_json() const {
    return {{"n", n},
            {"q", q},
            {"rk_e", rk},
            {"coefficients", {rat(h_pn), rat(h_pn1)}},
            {"index_side", {rat(index_pn), rat(index_pn1)}},
            {"characteristic_class_side", {rat(rr_pn), rat(rr_pn1)}},
            {"vol_trace_b0", rat(vol_tr_b0)},
            {"vol_trace_b1", rat(vol_tr_b1)},
            {"jet_trace_b1", jet_tr_b1.to_string()},
            {"consistent", consistent}};
}

RrhReport rrh_coefficients(int n, int q, int rk) {
    if (n < 1 || n > 3 || q < 0 || q > n) throw std::invalid_argument("need 0 <= q <= n <= 3");
    if (rk < 1) throw std::invalid_argument("rank of E must be positive");
    RrhReport r;
    r.n = n;
    r.q = q;
    r.rk = rk;
    const Rational sign = (q % 2 == 0) ? 1 : -1;

    // Left: dimension polynomial rk (p-1)^q (p+1)^(n-q) of H^{0,q}, signed by (-1)^q.
    Poly dims{Rational(rk)};
    for (int k = 0; k < n; ++k) dims = poly_mul(dims, Poly{Rational(k < q ? -1 : 1), Rational(1)});
    r.h_pn = coeff(dims, n);
    r.h_pn1 = coeff(dims, n - 1);
    r.index_pn = sign * r.h_pn;
    r.index_pn1 = sign * r.h_pn1;

    // Right: each factor contributes int (1 + omega_k)(1 + eps_k p omega_k) = 1 + eps_k p,
    // from Td(T CP^1) = 1 + c1/2, c1(T CP^1) = 2 omega_k, c1(L_k) = eps_k omega_k, int omega_k = 1.
    const Poly rr = linear_product(n, q, Rational(rk));
    r.rr_pn = coeff(rr, n);
    r.rr_pn1 = coeff(rr, n - 1);

    // Kernel side: omega = sum eps_k omega_k, dv_X = (-1)^q omega^n/n! = prod omega_k, vol = 1.
    // Tr b0 = rk; Tr b1 = rk/2 Lambda_omega c1(T^{(1,0)}X) with Lambda_omega(2 omega_k) = 2 eps_k.
    Rational lambda_c1 = 0;
    for (int k = 0; k < n; ++k) lambda_c1 += (k < q ? -2 : 2);
    r.vol_tr_b0 = Rational(rk);
    r.vol_tr_b1 = Rational(rk) * lambda_c1 / 2;
    r.jet_tr_b1 = b1_trace(fubini_study_jet(n, q, rk));

    r.consistent = r.index_pn == r.rr_pn && r.index_pn1 == r.rr_pn1 && r.h_pn == r.vol_tr_b0 &&
                   r.h_pn1 == r.vol_tr_b1 && r.jet_tr_b1 == ExactScalar(r.vol_tr_b1);
    return r;
}

nlohmann::json SectionsKernelReport::to_json() const {
    nlohmann::json pts = nlohmann::json::array();
    for (std::size_t i = 0; i < points.size(); ++i)
        pts.push_back({{"re", points[i].real()}, {"im", points[i].imag()}, {"value", values[i]}});
    return {{"p", p}, {"expected", p + 1}, {"points", pts}, {"max_deviation", max_deviation}};
}

SectionsKernelReport cp1_sections_kernel(int p, const std::vector<std::complex<double>>& points) {
    if (p < 0 || p > 60) throw std::invalid_argument("p must lie in [0, 60]");
    SectionsKernelReport rep;
    rep.p = p;
    rep.points = points;
    for (const auto& z : points) {
        // |z^k|^2_{h^p} / ||z^k||^2 with ||z^k||^2 = 1 / ((p+1) C(p,k)) for the normalized volume,
        // summed: (p+1) sum_k C(p,k) |z|^{2k} / (1+|z|^2)^p.
        const double t = std::norm(z);
        const double w = t / (1.0 + t), u = 1.0 / (1.0 + t);
        double sum = 0.0, binom = 1.0;
        for (int k = 0; k <= p; ++k) {
            sum += binom * std::pow(w, k) * std::pow(u, p - k);
            binom = binom * (p - k) / (k + 1);
        }
        const double value = (p + 1) * sum;
        rep.values.push_back(value);
        rep.max_deviation = std::max(rep.max_deviation, std::abs(value - (p + 1)));
    }
    return rep;
}

}  // namespace bergman
