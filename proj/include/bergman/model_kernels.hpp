#pragma once
// Bergman kernels of the product of n projective lines with
// L = O(-1) on the first q factors and O(1) on the others: exact traces,
// exact polynomial fits in p, the Riemann-Roch-Hirzebruch coefficient check,
// and a floating-point witness for the constancy of the section kernel.

#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bergman/exact.hpp"

namespace bergman {

class InsufficientSamples : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Tr P_p^{0,q}(x,x) = (p-1)^q (p+1)^(n-q); requires p >= 2.
Rational cp1_product_trace(int p, int n, int q);

// Exact interpolation of (p, trace) samples by a polynomial of degree <= n.
// Returns the coefficients of p^n, ..., p^0.  Needs at least n+1 distinct p;
// throws InsufficientSamples otherwise and std::invalid_argument when the
// samples are contradictory or not of degree <= n.
std::vector<Rational> fit_expansion(const std::vector<std::pair<long, Rational>>& samples, int n);

// Samples of cp1_product_trace for p in [pmin, pmax] as a JSON table.
nlohmann::json cp1_product_table(int n, int q, int pmin, int pmax, bool fit);

struct RrhReport {
    int n = 0, q = 0, rk = 1;
    // h^{0,q}_p = dim H^{0,q}(X, L^p (x) E) expanded in p: coefficients of p^n and p^(n-1).
    Rational h_pn, h_pn1;
    // (-1)^q h^{0,q}_p: the same coefficients with the Euler-characteristic sign.
    Rational index_pn, index_pn1;
    // Integral of Td(T^{(1,0)}X) ch(L^p (x) E): the same two coefficients.
    Rational rr_pn, rr_pn1;
    // Integrals of Tr b0 and Tr b1 against dv_X = (-1)^q omega^n / n!.
    Rational vol_tr_b0, vol_tr_b1;
    // Tr b1 of the closed form on the product jet at the base point.
    ExactScalar jet_tr_b1;
    bool consistent = false;

    // The checked coefficients of h^{0,q}_p, (p^n, p^(n-1)).
    std::pair<Rational, Rational> coefficients() const;
    nlohmann::json to_json() const;
};

// Requires 0 <= q <= n <= 3 and rk >= 1 (E trivial of rank rk).
RrhReport rrh_coefficients(int n, int q, int rk);

struct SectionsKernelReport {
    int p = 0;
    std::vector<std::complex<double>> points;
    std::vector<double> values;
    double max_deviation = 0.0;
    nlohmann::json to_json() const;
};

// sum_k C(p,k) |z|^{2k} / (1+|z|^2)^p at each point, compared with p+1.
// Requires 0 <= p <= 60.
SectionsKernelReport cp1_sections_kernel(int p, const std::vector<std::complex<double>>& points);

}  // namespace bergman
