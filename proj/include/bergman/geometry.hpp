#pragma once
// Pointwise geometry jets: curvatures, torsion and derivatives of the
// almost-complex structure **J** at a base point, built from local potentials
// by truncated power-series differential geometry, plus the tensor identity
// suite relating them.
//
// Real frame: e_{2j} = d/dx_j, e_{2j+1} = d/dy_j (0-based j), orthonormal at
// the base point.  The almost-complex structure J is the standard one; the
// metric is g = |omega(., J .)| and **J** is defined by omega(U,V) = g(**J**U, V).

#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "bergman/exact.hpp"
#include "bergman/series.hpp"

namespace bergman {

class DegenerateCurvature : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidJet : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidPotential : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Dense tensor with every index ranging over the 2n real frame vectors.
struct Tensor {
    int dim = 0;
    int rank = 0;
    std::vector<ExactScalar> data;

    Tensor() = default;
    Tensor(int dim_, int rank_);

    ExactScalar& operator()(int i, int j) { return data[i * dim + j]; }
    const ExactScalar& operator()(int i, int j) const { return data[i * dim + j]; }
    ExactScalar& operator()(int i, int j, int k) { return data[(i * dim + j) * dim + k]; }
    const ExactScalar& operator()(int i, int j, int k) const { return data[(i * dim + j) * dim + k]; }
    ExactScalar& operator()(int i, int j, int k, int l) { return data[((i * dim + j) * dim + k) * dim + l]; }
    const ExactScalar& operator()(int i, int j, int k, int l) const {
        return data[((i * dim + j) * dim + k) * dim + l];
    }
    bool is_zero() const;
    bool operator==(const Tensor&) const = default;
};

// Complex vector given by its components in the real frame.
using CVec = std::vector<ExactScalar>;

// Full multilinear evaluation of a tensor on complex vectors (C-bilinear).
ExactScalar contract(const Tensor& t, const std::vector<CVec>& args);

// End(E)-valued 2-form: comp[(i*2n+j)*rk*rk + e*rk + f].
struct BundleForm {
    int dim = 0;
    int rk = 1;
    std::vector<ExactScalar> comp;

    BundleForm() = default;
    BundleForm(int dim_, int rk_) : dim(dim_), rk(rk_), comp(static_cast<std::size_t>(dim_ * dim_ * rk_ * rk_)) {}
    ExactScalar& at(int i, int j, int e, int f) { return comp[((i * dim + j) * rk + e) * rk + f]; }
    const ExactScalar& at(int i, int j, int e, int f) const { return comp[((i * dim + j) * rk + e) * rk + f]; }
    // rk x rk matrix obtained by evaluating on two complex vectors.
    std::vector<ExactScalar> evaluate(const CVec& u, const CVec& v) const;
    bool operator==(const BundleForm&) const = default;
};

struct GeometryJet {
    int n = 1;
    int q = 0;
    int rk = 1;
    std::string id;

    Tensor RL0;       // R^L(e_i,e_j) at the base point
    Tensor dRL1;      // [k][i][j]   d_k (R^L(d/dZ_i, d/dZ_j)) in normal coordinates Z
    Tensor dRL2;      // [k][l][i][j] d_k d_l (R^L(d/dZ_i, d/dZ_j))
    Tensor RTX;       // <R^TX(e_i,e_j)e_k,e_l>
    ExactScalar rX;   // scalar curvature
    BundleForm RE;    // R^E
    Tensor trRT10;    // Tr R^{T(1,0)X}
    Tensor Tas;       // anti-symmetrized torsion of the Chern connection
    Tensor covTas;    // [m][i][j][k] (nabla^X_{e_m} T_as)(e_i,e_j,e_k)
    Tensor dTas;      // exterior derivative of T_as
    Tensor nablaXJ;   // [i][j][k] <(nabla^X_{e_i} **J**) e_j, e_k>
    Tensor nablaBJ;   // same with the Bismut connection
    Tensor nablaX2J;  // [i][j][k][l] <(nabla^X nabla^X **J**)_{(e_i,e_j)} e_k, e_l>
    Tensor nablaB2J;  // Bismut analogue
    Tensor RB;        // <R^B(e_i,e_j)e_k,e_l>
    Tensor SB;        // [i][j][k] <S^B(e_i)e_j,e_k>

    // Consistency checks recorded while the jet was generated from a potential.
    std::map<std::string, bool> pipeline_checks;

    int dim() const { return 2 * n; }
    bool operator==(const GeometryJet&) const = default;
};

// ---------------------------------------------------------------- potentials

// Polynomial in z, zbar: exponent slots 0..n-1 for z, 3..3+n-1 for zbar.
struct ComplexPoly {
    int n = 1;
    std::map<std::array<std::uint8_t, 6>, ExactScalar> terms;

    void add(const std::array<std::uint8_t, 6>& e, const ExactScalar& c);
    bool is_real() const;
    int degree() const;
};

// Parses {"z1^a z̄1^b ...": "coefficient"}; "zb1" and "zbar1" also denote z̄1.
ComplexPoly parse_potential(const nlohmann::json& j, int n);
nlohmann::json potential_to_json(const ComplexPoly& p);

// 1/2 (-sum_{j<=q} |z_j|^2 + sum_{j>q} |z_j|^2).
ComplexPoly standard_potential(int n, int q);
// Product of Fubini-Study factors (1/2pi) log(1 + pi|z_j|^2), negated for
// j <= q, truncated at degree 4.
ComplexPoly fubini_study_potential(int n, int q);
// Standard potential plus seeded random real cubic and quartic terms.
ComplexPoly random_potential(int n, int q, std::mt19937_64& rng);
// Seeded random real quadratic potential (curvature of a line bundle).
ComplexPoly random_bundle_potential(int n, std::mt19937_64& rng);

// Full pipeline.  phiE has one entry per line summand of E (empty: trivial, rank 1).
GeometryJet jet_from_potential(const ComplexPoly& phiL, const std::vector<ComplexPoly>& phiE, int n, int q);
GeometryJet flat_jet(int n, int q, int rk = 1);
GeometryJet fubini_study_jet(int n, int q, int rk = 1);
// Seeded random jet: random potential for L and random line bundles for E.
GeometryJet random_jet(int n, int q, int rk, std::uint64_t seed);

// ---------------------------------------------------------------- frames

// Real-frame components of u_j = sqrt2 d/dxi_j are irrational, so the frame
// helpers return d/dxi_j and d/dxibar_j; u-frame expressions carry explicit
// powers of 2.
CVec xi_vector(const GeometryJet& j, int index, bool bar);
// **J** at the base point as a real matrix [c][b] (image of e_b).
std::vector<ExactScalar> jfrak_origin(int n, int q);

// ---------------------------------------------------------------- reports

struct CheckResult {
    std::string name;
    bool ok = false;
    std::string detail;
};

struct Report {
    std::vector<CheckResult> checks;
    bool all_ok() const;
    nlohmann::json to_json() const;
};

Report validate_jet(const GeometryJet& j);

struct IdentityResult {
    std::string name;
    ExactScalar lhs;
    ExactScalar rhs;
    bool ok() const { return lhs == rhs; }
};

std::vector<IdentityResult> identity_suite(const GeometryJet& j);
bool is_kahler(const GeometryJet& j);

// ---------------------------------------------------------------- derived scalars

struct LambdaScalars {
    ExactScalar dLambdaT;       // Lambda_omega(d(Lambda_omega T_as))
    ExactScalar LambdaLambdaDT; // Lambda_omega Lambda_omega (dT_as)
    BundleForm P;               // the End(E)-valued 2-form P
};

LambdaScalars lambda_scalars(const GeometryJet& j);

// |nabla^B J|^2, |nabla^X J|^2 (real-frame sums of squares).
ExactScalar norm_sq_nablaBJ(const GeometryJet& j);
ExactScalar norm_sq_nablaXJ(const GeometryJet& j);
// sum_{ijk} |<S^B(ubar_i)u_j,u_k>|^2 and sum_{ijk} |<S^B(u_i)u_j,u_k>|^2.
ExactScalar norm_sq_S_bar(const GeometryJet& j);
ExactScalar norm_sq_S_hol(const GeometryJet& j);

// ---------------------------------------------------------------- JSON

nlohmann::json jet_to_json(const GeometryJet& j);
GeometryJet jet_from_json(const nlohmann::json& j);

}  // namespace bergman
