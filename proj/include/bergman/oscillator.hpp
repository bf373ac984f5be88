#pragma once
// Exact algebra of the model harmonic oscillator on R^{2n}: kernels
// K(Z,Z') = sum b^alpha (xi^beta P^N)(Z,Z') * xi'^gamma xibar'^delta (x) endo,
// the creation/annihilation operators, spectral resolvents, Gaussian
// composition of kernels and evaluation at the origin.
//
// Complex coordinates: xi_j = zbar_j for j < q (0-based), xi_j = z_j otherwise,
// with z_j = x_j + i y_j and real coordinates Z = (x_1, y_1, ..., x_n, y_n).

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "bergman/exact.hpp"
#include "bergman/exterior.hpp"

namespace bergman {

constexpr int kMaxN = 4;

// Four exponent blocks of length kMaxN.  For a TwoPointState they are
// (alpha, beta, gamma, delta); for a PolyGaussianForm (xi, xibar, xi', xibar').
struct Exponents {
    std::array<std::uint8_t, 4 * kMaxN> e{};

    std::uint8_t& at(int block, int j) { return e[block * kMaxN + j]; }
    std::uint8_t at(int block, int j) const { return e[block * kMaxN + j]; }
    int block_degree(int block) const;
    int degree() const;
    auto operator<=>(const Exponents&) const = default;
};

class DegreeCapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class KernelComponent : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Maximal total polynomial degree allowed in any term (default 8).
int degree_cap();
void set_degree_cap(int cap);

class TwoPointState {
public:
    using Terms = std::map<Exponents, ExteriorEndo>;

    TwoPointState() = default;
    explicit TwoPointState(FibreShape s) : shape_(s) {}

    // P^N (x) endo; endo defaults to the identity.
    static TwoPointState vacuum(FibreShape s);
    static TwoPointState vacuum(FibreShape s, const ExteriorEndo& endo);
    // b^alpha (xi^beta P^N) xi'^gamma xibar'^delta (x) endo.
    static TwoPointState basis(FibreShape s, const Exponents& key, const ExteriorEndo& endo);

    const FibreShape& shape() const { return shape_; }
    int n() const { return shape_.n; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    int max_degree() const;

    void add(const Exponents& key, const ExteriorEndo& v);

    TwoPointState& operator+=(const TwoPointState& o);
    TwoPointState& operator-=(const TwoPointState& o);
    friend TwoPointState operator+(TwoPointState a, const TwoPointState& b) { return a += b; }
    friend TwoPointState operator-(TwoPointState a, const TwoPointState& b) { return a -= b; }
    friend TwoPointState operator*(const ExactScalar& c, const TwoPointState& s);
    // Left multiplication of every term by an endomorphism.
    friend TwoPointState operator*(const ExteriorEndo& m, const TwoPointState& s);
    // Right multiplication (acts on the Z' fibre).
    friend TwoPointState operator*(const TwoPointState& s, const ExteriorEndo& m);
    friend bool operator==(const TwoPointState& a, const TwoPointState& b) {
        return a.terms_ == b.terms_;
    }

    nlohmann::json to_json() const;

private:
    FibreShape shape_;
    Terms terms_;
};

// Polynomial in (xi, xibar, xi', xibar') with endomorphism coefficients, times P^N.
class PolyGaussianForm {
public:
    using Terms = std::map<Exponents, ExteriorEndo>;

    PolyGaussianForm() = default;
    explicit PolyGaussianForm(FibreShape s) : shape_(s) {}

    const FibreShape& shape() const { return shape_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    void add(const Exponents& key, const ExteriorEndo& v);
    ExteriorEndo coefficient(const Exponents& key) const;

    PolyGaussianForm& operator+=(const PolyGaussianForm& o);
    friend PolyGaussianForm operator+(PolyGaussianForm a, const PolyGaussianForm& b) { return a += b; }
    friend bool operator==(const PolyGaussianForm& a, const PolyGaussianForm& b) {
        return a.terms_ == b.terms_;
    }

    nlohmann::json to_json() const;

private:
    FibreShape shape_;
    Terms terms_;
};

PolyGaussianForm to_poly(const TwoPointState& s);
TwoPointState from_poly(const PolyGaussianForm& p);

// Primitive actions (j is 0-based).
TwoPointState apply_b(int j, const TwoPointState& s);
TwoPointState apply_bdag(int j, const TwoPointState& s);
TwoPointState mul_xi(int j, const TwoPointState& s);
TwoPointState mul_xibar(int j, const TwoPointState& s);
// Multiplication by the monomial xi'^gamma xibar'^delta (blocks 2 and 3 of mono).
TwoPointState mul_primed(const Exponents& mono, const TwoPointState& s);
TwoPointState differentiate_xi(int j, const TwoPointState& s);
TwoPointState differentiate_xibar(int j, const TwoPointState& s);
// Real coordinates: a = 2j -> x_j, a = 2j+1 -> y_j.
TwoPointState mul_real(int a, const TwoPointState& s);
// Model connection nabla_0 along the real frame vector e_a.
TwoPointState nabla0_real(int a, const TwoPointState& s);

TwoPointState apply_L0(const TwoPointState& s);
TwoPointState apply_L20(const TwoPointState& s);
// (L_2^0)^{-1}; throws KernelComponent on a nonzero kernel-sector component.
TwoPointState resolvent_L20(const TwoPointState& s);
// Left projections onto Ker(L_2^0) and its complement.
TwoPointState project_N(const TwoPointState& s);
TwoPointState project_Nperp(const TwoPointState& s);

ExteriorEndo evaluate_origin(const TwoPointState& s);
// Integral over the middle variable: (a o b)(Z,Z') = int a(Z,W) b(W,Z') dW.
TwoPointState compose(const TwoPointState& a, const TwoPointState& b);
// Kernel adjoint K*(Z,Z') = K(Z',Z)^dagger.
TwoPointState adjoint(const TwoPointState& s);

// Gaussian moment  int_C xi^a xibar^b exp(-pi |xi|^2) d(Lebesgue).
ExactScalar gaussian_moment(int a, int b);

// Differential operators with polynomial coefficients, stored as a sum of
// words in the primitives with an endomorphism coefficient on the left.
enum class Prim : std::uint8_t { MulZ, Nabla0, L0, B, Bdag, MulXi, MulXibar };

struct PrimOp {
    Prim kind;
    int index;
    auto operator<=>(const PrimOp&) const = default;
};

class ModelOperator {
public:
    using Word = std::vector<PrimOp>;  // leftmost factor first

    ModelOperator() = default;
    explicit ModelOperator(FibreShape s) : shape_(s) {}

    const FibreShape& shape() const { return shape_; }
    const std::map<Word, ExteriorEndo>& words() const { return words_; }
    bool is_zero() const { return words_.empty(); }

    // Adds coef * word; adjacent multiplications by Z are reordered canonically.
    void add(Word word, const ExteriorEndo& coef);
    void add(Word word, const ExactScalar& coef);

    ModelOperator& operator+=(const ModelOperator& o);
    friend ModelOperator operator+(ModelOperator a, const ModelOperator& b) { return a += b; }
    ModelOperator& operator*=(const ExactScalar& c);
    friend ModelOperator operator*(const ExactScalar& c, ModelOperator a) { return a *= c; }
    // Operator composition a∘b.
    friend ModelOperator operator*(const ModelOperator& a, const ModelOperator& b);

    TwoPointState apply(const TwoPointState& s) const;

private:
    FibreShape shape_;
    std::map<Word, ExteriorEndo> words_;
};

TwoPointState apply_prim(const PrimOp& op, const TwoPointState& s);

}  // namespace bergman
