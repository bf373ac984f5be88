#pragma once
// Truncated multivariate power series in up to six real variables with exact
// coefficients.  Every series carries its validity cap: coefficients of
// degree <= cap are exact, higher ones are unknown and never stored.

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "bergman/exact.hpp"

namespace bergman {

constexpr int kMaxVars = 6;
constexpr int kExactCap = 1000;  // cap of exactly known polynomials

class TruncationInsufficient : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Mono = std::array<std::uint8_t, kMaxVars>;

int mono_degree(const Mono& m);

class Series {
public:
    Series() = default;
    Series(int nvars, int cap) : nvars_(nvars), cap_(cap) {}

    static Series constant(int nvars, const ExactScalar& c, int cap = kExactCap);
    static Series variable(int nvars, int i, int cap = kExactCap);

    int nvars() const { return nvars_; }
    int cap() const { return cap_; }
    const std::map<Mono, ExactScalar>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    // Lowest degree that may be nonzero (cap+1 if every known term vanishes).
    int order() const;

    void add_term(const Mono& m, const ExactScalar& c);
    // Exact coefficient; throws TruncationInsufficient above the cap.
    ExactScalar coeff(const Mono& m) const;
    ExactScalar at_zero() const;
    Series homogeneous(int degree) const;
    Series with_cap(int cap) const;

    Series& operator+=(const Series& o);
    Series& operator-=(const Series& o);
    friend Series operator+(Series a, const Series& b) { return a += b; }
    friend Series operator-(Series a, const Series& b) { return a -= b; }
    Series operator-() const;
    friend Series operator*(const Series& a, const Series& b);
    friend Series operator*(const ExactScalar& c, const Series& a);
    friend Series operator*(const Series& a, const ExactScalar& c) { return c * a; }

    Series derivative(int i) const;
    Series conj() const;
    // Substitute x_i -> sub[i] (each without constant term).
    Series compose(const std::vector<Series>& sub) const;
    // Multiplicative inverse; the constant term must be an invertible monomial.
    Series inverse() const;

private:
    int nvars_ = 0;
    int cap_ = kExactCap;
    std::map<Mono, ExactScalar> terms_;
};

// Square matrices of series.
using SMat = std::vector<std::vector<Series>>;

SMat smat_zero(int dim, int nvars);
SMat smat_identity(int dim, int nvars);
SMat smat_mul(const SMat& a, const SMat& b);
SMat smat_add(const SMat& a, const SMat& b);
SMat smat_sub(const SMat& a, const SMat& b);
SMat smat_scale(const SMat& a, const ExactScalar& c);
SMat smat_transpose(const SMat& a);
SMat smat_commutator(const SMat& a, const SMat& b);
SMat smat_derivative(const SMat& a, int i);
SMat smat_inverse(const SMat& a);
// Principal square root of a matrix series whose value at 0 is the identity,
// by Newton iteration Y <- (Y + Y^{-1} A)/2 seeded at the identity.
SMat smat_sqrt(const SMat& a);
bool smat_equal(const SMat& a, const SMat& b);

// Inverse of an exact constant matrix (Gauss-Jordan).
std::vector<std::vector<ExactScalar>> const_inverse(const std::vector<std::vector<ExactScalar>>& m);

}  // namespace bergman
