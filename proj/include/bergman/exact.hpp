#pragma once
// Exact coefficient field: Laurent polynomials in pi whose coefficients are
// Gaussian rationals. Every constant produced by the library lives here.

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace bergman {

using Rational = mpq_class;

Rational parse_rational(const std::string& s);
std::string rational_to_string(const Rational& r);

struct GaussRat {
    Rational re;
    Rational im;

    GaussRat() = default;
    GaussRat(Rational r, Rational i = 0) : re(std::move(r)), im(std::move(i)) {
        re.canonicalize();
        im.canonicalize();
    }

    bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
    GaussRat conj() const { return {re, -im}; }
    GaussRat operator-() const { return {-re, -im}; }
    GaussRat& operator+=(const GaussRat& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    GaussRat& operator-=(const GaussRat& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    friend GaussRat operator+(GaussRat a, const GaussRat& b) { return a += b; }
    friend GaussRat operator-(GaussRat a, const GaussRat& b) { return a -= b; }
    friend GaussRat operator*(const GaussRat& a, const GaussRat& b) {
        if (sgn(a.im) == 0 && sgn(b.im) == 0) return {a.re * b.re, 0};
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend bool operator==(const GaussRat& a, const GaussRat& b) {
        return a.re == b.re && a.im == b.im;
    }
    GaussRat inverse() const;
};

// Finite sum  sum_k c_k pi^k  with c_k Gaussian rationals; terms sorted by k,
// zero coefficients never stored, so equality is structural.
class ExactScalar {
public:
    using Term = std::pair<int, GaussRat>;

    ExactScalar() = default;
    ExactScalar(long v) { if (v != 0) terms_.push_back({0, GaussRat(Rational(v))}); }
    ExactScalar(int v) : ExactScalar(static_cast<long>(v)) {}
    ExactScalar(const Rational& r) { if (sgn(r) != 0) terms_.push_back({0, GaussRat(r)}); }
    ExactScalar(const GaussRat& g, int pi_pow = 0) {
        if (!g.is_zero()) terms_.push_back({pi_pow, g});
    }

    static ExactScalar pi(int power = 1) { return ExactScalar(GaussRat(1), power); }
    static ExactScalar i() { return ExactScalar(GaussRat(0, 1)); }
    static ExactScalar rational(long num, long den = 1) {
        return ExactScalar(GaussRat(Rational(num, den)));
    }

    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_real() const;
    bool is_monomial() const { return terms_.size() == 1; }

    ExactScalar conj() const;
    ExactScalar inverse() const;  // only for monomials
    ExactScalar times_pi(int k) const;
    ExactScalar operator-() const;

    ExactScalar& operator+=(const ExactScalar& o);
    ExactScalar& operator-=(const ExactScalar& o);
    ExactScalar& operator*=(const ExactScalar& o) { return *this = *this * o; }
    ExactScalar& operator*=(const Rational& r);
    ExactScalar& operator/=(const ExactScalar& o) { return *this = *this * o.inverse(); }

    friend ExactScalar operator+(ExactScalar a, const ExactScalar& b) { return a += b; }
    friend ExactScalar operator-(ExactScalar a, const ExactScalar& b) { return a -= b; }
    friend ExactScalar operator*(const ExactScalar& a, const ExactScalar& b);
    friend ExactScalar operator*(ExactScalar a, const Rational& r) { return a *= r; }
    friend ExactScalar operator*(const Rational& r, ExactScalar a) { return a *= r; }
    friend ExactScalar operator/(const ExactScalar& a, const ExactScalar& b) { return a * b.inverse(); }
    friend bool operator==(const ExactScalar& a, const ExactScalar& b) { return a.terms_ == b.terms_; }

    // Coefficient of pi^k.
    GaussRat coeff(int k) const;
    // Real and imaginary parts (pi is real).
    ExactScalar real_part() const;
    ExactScalar imag_part() const;
    // Numeric value (for reporting only).
    double to_double_re() const;
    double to_double_im() const;

    std::string to_string() const;
    static ExactScalar parse(const std::string& s);

    nlohmann::json to_json() const;
    static ExactScalar from_json(const nlohmann::json& j);

private:
    void add_term(int k, const GaussRat& c);
    std::vector<Term> terms_;
};

std::ostream& operator<<(std::ostream& os, const ExactScalar& s);

// Structural ordering, used only to get deterministic output.
bool structural_less(const ExactScalar& a, const ExactScalar& b);

}  // namespace bergman
