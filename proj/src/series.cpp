#include "bergman/series.hpp"

#include <algorithm>

namespace bergman {

int mono_degree(const Mono& m) {
    int d = 0;
    for (auto e : m) d += e;
    return d;
}

Series Series::constant(int nvars, const ExactScalar& c, int cap) {
    Series s(nvars, cap);
    s.add_term(Mono{}, c);
    return s;
}

Series Series::variable(int nvars, int i, int cap) {
    Series s(nvars, cap);
    Mono m{};
    m[i] = 1;
    s.add_term(m, ExactScalar(1));
    return s;
}

int Series::order() const {
    int o = cap_ + 1;
    for (const auto& [m, c] : terms_) o = std::min(o, mono_degree(m));
    return o;
}

void Series::add_term(const Mono& m, const ExactScalar& c) {
    if (c.is_zero() || mono_degree(m) > cap_) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

ExactScalar Series::coeff(const Mono& m) const {
    if (mono_degree(m) > cap_)
        throw TruncationInsufficient("coefficient of degree " + std::to_string(mono_degree(m)) +
                                     " requested from a series valid to degree " + std::to_string(cap_));
    auto it = terms_.find(m);
    return it == terms_.end() ? ExactScalar() : it->second;
}

ExactScalar Series::at_zero() const { return coeff(Mono{}); }

Series Series::homogeneous(int degree) const {
    Series s(nvars_, cap_);
    for (const auto& [m, c] : terms_)
        if (mono_degree(m) == degree) s.terms_.emplace(m, c);
    return s;
}

Series Series::with_cap(int cap) const {
    Series s(nvars_, std::min(cap, cap_));
    for (const auto& [m, c] : terms_) s.add_term(m, c);
    return s;
}

Series& Series::operator+=(const Series& o) {
    if (nvars_ == 0) nvars_ = o.nvars_;
    int cap = std::min(cap_, o.cap_);
    if (cap < cap_) *this = with_cap(cap);
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
}

Series& Series::operator-=(const Series& o) { return *this += -o; }

Series Series::operator-() const {
    Series s = *this;
    for (auto& [m, c] : s.terms_) c = -c;
    return s;
}

Series operator*(const Series& a, const Series& b) {
    // Unknown tails start at degree cap+1, so the product is exact up to
    // min(cap_a + ord_b, cap_b + ord_a).
    int cap = std::min(a.cap_ + b.order(), b.cap_ + a.order());
    cap = std::min(cap, kExactCap);
    Series r(std::max(a.nvars_, b.nvars_), cap);
    for (const auto& [ma, ca] : a.terms_)
        for (const auto& [mb, cb] : b.terms_) {
            Mono m;
            for (int i = 0; i < kMaxVars; ++i) m[i] = ma[i] + mb[i];
            if (mono_degree(m) > cap) continue;
            r.add_term(m, ca * cb);
        }
    return r;
}

Series operator*(const ExactScalar& c, const Series& a) {
    Series r(a.nvars_, a.cap_);
    if (c.is_zero()) return r;
    for (const auto& [m, x] : a.terms_) r.terms_.emplace(m, x * c);
    return r;
}

Series Series::derivative(int i) const {
    Series r(nvars_, cap_ >= kExactCap ? kExactCap : cap_ - 1);
    for (const auto& [m, c] : terms_) {
        if (m[i] == 0) continue;
        Mono d = m;
        d[i] -= 1;
        r.add_term(d, c * ExactScalar(static_cast<long>(m[i])));
    }
    return r;
}

Series Series::conj() const {
    Series r = *this;
    for (auto& [m, c] : r.terms_) c = c.conj();
    return r;
}

Series Series::compose(const std::vector<Series>& sub) const {
    int cap = cap_;
    for (int i = 0; i < nvars_; ++i) {
        if (sub[i].order() < 1) throw std::invalid_argument("substitution must vanish at the origin");
        cap = std::min(cap, sub[i].cap());
    }
    const int out_vars = sub.empty() ? nvars_ : sub[0].nvars();
    Series r(out_vars, cap);
    // Cache powers of each substituted series.
    std::vector<std::vector<Series>> powers(nvars_);
    for (const auto& [m, c] : terms_) {
        Series term = Series::constant(out_vars, c, cap);
        for (int i = 0; i < nvars_; ++i) {
            auto& pw = powers[i];
            if (pw.empty()) pw.push_back(Series::constant(out_vars, ExactScalar(1), cap));
            while (static_cast<int>(pw.size()) <= m[i]) pw.push_back((pw.back() * sub[i]).with_cap(cap));
            if (m[i] > 0) term = (term * pw[m[i]]).with_cap(cap);
        }
        r += term;
    }
    return r.with_cap(cap);
}

Series Series::inverse() const {
    ExactScalar c0 = at_zero();
    if (c0.is_zero()) throw std::domain_error("series inverse: zero constant term");
    ExactScalar inv0 = c0.inverse();
    Series n = *this;
    n.terms_.erase(Mono{});
    n = inv0 * n;  // this = c0 (1 + n)
    Series acc = Series::constant(nvars_, ExactScalar(1), cap_);
    Series power = acc;
    for (int k = 1; k <= cap_ && !power.is_zero(); ++k) {
        power = -(power * n).with_cap(cap_);
        acc += power;
    }
    return inv0 * acc.with_cap(cap_);
}

SMat smat_zero(int dim, int nvars) {
    return SMat(dim, std::vector<Series>(dim, Series(nvars, kExactCap)));
}

SMat smat_identity(int dim, int nvars) {
    SMat m = smat_zero(dim, nvars);
    for (int i = 0; i < dim; ++i) m[i][i] = Series::constant(nvars, ExactScalar(1));
    return m;
}

SMat smat_mul(const SMat& a, const SMat& b) {
    const int d = static_cast<int>(a.size());
    const int nv = a[0][0].nvars();
    SMat r = smat_zero(d, nv);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            Series s(nv, kExactCap);
            for (int k = 0; k < d; ++k) s += a[i][k] * b[k][j];
            r[i][j] = s;
        }
    return r;
}

SMat smat_add(const SMat& a, const SMat& b) {
    SMat r = a;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) r[i][j] += b[i][j];
    return r;
}

SMat smat_sub(const SMat& a, const SMat& b) {
    SMat r = a;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) r[i][j] -= b[i][j];
    return r;
}

SMat smat_scale(const SMat& a, const ExactScalar& c) {
    SMat r = a;
    for (auto& row : r)
        for (auto& s : row) s = c * s;
    return r;
}

SMat smat_transpose(const SMat& a) {
    SMat r = a;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) r[i][j] = a[j][i];
    return r;
}

SMat smat_commutator(const SMat& a, const SMat& b) { return smat_sub(smat_mul(a, b), smat_mul(b, a)); }

SMat smat_derivative(const SMat& a, int i) {
    SMat r = a;
    for (auto& row : r)
        for (auto& s : row) s = s.derivative(i);
    return r;
}

std::vector<std::vector<ExactScalar>> const_inverse(const std::vector<std::vector<ExactScalar>>& m) {
    const int d = static_cast<int>(m.size());
    std::vector<std::vector<ExactScalar>> a = m, inv(d, std::vector<ExactScalar>(d));
    for (int i = 0; i < d; ++i) inv[i][i] = ExactScalar(1);
    for (int col = 0; col < d; ++col) {
        int piv = -1;
        for (int r = col; r < d; ++r)
            if (!a[r][col].is_zero() && a[r][col].is_monomial()) {
                piv = r;
                break;
            }
        if (piv < 0) throw std::domain_error("constant matrix not invertible over the exact field");
        std::swap(a[piv], a[col]);
        std::swap(inv[piv], inv[col]);
        ExactScalar p = a[col][col].inverse();
        for (int j = 0; j < d; ++j) {
            a[col][j] = a[col][j] * p;
            inv[col][j] = inv[col][j] * p;
        }
        for (int r = 0; r < d; ++r) {
            if (r == col || a[r][col].is_zero()) continue;
            ExactScalar f = a[r][col];
            for (int j = 0; j < d; ++j) {
                a[r][j] -= f * a[col][j];
                inv[r][j] -= f * inv[col][j];
            }
        }
    }
    return inv;
}

SMat smat_inverse(const SMat& a) {
    const int d = static_cast<int>(a.size());
    const int nv = a[0][0].nvars();
    std::vector<std::vector<ExactScalar>> c0(d, std::vector<ExactScalar>(d));
    int cap = kExactCap;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            c0[i][j] = a[i][j].at_zero();
            cap = std::min(cap, a[i][j].cap());
        }
    auto inv0 = const_inverse(c0);
    SMat m0inv = smat_zero(d, nv);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m0inv[i][j] = Series::constant(nv, inv0[i][j]);
    // a = M0 (1 + N), N = M0^{-1} (a - M0)
    SMat nmat = a;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            Series s = a[i][j];
            s.add_term(Mono{}, -c0[i][j]);
            nmat[i][j] = s;
        }
    nmat = smat_mul(m0inv, nmat);
    SMat acc = smat_identity(d, nv), power = acc;
    for (int k = 1; k <= cap; ++k) {
        power = smat_scale(smat_mul(power, nmat), ExactScalar(-1));
        bool zero = true;
        for (auto& row : power)
            for (auto& s : row) {
                s = s.with_cap(cap);
                zero = zero && s.is_zero();
            }
        acc = smat_add(acc, power);
        if (zero) break;
    }
    for (auto& row : acc)
        for (auto& s : row) s = s.with_cap(cap);
    return smat_mul(acc, m0inv);
}

bool smat_equal(const SMat& a, const SMat& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            if (a[i][j].terms() != b[i][j].terms() || a[i][j].cap() != b[i][j].cap()) return false;
    return true;
}

SMat smat_sqrt(const SMat& a) {
    const int d = static_cast<int>(a.size());
    const int nv = a[0][0].nvars();
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (!(a[i][j].at_zero() == ExactScalar(i == j ? 1 : 0)))
                throw std::domain_error("matrix square root: value at the origin is not the identity");
    SMat y = smat_identity(d, nv);
    const ExactScalar half(Rational(1, 2));
    for (int it = 0; it < 16; ++it) {
        SMat next = smat_scale(smat_add(y, smat_mul(smat_inverse(y), a)), half);
        int cap = kExactCap;
        for (auto& row : a)
            for (auto& s : row) cap = std::min(cap, s.cap());
        for (auto& row : next)
            for (auto& s : row) s = s.with_cap(cap);
        if (smat_equal(next, y)) return y;
        y = std::move(next);
    }
    throw std::runtime_error("matrix square root: Newton iteration did not stabilise");
}

}  // namespace bergman
