#include "bergman/oscillator.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>

namespace bergman {

namespace {

std::atomic<int> g_degree_cap{8};

using ScalarMap = std::map<Exponents, ExactScalar>;

void add_scalar(ScalarMap& m, const Exponents& k, const ExactScalar& v) {
    if (v.is_zero()) return;
    auto [it, inserted] = m.try_emplace(k, v);
    if (!inserted) {
        it->second += v;
        if (it->second.is_zero()) m.erase(it);
    }
}

void check_index(int n, int j) {
    if (j < 0 || j >= n) throw std::out_of_range("mode index out of range");
}

ExactScalar pi_times(long k) { return ExactScalar::pi() * ExactScalar(k); }

// Scalar version of mul_xibar on canonical keys (alpha, beta, gamma, delta).
ScalarMap scalar_mul_xibar(int j, const ScalarMap& s) {
    ScalarMap out;
    const ExactScalar inv2pi = ExactScalar(Rational(1, 2)) * ExactScalar::pi(-1);
    for (const auto& [k, v] : s) {
        Exponents a = k;
        a.at(0, j) += 1;
        add_scalar(out, a, v * inv2pi);
        Exponents d = k;
        d.at(3, j) += 1;
        add_scalar(out, d, v);
        if (k.at(1, j) > 0) {
            Exponents b = k;
            b.at(1, j) -= 1;
            add_scalar(out, b, v * ExactScalar(static_cast<long>(k.at(1, j))) * ExactScalar::pi(-1));
        }
    }
    return out;
}

// Polynomial expansion of one canonical basis term (keys of the result are
// exponents of xi, xibar, xi', xibar').
const ScalarMap& expand_basis(const Exponents& key) {
    static std::mutex mu;
    static std::map<Exponents, ScalarMap> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    ScalarMap f;
    Exponents mono = key;
    for (int j = 0; j < kMaxN; ++j) {
        mono.at(1, j) = 0;
        mono.at(0, j) = key.at(1, j);
    }
    add_scalar(f, mono, ExactScalar(1));
    // b_j f = -2 d f/d xi_j + 2 pi (xibar_j - xibar'_j) f.
    for (int j = 0; j < kMaxN; ++j)
        for (int r = 0; r < key.at(0, j); ++r) {
            ScalarMap g;
            for (const auto& [m, v] : f) {
                if (m.at(0, j) > 0) {
                    Exponents d = m;
                    d.at(0, j) -= 1;
                    add_scalar(g, d, v * ExactScalar(-2L * m.at(0, j)));
                }
                Exponents xb = m;
                xb.at(1, j) += 1;
                add_scalar(g, xb, v * pi_times(2));
                Exponents pb = m;
                pb.at(3, j) += 1;
                add_scalar(g, pb, v * pi_times(-2));
            }
            f = std::move(g);
        }
    return cache.emplace(key, std::move(f)).first->second;
}

// Canonical expansion of one polynomial monomial xi^a xibar^b xi'^c xibar'^d.
const ScalarMap& canonical_of_monomial(const Exponents& mono) {
    static std::mutex mu;
    static std::map<Exponents, ScalarMap> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(mono);
        if (it != cache.end()) return it->second;
    }
    Exponents start = mono;
    for (int j = 0; j < kMaxN; ++j) {
        start.at(0, j) = 0;
        start.at(1, j) = mono.at(0, j);
    }
    ScalarMap s;
    add_scalar(s, start, ExactScalar(1));
    for (int j = 0; j < kMaxN; ++j)
        for (int r = 0; r < mono.at(1, j); ++r) s = scalar_mul_xibar(j, s);
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(mono, std::move(s)).first->second;
}

ExactScalar binomial(int a, int k) {
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), a, k);
    return ExactScalar(Rational(r));
}

ExactScalar factorial(int k) {
    mpz_class r;
    mpz_fac_ui(r.get_mpz_t(), k);
    return ExactScalar(Rational(r));
}

// Kernel-sector check: alpha = 0 and the row word is the det word.
bool row_is_det(const FibreShape& s, int row) {
    return WordBasis::get(s.n).mask_at(row / s.rk) == det_word(s);
}

int row_defect(const FibreShape& s, int row) {
    std::uint32_t mask = WordBasis::get(s.n).mask_at(row / s.rk);
    int count = 0;
    for (int j = 0; j < s.n; ++j) {
        bool has = (mask >> j) & 1u;
        if ((j < s.q && !has) || (j >= s.q && has)) ++count;
    }
    return count;
}

}  // namespace

int Exponents::block_degree(int block) const {
    int d = 0;
    for (int j = 0; j < kMaxN; ++j) d += at(block, j);
    return d;
}

int Exponents::degree() const {
    int d = 0;
    for (auto x : e) d += x;
    return d;
}

int degree_cap() { return g_degree_cap.load(); }
void set_degree_cap(int cap) {
    if (cap < 1) throw std::invalid_argument("degree cap must be positive");
    g_degree_cap.store(cap);
}

// ---------------------------------------------------------------- states

TwoPointState TwoPointState::vacuum(FibreShape s) { return vacuum(s, ExteriorEndo::identity(s)); }

TwoPointState TwoPointState::vacuum(FibreShape s, const ExteriorEndo& endo) {
    return basis(s, Exponents{}, endo);
}

TwoPointState TwoPointState::basis(FibreShape s, const Exponents& key, const ExteriorEndo& endo) {
    TwoPointState st(s);
    st.add(key, endo);
    return st;
}

int TwoPointState::max_degree() const {
    int d = 0;
    for (const auto& [k, v] : terms_) d = std::max(d, k.degree());
    return d;
}

void TwoPointState::add(const Exponents& key, const ExteriorEndo& v) {
    if (v.is_zero()) return;
    if (key.degree() > degree_cap())
        throw DegreeCapExceeded("term degree " + std::to_string(key.degree()) + " exceeds cap " +
                                std::to_string(degree_cap()));
    auto [it, inserted] = terms_.try_emplace(key, v);
    if (!inserted) {
        it->second += v;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

TwoPointState& TwoPointState::operator+=(const TwoPointState& o) {
    if (terms_.empty()) shape_ = o.shape_;
    for (const auto& [k, v] : o.terms_) add(k, v);
    return *this;
}

TwoPointState& TwoPointState::operator-=(const TwoPointState& o) {
    if (terms_.empty()) shape_ = o.shape_;
    for (const auto& [k, v] : o.terms_) add(k, -v);
    return *this;
}

TwoPointState operator*(const ExactScalar& c, const TwoPointState& s) {
    TwoPointState r(s.shape_);
    if (c.is_zero()) return r;
    for (const auto& [k, v] : s.terms_) r.terms_.emplace(k, v * c);
    return r;
}

TwoPointState operator*(const ExteriorEndo& m, const TwoPointState& s) {
    TwoPointState r(s.shape_);
    for (const auto& [k, v] : s.terms_) r.add(k, m * v);
    return r;
}

TwoPointState operator*(const TwoPointState& s, const ExteriorEndo& m) {
    TwoPointState r(s.shape_);
    for (const auto& [k, v] : s.terms_) r.add(k, v * m);
    return r;
}

namespace {

nlohmann::json exps_json(const Exponents& k, int n, int block) {
    nlohmann::json a = nlohmann::json::array();
    for (int j = 0; j < n; ++j) a.push_back(static_cast<int>(k.at(block, j)));
    return a;
}

}  // namespace

nlohmann::json TwoPointState::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [k, v] : terms_) {
        nlohmann::json t;
        t["alpha"] = exps_json(k, n(), 0);
        t["beta"] = exps_json(k, n(), 1);
        t["xi_prime"] = exps_json(k, n(), 2);
        t["xibar_prime"] = exps_json(k, n(), 3);
        t["endo"] = v.to_json();
        arr.push_back(t);
    }
    return arr;
}

void PolyGaussianForm::add(const Exponents& key, const ExteriorEndo& v) {
    if (v.is_zero()) return;
    if (key.degree() > degree_cap())
        throw DegreeCapExceeded("monomial degree " + std::to_string(key.degree()) + " exceeds cap " +
                                std::to_string(degree_cap()));
    auto [it, inserted] = terms_.try_emplace(key, v);
    if (!inserted) {
        it->second += v;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

ExteriorEndo PolyGaussianForm::coefficient(const Exponents& key) const {
    auto it = terms_.find(key);
    return it == terms_.end() ? ExteriorEndo(shape_) : it->second;
}

PolyGaussianForm& PolyGaussianForm::operator+=(const PolyGaussianForm& o) {
    if (terms_.empty()) shape_ = o.shape_;
    for (const auto& [k, v] : o.terms_) add(k, v);
    return *this;
}

nlohmann::json PolyGaussianForm::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [k, v] : terms_) {
        nlohmann::json t;
        t["xi"] = exps_json(k, shape_.n, 0);
        t["xibar"] = exps_json(k, shape_.n, 1);
        t["xi_prime"] = exps_json(k, shape_.n, 2);
        t["xibar_prime"] = exps_json(k, shape_.n, 3);
        t["endo"] = v.to_json();
        arr.push_back(t);
    }
    return arr;
}

PolyGaussianForm to_poly(const TwoPointState& s) {
    PolyGaussianForm p(s.shape());
    for (const auto& [k, v] : s.terms())
        for (const auto& [m, c] : expand_basis(k)) p.add(m, v * c);
    return p;
}

TwoPointState from_poly(const PolyGaussianForm& p) {
    TwoPointState s(p.shape());
    for (const auto& [m, v] : p.terms())
        for (const auto& [k, c] : canonical_of_monomial(m)) s.add(k, v * c);
    return s;
}

// ------------------------------------------------------------ primitives

TwoPointState apply_b(int j, const TwoPointState& s) {
    check_index(s.n(), j);
    TwoPointState r(s.shape());
    for (const auto& [k, v] : s.terms()) {
        Exponents a = k;
        a.at(0, j) += 1;
        r.add(a, v);
    }
    return r;
}

TwoPointState apply_bdag(int j, const TwoPointState& s) {
    check_index(s.n(), j);
    TwoPointState r(s.shape());
    for (const auto& [k, v] : s.terms()) {
        if (k.at(0, j) == 0) continue;  // b_j^+ annihilates xi^beta P^N
        Exponents a = k;
        a.at(0, j) -= 1;
        r.add(a, v * pi_times(4L * k.at(0, j)));
    }
    return r;
}

TwoPointState mul_xi(int j, const TwoPointState& s) {
    check_index(s.n(), j);
    TwoPointState r(s.shape());
    for (const auto& [k, v] : s.terms()) {
        Exponents b = k;
        b.at(1, j) += 1;
        r.add(b, v);
        if (k.at(0, j) > 0) {  // [xi_j, b_j] = 2
            Exponents a = k;
            a.at(0, j) -= 1;
            r.add(a, v * ExactScalar(2L * k.at(0, j)));
        }
    }
    return r;
}

TwoPointState mul_xibar(int j, const TwoPointState& s) {
    check_index(s.n(), j);
    TwoPointState r(s.shape());
    const ExactScalar inv2pi = ExactScalar(Rational(1, 2)) * ExactScalar::pi(-1);
    for (const auto& [k, v] : s.terms()) {
        Exponents a = k;
        a.at(0, j) += 1;
        r.add(a, v * inv2pi);
        Exponents d = k;
        d.at(3, j) += 1;
        r.add(d, v);
        if (k.at(1, j) > 0) {
            Exponents b = k;
            b.at(1, j) -= 1;
            r.add(b, v * (ExactScalar(static_cast<long>(k.at(1, j))) * ExactScalar::pi(-1)));
        }
    }
    return r;
}

TwoPointState mul_primed(const Exponents& mono, const TwoPointState& s) {
    TwoPointState r(s.shape());
    for (const auto& [k, v] : s.terms()) {
        Exponents m = k;
        for (int j = 0; j < kMaxN; ++j) {
            m.at(2, j) += mono.at(2, j);
            m.at(3, j) += mono.at(3, j);
        }
        r.add(m, v);
    }
    return r;
}

TwoPointState differentiate_xi(int j, const TwoPointState& s) {
    // d/dxi_j = (pi xibar_j - b_j) / 2
    TwoPointState r = ExactScalar::pi() * mul_xibar(j, s) - apply_b(j, s);
    return ExactScalar(Rational(1, 2)) * r;
}

TwoPointState differentiate_xibar(int j, const TwoPointState& s) {
    // d/dxibar_j = (b_j^+ - pi xi_j) / 2
    TwoPointState r = apply_bdag(j, s) - ExactScalar::pi() * mul_xi(j, s);
    return ExactScalar(Rational(1, 2)) * r;
}

TwoPointState mul_real(int a, const TwoPointState& s) {
    const int j = a / 2;
    check_index(s.n(), j);
    const ExactScalar half(Rational(1, 2));
    if (a % 2 == 0) return half * (mul_xi(j, s) + mul_xibar(j, s));
    // y = (xi - xibar)/(2i) for z-type modes, i(xi - xibar)/2 for zbar-type modes.
    ExactScalar c = j < s.shape().q ? ExactScalar(GaussRat(0, Rational(1, 2)))
                                    : ExactScalar(GaussRat(0, Rational(-1, 2)));
    return c * (mul_xi(j, s) - mul_xibar(j, s));
}

TwoPointState nabla0_real(int a, const TwoPointState& s) {
    const int j = a / 2;
    check_index(s.n(), j);
    const ExactScalar half(Rational(1, 2));
    if (a % 2 == 0) return half * (apply_bdag(j, s) - apply_b(j, s));
    ExactScalar c = j < s.shape().q ? ExactScalar(GaussRat(0, Rational(1, 2)))
                                    : ExactScalar(GaussRat(0, Rational(-1, 2)));
    return c * (apply_b(j, s) + apply_bdag(j, s));
}

// -------------------------------------------------------- spectral parts

TwoPointState apply_L0(const TwoPointState& s) {
    TwoPointState r(s.shape());
    for (const auto& [k, v] : s.terms()) {
        int a = k.block_degree(0);
        if (a > 0) r.add(k, v * pi_times(4L * a));
    }
    return r;
}

TwoPointState apply_L20(const TwoPointState& s) {
    const FibreShape& sh = s.shape();
    TwoPointState r(sh);
    for (const auto& [k, v] : s.terms()) {
        ExteriorEndo m(sh);
        const long a = k.block_degree(0);
        for (const auto& [rc, x] : v.entries()) {
            long ev = a + row_defect(sh, rc.first);  // L0 - 2 omega_d = 4 pi (|alpha| + defect)
            m.set(rc.first, rc.second, x * pi_times(4 * ev));
        }
        r.add(k, m);
    }
    return r;
}

TwoPointState resolvent_L20(const TwoPointState& s) {
    const FibreShape& sh = s.shape();
    TwoPointState r(sh);
    for (const auto& [k, v] : s.terms()) {
        ExteriorEndo m(sh);
        const long a = k.block_degree(0);
        for (const auto& [rc, x] : v.entries()) {
            long ev = a + row_defect(sh, rc.first);
            if (ev == 0)
                throw KernelComponent("resolvent applied to a state with a kernel-sector component");
            m.set(rc.first, rc.second, x * ExactScalar(Rational(1, 4 * ev)) * ExactScalar::pi(-1));
        }
        r.add(k, m);
    }
    return r;
}

TwoPointState project_N(const TwoPointState& s) {
    const FibreShape& sh = s.shape();
    TwoPointState r(sh);
    for (const auto& [k, v] : s.terms()) {
        if (k.block_degree(0) != 0) continue;
        ExteriorEndo m(sh);
        for (const auto& [rc, x] : v.entries())
            if (row_is_det(sh, rc.first)) m.set(rc.first, rc.second, x);
        r.add(k, m);
    }
    return r;
}

TwoPointState project_Nperp(const TwoPointState& s) { return s - project_N(s); }

// ------------------------------------------------ evaluation, composition

ExteriorEndo evaluate_origin(const TwoPointState& s) {
    ExteriorEndo r(s.shape());
    const Exponents zero{};
    for (const auto& [k, v] : s.terms()) {
        if (k.block_degree(2) + k.block_degree(3) != 0) continue;
        const ScalarMap& f = expand_basis(k);
        auto it = f.find(zero);
        if (it != f.end()) r += v * it->second;
    }
    return r;
}

ExactScalar gaussian_moment(int a, int b) {
    // int xi^a xibar^b e^{-pi|xi|^2} = delta_ab a! / pi^a
    if (a != b) return ExactScalar();
    return factorial(a) * ExactScalar::pi(-a);
}

TwoPointState compose(const TwoPointState& a, const TwoPointState& b) {
    const FibreShape& sh = a.shape();
    if (a.is_zero() || b.is_zero()) return TwoPointState(sh);
    if (!(a.shape() == b.shape())) throw std::invalid_argument("compose: shape mismatch");
    PolyGaussianForm pa = to_poly(a), pb = to_poly(b);
    const int n = sh.n;
    PolyGaussianForm out(sh);
    for (const auto& [m1, v1] : pa.terms())
        for (const auto& [m2, v2] : pb.terms()) {
            ExteriorEndo prod = v1 * v2;
            if (prod.is_zero()) continue;
            // int w^A wbar^B P(Z,W)P(W,Z') dW
            //   = P(Z,Z') sum_k C(A,k) C(B,k) k! pi^{-k} xi^{A-k} xibar'^{B-k}
            ScalarMap acc;
            Exponents base{};
            for (int j = 0; j < n; ++j) {
                base.at(0, j) = m1.at(0, j);
                base.at(1, j) = m1.at(1, j);
                base.at(2, j) = m2.at(2, j);
                base.at(3, j) = m2.at(3, j);
            }
            add_scalar(acc, base, ExactScalar(1));
            for (int j = 0; j < n; ++j) {
                const int A = m1.at(2, j) + m2.at(0, j);
                const int B = m1.at(3, j) + m2.at(1, j);
                ScalarMap next;
                for (int k = 0; k <= std::min(A, B); ++k) {
                    ExactScalar c = binomial(A, k) * binomial(B, k) * factorial(k) * ExactScalar::pi(-k);
                    for (const auto& [m, x] : acc) {
                        Exponents e = m;
                        e.at(0, j) += A - k;
                        e.at(3, j) += B - k;
                        add_scalar(next, e, x * c);
                    }
                }
                acc = std::move(next);
            }
            for (const auto& [m, x] : acc) out.add(m, prod * x);
        }
    return from_poly(out);
}

TwoPointState adjoint(const TwoPointState& s) {
    PolyGaussianForm p = to_poly(s);
    PolyGaussianForm q(s.shape());
    for (const auto& [m, v] : p.terms()) {
        Exponents t{};
        for (int j = 0; j < kMaxN; ++j) {
            t.at(0, j) = m.at(3, j);
            t.at(1, j) = m.at(2, j);
            t.at(2, j) = m.at(1, j);
            t.at(3, j) = m.at(0, j);
        }
        q.add(t, v.adjoint());
    }
    return from_poly(q);
}

// --------------------------------------------------------------- operators

TwoPointState apply_prim(const PrimOp& op, const TwoPointState& s) {
    switch (op.kind) {
        case Prim::MulZ: return mul_real(op.index, s);
        case Prim::Nabla0: return nabla0_real(op.index, s);
        case Prim::L0: return apply_L0(s);
        case Prim::B: return apply_b(op.index, s);
        case Prim::Bdag: return apply_bdag(op.index, s);
        case Prim::MulXi: return mul_xi(op.index, s);
        case Prim::MulXibar: return mul_xibar(op.index, s);
    }
    throw std::invalid_argument("unknown primitive");
}

void ModelOperator::add(Word word, const ExteriorEndo& coef) {
    if (coef.is_zero()) return;
    // Multiplications by coordinates commute: sort each maximal run.
    std::size_t i = 0;
    while (i < word.size()) {
        if (word[i].kind != Prim::MulZ) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < word.size() && word[j].kind == Prim::MulZ) ++j;
        std::sort(word.begin() + i, word.begin() + j);
        i = j;
    }
    auto [it, inserted] = words_.try_emplace(word, coef);
    if (!inserted) {
        it->second += coef;
        if (it->second.is_zero()) words_.erase(it);
    }
}

void ModelOperator::add(Word word, const ExactScalar& coef) {
    if (coef.is_zero()) return;
    add(std::move(word), ExteriorEndo::scalar(shape_, coef));
}

ModelOperator& ModelOperator::operator+=(const ModelOperator& o) {
    if (words_.empty()) shape_ = o.shape_;
    for (const auto& [w, c] : o.words_) add(w, c);
    return *this;
}

ModelOperator& ModelOperator::operator*=(const ExactScalar& c) {
    if (c.is_zero()) {
        words_.clear();
        return *this;
    }
    for (auto& [w, v] : words_) v *= c;
    return *this;
}

ModelOperator operator*(const ModelOperator& a, const ModelOperator& b) {
    ModelOperator r(a.shape_);
    for (const auto& [wa, ca] : a.words_)
        for (const auto& [wb, cb] : b.words_) {
            ModelOperator::Word w = wa;
            w.insert(w.end(), wb.begin(), wb.end());
            r.add(std::move(w), ca * cb);
        }
    return r;
}

TwoPointState ModelOperator::apply(const TwoPointState& s) const {
    TwoPointState out(s.shape());
    // Words sharing a suffix reuse its image.
    std::map<Word, TwoPointState> memo;
    for (const auto& [w, c] : words_) {
        TwoPointState cur = s;
        Word suffix;
        for (auto it = w.rbegin(); it != w.rend(); ++it) {
            suffix.insert(suffix.begin(), *it);
            auto found = memo.find(suffix);
            if (found != memo.end()) {
                cur = found->second;
            } else {
                cur = apply_prim(*it, cur);
                memo.emplace(suffix, cur);
            }
        }
        out += c * cur;
    }
    return out;
}

}  // namespace bergman
