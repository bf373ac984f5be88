#include "bergman/exterior.hpp"

#include <algorithm>
#include <bit>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace bergman {

WordBasis::WordBasis(int n) : n_(n), index_(1u << n, -1) {
    std::vector<std::vector<int>> seqs;
    for (std::uint32_t m = 0; m < (1u << n); ++m) {
        std::vector<int> s;
        for (int j = 0; j < n; ++j)
            if (m & (1u << j)) s.push_back(j);
        seqs.push_back(s);
    }
    std::vector<std::uint32_t> order(1u << n);
    for (std::uint32_t m = 0; m < order.size(); ++m) order[m] = m;
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) { return seqs[a] < seqs[b]; });
    masks_ = order;
    for (std::size_t i = 0; i < masks_.size(); ++i) index_[masks_[i]] = static_cast<int>(i);
}

const WordBasis& WordBasis::get(int n) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<WordBasis>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[n];
    if (!slot) slot.reset(new WordBasis(n));
    return *slot;
}

std::string WordBasis::label(std::uint32_t mask) {
    if (mask == 0) return "1";
    std::string s;
    for (int j = 0; j < 32; ++j)
        if (mask & (1u << j)) {
            if (!s.empty()) s += "^";
            s += "vb" + std::to_string(j + 1);
        }
    return s;
}

ExteriorEndo ExteriorEndo::identity(FibreShape s) { return scalar(s, ExactScalar(1)); }

ExteriorEndo ExteriorEndo::scalar(FibreShape s, const ExactScalar& c) {
    ExteriorEndo e(s);
    if (c.is_zero()) return e;
    for (int i = 0; i < s.dim(); ++i) e.entries_[{i, i}] = c;
    return e;
}

namespace {

ExteriorEndo ladder(FibreShape s, int j, bool create) {
    if (j < 0 || j >= s.n) throw std::out_of_range("generator index out of range");
    const auto& wb = WordBasis::get(s.n);
    ExteriorEndo e(s);
    const std::uint32_t bit = 1u << j;
    for (std::uint32_t m = 0; m < static_cast<std::uint32_t>(s.words()); ++m) {
        bool has = (m & bit) != 0;
        if (create == has) continue;
        std::uint32_t out = create ? (m | bit) : (m & ~bit);
        int sign = (std::popcount(m & (bit - 1)) % 2) ? -1 : 1;
        for (int f = 0; f < s.rk; ++f)
            e.set(wb.index_of(out) * s.rk + f, wb.index_of(m) * s.rk + f, ExactScalar(sign));
    }
    return e;
}

}  // namespace

ExteriorEndo ExteriorEndo::creation(FibreShape s, int j) { return ladder(s, j, true); }
ExteriorEndo ExteriorEndo::annihilation(FibreShape s, int j) { return ladder(s, j, false); }

ExteriorEndo ExteriorEndo::on_bundle(FibreShape s, const std::vector<ExactScalar>& m) {
    if (static_cast<int>(m.size()) != s.rk * s.rk) throw std::invalid_argument("bundle matrix size");
    ExteriorEndo e(s);
    for (int w = 0; w < s.words(); ++w)
        for (int a = 0; a < s.rk; ++a)
            for (int b = 0; b < s.rk; ++b) e.add(w * s.rk + a, w * s.rk + b, m[a * s.rk + b]);
    return e;
}

ExactScalar ExteriorEndo::at(int r, int c) const {
    auto it = entries_.find({r, c});
    return it == entries_.end() ? ExactScalar() : it->second;
}

void ExteriorEndo::add(int r, int c, const ExactScalar& v) {
    if (v.is_zero()) return;
    auto [it, inserted] = entries_.try_emplace({r, c}, v);
    if (!inserted) {
        it->second += v;
        if (it->second.is_zero()) entries_.erase(it);
    }
}

void ExteriorEndo::set(int r, int c, const ExactScalar& v) {
    if (v.is_zero())
        entries_.erase({r, c});
    else
        entries_[{r, c}] = v;
}

ExteriorEndo& ExteriorEndo::operator+=(const ExteriorEndo& o) {
    if (entries_.empty() && shape_.dim() != o.shape_.dim()) shape_ = o.shape_;
    for (const auto& [k, v] : o.entries_) add(k.first, k.second, v);
    return *this;
}

ExteriorEndo& ExteriorEndo::operator-=(const ExteriorEndo& o) {
    if (entries_.empty() && shape_.dim() != o.shape_.dim()) shape_ = o.shape_;
    for (const auto& [k, v] : o.entries_) add(k.first, k.second, -v);
    return *this;
}

ExteriorEndo& ExteriorEndo::operator*=(const ExactScalar& c) {
    if (c.is_zero()) {
        entries_.clear();
        return *this;
    }
    for (auto& [k, v] : entries_) v = v * c;
    return *this;
}

ExteriorEndo operator*(const ExteriorEndo& a, const ExteriorEndo& b) {
    ExteriorEndo r(a.shape_);
    if (a.entries_.empty() || b.entries_.empty()) return r;
    // Group b by row for the contraction.
    std::map<int, std::vector<std::pair<int, const ExactScalar*>>> rows;
    for (const auto& [k, v] : b.entries_) rows[k.first].push_back({k.second, &v});
    for (const auto& [k, v] : a.entries_) {
        auto it = rows.find(k.second);
        if (it == rows.end()) continue;
        for (const auto& [col, w] : it->second) r.add(k.first, col, v * *w);
    }
    return r;
}

ExteriorEndo ExteriorEndo::adjoint() const {
    ExteriorEndo r(shape_);
    for (const auto& [k, v] : entries_) r.entries_[{k.second, k.first}] = v.conj();
    return r;
}

ExactScalar ExteriorEndo::trace() const {
    ExactScalar t;
    for (const auto& [k, v] : entries_)
        if (k.first == k.second) t += v;
    return t;
}

ExteriorEndo ExteriorEndo::restrict_degree(int degree) const {
    const auto& wb = WordBasis::get(shape_.n);
    auto deg = [&](int idx) { return std::popcount(wb.mask_at(idx / shape_.rk)); };
    ExteriorEndo r(shape_);
    for (const auto& [k, v] : entries_)
        if (deg(k.first) == degree && deg(k.second) == degree) r.entries_[k] = v;
    return r;
}

nlohmann::json ExteriorEndo::to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < dim(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < dim(); ++c) row.push_back(at(r, c).to_json());
        rows.push_back(row);
    }
    return rows;
}

ExteriorEndo ExteriorEndo::from_json(FibreShape s, const nlohmann::json& j) {
    ExteriorEndo e(s);
    if (static_cast<int>(j.size()) != s.dim()) throw std::invalid_argument("matrix row count");
    for (int r = 0; r < s.dim(); ++r) {
        if (static_cast<int>(j[r].size()) != s.dim()) throw std::invalid_argument("matrix column count");
        for (int c = 0; c < s.dim(); ++c) e.set(r, c, ExactScalar::from_json(j[r][c]));
    }
    return e;
}

std::string ExteriorEndo::to_string() const {
    const auto& wb = WordBasis::get(shape_.n);
    auto name = [&](int idx) {
        std::string l = WordBasis::label(wb.mask_at(idx / shape_.rk));
        if (shape_.rk > 1) l += "(x)e" + std::to_string(idx % shape_.rk + 1);
        return l;
    };
    std::ostringstream os;
    if (entries_.empty()) return "0";
    for (const auto& [k, v] : entries_) os << "[" << name(k.first) << " <- " << name(k.second) << "] " << v << "\n";
    return os.str();
}

ExteriorEndo Sqrt2Endo::exact() const {
    if (m.is_zero()) return m;
    if (half % 2 != 0) throw std::logic_error("odd power of sqrt(2) in an exact quantity");
    int k = half / 2;
    Rational f = k >= 0 ? Rational(mpz_class(1) << k) : Rational(1, mpz_class(1) << -k);
    return m * ExactScalar(f);
}

Frame parse_frame(const std::string& label) {
    if (label == "e" || label == "real") return Frame::Real;
    if (label == "v") return Frame::V;
    if (label == "vbar") return Frame::VBar;
    if (label == "u") return Frame::U;
    if (label == "ubar") return Frame::UBar;
    if (label == "xi") return Frame::Xi;
    if (label == "xibar") return Frame::XiBar;
    throw std::invalid_argument("unknown frame label: " + label);
}

Sqrt2Endo clifford_vector(FibreShape s, Frame frame, int index) {
    const ExactScalar i = ExactScalar::i();
    auto cre = [&](int j) { return ExteriorEndo::creation(s, j); };
    auto ann = [&](int j) { return ExteriorEndo::annihilation(s, j); };
    switch (frame) {
        case Frame::Real: {
            if (index < 0 || index >= 2 * s.n) throw std::out_of_range("frame index");
            int j = index / 2;
            if (index % 2 == 0) return {cre(j) - ann(j), 0};
            return {(cre(j) + ann(j)) * i, 0};
        }
        case Frame::V: return {cre(index), 1};
        case Frame::VBar: return {-ann(index), 1};
        case Frame::U: return index < s.q ? Sqrt2Endo{-ann(index), 1} : Sqrt2Endo{cre(index), 1};
        case Frame::UBar: return index < s.q ? Sqrt2Endo{cre(index), 1} : Sqrt2Endo{-ann(index), 1};
        case Frame::Xi: return index < s.q ? Sqrt2Endo{-ann(index), 0} : Sqrt2Endo{cre(index), 0};
        case Frame::XiBar: return index < s.q ? Sqrt2Endo{cre(index), 0} : Sqrt2Endo{-ann(index), 0};
    }
    throw std::invalid_argument("unknown frame");
}

ExteriorEndo clifford_real(FibreShape s, const std::vector<ExactScalar>& comp) {
    ExteriorEndo r(s);
    for (int a = 0; a < 2 * s.n; ++a)
        if (!comp[a].is_zero()) r += clifford_vector(s, Frame::Real, a).m * comp[a];
    return r;
}

Sqrt2Endo wedge_dzbar(FibreShape s, int j) { return {ExteriorEndo::creation(s, j), 1}; }
Sqrt2Endo interior_dzbar(FibreShape s, int j) { return {ExteriorEndo::annihilation(s, j), -1}; }
Sqrt2Endo wedge_dxibar(FibreShape s, int k) {
    return k >= s.q ? wedge_dzbar(s, k) : Sqrt2Endo{ExteriorEndo(s), 0};
}
Sqrt2Endo wedge_dxi(FibreShape s, int j) {
    return j < s.q ? wedge_dzbar(s, j) : Sqrt2Endo{ExteriorEndo(s), 0};
}
Sqrt2Endo interior_dxi(FibreShape s, int j) {
    return j < s.q ? interior_dzbar(s, j) : Sqrt2Endo{ExteriorEndo(s), 0};
}
Sqrt2Endo interior_dxibar(FibreShape s, int k) {
    return k >= s.q ? interior_dzbar(s, k) : Sqrt2Endo{ExteriorEndo(s), 0};
}

ExactScalar omega_d_eigenvalue(FibreShape s, std::uint32_t mask) {
    int count = 0;
    for (int j = 0; j < s.n; ++j) {
        bool has = (mask >> j) & 1u;
        if (j < s.q && !has) ++count;
        if (j >= s.q && has) ++count;
    }
    return ExactScalar::pi() * ExactScalar(-2 * count);
}

ExteriorEndo omega_d(FibreShape s) {
    const auto& wb = WordBasis::get(s.n);
    ExteriorEndo e(s);
    for (int w = 0; w < s.words(); ++w) {
        ExactScalar ev = omega_d_eigenvalue(s, wb.mask_at(w));
        for (int f = 0; f < s.rk; ++f) e.set(w * s.rk + f, w * s.rk + f, ev);
    }
    return e;
}

std::uint32_t det_word(FibreShape s) { return (1u << s.q) - 1u; }

ExteriorEndo project_det_W(FibreShape s) {
    const auto& wb = WordBasis::get(s.n);
    ExteriorEndo e(s);
    int w = wb.index_of(det_word(s));
    for (int f = 0; f < s.rk; ++f) e.set(w * s.rk + f, w * s.rk + f, ExactScalar(1));
    return e;
}

ExteriorEndo project_degree(FibreShape s, int degree) {
    const auto& wb = WordBasis::get(s.n);
    ExteriorEndo e(s);
    for (int w = 0; w < s.words(); ++w)
        if (std::popcount(wb.mask_at(w)) == degree)
            for (int f = 0; f < s.rk; ++f) e.set(w * s.rk + f, w * s.rk + f, ExactScalar(1));
    return e;
}

const ExactScalar& RealForm::at(const std::vector<int>& idx) const {
    std::size_t k = 0;
    for (int i : idx) k = k * dim + i;
    return comp[k];
}

ExteriorEndo clifford_of_form(FibreShape s, const RealForm& b) {
    const int d = 2 * s.n;
    if (b.dim != d) throw std::invalid_argument("form dimension mismatch");
    // Antisymmetry check.
    std::vector<int> idx(b.degree, 0);
    std::size_t total = b.comp.size();
    for (std::size_t k = 0; k < total; ++k) {
        std::size_t t = k;
        for (int p = b.degree - 1; p >= 0; --p) {
            idx[p] = static_cast<int>(t % d);
            t /= d;
        }
        for (int p = 0; p + 1 < b.degree; ++p) {
            auto sw = idx;
            std::swap(sw[p], sw[p + 1]);
            if (!(b.at(sw) == -b.comp[k])) throw std::invalid_argument("form is not antisymmetric");
        }
    }
    std::vector<ExteriorEndo> c;
    for (int a = 0; a < d; ++a) c.push_back(clifford_vector(s, Frame::Real, a).m);
    ExteriorEndo out(s);
    // Sum over strictly increasing index tuples.
    std::vector<int> tup(b.degree);
    auto rec = [&](auto&& self, int pos, int start, ExteriorEndo acc) -> void {
        if (pos == b.degree) {
            const ExactScalar& v = b.at(tup);
            if (!v.is_zero()) out += acc * v;
            return;
        }
        for (int a = start; a < d; ++a) {
            tup[pos] = a;
            self(self, pos + 1, a + 1, acc * c[a]);
        }
    };
    if (b.degree == 0) return ExteriorEndo::scalar(s, b.comp.at(0));
    rec(rec, 0, 0, ExteriorEndo::identity(s));
    return out;
}

namespace {

void check_antisymmetric(int d, const std::vector<ExactScalar>& a, int block) {
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int e = 0; e < block; ++e)
                if (!(a[(i * d + j) * block + e] == -a[(j * d + i) * block + e]))
                    throw std::invalid_argument("2-form is not antisymmetric");
}

ExactScalar eval2(int d, const std::vector<ExactScalar>& a, const std::vector<ExactScalar>& x,
                  const std::vector<ExactScalar>& y) {
    ExactScalar r;
    for (int i = 0; i < d; ++i) {
        if (x[i].is_zero()) continue;
        for (int j = 0; j < d; ++j)
            if (!y[j].is_zero() && !a[i * d + j].is_zero()) r += x[i] * y[j] * a[i * d + j];
    }
    return r;
}

}  // namespace

ExteriorEndo action_two_form(FibreShape s, const std::vector<ExactScalar>& a) {
    const int d = 2 * s.n;
    check_antisymmetric(d, a, 1);
    std::vector<ExteriorEndo> c;
    for (int k = 0; k < d; ++k) c.push_back(clifford_vector(s, Frame::Real, k).m);
    ExteriorEndo out(s);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (!a[i * d + j].is_zero()) out += (c[i] * c[j]) * a[i * d + j];
    return out * ExactScalar::rational(1, 4);
}

ExteriorEndo action_two_form_bundle(FibreShape s, const std::vector<ExactScalar>& a) {
    const int d = 2 * s.n;
    const int rr = s.rk * s.rk;
    check_antisymmetric(d, a, rr);
    std::vector<ExteriorEndo> c;
    for (int k = 0; k < d; ++k) c.push_back(clifford_vector(s, Frame::Real, k).m);
    ExteriorEndo out(s);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            std::vector<ExactScalar> m(a.begin() + (i * d + j) * rr, a.begin() + (i * d + j + 1) * rr);
            if (std::all_of(m.begin(), m.end(), [](const ExactScalar& x) { return x.is_zero(); })) continue;
            out += (c[i] * c[j]) * ExteriorEndo::on_bundle(s, m);
        }
    return out * ExactScalar::rational(1, 4);
}

std::vector<ExactScalar> dz_vector(int n, int j, bool bar) {
    // d/dz = (d/dx - i d/dy)/2, d/dzbar = (d/dx + i d/dy)/2.
    std::vector<ExactScalar> v(2 * n);
    v[2 * j] = ExactScalar::rational(1, 2);
    v[2 * j + 1] = ExactScalar(GaussRat(0, Rational(bar ? 1 : -1, 2)));
    return v;
}

std::vector<ExactScalar> dxi_vector(int n, int q, int j, bool bar) {
    bool conj = j < q;  // xi_j = zbar_j
    return dz_vector(n, j, bar != conj);
}

ExteriorEndo compress_two_form_on_det(FibreShape s, const std::vector<ExactScalar>& a) {
    const int d = 2 * s.n;
    check_antisymmetric(d, a, 1);
    auto A = [&](int j, bool bj, int k, bool bk) {
        return eval2(d, a, dxi_vector(s.n, s.q, j, bj), dxi_vector(s.n, s.q, k, bk));
    };
    ExteriorEndo det = project_det_W(s);
    ExteriorEndo out(s);
    ExactScalar diag;
    for (int j = 0; j < s.n; ++j) diag += A(j, false, j, true);
    out += ExteriorEndo::identity(s) * (diag * ExactScalar(-2));
    for (int j = 0; j < s.q; ++j)
        for (int k = s.q; k < s.n; ++k)
            out += (wedge_dxibar(s, k) * interior_dxi(s, j)).exact() * (A(j, true, k, true) * ExactScalar(4));
    for (int j = 0; j < s.q; ++j)
        for (int k = 0; k < s.q; ++k)
            out += (interior_dxi(s, j) * interior_dxi(s, k)).exact() * (A(j, true, k, true) * ExactScalar(4));
    for (int j = s.q; j < s.n; ++j)
        for (int k = s.q; k < s.n; ++k)
            out += (wedge_dxibar(s, j) * wedge_dxibar(s, k)).exact() * A(j, true, k, true);
    return out * det;
}

ExteriorEndo two_form_blocks(FibreShape s, const std::vector<ExactScalar>& a) {
    const int d = 2 * s.n;
    check_antisymmetric(d, a, 1);
    // v_j = sqrt2 d/dz_j, so A(v,v) = 2 A(dz,dz).
    auto A = [&](int j, bool bj, int k, bool bk) {
        return eval2(d, a, dz_vector(s.n, j, bj), dz_vector(s.n, k, bk)) * ExactScalar(2);
    };
    auto cre = [&](int j) { return ExteriorEndo::creation(s, j); };
    auto ann = [&](int j) { return ExteriorEndo::annihilation(s, j); };
    ExteriorEndo out(s);
    ExactScalar diag;
    for (int j = 0; j < s.n; ++j) diag += A(j, false, j, true);
    out += ExteriorEndo::identity(s) * (diag * ExactScalar::rational(-1, 2));
    for (int j = 0; j < s.n; ++j)
        for (int k = 0; k < s.n; ++k) {
            out += (cre(k) * ann(j)) * A(j, false, k, true);
            out += (ann(j) * ann(k)) * (A(j, false, k, false) * ExactScalar::rational(1, 2));
            out += (cre(j) * cre(k)) * (A(j, true, k, true) * ExactScalar::rational(1, 2));
        }
    return out;
}

}  // namespace bergman
