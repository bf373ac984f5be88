#include "bergman/exact.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <ostream>
#include <sstream>

namespace bergman {

Rational parse_rational(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw std::invalid_argument("empty rational");
    if (s[0] == '+') s.erase(0, 1);
    Rational r;
    if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + text);
    if (s.find('/') != std::string::npos && sgn(r.get_den()) == 0)
        throw std::invalid_argument("zero denominator: " + text);
    r.canonicalize();
    return r;
}

std::string rational_to_string(const Rational& r) { return r.get_str(10); }

GaussRat GaussRat::inverse() const {
    Rational n = re * re + im * im;
    if (sgn(n) == 0) throw std::domain_error("division by zero");
    return {re / n, -im / n};
}

bool ExactScalar::is_real() const {
    return std::all_of(terms_.begin(), terms_.end(),
                       [](const Term& t) { return sgn(t.second.im) == 0; });
}

void ExactScalar::add_term(int k, const GaussRat& c) {
    if (c.is_zero()) return;
    auto it = std::lower_bound(terms_.begin(), terms_.end(), k,
                               [](const Term& t, int key) { return t.first < key; });
    if (it != terms_.end() && it->first == k) {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    } else {
        terms_.insert(it, {k, c});
    }
}

ExactScalar ExactScalar::conj() const {
    ExactScalar r = *this;
    for (auto& t : r.terms_) t.second.im = -t.second.im;
    return r;
}

ExactScalar ExactScalar::inverse() const {
    if (terms_.size() != 1)
        throw std::domain_error("inverse of non-monomial pi-Laurent scalar: " + to_string());
    return ExactScalar(terms_[0].second.inverse(), -terms_[0].first);
}

ExactScalar ExactScalar::times_pi(int k) const {
    ExactScalar r = *this;
    for (auto& t : r.terms_) t.first += k;
    return r;
}

ExactScalar ExactScalar::operator-() const {
    ExactScalar r = *this;
    for (auto& t : r.terms_) t.second = -t.second;
    return r;
}

ExactScalar& ExactScalar::operator+=(const ExactScalar& o) {
    for (const auto& t : o.terms_) add_term(t.first, t.second);
    return *this;
}

ExactScalar& ExactScalar::operator-=(const ExactScalar& o) {
    for (const auto& t : o.terms_) add_term(t.first, -t.second);
    return *this;
}

ExactScalar& ExactScalar::operator*=(const Rational& r) {
    if (sgn(r) == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& t : terms_) {
        t.second.re *= r;
        t.second.im *= r;
    }
    return *this;
}

ExactScalar operator*(const ExactScalar& a, const ExactScalar& b) {
    ExactScalar r;
    if (a.terms_.empty() || b.terms_.empty()) return r;
    if (a.terms_.size() == 1 && b.terms_.size() == 1) {
        r.terms_.push_back({a.terms_[0].first + b.terms_[0].first,
                            a.terms_[0].second * b.terms_[0].second});
        if (r.terms_[0].second.is_zero()) r.terms_.clear();
        return r;
    }
    for (const auto& x : a.terms_)
        for (const auto& y : b.terms_) r.add_term(x.first + y.first, x.second * y.second);
    return r;
}

GaussRat ExactScalar::coeff(int k) const {
    for (const auto& t : terms_)
        if (t.first == k) return t.second;
    return GaussRat();
}

ExactScalar ExactScalar::real_part() const {
    ExactScalar r;
    for (const auto& t : terms_) r.add_term(t.first, GaussRat(t.second.re));
    return r;
}

ExactScalar ExactScalar::imag_part() const {
    ExactScalar r;
    for (const auto& t : terms_) r.add_term(t.first, GaussRat(t.second.im));
    return r;
}

double ExactScalar::to_double_re() const {
    double v = 0;
    for (const auto& t : terms_) v += t.second.re.get_d() * std::pow(M_PI, t.first);
    return v;
}

double ExactScalar::to_double_im() const {
    double v = 0;
    for (const auto& t : terms_) v += t.second.im.get_d() * std::pow(M_PI, t.first);
    return v;
}

namespace {

std::string gauss_to_string(const GaussRat& g) {
    if (sgn(g.im) == 0) return rational_to_string(g.re);
    if (sgn(g.re) == 0) return rational_to_string(g.im) + "*i";
    std::string im = rational_to_string(g.im);
    if (im[0] == '-') return "(" + rational_to_string(g.re) + im + "*i)";
    return "(" + rational_to_string(g.re) + "+" + im + "*i)";
}

// Parses "a/b", "a/b*i", "(a/b+c/d*i)" style Gaussian rationals.
GaussRat parse_gauss(std::string s) {
    if (!s.empty() && s.front() == '(' && s.back() == ')') s = s.substr(1, s.size() - 2);
    GaussRat g;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t end = pos + 1;
        while (end < s.size() && s[end] != '+' && s[end] != '-') ++end;
        std::string part = s.substr(pos, end - pos);
        bool imag = false;
        if (part.size() >= 2 && part.substr(part.size() - 2) == "*i") {
            imag = true;
            part = part.substr(0, part.size() - 2);
        } else if (!part.empty() && part.back() == 'i') {
            imag = true;
            part.pop_back();
            if (part.empty() || part == "+" || part == "-") part += "1";
        }
        Rational r = parse_rational(part);
        if (imag)
            g.im += r;
        else
            g.re += r;
        pos = end;
    }
    return g;
}

}  // namespace

std::string ExactScalar::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (std::size_t idx = 0; idx < terms_.size(); ++idx) {
        const auto& t = terms_[idx];
        if (idx > 0) out += " + ";
        out += gauss_to_string(t.second);
        if (t.first == 1)
            out += "*pi";
        else if (t.first != 0)
            out += "*pi^" + std::to_string(t.first);
    }
    return out;
}

ExactScalar ExactScalar::parse(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    // Accept the UTF-8 letter pi as a synonym of "pi".
    for (std::size_t p = s.find("\u03c0"); p != std::string::npos; p = s.find("\u03c0"))
        s.replace(p, 2, "pi");
    ExactScalar r;
    if (s.empty() || s == "0") return r;
    // Split on top-level '+' separators between pi-terms ("...*pi^k+...").
    std::vector<std::string> parts;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (s[k] == '(') ++depth;
        if (s[k] == ')') --depth;
        bool sep = depth == 0 && k > start && (s[k] == '+' || s[k] == '-') &&
                   s[k - 1] != '^' && s[k - 1] != '/' && s[k - 1] != '*' && s[k - 1] != '(';
        if (sep) {
            parts.push_back(s.substr(start, k - start));
            start = s[k] == '+' ? k + 1 : k;
        }
    }
    parts.push_back(s.substr(start));
    for (const auto& part : parts) {
        int power = 0;
        std::string coef = part;
        auto p = part.find("pi");
        if (p != std::string::npos) {
            std::string rest = part.substr(p + 2);
            power = rest.empty() ? 1 : std::stoi(rest.substr(rest[0] == '^' ? 1 : 0));
            coef = part.substr(0, p);
            if (!coef.empty() && coef.back() == '*') coef.pop_back();
            if (coef.empty() || coef == "+") coef = "1";
            if (coef == "-") coef = "-1";
        }
        r.add_term(power, parse_gauss(coef));
    }
    return r;
}

nlohmann::json ExactScalar::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& t : terms_) {
        nlohmann::json o;
        o["pi_pow"] = t.first;
        o["re"] = rational_to_string(t.second.re);
        o["im"] = rational_to_string(t.second.im);
        arr.push_back(o);
    }
    return arr;
}

ExactScalar ExactScalar::from_json(const nlohmann::json& j) {
    if (j.is_string()) return parse(j.get<std::string>());
    if (j.is_number_integer()) return ExactScalar(j.get<long>());
    if (!j.is_array()) throw std::invalid_argument("scalar must be an array of terms or a string");
    ExactScalar r;
    for (const auto& t : j)
        r.add_term(t.at("pi_pow").get<int>(),
                   GaussRat(parse_rational(t.at("re").get<std::string>()),
                            parse_rational(t.value("im", std::string("0")))));
    return r;
}

std::ostream& operator<<(std::ostream& os, const ExactScalar& s) { return os << s.to_string(); }

bool structural_less(const ExactScalar& a, const ExactScalar& b) {
    return a.to_string() < b.to_string();
}

}  // namespace bergman
