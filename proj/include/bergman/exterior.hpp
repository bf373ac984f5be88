#pragma once
// Exterior algebra Lambda(T*^{0,1}) (x) E at a point: wedge-word basis,
// creation/annihilation operators, Clifford actions, the degree operator
// omega_d and the projection onto det(Wbar*) (x) E.

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bergman/exact.hpp"

namespace bergman {

// Shape of the fibre: n anti-holomorphic generators, signature index q, rank of E.
struct FibreShape {
    int n = 1;
    int q = 0;
    int rk = 1;

    int words() const { return 1 << n; }
    int dim() const { return words() * rk; }
    bool operator==(const FibreShape&) const = default;
};

// Wedge words are bitmasks (bit j <-> generator j+1).  Basis order: words sorted
// lexicographically as increasing index sequences, E index varying fastest.
class WordBasis {
public:
    static const WordBasis& get(int n);
    int n() const { return n_; }
    int index_of(std::uint32_t mask) const { return index_[mask]; }
    std::uint32_t mask_at(int idx) const { return masks_[idx]; }
    static std::string label(std::uint32_t mask);

private:
    explicit WordBasis(int n);
    int n_;
    std::vector<std::uint32_t> masks_;
    std::vector<int> index_;
};

class ExteriorEndo {
public:
    using Key = std::pair<int, int>;

    ExteriorEndo() = default;
    explicit ExteriorEndo(FibreShape shape) : shape_(shape) {}

    static ExteriorEndo zero(FibreShape s) { return ExteriorEndo(s); }
    static ExteriorEndo identity(FibreShape s);
    static ExteriorEndo scalar(FibreShape s, const ExactScalar& c);
    // a_j^dagger = vbar^j wedge, a_j = interior product with vbar_j (j is 0-based).
    static ExteriorEndo creation(FibreShape s, int j);
    static ExteriorEndo annihilation(FibreShape s, int j);
    // Id_Lambda (x) M for an rk x rk matrix M (row-major).
    static ExteriorEndo on_bundle(FibreShape s, const std::vector<ExactScalar>& m);

    const FibreShape& shape() const { return shape_; }
    int dim() const { return shape_.dim(); }
    const std::map<Key, ExactScalar>& entries() const { return entries_; }
    bool is_zero() const { return entries_.empty(); }

    ExactScalar at(int r, int c) const;
    void add(int r, int c, const ExactScalar& v);
    void set(int r, int c, const ExactScalar& v);

    ExteriorEndo& operator+=(const ExteriorEndo& o);
    ExteriorEndo& operator-=(const ExteriorEndo& o);
    ExteriorEndo& operator*=(const ExactScalar& c);
    friend ExteriorEndo operator+(ExteriorEndo a, const ExteriorEndo& b) { return a += b; }
    friend ExteriorEndo operator-(ExteriorEndo a, const ExteriorEndo& b) { return a -= b; }
    friend ExteriorEndo operator*(ExteriorEndo a, const ExactScalar& c) { return a *= c; }
    friend ExteriorEndo operator*(const ExactScalar& c, ExteriorEndo a) { return a *= c; }
    friend ExteriorEndo operator*(const ExteriorEndo& a, const ExteriorEndo& b);
    ExteriorEndo operator-() const { return *this * ExactScalar(-1); }
    friend bool operator==(const ExteriorEndo& a, const ExteriorEndo& b) {
        return a.shape_ == b.shape_ && a.entries_ == b.entries_;
    }

    ExteriorEndo adjoint() const;
    ExactScalar trace() const;
    bool is_self_adjoint() const { return *this == adjoint(); }

    // Restriction to the rows/columns whose word has exactly `degree` letters,
    // embedded back into the full space.
    ExteriorEndo restrict_degree(int degree) const;

    nlohmann::json to_json() const;  // dense row-major matrix of scalar records
    static ExteriorEndo from_json(FibreShape s, const nlohmann::json& j);
    std::string to_string() const;   // human readable nonzero entries

private:
    FibreShape shape_;
    std::map<Key, ExactScalar> entries_;
};

// An endomorphism times 2^{half/2}; products of an even number of Clifford
// factors in complex frames land back in the exact field.
struct Sqrt2Endo {
    ExteriorEndo m;
    int half = 0;

    friend Sqrt2Endo operator*(const Sqrt2Endo& a, const Sqrt2Endo& b) {
        return {a.m * b.m, a.half + b.half};
    }
    bool is_exact() const { return half % 2 == 0 || m.is_zero(); }
    ExteriorEndo exact() const;  // throws if an odd power of sqrt 2 remains
};

enum class Frame { Real, V, VBar, U, UBar, Xi, XiBar };
Frame parse_frame(const std::string& label);

// Clifford action c(v) of a single frame vector (index 0-based).
Sqrt2Endo clifford_vector(FibreShape s, Frame frame, int index);
// Clifford action of a real-frame vector with exact (complex) components.
ExteriorEndo clifford_real(FibreShape s, const std::vector<ExactScalar>& components);

// Operators built from the xi-coordinates (xi_j = zbar_j for j<=q, z_j otherwise).
Sqrt2Endo wedge_dzbar(FibreShape s, int j);
Sqrt2Endo interior_dzbar(FibreShape s, int j);
Sqrt2Endo wedge_dxibar(FibreShape s, int k);
Sqrt2Endo wedge_dxi(FibreShape s, int j);
Sqrt2Endo interior_dxi(FibreShape s, int j);
Sqrt2Endo interior_dxibar(FibreShape s, int k);

// Degree operator omega_d and its eigenvalue on a word.
ExteriorEndo omega_d(FibreShape s);
ExactScalar omega_d_eigenvalue(FibreShape s, std::uint32_t mask);
std::uint32_t det_word(FibreShape s);
ExteriorEndo project_det_W(FibreShape s);
// Projection onto Lambda^q (x) E.
ExteriorEndo project_degree(FibreShape s, int degree);

// Totally antisymmetric multi-form over the real orthonormal frame:
// components indexed by tuples of 0-based frame indices, row-major.
struct RealForm {
    int dim = 0;     // 2n
    int degree = 0;
    std::vector<ExactScalar> comp;  // size dim^degree
    const ExactScalar& at(const std::vector<int>& idx) const;
};

ExteriorEndo clifford_of_form(FibreShape s, const RealForm& b);
// (1/4) sum_ij A(e_i,e_j) c(e_i) c(e_j) for an antisymmetric 2n x 2n matrix A
// (row-major, complex entries allowed).
ExteriorEndo action_two_form(FibreShape s, const std::vector<ExactScalar>& a);
// Same, but A is End(E)-valued: a[(i*2n+j)*rk*rk + (e*rk+f)].
ExteriorEndo action_two_form_bundle(FibreShape s, const std::vector<ExactScalar>& a);
// Block expansion of the Clifford image of a 2-form composed with the det
// projection, evaluated from the xi-frame components of A.
ExteriorEndo compress_two_form_on_det(FibreShape s, const std::vector<ExactScalar>& a);
// Block expansion of (1/4) sum A(e_i,e_j) c c in the v-frame (four blocks).
ExteriorEndo two_form_blocks(FibreShape s, const std::vector<ExactScalar>& a);

// Real-frame components of the complex vectors d/dz_j, d/dzbar_j, d/dxi_j, d/dxibar_j.
std::vector<ExactScalar> dz_vector(int n, int j, bool bar);
std::vector<ExactScalar> dxi_vector(int n, int q, int j, bool bar);

}  // namespace bergman
