#pragma once
// Second-order perturbation theory for the rescaled Kodaira Laplacian: the
// operators O1, O2 built from a geometry jet as composites of oscillator
// primitives, the six-term kernel F2 at the origin and its compression to
// Lambda^q (x) E, plus the named intermediate displays of the computation.

#include <string>
#include <vector>

#include "bergman/b1.hpp"
#include "bergman/geometry.hpp"
#include "bergman/oscillator.hpp"

namespace bergman {

ModelOperator build_O1(const GeometryJet& j);
// The primed part O'_1 (no Clifford term).
ModelOperator build_O1_prime(const GeometryJet& j);
ModelOperator build_O2(const GeometryJet& j);
ModelOperator build_O2_prime(const GeometryJet& j);
// Psi = 1/4 c(dT_as) as a multiplication operator.
ModelOperator build_Psi(const GeometryJet& j);
// The model operator L_2^0 = L_0 - 2 omega_d.
ModelOperator build_L20(FibreShape s);

// Formal adjoint with respect to the L^2 product on R^{2n} (x) fibre:
// Z and L_0 are self-adjoint, nabla_0 is skew, b and b^+ are exchanged,
// xi and xibar are exchanged, and endomorphism coefficients are adjointed.
ModelOperator formal_adjoint(const ModelOperator& op);

// R = (L_2^0)^{-1} P^{N perp} applied on the left of a kernel.
TwoPointState resolvent_perp(const TwoPointState& s);

struct F2Terms {
    // Values at (0,0) of the six terms, in order, with signs included.
    std::vector<std::pair<std::string, ExteriorEndo>> terms;
    ExteriorEndo total;
    // Terms three and four recomputed from the formal adjoints of O1 and O2
    // instead of the kernel adjoint; filled in when requested.
    bool direct_checked = false;
    bool direct_agrees = false;

    nlohmann::json to_json() const;
};

F2Terms compute_F2_origin(const GeometryJet& j, bool direct_check = false);
B1Result b1_engine(const GeometryJet& j);
// b1 from already computed F2 terms.
B1Result b1_from_F2(const GeometryJet& j, const F2Terms& f);

// ------------------------------------------------------------ sub-results

// One displayed intermediate quantity: value produced by the engine and the
// closed expression evaluated from the same jet, both as kernels in
// polynomial-Gaussian form (endomorphism values at the origin are stored as
// constant polynomials).
struct SubResult {
    std::string name;
    PolyGaussianForm engine;
    PolyGaussianForm display;
    bool ok() const { return engine == display; }
};

std::vector<SubResult> sub_results(const GeometryJet& j);

}  // namespace bergman
