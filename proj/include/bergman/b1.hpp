#pragma once
// Closed-form evaluation of the second Bergman-kernel coefficient b1 on the
// bundle Lambda^q(T*^{(0,1)}X) (x) E and its Kähler / positive specializations.

#include <string>

#include "bergman/exterior.hpp"
#include "bergman/geometry.hpp"

namespace bergman {

class NotKahler : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotPositive : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct B1Result {
    ExteriorEndo endo;  // acts on Lambda(T*^{(0,1)}) (x) E, supported on Lambda^q (x) E
    ExactScalar trace;
    std::string route;  // "closed-form" or "engine"
    std::string jet_id;

    nlohmann::json to_json() const;
};

FibreShape shape_of(const GeometryJet& j);

// Full formula: seven blocks in the u-frame.
B1Result b1_formula(const GeometryJet& j);
// Trace over Lambda^q (x) E evaluated directly from the trace formula.
ExactScalar b1_trace(const GeometryJet& j);
// Kähler specialization (requires T_as = 0).
B1Result b1_kahler(const GeometryJet& j);
// Positive case q = 0: pi b1 = 1/2 R^E(v_j, vbar_j) + r^X/8.
B1Result b1_positive(const GeometryJet& j);

// Human-readable aligned table of the nonzero entries of a result.
std::string b1_table(const B1Result& r);

}  // namespace bergman
