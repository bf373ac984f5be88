// Python bindings.  Jets, potentials and results cross the boundary as JSON
// text (exact values are serialized as strings); the pure-Python package
// wrapping this module converts to and from dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "bergman/b1.hpp"
#include "bergman/geometry.hpp"
#include "bergman/model_kernels.hpp"
#include "bergman/perturbation.hpp"
#include "bergman/selftest.hpp"

namespace py = pybind11;
using namespace bergman;
using nlohmann::json;

namespace {

GeometryJet load_validated(const std::string& text) {
    GeometryJet j = jet_from_json(json::parse(text));
    const Report rep = validate_jet(j);
    if (!rep.all_ok()) {
        std::ostringstream os;
        os << "jet failed validation:";
        for (const auto& c : rep.checks)
            if (!c.ok) os << " " << c.name << (c.detail.empty() ? "" : " (" + c.detail + ")") << ";";
        throw std::invalid_argument(os.str());
    }
    return j;
}

json checks_to_json(const std::vector<CheckResult>& checks) {
    json rows = json::array();
    for (const auto& c : checks) rows.push_back({{"name", c.name}, {"ok", c.ok}, {"detail", c.detail}});
    return rows;
}

}  // namespace

PYBIND11_MODULE(_bergman, m) {
    m.doc() = "Exact b1 coefficient of the Bergman kernel expansion (native core)";

    py::register_exception<InvalidPotential>(m, "InvalidPotential", PyExc_ValueError);
    py::register_exception<InvalidJet>(m, "InvalidJet", PyExc_ValueError);
    py::register_exception<DegenerateCurvature>(m, "DegenerateCurvature", PyExc_ValueError);

    m.def("flat_jet", [](int n, int q, int rk) { return jet_to_json(flat_jet(n, q, rk)).dump(); },
          py::arg("n"), py::arg("q"), py::arg("rk") = 1);
    m.def("fubini_study_jet", [](int n, int q, int rk) { return jet_to_json(fubini_study_jet(n, q, rk)).dump(); },
          py::arg("n"), py::arg("q"), py::arg("rk") = 1);
    m.def("random_jet",
          [](int n, int q, int rk, std::uint64_t seed) { return jet_to_json(random_jet(n, q, rk, seed)).dump(); },
          py::arg("n"), py::arg("q"), py::arg("rk") = 1, py::arg("seed") = 0);
    m.def(
        "jet_from_potential",
        [](const std::string& potential, int n, int q, const std::vector<std::string>& bundle_potentials) {
            std::vector<ComplexPoly> phiE;
            for (const auto& p : bundle_potentials) phiE.push_back(parse_potential(json::parse(p), n));
            return jet_to_json(jet_from_potential(parse_potential(json::parse(potential), n), phiE, n, q)).dump();
        },
        py::arg("potential"), py::arg("n"), py::arg("q"), py::arg("bundle_potentials") = std::vector<std::string>{});
    m.def("validate_jet", [](const std::string& jet) { return validate_jet(jet_from_json(json::parse(jet))).to_json().dump(); });

    m.def("b1_closed_form", [](const std::string& jet) { return b1_formula(load_validated(jet)).to_json().dump(); });
    m.def("b1_engine", [](const std::string& jet) {
        const GeometryJet j = load_validated(jet);
        py::gil_scoped_release release;
        return b1_engine(j).to_json().dump();
    });
    m.def("b1_trace", [](const std::string& jet) { return b1_trace(load_validated(jet)).to_string(); });
    m.def("identities", [](const std::string& jet) {
        const GeometryJet j = load_validated(jet);
        json rows = json::array();
        for (const auto& r : identity_suite(j))
            rows.push_back({{"name", r.name}, {"lhs", r.lhs.to_string()}, {"rhs", r.rhs.to_string()}, {"equal", r.ok()}});
        return json{{"jet_id", j.id}, {"kahler", is_kahler(j)}, {"identities", rows}}.dump();
    });

    m.def("cp1_product_table", [](int n, int q, int pmin, int pmax, bool fit) {
        return cp1_product_table(n, q, pmin, pmax, fit).dump();
    }, py::arg("n"), py::arg("q"), py::arg("pmin"), py::arg("pmax"), py::arg("fit") = true);
    m.def("rrh", [](int n, int q, int rk) { return rrh_coefficients(n, q, rk).to_json().dump(); },
          py::arg("n"), py::arg("q"), py::arg("rk") = 1);
    m.def("selftest", [] {
        py::gil_scoped_release release;
        return checks_to_json(oracle_suite()).dump();
    });
}
