// Command-line front end: jet construction, both b1 routes, identity suites,
// product-model checks and the oracle selftest.
//
// Exit codes: 0 success, 2 usage error, 3 validation failure, 4 mismatch.

#include <CLI11.hpp>

#include <complex>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bergman/b1.hpp"
#include "bergman/geometry.hpp"
#include "bergman/model_kernels.hpp"
#include "bergman/oscillator.hpp"
#include "bergman/perturbation.hpp"
#include "bergman/selftest.hpp"

using namespace bergman;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitMismatch = 4;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text << "\n";
        return;
    }
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write " + path);
    out << text << "\n";
}

GeometryJet load_jet(const std::string& path) {
    GeometryJet j;
    try {
        j = jet_from_json(read_json_file(path));
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception& e) {
        throw ValidationError(path + ": " + e.what());
    }
    const Report rep = validate_jet(j);
    if (!rep.all_ok()) {
        std::ostringstream os;
        os << path << ": jet failed validation:";
        for (const auto& c : rep.checks)
            if (!c.ok) os << "\n  " << c.name << (c.detail.empty() ? "" : " — " + c.detail);
        throw ValidationError(os.str());
    }
    return j;
}

std::string dump(const json& j) { return j.dump(2); }

// Entry-wise difference report between two endomorphisms of the same shape.
json endo_diff(const ExteriorEndo& a, const ExteriorEndo& b, const F2Terms* terms) {
    json rows = json::array();
    const ExteriorEndo d = a - b;
    for (const auto& [key, value] : d.entries()) {
        const auto [r, c] = key;
        json row = {{"row", r},
                    {"column", c},
                    {"closed_form", a.at(r, c).to_string()},
                    {"engine", b.at(r, c).to_string()},
                    {"difference", value.to_string()}};
        if (terms) {
            json per = json::object();
            for (const auto& [name, t] : terms->terms) per[name] = t.at(r, c).to_string();
            row["engine_terms"] = per;
        }
        rows.push_back(row);
    }
    return rows;
}

void apply_degree_cap_from_env() {
    const char* v = std::getenv("BERGMAN_DEGREE_CAP");
    if (!v || !*v) return;
    try {
        std::size_t pos = 0;
        const int cap = std::stoi(v, &pos);
        if (pos != std::string(v).size() || cap < 1) throw std::invalid_argument(v);
        set_degree_cap(cap);
    } catch (const std::exception&) {
        throw UsageError(std::string("BERGMAN_DEGREE_CAP must be a positive integer, got '") + v + "'");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact second Bergman-kernel coefficient b1: closed form, perturbative engine and model checks"};
    app.require_subcommand(1);

    // ---- jet
    auto* jet = app.add_subcommand("jet", "Construct geometry jets");
    jet->require_subcommand(1);
    std::string pot_file, out_file;
    std::vector<std::string> pot_e_files;
    int n = 1, q = 0, rk = 1;
    std::uint64_t seed = 1;
    auto* jet_build = jet->add_subcommand("build", "Jet from a local potential (monomial map {\"z1^a z̄1^b\": \"p/q\"})");
    jet_build->add_option("--potential", pot_file, "potential of L")->required()->check(CLI::ExistingFile);
    jet_build->add_option("--n", n, "complex dimension")->required()->check(CLI::Range(1, 3));
    jet_build->add_option("--q", q, "number of negative directions")->required()->check(CLI::Range(0, 3));
    jet_build->add_option("--potential-e", pot_e_files, "potential of a line summand of E (repeatable)")
        ->check(CLI::ExistingFile);
    jet_build->add_option("--out", out_file, "output jet file ('-' for stdout)")->required();
    auto* jet_random = jet->add_subcommand("random", "Seeded random jet (mt19937_64)");
    jet_random->add_option("--seed", seed, "PRNG seed")->required();
    jet_random->add_option("--n", n, "complex dimension")->check(CLI::Range(1, 3));
    jet_random->add_option("--q", q, "number of negative directions")->check(CLI::Range(0, 3));
    jet_random->add_option("--rk-e", rk, "rank of E")->check(CLI::Range(1, 2));
    jet_random->add_option("--out", out_file, "output jet file ('-' for stdout)");
    auto* jet_flat = jet->add_subcommand("flat", "Flat model jet");
    auto* jet_fs = jet->add_subcommand("fubini-study", "Product of projective lines, q negative factors");
    for (auto* sc : {jet_flat, jet_fs}) {
        sc->add_option("--n", n, "complex dimension")->check(CLI::Range(1, 3));
        sc->add_option("--q", q, "number of negative directions")->check(CLI::Range(0, 3));
        sc->add_option("--rk-e", rk, "rank of E (trivial bundle)")->check(CLI::Range(1, 2));
        sc->add_option("--out", out_file, "output jet file ('-' for stdout)");
    }

    // ---- b1
    auto* b1 = app.add_subcommand("b1", "Second coefficient b1");
    b1->require_subcommand(1);
    std::string jet_file;
    bool as_json = false, as_table = false, with_terms = false, direct = false;
    auto* b1_closed = b1->add_subcommand("closed-form", "Closed formula");
    b1_closed->add_option("--jet", jet_file, "jet file")->required();
    auto* fmt = b1_closed->add_option_group("format");
    fmt->add_flag("--json", as_json, "JSON output (default)");
    fmt->add_flag("--table", as_table, "aligned table");
    fmt->require_option(0, 1);
    auto* b1_engine_cmd = b1->add_subcommand("engine", "Perturbative oscillator engine");
    b1_engine_cmd->add_option("--jet", jet_file, "jet file")->required();
    b1_engine_cmd->add_flag("--terms", with_terms, "include the six per-term values of F2 at the origin");
    b1_engine_cmd->add_flag("--direct-check", direct,
                            "recompute terms three and four from formal adjoints and require agreement");
    auto* b1_cross = b1->add_subcommand("crosscheck", "Compare the closed form with the engine (exit 4 on mismatch)");
    b1_cross->add_option("--jet", jet_file, "jet file")->required();
    auto* b1_sub = b1->add_subcommand("sub-results", "Intermediate engine values against their closed expressions");
    b1_sub->add_option("--jet", jet_file, "jet file")->required();

    // ---- identities
    auto* ident = app.add_subcommand("identities", "Tensor identity suite on a jet (exit 4 on failure)");
    ident->add_option("--jet", jet_file, "jet file")->required();

    // ---- model
    auto* model = app.add_subcommand("model", "Product of projective lines");
    model->require_subcommand(1);
    int pmin = 2, pmax = 5, p = 10, samples = 20;
    bool fit = false, csv = false;
    auto* cp1 = model->add_subcommand("cp1-product", "Traces (p-1)^q (p+1)^(n-q) and their fit in p");
    cp1->add_option("--n", n, "number of factors")->required()->check(CLI::Range(1, 3));
    cp1->add_option("--q", q, "number of O(-1) factors")->required()->check(CLI::Range(0, 3));
    cp1->add_option("--pmin", pmin, "smallest tensor power")->required();
    cp1->add_option("--pmax", pmax, "largest tensor power")->required();
    cp1->add_flag("--fit", fit, "fit the coefficients of p^n ... p^0");
    cp1->add_flag("--csv", csv, "CSV table instead of JSON");
    auto* sections = model->add_subcommand("sections-kernel", "Floating-point kernel of O(p) on the line");
    sections->add_option("--p", p, "tensor power")->check(CLI::Range(0, 60));
    sections->add_option("--samples", samples, "number of sample points")->check(CLI::Range(1, 10000));
    sections->add_option("--seed", seed, "PRNG seed for the sample points");

    // ---- rrh
    auto* rrh = app.add_subcommand("rrh", "Riemann-Roch-Hirzebruch coefficient check (exit 4 on mismatch)");
    rrh->add_option("--n", n, "number of factors")->required()->check(CLI::Range(1, 3));
    rrh->add_option("--q", q, "number of O(-1) factors")->required()->check(CLI::Range(0, 3));
    rrh->add_option("--rk-e", rk, "rank of the trivial bundle E")->check(CLI::PositiveNumber);

    // ---- selftest
    auto* selftest = app.add_subcommand("selftest", "Exact oracle suite (exit 4 on failure)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        apply_degree_cap_from_env();
        if (q > n) throw UsageError("--q must not exceed --n");

        if (jet_build->parsed()) {
            const ComplexPoly phi = parse_potential(read_json_file(pot_file), n);
            std::vector<ComplexPoly> phiE;
            for (const auto& f : pot_e_files) phiE.push_back(parse_potential(read_json_file(f), n));
            GeometryJet j = jet_from_potential(phi, phiE, n, q);
            j.id = pot_file;
            const Report rep = validate_jet(j);
            write_output(out_file, dump(jet_to_json(j)));
            if (!rep.all_ok()) {
                std::cerr << dump(rep.to_json()) << "\n";
                return kExitValidation;
            }
            return 0;
        }
        if (jet_random->parsed() || jet_flat->parsed() || jet_fs->parsed()) {
            const GeometryJet j = jet_random->parsed() ? random_jet(n, q, rk, seed)
                                  : jet_flat->parsed() ? flat_jet(n, q, rk)
                                                       : fubini_study_jet(n, q, rk);
            write_output(out_file, dump(jet_to_json(j)));
            return 0;
        }
        if (b1_closed->parsed()) {
            const B1Result r = b1_formula(load_jet(jet_file));
            std::cout << (as_table ? b1_table(r) : dump(r.to_json()) + "\n");
            return 0;
        }
        if (b1_engine_cmd->parsed()) {
            const GeometryJet j = load_jet(jet_file);
            const F2Terms f = compute_F2_origin(j, direct);
            const B1Result r = b1_from_F2(j, f);
            json out = r.to_json();
            if (with_terms) out["F2_terms"] = f.to_json();
            std::cout << dump(out) << "\n";
            if (direct && !f.direct_agrees) {
                std::cerr << "direct recomputation of terms three and four disagrees with the adjoint route\n";
                return kExitMismatch;
            }
            return 0;
        }
        if (b1_cross->parsed()) {
            const GeometryJet j = load_jet(jet_file);
            const B1Result closed = b1_formula(j);
            const F2Terms f = compute_F2_origin(j, false);
            const B1Result engine = b1_from_F2(j, f);
            const bool equal = closed.endo == engine.endo;
            json out = {{"jet_id", j.id},
                        {"equal", equal},
                        {"closed_form_trace", closed.trace.to_string()},
                        {"engine_trace", engine.trace.to_string()}};
            if (!equal) out["differences"] = endo_diff(closed.endo, engine.endo, &f);
            std::cout << dump(out) << "\n";
            return equal ? 0 : kExitMismatch;
        }
        if (b1_sub->parsed()) {
            const GeometryJet j = load_jet(jet_file);
            bool all = true;
            json rows = json::array();
            for (const auto& s : sub_results(j)) {
                all = all && s.ok();
                json row = {{"name", s.name}, {"equal", s.ok()}};
                if (!s.ok()) {
                    row["engine"] = s.engine.to_json();
                    row["closed_expression"] = s.display.to_json();
                }
                rows.push_back(row);
            }
            std::cout << dump({{"jet_id", j.id}, {"sub_results", rows}}) << "\n";
            return all ? 0 : kExitMismatch;
        }
        if (ident->parsed()) {
            const GeometryJet j = load_jet(jet_file);
            bool all = true;
            json rows = json::array();
            for (const auto& r : identity_suite(j)) {
                all = all && r.ok();
                rows.push_back({{"name", r.name}, {"lhs", r.lhs.to_string()}, {"rhs", r.rhs.to_string()}, {"equal", r.ok()}});
            }
            std::cout << dump({{"jet_id", j.id}, {"kahler", is_kahler(j)}, {"identities", rows}}) << "\n";
            return all ? 0 : kExitMismatch;
        }
        if (cp1->parsed()) {
            const json t = cp1_product_table(n, q, pmin, pmax, fit);
            if (csv) {
                std::cout << "p,trace\n";
                for (const auto& row : t["samples"])
                    std::cout << row["p"].get<int>() << "," << row["trace"].get<std::string>() << "\n";
                if (fit) {
                    std::cout << "power,coefficient\n";
                    int power = n;
                    for (const auto& c : t["coefficients"]) std::cout << power-- << "," << c.get<std::string>() << "\n";
                }
            } else {
                std::cout << dump(t) << "\n";
            }
            return 0;
        }
        if (sections->parsed()) {
            std::mt19937_64 rng(seed);
            std::uniform_real_distribution<double> u(-3.0, 3.0);
            std::vector<std::complex<double>> pts;
            for (int i = 0; i < samples; ++i) {
                const double re = u(rng), im = u(rng);
                pts.emplace_back(re, im);
            }
            const SectionsKernelReport rep = cp1_sections_kernel(p, pts);
            std::cout << dump(rep.to_json()) << "\n";
            return rep.max_deviation < 1e-9 ? 0 : kExitMismatch;
        }
        if (rrh->parsed()) {
            const RrhReport r = rrh_coefficients(n, q, rk);
            std::cout << dump(r.to_json()) << "\n";
            return r.consistent ? 0 : kExitMismatch;
        }
        if (selftest->parsed()) {
            bool all = true;
            for (const auto& c : oracle_suite()) {
                all = all && c.ok;
                std::cout << (c.ok ? "PASS " : "FAIL ") << c.name << "\n";
            }
            std::cout << (all ? "all oracles green" : "oracle failures present") << "\n";
            return all ? 0 : kExitMismatch;
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ValidationError& e) {
        std::cerr << "validation failure: " << e.what() << "\n";
        return kExitValidation;
    } catch (const InvalidPotential& e) {
        std::cerr << "validation failure: " << e.what() << "\n";
        return kExitValidation;
    } catch (const DegenerateCurvature& e) {
        std::cerr << "validation failure: " << e.what() << "\n";
        return kExitValidation;
    } catch (const InvalidJet& e) {
        std::cerr << "validation failure: " << e.what() << "\n";
        return kExitValidation;
    } catch (const TruncationInsufficient& e) {
        std::cerr << "validation failure: " << e.what() << "\n";
        return kExitValidation;
    } catch (const DegreeCapExceeded& e) {
        std::cerr << "validation failure: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
