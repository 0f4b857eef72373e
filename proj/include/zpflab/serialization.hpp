#pragma once

#include <json.hpp>

#include <complex>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "zpflab/bipartite.hpp"
#include "zpflab/covariance.hpp"
#include "zpflab/half_integer.hpp"
#include "zpflab/response.hpp"
#include "zpflab/spin_statistics.hpp"

namespace zpflab {

using nlohmann::json;

// zeta / gamma: {"half_units": integer}

inline json to_json(HalfInteger v) { return json{{"half_units", v.half_units()}}; }

inline HalfInteger half_integer_from_json(const json& j) {
    if (!j.is_object() || !j.contains("half_units") || !j["half_units"].is_number_integer())
        throw std::invalid_argument("expected {\"half_units\": integer}");
    return HalfInteger::from_half_units(j["half_units"].get<int>());
}

// LevelSystem: {"energies": [...], "mass": m, "hbar": h}

inline json to_json(const LevelSystem& sys) {
    return json{{"energies", sys.energies()}, {"mass", sys.mass()}, {"hbar", sys.hbar()}};
}

inline LevelSystem level_system_from_json(const json& j) {
    if (!j.is_object() || !j.contains("energies") || !j.contains("mass") || !j.contains("hbar"))
        throw std::invalid_argument("level system needs energies, mass and hbar");
    return LevelSystem(j["energies"].get<std::vector<double>>(), j["mass"].get<double>(),
                       j["hbar"].get<double>());
}

// ResponseMatrix: {"dim": d, "entries": [[re, im], ...]} row-major.

inline json to_json(const ResponseMatrix& m) {
    json entries = json::array();
    for (int n = 0; n < m.dim(); ++n)
        for (int k = 0; k < m.dim(); ++k)
            entries.push_back({m.entry(n, k).real(), m.entry(n, k).imag()});
    return json{{"dim", m.dim()}, {"entries", entries}};
}

inline ResponseMatrix response_matrix_from_json(const json& j) {
    if (!j.is_object() || !j.contains("dim") || !j.contains("entries"))
        throw std::invalid_argument("response matrix needs dim and entries");
    const int d = j["dim"].get<int>();
    const auto& entries = j["entries"];
    if (!entries.is_array() || static_cast<int>(entries.size()) != d * d)
        throw std::invalid_argument("response matrix needs dim*dim [re, im] entries");
    Eigen::MatrixXcd m(d, d);
    for (int n = 0; n < d; ++n)
        for (int k = 0; k < d; ++k) {
            const auto& e = entries[static_cast<std::size_t>(n * d + k)];
            if (!e.is_array() || e.size() != 2)
                throw std::invalid_argument("matrix entries must be [re, im] pairs");
            m(n, k) = Complex(e[0].get<double>(), e[1].get<double>());
        }
    return ResponseMatrix(std::move(m));
}

inline json to_json(const CovarianceReport& r) {
    json j{{"estimate", r.estimate},
           {"standard_error", r.standard_error},
           {"samples", r.samples},
           {"analytic", r.analytic},
           {"quantum", r.quantum},
           {"z_score", r.z_score()}};
    json trace = json::array();
    for (const ConvergencePoint& p : r.trace)
        trace.push_back({{"samples", p.samples},
                         {"estimate", p.estimate},
                         {"standard_error", p.standard_error},
                         {"analytic", p.analytic}});
    j["trace"] = trace;
    return j;
}

inline json to_json(const PhaseAssignment& a) {
    json zetas = json::array();
    for (const PhaseParameter& z : a.zetas) zetas.push_back(to_json(z));
    return json{{"family", family_name(a.family)}, {"zetas", zetas}};
}

inline json to_json(const AntiphaseInfeasibility& c) {
    return json{{"requested", c.requested},
                {"upsilon", to_json(c.upsilon)},
                {"reason", c.reason}};
}

inline json to_json(const AssignmentResult& r) {
    if (std::holds_alternative<PhaseAssignment>(r)) {
        json j = to_json(std::get<PhaseAssignment>(r));
        j["feasible"] = true;
        return j;
    }
    json j = to_json(std::get<AntiphaseInfeasibility>(r));
    j["feasible"] = false;
    return j;
}

inline json to_json(const PauliResult& r) {
    if (std::holds_alternative<PauliWitness>(r)) {
        const auto& w = std::get<PauliWitness>(r);
        json tuples = json::array();
        for (const auto& tuple : w.tuples) {
            json t = json::array();
            for (const SpinLabel& g : tuple) t.push_back(to_json(g));
            tuples.push_back(t);
        }
        return json{{"feasible", true},
                    {"upsilon", to_json(w.upsilon)},
                    {"k", w.k},
                    {"witnesses", tuples}};
    }
    if (std::holds_alternative<PauliCertificate>(r)) {
        const auto& c = std::get<PauliCertificate>(r);
        json failures = json::array();
        for (const auto& f : c.failures)
            failures.push_back({{"gamma1", to_json(f.gamma1)},
                                {"gamma2", to_json(f.gamma2)},
                                {"gamma3", to_json(f.gamma3)},
                                {"unit_gap_to_first", f.unit_gap_to_first},
                                {"unit_gap_to_second", f.unit_gap_to_second}});
        return json{{"feasible", false},
                    {"upsilon", to_json(c.upsilon)},
                    {"k", c.k},
                    {"note", c.note},
                    {"third_spin_failures", failures}};
    }
    const auto& na = std::get<PauliNotApplicable>(r);
    return json{{"feasible", nullptr},
                {"upsilon", to_json(na.upsilon)},
                {"note", "integer-spin family: antiphase pairing not applicable"}};
}

}  // namespace zpflab
