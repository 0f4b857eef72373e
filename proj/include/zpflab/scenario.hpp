#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "zpflab/serialization.hpp"

namespace zpflab {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

/// Configuration or usage problem: reported before any computation runs
/// and mapped to exit code 2.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct CheckRecord {
    std::string name;
    double expected = 0.0;
    double observed = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

inline CheckRecord make_check(std::string name, double expected, double observed,
                              double tolerance) {
    const bool pass = std::abs(observed - expected) <= tolerance;
    return CheckRecord{std::move(name), expected, observed, tolerance, pass};
}

/// Plot-ready tabular data attached to a run.
struct Trace {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct RunReport {
    std::string experiment;
    std::vector<CheckRecord> checks;
    Trace trace;
    json results = json::object();  // experiment-specific payloads (witnesses, certificates)
    std::uint64_t seed = 0;
    long samples = 0;

    bool pass() const {
        return std::all_of(checks.begin(), checks.end(),
                           [](const CheckRecord& c) { return c.pass; });
    }
};

inline json to_json(const RunReport& r, bool with_timestamp = true) {
    json checks = json::array();
    for (const CheckRecord& c : r.checks)
        checks.push_back({{"name", c.name},
                          {"expected", c.expected},
                          {"observed", c.observed},
                          {"tolerance", c.tolerance},
                          {"pass", c.pass}});
    json rows = json::array();
    for (const auto& row : r.trace.rows) rows.push_back(row);
    json metadata{{"seed", r.seed}, {"samples", r.samples}, {"version", kVersion}};
    if (with_timestamp) {
        const std::time_t now = std::chrono::system_clock::to_time_t(
            std::chrono::system_clock::now());
        char buf[sizeof "1970-01-01T00:00:00Z"];
        std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&now));
        metadata["timestamp"] = buf;
    }
    return json{{"schema_version", kSchemaVersion},
                {"experiment", r.experiment},
                {"metadata", metadata},
                {"checks", checks},
                {"results", r.results},
                {"trace", {{"columns", r.trace.columns}, {"rows", rows}}},
                {"pass", r.pass()}};
}

/// RFC-4180 CSV: header row always, one row per checkpoint.
inline void emit_trace(const RunReport& report, std::ostream& out) {
    for (std::size_t i = 0; i < report.trace.columns.size(); ++i)
        out << (i ? "," : "") << report.trace.columns[i];
    out << "\r\n";
    for (const auto& row : report.trace.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ",";
            std::ostringstream cell;
            cell.precision(17);
            cell << row[i];
            out << cell.str();
        }
        out << "\r\n";
    }
}

inline void emit_trace(const RunReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_trace: cannot write " + path);
    emit_trace(report, out);
}

/// Fully parsed scenario: every run is a function of this content alone.
struct ScenarioConfig {
    std::string experiment;
    std::optional<LevelSystem> system;
    std::optional<ResponseMatrix> matrix_f;
    std::optional<ResponseMatrix> matrix_g;
    HalfInteger zeta = HalfInteger::from_integer(0);
    HalfInteger upsilon = HalfInteger::from_half_units(3);
    int level_n = 0;
    int level_m = 1;
    int subset_size = 3;  // pauli k
    int member_count = 10;
    long samples = 200000;
    std::uint64_t seed = 12345;
};

inline std::uint64_t parse_seed(const json& j) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer()) {
        const auto v = j.get<long long>();
        if (v < 0) throw ConfigError("seed must be non-negative");
        return static_cast<std::uint64_t>(v);
    }
    if (j.is_string()) {
        try {
            return std::stoull(j.get<std::string>(), nullptr, 0);  // decimal or 0x-prefixed
        } catch (const std::exception&) {
            throw ConfigError("seed string must be decimal or 0x-prefixed hex");
        }
    }
    throw ConfigError("seed must be an unsigned integer or a string");
}

inline std::uint64_t parse_seed(const std::string& text) { return parse_seed(json(text)); }

inline const std::vector<std::string>& known_experiments() {
    static const std::vector<std::string> names = {"trk",      "commutator", "bracket2",
                                                   "covariance", "entangle", "spin",
                                                   "pauli",    "full-suite"};
    return names;
}

inline ScenarioConfig parse_scenario(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (key != "schema_version" && key != "experiment" && key != "system" &&
            key != "matrices" && key != "params")
            throw ConfigError("unknown config key: " + key);
    }
    if (!j.contains("schema_version") || !j["schema_version"].is_number_integer() ||
        j["schema_version"].get<int>() != kSchemaVersion)
        throw ConfigError("config must declare \"schema_version\": 1");
    if (!j.contains("experiment") || !j["experiment"].is_string())
        throw ConfigError("config must name an experiment");

    ScenarioConfig cfg;
    cfg.experiment = j["experiment"].get<std::string>();
    const auto& names = known_experiments();
    if (std::find(names.begin(), names.end(), cfg.experiment) == names.end())
        throw ConfigError("unknown experiment: " + cfg.experiment);

    try {
        if (j.contains("system")) {
            const json& s = j["system"];
            if (s.is_object() && s.contains("oscillator")) {
                const json& o = s["oscillator"];
                const auto osc = harmonic_oscillator(
                    o.value("dim", 10), o.value("mass", 1.0), o.value("omega0", 1.0),
                    o.value("hbar", 1.0));
                cfg.system = osc.system;
                cfg.matrix_f = osc.position;
            } else {
                cfg.system = level_system_from_json(s);
            }
        }
        if (j.contains("matrices")) {
            const json& m = j["matrices"];
            if (!m.is_object()) throw ConfigError("matrices must be an object");
            if (m.contains("f")) cfg.matrix_f = response_matrix_from_json(m["f"]);
            if (m.contains("g")) cfg.matrix_g = response_matrix_from_json(m["g"]);
        }
        if (j.contains("params")) {
            const json& p = j["params"];
            if (!p.is_object()) throw ConfigError("params must be an object");
            for (const auto& [key, value] : p.items()) {
                if (key == "zeta")
                    cfg.zeta = half_integer_from_json(value);
                else if (key == "upsilon")
                    cfg.upsilon = half_integer_from_json(value);
                else if (key == "n")
                    cfg.level_n = value.get<int>();
                else if (key == "m")
                    cfg.level_m = value.get<int>();
                else if (key == "k")
                    cfg.subset_size = value.get<int>();
                else if (key == "count")
                    cfg.member_count = value.get<int>();
                else if (key == "samples")
                    cfg.samples = value.get<long>();
                else if (key == "seed")
                    cfg.seed = parse_seed(value);
                else
                    throw ConfigError("unknown param: " + key);
            }
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
    return cfg;
}

inline json scenario_schema() {
    return json{
        {"schema_version", kSchemaVersion},
        {"experiment", {{"enum", known_experiments()}}},
        {"system",
         {{"oneOf",
           {"{\"oscillator\": {\"dim\", \"mass\", \"omega0\", \"hbar\"}}",
            "{\"energies\": [..], \"mass\": m, \"hbar\": h}"}}}},
        {"matrices",
         {{"f", "{\"dim\": d, \"entries\": [[re, im], ..] row-major, Hermitian}"},
          {"g", "same shape as f"}}},
        {"params",
         {{"zeta", "{\"half_units\": int}"},
          {"upsilon", "{\"half_units\": int}"},
          {"n", "level index"},
          {"m", "level index"},
          {"k", "subset size for pauli"},
          {"count", "member count for phase assignment"},
          {"samples", "Monte Carlo samples"},
          {"seed", "unsigned integer, decimal or 0x-prefixed string"}}}};
}

namespace detail {

inline Eigen::MatrixXcd scenario_random_hermitian(int dim, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXcd a(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) a(i, j) = Complex(u(rng), u(rng));
    return 0.5 * (a + a.adjoint());
}

inline OscillatorModel scenario_oscillator(const ScenarioConfig& cfg, int default_dim) {
    if (cfg.system && cfg.matrix_f) return OscillatorModel{*cfg.system, *cfg.matrix_f};
    return harmonic_oscillator(default_dim, 1.0, 1.0, 1.0);
}

inline std::vector<ModeKey> all_canonical_modes(int dim) {
    std::vector<ModeKey> modes;
    for (int n = 0; n < dim; ++n)
        for (int k = n + 1; k < dim; ++k) modes.emplace_back(n, k);
    return modes;
}

}  // namespace detail

inline RunReport run_trk(const ScenarioConfig& cfg) {
    RunReport report;
    report.experiment = "trk";
    report.seed = cfg.seed;
    const auto osc = detail::scenario_oscillator(cfg, 10);
    const double hbar = osc.system.hbar();
    const int d = osc.system.dim();
    report.trace.columns = {"level", "sum", "deviation"};
    for (int n = 0; n < d; ++n) {
        const double sum = trk_sum(osc.position, osc.system, n);
        const bool boundary = n == d - 1;
        const double expected = boundary ? -(d - 1) * hbar : hbar;
        std::string name = "trk sum level " + std::to_string(n);
        if (boundary) name += " (truncation boundary)";
        report.checks.push_back(make_check(name, expected, sum, 1e-12));
        report.trace.rows.push_back({static_cast<double>(n), sum, sum - hbar});
    }
    return report;
}

inline RunReport run_commutator(const ScenarioConfig& cfg) {
    RunReport report;
    report.experiment = "commutator";
    report.seed = cfg.seed;
    const auto osc = detail::scenario_oscillator(cfg, 12);
    const int d = osc.system.dim();
    const double hbar = osc.system.hbar();
    const ResponseMatrix p = momentum_matrix(osc.position, osc.system);
    const Eigen::MatrixXcd c = commutator(osc.position, p);
    const Eigen::MatrixXcd expected =
        Complex(0.0, hbar) * Eigen::MatrixXcd::Identity(d, d);
    const double interior_dev =
        (c - expected).topLeftCorner(d - 1, d - 1).cwiseAbs().maxCoeff();
    report.checks.push_back(make_check(
        "[x,p] = i hbar on interior block 0.." + std::to_string(d - 2), 0.0, interior_dev,
        1e-12));
    report.checks.push_back(make_check("corner deviation (truncation)", -(d - 1) * hbar,
                                       c(d - 1, d - 1).imag(), 1e-12));
    report.trace.columns = {"row", "col", "re", "im"};
    for (int n = 0; n < d; ++n)
        for (int k = 0; k < d; ++k)
            if (std::abs(c(n, k)) > 1e-14)
                report.trace.rows.push_back({static_cast<double>(n), static_cast<double>(k),
                                             c(n, k).real(), c(n, k).imag()});
    return report;
}

inline RunReport run_bracket2(const ScenarioConfig& cfg) {
    RunReport report;
    report.experiment = "bracket2";
    report.seed = cfg.seed;
    const auto osc = detail::scenario_oscillator(cfg, 8);
    const int d = osc.system.dim();
    const double hbar = osc.system.hbar();
    report.trace.columns = {"zeta12", "level", "ratio_to_i_hbar"};

    for (int z = 0; z <= 5; ++z) {
        const HalfInteger zeta = HalfInteger::from_integer(z);
        double max_xx = 0.0;
        double max_sign_dev = 0.0;
        for (int n = 0; n + 1 < d; ++n) {
            const BipartitePair same(osc.system, osc.position, zeta,
                                     HalfInteger::from_integer(0), n, n);
            max_xx = std::max(max_xx, std::abs(bracket_xx_same(same)));
            const Complex value = bracket_xp_same(same).value;
            const double ratio = (value / Complex(0.0, hbar)).real();
            const double expected = z % 2 == 0 ? 1.0 : -1.0;
            max_sign_dev = std::max(max_sign_dev, std::abs(ratio - expected));
            report.trace.rows.push_back({static_cast<double>(z), static_cast<double>(n), ratio});
        }
        const BipartitePair distinct(osc.system, osc.position, zeta,
                                     HalfInteger::from_integer(0), 0, 1);
        report.checks.push_back(make_check(
            "[x1,x2] vanishes for zeta12 = " + std::to_string(z), 0.0,
            std::abs(bracket_xx_distinct(distinct)) + max_xx, 0.0));
        report.checks.push_back(make_check(
            "[x1,p2]/(i hbar) = (-1)^zeta12, zeta12 = " + std::to_string(z), 0.0, max_sign_dev,
            1e-12));
    }

    // Finite-difference routes.
    const FieldRealization r =
        sample_realization(detail::all_canonical_modes(d), cfg.seed);
    for (int z : {0, 1}) {
        const HalfInteger zeta = HalfInteger::from_integer(z);
        const BipartitePair pair(osc.system, osc.position, zeta, HalfInteger::from_integer(0),
                                 1, 2);
        const ParticleResponse p2(osc.system, momentum_matrix(osc.position, osc.system),
                                  HalfInteger::from_integer(0), 2);
        const Complex numeric = poisson_bracket_numeric(pair.particle(1), p2, 1, 2, r);
        const Complex closed = bracket_xp_distinct(pair);
        report.checks.push_back(make_check(
            "finite-difference vs closed form, zeta12 = " + std::to_string(z), 0.0,
            std::abs(numeric - closed), 1e-6 * std::max(1.0, std::abs(closed))));
    }
    const ParticleResponse x1(osc.system, osc.position);
    const ParticleResponse p1(osc.system, momentum_matrix(osc.position, osc.system));
    report.checks.push_back(make_check(
        "same-particle bracket decouples distinct states", 0.0,
        std::abs(poisson_bracket_numeric(x1, p1, 1, 3, r)), 1e-8));
    return report;
}

inline RunReport run_covariance(const ScenarioConfig& cfg) {
    RunReport report;
    report.experiment = "covariance";
    report.seed = cfg.seed;
    report.samples = cfg.samples;

    ResponseMatrix f = cfg.matrix_f.value_or([] {
        Eigen::MatrixXcd x(2, 2);
        x << 0.0, 1.0, 1.0, 0.0;
        return ResponseMatrix(x);
    }());
    ResponseMatrix g = cfg.matrix_g.value_or(f);
    const ObservablePair obs(f, g);
    const int n = cfg.level_n;
    const int m = cfg.level_m;

    const double analytic = analytic_covariance(obs, n, m, cfg.zeta);
    const double quantum = quantum_covariance(obs, build_entangled_state(n, m, cfg.zeta));
    report.checks.push_back(
        make_check("analytic covariance equals quantum covariance", analytic, quantum, 1e-12));

    McOptions options;
    if (cfg.system) options.system = cfg.system;
    const CovarianceReport mc = mc_covariance(obs, n, m, cfg.zeta, cfg.samples, cfg.seed,
                                              options);
    report.checks.push_back(make_check("Monte Carlo estimate within 4 standard errors",
                                       mc.analytic, mc.estimate,
                                       4.0 * mc.standard_error + 1e-12));
    report.results["covariance"] = to_json(mc);
    report.trace.columns = {"samples", "estimate", "stderr", "analytic"};
    for (const ConvergencePoint& pt : mc.trace)
        report.trace.rows.push_back({static_cast<double>(pt.samples), pt.estimate,
                                     pt.standard_error, pt.analytic});
    return report;
}

inline RunReport run_entangle(const ScenarioConfig& cfg) {
    RunReport report;
    report.experiment = "entangle";
    report.seed = cfg.seed;
    report.trace.columns = {"dim", "zeta_parity", "analytic", "quantum"};

    report.checks.push_back(make_check(
        "even zeta builds the symmetric state", 1.0,
        build_entangled_state(0, 1, HalfInteger::from_integer(2)).sign(), 0.0));
    report.checks.push_back(make_check(
        "odd zeta builds the antisymmetric state", -1.0,
        build_entangled_state(0, 1, HalfInteger::from_integer(3)).sign(), 0.0));

    bool rejected = false;
    try {
        build_entangled_state(1, 1, HalfInteger::from_integer(0));
    } catch (const std::invalid_argument&) {
        rejected = true;
    }
    report.checks.push_back(
        make_check("equal levels are rejected (no correlating mode)", 1.0, rejected ? 1.0 : 0.0,
                   0.0));

    std::mt19937_64 rng(cfg.seed);
    double max_dev = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const int d = 2 + static_cast<int>(rng() % 5);
        const ObservablePair obs{ResponseMatrix(detail::scenario_random_hermitian(d, rng)),
                                 ResponseMatrix(detail::scenario_random_hermitian(d, rng))};
        const int nn = static_cast<int>(rng() % static_cast<std::uint64_t>(d));
        int mm = static_cast<int>(rng() % static_cast<std::uint64_t>(d));
        if (mm == nn) mm = (mm + 1) % d;
        for (int z : {0, 1}) {
            const double analytic =
                analytic_covariance(obs, nn, mm, HalfInteger::from_integer(z));
            const double quantum = quantum_covariance(
                obs, build_entangled_state(nn, mm, HalfInteger::from_integer(z)));
            max_dev = std::max(max_dev, std::abs(analytic - quantum));
            report.trace.rows.push_back(
                {static_cast<double>(d), static_cast<double>(z), analytic, quantum});
        }
    }
    report.checks.push_back(make_check(
        "analytic = quantum on 100 random Hermitian pairs, dims 2..6", 0.0, max_dev, 1e-12));
    return report;
}

inline RunReport run_spin(const ScenarioConfig& cfg) {
    RunReport report;
    report.experiment = "spin";
    report.seed = cfg.seed;
    report.trace.columns = {"phi", "deviation"};

    int mismatches = 0;
    for (int z = 0; z <= 7; ++z)
        for (int two_gamma = -7; two_gamma <= 7; ++two_gamma) {
            const int factor = exchange_factor(HalfInteger::from_integer(z),
                                               HalfInteger::from_half_units(two_gamma));
            const int expected = (z + two_gamma) % 2 == 0 ? 1 : -1;
            if (factor != expected) ++mismatches;
        }
    report.checks.push_back(make_check(
        "exchange factor parity table (zeta 0..7, 2 gamma -7..7)", 0.0, mismatches, 0.0));

    report.checks.push_back(make_check(
        "spin 1/2 requires odd zeta", 1.0,
        required_zeta_parity(HalfInteger::from_half_units(1)) == ZetaParity::odd ? 1.0 : 0.0,
        0.0));

    const CompleteState singlet = build_complete_state(
        0, HalfInteger::from_half_units(1), 0, HalfInteger::from_half_units(-1),
        HalfInteger::from_integer(1));
    report.checks.push_back(make_check(
        "spin singlet is antisymmetric under swap", -1.0,
        swap_parity(singlet) == SwapParity::antisymmetric
            ? -1.0
            : (swap_parity(singlet) == SwapParity::symmetric ? 1.0 : 0.0),
        0.0));

    const EntangledState energy = build_entangled_state(0, 1, HalfInteger::from_integer(1));
    report.checks.push_back(
        make_check("energy state for odd zeta is antisymmetric", -1.0, energy.sign(), 0.0));

    std::mt19937_64 rng(cfg.seed);
    const double pi = std::numbers::pi;
    double max_dev = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const int d = 2 + static_cast<int>(rng() % 4);
        const ObservablePair obs{ResponseMatrix(detail::scenario_random_hermitian(d, rng)),
                                 ResponseMatrix(detail::scenario_random_hermitian(d, rng))};
        for (int z : {0, 1})
            for (double phi : {0.0, pi / 3.0, pi, 2.0 * pi}) {
                const double with_spin = spin_covariance(
                    obs, 0, d - 1, HalfInteger::from_integer(z),
                    HalfInteger::from_half_units(1), HalfInteger::from_half_units(-1), phi);
                const double spinless =
                    analytic_covariance(obs, 0, d - 1, HalfInteger::from_integer(z));
                max_dev = std::max(max_dev, std::abs(with_spin - spinless));
                report.trace.rows.push_back({phi, with_spin - spinless});
            }
    }
    report.checks.push_back(make_check(
        "spin covariance is phi-independent and spinless-equal (50 pairs)", 0.0, max_dev,
        1e-12));
    return report;
}

inline RunReport run_pauli(const ScenarioConfig& cfg) {
    if (!cfg.upsilon.is_half_odd() || cfg.upsilon.is_negative())
        throw ConfigError("pauli experiment needs a half-odd-integer Upsilon >= 1/2");
    RunReport report;
    report.experiment = "pauli";
    report.seed = cfg.seed;
    report.trace.columns = {"k", "witness_count"};

    const PauliResult pairs = pauli_feasibility(cfg.upsilon, 2);
    const long pair_count = std::holds_alternative<PauliWitness>(pairs)
                                ? static_cast<long>(std::get<PauliWitness>(pairs).tuples.size())
                                : 0;
    report.checks.push_back(make_check("k = 2 admits witness pairs",
                                       static_cast<double>(cfg.upsilon.half_units()),
                                       static_cast<double>(pair_count), 0.0));
    report.trace.rows.push_back({2.0, static_cast<double>(pair_count)});
    report.results["pairs"] = to_json(pairs);

    const PauliResult requested = pauli_feasibility(cfg.upsilon, cfg.subset_size);
    const bool infeasible = std::holds_alternative<PauliCertificate>(requested);
    const long witness_count =
        std::holds_alternative<PauliWitness>(requested)
            ? static_cast<long>(std::get<PauliWitness>(requested).tuples.size())
            : 0;
    report.trace.rows.push_back({static_cast<double>(cfg.subset_size),
                                 static_cast<double>(witness_count)});
    report.results["requested"] = to_json(requested);
    if (cfg.subset_size >= 3)
        report.checks.push_back(make_check(
            "k = " + std::to_string(cfg.subset_size) + " is infeasible with certificate", 1.0,
            infeasible ? 1.0 : 0.0, 0.0));
    else
        report.checks.push_back(make_check("k = " + std::to_string(cfg.subset_size) +
                                               " is feasible",
                                           1.0, witness_count > 0 ? 1.0 : 0.0, 0.0));
    return report;
}

inline RunReport run_full_suite(const ScenarioConfig& cfg);

/// Dispatches to the experiment runner. Config problems propagate as
/// ConfigError; a numerical failure inside a run surfaces as a failed
/// check record instead of a crash.
inline RunReport run_scenario(const ScenarioConfig& cfg) {
    try {
        if (cfg.experiment == "trk") return run_trk(cfg);
        if (cfg.experiment == "commutator") return run_commutator(cfg);
        if (cfg.experiment == "bracket2") return run_bracket2(cfg);
        if (cfg.experiment == "covariance") return run_covariance(cfg);
        if (cfg.experiment == "entangle") return run_entangle(cfg);
        if (cfg.experiment == "spin") return run_spin(cfg);
        if (cfg.experiment == "pauli") return run_pauli(cfg);
        if (cfg.experiment == "full-suite") return run_full_suite(cfg);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        RunReport aborted;
        aborted.experiment = cfg.experiment;
        aborted.seed = cfg.seed;
        aborted.samples = cfg.samples;
        aborted.checks.push_back(
            CheckRecord{std::string("aborted: ") + e.what(), 1.0, 0.0, 0.0, false});
        return aborted;
    }
    throw ConfigError("unknown experiment: " + cfg.experiment);
}

inline RunReport run_full_suite(const ScenarioConfig& cfg) {
    RunReport report;
    report.experiment = "full-suite";
    report.seed = cfg.seed;
    report.samples = cfg.samples;

    const auto absorb = [&report](const RunReport& sub) {
        for (const CheckRecord& c : sub.checks) {
            CheckRecord copy = c;
            copy.name = sub.experiment + ": " + c.name;
            report.checks.push_back(copy);
        }
        for (const auto& [key, value] : sub.results.items())
            report.results[sub.experiment + "." + key] = value;
    };

    ScenarioConfig sub = cfg;
    sub.system.reset();
    sub.matrix_f.reset();
    sub.matrix_g.reset();
    absorb(run_trk(sub));
    absorb(run_commutator(sub));
    absorb(run_bracket2(sub));
    for (int z : {0, 1}) {
        ScenarioConfig cov = sub;
        cov.zeta = HalfInteger::from_integer(z);
        absorb(run_covariance(cov));
    }
    absorb(run_entangle(sub));
    absorb(run_spin(sub));
    {
        ScenarioConfig pauli = sub;
        pauli.subset_size = 3;
        for (int h : {1, 3, 5, 7}) {
            pauli.upsilon = HalfInteger::from_half_units(h);
            absorb(run_pauli(pauli));
        }
    }

    // Pairing rule of the normal variables on a 4-level mode set.
    {
        const int levels = 4;
        const auto modes = detail::all_canonical_modes(levels);
        const long trials = 100000;
        double worst_margin = -1.0;  // max of (|mean - expected| - 3 SE) over probes
        for (int n = 0; n < levels; ++n)
            for (int k = 0; k < levels; ++k) {
                if (n == k) continue;
                for (int m = 0; m < levels; ++m)
                    for (int l = 0; l < levels; ++l) {
                        if (m == l) continue;
                        Complex sum = 0.0;
                        double sum_sq_re = 0.0, sum_sq_im = 0.0;
                        for (long t = 0; t < trials; ++t) {
                            const FieldRealization r = sample_realization(
                                modes, derive_stream(cfg.seed, static_cast<std::uint64_t>(t)));
                            const Complex prod =
                                r.normal_variable(n, k) * r.normal_variable(m, l);
                            sum += prod;
                            sum_sq_re += prod.real() * prod.real();
                            sum_sq_im += prod.imag() * prod.imag();
                        }
                        const Complex mean = sum / static_cast<double>(trials);
                        const double expected = (n == l && k == m) ? 1.0 : 0.0;
                        const double se_re = std::sqrt(
                            std::max(sum_sq_re / trials - mean.real() * mean.real(), 0.0) /
                            trials);
                        const double se_im = std::sqrt(
                            std::max(sum_sq_im / trials - mean.imag() * mean.imag(), 0.0) /
                            trials);
                        worst_margin = std::max(
                            worst_margin,
                            std::abs(mean.real() - expected) - 3.0 * se_re - 1e-12);
                        worst_margin = std::max(
                            worst_margin, std::abs(mean.imag()) - 3.0 * se_im - 1e-12);
                    }
            }
        report.checks.push_back(make_check(
            "pairing rule: E[a_nk a_ml] = delta_nl delta_km within 3 SE (4 levels)", 0.0,
            std::max(worst_margin, 0.0), 0.0));
    }

    // Multiparticle phase assignment.
    {
        const auto b = phase_assignment(cfg.member_count,
                                        FamilyTag{Family::B, HalfInteger::from_integer(2)});
        const bool b_ok = std::holds_alternative<PhaseAssignment>(b) &&
                          assignment_is_valid(std::get<PhaseAssignment>(b).zetas, Family::B);
        report.checks.push_back(make_check(
            "B family: " + std::to_string(cfg.member_count) + " members respond in phase", 1.0,
            b_ok ? 1.0 : 0.0, 0.0));
        report.results["assignment.B"] = to_json(b);

        const auto f2 =
            phase_assignment(2, FamilyTag{Family::F, HalfInteger::from_half_units(1)});
        const bool f2_ok = std::holds_alternative<PhaseAssignment>(f2) &&
                           assignment_is_valid(std::get<PhaseAssignment>(f2).zetas, Family::F);
        report.checks.push_back(
            make_check("F family: two members pair in antiphase", 1.0, f2_ok ? 1.0 : 0.0, 0.0));

        const auto f3 =
            phase_assignment(3, FamilyTag{Family::F, HalfInteger::from_half_units(9)});
        report.checks.push_back(make_check(
            "F family: three members are infeasible", 1.0,
            std::holds_alternative<AntiphaseInfeasibility>(f3) ? 1.0 : 0.0, 0.0));
        report.results["assignment.F3"] = to_json(f3);

        // Exhaustive validation of the parity certificate for |zeta| <= 9/2.
        bool any_triple = false;
        std::vector<HalfInteger> candidates;
        for (int h = -9; h <= 9; h += 2) candidates.push_back(HalfInteger::from_half_units(h));
        for (std::size_t i = 0; i < candidates.size(); ++i)
            for (std::size_t j = i + 1; j < candidates.size(); ++j)
                for (std::size_t k = j + 1; k < candidates.size(); ++k)
                    if (assignment_is_valid({candidates[i], candidates[j], candidates[k]},
                                            Family::F))
                        any_triple = true;
        report.checks.push_back(make_check(
            "exhaustive search over |zeta| <= 9/2 confirms the certificate", 0.0,
            any_triple ? 1.0 : 0.0, 0.0));
    }

    report.trace.columns = {"check", "pass"};
    for (std::size_t i = 0; i < report.checks.size(); ++i)
        report.trace.rows.push_back(
            {static_cast<double>(i), report.checks[i].pass ? 1.0 : 0.0});
    return report;
}

}  // namespace zpflab
