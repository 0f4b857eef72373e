#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "zpflab/covariance.hpp"
#include "zpflab/half_integer.hpp"

namespace zpflab {

/// Internal-rotation quantum number gamma, in exact half-units of hbar.
using SpinLabel = HalfInteger;

/// One particle's level and spin labels.
struct SpinBranch {
    int level = 0;
    SpinLabel gamma;
    friend bool operator==(const SpinBranch&, const SpinBranch&) = default;
};

/// Bipartite state with level and spin labels on both branches:
///   amp_c |n gamma_n>_1 |m gamma_m>_2 + amp_d |m gamma_m>_1 |n gamma_n>_2,
/// where the amplitudes carry the internal-rotation factors exp(-i gamma phi).
class CompleteState {
  public:
    CompleteState(SpinBranch first, SpinBranch second, Complex amp_c, Complex amp_d,
                  double rotation = 0.0)
        : first_(first), second_(second), amp_c_(amp_c), amp_d_(amp_d), rotation_(rotation) {}

    const SpinBranch& first() const { return first_; }
    const SpinBranch& second() const { return second_; }
    Complex amp_c() const { return amp_c_; }
    Complex amp_d() const { return amp_d_; }
    double rotation() const { return rotation_; }

    /// Amplitudes keyed by (level1, gamma1, level2, gamma2); coinciding
    /// branches merge.
    std::map<std::tuple<int, int, int, int>, Complex> amplitude_map() const {
        std::map<std::tuple<int, int, int, int>, Complex> amps;
        amps[{first_.level, first_.gamma.half_units(), second_.level,
              second_.gamma.half_units()}] += amp_c_;
        amps[{second_.level, second_.gamma.half_units(), first_.level,
              first_.gamma.half_units()}] += amp_d_;
        return amps;
    }

  private:
    SpinBranch first_, second_;
    Complex amp_c_, amp_d_;
    double rotation_;
};

/// Normalized complete state (1/sqrt(2))[|n gn>|m gm> + (-1)^zeta |m gm>|n gn>]
/// with the rotation factor exp(-i (gn + gm) phi) carried on both branches.
/// With equal level labels and distinct spins this is the factorized
/// spin-entangled form; equal level and spin labels with odd zeta
/// antisymmetrize to the zero vector and are rejected.
inline CompleteState build_complete_state(int n, SpinLabel gamma_n, int m, SpinLabel gamma_m,
                                          PhaseParameter zeta, double phi = 0.0) {
    if (!zeta.is_integer())
        throw std::invalid_argument("build_complete_state: zeta must be an integer");
    if (n < 0 || m < 0) throw std::out_of_range("build_complete_state: negative level");
    const int sign = parity_sign(zeta);
    if (n == m && gamma_n == gamma_m) {
        if (sign < 0)
            throw std::invalid_argument(
                "build_complete_state: identical labels antisymmetrize to the zero vector");
        // Both branches coincide; the normalized state is the plain product.
        return CompleteState(SpinBranch{n, gamma_n}, SpinBranch{m, gamma_m},
                             Complex(0.5, 0.0), Complex(0.5, 0.0), phi);
    }
    const Complex rot = std::polar(1.0, -(gamma_n.value() + gamma_m.value()) * phi);
    const Complex amp = rot / std::numbers::sqrt2;
    return CompleteState(SpinBranch{n, gamma_n}, SpinBranch{m, gamma_m}, amp,
                         static_cast<double>(sign) * amp, phi);
}

/// Exchange multiplier (-1)^zeta (-1)^(2 gamma_n), by exact parity on
/// (zeta + 2 gamma_n); identical for both exchange directions.
inline int exchange_factor(PhaseParameter zeta, SpinLabel gamma_n) {
    if (!zeta.is_integer())
        throw std::invalid_argument("exchange_factor: zeta must be an integer");
    const int parity = (zeta.as_integer() + gamma_n.half_units()) % 2;
    return parity == 0 ? 1 : -1;
}

enum class ZetaParity { even, odd };

/// Parity of zeta forced by (-1)^zeta (-1)^(2 gamma) = 1: odd for
/// half-odd-integer spin (antisymmetric energy states), even for integer.
inline ZetaParity required_zeta_parity(SpinLabel gamma) {
    return gamma.half_units() % 2 != 0 ? ZetaParity::odd : ZetaParity::even;
}

/// Which particle's azimuth picks up the 2 pi shift under exchange.
enum class ExchangeDirection { forward, reverse };

/// Brute-force exchange: swap the branch labels between the particles and
/// rotate the shifted particle's internal angle by a full turn. Kept as an
/// independent route against the algebraic factor of exchange_factor.
inline CompleteState apply_exchange(const CompleteState& state, ExchangeDirection dir) {
    const auto turn = [](SpinLabel gamma) {
        return std::polar(1.0, -2.0 * std::numbers::pi * gamma.value());
    };
    const SpinLabel gf = state.first().gamma;
    const SpinLabel gs = state.second().gamma;
    const Complex new_c =
        state.amp_d() * (dir == ExchangeDirection::forward ? turn(gf) : turn(gs));
    const Complex new_d =
        state.amp_c() * (dir == ExchangeDirection::forward ? turn(gs) : turn(gf));
    return CompleteState(state.first(), state.second(), new_c, new_d, state.rotation());
}

enum class SwapParity { symmetric, antisymmetric, not_eigenstate };

inline int to_sign(SwapParity p) {
    if (p == SwapParity::symmetric) return 1;
    if (p == SwapParity::antisymmetric) return -1;
    throw std::domain_error("to_sign: not an exchange eigenstate");
}

/// Applies label exchange to both the level and spin slots and compares
/// with +/- the original amplitudes.
inline SwapParity swap_parity(const CompleteState& state, double tol = 1e-12) {
    const auto amps = state.amplitude_map();
    double norm = 0.0;
    for (const auto& [key, a] : amps) norm += std::norm(a);
    if (norm < tol) return SwapParity::not_eigenstate;

    for (const int sign : {1, -1}) {
        bool match = true;
        for (const auto& [key, a] : amps) {
            const auto [n1, g1, n2, g2] = key;
            const auto it = amps.find({n2, g2, n1, g1});
            const Complex swapped = it == amps.end() ? Complex(0.0) : it->second;
            if (std::abs(swapped - static_cast<double>(sign) * a) > tol) {
                match = false;
                break;
            }
        }
        if (match) return sign > 0 ? SwapParity::symmetric : SwapParity::antisymmetric;
    }
    return SwapParity::not_eigenstate;
}

/// Partial phase average in one configuration with the internal-rotation
/// factors attached (gamma_nm = gamma_n - gamma_m):
///   C: f_nn g_mm + (-1)^zeta f_nm e^{i gamma_nm phi} g_mn e^{i gamma_mn phi},
/// and with n, m swapped for D. The two rotation exponents are conjugate,
/// so their product drops out of the full average.
inline Complex spin_config_average(const ObservablePair& obs, int n, int m, PhaseParameter zeta,
                                   SpinLabel gamma_n, SpinLabel gamma_m, double phi,
                                   Configuration cfg) {
    if (n == m) throw std::invalid_argument("spin_config_average: levels must differ");
    if (!zeta.is_integer())
        throw std::invalid_argument("spin_config_average: zeta must be an integer");
    const double gamma_nm = gamma_n.value() - gamma_m.value();
    const Complex rot_nm = std::polar(1.0, gamma_nm * phi);
    const Complex rot_mn = std::polar(1.0, -gamma_nm * phi);
    const double sign = parity_sign(zeta);
    if (cfg == Configuration::C)
        return obs.f.entry(n, n) * obs.g.entry(m, m) +
               sign * obs.f.entry(n, m) * rot_nm * obs.g.entry(m, n) * rot_mn;
    return obs.f.entry(m, m) * obs.g.entry(n, n) +
           sign * obs.f.entry(m, n) * rot_mn * obs.g.entry(n, m) * rot_nm;
}

/// Covariance over the spin-augmented state: the C and D partial averages
/// are conjugates, so the result is real and equal to the spinless
/// covariance for every rotation angle.
inline double spin_covariance(const ObservablePair& obs, int n, int m, PhaseParameter zeta,
                              SpinLabel gamma_n, SpinLabel gamma_m, double phi) {
    const Complex avg_c = spin_config_average(obs, n, m, zeta, gamma_n, gamma_m, phi,
                                              Configuration::C);
    const Complex avg_d = spin_config_average(obs, n, m, zeta, gamma_n, gamma_m, phi,
                                              Configuration::D);
    const double mean_fg = detail::real_checked(0.5 * (avg_c + avg_d), "spin_covariance");
    const double fbar =
        detail::real_checked(0.5 * (obs.f.entry(n, n) + obs.f.entry(m, m)), "spin_covariance");
    const double gbar =
        detail::real_checked(0.5 * (obs.g.entry(n, n) + obs.g.entry(m, m)), "spin_covariance");
    return mean_fg - fbar * gbar;
}

/// Quantum covariance of f (x) g over a complete state.
///
/// In the spin-augmented description the observables carry the
/// internal-rotation factors: the element connecting the paired labels
/// (n, gamma_n) and (k, gamma_k) is f_nk exp(i (gamma_n - gamma_k) phi),
/// with the spin label riding along with the level label. For distinct
/// levels this is a rotated operator on the level space; the rotation
/// exponents cancel pairwise, which is how the quantum term survives for
/// distinct spins. For equal levels the spins span orthogonal slots and
/// the observables act on the level slot alone.
inline double quantum_covariance(const ObservablePair& obs, const CompleteState& state) {
    const int d = obs.dim();
    const SpinBranch& first = state.first();
    const SpinBranch& second = state.second();
    if (first.level >= d || second.level >= d)
        throw std::out_of_range("quantum_covariance: state level out of range");

    if (first.level != second.level) {
        const double phi = state.rotation();
        const auto gamma_of = [&](int level) {
            if (level == first.level) return first.gamma.value();
            if (level == second.level) return second.gamma.value();
            return 0.0;
        };
        const auto rotate = [&](const Eigen::MatrixXcd& a) {
            Eigen::MatrixXcd out(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    out(i, j) = a(i, j) * std::polar(1.0, (gamma_of(i) - gamma_of(j)) * phi);
            return out;
        };
        Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(d) * d);
        for (const auto& [key, a] : state.amplitude_map()) {
            const auto [n1, g1, n2, g2] = key;
            (void)g1;
            (void)g2;
            psi(static_cast<Eigen::Index>(n1) * d + n2) += a;
        }
        const double norm = psi.norm();
        if (norm < 1e-12) throw std::invalid_argument("quantum_covariance: zero state vector");
        psi /= norm;
        const ObservablePair rotated(ResponseMatrix(rotate(obs.f.matrix())),
                                     ResponseMatrix(rotate(obs.g.matrix())));
        return quantum_covariance(rotated, psi);
    }

    // Equal levels: spin degeneracy spans orthogonal slots.
    std::vector<int> spins = {first.gamma.half_units()};
    if (second.gamma.half_units() != spins[0]) spins.push_back(second.gamma.half_units());
    std::sort(spins.begin(), spins.end());
    const int ns = static_cast<int>(spins.size());
    const auto spin_index = [&](int half_units) {
        return static_cast<int>(std::find(spins.begin(), spins.end(), half_units) -
                                spins.begin());
    };
    const int dd = d * ns;
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dd) * dd);
    for (const auto& [key, a] : state.amplitude_map()) {
        const auto [n1, g1, n2, g2] = key;
        const int i = n1 * ns + spin_index(g1);
        const int j = n2 * ns + spin_index(g2);
        psi(static_cast<Eigen::Index>(i) * dd + j) = a;
    }
    const double norm = psi.norm();
    if (norm < 1e-12) throw std::invalid_argument("quantum_covariance: zero state vector");
    psi /= norm;
    const auto lift = [&](const Eigen::MatrixXcd& a) {
        Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dd, dd);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int s = 0; s < ns; ++s) out(i * ns + s, j * ns + s) = a(i, j);
        return out;
    };
    const ObservablePair lifted(ResponseMatrix(lift(obs.f.matrix())),
                                ResponseMatrix(lift(obs.g.matrix())));
    return quantum_covariance(lifted, psi);
}

/// Feasible spin tuples for k particles sharing an energy state, where
/// pairing through a circularly polarized mode requires |gamma_i - gamma_j| = 1.
struct PauliWitness {
    PhaseParameter upsilon;
    int k = 0;
    std::vector<std::vector<SpinLabel>> tuples;
};

/// Exhaustive refutation: for every admissible pair, each candidate third
/// spin fails at least one unit-gap constraint (it differs from one of the
/// pair by an even number).
struct PauliCertificate {
    PhaseParameter upsilon;
    int k = 0;
    struct ThirdSpinFailure {
        SpinLabel gamma1, gamma2, gamma3;
        bool unit_gap_to_first = false;
        bool unit_gap_to_second = false;
    };
    std::vector<ThirdSpinFailure> failures;
    std::string note;
};

/// Integer-spin families respond in phase; the antiphase pairing condition
/// does not apply to them.
struct PauliNotApplicable {
    PhaseParameter upsilon;
};

using PauliResult = std::variant<PauliWitness, PauliCertificate, PauliNotApplicable>;

inline std::vector<SpinLabel> spin_range(PhaseParameter upsilon) {
    std::vector<SpinLabel> out;
    for (int h = -upsilon.half_units(); h <= upsilon.half_units(); h += 2)
        out.push_back(SpinLabel::from_half_units(h));
    return out;
}

inline bool unit_gap(SpinLabel a, SpinLabel b) { return (a - b).abs().half_units() == 2; }

/// Exhaustive search over k-subsets of {-Upsilon, ..., Upsilon} for
/// pairwise |gamma_i - gamma_j| = 1. Returns every witness tuple, or a
/// certificate naming the failing constraint for each candidate third spin.
inline PauliResult pauli_feasibility(PhaseParameter upsilon, int k) {
    if (upsilon.is_negative())
        throw std::invalid_argument("pauli_feasibility: Upsilon must be >= 1/2");
    if (k < 1) throw std::invalid_argument("pauli_feasibility: k must be >= 1");
    if (upsilon.is_integer()) return PauliNotApplicable{upsilon};

    const std::vector<SpinLabel> candidates = spin_range(upsilon);
    std::vector<std::vector<SpinLabel>> witnesses;
    std::vector<SpinLabel> current;
    const auto search = [&](auto&& self, std::size_t start) -> void {
        if (static_cast<int>(current.size()) == k) {
            witnesses.push_back(current);
            return;
        }
        for (std::size_t i = start; i < candidates.size(); ++i) {
            const bool compatible = std::all_of(current.begin(), current.end(),
                                                [&](SpinLabel g) { return unit_gap(g, candidates[i]); });
            if (!compatible) continue;
            current.push_back(candidates[i]);
            self(self, i + 1);
            current.pop_back();
        }
    };
    search(search, 0);
    if (!witnesses.empty()) return PauliWitness{upsilon, k, std::move(witnesses)};

    PauliCertificate cert;
    cert.upsilon = upsilon;
    cert.k = k;
    cert.note =
        "two half-integer spins with |gamma_1 - gamma_2| = 1 leave every remaining gamma_3 "
        "an even distance from gamma_1 or gamma_2, so no third particle can pair with both";
    for (std::size_t i = 0; i < candidates.size(); ++i)
        for (std::size_t j = i + 1; j < candidates.size(); ++j) {
            if (!unit_gap(candidates[i], candidates[j])) continue;
            for (const SpinLabel& third : candidates) {
                if (third == candidates[i] || third == candidates[j]) continue;
                cert.failures.push_back(PauliCertificate::ThirdSpinFailure{
                    candidates[i], candidates[j], third, unit_gap(third, candidates[i]),
                    unit_gap(third, candidates[j])});
            }
        }
    return cert;
}

}  // namespace zpflab
