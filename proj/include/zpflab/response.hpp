#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "zpflab/field_modes.hpp"
#include "zpflab/half_integer.hpp"

namespace zpflab {

/// Mechanical skeleton: stationary-state energies plus mass and hbar,
/// defining the transition frequencies.
class LevelSystem {
  public:
    LevelSystem(std::vector<double> energies, double mass, double hbar)
        : energies_(std::move(energies)), mass_(mass), hbar_(hbar) {
        if (energies_.size() < 2)
            throw std::invalid_argument("LevelSystem: need at least two levels");
        for (std::size_t i = 1; i < energies_.size(); ++i)
            if (!(energies_[i] > energies_[i - 1]))
                throw std::invalid_argument("LevelSystem: energies must be strictly increasing");
        if (!(mass_ > 0.0)) throw std::invalid_argument("LevelSystem: mass must be positive");
        if (!(hbar_ > 0.0)) throw std::invalid_argument("LevelSystem: hbar must be positive");
    }

    int dim() const { return static_cast<int>(energies_.size()); }
    double energy(int n) const { return energies_.at(static_cast<std::size_t>(n)); }
    const std::vector<double>& energies() const { return energies_; }
    double mass() const { return mass_; }
    double hbar() const { return hbar_; }

    /// Transition frequency omega_kn = (E_k - E_n) / hbar, antisymmetric
    /// in its indices. hbar * omega_kn is the energy the field exchanges
    /// with the particle in the k<->n transition.
    double omega(int k, int n) const { return (energy(k) - energy(n)) / hbar_; }

  private:
    std::vector<double> energies_;
    double mass_;
    double hbar_;
};

/// Hermitian matrix of response amplitudes: entry (n,k) is the amplitude
/// of the particle's linear resonant response to the mode driving the
/// n<->k transition; the diagonal holds the stationary mean values.
class ResponseMatrix {
  public:
    explicit ResponseMatrix(Eigen::MatrixXcd entries) : m_(std::move(entries)) {
        if (m_.rows() != m_.cols())
            throw std::invalid_argument("ResponseMatrix: matrix must be square");
        if (m_.rows() < 2) throw std::invalid_argument("ResponseMatrix: dimension must be >= 2");
        const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
        if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
            throw std::invalid_argument("ResponseMatrix: matrix must be Hermitian");
    }

    static ResponseMatrix zero(int dim) {
        return ResponseMatrix(Eigen::MatrixXcd::Zero(dim, dim));
    }

    int dim() const { return static_cast<int>(m_.rows()); }
    Complex entry(int n, int k) const { return m_(n, k); }
    const Eigen::MatrixXcd& matrix() const { return m_; }

    bool is_diagonal() const {
        for (int n = 0; n < dim(); ++n)
            for (int k = 0; k < dim(); ++k)
                if (n != k && m_(n, k) != 0.0) return false;
        return true;
    }

  private:
    Eigen::MatrixXcd m_;
};

/// Truncated one-dimensional harmonic oscillator: the standard concrete
/// system for exercising the sum rules and bracket identities.
struct OscillatorModel {
    LevelSystem system;
    ResponseMatrix position;
};

/// E_n = hbar w0 (n + 1/2); x couples adjacent levels with
/// x_{n,n+1} = sqrt((n+1) hbar / (2 m w0)).
inline OscillatorModel harmonic_oscillator(int dim, double mass, double omega0, double hbar) {
    if (dim < 2) throw std::invalid_argument("harmonic_oscillator: dimension must be >= 2");
    if (!(omega0 > 0.0)) throw std::invalid_argument("harmonic_oscillator: omega0 must be positive");
    std::vector<double> energies(static_cast<std::size_t>(dim));
    for (int n = 0; n < dim; ++n) energies[static_cast<std::size_t>(n)] = hbar * omega0 * (n + 0.5);
    Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(dim, dim);
    for (int n = 0; n + 1 < dim; ++n) {
        const double v = std::sqrt((n + 1) * hbar / (2.0 * mass * omega0));
        x(n, n + 1) = v;
        x(n + 1, n) = v;
    }
    return OscillatorModel{LevelSystem(std::move(energies), mass, hbar), ResponseMatrix(x)};
}

/// p_nk = -i m omega_kn x_nk (the response expansion of p = m dx/dt).
inline ResponseMatrix momentum_matrix(const ResponseMatrix& x, const LevelSystem& sys) {
    if (x.dim() != sys.dim())
        throw std::invalid_argument("momentum_matrix: dimension mismatch");
    Eigen::MatrixXcd p(x.dim(), x.dim());
    for (int n = 0; n < x.dim(); ++n)
        for (int k = 0; k < x.dim(); ++k)
            p(n, k) = Complex(0.0, -1.0) * sys.mass() * sys.omega(k, n) * x.entry(n, k);
    return ResponseMatrix(std::move(p));
}

/// One particle's resonant response: its level system, response
/// amplitudes, response-phase parameter zeta, and which slot (1 or 2)
/// it occupies in a bipartite system. Particle 2 carries the conjugate
/// phase factor exp(-i pi zeta) on its positive-frequency component, so
/// that the relative phase of a shared-mode response is pi(zeta1 - zeta2).
struct ParticleResponse {
    LevelSystem system;
    ResponseMatrix matrix;
    HalfInteger zeta = HalfInteger::from_integer(0);
    int label = 1;

    ParticleResponse(LevelSystem sys, ResponseMatrix m,
                     HalfInteger z = HalfInteger::from_integer(0), int lbl = 1)
        : system(std::move(sys)), matrix(std::move(m)), zeta(z), label(lbl) {
        if (matrix.dim() != system.dim())
            throw std::invalid_argument("ParticleResponse: dimension mismatch");
        if (label != 1 && label != 2)
            throw std::invalid_argument("ParticleResponse: label must be 1 or 2");
    }

    Complex phase_factor() const {
        const double sign = label == 2 ? -1.0 : 1.0;
        return std::polar(1.0, sign * std::numbers::pi * zeta.value());
    }
};

namespace detail {

/// Override slot for finite-difference probes of the response.
///  - Ordered: the pair (anchor, partner) is a formal variable of its own;
///    a particle anchored elsewhere never sees it. This is the pairing
///    under which modes of different stationary states are independent.
///  - Physical: the mode is one shared variable in the orientation of the
///    override key; a reversed read picks up the conjugate. This is the
///    pairing for two particles responding to one and the same field.
enum class SlotPairing { Ordered, Physical };

struct ModeOverride {
    SlotPairing pairing;
    ModeKey key;  // the orientation in which the variable is differentiated
    Complex value;
};

inline std::optional<Complex> override_read(const ModeOverride* ov, int n, int k) {
    if (ov == nullptr) return std::nullopt;
    if (ov->pairing == SlotPairing::Ordered) {
        if (ov->key.from == n && ov->key.to == k) return ov->value;
        return std::nullopt;
    }
    if (ModeKey(n, k).canonical() != ov->key.canonical()) return std::nullopt;
    return (ov->key.from == n && ov->key.to == k) ? ov->value : std::conj(ov->value);
}

/// Positive-frequency half of the response of `pr` in state n:
/// f_nn + exp(+-i pi zeta) sum_k f_nk a_nk exp(-i omega_kn t).
/// The physical response is this plus the conjugate of its oscillating
/// part. Zero response amplitudes do not require a mode in `r`.
inline Complex response_signal_impl(const ParticleResponse& pr, int n, const FieldRealization& r,
                                    double t, const ModeOverride* ov) {
    const int d = pr.matrix.dim();
    if (n < 0 || n >= d) throw std::out_of_range("response: level out of range");
    Complex sum = 0.0;
    for (int k = 0; k < d; ++k) {
        if (k == n) continue;
        const Complex amp = pr.matrix.entry(n, k);
        if (amp == 0.0) continue;
        Complex a;
        if (auto v = override_read(ov, n, k))
            a = *v;
        else
            a = r.normal_variable(n, k);
        sum += amp * a * std::polar(1.0, -pr.system.omega(k, n) * t);
    }
    return pr.matrix.entry(n, n) + pr.phase_factor() * sum;
}

}  // namespace detail

/// Complex response signal (mean value plus positive-frequency part).
inline Complex response_signal(const ParticleResponse& pr, int n, const FieldRealization& r,
                               double t) {
    return detail::response_signal_impl(pr, n, r, t, nullptr);
}

/// Real response x_n(t) = x_nn + exp(+-i pi zeta) sum_k x_nk a_nk e^{-i omega_kn t} + c.c.
/// The two halves are evaluated independently and the imaginary residue
/// must cancel to <= 1e-12 before it is discarded.
inline double evaluate_response(const ParticleResponse& pr, int n, const FieldRealization& r,
                                double t) {
    const Complex s = response_signal(pr, n, r, t);
    const Complex osc = s - pr.matrix.entry(n, n);
    const Complex value = pr.matrix.entry(n, n) + osc + std::conj(osc);
    if (std::abs(value.imag()) > 1e-12)
        throw std::runtime_error("evaluate_response: imaginary residue exceeds 1e-12");
    return value.real();
}

namespace detail {

/// Wirtinger derivative d/da = (d/dRe - i d/dIm)/2 of a real-valued
/// probe by central differences around the realization's value.
template <typename Probe>
Complex wirtinger_derivative(Probe&& probe, SlotPairing pairing, const ModeKey& key, Complex a0,
                             double h) {
    auto eval = [&](Complex a) {
        ModeOverride ov{pairing, key, a};
        return probe(&ov);
    };
    const double d_re = (eval(a0 + Complex(h, 0.0)) - eval(a0 - Complex(h, 0.0))) / (2.0 * h);
    const double d_im = (eval(a0 + Complex(0.0, h)) - eval(a0 - Complex(0.0, h))) / (2.0 * h);
    return 0.5 * Complex(d_re, -d_im);
}

}  // namespace detail

/// Poisson bracket of two responses with respect to the normal variables,
/// by central finite differences on the quadratures of each a_nk:
///     sum_k (df/da_nk dg/da*_nk - dg/da_nk df/da*_nk).
///
/// For two responses of the same particle (equal labels) the variables of
/// different anchor states are formally independent, so the bracket
/// vanishes for n != nprime. For responses of distinct particles the
/// canonical field modes are shared, and the derivative runs over the
/// union of both particles' mode sets.
inline Complex poisson_bracket_numeric(const ParticleResponse& f, const ParticleResponse& g,
                                       int n, int nprime, const FieldRealization& r,
                                       double step = 1e-5, double t = 0.0) {
    if (!(step > 0.0)) throw std::invalid_argument("poisson_bracket_numeric: step must be > 0");
    const bool shared = f.label != g.label;
    const auto pairing = shared ? detail::SlotPairing::Physical : detail::SlotPairing::Ordered;

    auto probe_f = [&](const detail::ModeOverride* ov) {
        const Complex s = detail::response_signal_impl(f, n, r, t, ov);
        const Complex osc = s - f.matrix.entry(n, n);
        return (f.matrix.entry(n, n) + osc + std::conj(osc)).real();
    };
    auto probe_g = [&](const detail::ModeOverride* ov) {
        const Complex s = detail::response_signal_impl(g, nprime, r, t, ov);
        const Complex osc = s - g.matrix.entry(nprime, nprime);
        return (g.matrix.entry(nprime, nprime) + osc + std::conj(osc)).real();
    };

    // Differentiation variables: the modes f reads from state n, in f's
    // orientation, plus (shared field only) the modes only g reads from
    // state nprime. Derivatives are taken in the stored orientation.
    std::vector<ModeKey> keys;
    auto add_modes = [&](const ParticleResponse& pr, int anchor) {
        for (int k = 0; k < pr.matrix.dim(); ++k) {
            if (k == anchor || pr.matrix.entry(anchor, k) == 0.0) continue;
            const ModeKey key(anchor, k);
            const bool present =
                std::any_of(keys.begin(), keys.end(), [&](const ModeKey& existing) {
                    return shared ? existing.canonical() == key.canonical() : existing == key;
                });
            if (!present) keys.push_back(key);
        }
    };
    add_modes(f, n);
    if (shared) add_modes(g, nprime);

    Complex bracket = 0.0;
    for (const ModeKey& key : keys) {
        const Complex a0 = r.normal_variable(key.from, key.to);
        const Complex df = detail::wirtinger_derivative(probe_f, pairing, key, a0, step);
        const Complex dg = detail::wirtinger_derivative(probe_g, pairing, key, a0, step);
        // For real probes d/da* = conj(d/da).
        bracket += df * std::conj(dg) - dg * std::conj(df);
    }
    return bracket;
}

/// 2m sum_{k != n} omega_kn |x_nk|^2. Equals hbar on every level whose
/// upward coupling survives the truncation; the identity is the matrix
/// form of the canonical bracket.
inline double trk_sum(const ResponseMatrix& x, const LevelSystem& sys, int n) {
    if (x.dim() != sys.dim()) throw std::invalid_argument("trk_sum: dimension mismatch");
    if (n < 0 || n >= x.dim()) throw std::out_of_range("trk_sum: level out of range");
    double sum = 0.0;
    for (int k = 0; k < x.dim(); ++k) {
        if (k == n) continue;
        sum += sys.omega(k, n) * std::norm(x.entry(n, k));
    }
    return 2.0 * sys.mass() * sum;
}

inline Eigen::MatrixXcd commutator(const ResponseMatrix& a, const ResponseMatrix& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("commutator: dimension mismatch");
    return a.matrix() * b.matrix() - b.matrix() * a.matrix();
}

/// max |([x,H]/(i hbar) - p/m)_nk| over the interior block, with H
/// diagonal in the energy basis (H_nn = E_n).
struct HeisenbergResidual {
    double max_residual = 0.0;
    bool empty_interior = false;  // set when the truncated ladder has no interior levels
};

inline HeisenbergResidual heisenberg_residual(const ResponseMatrix& x, const ResponseMatrix& p,
                                              const LevelSystem& sys) {
    if (x.dim() != p.dim() || x.dim() != sys.dim())
        throw std::invalid_argument("heisenberg_residual: dimension mismatch");
    const int d = x.dim();
    const int interior = d - 2;  // levels 0 .. d-3
    if (interior <= 0) return HeisenbergResidual{0.0, true};

    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(d, d);
    for (int n = 0; n < d; ++n) h(n, n) = sys.energy(n);
    const Eigen::MatrixXcd lhs =
        (x.matrix() * h - h * x.matrix()) / Complex(0.0, sys.hbar());
    const Eigen::MatrixXcd rhs = p.matrix() / sys.mass();
    const double res =
        (lhs - rhs).topLeftCorner(interior, interior).cwiseAbs().maxCoeff();
    return HeisenbergResidual{res, false};
}

}  // namespace zpflab
