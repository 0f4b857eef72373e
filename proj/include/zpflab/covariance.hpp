#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "zpflab/bipartite.hpp"
#include "zpflab/field_modes.hpp"
#include "zpflab/half_integer.hpp"
#include "zpflab/response.hpp"

namespace zpflab {

/// Two generic dynamical variables, f for particle 1 and g for particle 2.
/// The diagonals carry the stationary mean values.
struct ObservablePair {
    ResponseMatrix f;
    ResponseMatrix g;

    ObservablePair(ResponseMatrix f_, ResponseMatrix g_) : f(std::move(f_)), g(std::move(g_)) {
        if (f.dim() != g.dim()) throw std::invalid_argument("ObservablePair: dimension mismatch");
    }
    int dim() const { return f.dim(); }
};

/// The two degenerate assignments of the occupied levels (n, m) to the
/// particles (1, 2): C puts particle 1 in n, D swaps.
enum class Configuration { C, D };

namespace detail {

inline double real_checked(Complex z, const char* what, double tol = 1e-10) {
    if (std::abs(z.imag()) > tol)
        throw std::runtime_error(std::string(what) + ": imaginary residue " +
                                 std::to_string(z.imag()) + " exceeds tolerance");
    return z.real();
}

}  // namespace detail

/// Phase average of f1 g2 in one configuration:
///   <fg>^C = f_nn g_mm + (-1)^zeta (f_nm g_mn + f_mn g_nm)/2,
/// and with n, m swapped for D. Only the shared mode (nm) survives the
/// pairing of the normal variables; the conjugate contribution makes the
/// result real.
inline double config_average(const ObservablePair& obs, int n, int m, PhaseParameter zeta,
                             Configuration cfg) {
    if (n == m) throw std::invalid_argument("config_average: levels must differ");
    if (!zeta.is_integer()) throw std::invalid_argument("config_average: zeta must be an integer");
    if (n < 0 || n >= obs.dim() || m < 0 || m >= obs.dim())
        throw std::out_of_range("config_average: level out of range");
    const int a = cfg == Configuration::C ? n : m;
    const int b = cfg == Configuration::C ? m : n;
    const Complex diag = obs.f.entry(a, a) * obs.g.entry(b, b);
    const Complex cross =
        0.5 * (obs.f.entry(a, b) * obs.g.entry(b, a) + obs.f.entry(b, a) * obs.g.entry(a, b));
    return detail::real_checked(diag + static_cast<double>(parity_sign(zeta)) * cross,
                                "config_average");
}

/// Closed-form field-induced covariance over the equally weighted C and D
/// configurations:
///   Gamma = (avg_C + avg_D)/2 - fbar gbar
///         = -1/4 (f_nn - f_mm)(g_nn - g_mm)
///           + 1/2 (-1)^zeta (f_nm g_mn + f_mn g_nm).
/// The first term is a classical covariance of the mean values under
/// degeneracy; the second exists only when both matrices connect n and m
/// through the shared mode.
inline double analytic_covariance(const ObservablePair& obs, int n, int m, PhaseParameter zeta) {
    const double avg_c = config_average(obs, n, m, zeta, Configuration::C);
    const double avg_d = config_average(obs, n, m, zeta, Configuration::D);
    const double fbar = 0.5 * detail::real_checked(obs.f.entry(n, n) + obs.f.entry(m, m),
                                                   "analytic_covariance: fbar");
    const double gbar = 0.5 * detail::real_checked(obs.g.entry(n, n) + obs.g.entry(m, m),
                                                   "analytic_covariance: gbar");
    return 0.5 * (avg_c + avg_d) - fbar * gbar;
}

/// Particles on independent field realizations: the product average
/// factorizes, so the covariance vanishes identically.
inline double independent_covariance(const ObservablePair&) { return 0.0; }

/// Bipartite state vector (|n>|m> + (-1)^zeta |m>|n>)/sqrt(2) in the
/// product space of the two particles' level spaces.
class EntangledState {
  public:
    EntangledState(int n, int m, int sign) : n_(n), m_(m), sign_(sign) {
        if (n_ == m_)
            throw std::invalid_argument(
                "EntangledState: n == m has no shared transition mode, the state factorizes");
        if (sign_ != 1 && sign_ != -1)
            throw std::invalid_argument("EntangledState: sign must be +1 or -1");
        if (n_ < 0 || m_ < 0) throw std::out_of_range("EntangledState: negative level");
    }

    int n() const { return n_; }
    int m() const { return m_; }
    int sign() const { return sign_; }

    /// Amplitudes in the dim^2 product basis |i>_1 |j>_2, row-major.
    Eigen::VectorXcd vector(int dim) const {
        if (n_ >= dim || m_ >= dim) throw std::out_of_range("EntangledState: level out of range");
        Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim * dim);
        const double amp = 1.0 / std::numbers::sqrt2;
        psi(n_ * dim + m_) = amp;
        psi(m_ * dim + n_) = sign_ * amp;
        return psi;
    }

  private:
    int n_, m_, sign_;
};

inline EntangledState build_entangled_state(int n, int m, PhaseParameter zeta) {
    if (!zeta.is_integer())
        throw std::invalid_argument("build_entangled_state: zeta must be an integer");
    return EntangledState(n, m, parity_sign(zeta));
}

/// <psi|f (x) g|psi> - <psi|f (x) 1|psi><psi|1 (x) g|psi> for an arbitrary
/// normalized product-space state vector.
inline double quantum_covariance(const ObservablePair& obs, const Eigen::VectorXcd& psi) {
    const int d = obs.dim();
    if (psi.size() != static_cast<Eigen::Index>(d) * d)
        throw std::invalid_argument("quantum_covariance: state dimension mismatch");
    const double norm2 = psi.squaredNorm();
    if (std::abs(norm2 - 1.0) > 1e-9)
        throw std::invalid_argument("quantum_covariance: state is not normalized");

    // psi as a d x d coefficient matrix C_ij = <i j|psi>; then
    // <f (x) g> = tr(C^dag f C g^T).
    Eigen::MatrixXcd c(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) c(i, j) = psi(i * d + j);
    const Complex fg =
        (c.adjoint() * obs.f.matrix() * c * obs.g.matrix().transpose()).trace();
    const Complex fe = (c.adjoint() * obs.f.matrix() * c).trace();
    const Complex ge = (c * obs.g.matrix().transpose() * c.adjoint()).trace();
    return detail::real_checked(fg, "quantum_covariance: <fg>") -
           detail::real_checked(fe, "quantum_covariance: <f>") *
               detail::real_checked(ge, "quantum_covariance: <g>");
}

inline double quantum_covariance(const ObservablePair& obs, const EntangledState& psi) {
    return quantum_covariance(obs, psi.vector(obs.dim()));
}

/// Running record of a Monte Carlo covariance estimate.
struct ConvergencePoint {
    long samples = 0;
    double estimate = 0.0;
    double standard_error = 0.0;
    double analytic = 0.0;
};

/// Monte Carlo estimate vs. the analytic and quantum oracles.
struct CovarianceReport {
    double estimate = 0.0;
    double standard_error = 0.0;
    long samples = 0;
    double analytic = 0.0;
    double quantum = 0.0;
    std::vector<ConvergencePoint> trace;

    double z_score() const {
        const double diff = std::abs(estimate - analytic);
        if (standard_error == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        return diff / standard_error;
    }
};

struct McOptions {
    double config_weight_c = 0.5;  // override only as a negative control
    bool shared_field = true;      // false: independent realizations per particle
    int batches = 20;
    std::optional<LevelSystem> system;  // defaults to unit-spaced levels
};

/// Monte Carlo covariance over configurations and field realizations.
///
/// Per sample: draw the configuration, one field realization (shared by
/// both particles), and a time in one period of the shared mode; evaluate
/// the two response signals and accumulate Re(f1 g2). The estimate is
/// the plain sample covariance; the standard error comes from 20 batch
/// means of the linearized statistic. Everything is keyed by
/// (seed, sample index), so the result is independent of evaluation order.
inline CovarianceReport mc_covariance(const ObservablePair& obs, int n, int m,
                                      PhaseParameter zeta, long samples, std::uint64_t seed,
                                      const McOptions& options = {}) {
    if (n == m) throw std::invalid_argument("mc_covariance: levels must differ");
    if (!zeta.is_integer()) throw std::invalid_argument("mc_covariance: zeta must be an integer");
    if (samples < 1000) throw std::invalid_argument("mc_covariance: need at least 1000 samples");
    if (n < 0 || n >= obs.dim() || m < 0 || m >= obs.dim())
        throw std::out_of_range("mc_covariance: level out of range");
    const int batches = options.batches;
    if (batches < 2 || samples < batches)
        throw std::invalid_argument("mc_covariance: bad batch count");

    const int d = obs.dim();
    LevelSystem sys = options.system.value_or([&] {
        std::vector<double> energies(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) energies[static_cast<std::size_t>(i)] = i;
        return LevelSystem(std::move(energies), 1.0, 1.0);
    }());
    if (sys.dim() != d) throw std::invalid_argument("mc_covariance: system dimension mismatch");

    const ParticleResponse f1(sys, obs.f, zeta, 1);
    const ParticleResponse g2(sys, obs.g, PhaseParameter::from_integer(0), 2);

    // All modes either particle can read from level n or m.
    std::vector<ModeKey> modes;
    for (int a : {n, m})
        for (int k = 0; k < d; ++k) {
            if (k == a) continue;
            const ModeKey key = ModeKey(a, k).canonical();
            if (std::find(modes.begin(), modes.end(), key) == modes.end()) modes.push_back(key);
        }

    const double period = 2.0 * std::numbers::pi / std::abs(sys.omega(m, n));

    std::vector<double> sum_p(static_cast<std::size_t>(batches), 0.0);
    std::vector<double> sum_f(static_cast<std::size_t>(batches), 0.0);
    std::vector<double> sum_g(static_cast<std::size_t>(batches), 0.0);
    std::vector<long> count(static_cast<std::size_t>(batches), 0);

    for (long j = 0; j < samples; ++j) {
        const std::uint64_t stream = derive_stream(seed, static_cast<std::uint64_t>(j));
        const double u_cfg = detail::uniform01(detail::mix64(stream, 0x3e1cULL));
        const Configuration cfg =
            u_cfg < options.config_weight_c ? Configuration::C : Configuration::D;
        const double t = period * detail::uniform01(detail::mix64(stream, 0x712aULL));

        const FieldRealization shared = sample_realization(modes, detail::mix64(stream, 1));
        const FieldRealization other =
            options.shared_field ? shared : sample_realization(modes, detail::mix64(stream, 2));

        const int level1 = cfg == Configuration::C ? n : m;
        const int level2 = cfg == Configuration::C ? m : n;
        const Complex fs = response_signal(f1, level1, shared, t);
        const Complex gs = response_signal(g2, level2, other, t);

        const std::size_t b = static_cast<std::size_t>((j * batches) / samples);
        sum_p[b] += (fs * gs).real();
        sum_f[b] += fs.real();
        sum_g[b] += gs.real();
        count[b] += 1;
    }

    double total_p = 0.0, total_f = 0.0, total_g = 0.0;
    for (int b = 0; b < batches; ++b) {
        total_p += sum_p[static_cast<std::size_t>(b)];
        total_f += sum_f[static_cast<std::size_t>(b)];
        total_g += sum_g[static_cast<std::size_t>(b)];
    }
    const double ns = static_cast<double>(samples);
    const double mean_f = total_f / ns;
    const double mean_g = total_g / ns;
    const double estimate = total_p / ns - mean_f * mean_g;

    // Batch means of the linearized statistic
    //   P_b - mean_f G_b - mean_g F_b + mean_f mean_g,
    // whose average reproduces the full-sample estimate exactly.
    const double analytic = options.shared_field ? analytic_covariance(obs, n, m, zeta)
                                                 : independent_covariance(obs);
    std::vector<double> batch_stats(static_cast<std::size_t>(batches), 0.0);
    double mean_stat = 0.0;
    for (int b = 0; b < batches; ++b) {
        const double nb = static_cast<double>(count[static_cast<std::size_t>(b)]);
        const double pb = sum_p[static_cast<std::size_t>(b)] / nb;
        const double fb = sum_f[static_cast<std::size_t>(b)] / nb;
        const double gb = sum_g[static_cast<std::size_t>(b)] / nb;
        batch_stats[static_cast<std::size_t>(b)] =
            pb - mean_f * gb - mean_g * fb + mean_f * mean_g;
        mean_stat += batch_stats[static_cast<std::size_t>(b)];
    }
    mean_stat /= batches;
    double var = 0.0;
    for (double s : batch_stats) var += (s - mean_stat) * (s - mean_stat);
    var /= (batches - 1);
    const double se = std::sqrt(var / batches);

    CovarianceReport report;
    report.estimate = estimate;
    report.standard_error = se;
    report.samples = samples;
    report.analytic = analytic;
    report.quantum = quantum_covariance(obs, build_entangled_state(n, m, zeta));

    long running = 0;
    double run_p = 0.0, run_f = 0.0, run_g = 0.0;
    for (int b = 0; b < batches; ++b) {
        running += count[static_cast<std::size_t>(b)];
        run_p += sum_p[static_cast<std::size_t>(b)];
        run_f += sum_f[static_cast<std::size_t>(b)];
        run_g += sum_g[static_cast<std::size_t>(b)];
        const double rn = static_cast<double>(running);
        report.trace.push_back(ConvergencePoint{
            running, run_p / rn - (run_f / rn) * (run_g / rn), se, analytic});
    }
    return report;
}

}  // namespace zpflab
