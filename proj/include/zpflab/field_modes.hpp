#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace zpflab {

using Complex = std::complex<double>;

/// Index pair naming the background-field mode that drives the n<->k
/// transition. (n,k) and (k,n) are the same physical mode; canonical
/// storage keeps from < to and the reversed orientation is read as the
/// complex conjugate.
struct ModeKey {
    int from = 0;
    int to = 0;

    ModeKey() = default;
    ModeKey(int f, int t) : from(f), to(t) {
        if (f == t) throw std::invalid_argument("ModeKey: indices must differ");
        if (f < 0 || t < 0) throw std::invalid_argument("ModeKey: indices must be >= 0");
    }

    ModeKey canonical() const { return from < to ? *this : ModeKey(to, from); }
    bool is_canonical() const { return from < to; }

    friend bool operator==(const ModeKey&, const ModeKey&) = default;
    friend auto operator<=>(const ModeKey&, const ModeKey&) = default;
};

namespace detail {

/// splitmix64 finalizer; the counter-based generator underneath all
/// sampling, so streams depend only on (seed, counter) and never on
/// iteration order or worker count.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) { return mix64(a ^ mix64(b)); }

/// Uniform double in [0,1) from the top 53 bits.
inline double uniform01(std::uint64_t h) {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Sub-stream seed for sample index j of a master seed.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) {
    return detail::mix64(seed, index);
}

/// One draw of the random phases phi_nk, one per canonical mode. The
/// normal variables a_nk = exp(i phi_nk) have unit modulus and obey
/// a_kn = conj(a_nk); the reversed orientation is derived, never stored.
class FieldRealization {
  public:
    FieldRealization() = default;
    FieldRealization(std::map<ModeKey, double> phases, std::uint64_t seed)
        : phases_(std::move(phases)), seed_(seed) {
        for (const auto& [key, phi] : phases_) {
            if (!key.is_canonical())
                throw std::invalid_argument("FieldRealization: non-canonical mode key");
            (void)phi;
        }
    }

    std::uint64_t seed() const { return seed_; }
    const std::map<ModeKey, double>& phases() const { return phases_; }

    bool has_mode(int n, int k) const {
        return phases_.count(ModeKey(n, k).canonical()) != 0;
    }

    double phase(int n, int k) const {
        auto it = phases_.find(ModeKey(n, k).canonical());
        if (it == phases_.end())
            throw std::out_of_range("FieldRealization: missing mode (" + std::to_string(n) +
                                    "," + std::to_string(k) + ")");
        return it->second;
    }

    /// a_nk = exp(i phi_nk); returns the conjugate when (n,k) is the
    /// reversed orientation of the stored canonical key.
    Complex normal_variable(int n, int k) const {
        const ModeKey key(n, k);
        const Complex a = std::polar(1.0, phase(n, k));
        return key.is_canonical() ? a : std::conj(a);
    }

  private:
    std::map<ModeKey, double> phases_;
    std::uint64_t seed_ = 0;
};

/// Draws i.i.d. phases, uniform on [0, 2 pi), one per canonical mode.
/// Deterministic function of (modes, seed).
inline FieldRealization sample_realization(const std::vector<ModeKey>& modes,
                                           std::uint64_t seed) {
    if (modes.empty()) throw std::invalid_argument("sample_realization: empty mode set");
    std::map<ModeKey, double> phases;
    for (const ModeKey& m : modes) {
        const ModeKey c = m.canonical();
        const std::uint64_t tag =
            (static_cast<std::uint64_t>(c.from) << 32) | static_cast<std::uint64_t>(c.to);
        phases[c] = 2.0 * std::numbers::pi * detail::uniform01(detail::mix64(seed, tag));
    }
    return FieldRealization(std::move(phases), seed);
}

/// Canonical field quadratures of one mode.
struct Quadratures {
    double q = 0.0;  // sqrt(action/frequency)
    double p = 0.0;  // sqrt(action*frequency)
};

/// q = sqrt(hbar/2|w|)(a + a*), p = -i sqrt(hbar|w|/2)(a - a*).
/// This transform is where the action scale hbar enters.
inline Quadratures quadratures_from_normal(Complex a, double omega, double hbar) {
    if (omega == 0.0) throw std::domain_error("quadratures_from_normal: omega must be nonzero");
    if (hbar <= 0.0) throw std::domain_error("quadratures_from_normal: hbar must be positive");
    const double w = std::abs(omega);
    return Quadratures{std::sqrt(hbar / (2.0 * w)) * 2.0 * a.real(),
                       std::sqrt(hbar * w / 2.0) * 2.0 * a.imag()};
}

/// Inverse of quadratures_from_normal.
inline Complex normal_from_quadratures(const Quadratures& qp, double omega, double hbar) {
    if (omega == 0.0) throw std::domain_error("normal_from_quadratures: omega must be nonzero");
    if (hbar <= 0.0) throw std::domain_error("normal_from_quadratures: hbar must be positive");
    const double w = std::abs(omega);
    return Complex(qp.q / (2.0 * std::sqrt(hbar / (2.0 * w))),
                   qp.p / (2.0 * std::sqrt(hbar * w / 2.0)));
}

}  // namespace zpflab
