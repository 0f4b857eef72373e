#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <set>
#include <variant>
#include <vector>

#include "test_helpers.hpp"
#include "zpflab/spin_statistics.hpp"

using namespace zpflab;
using Catch::Matchers::WithinAbs;
using zpflab_test::pauli_x;
using zpflab_test::random_hermitian;

namespace {

HalfInteger half(int h) { return HalfInteger::from_half_units(h); }
HalfInteger whole(int n) { return HalfInteger::from_integer(n); }

ObservablePair x_pair() { return ObservablePair(pauli_x(), pauli_x()); }

bool states_match(const CompleteState& a, const CompleteState& b, double scale, double tol) {
    const auto ma = a.amplitude_map();
    const auto mb = b.amplitude_map();
    for (const auto& [key, amp] : ma) {
        const auto it = mb.find(key);
        const Complex other = it == mb.end() ? Complex(0.0) : it->second;
        if (std::abs(scale * amp - other) > tol) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("spin configuration averages") {
    std::mt19937_64 rng(3);
    SECTION("equal spins reduce to the spinless average") {
        for (int rep = 0; rep < 10; ++rep) {
            const ObservablePair obs{ResponseMatrix(random_hermitian(3, rng)),
                                     ResponseMatrix(random_hermitian(3, rng))};
            for (double phi : {0.0, 1.1, 4.0}) {
                const Complex avg = spin_config_average(obs, 0, 2, whole(1), half(1), half(1),
                                                        phi, Configuration::C);
                // The complex partial average keeps the single-pairing term;
                // its real part is the configuration average.
                const Complex avg_d = spin_config_average(obs, 0, 2, whole(1), half(1), half(1),
                                                          phi, Configuration::D);
                const double paired = 0.5 * (avg + avg_d).real();
                const double spinless =
                    0.5 * (config_average(obs, 0, 2, whole(1), Configuration::C) +
                           config_average(obs, 0, 2, whole(1), Configuration::D));
                CHECK_THAT(paired, WithinAbs(spinless, 1e-12));
            }
        }
    }
    SECTION("rotation factors in one branch are conjugate exponents") {
        const ObservablePair obs{ResponseMatrix(random_hermitian(4, rng)),
                                 ResponseMatrix(random_hermitian(4, rng))};
        for (double phi : {0.0, 0.7, 2.9, 6.3}) {
            const Complex with_spin = spin_config_average(obs, 1, 3, whole(0), half(1), half(-1),
                                                          phi, Configuration::C);
            const Complex no_spin = spin_config_average(obs, 1, 3, whole(0), half(1), half(1),
                                                        phi, Configuration::C);
            CHECK_THAT(std::abs(with_spin - no_spin), WithinAbs(0.0, 1e-13));
        }
    }
    SECTION("equal levels are rejected") {
        CHECK_THROWS_AS(spin_config_average(x_pair(), 0, 0, whole(0), half(1), half(-1), 0.0,
                                            Configuration::C),
                        std::invalid_argument);
    }
}

TEST_CASE("spin covariance reduces to the spinless covariance") {
    std::mt19937_64 rng(17);
    const double phis[] = {0.0, std::numbers::pi / 3.0, std::numbers::pi,
                           2.0 * std::numbers::pi};
    SECTION("equal spins") {
        for (int rep = 0; rep < 10; ++rep) {
            const ObservablePair obs{ResponseMatrix(random_hermitian(3, rng)),
                                     ResponseMatrix(random_hermitian(3, rng))};
            for (double phi : phis)
                CHECK_THAT(spin_covariance(obs, 0, 1, whole(0), half(1), half(1), phi),
                           WithinAbs(analytic_covariance(obs, 0, 1, whole(0)), 1e-12));
        }
    }
    SECTION("distinct spins: the exponents cancel pairwise") {
        for (int rep = 0; rep < 50; ++rep) {
            const int d = 2 + static_cast<int>(rng() % 4);
            const ObservablePair obs{ResponseMatrix(random_hermitian(d, rng)),
                                     ResponseMatrix(random_hermitian(d, rng))};
            const int n = 0;
            const int m = d - 1;
            for (int z : {0, 1})
                for (double phi : phis)
                    CHECK_THAT(spin_covariance(obs, n, m, whole(z), half(1), half(-1), phi),
                               WithinAbs(analytic_covariance(obs, n, m, whole(z)), 1e-12));
        }
    }
    SECTION("equal levels with a spin singlet carry no f,g covariance") {
        for (int rep = 0; rep < 10; ++rep) {
            const ObservablePair obs{ResponseMatrix(random_hermitian(3, rng)),
                                     ResponseMatrix(random_hermitian(3, rng))};
            const CompleteState singlet =
                build_complete_state(1, half(1), 1, half(-1), whole(1));
            CHECK_THAT(quantum_covariance(obs, singlet), WithinAbs(0.0, 1e-12));
        }
    }
    SECTION("agrees with the quantum covariance over the complete state") {
        for (int rep = 0; rep < 100; ++rep) {
            const int d = 2 + static_cast<int>(rng() % 3);
            const ObservablePair obs{ResponseMatrix(random_hermitian(d, rng)),
                                     ResponseMatrix(random_hermitian(d, rng))};
            const int z = static_cast<int>(rng() % 2);
            const double phi = 0.3 * static_cast<double>(rng() % 20);
            const CompleteState psi =
                build_complete_state(0, half(1), d - 1, half(-1), whole(z), phi);
            const double direct =
                spin_covariance(obs, 0, d - 1, whole(z), half(1), half(-1), phi);
            CHECK_THAT(direct, WithinAbs(quantum_covariance(obs, psi), 1e-12));
        }
    }
}

TEST_CASE("exchange factor") {
    SECTION("pinned cases") {
        CHECK(exchange_factor(whole(1), half(1)) == 1);   // odd zeta, spin 1/2
        CHECK(exchange_factor(whole(0), half(1)) == -1);  // forbidden combination
        CHECK(exchange_factor(whole(0), whole(1)) == 1);  // integer spin, even zeta
    }
    SECTION("exhaustive parity table") {
        for (int two_gamma = -7; two_gamma <= 7; ++two_gamma)
            for (int z = 0; z <= 7; ++z) {
                const int expected = (z + two_gamma) % 2 == 0 ? 1 : -1;
                CHECK(exchange_factor(whole(z), half(two_gamma)) == expected);
            }
    }
    SECTION("required parity matches the factor") {
        CHECK(required_zeta_parity(half(1)) == ZetaParity::odd);
        CHECK(required_zeta_parity(whole(1)) == ZetaParity::even);
        CHECK(required_zeta_parity(half(3)) == ZetaParity::odd);
        for (int two_gamma = -7; two_gamma <= 7; ++two_gamma) {
            const ZetaParity parity = required_zeta_parity(half(two_gamma));
            const int good_zeta = parity == ZetaParity::odd ? 1 : 0;
            CHECK(exchange_factor(whole(good_zeta), half(two_gamma)) == 1);
            CHECK(exchange_factor(whole(good_zeta + 1), half(two_gamma)) == -1);
        }
    }
}

TEST_CASE("complete state construction and swap parity") {
    SECTION("spin singlet on a shared level") {
        const CompleteState singlet =
            build_complete_state(2, half(1), 2, half(-1), whole(1));
        CHECK(swap_parity(singlet) == SwapParity::antisymmetric);
    }
    SECTION("identical labels with odd zeta vanish") {
        CHECK_THROWS_AS(build_complete_state(1, half(1), 1, half(1), whole(1)),
                        std::invalid_argument);
    }
    SECTION("identical labels with even zeta are the plain product") {
        const CompleteState product = build_complete_state(1, half(1), 1, half(1), whole(0));
        CHECK(swap_parity(product) == SwapParity::symmetric);
    }
    SECTION("distinct levels, even zeta, equal spins: symmetric") {
        const CompleteState psi = build_complete_state(0, half(1), 1, half(1), whole(2));
        CHECK(swap_parity(psi) == SwapParity::symmetric);
    }
    SECTION("distinct levels, odd zeta: antisymmetric") {
        const CompleteState psi = build_complete_state(0, half(1), 1, half(1), whole(1));
        CHECK(swap_parity(psi) == SwapParity::antisymmetric);
    }
    SECTION("corrupted amplitudes are not an exchange eigenstate") {
        const CompleteState bad(SpinBranch{0, half(1)}, SpinBranch{1, half(-1)},
                                Complex(0.9, 0.0), Complex(0.1, 0.2));
        CHECK(swap_parity(bad) == SwapParity::not_eigenstate);
    }
}

TEST_CASE("brute-force exchange agrees with the algebraic factor") {
    std::mt19937_64 rng(29);
    for (int rep = 0; rep < 40; ++rep) {
        const int n = static_cast<int>(rng() % 3);
        const int m = 3 + static_cast<int>(rng() % 2);
        const int two_gn = -5 + 2 * static_cast<int>(rng() % 5);  // odd: half-integer spins
        const int two_gm = -5 + 2 * static_cast<int>(rng() % 5);
        const int z = static_cast<int>(rng() % 4);
        const double phi = 0.1 * static_cast<double>(rng() % 60);
        const CompleteState psi =
            build_complete_state(n, half(two_gn), m, half(two_gm), whole(z), phi);

        const CompleteState forward = apply_exchange(psi, ExchangeDirection::forward);
        const CompleteState reverse = apply_exchange(psi, ExchangeDirection::reverse);
        CHECK(states_match(forward, reverse, 1.0, 1e-12));

        const int factor = exchange_factor(whole(z), half(two_gn));
        CHECK(states_match(psi, forward, factor, 1e-12));
    }
}

TEST_CASE("spin-statistics consistency for half-integer spin") {
    for (int two_gamma : {-7, -5, -3, -1, 1, 3, 5, 7}) {
        const SpinLabel gamma = half(two_gamma);
        REQUIRE(required_zeta_parity(gamma) == ZetaParity::odd);
        // A complete state with the required odd zeta is exchange symmetric
        // once the internal rotation is included.
        const CompleteState complete = build_complete_state(0, gamma, 1, gamma, whole(1));
        const CompleteState exchanged = apply_exchange(complete, ExchangeDirection::forward);
        CHECK(states_match(complete, exchanged, 1.0, 1e-12));
        // The energy-only reduction is antisymmetric.
        CHECK(swap_parity(complete) == SwapParity::antisymmetric);
        const EntangledState energy_state = build_entangled_state(0, 1, whole(1));
        CHECK(energy_state.sign() == -1);
    }
}

TEST_CASE("Pauli feasibility search") {
    SECTION("pairs exist for Upsilon = 3/2") {
        const PauliResult result = pauli_feasibility(half(3), 2);
        REQUIRE(std::holds_alternative<PauliWitness>(result));
        const auto& witness = std::get<PauliWitness>(result);
        std::set<std::pair<int, int>> found;
        for (const auto& tuple : witness.tuples) {
            REQUIRE(tuple.size() == 2);
            found.insert({tuple[0].half_units(), tuple[1].half_units()});
        }
        CHECK(found.count({1, 3}) == 1);    // (1/2, 3/2)
        CHECK(found.count({-3, -1}) == 1);  // (-3/2, -1/2)
        CHECK(found.size() == 3);
    }
    SECTION("spin one-half pair") {
        const PauliResult result = pauli_feasibility(half(1), 2);
        REQUIRE(std::holds_alternative<PauliWitness>(result));
        const auto& witness = std::get<PauliWitness>(result);
        REQUIRE(witness.tuples.size() == 1);
        CHECK(witness.tuples[0][0] == half(-1));
        CHECK(witness.tuples[0][1] == half(1));
    }
    SECTION("no third particle can pair with both, for any family cap") {
        for (int h : {1, 3, 5, 7}) {
            for (int k : {3, 4, 5}) {
                const PauliResult result = pauli_feasibility(half(h), k);
                REQUIRE(std::holds_alternative<PauliCertificate>(result));
                const auto& cert = std::get<PauliCertificate>(result);
                for (const auto& failure : cert.failures) {
                    CHECK((!failure.unit_gap_to_first || !failure.unit_gap_to_second));
                    // The two gaps have opposite parities, so the third spin
                    // always sits an even distance from one of the pair.
                    const HalfInteger gap1 = (failure.gamma3 - failure.gamma1).abs();
                    const HalfInteger gap2 = (failure.gamma3 - failure.gamma2).abs();
                    REQUIRE(gap1.is_integer());
                    REQUIRE(gap2.is_integer());
                    CHECK(gap1.is_odd_integer() != gap2.is_odd_integer());
                }
            }
        }
    }
    SECTION("brute-force enumeration confirms the solver") {
        for (int h : {1, 3, 5, 7}) {
            const auto candidates = spin_range(half(h));
            // k = 2: count pairs with unit gap directly.
            long pairs = 0;
            for (std::size_t i = 0; i < candidates.size(); ++i)
                for (std::size_t j = i + 1; j < candidates.size(); ++j)
                    if (unit_gap(candidates[i], candidates[j])) ++pairs;
            const PauliResult two = pauli_feasibility(half(h), 2);
            REQUIRE(std::holds_alternative<PauliWitness>(two));
            CHECK(static_cast<long>(std::get<PauliWitness>(two).tuples.size()) == pairs);
            CHECK(pairs == h);  // adjacent half-integer values in the range

            // k = 3: no triple is pairwise unit-gapped.
            bool any_triple = false;
            for (std::size_t i = 0; i < candidates.size(); ++i)
                for (std::size_t j = i + 1; j < candidates.size(); ++j)
                    for (std::size_t l = j + 1; l < candidates.size(); ++l)
                        if (unit_gap(candidates[i], candidates[j]) &&
                            unit_gap(candidates[i], candidates[l]) &&
                            unit_gap(candidates[j], candidates[l]))
                            any_triple = true;
            CHECK_FALSE(any_triple);
        }
    }
    SECTION("integer-spin families are out of scope for the antiphase pairing") {
        const PauliResult result = pauli_feasibility(whole(1), 3);
        CHECK(std::holds_alternative<PauliNotApplicable>(result));
    }
    SECTION("input validation") {
        CHECK_THROWS_AS(pauli_feasibility(half(-1), 2), std::invalid_argument);
        CHECK_THROWS_AS(pauli_feasibility(half(3), 0), std::invalid_argument);
    }
}
