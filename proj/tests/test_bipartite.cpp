#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <variant>
#include <vector>

#include "test_helpers.hpp"
#include "zpflab/bipartite.hpp"
#include "zpflab/field_modes.hpp"

using namespace zpflab;
using Catch::Matchers::WithinAbs;
using zpflab_test::random_hermitian;

namespace {

HalfInteger half(int h) { return HalfInteger::from_half_units(h); }
HalfInteger whole(int n) { return HalfInteger::from_integer(n); }

std::vector<ModeKey> all_modes(int dim) {
    std::vector<ModeKey> modes;
    for (int n = 0; n < dim; ++n)
        for (int k = n + 1; k < dim; ++k) modes.emplace_back(n, k);
    return modes;
}

BipartitePair oscillator_pair(int dim, HalfInteger z1, HalfInteger z2, int n, int m) {
    const auto osc = harmonic_oscillator(dim, 1.0, 1.0, 1.0);
    return BipartitePair(osc.system, osc.position, z1, z2, n, m);
}

}  // namespace

TEST_CASE("zeta12 is the exact absolute phase difference") {
    CHECK(zeta12(half(3), half(1)) == whole(1));
    CHECK(zeta12(half(1), half(3)) == whole(1));
    CHECK(zeta12(whole(2), whole(2)) == whole(0));
    CHECK(zeta12(whole(2), whole(0)) == whole(2));
    CHECK(zeta12(half(1), whole(0)) == half(1));

    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> u(-9, 9);
    for (int rep = 0; rep < 200; ++rep) {
        const HalfInteger a = half(u(rng)), b = half(u(rng));
        CHECK(zeta12(a, b) == zeta12(b, a));
        CHECK(!zeta12(a, b).is_negative());
    }
}

TEST_CASE("family classification") {
    SECTION("half-odd members are type F") {
        const std::vector<PhaseParameter> members = {half(-1), half(1)};
        const FamilyTag tag = classify_family(members);
        CHECK(tag.family == Family::F);
        CHECK(tag.upsilon == half(1));
    }
    SECTION("integer members are type B") {
        const std::vector<PhaseParameter> members = {whole(0), whole(1), whole(-1)};
        const FamilyTag tag = classify_family(members);
        CHECK(tag.family == Family::B);
        CHECK(tag.upsilon == whole(1));
    }
    SECTION("mixed parity is rejected") {
        const std::vector<PhaseParameter> members = {half(1), whole(1)};
        CHECK_THROWS_AS(classify_family(members), std::invalid_argument);
    }
    SECTION("empty list is rejected") {
        CHECK_THROWS_AS(classify_family(std::vector<PhaseParameter>{}), std::invalid_argument);
    }
}

TEST_CASE("degeneracy g = 2 Upsilon + 1") {
    CHECK(degeneracy(half(1)) == 2);
    CHECK(degeneracy(whole(0)) == 1);
    CHECK(degeneracy(half(3)) == 4);
    CHECK(degeneracy(whole(2)) == 5);
    CHECK_THROWS_AS(degeneracy(whole(-1)), std::invalid_argument);
}

TEST_CASE("x-x bracket on distinct levels") {
    SECTION("vanishes exactly for every integer relative phase") {
        std::mt19937_64 rng(7);
        const LevelSystem sys({0.0, 1.0, 2.5, 3.1}, 1.0, 1.0);
        for (int z = 0; z <= 6; ++z)
            for (int rep = 0; rep < 5; ++rep) {
                const ResponseMatrix x(random_hermitian(4, rng));
                const BipartitePair pair(sys, x, whole(z), whole(0), 0, 2);
                CHECK(bracket_xx_distinct(pair) == Complex(0.0));
            }
    }
    SECTION("half-odd relative phase as a negative control") {
        const BipartitePair pair = oscillator_pair(3, half(1), whole(0), 0, 1);
        const double xnm2 = std::norm(pair.matrix().entry(0, 1));
        const Complex expected(0.0, 2.0 * xnm2);
        CHECK_THAT(std::abs(bracket_xx_distinct(pair) - expected), WithinAbs(0.0, 1e-15));
    }
    SECTION("no shared transition element, no bracket") {
        const BipartitePair pair = oscillator_pair(4, half(1), whole(0), 0, 2);
        CHECK(bracket_xx_distinct(pair) == Complex(0.0));  // x_02 = 0 on the ladder
    }
    SECTION("same level is rejected") {
        const BipartitePair pair = oscillator_pair(3, whole(0), whole(0), 1, 1);
        CHECK_THROWS_AS(bracket_xx_distinct(pair), std::invalid_argument);
    }
}

TEST_CASE("x-p bracket on distinct levels") {
    const double x01sq = 0.5;  // oscillator |x_01|^2 at unit parameters
    SECTION("even relative phase") {
        const BipartitePair pair = oscillator_pair(3, whole(2), whole(0), 0, 1);
        const Complex expected(0.0, 2.0 * 1.0 * 1.0 * x01sq);  // 2 m omega_10 |x_01|^2
        CHECK_THAT(std::abs(bracket_xp_distinct(pair) - expected), WithinAbs(0.0, 1e-15));
    }
    SECTION("odd relative phase flips the sign") {
        const BipartitePair pair = oscillator_pair(3, whole(3), whole(0), 0, 1);
        const Complex expected(0.0, -2.0 * x01sq);
        CHECK_THAT(std::abs(bracket_xp_distinct(pair) - expected), WithinAbs(0.0, 1e-15));
    }
    SECTION("no dipolar transition element") {
        const BipartitePair pair = oscillator_pair(4, whole(1), whole(0), 0, 3);
        CHECK(bracket_xp_distinct(pair) == Complex(0.0));
    }
    SECTION("half-odd relative phase is rejected") {
        const BipartitePair pair = oscillator_pair(3, half(1), whole(0), 0, 1);
        CHECK_THROWS_AS(bracket_xp_distinct(pair), std::invalid_argument);
    }
}

TEST_CASE("x-p bracket on a shared level") {
    SECTION("sign follows the relative phase parity on interior levels") {
        for (int d = 4; d <= 12; ++d)
            for (int z12 = 0; z12 <= 5; ++z12)
                for (int n = 0; n < d - 1; ++n) {
                    const BipartitePair pair = oscillator_pair(d, whole(z12), whole(0), n, n);
                    const SameLevelBracket b = bracket_xp_same(pair);
                    CHECK_FALSE(b.boundary_level);
                    const double sign = z12 % 2 == 0 ? 1.0 : -1.0;
                    CHECK_THAT(std::abs(b.value - Complex(0.0, sign)), WithinAbs(0.0, 1e-12));
                }
    }
    SECTION("top level is marked as a truncation boundary") {
        const BipartitePair pair = oscillator_pair(6, whole(0), whole(0), 5, 5);
        const SameLevelBracket b = bracket_xp_same(pair);
        CHECK(b.boundary_level);
        CHECK_THAT(std::abs(b.value - Complex(0.0, -5.0)), WithinAbs(0.0, 1e-12));
    }
    SECTION("x-x companion vanishes for integer relative phase") {
        for (int z12 = 0; z12 <= 4; ++z12) {
            const BipartitePair pair = oscillator_pair(5, whole(z12), whole(0), 2, 2);
            CHECK(bracket_xx_same(pair) == Complex(0.0));
        }
    }
    SECTION("distinct levels are rejected") {
        const BipartitePair pair = oscillator_pair(4, whole(0), whole(0), 0, 1);
        CHECK_THROWS_AS(bracket_xp_same(pair), std::invalid_argument);
    }
}

TEST_CASE("closed-form brackets agree with the finite-difference bracket") {
    SECTION("distinct levels, integer relative phase") {
        for (int z12 : {0, 1, 2, 3}) {
            const BipartitePair pair = oscillator_pair(5, whole(z12), whole(0), 1, 2);
            const FieldRealization r = sample_realization(all_modes(5), 19 + z12);
            const Complex numeric = poisson_bracket_numeric(
                pair.particle(1),
                ParticleResponse(pair.system(), momentum_matrix(pair.matrix(), pair.system()),
                                 pair.zeta2(), 2),
                1, 2, r);
            const Complex closed = bracket_xp_distinct(pair);
            CHECK_THAT(std::abs(numeric - closed),
                       WithinAbs(0.0, 1e-6 * std::max(1.0, std::abs(closed))));
        }
    }
    SECTION("distinct levels, x against x, half-odd negative control") {
        const BipartitePair pair = oscillator_pair(4, half(1), whole(0), 1, 2);
        const FieldRealization r = sample_realization(all_modes(4), 3);
        const Complex numeric =
            poisson_bracket_numeric(pair.particle(1), pair.particle(2), 1, 2, r);
        CHECK_THAT(std::abs(numeric - bracket_xx_distinct(pair)), WithinAbs(0.0, 1e-6));
    }
    SECTION("shared level") {
        for (int z12 : {0, 1}) {
            const BipartitePair pair = oscillator_pair(6, whole(z12), whole(0), 2, 2);
            const FieldRealization r = sample_realization(all_modes(6), 29 + z12);
            const Complex numeric = poisson_bracket_numeric(
                pair.particle(1),
                ParticleResponse(pair.system(), momentum_matrix(pair.matrix(), pair.system()),
                                 pair.zeta2(), 2),
                2, 2, r);
            CHECK_THAT(std::abs(numeric - bracket_xp_same(pair).value),
                       WithinAbs(0.0, 1e-6));
        }
    }
}

TEST_CASE("phase assignment") {
    SECTION("any number of type-B members can respond in phase") {
        const auto result = phase_assignment(10, FamilyTag{Family::B, whole(2)});
        REQUIRE(std::holds_alternative<PhaseAssignment>(result));
        const auto& a = std::get<PhaseAssignment>(result);
        CHECK(a.zetas.size() == 10);
        CHECK(assignment_is_valid(a.zetas, Family::B));
    }
    SECTION("two type-F members pair in antiphase") {
        const auto result = phase_assignment(2, FamilyTag{Family::F, half(1)});
        REQUIRE(std::holds_alternative<PhaseAssignment>(result));
        const auto& a = std::get<PhaseAssignment>(result);
        REQUIRE(a.zetas.size() == 2);
        CHECK(a.zetas[0] == half(-1));
        CHECK(a.zetas[1] == half(1));
        CHECK(assignment_is_valid(a.zetas, Family::F));
    }
    SECTION("three type-F members are infeasible for any Upsilon") {
        for (int h : {1, 3, 5, 9}) {
            const auto result = phase_assignment(3, FamilyTag{Family::F, half(h)});
            REQUIRE(std::holds_alternative<AntiphaseInfeasibility>(result));
            CHECK(std::get<AntiphaseInfeasibility>(result).requested == 3);
        }
    }
    SECTION("certificate validated by exhaustive search up to |zeta| <= 9/2") {
        // Every triple of half-odd values in range must contain a pair with
        // an even difference, so no triple is pairwise antiphase.
        std::vector<HalfInteger> candidates;
        for (int h = -9; h <= 9; h += 2) candidates.push_back(half(h));
        bool found_valid_triple = false;
        int valid_pairs = 0;
        for (std::size_t i = 0; i < candidates.size(); ++i)
            for (std::size_t j = i + 1; j < candidates.size(); ++j) {
                if (assignment_is_valid({candidates[i], candidates[j]}, Family::F)) ++valid_pairs;
                for (std::size_t k = j + 1; k < candidates.size(); ++k)
                    if (assignment_is_valid({candidates[i], candidates[j], candidates[k]},
                                            Family::F))
                        found_valid_triple = true;
            }
        CHECK_FALSE(found_valid_triple);
        CHECK(valid_pairs > 0);
    }
    SECTION("input validation") {
        CHECK_THROWS_AS(phase_assignment(0, FamilyTag{Family::B, whole(1)}),
                        std::invalid_argument);
        CHECK_THROWS_AS(phase_assignment(2, FamilyTag{Family::F, whole(1)}),
                        std::invalid_argument);
    }
}
