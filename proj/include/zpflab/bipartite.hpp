#pragma once

#include <algorithm>
#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "zpflab/half_integer.hpp"
#include "zpflab/response.hpp"

namespace zpflab {

/// Response-phase parameter zeta, in units of pi. Stored in exact
/// half-units; all parity logic is integer arithmetic.
using PhaseParameter = HalfInteger;

/// zeta12 = |zeta1 - zeta2|, the relative response phase of two
/// particles coupled to a shared mode.
inline PhaseParameter zeta12(PhaseParameter z1, PhaseParameter z2) { return (z1 - z2).abs(); }

/// The two families of identical particles: members of B carry integer
/// zeta (pairwise in-phase response), members of F half-odd-integer zeta
/// (pairwise antiphase response).
enum class Family { B, F };

struct FamilyTag {
    Family family = Family::B;
    PhaseParameter upsilon;  // maximum |zeta| of the members
};

inline std::string family_name(Family f) { return f == Family::B ? "B" : "F"; }

/// B if every member zeta is an integer, F if every one is half-odd;
/// a mix violates the family definition.
inline FamilyTag classify_family(std::span<const PhaseParameter> members) {
    if (members.empty()) throw std::invalid_argument("classify_family: empty member list");
    const bool integer = members.front().is_integer();
    PhaseParameter upsilon = members.front().abs();
    for (const PhaseParameter& z : members) {
        if (z.is_integer() != integer)
            throw std::invalid_argument(
                "classify_family: mixed parity (integer and half-odd zeta values)");
        upsilon = std::max(upsilon, z.abs());
    }
    return FamilyTag{integer ? Family::B : Family::F, upsilon};
}

inline FamilyTag classify_family(const std::vector<PhaseParameter>& members) {
    return classify_family(std::span<const PhaseParameter>(members));
}

/// g = 2 Upsilon + 1 distinct member states for a family capped at Upsilon.
inline int degeneracy(PhaseParameter upsilon) {
    if (upsilon.is_negative()) throw std::invalid_argument("degeneracy: Upsilon must be >= 0");
    return upsilon.half_units() + 1;
}

/// Two identical bound particles subject to the same field: one shared
/// level system and response matrix, two phase parameters, and the
/// occupied levels (n, m). Identity of the particles is enforced by
/// construction.
class BipartitePair {
  public:
    BipartitePair(LevelSystem system, ResponseMatrix matrix, PhaseParameter zeta1,
                  PhaseParameter zeta2, int level1, int level2)
        : system_(std::move(system)),
          matrix_(std::move(matrix)),
          zeta1_(zeta1),
          zeta2_(zeta2),
          level1_(level1),
          level2_(level2) {
        if (matrix_.dim() != system_.dim())
            throw std::invalid_argument("BipartitePair: dimension mismatch");
        if (level1_ < 0 || level1_ >= system_.dim() || level2_ < 0 || level2_ >= system_.dim())
            throw std::out_of_range("BipartitePair: level out of range");
    }

    const LevelSystem& system() const { return system_; }
    const ResponseMatrix& matrix() const { return matrix_; }
    PhaseParameter zeta1() const { return zeta1_; }
    PhaseParameter zeta2() const { return zeta2_; }
    int level1() const { return level1_; }
    int level2() const { return level2_; }

    PhaseParameter relative_zeta() const { return zeta12(zeta1_, zeta2_); }

    ParticleResponse particle(int label) const {
        if (label == 1) return ParticleResponse(system_, matrix_, zeta1_, 1);
        if (label == 2) return ParticleResponse(system_, matrix_, zeta2_, 2);
        throw std::invalid_argument("BipartitePair: label must be 1 or 2");
    }

  private:
    LevelSystem system_;
    ResponseMatrix matrix_;
    PhaseParameter zeta1_, zeta2_;
    int level1_, level2_;
};

/// [x1,x2]_(nm) = 2i |x_nm|^2 sin(pi zeta12) for n != m. Identical
/// particles force integer zeta12, where the bracket vanishes exactly;
/// half-odd zeta12 is the negative control.
inline Complex bracket_xx_distinct(const BipartitePair& pair) {
    if (pair.level1() == pair.level2())
        throw std::invalid_argument("bracket_xx_distinct: levels coincide, use the (nn) variant");
    const Complex xnm = pair.matrix().entry(pair.level1(), pair.level2());
    return Complex(0.0, 2.0 * std::norm(xnm)) * sin_pi(pair.relative_zeta());
}

/// [x1,p2]_(nm) = (-1)^zeta12 2 i m omega_mn |x_nm|^2 for n != m: the
/// shared mode (nm) correlates the two responses, with the sign set by
/// the relative phase.
inline Complex bracket_xp_distinct(const BipartitePair& pair) {
    if (pair.level1() == pair.level2())
        throw std::invalid_argument("bracket_xp_distinct: levels coincide, use the (nn) variant");
    const PhaseParameter z12 = pair.relative_zeta();
    if (!z12.is_integer())
        throw std::invalid_argument("bracket_xp_distinct: zeta12 must be an integer");
    const int n = pair.level1();
    const int m = pair.level2();
    const Complex xnm = pair.matrix().entry(n, m);
    const double w = pair.system().omega(m, n);
    return static_cast<double>(parity_sign(z12)) *
           Complex(0.0, 2.0 * pair.system().mass() * w * std::norm(xnm));
}

/// Same-level bracket value together with a truncation marker: on the
/// top level of a truncated ladder the sum no longer telescopes to hbar.
struct SameLevelBracket {
    Complex value;
    bool boundary_level = false;
};

/// [x1,p2]_(nn) = (-1)^zeta12 2 i m sum_k omega_kn |x_nk|^2, which is
/// (-1)^zeta12 i hbar wherever the sum rule holds.
inline SameLevelBracket bracket_xp_same(const BipartitePair& pair) {
    if (pair.level1() != pair.level2())
        throw std::invalid_argument("bracket_xp_same: levels differ, use the (nm) variant");
    const PhaseParameter z12 = pair.relative_zeta();
    if (!z12.is_integer())
        throw std::invalid_argument("bracket_xp_same: zeta12 must be an integer");
    const int n = pair.level1();
    const double sum = trk_sum(pair.matrix(), pair.system(), n);
    const bool boundary = n == pair.system().dim() - 1;
    return SameLevelBracket{static_cast<double>(parity_sign(z12)) * Complex(0.0, sum), boundary};
}

/// Companion [x1,x2]_(nn) = 2i sum_k sin(pi zeta12) |x_nk|^2; zero for
/// every integer zeta12.
inline Complex bracket_xx_same(const BipartitePair& pair) {
    if (pair.level1() != pair.level2())
        throw std::invalid_argument("bracket_xx_same: levels differ, use the (nm) variant");
    const int n = pair.level1();
    double sum = 0.0;
    for (int k = 0; k < pair.matrix().dim(); ++k) {
        if (k == n) continue;
        sum += std::norm(pair.matrix().entry(n, k));
    }
    return Complex(0.0, 2.0 * sum) * sin_pi(pair.relative_zeta());
}

/// Feasible zeta assignment for N family members sharing a state.
struct PhaseAssignment {
    Family family = Family::B;
    std::vector<PhaseParameter> zetas;
};

/// Why no assignment exists: with half-odd zeta_i, write zeta_i = c_i + 1/2;
/// |zeta_i - zeta_j| odd requires c_i, c_j of opposite parity, and three
/// integers cannot be pairwise of opposite parity.
struct AntiphaseInfeasibility {
    int requested = 0;
    PhaseParameter upsilon;
    std::string reason;
};

using AssignmentResult = std::variant<PhaseAssignment, AntiphaseInfeasibility>;

/// All pairwise differences even (B: coherent in-phase response, any N)
/// or all pairwise differences odd (F: antiphase response, at most N=2).
inline bool assignment_is_valid(const std::vector<PhaseParameter>& zetas, Family family) {
    for (std::size_t i = 0; i < zetas.size(); ++i)
        for (std::size_t j = i + 1; j < zetas.size(); ++j) {
            const PhaseParameter d = zeta12(zetas[i], zetas[j]);
            if (!d.is_integer()) return false;
            const bool odd = d.is_odd_integer();
            if (family == Family::B && odd) return false;
            if (family == Family::F && !odd) return false;
        }
    return true;
}

/// For B any number of members can respond in phase; for F a pairwise
/// antiphase assignment exists only up to N = 2.
inline AssignmentResult phase_assignment(int count, const FamilyTag& family) {
    if (count < 1) throw std::invalid_argument("phase_assignment: N must be >= 1");
    if (family.upsilon.is_negative())
        throw std::invalid_argument("phase_assignment: Upsilon must be >= 0");

    if (family.family == Family::B) {
        if (!family.upsilon.is_integer())
            throw std::invalid_argument("phase_assignment: B family requires integer Upsilon");
        // All members in phase at zeta = 0: every pairwise difference even.
        PhaseAssignment a{Family::B,
                          std::vector<PhaseParameter>(static_cast<std::size_t>(count),
                                                      PhaseParameter::from_integer(0))};
        return a;
    }

    if (!family.upsilon.is_half_odd() || family.upsilon.is_negative())
        throw std::invalid_argument("phase_assignment: F family requires half-odd Upsilon >= 1/2");
    if (count == 1)
        return PhaseAssignment{Family::F, {PhaseParameter::from_half_units(1)}};
    if (count == 2)
        return PhaseAssignment{
            Family::F,
            {PhaseParameter::from_half_units(-1), PhaseParameter::from_half_units(1)}};

    return AntiphaseInfeasibility{
        count, family.upsilon,
        "pairwise odd |zeta_i - zeta_j| requires the integers c_i = zeta_i - 1/2 to be of "
        "pairwise opposite parity; among any three integers two share a parity, so their "
        "zeta difference is even and the corresponding pair cannot respond in antiphase"};
}

}  // namespace zpflab
