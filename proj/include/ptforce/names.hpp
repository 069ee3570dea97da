#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "ptforce/multi.hpp"
#include "ptforce/tree.hpp"
#include "ptforce/verdict.hpp"

namespace ptforce {

/// A real name ⟨Cⁿᵢ : n < N, i < 2⟩ cut off at a finite horizon N.
struct RealName {
  std::string label;
  std::size_t horizon = 0;
  std::vector<std::array<std::vector<MultiTree>, 2>> cells;
  /// Set for π_{ξk}; lets oracles shrink the name's own coordinate.
  std::optional<Coord> canonical;

  const std::vector<MultiTree>& cell(std::size_t n, int i) const;
};

/// Rⁿᵢ = {s : |s| > n ⇒ s(n) = i}, as a union of the cones x⌢i, x ∈ 2ⁿ.
Tree bitTree(std::size_t n, int i);

/// π_{ξk}: Cⁿᵢ holds the single multitree {(ξ,k) ↦ Rⁿᵢ}.
RealName canonicalName(std::size_t xi, std::size_t k, std::size_t horizon);

/// The constant name: Cⁿ_bit = {empty multitree}, Cⁿ_(1−bit) = ∅.
RealName constantName(int bit, std::size_t horizon);

/// Coordinates mentioned by any cell condition.
std::set<Coord> relevantCoords(const RealName& name);

/// Cross-incompatibility of the cells, checked at depth d.
Verdict checkName(const RealName& name, std::size_t d);

struct CoverResult {
  Verdict verdict;
  /// On No: one string per coordinate of the checked tuple, as "xi,k=bits".
  std::vector<std::string> tuple;
};

/// Whether the cube of τ lies inside the union of the cubes of Σ. No is
/// exact (a tuple of level-d nodes of τ outside every member); Yes is exact
/// when every tree of Σ is clopen, using the depth that determines them;
/// otherwise a positive check at depth d gives Unknown(d).
CoverResult coverCheck(const MultiTree& tau, const std::vector<MultiTree>& sigma, std::size_t d);

struct ValueAssertion {
  std::size_t n = 0;
  int bit = 0;
};
struct PrefixAssertion {
  BitString s;
};
struct DiffAssertion {
  const RealName* other = nullptr;
};
struct AvoidAssertion {
  Tree tree;
};
using Assertion = std::variant<ValueAssertion, PrefixAssertion, DiffAssertion, AvoidAssertion>;

struct ForceOptions {
  std::size_t subsetCap = 4;
};

/// The longest prefix of c that τ forces bit by bit, and whether some bit
/// was left undecided by an Unknown verdict.
struct ForcedPrefix {
  BitString bits;
  bool undecided = false;
};

ForcedPrefix forcedPrefix(const MultiTree& tau, const RealName& c, std::size_t d,
                          const ForceOptions& opts = {});

/// "τ directly forces a" for value(n,i), prefix(s), c ≠ c′ and c ∉ [T].
/// HorizonExceeded if a value or prefix assertion reaches n ≥ N.
Verdict directForces(const MultiTree& tau, const RealName& c, const Assertion& a, std::size_t d,
                     const ForceOptions& opts = {});

}  // namespace ptforce
