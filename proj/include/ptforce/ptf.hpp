#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ptforce/tree.hpp"

namespace ptforce {

/// A countable family of perfect trees closed under restriction, given by an
/// enumerator and a membership test on normal forms.
class ForcingNotion {
 public:
  using Enumerator = std::function<std::optional<Tree>(std::size_t)>;
  using Membership = std::function<bool(const Tree&)>;

  ForcingNotion(std::string label, Enumerator enumerate, Membership member)
      : label_(std::move(label)), enumerate_(std::move(enumerate)), member_(std::move(member)) {}

  const std::string& label() const noexcept { return label_; }
  std::optional<Tree> nth(std::size_t n) const { return enumerate_(n); }
  /// The default seed tree: the first enumerated member.
  Tree first() const;
  /// Normalizes `tree` and asks the membership test.
  bool accepts(const Tree& tree) const;

 private:
  std::string label_;
  Enumerator enumerate_;
  Membership member_;
};

using NotionPtr = std::shared_ptr<const ForcingNotion>;

/// {g↾u : g a generator, u ∈ g}, enumerated by generator round-robin and u
/// in length-lexicographic order within g.
NotionPtr closeUnderRestriction(std::vector<Tree> generators);

/// P₀ = {I_s}: every cone, with I_Λ = Full.
NotionPtr cohenForcing();

/// Coordinatewise union of two notions (enumerations interleaved).
NotionPtr joinNotions(NotionPtr a, NotionPtr b);

/// The k-th string (length-lexicographic) of a tree.
BitString nthStringOf(const Tree& tree, std::size_t k);

struct ShrinkResult {
  Tree first;
  Tree second;
  /// Length of the string at which the two outputs were separated; levels
  /// strictly beyond it are disjoint.
  std::size_t pivot = 0;
};

/// Shrinks T ∈ P and T′ ∈ P′ to members S ⊆ T, S′ ⊆ T′ whose levels are
/// disjoint past the pivot. Equal trees (to depth d) are split at the stem;
/// otherwise the least string of one tree missing from the other is used,
/// preferring to shrink the first argument.
ShrinkResult disjointShrink(const ForcingNotion& p, const Tree& t, const ForcingNotion& pPrime,
                            const Tree& tPrime, std::size_t d);

}  // namespace ptforce
