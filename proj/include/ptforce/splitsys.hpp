#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "ptforce/tree.hpp"
#include "ptforce/verdict.hpp"

namespace ptforce {

/// A finite splitting system ⟨T_s : s ∈ 2^{<n}⟩. Height 0 is the empty
/// system Λ. Entries are stored in heap order (see BitString::heapIndex).
class SplitSys {
 public:
  SplitSys() = default;
  /// Height-1 system ⟨Λ ↦ root⟩.
  static SplitSys seeded(Tree root);
  /// Builds a system from entries listed in heap order; the size must be
  /// 2^n - 1 for some n.
  static SplitSys fromEntries(std::vector<Tree> entries);

  std::size_t height() const noexcept { return height_; }
  bool empty() const noexcept { return height_ == 0; }
  const Tree& at(const BitString& s) const;
  const std::vector<Tree>& entries() const noexcept { return entries_; }

  /// Copy with T_s replaced (s must be in the domain).
  SplitSys with(const BitString& s, Tree tree) const;
  /// Copy with a new top layer appended, listed in lexicographic order of
  /// the strings of length height().
  SplitSys grown(std::vector<Tree> layer) const;

  friend bool operator==(const SplitSys&, const SplitSys&) = default;

 private:
  std::size_t height_ = 0;
  std::vector<Tree> entries_;
};

/// Both spe2 clauses for every pair s, s⌢i in the domain, inclusions
/// checked levelwise to depth d. No carries the offending child string.
Verdict checkSpe2(const SplitSys& sys, std::size_t d);

/// Relations of `newer` relative to `older`.
struct SplitRelations {
  bool extends = false;          // older ⊑ newer
  bool properlyExtends = false;  // older ⊏ newer
  bool reduces = false;          // newer reduces older

  friend bool operator==(const SplitRelations&, const SplitRelations&) = default;
};

SplitRelations relate(const SplitSys& older, const SplitSys& newer, std::size_t d);

/// One extra layer: T_{s⌢i} = T_s↾(stem(T_s)⌢i) on the top layer.
SplitSys defaultExtend(const SplitSys& sys);

/// Finite restriction of a full system to 2^{<height}.
SplitSys truncate(const FullSplitSys& sys, std::size_t height);

/// Pulls the next system of a ⊑-increasing chain.
using ChainGenerator = std::function<SplitSys()>;

/// Default pull budget per realized layer.
inline constexpr std::size_t kDefaultPullBudget = 64;

struct FusedChain {
  SysPtr system;
  Tree limit;  // FusionLimit(system, Λ)
};

/// Fuses a chain into its union system and limit tree. Realizing T_s pulls
/// the chain until its height exceeds |s|; each pull is checked to extend
/// the previous system (ChainStalled on a stall, a non-extension, or budget
/// exhaustion).
FusedChain fuse(ChainGenerator chain, std::string label, std::size_t d = kDefaultDepthCap,
                std::size_t pullBudget = kDefaultPullBudget);

/// The chain of default extensions starting from ⟨Λ ↦ seed⟩.
ChainGenerator defaultChain(Tree seed);

}  // namespace ptforce
