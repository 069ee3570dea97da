#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ptforce/bitstring.hpp"
#include "ptforce/verdict.hpp"

namespace ptforce {

/// Guards every walk that could otherwise run for 2^d steps.
inline constexpr std::size_t kDefaultDepthCap = 16;
/// Longest stem a descending walk will follow before giving up.
inline constexpr std::size_t kDefaultStemCap = 64;

class FullSplitSys;
using SysPtr = std::shared_ptr<const FullSplitSys>;

/// A closed expression denoting a perfect subtree of the full binary tree.
///
/// Trees are immutable and cheap to copy (a shared node pointer). Equality
/// is structural; the algebra has no general semantic equality oracle, so
/// callers compare normal forms (see normalForm) or level sets.
class Tree {
 public:
  enum class Kind { Full, Cone, Restrict, Union, Fusion };

  Tree();

  static Tree full() { return Tree(); }
  /// I_s. cone(Λ) is Full.
  static Tree cone(BitString s);
  /// Unnormalized T↾s node. Its precondition (s ∈ base) is checked lazily
  /// and reported as IllFormed; use restrict() for the normalizing form.
  static Tree restriction(Tree base, BitString s);
  /// Finite union; nested unions are flattened, duplicates dropped, parts
  /// sorted by text, and a singleton collapses to its part.
  static Tree unite(std::vector<Tree> parts);
  /// The limit tree tf(sys, at); at = Λ gives the full fusion T∞.
  static Tree fusion(SysPtr sys, BitString at = {});

  Kind kind() const noexcept;
  /// Cone stem, restriction string, or fusion anchor, depending on kind.
  const BitString& str() const noexcept;
  const Tree& base() const;
  const std::vector<Tree>& parts() const;
  const SysPtr& system() const;
  /// True when every part of a union is Full or a cone (the union is clopen).
  bool coneUnion() const noexcept;
  const std::vector<std::string>& coneIndex() const;

  std::string text() const;

  friend bool operator==(const Tree& a, const Tree& b);

 private:
  struct Node;
  explicit Tree(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct SysProvenance {
  const void* owner = nullptr;
  std::size_t xi = 0;
  std::size_t m = 0;
};

/// An everywhere-defined splitting system s ↦ T_s, realized lazily.
///
/// `trusted` marks systems whose spe2 condition is guaranteed by the way
/// they were produced; only those get the stem and restriction shortcuts.
/// Realization is memoized behind a mutex, so concurrent readers see one
/// deterministic realization.
class FullSplitSys {
 public:
  using Realizer = std::function<Tree(const BitString&)>;

  FullSplitSys(std::string label, Realizer realize, bool trusted,
               SysProvenance provenance = {});

  const std::string& label() const noexcept { return label_; }
  bool trusted() const noexcept { return trusted_; }
  const SysProvenance& provenance() const noexcept { return provenance_; }

  Tree at(const BitString& s) const;

 private:
  std::string label_;
  Realizer realize_;
  bool trusted_;
  SysProvenance provenance_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<BitString, Tree> memo_;
};

bool contains(const Tree& tree, const BitString& t);
/// Strings of length n in the tree, in lexicographic order.
std::vector<BitString> level(const Tree& tree, std::size_t n);
/// The largest s with T = T↾s.
BitString stem(const Tree& tree, std::size_t cap = kDefaultStemCap);
/// Normalizing restriction; NotInTree if s is not in the tree.
Tree restrict(const Tree& tree, const BitString& s);
Tree normalForm(const Tree& tree);

/// Checks every node of length < d for a child and for a splitting
/// descendant. Endpoints give an exact No; a branch that fails to split
/// within `walkCap` levels past d gives Unknown(d).
Verdict isPerfectToDepth(const Tree& tree, std::size_t d,
                         std::size_t walkCap = kDefaultDepthCap);

/// level(a,k) ⊆ level(b,k) for all k <= d.
bool subsetToDepth(const Tree& a, const Tree& b, std::size_t d);
bool equalToDepth(const Tree& a, const Tree& b, std::size_t d);
bool disjointAtDepth(const Tree& a, const Tree& b, std::size_t d);

/// Least k at which the levels of a and b are disjoint (so their bodies are
/// disjoint), searched through the common nodes up to length cap. Gives up
/// (nullopt) when the common frontier grows past a few thousand nodes.
std::optional<std::size_t> separationDepth(const Tree& a, const Tree& b,
                                           std::size_t cap = 2 * kDefaultDepthCap);
/// Sound but incomplete test for [a] ⊆ [b]; exact when b is clopen.
bool knownSubset(const Tree& a, const Tree& b);
/// Depth at which membership of a branch is decided, if the tree is clopen
/// (built from Full, cones and unions of those).
std::optional<std::size_t> clopenDepth(const Tree& tree);

/// Node/edge rendering of the levels 0..depth.
std::string toDot(const Tree& tree, std::size_t depth);

}  // namespace ptforce
