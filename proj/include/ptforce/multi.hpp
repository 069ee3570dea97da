#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ptforce/ptf.hpp"
#include "ptforce/splitsys.hpp"
#include "ptforce/tree.hpp"
#include "ptforce/verdict.hpp"

namespace ptforce {

/// A pair ⟨ξ, k⟩ (or ⟨ξ, m⟩ for multisystems).
struct Coord {
  std::size_t xi = 0;
  std::size_t k = 0;

  std::string key() const { return std::to_string(xi) + "," + std::to_string(k); }
  static Coord parse(const std::string& key);

  friend auto operator<=>(const Coord&, const Coord&) = default;
};

/// A sequence ⟨P_ξ : ξ < ϑ⟩ of forcing notions.
class Seq {
 public:
  Seq(std::string label, std::vector<NotionPtr> notions)
      : label_(std::move(label)), notions_(std::move(notions)) {}

  const std::string& label() const noexcept { return label_; }
  std::size_t length() const noexcept { return notions_.size(); }
  const NotionPtr& at(std::size_t xi) const { return notions_.at(xi); }
  const std::vector<NotionPtr>& notions() const noexcept { return notions_; }

 private:
  std::string label_;
  std::vector<NotionPtr> notions_;
};

using SeqPtr = std::shared_ptr<const Seq>;

/// p ∨ q. LengthMismatch unless both have the same length.
SeqPtr joinSeq(const Seq& p, const Seq& q);

/// A finite-support matrix of trees. Absent coordinates denote Full, and
/// Full entries are stripped on construction so the support is syntactic.
/// The tag names the sequence the multitree is bound to; an empty tag is
/// unbound and combines with anything.
class MultiTree {
 public:
  MultiTree() = default;
  explicit MultiTree(std::map<Coord, Tree> entries, std::string tag = {});

  Tree at(const Coord& c) const;
  std::set<Coord> support() const;
  const std::map<Coord, Tree>& entries() const noexcept { return entries_; }
  const std::string& tag() const noexcept { return tag_; }

  MultiTree with(const Coord& c, Tree tree) const;
  MultiTree retagged(std::string tag) const;

  friend bool operator==(const MultiTree&, const MultiTree&) = default;

 private:
  std::map<Coord, Tree> entries_;
  std::string tag_;
};

/// A finite-support matrix of splitting systems; absent pairs are Λ.
class MultiSys {
 public:
  MultiSys() = default;
  explicit MultiSys(std::map<Coord, SplitSys> entries, std::string tag = {});

  const SplitSys& at(const Coord& c) const;
  std::set<Coord> support() const;
  const std::map<Coord, SplitSys>& entries() const noexcept { return entries_; }
  const std::string& tag() const noexcept { return tag_; }

  MultiSys with(const Coord& c, SplitSys sys) const;

  friend bool operator==(const MultiSys&, const MultiSys&) = default;

 private:
  std::map<Coord, SplitSys> entries_;
  std::string tag_;
};

/// Throws SeqMismatch when both tags are set and differ.
void requireSameSeq(const std::string& a, const std::string& b);

/// Every coordinate lies below the sequence length and every entry is a
/// member of its coordinate notion.
bool boundTo(const MultiTree& tree, const Seq& seq);

/// σ ≤ τ: σ(ξ,k) ⊆ τ(ξ,k) levelwise to depth d at every coordinate.
bool mtLeq(const MultiTree& sigma, const MultiTree& tau, std::size_t d);

struct TreeCompat {
  Verdict verdict;
  std::optional<Tree> refinement;
};

/// Compatibility of two trees of one notion. Cone operands, fusion trees
/// over one system, and pairs whose levels separate by depth d are decided
/// exactly; Yes comes with a common refinement that is a restriction of
/// one of the operands.
TreeCompat treeCompatible(const Tree& a, const Tree& b, std::size_t d);

struct MultiCompat {
  Verdict verdict;
  std::optional<MultiTree> refinement;
};

MultiCompat mtCompatible(const MultiTree& sigma, const MultiTree& tau, std::size_t d);

/// Relations of `newer` relative to `older`, componentwise.
struct MsRelations {
  bool extends = false;         // older ⊑ newer
  bool reduces = false;         // newer reduces older
  bool strictlyExtends = false; // older ⊑⁺ newer

  friend bool operator==(const MsRelations&, const MsRelations&) = default;
};

MsRelations msRelate(const MultiSys& older, const MultiSys& newer, std::size_t d);

/// Where a tree occurs in a multisystem: a copy index m and a string s with
/// Φ(ξ,m)(s) equal to it.
struct Occurrence {
  std::size_t m = 0;
  BitString s;
};

std::optional<Occurrence> locate(const Tree& tree, std::size_t xi, const MultiSys& phi);

/// τ occurs in Φ: |τ| ⊆ |Φ| and every τ(ξ,k) is some Φ(ξ,m)(s).
bool occursIn(const MultiTree& tau, const MultiSys& phi);

}  // namespace ptforce
