#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ptforce/multi.hpp"
#include "ptforce/report.hpp"
#include "ptforce/splitsys.hpp"
#include "ptforce/tree.hpp"

namespace ptforce {

/// A dense subset of MS(p) given by a membership test and a refiner. The
/// refiner must return a member that ⊑-extends its input; GenericSeq checks
/// this on every call.
struct DenseSet {
  std::string label;
  std::function<bool(const MultiSys&)> member;
  std::function<MultiSys(const MultiSys&)> refine;
};

using DensePtr = std::shared_ptr<const DenseSet>;

class GenericSeq;

/// A named list of dense sets. A deferred family is produced on first use
/// from the sequence realized so far; the factory may create lazy limit
/// trees (ufTreeDeferred) but must not realize them.
struct DenseFamily {
  std::string name;
  std::vector<DensePtr> entries;
  std::function<std::vector<DensePtr>(GenericSeq&)> deferred;
};

/// Explicit list of families standing in for a countable model. Entries
/// are consumed round-robin: entry 0 of every family, then entry 1, and so
/// on. After the list is exhausted an endless tail of height sets follows:
/// round r asks for height hBound + r at every pair then in the support.
struct DenseSchedule {
  std::vector<DenseFamily> families;
  std::size_t mBound = 0;
  std::size_t hBound = 0;
};

/// Which schedule entry was met at which step. `refined` is false when the
/// current multisystem was already a member.
struct MetRecord {
  std::string label;
  std::string family;
  std::size_t step = 0;
  bool refined = false;
};

/// The ⊑-increasing sequence Φ⁰ ⊑ Φ¹ ⊑ … meeting a schedule, with Φ⁰ the
/// empty multisystem. Realization is lazy past the requested prefix and
/// serialized behind one mutex; snapshots are plain values.
class GenericSeq : public std::enable_shared_from_this<GenericSeq> {
 public:
  /// Tail steps per missing height level, on top of one per support pair.
  static constexpr std::size_t kPullBudget = kDefaultPullBudget;

  static std::shared_ptr<GenericSeq> build(SeqPtr p, DenseSchedule schedule, std::size_t steps,
                                           std::string label = "g", std::size_t d = 8);

  const std::string& label() const noexcept { return label_; }
  const SeqPtr& seq() const noexcept { return seq_; }
  std::size_t mBound() const noexcept { return mBound_; }
  std::size_t hBound() const noexcept { return hBound_; }
  std::size_t depth() const noexcept { return d_; }

  /// Realizes steps until the explicit schedule is exhausted.
  void completeSchedule();
  /// Realizes at least n steps beyond Φ⁰.
  void realizeSteps(std::size_t n);

  std::size_t stepCount() const;
  MultiSys step(std::size_t j) const;
  MultiSys current() const;
  std::vector<MetRecord> metLog() const;
  bool scheduleExhausted() const;

  /// First step lying in the family entry with this label, if met.
  std::optional<std::size_t> metAt(const std::string& label) const;

  /// The limit system φ^∞_{ξm}. Completes the explicit schedule and throws
  /// SystemUnavailable if (ξ,m) is still outside the support.
  SysPtr limitSystem(std::size_t xi, std::size_t m);
  /// Same system without any realization or support check.
  SysPtr limitSystemDeferred(std::size_t xi, std::size_t m);

  /// tf(ξ,m,s); s = Λ gives T∞_{ξm}.
  Tree ufTree(std::size_t xi, std::size_t m, const BitString& s = {});
  Tree ufTreeDeferred(std::size_t xi, std::size_t m, const BitString& s = {});

  /// If the tree is some tf(ξ,m,s) of this sequence, its (m, s).
  std::optional<std::pair<std::size_t, BitString>> uPresentation(const Tree& tree,
                                                                  std::size_t xi) const;

 private:
  GenericSeq(SeqPtr p, DenseSchedule schedule, std::string label, std::size_t d);

  struct Pending {
    DensePtr set;
    std::string family;
  };

  // All below require mutex_ held.
  bool advanceLocked();
  std::optional<Pending> nextExplicitLocked();
  std::optional<Pending> nextTailLocked();
  void applyLocked(const Pending& entry);
  Tree realizeLocked(std::size_t xi, std::size_t m, const BitString& s);

  SeqPtr seq_;
  DenseSchedule schedule_;
  std::string label_;
  std::size_t d_;
  std::size_t mBound_;
  std::size_t hBound_;

  mutable std::recursive_mutex mutex_;
  bool busy_ = false;
  std::vector<MultiSys> steps_;
  std::vector<MetRecord> log_;
  std::size_t round_ = 0;
  std::size_t familyCursor_ = 0;
  std::vector<bool> resolved_;
  bool explicitDone_ = false;
  std::size_t tailRound_ = 0;
  std::vector<Pending> tailQueue_;
  std::size_t tailCursor_ = 0;
  std::mutex sysMutex_;
  std::map<Coord, SysPtr> systems_;
};

using GenericPtr = std::shared_ptr<GenericSeq>;

// Family builders over a sequence p.

/// D_{ξmh} = {Φ : hgt Φ(ξ,m) ≥ h} for ξ < xiBound, m < mBound, h < hBound,
/// listed h-major.
DenseFamily heightsFamily(const Seq& p, std::size_t xiBound, std::size_t mBound,
                          std::size_t hBound);

/// For every two distinct pairs (ξ,m), (η,n) with ξ,η < xiBound and
/// m,n < mBound: both in the support and, at some common height below both,
/// every cross pair of entries has disjoint bodies.
DenseFamily disjointnessFamily(const Seq& p, std::size_t xiBound, std::size_t mBound,
                               std::size_t d);

/// D(T) = {Φ : Φ(ξ,m)(Λ) = T for some m}, one set per tree.
DenseFamily seedFamily(const Seq& p, std::size_t xi, const std::vector<Tree>& trees);

/// Δ(ξ, M, D, slen) for M < mBound: (ξ,M) ∈ |Φ|, slen < h = hgt Φ(ξ,M),
/// and every Φ(ξ,M)(t), t ∈ 2^{h−1}, lies inside a member of D.
struct CoverSpec {
  std::string label;
  std::size_t xi = 0;
  std::size_t mBound = 1;
  std::size_t slen = 0;
  std::vector<Tree> predense;
};
DenseFamily coverFamily(const Seq& p, const CoverSpec& spec, std::size_t d);

/// For each top-layer string t of Φ(ξ,M), a member of D containing Φ(ξ,M)(t).
std::optional<std::vector<Tree>> coverWitness(const MultiSys& phi, const CoverSpec& spec,
                                              std::size_t m);

/// A random member of MT(p): one or two coordinates (ξ < len, k < kBound),
/// each holding one of the first nBound enumerated trees of P_ξ.
MultiTree sampleCondition(const Seq& p, std::mt19937_64& rng, std::size_t kBound = 3,
                          std::size_t nBound = 64);

/// The heights entry D_{ξmh} on its own.
DensePtr heightSet(const Seq& p, std::size_t xi, std::size_t m, std::size_t h);

/// U_ξ and p ∨ U.
struct JensenExtension {
  GenericPtr generic;
  std::vector<NotionPtr> uNotions;
  SeqPtr extended;
};

/// U_ξ enumerates tf(ξ,m,s) with m over the support (after the explicit
/// schedule) and s in length-lexicographic order, interleaved.
JensenExtension jensenExtend(const Seq& p, const GenericPtr& g);

/// A finite subset of MT(p) declared pre-dense, used by the desk checks.
struct PreDenseMT {
  std::string label;
  std::vector<MultiTree> members;
};

/// What was scheduled, in typed form, so the lemma checks know what to
/// verify and what to skip.
struct ScheduleRecipe {
  std::size_t xiBound = 0;
  std::size_t mBound = 0;
  std::size_t hBound = 0;
  std::optional<std::size_t> disjointMBound;
  std::vector<std::pair<std::size_t, Tree>> seeds;
  std::vector<CoverSpec> covers;
  std::vector<PreDenseMT> predense;
};

DenseSchedule buildSchedule(const Seq& p, const ScheduleRecipe& recipe, std::size_t d);

struct LemmaOptions {
  std::size_t depth = 8;
  std::size_t maxStringLength = 3;
  std::size_t samples = 50;
  std::uint64_t seed = 1;
};

/// disj1..disj4, uu2, uu3, uu4 over what the recipe scheduled; checks whose
/// family is absent are reported skipped.
Report verifyJensenLemmas(const JensenExtension& ext, const ScheduleRecipe& recipe,
                          const LemmaOptions& opts);

}  // namespace ptforce
