#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ptforce/jensen.hpp"
#include "ptforce/multi.hpp"
#include "ptforce/names.hpp"

namespace ptforce {

struct NormalizedItem {
  Coord coord;     // (ξᵢ, kᵢ)
  std::size_t m = 0;
  BitString s;     // u(ξᵢ,kᵢ) = tf(ξᵢ, m, s)
};

/// A condition u of U-trees rewritten so all strings are distinct and of
/// one length h, with the (η,M) coordinates first (there are μ of them).
struct NormalizedCondition {
  std::size_t eta = 0;
  std::size_t M = 0;
  std::size_t h = 0;
  std::size_t mu = 0;
  std::vector<NormalizedItem> items;
  MultiTree tree;
};

/// NotUForm if an entry is not tf(ξ,m,s) of g.
NormalizedCondition normalize(const MultiTree& u, GenericSeq& g, std::size_t eta, std::size_t M);

/// ℓ_n for n > μ (1-based): n + 1 + max{kᵢ : ξᵢ = η}, the max of nothing being 0.
std::size_t freshIndex(const NormalizedCondition& nc, std::size_t n);

struct RhoData {
  std::size_t hbar = 0;
  std::vector<BitString> sbar;  // one per item
  std::vector<BitString> t;     // t_1 … t_{2^h̄}, first μ pinned to s̄ᵢ
  std::vector<std::size_t> ell; // ℓ_1 … ℓ_{2^h̄}
  MultiTree rho;
};

/// Φ must have height h̄+1 > h+1 at (η,M) and at every (ξᵢ,mᵢ)
/// (ConditionOneFails otherwise). Default s̄ᵢ = sᵢ⌢0…0.
RhoData buildRho(const MultiSys& phi, const NormalizedCondition& nc,
                 std::vector<BitString> sbar = {});

/// Refines τ to a condition that directly forces c ≠ π_{ηk}, or gives up.
struct DenseOracleDk {
  std::string label;
  std::function<std::optional<MultiTree>(const MultiTree& tau, std::size_t k)> refine;
};

/// Shrinks τ(η,k), or the name's own coordinate for canonical names, at its
/// stem until the forced prefixes part ways.
DenseOracleDk stemSplittingOracle(const RealName& c, std::size_t eta, std::size_t d);

/// Tries restrictions up to `extra` levels past the stems at the name's
/// coordinates and (η,k), in product order.
DenseOracleDk bruteForceOracle(const RealName& c, std::size_t eta, std::size_t d,
                               std::size_t extra = 3);

/// Steps (I)–(IV): top-layer entries of the touched pairs replaced by σ,
/// and height-1 systems for coordinates of σ that have no pair in Φ yet.
/// StepConflict if a replaced system fails spe2.
MultiSys buildPhiPrime(const MultiSys& phi, const MultiTree& sigma, const RhoData& rho,
                       const NormalizedCondition& nc, std::size_t d);

struct AvoidWitness {
  std::size_t hbar = 0;
  std::vector<BitString> sbar;
  MultiTree sigma;
  Tree top;  // ⋃ Φ(η,M)(t) over t ∈ 2^h̄
};

/// A σ showing Φ satisfies (1)–(4). σ ranges over the item coordinates and
/// the name's coordinates, with entries drawn from Φ.
std::optional<AvoidWitness> findAvoidWitness(const MultiSys& phi, const NormalizedCondition& nc,
                                             const RealName& c, std::size_t d);

/// What the last refine call saw and built.
struct AvoidTrace {
  std::optional<MultiSys> input;
  std::optional<MultiSys> extended;
  std::optional<RhoData> rho;
  std::optional<MultiTree> sigma;
  std::optional<MultiSys> output;
};

DensePtr avoidanceDense(const Seq& p, const RealName& c, DenseOracleDk oracle,
                        NormalizedCondition nc, std::size_t d,
                        std::shared_ptr<AvoidTrace> trace = nullptr);

struct AvoidResult {
  MultiTree v;
  std::size_t step = 0;
  AvoidWitness witness;
  Tree uTree;
  bool refines = false;  // v ≤ u
  Verdict avoids;        // v directly forces c ∉ [U]
};

/// Finds the step where `label` was met and builds v from its witness.
/// NotMet if the set was never met.
AvoidResult deriveAvoider(GenericSeq& g, const std::string& label, const MultiTree& u,
                          const NormalizedCondition& nc, const RealName& c, std::size_t d,
                          const BitString& s0 = {});

/// Declarative form used by configs: u(ξ,k) = tf(ξ, m, s).
struct AvoidSpec {
  RealName name;
  std::size_t eta = 0;
  std::size_t M = 0;
  std::map<Coord, std::pair<std::size_t, BitString>> u;
  std::string oracle = "stem";
};

std::string avoidLabel(const AvoidSpec& spec);
MultiTree conditionFromSpec(GenericSeq& g, const AvoidSpec& spec);

/// A deferred family holding one avoidance set; u is built from the lazy
/// limit trees of the sequence when the family is first reached.
DenseFamily avoidanceFamily(const Seq& p, const AvoidSpec& spec, std::size_t d,
                            std::shared_ptr<AvoidTrace> trace = nullptr);

}  // namespace ptforce
