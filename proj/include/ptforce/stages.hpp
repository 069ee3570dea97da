#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ptforce/jensen.hpp"
#include "ptforce/report.hpp"
#include "ptforce/serialize.hpp"

namespace ptforce {

struct StageTrace;

/// Bounds and schedule for a run of A stages. The recipe template is
/// applied at each stage with its coordinates cut to those below the
/// stage; a custom factory replaces it.
struct StageConfig {
  std::string label = "stages";
  std::size_t stages = 2;
  std::size_t depth = 8;
  /// Steps realized past the explicit schedule at each stage.
  std::size_t steps = 0;
  std::uint64_t seed = 1;
  std::size_t samples = 50;
  /// The first this many trees of every coordinate notion get a uu2 seed
  /// set at each stage, standing in for the trees the model contains.
  std::size_t modelSeeds = 32;
  ScheduleRecipe recipe;
  std::function<ScheduleRecipe(std::size_t alpha, const StageTrace& sofar)> recipeFactory;
  /// Extra sets checked like scheduled pre-dense sets; meant to fail.
  std::vector<PreDenseMT> negativeControls;
};

/// The run's defaults: heights m < 3, h < 5, disjointness m < 3, a uu2 seed
/// cone(01) and the "thirds" cover at ξ = 0, and the "split00" pre-dense set.
StageConfig defaultStageConfig();

/// The recipe template restricted to coordinates below alpha.
ScheduleRecipe recipeForStage(const ScheduleRecipe& tmpl, std::size_t alpha);

struct StageRecord {
  std::size_t alpha = 0;
  SeqPtr p;
  ScheduleRecipe recipe;
  std::optional<JensenExtension> ext;
};

/// p^α for α ≤ A, with the Jensen extension u^α for 1 ≤ α < A.
struct StageTrace {
  StageConfig config;
  std::vector<StageRecord> stages;
  const SeqPtr& final() const { return stages.back().p; }
};

/// P^λ_ξ = P₀ joined with U^α_ξ for ξ < α < λ. StageBudget when a
/// realization budget runs out; ConfigError on bad bounds.
StageTrace runStages(const StageConfig& cfg);

/// τ over p^α read over p^γ; absent coordinates stay Full. StageOrder if
/// γ < α, NotMember if τ is not over p^α.
MultiTree embedMultitree(const StageTrace& trace, const MultiTree& tau, std::size_t alpha,
                         std::size_t gamma);

/// jden, xiden, the xiden/uu3 cross-check, stage monotonicity and the
/// default assignment, one report entry each.
Report checkPreDensity(const StageTrace& trace, std::size_t d);

/// Jensen lemma checks of every stage, entries prefixed "stage<α>:".
Report checkStageLemmas(const StageTrace& trace, std::size_t d);

/// Φ ⊑⁺ Ψ and Φ′ reducing Ψ give Φ ⊑ Φ′ and Φ ⊑⁺ Φ′, over random triples.
CheckResult lemmaXrCheck(std::size_t trials, std::uint64_t seed, std::size_t d);

/// Sorted-key JSON of the run and its SHA-256.
Json traceJson(const StageTrace& trace);
std::string traceHash(const StageTrace& trace);

/// Reads the structured config. ConfigError on missing or malformed fields
/// (the heights family is mandatory).
StageConfig stageConfigFromJson(const Json& j);

}  // namespace ptforce
