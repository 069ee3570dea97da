#pragma once

#include <cstddef>
#include <string>

#include "ptforce/avoid.hpp"
#include "ptforce/serialize.hpp"

namespace ptforce {

/// A toy run over a sequence of Cohen notions: heights for m < mBound and
/// h < hBound, then the avoidance set of the spec.
struct AvoidDemoConfig {
  std::size_t length = 2;
  std::size_t mBound = 2;
  std::size_t hBound = 4;
  std::size_t steps = 12;
  std::size_t depth = 10;
  AvoidSpec spec;
};

/// c = π_{1,0} with horizon 12, η = 0, M = 0, u over three coordinates.
AvoidDemoConfig canonicalDemoConfig();
/// The constant-zero name with horizon 10 and an empty u.
AvoidDemoConfig constantDemoConfig();

/// Name specs: "pi(xi,k)", "zero" or "one".
RealName nameFromSpec(const std::string& spec, std::size_t horizon);

AvoidDemoConfig avoidDemoConfigFromJson(const Json& j);

struct AvoidDemoResult {
  AvoidResult result;
  MultiTree u;
  GenericPtr generic;
  /// u, ρ, σ, Φ′, v and the verdicts.
  Json trace;
  bool ok() const { return result.refines && result.avoids.isYes(); }
};

AvoidDemoResult runAvoidDemo(const AvoidDemoConfig& cfg);

}  // namespace ptforce
