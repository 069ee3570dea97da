#pragma once

#include <set>
#include <string>
#include <vector>

#include "ptforce/bitstring.hpp"
#include "ptforce/splitsys.hpp"
#include "ptforce/tree.hpp"

namespace testsupport {

using namespace ptforce;

inline BitString bs(const char* s) { return BitString::parse(s); }

inline std::set<std::string> levelSet(const Tree& t, std::size_t n) {
  std::set<std::string> out;
  for (const auto& x : level(t, n)) out.insert(x.bits());
  return out;
}

/// T_s = I_s, a trusted system.
inline SysPtr coneSystem() {
  return std::make_shared<FullSplitSys>(
      "cones", [](const BitString& s) { return Tree::cone(s); }, true);
}

/// Violates spe2: full on the first two layers, cone(1) on layer 2 and
/// cone(00) from layer 3 on. Its fusion has the endpoint 1.
inline SysPtr corruptedSystem() {
  return std::make_shared<FullSplitSys>(
      "corrupt",
      [](const BitString& s) {
        if (s.size() <= 1) return Tree::full();
        if (s.size() == 2) return Tree::cone(BitString::parse("1"));
        return Tree::cone(BitString::parse("00"));
      },
      false);
}

/// Brute force: t ∈ ⋃_{r ⊇ at, |r| = n} sys(r) for every n in [max(|at|,1), maxN].
inline bool fusionOracle(const FullSplitSys& sys, const BitString& at, const BitString& t,
                         std::size_t maxN) {
  for (std::size_t n = std::max<std::size_t>(at.size(), 1); n <= maxN; ++n) {
    bool hit = false;
    for (const auto& r : allStrings(n))
      if (at.isPrefixOf(r) && contains(sys.at(r), t)) {
        hit = true;
        break;
      }
    if (!hit) return false;
  }
  return true;
}

/// All cones with stems of length <= n, plus Full.
inline std::vector<Tree> smallCones(std::size_t n) {
  std::vector<Tree> out;
  for (const auto& s : allStringsUpTo(n)) out.push_back(Tree::cone(s));
  return out;
}

}  // namespace testsupport
