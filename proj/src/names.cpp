#include "ptforce/names.hpp"

#include <algorithm>
#include <map>

#include "ptforce/errors.hpp"

namespace ptforce {

const std::vector<MultiTree>& RealName::cell(std::size_t n, int i) const {
  if (n >= horizon || n >= cells.size())
    fail(ErrorCode::HorizonExceeded,
         label + " has horizon " + std::to_string(horizon) + ", asked for bit " + std::to_string(n));
  return cells[n][i];
}

Tree bitTree(std::size_t n, int i) {
  std::vector<Tree> cones;
  cones.reserve(std::size_t{1} << n);
  for (const auto& x : allStrings(n)) cones.push_back(Tree::cone(x.child(i)));
  return Tree::unite(std::move(cones));
}

RealName canonicalName(std::size_t xi, std::size_t k, std::size_t horizon) {
  RealName name;
  name.label = "pi(" + std::to_string(xi) + "," + std::to_string(k) + ")";
  name.horizon = horizon;
  name.canonical = Coord{xi, k};
  name.cells.resize(horizon);
  for (std::size_t n = 0; n < horizon; ++n)
    for (int i = 0; i < 2; ++i) name.cells[n][i] = {MultiTree({{Coord{xi, k}, bitTree(n, i)}})};
  return name;
}

RealName constantName(int bit, std::size_t horizon) {
  RealName name;
  name.label = "const(" + std::to_string(bit) + ")";
  name.horizon = horizon;
  name.cells.resize(horizon);
  for (auto& cell : name.cells) cell[bit] = {MultiTree()};
  return name;
}

std::set<Coord> relevantCoords(const RealName& name) {
  std::set<Coord> out;
  for (const auto& cell : name.cells)
    for (const auto& side : cell)
      for (const auto& mt : side)
        for (const auto& [c, t] : mt.entries()) out.insert(c);
  return out;
}

Verdict checkName(const RealName& name, std::size_t d) {
  bool unsure = false;
  for (std::size_t n = 0; n < name.cells.size(); ++n)
    for (const auto& a : name.cells[n][0])
      for (const auto& b : name.cells[n][1]) {
        auto v = mtCompatible(a, b, d).verdict;
        if (v.isYes()) return Verdict::no("cells at bit " + std::to_string(n) + " are compatible");
        if (v.isUnknown()) unsure = true;
      }
  return unsure ? Verdict::unknown(d) : Verdict::yes();
}

namespace {

using Candidates = std::vector<std::size_t>;

struct CoverSearch {
  const std::vector<Coord>& coords;
  const std::vector<std::vector<BitString>>& levels;
  const std::vector<MultiTree>& sigma;
  std::map<std::pair<std::size_t, Candidates>, bool> known;
  std::vector<BitString> witness;

  // Whether every tuple over coords[idx..] is inside some candidate. On
  // failure, witness holds a refuting tuple for those coordinates (reversed).
  bool covered(std::size_t idx, const Candidates& cand) {
    if (cand.empty()) {
      for (std::size_t j = levels.size(); j-- > idx;) witness.push_back(levels[j].front());
      return false;
    }
    if (idx == coords.size()) return true;
    auto key = std::make_pair(idx, cand);
    if (known.count(key)) return true;
    // Strings with the same surviving candidates lead to the same subproblem.
    std::map<Candidates, BitString> groups;
    for (const auto& x : levels[idx]) {
      Candidates next;
      for (auto s : cand)
        if (contains(sigma[s].at(coords[idx]), x)) next.push_back(s);
      groups.emplace(std::move(next), x);
    }
    for (const auto& [next, x] : groups) {
      if (!covered(idx + 1, next)) {
        witness.push_back(x);
        return false;
      }
    }
    known[key] = true;
    return true;
  }
};

// P(depth): every tuple of level-`depth` strings of τ over the coordinates
// lies inside one member of Σ.
CoverResult holdsAt(const MultiTree& tau, const std::vector<MultiTree>& sigma,
                    const std::vector<Coord>& coords, std::size_t depth) {
  std::vector<std::vector<BitString>> levels;
  for (const auto& c : coords) {
    levels.push_back(level(tau.at(c), depth));
    if (levels.back().empty()) return {Verdict::yes(), {}};
  }
  CoverSearch search{coords, levels, sigma, {}, {}};
  Candidates all(sigma.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  if (search.covered(0, all)) return {Verdict::yes(), {}};
  std::reverse(search.witness.begin(), search.witness.end());
  CoverResult out;
  std::string text;
  for (std::size_t j = 0; j < coords.size(); ++j) {
    out.tuple.push_back(coords[j].key() + "=" + search.witness[j].display());
    if (!text.empty()) text += " ";
    text += out.tuple.back();
  }
  out.verdict = Verdict::no(text.empty() ? "empty cover" : text);
  return out;
}

}  // namespace

CoverResult coverCheck(const MultiTree& tau, const std::vector<MultiTree>& sigma, std::size_t d) {
  std::set<Coord> coordSet;
  std::optional<std::size_t> determination = 0;
  for (const auto& s : sigma) {
    requireSameSeq(tau.tag(), s.tag());
    for (const auto& [c, t] : s.entries()) {
      coordSet.insert(c);
      auto cd = clopenDepth(t);
      if (!cd) determination.reset();
      else if (determination) determination = std::max(*determination, *cd);
    }
  }
  // Coordinates of τ that no member of Σ constrains cannot break a cover.
  std::vector<Coord> coords(coordSet.begin(), coordSet.end());
  auto atD = holdsAt(tau, sigma, coords, d);
  if (atD.verdict.isNo()) return atD;
  if (!determination) return {Verdict::unknown(d), {}};
  if (*determination <= d) return {Verdict::yes(), {}};
  return holdsAt(tau, sigma, coords, *determination);
}

namespace {

Verdict forcesValue(const MultiTree& tau, const RealName& c, std::size_t n, int bit,
                    std::size_t d, const ForceOptions& opts) {
  const auto& cell = c.cell(n, bit);
  // Covers are monotone in Σ, so the whole cell refutes every subset.
  auto whole = coverCheck(tau, cell, d).verdict;
  if (whole.isNo() || cell.size() <= opts.subsetCap) return whole;
  for (std::size_t size = 1; size <= opts.subsetCap; ++size) {
    std::vector<bool> pick(cell.size(), false);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(size), true);
    do {
      std::vector<MultiTree> subset;
      for (std::size_t i = 0; i < cell.size(); ++i)
        if (pick[i]) subset.push_back(cell[i]);
      if (coverCheck(tau, subset, d).verdict.isYes()) return Verdict::yes();
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }
  return Verdict::unknown(d);
}

}  // namespace

ForcedPrefix forcedPrefix(const MultiTree& tau, const RealName& c, std::size_t d,
                          const ForceOptions& opts) {
  ForcedPrefix out;
  std::string bits;
  for (std::size_t n = 0; n < c.horizon; ++n) {
    auto zero = forcesValue(tau, c, n, 0, d, opts);
    if (zero.isYes()) {
      bits += '0';
      continue;
    }
    auto one = forcesValue(tau, c, n, 1, d, opts);
    if (one.isYes()) {
      bits += '1';
      continue;
    }
    out.undecided = zero.isUnknown() || one.isUnknown();
    break;
  }
  out.bits = BitString::parse(bits);
  return out;
}

Verdict directForces(const MultiTree& tau, const RealName& c, const Assertion& a, std::size_t d,
                     const ForceOptions& opts) {
  if (const auto* v = std::get_if<ValueAssertion>(&a)) {
    if (v->bit != 0 && v->bit != 1) fail(ErrorCode::IllFormed, "bit must be 0 or 1");
    return forcesValue(tau, c, v->n, v->bit, d, opts);
  }
  if (const auto* p = std::get_if<PrefixAssertion>(&a)) {
    if (p->s.size() > c.horizon)
      fail(ErrorCode::HorizonExceeded, "prefix " + p->s.display() + " is longer than the horizon of " + c.label);
    bool unsure = false;
    for (std::size_t n = 0; n < p->s.size(); ++n) {
      auto v = forcesValue(tau, c, n, p->s[n], d, opts);
      if (v.isNo()) return Verdict::no("bit " + std::to_string(n));
      if (v.isUnknown()) unsure = true;
    }
    return unsure ? Verdict::unknown(d) : Verdict::yes();
  }
  // At most one bit can be forced at each position, so the forced prefixes
  // of a name are exactly the prefixes of the greedy one.
  auto mine = forcedPrefix(tau, c, d, opts);
  if (const auto* q = std::get_if<DiffAssertion>(&a)) {
    if (!q->other) fail(ErrorCode::IllFormed, "diff without a second name");
    auto theirs = forcedPrefix(tau, *q->other, d, opts);
    if (!mine.bits.comparableWith(theirs.bits))
      return Verdict::yes();
    if (mine.undecided || theirs.undecided) return Verdict::unknown(d);
    return Verdict::no(mine.bits.display() + " vs " + theirs.bits.display());
  }
  const auto& avoid = std::get<AvoidAssertion>(a);
  if (!contains(avoid.tree, mine.bits)) return Verdict::yes();
  if (mine.undecided) return Verdict::unknown(d);
  return Verdict::no(mine.bits.display() + " is in the tree");
}

}  // namespace ptforce
