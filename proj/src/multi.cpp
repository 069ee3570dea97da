#include "ptforce/multi.hpp"

#include <algorithm>

#include "ptforce/errors.hpp"

namespace ptforce {

Coord Coord::parse(const std::string& key) {
  auto comma = key.find(',');
  if (comma == std::string::npos) fail(ErrorCode::ParseError, "bad coordinate '" + key + "'");
  try {
    return {std::stoul(key.substr(0, comma)), std::stoul(key.substr(comma + 1))};
  } catch (const std::exception&) {
    fail(ErrorCode::ParseError, "bad coordinate '" + key + "'");
  }
}

SeqPtr joinSeq(const Seq& p, const Seq& q) {
  if (p.length() != q.length())
    fail(ErrorCode::LengthMismatch, "lengths " + std::to_string(p.length()) + " and " +
                                        std::to_string(q.length()));
  std::vector<NotionPtr> notions;
  for (std::size_t xi = 0; xi < p.length(); ++xi)
    notions.push_back(joinNotions(p.at(xi), q.at(xi)));
  return std::make_shared<Seq>("join(" + p.label() + "," + q.label() + ")", std::move(notions));
}

MultiTree::MultiTree(std::map<Coord, Tree> entries, std::string tag) : tag_(std::move(tag)) {
  for (auto& [c, t] : entries) {
    Tree nf = normalForm(t);
    if (nf.kind() != Tree::Kind::Full) entries_.emplace(c, std::move(nf));
  }
}

Tree MultiTree::at(const Coord& c) const {
  auto it = entries_.find(c);
  return it == entries_.end() ? Tree::full() : it->second;
}

std::set<Coord> MultiTree::support() const {
  std::set<Coord> out;
  for (const auto& [c, t] : entries_) out.insert(c);
  return out;
}

MultiTree MultiTree::with(const Coord& c, Tree tree) const {
  auto entries = entries_;
  entries.erase(c);
  entries.emplace(c, std::move(tree));
  return MultiTree(std::move(entries), tag_);
}

MultiTree MultiTree::retagged(std::string tag) const {
  MultiTree out = *this;
  out.tag_ = std::move(tag);
  return out;
}

MultiSys::MultiSys(std::map<Coord, SplitSys> entries, std::string tag) : tag_(std::move(tag)) {
  for (auto& [c, s] : entries)
    if (!s.empty()) entries_.emplace(c, std::move(s));
}

const SplitSys& MultiSys::at(const Coord& c) const {
  static const SplitSys kEmpty;
  auto it = entries_.find(c);
  return it == entries_.end() ? kEmpty : it->second;
}

std::set<Coord> MultiSys::support() const {
  std::set<Coord> out;
  for (const auto& [c, s] : entries_) out.insert(c);
  return out;
}

MultiSys MultiSys::with(const Coord& c, SplitSys sys) const {
  auto entries = entries_;
  entries.erase(c);
  entries.emplace(c, std::move(sys));
  return MultiSys(std::move(entries), tag_);
}

void requireSameSeq(const std::string& a, const std::string& b) {
  if (!a.empty() && !b.empty() && a != b)
    fail(ErrorCode::SeqMismatch, "'" + a + "' vs '" + b + "'");
}

bool boundTo(const MultiTree& tree, const Seq& seq) {
  for (const auto& [c, t] : tree.entries())
    if (c.xi >= seq.length() || !seq.at(c.xi)->accepts(t)) return false;
  return true;
}

bool mtLeq(const MultiTree& sigma, const MultiTree& tau, std::size_t d) {
  requireSameSeq(sigma.tag(), tau.tag());
  for (const auto& [c, t] : tau.entries())
    if (!subsetToDepth(sigma.at(c), t, d)) return false;
  return true;
}

namespace {

std::optional<Tree> coneRefinement(const BitString& c, const Tree& other) {
  // Cone(c) meets `other` iff c ∈ other, and then other↾c lies in both.
  if (!contains(other, c)) return std::nullopt;
  return restrict(other, c);
}

}  // namespace

TreeCompat treeCompatible(const Tree& a, const Tree& b, std::size_t d) {
  if (knownSubset(a, b)) return {Verdict::yes(), a};
  if (knownSubset(b, a)) return {Verdict::yes(), b};
  if (a.kind() == Tree::Kind::Cone) {
    if (auto r = coneRefinement(a.str(), b)) return {Verdict::yes(), r};
    return {Verdict::no(a.str().display()), std::nullopt};
  }
  if (b.kind() == Tree::Kind::Cone) {
    if (auto r = coneRefinement(b.str(), a)) return {Verdict::yes(), r};
    return {Verdict::no(b.str().display()), std::nullopt};
  }
  if (a.kind() == Tree::Kind::Fusion && b.kind() == Tree::Kind::Fusion &&
      a.system() == b.system() && a.system()->trusted() && !a.str().comparableWith(b.str()))
    return {Verdict::no(a.str().display() + "|" + b.str().display()), std::nullopt};

  std::vector<BitString> common;
  for (const auto& x : level(a, d))
    if (contains(b, x)) common.push_back(x);
  if (common.empty()) return {Verdict::no("depth " + std::to_string(d)), std::nullopt};
  for (const auto& x : common) {
    Tree ra = restrict(a, x);
    if (knownSubset(ra, b)) return {Verdict::yes(), ra};
    Tree rb = restrict(b, x);
    if (knownSubset(rb, a)) return {Verdict::yes(), rb};
  }
  return {Verdict::unknown(d), std::nullopt};
}

MultiCompat mtCompatible(const MultiTree& sigma, const MultiTree& tau, std::size_t d) {
  requireSameSeq(sigma.tag(), tau.tag());
  std::map<Coord, Tree> joined;
  bool unknown = false;
  std::size_t unknownDepth = d;
  std::set<Coord> coords = sigma.support();
  for (const auto& c : tau.support()) coords.insert(c);
  for (const auto& c : coords) {
    auto si = sigma.entries().find(c);
    auto ti = tau.entries().find(c);
    if (si == sigma.entries().end()) {
      joined.emplace(c, ti->second);
      continue;
    }
    if (ti == tau.entries().end()) {
      joined.emplace(c, si->second);
      continue;
    }
    TreeCompat tc = treeCompatible(si->second, ti->second, d);
    if (tc.verdict.isNo())
      return {Verdict::no(c.key() + ":" + tc.verdict.witness.value_or("")), std::nullopt};
    if (tc.verdict.isUnknown()) {
      unknown = true;
      unknownDepth = tc.verdict.checkedDepth;
      continue;
    }
    joined.emplace(c, *tc.refinement);
  }
  if (unknown) return {Verdict::unknown(unknownDepth), std::nullopt};
  const std::string& tag = sigma.tag().empty() ? tau.tag() : sigma.tag();
  return {Verdict::yes(), MultiTree(std::move(joined), tag)};
}

MsRelations msRelate(const MultiSys& older, const MultiSys& newer, std::size_t d) {
  requireSameSeq(older.tag(), newer.tag());
  MsRelations rel;
  std::set<Coord> coords = older.support();
  for (const auto& c : newer.support()) coords.insert(c);

  rel.extends = std::all_of(coords.begin(), coords.end(), [&](const Coord& c) {
    return relate(older.at(c), newer.at(c), d).extends;
  });

  const auto oldSupport = older.support();
  const auto newSupport = newer.support();
  const bool covered = std::includes(newSupport.begin(), newSupport.end(), oldSupport.begin(),
                                     oldSupport.end());
  rel.reduces = covered && std::all_of(oldSupport.begin(), oldSupport.end(), [&](const Coord& c) {
                  return relate(older.at(c), newer.at(c), d).reduces;
                });
  rel.strictlyExtends =
      covered && std::all_of(oldSupport.begin(), oldSupport.end(), [&](const Coord& c) {
        return relate(older.at(c), newer.at(c), d).properlyExtends;
      });
  return rel;
}

std::optional<Occurrence> locate(const Tree& tree, std::size_t xi, const MultiSys& phi) {
  for (const auto& [c, sys] : phi.entries()) {
    if (c.xi != xi) continue;
    for (std::size_t len = 0; len < sys.height(); ++len)
      for (const auto& s : allStrings(len))
        if (sys.at(s) == tree) return Occurrence{c.k, s};
  }
  return std::nullopt;
}

bool occursIn(const MultiTree& tau, const MultiSys& phi) {
  requireSameSeq(tau.tag(), phi.tag());
  const auto phiSupport = phi.support();
  for (const auto& [c, t] : tau.entries()) {
    if (!phiSupport.contains(c)) return false;
    if (!locate(t, c.xi, phi)) return false;
  }
  return true;
}

}  // namespace ptforce
