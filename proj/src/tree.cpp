#include "ptforce/tree.hpp"

#include <algorithm>
#include <sstream>

#include "ptforce/errors.hpp"

namespace ptforce {

struct Tree::Node {
  Kind kind = Kind::Full;
  BitString str;
  std::vector<Tree> parts;
  SysPtr sys;
  bool coneUnion = false;
  std::vector<std::string> coneIndex;
};

Tree::Tree() {
  static const auto full = std::make_shared<const Node>();
  node_ = full;
}

Tree Tree::cone(BitString s) {
  if (s.empty()) return full();
  auto node = std::make_shared<Node>();
  node->kind = Kind::Cone;
  node->str = std::move(s);
  return Tree(std::move(node));
}

Tree Tree::restriction(Tree base, BitString s) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Restrict;
  node->str = std::move(s);
  node->parts.push_back(std::move(base));
  return Tree(std::move(node));
}

Tree Tree::unite(std::vector<Tree> parts) {
  if (parts.empty()) fail(ErrorCode::IllFormed, "union of no trees");
  std::vector<Tree> flat;
  for (auto& p : parts) {
    if (p.kind() == Kind::Full) return full();
    if (p.kind() == Kind::Union)
      flat.insert(flat.end(), p.parts().begin(), p.parts().end());
    else
      flat.push_back(std::move(p));
  }
  std::vector<std::pair<std::string, Tree>> keyed;
  keyed.reserve(flat.size());
  for (auto& p : flat) keyed.emplace_back(p.text(), std::move(p));
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  keyed.erase(std::unique(keyed.begin(), keyed.end(),
                          [](const auto& a, const auto& b) { return a.first == b.first; }),
              keyed.end());
  if (keyed.size() == 1) return keyed.front().second;

  auto node = std::make_shared<Node>();
  node->kind = Kind::Union;
  node->coneUnion = true;
  for (auto& [key, p] : keyed) {
    if (p.kind() == Kind::Cone)
      node->coneIndex.push_back(p.str().bits());
    else
      node->coneUnion = false;
    node->parts.push_back(std::move(p));
  }
  if (node->coneUnion)
    std::sort(node->coneIndex.begin(), node->coneIndex.end());
  else
    node->coneIndex.clear();
  return Tree(std::move(node));
}

Tree Tree::fusion(SysPtr sys, BitString at) {
  if (!sys) fail(ErrorCode::IllFormed, "fusion over a null system");
  auto node = std::make_shared<Node>();
  node->kind = Kind::Fusion;
  node->str = std::move(at);
  node->sys = std::move(sys);
  return Tree(std::move(node));
}

Tree::Kind Tree::kind() const noexcept { return node_->kind; }
const BitString& Tree::str() const noexcept { return node_->str; }
const Tree& Tree::base() const { return node_->parts.front(); }
const std::vector<Tree>& Tree::parts() const { return node_->parts; }
const SysPtr& Tree::system() const { return node_->sys; }
bool Tree::coneUnion() const noexcept { return node_->coneUnion; }
const std::vector<std::string>& Tree::coneIndex() const { return node_->coneIndex; }

std::string Tree::text() const {
  switch (kind()) {
    case Kind::Full: return "full";
    case Kind::Cone: return "cone(" + str().bits() + ")";
    case Kind::Restrict: return "restrict(" + base().text() + "," + str().bits() + ")";
    case Kind::Union: {
      std::string out = "union(";
      for (std::size_t i = 0; i < parts().size(); ++i) {
        if (i) out += ",";
        out += parts()[i].text();
      }
      return out + ")";
    }
    case Kind::Fusion:
      if (str().empty()) return "fusion(" + system()->label() + ")";
      return "fusion(" + system()->label() + "," + str().bits() + ")";
  }
  return "?";
}

bool operator==(const Tree& a, const Tree& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind() || a.str() != b.str()) return false;
  if (a.kind() == Tree::Kind::Fusion) return a.system() == b.system();
  if (a.parts().size() != b.parts().size()) return false;
  for (std::size_t i = 0; i < a.parts().size(); ++i)
    if (!(a.parts()[i] == b.parts()[i])) return false;
  return true;
}

FullSplitSys::FullSplitSys(std::string label, Realizer realize, bool trusted,
                           SysProvenance provenance)
    : label_(std::move(label)),
      realize_(std::move(realize)),
      trusted_(trusted),
      provenance_(provenance) {}

Tree FullSplitSys::at(const BitString& s) const {
  {
    std::lock_guard lock(mutex_);
    if (auto it = memo_.find(s); it != memo_.end()) return it->second;
  }
  // Realize outside the lock: realizers may consult other systems.
  Tree value = realize_(s);
  std::lock_guard lock(mutex_);
  return memo_.emplace(s, std::move(value)).first->second;
}

namespace {

bool coneUnionContains(const std::vector<std::string>& index, const BitString& t) {
  const std::string& bits = t.bits();
  // Some cone stem is a prefix of t ...
  for (std::size_t len = 0; len <= bits.size(); ++len)
    if (std::binary_search(index.begin(), index.end(), bits.substr(0, len))) return true;
  // ... or some cone stem extends t.
  auto it = std::lower_bound(index.begin(), index.end(), bits);
  return it != index.end() && it->compare(0, bits.size(), bits) == 0;
}

bool fusionContains(const FullSplitSys& sys, const BitString& at, const BitString& t) {
  // ⋃_{r ⊇ at, |r| = n} T_r decreases in n and is stable from n = |t| + 1 on.
  const std::size_t n = std::max(t.size() + 1, at.size());
  if (sys.trusted()) {
    std::function<bool(const BitString&)> descend = [&](const BitString& r) {
      if (!contains(sys.at(r), t)) return false;
      if (r.size() >= n) return true;
      return descend(r.child(0)) || descend(r.child(1));
    };
    return descend(at);
  }
  const std::size_t extra = n - at.size();
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << extra); ++v) {
    BitString r = BitString::parse(at.bits() + BitString::fromIndex(extra, v).bits());
    if (contains(sys.at(r), t)) return true;
  }
  return false;
}

}  // namespace

bool contains(const Tree& tree, const BitString& t) {
  switch (tree.kind()) {
    case Tree::Kind::Full: return true;
    case Tree::Kind::Cone: return tree.str().comparableWith(t);
    case Tree::Kind::Restrict:
      if (!contains(tree.base(), tree.str()))
        fail(ErrorCode::IllFormed, "restriction string " + tree.str().display() +
                                       " not in " + tree.base().text());
      return tree.str().comparableWith(t) && contains(tree.base(), t);
    case Tree::Kind::Union:
      if (tree.coneUnion()) return coneUnionContains(tree.coneIndex(), t);
      return std::any_of(tree.parts().begin(), tree.parts().end(),
                         [&](const Tree& p) { return contains(p, t); });
    case Tree::Kind::Fusion: return fusionContains(*tree.system(), tree.str(), t);
  }
  return false;
}

std::vector<BitString> level(const Tree& tree, std::size_t n) {
  if (tree.kind() == Tree::Kind::Full) return allStrings(n);
  if (tree.kind() == Tree::Kind::Cone) {
    const BitString& s = tree.str();
    if (n <= s.size()) return {s.prefix(n)};
    std::vector<BitString> out;
    const std::size_t extra = n - s.size();
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << extra); ++v)
      out.push_back(BitString::parse(s.bits() + BitString::fromIndex(extra, v).bits()));
    return out;
  }
  std::vector<BitString> frontier;
  if (contains(tree, BitString())) frontier.emplace_back();
  for (std::size_t len = 0; len < n; ++len) {
    std::vector<BitString> next;
    for (const auto& x : frontier)
      for (int b = 0; b < 2; ++b) {
        BitString c = x.child(b);
        if (contains(tree, c)) next.push_back(std::move(c));
      }
    frontier = std::move(next);
  }
  return frontier;
}

namespace {

BitString walkStem(const Tree& tree, std::size_t cap) {
  BitString cur;
  if (!contains(tree, cur)) fail(ErrorCode::IllFormed, "empty tree " + tree.text());
  for (std::size_t steps = 0;; ++steps) {
    const bool left = contains(tree, cur.child(0));
    const bool right = contains(tree, cur.child(1));
    if (left && right) return cur;
    if (!left && !right)
      fail(ErrorCode::IllFormed, "endpoint " + cur.display() + " in " + tree.text());
    if (steps >= cap)
      fail(ErrorCode::StemDepthExceeded,
           "no split within " + std::to_string(cap) + " levels of " + tree.text());
    cur = cur.child(left ? 0 : 1);
  }
}

// Least r ⊇ at with u ⊆ stem(T_r); then tf(at)↾u = tf(r) by spe2.
BitString fusionAnchorFor(const FullSplitSys& sys, const BitString& at, const BitString& u) {
  BitString r = at;
  for (std::size_t guard = 0; guard <= u.size() + 1; ++guard) {
    BitString st = stem(sys.at(r));
    if (u.isPrefixOf(st)) return r;
    if (!st.isPrefixOf(u))
      fail(ErrorCode::NotInTree, u.display() + " is not in the fusion tree of " + sys.label());
    r = r.child(u[st.size()]);
  }
  fail(ErrorCode::IllFormed, "fusion anchor search did not terminate for " + sys.label());
}

Tree restrictNormal(const Tree& tree, const BitString& s) {
  switch (tree.kind()) {
    case Tree::Kind::Full: return Tree::cone(s);
    case Tree::Kind::Cone:
      return tree.str().isPrefixOf(s) ? Tree::cone(s) : tree;
    case Tree::Kind::Union: {
      std::vector<Tree> kept;
      for (const auto& p : tree.parts())
        if (contains(p, s)) kept.push_back(restrictNormal(p, s));
      return Tree::unite(std::move(kept));
    }
    case Tree::Kind::Fusion:
      if (tree.system()->trusted())
        return Tree::fusion(tree.system(), fusionAnchorFor(*tree.system(), tree.str(), s));
      return Tree::restriction(tree, s);
    case Tree::Kind::Restrict: {
      // Only reached for restrictions over untrusted fusion trees.
      const BitString& u = tree.str();
      if (s.isPrefixOf(u)) return tree;
      return Tree::restriction(tree.base(), s);
    }
  }
  return tree;
}

}  // namespace

Tree normalForm(const Tree& tree) {
  switch (tree.kind()) {
    case Tree::Kind::Restrict: {
      Tree base = normalForm(tree.base());
      if (!contains(base, tree.str()))
        fail(ErrorCode::IllFormed,
             "restriction string " + tree.str().display() + " not in " + base.text());
      return restrictNormal(base, tree.str());
    }
    case Tree::Kind::Union: {
      std::vector<Tree> parts;
      for (const auto& p : tree.parts()) parts.push_back(normalForm(p));
      return Tree::unite(std::move(parts));
    }
    default: return tree;
  }
}

Tree restrict(const Tree& tree, const BitString& s) {
  Tree base = normalForm(tree);
  if (!contains(base, s))
    fail(ErrorCode::NotInTree, s.display() + " is not in " + base.text());
  return restrictNormal(base, s);
}

BitString stem(const Tree& tree, std::size_t cap) {
  switch (tree.kind()) {
    case Tree::Kind::Full: return {};
    case Tree::Kind::Cone: return tree.str();
    case Tree::Kind::Fusion:
      if (tree.system()->trusted()) return stem(tree.system()->at(tree.str()), cap);
      return walkStem(tree, cap);
    case Tree::Kind::Restrict: {
      Tree nf = normalForm(tree);
      if (nf.kind() == Tree::Kind::Restrict) return walkStem(nf, cap);
      return stem(nf, cap);
    }
    case Tree::Kind::Union: return walkStem(tree, cap);
  }
  return {};
}

Verdict isPerfectToDepth(const Tree& tree, std::size_t d, std::size_t walkCap) {
  std::vector<BitString> frontier = level(tree, 0);
  if (frontier.empty()) return Verdict::no("empty");
  for (std::size_t len = 0; len < d; ++len) {
    std::vector<BitString> next;
    for (const auto& x : frontier) {
      BitString y = x;
      bool split = false;
      while (y.size() < d + walkCap) {
        const bool left = contains(tree, y.child(0));
        const bool right = contains(tree, y.child(1));
        if (!left && !right) return Verdict::no(y.display());
        if (left && right) {
          split = true;
          break;
        }
        y = y.child(left ? 0 : 1);
      }
      if (!split) return Verdict::unknown(d);
      for (int b = 0; b < 2; ++b)
        if (contains(tree, x.child(b))) next.push_back(x.child(b));
    }
    frontier = std::move(next);
  }
  return Verdict::yes();
}

bool subsetToDepth(const Tree& a, const Tree& b, std::size_t d) {
  for (const auto& x : level(a, d))
    if (!contains(b, x)) return false;
  return true;
}

bool equalToDepth(const Tree& a, const Tree& b, std::size_t d) {
  return level(a, d) == level(b, d);
}

namespace {
constexpr std::size_t kSeparationFrontier = 4096;
}  // namespace

std::optional<std::size_t> separationDepth(const Tree& a, const Tree& b, std::size_t cap) {
  std::vector<BitString> common;
  if (contains(a, BitString()) && contains(b, BitString())) common.emplace_back();
  for (std::size_t k = 0; k <= cap; ++k) {
    if (common.empty()) return k;
    if (k == cap) break;
    std::vector<BitString> next;
    for (const auto& x : common)
      for (int bit = 0; bit < 2; ++bit) {
        BitString c = x.child(bit);
        if (contains(a, c) && contains(b, c)) next.push_back(std::move(c));
      }
    common = std::move(next);
    if (common.size() > kSeparationFrontier) return std::nullopt;
  }
  return std::nullopt;
}

bool disjointAtDepth(const Tree& a, const Tree& b, std::size_t d) {
  for (const auto& x : level(a, d))
    if (contains(b, x)) return false;
  return true;
}

std::optional<std::size_t> clopenDepth(const Tree& tree) {
  switch (tree.kind()) {
    case Tree::Kind::Full: return 0;
    case Tree::Kind::Cone: return tree.str().size();
    case Tree::Kind::Union: {
      std::size_t depth = 0;
      for (const auto& p : tree.parts()) {
        auto pd = clopenDepth(p);
        if (!pd) return std::nullopt;
        depth = std::max(depth, *pd);
      }
      return depth;
    }
    case Tree::Kind::Restrict: {
      auto bd = clopenDepth(tree.base());
      if (!bd) return std::nullopt;
      return std::max(*bd, tree.str().size());
    }
    case Tree::Kind::Fusion: return std::nullopt;
  }
  return std::nullopt;
}

bool knownSubset(const Tree& a, const Tree& b) {
  if (a == b || b.kind() == Tree::Kind::Full) return true;
  if (b.kind() == Tree::Kind::Cone) return b.str().isPrefixOf(stem(a));
  if (auto depth = clopenDepth(b)) return subsetToDepth(a, b, *depth);
  if (a.kind() == Tree::Kind::Union)
    return std::all_of(a.parts().begin(), a.parts().end(),
                       [&](const Tree& p) { return knownSubset(p, b); });
  if (b.kind() == Tree::Kind::Restrict)
    return knownSubset(a, b.base()) && knownSubset(a, Tree::cone(b.str()));
  if (b.kind() == Tree::Kind::Union &&
      std::any_of(b.parts().begin(), b.parts().end(),
                  [&](const Tree& p) { return knownSubset(a, p); }))
    return true;
  if (a.kind() == Tree::Kind::Restrict) return knownSubset(a.base(), b);
  if (a.kind() == Tree::Kind::Fusion && a.system()->trusted()) {
    if (b.kind() == Tree::Kind::Fusion && b.system() == a.system() &&
        b.str().isPrefixOf(a.str()))
      return true;
    return knownSubset(a.system()->at(a.str()), b);
  }
  return false;
}

std::string toDot(const Tree& tree, std::size_t depth) {
  std::ostringstream out;
  out << "digraph tree {\n";
  std::vector<BitString> frontier = level(tree, 0);
  for (const auto& x : frontier) out << "  \"" << x.display() << "\";\n";
  for (std::size_t len = 0; len < depth; ++len) {
    std::vector<BitString> next;
    for (const auto& x : frontier)
      for (int b = 0; b < 2; ++b) {
        BitString c = x.child(b);
        if (!contains(tree, c)) continue;
        out << "  \"" << c.display() << "\";\n";
        out << "  \"" << x.display() << "\" -> \"" << c.display() << "\";\n";
        next.push_back(std::move(c));
      }
    frontier = std::move(next);
  }
  out << "}\n";
  return out.str();
}

}  // namespace ptforce
