#include "ptforce/ptf.hpp"

#include <algorithm>

#include "ptforce/errors.hpp"

namespace ptforce {

Tree ForcingNotion::first() const {
  auto t = nth(0);
  if (!t) fail(ErrorCode::NotMember, "notion " + label_ + " enumerates nothing");
  return *t;
}

bool ForcingNotion::accepts(const Tree& tree) const { return member_(normalForm(tree)); }

BitString nthStringOf(const Tree& tree, std::size_t k) {
  for (std::size_t len = 0;; ++len) {
    auto lv = level(tree, len);
    if (k < lv.size()) return lv[k];
    k -= lv.size();
  }
}

NotionPtr closeUnderRestriction(std::vector<Tree> generators) {
  if (generators.empty()) fail(ErrorCode::IllFormed, "no generators");
  std::string label = "gen(";
  for (auto& g : generators) {
    g = normalForm(g);  // throws IllFormed
    if (label.size() > 4) label += ",";
    label += g.text();
  }
  label += ")";
  auto gens = std::make_shared<const std::vector<Tree>>(std::move(generators));
  auto enumerate = [gens](std::size_t n) -> std::optional<Tree> {
    const Tree& g = (*gens)[n % gens->size()];
    return restrict(g, nthStringOf(g, n / gens->size()));
  };
  auto member = [gens](const Tree& t) {
    for (const auto& g : *gens) {
      if (g == t) return true;
      BitString s = stem(t);
      if (contains(g, s) && restrict(g, s) == t) return true;
    }
    return false;
  };
  return std::make_shared<ForcingNotion>(std::move(label), enumerate, member);
}

NotionPtr cohenForcing() {
  static const NotionPtr p0 = std::make_shared<ForcingNotion>(
      "p0", [](std::size_t n) -> std::optional<Tree> { return Tree::cone(BitString::nth(n)); },
      [](const Tree& t) {
        return t.kind() == Tree::Kind::Full || t.kind() == Tree::Kind::Cone;
      });
  return p0;
}

NotionPtr joinNotions(NotionPtr a, NotionPtr b) {
  std::string label = "join(" + a->label() + "," + b->label() + ")";
  auto enumerate = [a, b](std::size_t n) -> std::optional<Tree> {
    const auto& primary = (n % 2 == 0) ? a : b;
    const auto& other = (n % 2 == 0) ? b : a;
    if (auto t = primary->nth(n / 2)) return t;
    return other->nth(n / 2);
  };
  auto member = [a, b](const Tree& t) { return a->accepts(t) || b->accepts(t); };
  return std::make_shared<ForcingNotion>(std::move(label), enumerate, member);
}

ShrinkResult disjointShrink(const ForcingNotion& p, const Tree& t, const ForcingNotion& pPrime,
                            const Tree& tPrime, std::size_t d) {
  if (!p.accepts(t)) fail(ErrorCode::NotMember, t.text() + " is not in " + p.label());
  if (!pPrime.accepts(tPrime))
    fail(ErrorCode::NotMember, tPrime.text() + " is not in " + pPrime.label());

  // Agreement past both stems means the stems coincide, so the split below
  // stays inside both trees.
  const std::size_t bound = std::max({d, stem(t).size() + 1, stem(tPrime).size() + 1});
  for (std::size_t k = 0; k <= bound; ++k) {
    for (const auto& x : level(t, k))
      if (!contains(tPrime, x)) return {restrict(t, x), tPrime, x.size()};
    for (const auto& x : level(tPrime, k))
      if (!contains(t, x)) return {t, restrict(tPrime, x), x.size()};
  }
  BitString s = stem(t);
  return {restrict(t, s.child(0)), restrict(tPrime, s.child(1)), s.size() + 1};
}

}  // namespace ptforce
