#include "ptforce/avoid.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "ptforce/errors.hpp"

namespace ptforce {

namespace {

BitString concat(const BitString& a, const BitString& b) {
  return BitString::parse(a.bits() + b.bits());
}

std::string pairText(const Coord& c) { return "(" + c.key() + ")"; }

SplitSys extendTo(SplitSys sys, std::size_t h) {
  while (sys.height() < h) sys = defaultExtend(sys);
  return sys;
}

// Largest number of σ candidates findAvoidWitness will try.
constexpr std::size_t kWitnessBudget = 20000;

}  // namespace

NormalizedCondition normalize(const MultiTree& u, GenericSeq& g, std::size_t eta, std::size_t M) {
  NormalizedCondition nc;
  nc.eta = eta;
  nc.M = M;
  std::vector<NormalizedItem> first, rest;
  for (const auto& [c, tree] : u.entries()) {
    auto pres = g.uPresentation(tree, c.xi);
    if (!pres)
      fail(ErrorCode::NotUForm, tree.text() + " at " + pairText(c) + " is not a limit tree of " + g.label());
    NormalizedItem item{c, pres->first, pres->second};
    (c.xi == eta && item.m == M ? first : rest).push_back(item);
    nc.h = std::max(nc.h, item.s.size());
  }
  nc.mu = first.size();
  nc.items = std::move(first);
  nc.items.insert(nc.items.end(), rest.begin(), rest.end());

  // Leftmost extension of each string to length h that no earlier item
  // has taken; grow h until every item fits.
  std::vector<BitString> chosen;
  for (;; ++nc.h) {
    chosen.clear();
    std::set<BitString> used;
    bool fits = true;
    for (const auto& item : nc.items) {
      std::optional<BitString> pick;
      for (const auto& tail : allStrings(nc.h - item.s.size())) {
        BitString cand = concat(item.s, tail);
        if (!used.count(cand)) {
          pick = cand;
          break;
        }
      }
      if (!pick) {
        fits = false;
        break;
      }
      used.insert(*pick);
      chosen.push_back(*pick);
    }
    if (fits) break;
  }
  std::map<Coord, Tree> entries;
  for (std::size_t i = 0; i < nc.items.size(); ++i) {
    auto& item = nc.items[i];
    item.s = chosen[i];
    entries[item.coord] = g.ufTreeDeferred(item.coord.xi, item.m, item.s);
  }
  nc.tree = MultiTree(std::move(entries));
  return nc;
}

std::size_t freshIndex(const NormalizedCondition& nc, std::size_t n) {
  std::size_t top = 0;
  for (const auto& item : nc.items)
    if (item.coord.xi == nc.eta) top = std::max(top, item.coord.k);
  return n + 1 + top;
}

RhoData buildRho(const MultiSys& phi, const NormalizedCondition& nc, std::vector<BitString> sbar) {
  const Coord home{nc.eta, nc.M};
  const std::size_t height = phi.at(home).height();
  if (height < 2 || height - 1 <= nc.h)
    fail(ErrorCode::ConditionOneFails,
         pairText(home) + " has height " + std::to_string(height) + ", need more than " +
             std::to_string(nc.h + 1));
  RhoData out;
  out.hbar = height - 1;
  for (const auto& item : nc.items) {
    std::size_t hi = phi.at({item.coord.xi, item.m}).height();
    if (hi != height)
      fail(ErrorCode::ConditionOneFails, "(" + std::to_string(item.coord.xi) + "," +
                                             std::to_string(item.m) + ") has height " +
                                             std::to_string(hi) + ", expected " + std::to_string(height));
  }
  if (sbar.empty())
    for (const auto& item : nc.items)
      sbar.push_back(concat(item.s, BitString::zeros(out.hbar - item.s.size())));
  if (sbar.size() != nc.items.size())
    fail(ErrorCode::ConditionOneFails, "one lengthened string per item is required");
  for (std::size_t i = 0; i < sbar.size(); ++i)
    if (sbar[i].size() != out.hbar || !nc.items[i].s.isPrefixOf(sbar[i]))
      fail(ErrorCode::ConditionOneFails, sbar[i].display() + " does not lengthen " + nc.items[i].s.display());
  out.sbar = sbar;

  std::set<BitString> pinned(sbar.begin(), sbar.begin() + static_cast<std::ptrdiff_t>(nc.mu));
  out.t.assign(sbar.begin(), sbar.begin() + static_cast<std::ptrdiff_t>(nc.mu));
  for (const auto& s : allStrings(out.hbar))
    if (!pinned.count(s)) out.t.push_back(s);

  std::map<Coord, Tree> entries;
  for (std::size_t i = 0; i < nc.items.size(); ++i)
    entries[nc.items[i].coord] = phi.at({nc.items[i].coord.xi, nc.items[i].m}).at(sbar[i]);
  for (std::size_t n = 1; n <= out.t.size(); ++n) {
    std::size_t ell = n <= nc.mu ? nc.items[n - 1].coord.k : freshIndex(nc, n);
    out.ell.push_back(ell);
    if (n <= nc.mu) continue;
    const Coord fresh{nc.eta, ell};
    if (nc.tree.entries().count(fresh) || entries.count(fresh))
      throw std::logic_error("fresh coordinate " + pairText(fresh) + " collides with the condition");
    entries[fresh] = phi.at(home).at(out.t[n - 1]);
  }
  out.rho = MultiTree(std::move(entries));
  return out;
}

DenseOracleDk stemSplittingOracle(const RealName& c, std::size_t eta, std::size_t d) {
  DenseOracleDk oracle;
  oracle.label = "stem";
  oracle.refine = [c, eta, d](const MultiTree& tau, std::size_t k) -> std::optional<MultiTree> {
    const Coord b{eta, k};
    const RealName other = canonicalName(eta, k, c.horizon);
    MultiTree s = tau;
    for (int attempt = 0; attempt < 4; ++attempt) {
      if (directForces(s, c, DiffAssertion{&other}, d).isYes()) return s;
      BitString f = forcedPrefix(s, c, d).bits;
      BitString y = stem(s.at(b));
      if (y.size() < f.size()) {
        // y is a proper prefix of f: leave f at the next bit.
        s = s.with(b, restrict(s.at(b), y.child(1 - f[y.size()])));
        continue;
      }
      if (!c.canonical || *c.canonical == b) return std::nullopt;
      const Coord a = *c.canonical;
      BitString x = stem(s.at(a));
      if (y.size() > x.size()) {
        s = s.with(a, restrict(s.at(a), x.child(1 - y[x.size()])));
      } else {
        s = s.with(a, restrict(s.at(a), x.child(0)));
        s = s.with(b, restrict(s.at(b), y.child(1)));
      }
    }
    return std::nullopt;
  };
  return oracle;
}

DenseOracleDk bruteForceOracle(const RealName& c, std::size_t eta, std::size_t d,
                               std::size_t extra) {
  DenseOracleDk oracle;
  oracle.label = "brute";
  oracle.refine = [c, eta, d, extra](const MultiTree& tau,
                                     std::size_t k) -> std::optional<MultiTree> {
    const RealName other = canonicalName(eta, k, c.horizon);
    std::set<Coord> coordSet = relevantCoords(c);
    coordSet.insert({eta, k});
    std::vector<Coord> coords(coordSet.begin(), coordSet.end());
    std::vector<std::vector<Tree>> options;
    for (const auto& coord : coords) {
      Tree t = tau.at(coord);
      std::vector<Tree> opts{t};
      std::size_t base = stem(t).size();
      for (std::size_t len = base + 1; len <= base + extra; ++len)
        for (const auto& x : level(t, len)) opts.push_back(restrict(t, x));
      options.push_back(std::move(opts));
    }
    std::vector<std::size_t> idx(coords.size(), 0);
    while (true) {
      MultiTree s = tau;
      for (std::size_t j = 0; j < coords.size(); ++j) s = s.with(coords[j], options[j][idx[j]]);
      if (directForces(s, c, DiffAssertion{&other}, d).isYes()) return s;
      std::size_t j = 0;
      while (j < coords.size() && ++idx[j] == options[j].size()) idx[j++] = 0;
      if (j == coords.size()) return std::nullopt;
    }
  };
  return oracle;
}

MultiSys buildPhiPrime(const MultiSys& phi, const MultiTree& sigma, const RhoData& rho,
                       const NormalizedCondition& nc, std::size_t d) {
  std::map<Coord, SplitSys> touched;
  auto sysAt = [&](const Coord& pair) -> SplitSys& {
    auto it = touched.find(pair);
    if (it == touched.end()) it = touched.emplace(pair, phi.at(pair)).first;
    return it->second;
  };
  std::set<Coord> placed;
  for (std::size_t i = 0; i < nc.items.size(); ++i) {
    const auto& item = nc.items[i];
    SplitSys& sys = sysAt({item.coord.xi, item.m});
    sys = sys.with(rho.sbar[i], sigma.at(item.coord));
    placed.insert(item.coord);
  }
  for (std::size_t n = nc.mu + 1; n <= rho.t.size(); ++n) {
    const Coord fresh{nc.eta, rho.ell[n - 1]};
    SplitSys& sys = sysAt({nc.eta, nc.M});
    sys = sys.with(rho.t[n - 1], sigma.at(fresh));
    placed.insert(fresh);
  }
  MultiSys out = phi;
  for (const auto& [pair, sys] : touched) {
    auto v = checkSpe2(sys, d);
    if (v.isNo())
      fail(ErrorCode::StepConflict, pairText(pair) + " breaks spe2 at " + v.witness.value_or("?"));
    out = out.with(pair, sys);
  }
  // Coordinates σ added beyond ρ get fresh pairs of their own.
  for (const auto& [coord, tree] : sigma.entries()) {
    if (placed.count(coord)) continue;
    std::size_t m = coord.k;
    if (!out.at({coord.xi, m}).empty())
      for (m = 0; !out.at({coord.xi, m}).empty(); ++m) {
      }
    out = out.with({coord.xi, m}, SplitSys::seeded(tree));
  }
  // Occurrence also asks that every coordinate of σ name a pair of Φ′.
  for (const auto& [coord, tree] : sigma.entries())
    if (out.at(coord).empty()) out = out.with(coord, SplitSys::seeded(tree));
  return out;
}

std::optional<AvoidWitness> findAvoidWitness(const MultiSys& phi, const NormalizedCondition& nc,
                                             const RealName& c, std::size_t d) {
  const Coord home{nc.eta, nc.M};
  const std::size_t height = phi.at(home).height();
  if (height < 2 || height - 1 <= nc.h) return std::nullopt;
  for (const auto& item : nc.items)
    if (phi.at({item.coord.xi, item.m}).height() != height) return std::nullopt;

  AvoidWitness w;
  w.hbar = height - 1;
  std::vector<Tree> topParts;
  for (const auto& t : allStrings(w.hbar)) topParts.push_back(phi.at(home).at(t));
  w.top = Tree::unite(topParts);

  // Only coordinates the name reads can affect (4); the others take the
  // leftmost lengthening.
  const std::set<Coord> relevant = relevantCoords(c);
  std::vector<Coord> coords;
  std::vector<std::vector<Tree>> options;
  std::vector<std::vector<BitString>> itemOptions;
  for (const auto& item : nc.items) {
    std::vector<BitString> strs;
    for (const auto& tail : allStrings(w.hbar - item.s.size())) {
      strs.push_back(concat(item.s, tail));
      if (!relevant.count(item.coord)) break;
    }
    std::vector<Tree> trees;
    for (const auto& s : strs) trees.push_back(phi.at({item.coord.xi, item.m}).at(s));
    coords.push_back(item.coord);
    options.push_back(std::move(trees));
    itemOptions.push_back(std::move(strs));
  }
  for (const auto& coord : relevant) {
    if (std::find(coords.begin(), coords.end(), coord) != coords.end()) continue;
    std::vector<Tree> trees{Tree::full()};
    std::set<std::string> seen;
    for (const auto& [pair, sys] : phi.entries()) {
      if (pair.xi != coord.xi) continue;
      for (const auto& t : sys.entries())
        if (seen.insert(t.text()).second) trees.push_back(t);
    }
    coords.push_back(coord);
    options.push_back(std::move(trees));
  }

  std::vector<std::size_t> idx(coords.size(), 0);
  const AvoidAssertion avoid{w.top};
  for (std::size_t tried = 0; tried < kWitnessBudget; ++tried) {
    std::map<Coord, Tree> entries;
    for (std::size_t j = 0; j < coords.size(); ++j) entries[coords[j]] = options[j][idx[j]];
    MultiTree sigma(std::move(entries));
    if (occursIn(sigma, phi) && directForces(sigma, c, avoid, d).isYes()) {
      w.sigma = sigma;
      for (std::size_t i = 0; i < nc.items.size(); ++i) w.sbar.push_back(itemOptions[i][idx[i]]);
      return w;
    }
    std::size_t j = 0;
    while (j < coords.size() && ++idx[j] == options[j].size()) idx[j++] = 0;
    if (j == coords.size()) break;
  }
  return std::nullopt;
}

DensePtr avoidanceDense(const Seq& p, const RealName& c, DenseOracleDk oracle,
                        NormalizedCondition nc, std::size_t d, std::shared_ptr<AvoidTrace> trace) {
  auto set = std::make_shared<DenseSet>();
  set->label = "avoid(" + c.label + "," + std::to_string(nc.eta) + "," + std::to_string(nc.M) + ")";
  set->member = [nc, c, d](const MultiSys& phi) {
    return findAvoidWitness(phi, nc, c, d).has_value();
  };
  std::vector<NotionPtr> notions = p.notions();
  set->refine = [nc, c, d, oracle, trace, notions](const MultiSys& phi) {
    if (!oracle.refine) fail(ErrorCode::OracleFailure, "no D(k) oracle for " + c.label);
    auto notion = [&](std::size_t xi) {
      if (xi >= notions.size())
        fail(ErrorCode::ConfigError, "coordinate " + std::to_string(xi) + " beyond the sequence");
      return notions[xi];
    };
    // Reach condition (1) by properly extending every pair involved.
    std::set<Coord> pairs{{nc.eta, nc.M}};
    for (const auto& item : nc.items) pairs.insert({item.coord.xi, item.m});
    std::size_t hbar = nc.h + 1;
    for (const auto& pr : pairs) hbar = std::max(hbar, phi.at(pr).height());
    MultiSys psi = phi;
    for (const auto& pr : pairs) {
      SplitSys sys = phi.at(pr);
      if (sys.empty()) sys = SplitSys::seeded(notion(pr.xi)->first());
      psi = psi.with(pr, extendTo(sys, hbar + 1));
    }

    RhoData rho = buildRho(psi, nc);
    MultiTree sigma = rho.rho;
    for (std::size_t k : rho.ell) {
      auto next = oracle.refine(sigma, k);
      if (!next)
        fail(ErrorCode::OracleFailure, oracle.label + " found nothing for k = " + std::to_string(k));
      if (!mtLeq(*next, sigma, d))
        fail(ErrorCode::OracleFailure, oracle.label + " did not refine its input at k = " + std::to_string(k));
      sigma = *next;
    }
    std::vector<Tree> parts;
    for (std::size_t k : rho.ell) {
      const RealName other = canonicalName(nc.eta, k, c.horizon);
      if (!directForces(sigma, c, DiffAssertion{&other}, d).isYes())
        fail(ErrorCode::OracleFailure, oracle.label + " lost c != " + other.label);
      parts.push_back(sigma.at({nc.eta, k}));
    }
    if (!directForces(sigma, c, AvoidAssertion{Tree::unite(parts)}, d).isYes())
      fail(ErrorCode::OracleFailure, "the refined condition does not avoid the new top layer");

    MultiSys out = buildPhiPrime(psi, sigma, rho, nc, d);
    if (!msRelate(psi, out, d).reduces)
      fail(ErrorCode::StepConflict, "the new multisystem does not reduce its extension");
    if (trace) *trace = AvoidTrace{phi, psi, rho, sigma, out};
    return out;
  };
  return set;
}

AvoidResult deriveAvoider(GenericSeq& g, const std::string& label, const MultiTree& u,
                          const NormalizedCondition& nc, const RealName& c, std::size_t d,
                          const BitString& s0) {
  auto j = g.metAt(label);
  if (!j) fail(ErrorCode::NotMet, label + " was not met by " + g.label());
  const MultiSys phi = g.step(*j);
  auto w = findAvoidWitness(phi, nc, c, d);
  if (!w) fail(ErrorCode::NotMet, "step " + std::to_string(*j) + " has no witness for " + label);

  std::map<Coord, Tree> entries;
  for (std::size_t i = 0; i < nc.items.size(); ++i) {
    const auto& item = nc.items[i];
    entries[item.coord] = g.ufTree(item.coord.xi, item.m, w->sbar[i]);
  }
  for (const auto& [coord, tree] : w->sigma.entries()) {
    if (entries.count(coord)) continue;
    auto occ = locate(tree, coord.xi, phi);
    if (!occ) fail(ErrorCode::NotMet, tree.text() + " does not occur in step " + std::to_string(*j));
    entries[coord] = g.ufTree(coord.xi, occ->m, occ->s);
  }

  AvoidResult out;
  out.v = MultiTree(std::move(entries));
  out.step = *j;
  out.witness = *w;
  out.uTree = g.ufTree(nc.eta, nc.M, s0);
  out.refines = mtLeq(out.v, u, d);
  out.avoids = directForces(out.v, c, AvoidAssertion{out.uTree}, d);
  return out;
}

std::string avoidLabel(const AvoidSpec& spec) {
  return "avoid(" + spec.name.label + "," + std::to_string(spec.eta) + "," + std::to_string(spec.M) + ")";
}

MultiTree conditionFromSpec(GenericSeq& g, const AvoidSpec& spec) {
  std::map<Coord, Tree> entries;
  for (const auto& [coord, ms] : spec.u) entries[coord] = g.ufTreeDeferred(coord.xi, ms.first, ms.second);
  return MultiTree(std::move(entries));
}

DenseFamily avoidanceFamily(const Seq& p, const AvoidSpec& spec, std::size_t d,
                            std::shared_ptr<AvoidTrace> trace) {
  if (spec.oracle != "stem" && spec.oracle != "brute" && spec.oracle != "none")
    fail(ErrorCode::ConfigError, "unknown oracle '" + spec.oracle + "'");
  DenseFamily family;
  family.name = "avoid";
  family.deferred = [p, spec, d, trace](GenericSeq& g) -> std::vector<DensePtr> {
    NormalizedCondition nc = normalize(conditionFromSpec(g, spec), g, spec.eta, spec.M);
    DenseOracleDk oracle{"none", {}};
    if (spec.oracle == "stem") oracle = stemSplittingOracle(spec.name, spec.eta, d);
    if (spec.oracle == "brute") oracle = bruteForceOracle(spec.name, spec.eta, d);
    return {avoidanceDense(p, spec.name, oracle, nc, d, trace)};
  };
  return family;
}

}  // namespace ptforce
