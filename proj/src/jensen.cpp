#include "ptforce/jensen.hpp"

#include <algorithm>
#include <set>

#include "ptforce/errors.hpp"

namespace ptforce {

namespace {

NotionPtr notionAt(const Seq& p, std::size_t xi) {
  if (xi >= p.length())
    fail(ErrorCode::ConfigError, "coordinate " + std::to_string(xi) + " beyond sequence '" +
                                     p.label() + "' of length " + std::to_string(p.length()));
  return p.at(xi);
}

SplitSys seededOrCurrent(const MultiSys& phi, const Coord& c, const NotionPtr& notion) {
  const SplitSys& sys = phi.at(c);
  return sys.empty() ? SplitSys::seeded(notion->first()) : sys;
}

SplitSys extendTo(SplitSys sys, std::size_t h) {
  while (sys.height() < h) sys = defaultExtend(sys);
  return sys;
}

std::string coordLabel(std::size_t xi, std::size_t m) {
  return std::to_string(xi) + "," + std::to_string(m);
}

}  // namespace

// ---------------------------------------------------------------------------
// GenericSeq

GenericSeq::GenericSeq(SeqPtr p, DenseSchedule schedule, std::string label, std::size_t d)
    : seq_(std::move(p)),
      schedule_(std::move(schedule)),
      label_(std::move(label)),
      d_(d),
      mBound_(schedule_.mBound),
      hBound_(schedule_.hBound),
      resolved_(schedule_.families.size(), false) {
  steps_.emplace_back(std::map<Coord, SplitSys>{}, seq_->label());
}

std::shared_ptr<GenericSeq> GenericSeq::build(SeqPtr p, DenseSchedule schedule, std::size_t steps,
                                              std::string label, std::size_t d) {
  std::shared_ptr<GenericSeq> g(new GenericSeq(std::move(p), std::move(schedule), std::move(label), d));
  g->realizeSteps(steps);
  return g;
}

std::optional<GenericSeq::Pending> GenericSeq::nextExplicitLocked() {
  while (!explicitDone_) {
    if (familyCursor_ == schedule_.families.size()) {
      familyCursor_ = 0;
      ++round_;
      std::size_t longest = 0;
      for (const auto& f : schedule_.families) longest = std::max(longest, f.entries.size());
      if (round_ >= longest) explicitDone_ = true;
      continue;
    }
    const std::size_t f = familyCursor_++;
    auto& family = schedule_.families[f];
    if (family.deferred && !resolved_[f]) {
      resolved_[f] = true;
      auto extra = family.deferred(*this);
      family.entries.insert(family.entries.end(), extra.begin(), extra.end());
    }
    if (round_ < family.entries.size()) return Pending{family.entries[round_], family.name};
  }
  return std::nullopt;
}

std::optional<GenericSeq::Pending> GenericSeq::nextTailLocked() {
  if (tailCursor_ == tailQueue_.size()) {
    tailQueue_.clear();
    tailCursor_ = 0;
    const std::size_t h = hBound_ + tailRound_++;
    for (const auto& c : steps_.back().support())
      tailQueue_.push_back({heightSet(*seq_, c.xi, c.k, h), "tail"});
    if (tailQueue_.empty()) return std::nullopt;
  }
  return tailQueue_[tailCursor_++];
}

void GenericSeq::applyLocked(const Pending& entry) {
  const MultiSys& cur = steps_.back();
  if (entry.set->member(cur)) {
    log_.push_back({entry.set->label, entry.family, steps_.size() - 1, false});
    return;
  }
  MultiSys next = entry.set->refine(cur);
  if (!entry.set->member(next))
    fail(ErrorCode::RefinerContract, entry.set->label + ": refined multisystem is not a member");
  if (!msRelate(cur, next, d_).extends)
    fail(ErrorCode::RefinerContract, entry.set->label + ": refined multisystem does not extend");
  steps_.push_back(std::move(next));
  log_.push_back({entry.set->label, entry.family, steps_.size() - 1, true});
}

bool GenericSeq::advanceLocked() {
  if (busy_) throw std::logic_error("re-entrant realization of " + label_);
  busy_ = true;
  struct Reset {
    bool& flag;
    ~Reset() { flag = false; }
  } reset{busy_};
  const std::size_t before = steps_.size();
  while (steps_.size() == before) {
    auto entry = nextExplicitLocked();
    if (!entry) entry = nextTailLocked();
    if (!entry) return false;
    applyLocked(*entry);
  }
  return true;
}

void GenericSeq::completeSchedule() {
  std::lock_guard lock(mutex_);
  if (busy_) throw std::logic_error("re-entrant realization of " + label_);
  busy_ = true;
  struct Reset {
    bool& flag;
    ~Reset() { flag = false; }
  } reset{busy_};
  while (auto entry = nextExplicitLocked()) applyLocked(*entry);
}

void GenericSeq::realizeSteps(std::size_t n) {
  std::lock_guard lock(mutex_);
  while (steps_.size() <= n)
    if (!advanceLocked())
      fail(ErrorCode::ChainStalled, label_ + ": schedule exhausted with an empty support");
}

std::size_t GenericSeq::stepCount() const {
  std::lock_guard lock(mutex_);
  return steps_.size() - 1;
}

MultiSys GenericSeq::step(std::size_t j) const {
  std::lock_guard lock(mutex_);
  return steps_.at(j);
}

MultiSys GenericSeq::current() const {
  std::lock_guard lock(mutex_);
  return steps_.back();
}

std::vector<MetRecord> GenericSeq::metLog() const {
  std::lock_guard lock(mutex_);
  return log_;
}

bool GenericSeq::scheduleExhausted() const {
  std::lock_guard lock(mutex_);
  return explicitDone_;
}

std::optional<std::size_t> GenericSeq::metAt(const std::string& label) const {
  std::lock_guard lock(mutex_);
  for (const auto& r : log_)
    if (r.label == label) return r.step;
  return std::nullopt;
}

Tree GenericSeq::realizeLocked(std::size_t xi, std::size_t m, const BitString& s) {
  const Coord c{xi, m};
  auto height = [&] { return steps_.back().at(c).height(); };
  if (height() <= s.size()) {
    // One tail round visits every pair, so the budget per level grows with
    // the support. Explicit entries are not charged.
    const std::size_t levels = s.size() + 1 - height();
    std::size_t pulls = 0;
    while (height() <= s.size()) {
      if (explicitDone_ && !steps_.back().support().contains(c))
        fail(ErrorCode::SystemUnavailable,
             label_ + ": (" + coordLabel(xi, m) + ") is never in the support");
      const std::size_t allowance = (kPullBudget + steps_.back().support().size()) * levels;
      if (explicitDone_ && pulls++ >= allowance)
        fail(ErrorCode::SystemUnavailable, label_ + ": pull budget exhausted realizing (" +
                                               coordLabel(xi, m) + ")(" + s.display() + ")");
      if (!advanceLocked())
        fail(ErrorCode::SystemUnavailable, label_ + ": no dense sets left to realize (" +
                                               coordLabel(xi, m) + ")");
    }
  }
  return steps_.back().at(c).at(s);
}

SysPtr GenericSeq::limitSystemDeferred(std::size_t xi, std::size_t m) {
  std::lock_guard lock(sysMutex_);
  const Coord c{xi, m};
  auto it = systems_.find(c);
  if (it != systems_.end()) return it->second;
  std::weak_ptr<GenericSeq> weak = weak_from_this();
  auto sys = std::make_shared<FullSplitSys>(
      label_ + "/" + std::to_string(xi) + "/" + std::to_string(m),
      [weak, xi, m](const BitString& s) {
        auto self = weak.lock();
        if (!self) fail(ErrorCode::SystemUnavailable, "generic sequence released");
        std::lock_guard lock(self->mutex_);
        return self->realizeLocked(xi, m, s);
      },
      true, SysProvenance{this, xi, m});
  systems_.emplace(c, sys);
  return sys;
}

SysPtr GenericSeq::limitSystem(std::size_t xi, std::size_t m) {
  {
    std::lock_guard lock(mutex_);
    const Coord c{xi, m};
    if (!steps_.back().support().contains(c)) {
      if (busy_) throw std::logic_error("re-entrant realization of " + label_);
      busy_ = true;
      struct Reset {
        bool& flag;
        ~Reset() { flag = false; }
      } reset{busy_};
      while (!steps_.back().support().contains(c)) {
        auto entry = nextExplicitLocked();
        if (!entry) break;
        applyLocked(*entry);
      }
      if (!steps_.back().support().contains(c))
        fail(ErrorCode::SystemUnavailable,
             label_ + ": (" + coordLabel(xi, m) + ") is never in the support");
    }
  }
  return limitSystemDeferred(xi, m);
}

Tree GenericSeq::ufTree(std::size_t xi, std::size_t m, const BitString& s) {
  return Tree::fusion(limitSystem(xi, m), s);
}

Tree GenericSeq::ufTreeDeferred(std::size_t xi, std::size_t m, const BitString& s) {
  return Tree::fusion(limitSystemDeferred(xi, m), s);
}

std::optional<std::pair<std::size_t, BitString>> GenericSeq::uPresentation(const Tree& tree,
                                                                        std::size_t xi) const {
  if (tree.kind() != Tree::Kind::Fusion) return std::nullopt;
  const auto& prov = tree.system()->provenance();
  if (prov.owner != this || prov.xi != xi) return std::nullopt;
  return std::make_pair(prov.m, tree.str());
}

// ---------------------------------------------------------------------------
// Families

DensePtr heightSet(const Seq& p, std::size_t xi, std::size_t m, std::size_t h) {
  NotionPtr notion = notionAt(p, xi);
  const Coord c{xi, m};
  auto set = std::make_shared<DenseSet>();
  set->label = "heights(" + coordLabel(xi, m) + "," + std::to_string(h) + ")";
  set->member = [c, h](const MultiSys& phi) { return phi.at(c).height() >= h; };
  set->refine = [c, h, notion](const MultiSys& phi) {
    return phi.with(c, extendTo(seededOrCurrent(phi, c, notion), std::max<std::size_t>(h, 1)));
  };
  return set;
}

DenseFamily heightsFamily(const Seq& p, std::size_t xiBound, std::size_t mBound,
                          std::size_t hBound) {
  DenseFamily family{"heights", {}, {}};
  for (std::size_t h = 0; h < hBound; ++h)
    for (std::size_t xi = 0; xi < xiBound; ++xi)
      for (std::size_t m = 0; m < mBound; ++m) family.entries.push_back(heightSet(p, xi, m, h));
  return family;
}

namespace {

bool topLayersSeparated(const SplitSys& a, const SplitSys& b) {
  if (a.empty() || b.empty()) return false;
  const std::size_t h = std::min(a.height(), b.height()) - 1;
  const auto layer = allStrings(h);
  for (const auto& s : layer)
    for (const auto& t : layer)
      if (!separationDepth(a.at(s), b.at(t))) return false;
  return true;
}

}  // namespace

namespace {

struct Slot {
  Coord owner;
  SplitSys* sys;
  BitString at;
  NotionPtr notion;
};

// Restricts every top entry to a node `spread` levels past its stem (or a
// little deeper), taking the least node whose restriction is separated from
// all entries already placed for other coordinates.
bool separateJointly(std::vector<Slot>& slots, std::size_t spread) {
  constexpr std::size_t kExtraLevels = 4;
  std::vector<Tree> placed;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const Tree entry = slots[i].sys->at(slots[i].at);
    const std::size_t base = stem(entry).size() + spread;
    std::optional<Tree> chosen;
    for (std::size_t k = base; k <= base + kExtraLevels && !chosen; ++k)
      for (const auto& x : level(entry, k)) {
        Tree r = restrict(entry, x);
        bool clear = true;
        for (std::size_t j = 0; j < i && clear; ++j)
          if (!(slots[j].owner == slots[i].owner)) clear = separationDepth(r, placed[j]).has_value();
        if (clear) {
          chosen = r;
          break;
        }
      }
    if (!chosen) return false;
    placed.push_back(*chosen);
  }
  for (std::size_t i = 0; i < slots.size(); ++i)
    *slots[i].sys = slots[i].sys->with(slots[i].at, placed[i]);
  return true;
}

// Pairwise shrinking of every cross pair, one pair at a time.
void separatePairwise(std::vector<Slot>& slots, std::size_t d) {
  for (std::size_t i = 0; i < slots.size(); ++i)
    for (std::size_t j = i + 1; j < slots.size(); ++j) {
      if (slots[i].owner == slots[j].owner) continue;
      auto shrunk = disjointShrink(*slots[i].notion, slots[i].sys->at(slots[i].at),
                                   *slots[j].notion, slots[j].sys->at(slots[j].at), d);
      *slots[i].sys = slots[i].sys->with(slots[i].at, shrunk.first);
      *slots[j].sys = slots[j].sys->with(slots[j].at, shrunk.second);
    }
}

}  // namespace

DenseFamily disjointnessFamily(const Seq& p, std::size_t xiBound, std::size_t mBound,
                               std::size_t d) {
  DenseFamily family{"disjointness", {}, {}};
  std::vector<Coord> coords;
  std::vector<NotionPtr> notions;
  for (std::size_t xi = 0; xi < xiBound; ++xi)
    for (std::size_t m = 0; m < mBound; ++m) {
      coords.push_back({xi, m});
      notions.push_back(notionAt(p, xi));
    }
  std::size_t spread = 0;
  while ((std::size_t{1} << spread) < coords.size()) ++spread;

  // One refinement separates every pair of the range at a fresh common
  // layer, so the remaining entries of the family are usually met already.
  auto refine = [coords, notions, spread, d](const MultiSys& phi) {
    std::vector<SplitSys> systems;
    std::size_t h = 0;
    for (std::size_t i = 0; i < coords.size(); ++i) {
      systems.push_back(seededOrCurrent(phi, coords[i], notions[i]));
      h = std::max(h, systems.back().height());
    }
    for (auto& sys : systems) sys = extendTo(sys, h + 1);
    std::vector<Slot> slots;
    for (std::size_t i = 0; i < coords.size(); ++i)
      for (const auto& t : allStrings(h)) slots.push_back({coords[i], &systems[i], t, notions[i]});
    if (!separateJointly(slots, spread)) separatePairwise(slots, d);
    MultiSys out = phi;
    for (std::size_t i = 0; i < coords.size(); ++i) out = out.with(coords[i], systems[i]);
    return out;
  };

  for (std::size_t i = 0; i < coords.size(); ++i)
    for (std::size_t j = i + 1; j < coords.size(); ++j) {
      const Coord a = coords[i];
      const Coord b = coords[j];
      auto set = std::make_shared<DenseSet>();
      set->label = "disjoint(" + a.key() + "|" + b.key() + ")";
      set->member = [a, b](const MultiSys& phi) {
        return topLayersSeparated(phi.at(a), phi.at(b));
      };
      set->refine = refine;
      family.entries.push_back(set);
    }
  return family;
}

DenseFamily seedFamily(const Seq& p, std::size_t xi, const std::vector<Tree>& trees) {
  DenseFamily family{"uu2", {}, {}};
  NotionPtr notion = notionAt(p, xi);
  for (const auto& raw : trees) {
    Tree t = normalForm(raw);
    if (!notion->accepts(t))
      fail(ErrorCode::ConfigError, t.text() + " is not in " + notion->label());
    auto set = std::make_shared<DenseSet>();
    set->label = "uu2(" + std::to_string(xi) + "," + t.text() + ")";
    set->member = [xi, t](const MultiSys& phi) {
      for (const auto& [c, sys] : phi.entries())
        if (c.xi == xi && sys.at(BitString()) == t) return true;
      return false;
    };
    set->refine = [xi, t](const MultiSys& phi) {
      std::size_t m = 0;
      while (phi.support().contains({xi, m})) ++m;
      return phi.with({xi, m}, SplitSys::seeded(t));
    };
    family.entries.push_back(set);
  }
  return family;
}

std::optional<std::vector<Tree>> coverWitness(const MultiSys& phi, const CoverSpec& spec,
                                              std::size_t m) {
  const SplitSys& sys = phi.at({spec.xi, m});
  if (sys.empty()) return std::nullopt;
  std::vector<Tree> out;
  for (const auto& t : allStrings(sys.height() - 1)) {
    auto it = std::find_if(spec.predense.begin(), spec.predense.end(),
                           [&](const Tree& s) { return knownSubset(sys.at(t), s); });
    if (it == spec.predense.end()) return std::nullopt;
    out.push_back(*it);
  }
  return out;
}

DenseFamily coverFamily(const Seq& p, const CoverSpec& spec, std::size_t d) {
  DenseFamily family{"uu3", {}, {}};
  NotionPtr notion = notionAt(p, spec.xi);
  CoverSpec normalized = spec;
  for (auto& t : normalized.predense) {
    t = normalForm(t);
    if (!notion->accepts(t))
      fail(ErrorCode::ConfigError, t.text() + " is not in " + notion->label());
  }
  for (std::size_t m = 0; m < spec.mBound; ++m) {
    const Coord c{spec.xi, m};
    auto set = std::make_shared<DenseSet>();
    set->label = "uu3(" + spec.label + "," + c.key() + ")";
    set->member = [normalized, c](const MultiSys& phi) {
      const SplitSys& sys = phi.at(c);
      return sys.height() > normalized.slen && coverWitness(phi, normalized, c.k).has_value();
    };
    set->refine = [normalized, c, notion, d](const MultiSys& phi) {
      SplitSys sys = seededOrCurrent(phi, c, notion);
      sys = extendTo(sys, std::max(phi.at(c).height() + 1, normalized.slen + 1));
      for (const auto& t : allStrings(sys.height() - 1)) {
        const Tree entry = sys.at(t);
        std::optional<Tree> refined;
        for (const auto& s : normalized.predense) {
          auto tc = treeCompatible(entry, s, d);
          if (tc.verdict.isYes() && knownSubset(*tc.refinement, s)) {
            refined = tc.refinement;
            break;
          }
        }
        if (!refined)
          fail(ErrorCode::RefinerContract, normalized.label + ": no member compatible with " +
                                               entry.text());
        sys = sys.with(t, *refined);
      }
      return phi.with(c, sys);
    };
    family.entries.push_back(set);
  }
  return family;
}

DenseSchedule buildSchedule(const Seq& p, const ScheduleRecipe& recipe, std::size_t d) {
  DenseSchedule schedule;
  schedule.mBound = recipe.mBound;
  schedule.hBound = recipe.hBound;
  schedule.families.push_back(heightsFamily(p, recipe.xiBound, recipe.mBound, recipe.hBound));
  if (recipe.disjointMBound)
    schedule.families.push_back(disjointnessFamily(p, recipe.xiBound, *recipe.disjointMBound, d));
  if (!recipe.seeds.empty()) {
    DenseFamily seeds{"uu2", {}, {}};
    for (const auto& [xi, t] : recipe.seeds) {
      auto f = seedFamily(p, xi, {t});
      seeds.entries.insert(seeds.entries.end(), f.entries.begin(), f.entries.end());
    }
    schedule.families.push_back(std::move(seeds));
  }
  for (const auto& cover : recipe.covers) schedule.families.push_back(coverFamily(p, cover, d));
  return schedule;
}

// ---------------------------------------------------------------------------
// Jensen extension

JensenExtension jensenExtend(const Seq& p, const GenericPtr& g) {
  g->completeSchedule();
  if (g->seq()->length() != p.length())
    fail(ErrorCode::LengthMismatch, "generic sequence built over a sequence of another length");
  const MultiSys last = g->current();
  JensenExtension ext;
  ext.generic = g;
  for (std::size_t xi = 0; xi < p.length(); ++xi) {
    std::vector<std::size_t> ms;
    for (const auto& c : last.support())
      if (c.xi == xi) ms.push_back(c.k);
    std::set<std::size_t> msSet(ms.begin(), ms.end());
    std::weak_ptr<GenericSeq> weak = g;
    auto enumerate = [weak, xi, ms](std::size_t n) -> std::optional<Tree> {
      auto self = weak.lock();
      if (!self || ms.empty()) return std::nullopt;
      return self->ufTree(xi, ms[n % ms.size()], BitString::nth(n / ms.size()));
    };
    const GenericSeq* raw = g.get();
    auto member = [raw, xi, msSet](const Tree& t) {
      auto pres = raw->uPresentation(t, xi);
      return pres && msSet.contains(pres->first);
    };
    ext.uNotions.push_back(std::make_shared<ForcingNotion>(
        "U(" + g->label() + "," + std::to_string(xi) + ")", enumerate, member));
  }
  Seq uSeq("U(" + g->label() + ")", ext.uNotions);
  ext.extended = joinSeq(p, uSeq);
  return ext;
}

MultiTree sampleCondition(const Seq& p, std::mt19937_64& rng, std::size_t kBound,
                          std::size_t nBound) {
  std::map<Coord, Tree> entries;
  const std::size_t count = 1 + rng() % 2;
  for (std::size_t i = 0; i < count && p.length() > 0; ++i) {
    const Coord c{static_cast<std::size_t>(rng() % p.length()),
                  static_cast<std::size_t>(rng() % kBound)};
    const std::size_t n = rng() % nBound;
    if (auto t = p.at(c.xi)->nth(n)) entries[c] = *t;
  }
  return MultiTree(std::move(entries));
}

// ---------------------------------------------------------------------------
// Lemma checks

namespace {

std::string stringsLabel(const BitString& s, const BitString& t) {
  return s.display() + "," + t.display();
}

}  // namespace

Report verifyJensenLemmas(const JensenExtension& ext, const ScheduleRecipe& recipe,
                          const LemmaOptions& opts) {
  Report report;
  const GenericPtr& g = ext.generic;
  g->completeSchedule();
  const std::size_t d = opts.depth;
  const auto strings = allStringsUpTo(opts.maxStringLength);
  const MultiSys last = g->current();
  std::vector<Coord> pairs;
  for (const auto& c : last.support())
    if (c.k < recipe.mBound) pairs.push_back(c);

  // disj1: distinct limit trees are disjoint.
  if (!recipe.disjointMBound) {
    report.add("disj1", CheckStatus::Skipped, "no disjointness family scheduled");
  } else {
    std::string witness;
    std::vector<Coord> coords;
    for (std::size_t xi = 0; xi < recipe.xiBound; ++xi)
      for (std::size_t m = 0; m < *recipe.disjointMBound; ++m) coords.push_back({xi, m});
    std::size_t checked = 0;
    for (std::size_t i = 0; i < coords.size() && witness.empty(); ++i)
      for (std::size_t j = i + 1; j < coords.size() && witness.empty(); ++j) {
        ++checked;
        if (!disjointAtDepth(g->ufTree(coords[i].xi, coords[i].k),
                             g->ufTree(coords[j].xi, coords[j].k), d))
          witness = coords[i].key() + "|" + coords[j].key();
      }
    report.add("disj1", witness.empty() ? CheckStatus::Pass : CheckStatus::Fail,
               witness.empty() ? std::to_string(checked) + " pairs" : witness);
  }

  if (recipe.hBound == 0) {
    for (const char* name : {"disj2", "disj3", "disj4"})
      report.add(name, CheckStatus::Skipped, "no heights family scheduled");
  } else {
    std::string w2, w3, w4;
    for (const auto& c : pairs) {
      SysPtr sys = g->limitSystem(c.xi, c.k);
      Tree top = g->ufTree(c.xi, c.k);
      for (const auto& s : strings) {
        Tree tf = g->ufTree(c.xi, c.k, s);
        Tree ts = sys->at(s);
        // disj2: tf(s) = T∞ ∩ T_s levelwise.
        for (std::size_t k = 0; k <= d && w2.empty(); ++k) {
          std::vector<BitString> both;
          for (const auto& x : level(top, k))
            if (contains(ts, x)) both.push_back(x);
          if (level(tf, k) != both) w2 = c.key() + ":" + s.display();
        }
        for (const auto& t : strings) {
          // disj3: s ⊆ t gives T_t ⊆ T_s and tf(t) ⊆ tf(s).
          if (s.isPrefixOf(t) && w3.empty()) {
            if (!subsetToDepth(sys->at(t), ts, d) ||
                !subsetToDepth(g->ufTree(c.xi, c.k, t), tf, d))
              w3 = c.key() + ":" + stringsLabel(s, t);
          }
          // disj4: incomparable strings give disjoint trees.
          if (!s.comparableWith(t) && s < t && w4.empty()) {
            if (!disjointAtDepth(tf, g->ufTree(c.xi, c.k, t), d) ||
                !separationDepth(ts, sys->at(t)))
              w4 = c.key() + ":" + stringsLabel(s, t);
          }
        }
      }
    }
    const std::string scope = std::to_string(pairs.size()) + " systems";
    report.add("disj2", w2.empty() ? CheckStatus::Pass : CheckStatus::Fail, w2.empty() ? scope : w2);
    report.add("disj3", w3.empty() ? CheckStatus::Pass : CheckStatus::Fail, w3.empty() ? scope : w3);
    report.add("disj4", w4.empty() ? CheckStatus::Pass : CheckStatus::Fail, w4.empty() ? scope : w4);
  }

  // uu2: every scheduled T contains some U ∈ U_ξ.
  if (recipe.seeds.empty()) {
    report.add("uu2", CheckStatus::Skipped, "no D(T) family scheduled");
  } else {
    std::string witness;
    for (const auto& [xi, raw] : recipe.seeds) {
      Tree t = normalForm(raw);
      const std::string label = "uu2(" + std::to_string(xi) + "," + t.text() + ")";
      auto j = g->metAt(label);
      std::optional<std::size_t> m;
      const MultiSys phi = j ? g->step(*j) : MultiSys();
      if (j)
        for (const auto& [c, sys] : phi.entries())
          if (c.xi == xi && sys.at(BitString()) == t) {
            m = c.k;
            break;
          }
      if (!m || !subsetToDepth(g->ufTree(xi, *m), t, d)) {
        witness = label;
        break;
      }
    }
    report.add("uu2", witness.empty() ? CheckStatus::Pass : CheckStatus::Fail,
               witness.empty() ? std::to_string(recipe.seeds.size()) + " trees" : witness);
  }

  // uu3: every U at a scheduled copy is covered by finitely many members.
  if (recipe.covers.empty()) {
    report.add("uu3", CheckStatus::Skipped, "no cover family scheduled");
  } else {
    std::string witness;
    std::size_t largest = 0;
    for (const auto& spec : recipe.covers) {
      for (std::size_t m = 0; m < spec.mBound && witness.empty(); ++m) {
        const std::string label = "uu3(" + spec.label + "," + coordLabel(spec.xi, m) + ")";
        auto j = g->metAt(label);
        if (!j) {
          witness = label + " not met";
          break;
        }
        CoverSpec normalized = spec;
        for (auto& t : normalized.predense) t = normalForm(t);
        const MultiSys phi = g->step(*j);
        auto cover = coverWitness(phi, normalized, m);
        const std::size_t h = phi.at({spec.xi, m}).height();
        std::vector<Tree> distinct;
        for (const auto& t : cover.value_or(std::vector<Tree>{}))
          if (std::find(distinct.begin(), distinct.end(), t) == distinct.end()) distinct.push_back(t);
        if (!cover || distinct.size() > (std::size_t{1} << (h - 1))) {
          witness = label + " cover";
          break;
        }
        largest = std::max(largest, distinct.size());
        for (const auto& s : allStringsUpTo(spec.slen)) {
          Tree u = g->ufTree(spec.xi, m, s);
          for (const auto& x : level(u, d)) {
            bool covered = std::any_of(distinct.begin(), distinct.end(),
                                       [&](const Tree& t) { return contains(t, x); });
            if (!covered) {
              witness = label + ":" + s.display() + ":" + x.display();
              break;
            }
          }
          if (!witness.empty()) break;
        }
      }
    }
    report.add("uu3", witness.empty() ? CheckStatus::Pass : CheckStatus::Fail,
               witness.empty() ? "largest subcover " + std::to_string(largest) : witness);
  }

  // uu4: declared pre-dense subsets of MT(p) stay pre-dense in MT(p ∨ U).
  if (recipe.predense.empty()) {
    report.add("uu4", CheckStatus::Skipped, "no pre-dense multitree sets declared");
  } else {
    std::mt19937_64 rng(opts.seed);
    std::string witness;
    for (std::size_t i = 0; i < opts.samples && witness.empty(); ++i) {
      MultiTree tau = sampleCondition(*ext.extended, rng);
      for (const auto& set : recipe.predense) {
        bool hit = std::any_of(set.members.begin(), set.members.end(), [&](const MultiTree& s) {
          return mtCompatible(tau, s, d).verdict.isYes();
        });
        if (!hit) {
          witness = set.label + " vs sample " + std::to_string(i);
          break;
        }
      }
    }
    report.add("uu4", witness.empty() ? CheckStatus::Pass : CheckStatus::Fail,
               witness.empty() ? std::to_string(opts.samples) + " samples" : witness);
  }
  return report;
}

}  // namespace ptforce
