#include "ptforce/stages.hpp"

#include <algorithm>
#include <random>

#include "ptforce/errors.hpp"

namespace ptforce {

namespace {

std::size_t maxXi(const MultiTree& t) {
  std::size_t top = 0;
  for (const auto& [c, tree] : t.entries()) top = std::max(top, c.xi + 1);
  return top;
}

bool fitsBelow(const PreDenseMT& d, std::size_t alpha) {
  return std::all_of(d.members.begin(), d.members.end(),
                     [&](const MultiTree& m) { return maxXi(m) <= alpha; });
}

// Trees of the notion tried as compatibility partners.
constexpr std::size_t kPartnerPool = 64;

std::string stageTag(std::size_t alpha) { return "stage" + std::to_string(alpha) + ":"; }

}  // namespace

StageConfig defaultStageConfig() {
  StageConfig cfg;
  cfg.label = "default";
  cfg.recipe.mBound = 3;
  cfg.recipe.hBound = 5;
  cfg.recipe.disjointMBound = 3;
  cfg.recipe.seeds = {{0, Tree::cone(BitString::parse("01"))}};
  CoverSpec thirds;
  thirds.label = "thirds";
  thirds.xi = 0;
  thirds.mBound = 3;
  thirds.slen = 3;
  thirds.predense = {Tree::cone(BitString::parse("0")), Tree::cone(BitString::parse("10")),
                     Tree::cone(BitString::parse("11"))};
  cfg.recipe.covers = {thirds};
  cfg.recipe.predense = {{"split00",
                          {MultiTree({{{0, 0}, Tree::cone(BitString::parse("0"))}}),
                           MultiTree({{{0, 0}, Tree::cone(BitString::parse("1"))}})}}};
  return cfg;
}

ScheduleRecipe recipeForStage(const ScheduleRecipe& tmpl, std::size_t alpha) {
  ScheduleRecipe r = tmpl;
  r.xiBound = alpha;
  std::erase_if(r.seeds, [&](const auto& s) { return s.first >= alpha; });
  std::erase_if(r.covers, [&](const CoverSpec& c) { return c.xi >= alpha; });
  std::erase_if(r.predense, [&](const PreDenseMT& d) { return !fitsBelow(d, alpha); });
  return r;
}

StageTrace runStages(const StageConfig& cfg) {
  if (cfg.stages < 1) fail(ErrorCode::ConfigError, "at least one stage is required");
  if (!cfg.recipeFactory && (cfg.recipe.mBound < 1 || cfg.recipe.hBound < 1))
    fail(ErrorCode::ConfigError, "the heights family (m >= 1, h >= 1) is mandatory");
  StageTrace trace;
  trace.config = cfg;
  for (std::size_t alpha = 0; alpha <= cfg.stages; ++alpha) {
    StageRecord rec;
    rec.alpha = alpha;
    std::vector<NotionPtr> notions;
    for (std::size_t xi = 0; xi < alpha; ++xi) {
      NotionPtr n = cohenForcing();
      for (std::size_t a = xi + 1; a < alpha; ++a) n = joinNotions(n, trace.stages[a].ext->uNotions[xi]);
      notions.push_back(n);
    }
    rec.p = std::make_shared<Seq>("p" + std::to_string(alpha), std::move(notions));
    if (alpha >= 1 && alpha < cfg.stages) {
      rec.recipe = cfg.recipeFactory ? cfg.recipeFactory(alpha, trace) : recipeForStage(cfg.recipe, alpha);
      if (rec.recipe.mBound < 1 || rec.recipe.hBound < 1)
        fail(ErrorCode::ConfigError, "stage " + std::to_string(alpha) + " has no heights family");
      for (std::size_t xi = 0; xi < alpha; ++xi)
        for (std::size_t n = 0; n < cfg.modelSeeds; ++n) {
          auto t = rec.p->at(xi)->nth(n);
          if (!t) break;
          auto same = [&](const auto& s) { return s.first == xi && s.second == normalForm(*t); };
          if (std::none_of(rec.recipe.seeds.begin(), rec.recipe.seeds.end(), same))
            rec.recipe.seeds.emplace_back(xi, normalForm(*t));
        }
      try {
        auto schedule = buildSchedule(*rec.p, rec.recipe, cfg.depth);
        auto g = GenericSeq::build(rec.p, std::move(schedule), cfg.steps, "s" + std::to_string(alpha),
                                   cfg.depth);
        rec.ext = jensenExtend(*rec.p, g);
      } catch (const ForcingError& e) {
        if (e.code() == ErrorCode::SystemUnavailable || e.code() == ErrorCode::ChainStalled)
          fail(ErrorCode::StageBudget, "stage " + std::to_string(alpha) + ": " + e.what());
        throw;
      }
    }
    trace.stages.push_back(std::move(rec));
  }
  return trace;
}

MultiTree embedMultitree(const StageTrace& trace, const MultiTree& tau, std::size_t alpha,
                         std::size_t gamma) {
  if (gamma < alpha)
    fail(ErrorCode::StageOrder, "cannot embed stage " + std::to_string(alpha) + " into stage " +
                                    std::to_string(gamma));
  if (gamma >= trace.stages.size())
    fail(ErrorCode::StageOrder, "stage " + std::to_string(gamma) + " was not built");
  if (!boundTo(tau, *trace.stages[alpha].p))
    fail(ErrorCode::NotMember, "condition is not over " + trace.stages[alpha].p->label());
  return tau.retagged(trace.stages[gamma].p->label());
}

Report checkPreDensity(const StageTrace& trace, std::size_t d) {
  Report report;
  const auto& cfg = trace.config;
  std::mt19937_64 rng(cfg.seed);
  const std::size_t A = trace.stages.size() - 1;
  const SeqPtr& fin = trace.final();

  for (std::size_t alpha = 1; alpha < A; ++alpha) {
    const auto& rec = trace.stages[alpha];
    const auto& next = trace.stages[alpha + 1].p;

    std::vector<PreDenseMT> sets = rec.recipe.predense;
    for (const auto& ctl : cfg.negativeControls)
      if (fitsBelow(ctl, alpha)) sets.push_back(ctl);
    for (const auto& D : sets) {
      const std::string name = "jden(" + std::to_string(alpha) + "," + D.label + ")";
      std::optional<std::string> witness;
      for (std::size_t i = 0; i < 2 * cfg.samples && !witness; ++i) {
        const Seq& from = (i < cfg.samples) ? *next : *fin;
        MultiTree tau = sampleCondition(from, rng);
        bool hit = std::any_of(D.members.begin(), D.members.end(), [&](const MultiTree& m) {
          return mtCompatible(tau, m, d).verdict.isYes();
        });
        if (!hit) witness = toJson(tau).dump() + " over " + from.label();
      }
      if (witness) report.add(name, CheckStatus::Fail, "incompatible with every member: " + *witness);
      else report.add(name, CheckStatus::Pass, std::to_string(2 * cfg.samples) + " samples");
    }

    // Trees of later stages owe their compatibility to dense sets over
    // infinite families, which the schedule cannot hold; samples come from
    // the next stage (the final one when A = 2).
    for (std::size_t xi = 0; xi < alpha; ++xi) {
      const auto& uNotion = rec.ext->uNotions[xi];
      std::optional<std::string> witness;
      for (std::size_t i = 0; i < cfg.samples && !witness; ++i) {
        auto T = next->at(xi)->nth(rng() % kPartnerPool);
        if (!T) continue;
        bool hit = false;
        for (std::size_t n = 0; n < kPartnerPool && !hit; ++n)
          if (auto U = uNotion->nth(n)) hit = treeCompatible(*T, *U, d).verdict.isYes();
        if (!hit) witness = T->text();
      }
      const std::string name = "xiden(" + std::to_string(alpha) + "," + std::to_string(xi) + ")";
      if (witness) report.add(name, CheckStatus::Fail, "no compatible U for " + *witness);
      else report.add(name, CheckStatus::Pass, std::to_string(cfg.samples) + " samples");
    }

    // Each cover member used by uu3 must be found compatible both through
    // the tree inside it and by the xiden search.
    std::size_t agreed = 0;
    std::optional<std::string> disagreement;
    const auto& g = rec.ext->generic;
    for (const auto& spec : rec.recipe.covers) {
      CoverSpec normalized = spec;
      for (auto& t : normalized.predense) t = normalForm(t);
      for (std::size_t m = 0; m < spec.mBound; ++m) {
        auto j = g->metAt("uu3(" + spec.label + "," + Coord{spec.xi, m}.key() + ")");
        if (!j) continue;
        const MultiSys phi = g->step(*j);
        auto cover = coverWitness(phi, normalized, m);
        if (!cover) continue;
        auto tops = allStrings(phi.at({spec.xi, m}).height() - 1);
        for (std::size_t i = 0; i < tops.size(); ++i) {
          const Tree& S = (*cover)[i];
          bool direct = treeCompatible(S, g->ufTree(spec.xi, m, tops[i]), d).verdict.isYes();
          bool searched = false;
          for (std::size_t n = 0; n < kPartnerPool && !searched; ++n)
            if (auto U = rec.ext->uNotions[spec.xi]->nth(n))
              searched = treeCompatible(S, *U, d).verdict.isYes();
          if (direct && searched) ++agreed;
          else if (!disagreement) disagreement = S.text();
        }
      }
    }
    const std::string name = "xiden-uu3(" + std::to_string(alpha) + ")";
    if (disagreement) report.add(name, CheckStatus::Fail, "paths disagree at " + *disagreement);
    else if (agreed == 0) report.add(name, CheckStatus::Skipped, "no cover was met");
    else report.add(name, CheckStatus::Pass, std::to_string(agreed) + " cover members");
  }

  std::optional<std::string> lost;
  std::size_t checked = 0;
  for (std::size_t alpha = 1; alpha <= A && !lost; ++alpha)
    for (std::size_t gamma = alpha; gamma <= A && !lost; ++gamma)
      for (std::size_t xi = 0; xi < alpha && !lost; ++xi)
        for (std::size_t n = 0; n < 16 && !lost; ++n) {
          auto t = trace.stages[alpha].p->at(xi)->nth(n);
          if (!t) break;
          ++checked;
          if (!trace.stages[gamma].p->at(xi)->accepts(*t))
            lost = t->text() + " of " + trace.stages[alpha].p->label() + " at " + std::to_string(xi);
        }
  if (lost) report.add("monotone", CheckStatus::Fail, *lost + " is dropped later");
  else report.add("monotone", CheckStatus::Pass, std::to_string(checked) + " trees");

  bool defaults = true;
  for (std::size_t alpha = 1; alpha <= A; ++alpha)
    defaults = defaults && trace.stages[alpha].p->at(alpha - 1) == cohenForcing();
  report.add("default", defaults ? CheckStatus::Pass : CheckStatus::Fail,
              "the newest coordinate of every stage is P0");
  return report;
}

Report checkStageLemmas(const StageTrace& trace, std::size_t d) {
  Report report;
  LemmaOptions opts;
  opts.depth = d;
  opts.samples = trace.config.samples;
  opts.seed = trace.config.seed;
  for (const auto& rec : trace.stages) {
    if (!rec.ext) continue;
    for (auto c : verifyJensenLemmas(*rec.ext, rec.recipe, opts).checks) {
      c.name = stageTag(rec.alpha) + c.name;
      report.checks.push_back(std::move(c));
    }
  }
  return report;
}

namespace {

SplitSys randomSystem(std::mt19937_64& rng, std::size_t height) {
  auto s = SplitSys::seeded(Tree::cone(BitString::fromIndex(1 + rng() % 2, rng() % 2)));
  while (s.height() < height) s = defaultExtend(s);
  return s;
}

SplitSys shrinkTop(const SplitSys& s, std::mt19937_64& rng) {
  SplitSys out = s;
  for (const auto& str : allStrings(s.height() - 1)) {
    Tree t = s.at(str);
    auto lv = level(t, stem(t).size() + 1 + rng() % 2);
    out = out.with(str, restrict(t, lv[rng() % lv.size()]));
  }
  return out;
}

}  // namespace

CheckResult lemmaXrCheck(std::size_t trials, std::uint64_t seed, std::size_t d) {
  std::mt19937_64 rng(seed);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    std::map<Coord, SplitSys> base;
    const std::size_t n = 1 + rng() % 3;
    for (std::size_t i = 0; i < n; ++i) base.emplace(Coord{rng() % 2, rng() % 3}, randomSystem(rng, 1 + rng() % 3));
    MultiSys phi(base);
    std::map<Coord, SplitSys> big;
    for (const auto& [c, s] : base) {
      SplitSys e = defaultExtend(s);
      if (rng() % 2) e = defaultExtend(e);
      big.emplace(c, e);
    }
    if (rng() % 2) big.emplace(Coord{2, rng() % 2}, randomSystem(rng, 1 + rng() % 2));
    MultiSys psi(big);
    std::map<Coord, SplitSys> reduced;
    for (const auto& [c, s] : psi.entries()) reduced.emplace(c, shrinkTop(s, rng));
    MultiSys phiPrime(reduced);
    const std::string at = "trial " + std::to_string(trial);
    if (!msRelate(phi, psi, d).strictlyExtends) return {"xr", CheckStatus::Fail, at + ": bad setup"};
    if (!msRelate(psi, phiPrime, d).reduces) return {"xr", CheckStatus::Fail, at + ": bad reducer"};
    auto rel = msRelate(phi, phiPrime, d);
    if (!rel.extends || !rel.strictlyExtends)
      return {"xr", CheckStatus::Fail, at + ": " + toJson(phiPrime).dump()};
  }
  return {"xr", CheckStatus::Pass, std::to_string(trials) + " triples"};
}

Json traceJson(const StageTrace& trace) {
  const auto& cfg = trace.config;
  Json stages = Json::array();
  for (const auto& rec : trace.stages) {
    Json notions = Json::array();
    for (const auto& n : rec.p->notions()) notions.push_back(n->label());
    Json s{{"alpha", rec.alpha}, {"seq", rec.p->label()}, {"notions", notions}};
    if (rec.ext) {
      const auto& g = rec.ext->generic;
      s["recipe"] = toJson(rec.recipe);
      s["met"] = toJson(g->metLog());
      s["steps"] = g->stepCount();
      s["final"] = toJson(g->current());
      Json u = Json::array();
      for (const auto& notion : rec.ext->uNotions) {
        Json first = Json::array();
        for (std::size_t n = 0; n < 4; ++n)
          if (auto t = notion->nth(n)) first.push_back(t->text());
        u.push_back(first);
      }
      s["u"] = u;
    }
    stages.push_back(s);
  }
  return Json{{"label", cfg.label}, {"stages", cfg.stages},   {"depth", cfg.depth},
              {"steps", cfg.steps}, {"seed", cfg.seed},       {"model_seeds", cfg.modelSeeds},
              {"trace", stages}};
}

std::string traceHash(const StageTrace& trace) { return sha256Hex(traceJson(trace).dump()); }

namespace {

const Json& need(const Json& j, const char* key) {
  if (!j.contains(key)) fail(ErrorCode::ConfigError, std::string("missing '") + key + "'");
  return j.at(key);
}

std::size_t natural(const Json& j, const char* key) {
  const Json& v = need(j, key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    fail(ErrorCode::ConfigError, std::string("'") + key + "' must be a natural number");
  return v.get<std::size_t>();
}

std::string text(const Json& j, const char* key) {
  const Json& v = need(j, key);
  if (!v.is_string()) fail(ErrorCode::ConfigError, std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

void onlyKeys(const Json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) fail(ErrorCode::ConfigError, where + " must be an object");
  for (const auto& [k, v] : j.items())
    if (std::none_of(keys.begin(), keys.end(), [&](const char* allowed) { return k == allowed; }))
      fail(ErrorCode::ConfigError, "unknown key '" + k + "' in " + where);
}

Tree treeField(const Json& j, const char* key) {
  try {
    return normalForm(parseTree(text(j, key)));
  } catch (const ForcingError& e) {
    fail(ErrorCode::ConfigError, std::string("'") + key + "': " + e.what());
  }
}

PreDenseMT preDenseFromJson(const Json& j) {
  onlyKeys(j, {"label", "members"}, "a pre-dense set");
  PreDenseMT d;
  d.label = text(j, "label");
  for (const auto& m : need(j, "members")) {
    try {
      d.members.push_back(multiTreeFromJson(m));
    } catch (const ForcingError& e) {
      if (e.code() == ErrorCode::ConfigError) throw;
      fail(ErrorCode::ConfigError, d.label + ": " + e.what());
    }
  }
  if (d.members.empty()) fail(ErrorCode::ConfigError, d.label + " has no members");
  return d;
}

}  // namespace

StageConfig stageConfigFromJson(const Json& j) {
  onlyKeys(j, {"label", "stages", "depth", "steps", "seed", "samples", "model_seeds", "schedule",
            "negative_controls"},
           "the config");
  StageConfig cfg;
  if (j.contains("label")) cfg.label = text(j, "label");
  cfg.stages = natural(j, "stages");
  if (j.contains("depth")) cfg.depth = natural(j, "depth");
  if (j.contains("steps")) cfg.steps = natural(j, "steps");
  if (j.contains("seed")) cfg.seed = natural(j, "seed");
  if (j.contains("samples")) cfg.samples = natural(j, "samples");
  if (j.contains("model_seeds")) cfg.modelSeeds = natural(j, "model_seeds");

  const Json& s = need(j, "schedule");
  onlyKeys(s, {"heights", "disjoint", "seeds", "covers", "predense"}, "the schedule");
  if (!s.contains("heights")) fail(ErrorCode::ConfigError, "the schedule has no heights family");
  const Json& h = s.at("heights");
  onlyKeys(h, {"m", "h"}, "heights");
  cfg.recipe.mBound = natural(h, "m");
  cfg.recipe.hBound = natural(h, "h");
  if (cfg.recipe.mBound < 1 || cfg.recipe.hBound < 1)
    fail(ErrorCode::ConfigError, "the heights family needs m >= 1 and h >= 1");
  if (s.contains("disjoint")) {
    onlyKeys(s.at("disjoint"), {"m"}, "disjoint");
    cfg.recipe.disjointMBound = natural(s.at("disjoint"), "m");
  }
  if (s.contains("seeds"))
    for (const auto& e : s.at("seeds")) {
      onlyKeys(e, {"xi", "tree"}, "a seed");
      cfg.recipe.seeds.emplace_back(natural(e, "xi"), treeField(e, "tree"));
    }
  if (s.contains("covers"))
    for (const auto& e : s.at("covers")) {
      onlyKeys(e, {"label", "xi", "m", "slen", "predense"}, "a cover");
      CoverSpec c;
      c.label = text(e, "label");
      c.xi = natural(e, "xi");
      c.mBound = natural(e, "m");
      c.slen = natural(e, "slen");
      for (const auto& t : need(e, "predense")) {
        Json wrap{{"tree", t}};
        c.predense.push_back(treeField(wrap, "tree"));
      }
      cfg.recipe.covers.push_back(std::move(c));
    }
  if (s.contains("predense"))
    for (const auto& e : s.at("predense")) cfg.recipe.predense.push_back(preDenseFromJson(e));
  if (j.contains("negative_controls"))
    for (const auto& e : j.at("negative_controls")) cfg.negativeControls.push_back(preDenseFromJson(e));
  return cfg;
}

}  // namespace ptforce
