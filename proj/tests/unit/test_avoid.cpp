#include <doctest.h>

#include "ptforce/avoid.hpp"
#include "ptforce/errors.hpp"
#include "support.hpp"

using namespace ptforce;
using namespace testsupport;

namespace {

SeqPtr cohenSeq(std::size_t len) {
  return std::make_shared<Seq>("p", std::vector<NotionPtr>(len, cohenForcing()));
}

GenericPtr idleSeq(const SeqPtr& p) {
  DenseSchedule schedule;
  schedule.hBound = 3;
  schedule.mBound = 2;
  schedule.families.push_back(heightsFamily(*p, p->length(), 2, 3));
  return GenericSeq::build(p, schedule, 0);
}

SplitSys systemFrom(std::vector<const char*> heap) {
  std::vector<Tree> entries;
  for (const char* s : heap) entries.push_back(std::string(s) == "full" ? Tree::full() : Tree::cone(bs(s)));
  return SplitSys::fromEntries(entries);
}

// A toy run: heights and one avoidance set for c with u given by spec.
struct Run {
  SeqPtr p;
  GenericPtr g;
  AvoidSpec spec;
  std::shared_ptr<AvoidTrace> trace = std::make_shared<AvoidTrace>();
};

Run toyRun(AvoidSpec spec, std::size_t hBound = 4, std::size_t steps = 12) {
  Run run;
  run.p = cohenSeq(2);
  run.spec = spec;
  DenseSchedule schedule;
  schedule.hBound = hBound;
  schedule.mBound = 2;
  schedule.families.push_back(heightsFamily(*run.p, 2, 2, hBound));
  schedule.families.push_back(avoidanceFamily(*run.p, spec, 8, run.trace));
  run.g = GenericSeq::build(run.p, schedule, steps);
  run.g->completeSchedule();
  return run;
}

}  // namespace

TEST_CASE("fresh indices follow the largest k at eta") {
  NormalizedCondition nc;
  nc.eta = 0;
  nc.items = {{{0, 0}, 0, bs("0")}, {{0, 2}, 1, bs("1")}, {{1, 9}, 0, bs("00")}};
  CHECK(freshIndex(nc, 3) == 6);
  nc.items.clear();
  CHECK(freshIndex(nc, 1) == 2);
}

TEST_CASE("normalize lengthens strings leftmost and orders the home pair first") {
  auto p = cohenSeq(2);
  auto g = idleSeq(p);
  MultiTree u({{{1, 4}, g->ufTreeDeferred(1, 0, bs("1"))},
               {{0, 3}, g->ufTreeDeferred(0, 1, bs("01"))},
               {{0, 5}, g->ufTreeDeferred(0, 1, bs("0"))}});
  auto nc = normalize(u, *g, 0, 1);
  CHECK(nc.h == 2);
  CHECK(nc.mu == 2);
  REQUIRE(nc.items.size() == 3);
  CHECK(nc.items[0].coord == Coord{0, 3});
  CHECK(nc.items[0].s == bs("01"));
  CHECK(nc.items[1].coord == Coord{0, 5});
  CHECK(nc.items[1].s == bs("00"));
  CHECK(nc.items[2].coord == Coord{1, 4});
  CHECK(nc.items[2].s == bs("10"));
  CHECK(nc.tree.at({0, 5}) == g->ufTreeDeferred(0, 1, bs("00")));

  auto again = normalize(nc.tree, *g, 0, 1);
  CHECK(again.tree == nc.tree);
  CHECK(again.h == nc.h);

  // Two items with one short string must grow h to stay distinct.
  MultiTree clash({{{0, 0}, g->ufTreeDeferred(0, 0, bs("0"))},
                   {{0, 1}, g->ufTreeDeferred(0, 0, bs("0"))},
                   {{0, 2}, g->ufTreeDeferred(0, 0, bs("0"))}});
  auto grown = normalize(clash, *g, 0, 0);
  CHECK(grown.h == 3);
  CHECK(grown.mu == 3);
  CHECK(grown.mu <= (std::size_t{1} << grown.h));

  MultiTree bad({{{0, 0}, Tree::cone(bs("1"))}});
  CHECK_THROWS_WITH_AS(normalize(bad, *g, 0, 0), doctest::Contains("NotUForm"), ForcingError);
}

TEST_CASE("buildRho places the condition and the fresh copies") {
  auto p = cohenSeq(2);
  auto g = idleSeq(p);
  MultiTree u({{{0, 2}, g->ufTreeDeferred(0, 0, bs("1"))}, {{1, 0}, g->ufTreeDeferred(1, 0, bs("0"))}});
  auto nc = normalize(u, *g, 0, 0);
  SplitSys home = systemFrom({"full", "0", "1", "00", "01", "10", "11"});
  MultiSys phi({{{0, 0}, home}, {{1, 0}, home}});
  auto rho = buildRho(phi, nc);
  CHECK(rho.hbar == 2);
  CHECK(rho.sbar == std::vector<BitString>{bs("10"), bs("00")});
  REQUIRE(rho.t.size() == 4);
  CHECK(rho.t[0] == bs("10"));
  CHECK(rho.t[1] == bs("00"));
  CHECK(rho.ell == std::vector<std::size_t>{2, 5, 6, 7});
  CHECK(rho.rho.support().size() == 5);
  for (const auto& c : nc.tree.support()) CHECK(rho.rho.support().count(c));
  for (std::size_t i = 0; i < rho.t.size(); ++i)
    CHECK(rho.rho.at({0, rho.ell[i]}) == home.at(rho.t[i]));
  CHECK(rho.rho.at({1, 0}) == home.at(bs("00")));

  MultiSys shallow({{{0, 0}, systemFrom({"full", "0", "1"})}, {{1, 0}, home}});
  CHECK_THROWS_WITH_AS(buildRho(shallow, nc), doctest::Contains("ConditionOneFails"), ForcingError);
  MultiSys uneven({{{0, 0}, home}, {{1, 0}, systemFrom({"full", "0", "1"})}});
  CHECK_THROWS_WITH_AS(buildRho(uneven, nc), doctest::Contains("ConditionOneFails"), ForcingError);
}

TEST_CASE("buildPhiPrime reduces and makes sigma occur") {
  auto p = cohenSeq(2);
  auto g = idleSeq(p);
  MultiTree u({{{0, 2}, g->ufTreeDeferred(0, 0, bs("1"))}});
  auto nc = normalize(u, *g, 0, 0);
  SplitSys home = systemFrom({"full", "0", "1", "00", "01", "10", "11"});
  SplitSys other = systemFrom({"1", "10", "11"});
  MultiSys phi({{{0, 0}, home}, {{1, 3}, other}});
  auto rho = buildRho(phi, nc);
  auto c = canonicalName(1, 0, 8);
  auto oracle = stemSplittingOracle(c, 0, 8);
  MultiTree sigma = rho.rho;
  for (auto k : rho.ell) sigma = *oracle.refine(sigma, k);
  REQUIRE(mtLeq(sigma, rho.rho, 8));
  auto out = buildPhiPrime(phi, sigma, rho, nc, 8);
  CHECK(msRelate(phi, out, 8).reduces);
  CHECK(occursIn(sigma, out));
  CHECK(out.at({1, 3}) == other);
  for (const auto& [pair, sys] : out.entries()) CHECK(checkSpe2(sys, 8).isYes());
  // σ reads (1,0), which ρ does not mention: it gets a height-1 system.
  CHECK(out.at({1, 0}).height() == 1);
  CHECK(out.at({1, 0}).at({}) == sigma.at({1, 0}));
}

TEST_CASE("avoidance membership on a crafted multisystem") {
  auto p = cohenSeq(2);
  auto g = idleSeq(p);
  auto nc = normalize(MultiTree(), *g, 0, 0);
  auto c = canonicalName(1, 0, 8);
  auto set = avoidanceDense(*p, c, stemSplittingOracle(c, 0, 8), nc, 8);
  MultiSys phi({{{0, 0}, systemFrom({"full", "01", "11"})}, {{1, 0}, systemFrom({"00"})}});
  CHECK(set->member(phi));
  MultiSys near({{{0, 0}, systemFrom({"full", "01", "11"})}, {{1, 0}, systemFrom({"0"})}});
  CHECK_FALSE(set->member(near));

  auto out = set->refine(near);
  CHECK(set->member(out));
  CHECK(msRelate(near, out, 8).extends);

  DenseOracleDk empty{"none", {}};
  auto broken = avoidanceDense(*p, c, empty, nc, 8);
  CHECK_THROWS_WITH_AS(broken->refine(near), doctest::Contains("OracleFailure"), ForcingError);
  DenseOracleDk lazy{"lazy", [](const MultiTree& t, std::size_t) { return std::optional(t); }};
  CHECK_THROWS_WITH_AS(avoidanceDense(*p, c, lazy, nc, 8)->refine(near),
                       doctest::Contains("OracleFailure"), ForcingError);
}

TEST_CASE("end to end: a canonical name avoided by a U tree") {
  AvoidSpec spec;
  spec.name = canonicalName(1, 0, 12);
  spec.eta = 0;
  spec.M = 0;
  spec.u = {{{0, 1}, {0, bs("1")}}, {{0, 4}, {1, bs("0")}}, {{1, 2}, {0, bs("")}}};
  for (const char* oracle : {"stem", "brute"}) {
    CAPTURE(oracle);
    spec.oracle = oracle;
    auto run = toyRun(spec);
    auto u = conditionFromSpec(*run.g, spec);
    auto nc = normalize(u, *run.g, spec.eta, spec.M);
    auto res = deriveAvoider(*run.g, avoidLabel(spec), u, nc, spec.name, 10);
    CHECK(res.refines);
    CHECK(res.avoids.isYes());
    // Re-check independently of the result fields.
    CHECK(mtLeq(res.v, u, 10));
    CHECK(directForces(res.v, spec.name, AvoidAssertion{run.g->ufTree(0, 0)}, 10).isYes());
    for (std::size_t i = 0; i < nc.items.size(); ++i) {
      CHECK(nc.items[i].s.isPrefixOf(res.witness.sbar[i]));
      CHECK(nc.items[i].s.size() < res.witness.sbar[i].size());
      CHECK(res.v.at(nc.items[i].coord) ==
            run.g->ufTree(nc.items[i].coord.xi, nc.items[i].m, res.witness.sbar[i]));
    }
    REQUIRE(run.trace->output);
    CHECK(msRelate(*run.trace->extended, *run.trace->output, 8).reduces);
    CHECK(msRelate(*run.trace->input, *run.trace->output, 8).extends);
    for (const auto& [pair, sys] : run.trace->output->entries()) CHECK(checkSpe2(sys, 8).isYes());
    for (std::size_t n = nc.mu + 1; n <= run.trace->rho->ell.size(); ++n)
      CHECK_FALSE(u.support().count({0, run.trace->rho->ell[n - 1]}));
  }
}

TEST_CASE("the constant-zero name is avoided by every scheduled limit tree") {
  auto p = cohenSeq(1);
  auto c0 = constantName(0, 10);
  DenseSchedule schedule;
  schedule.hBound = 4;
  schedule.mBound = 3;
  schedule.families.push_back(heightsFamily(*p, 1, 3, 4));
  for (std::size_t M = 0; M < 3; ++M) {
    AvoidSpec spec;
    spec.name = c0;
    spec.M = M;
    schedule.families.push_back(avoidanceFamily(*p, spec, 8));
  }
  auto g = GenericSeq::build(p, schedule, 1);
  g->completeSchedule();
  for (std::size_t M = 0; M < 3; ++M)
    for (const auto& s : allStringsUpTo(2)) {
      Tree U = g->ufTree(0, M, s);
      bool escapes = false;
      for (std::size_t m = 0; m <= 10 && !escapes; ++m) escapes = !contains(U, BitString::zeros(m));
      CHECK(escapes);
    }
}

TEST_CASE("deriveAvoider needs the set to be met") {
  AvoidSpec spec;
  spec.name = canonicalName(1, 0, 10);
  auto run = toyRun(spec);
  auto u = conditionFromSpec(*run.g, spec);
  auto nc = normalize(u, *run.g, 0, 0);
  CHECK_THROWS_WITH_AS(deriveAvoider(*run.g, "avoid(elsewhere)", u, nc, spec.name, 10),
                       doctest::Contains("NotMet"), ForcingError);
  spec.oracle = "psychic";
  CHECK_THROWS_WITH_AS(avoidanceFamily(*run.p, spec, 8), doctest::Contains("ConfigError"), ForcingError);
}
