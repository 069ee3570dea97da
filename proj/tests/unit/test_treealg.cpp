#include <doctest.h>

#include <thread>

#include "ptforce/errors.hpp"
#include "ptforce/parse.hpp"
#include "support.hpp"

using namespace ptforce;
using namespace testsupport;

TEST_CASE("bit strings order length-lexicographically") {
  CHECK(bs("") < bs("0"));
  CHECK(bs("1") < bs("00"));
  CHECK(bs("01") < bs("10"));
  CHECK(BitString::nth(0) == bs(""));
  CHECK(BitString::nth(3) == bs("00"));
  CHECK(BitString::nth(6) == bs("11"));
  CHECK(bs("Λ").empty());
  CHECK(bs("").display() == "Λ");
  CHECK_THROWS_AS(bs("012"), ForcingError);
  for (std::size_t i = 0; i < 40; ++i) CHECK(BitString::nth(i).heapIndex() == i);
}

TEST_CASE("contains on cones, restrictions and fusion limits") {
  CHECK(contains(Tree::cone(bs("01")), bs("0")));
  CHECK_FALSE(contains(Tree::restriction(Tree::full(), bs("1")), bs("00")));
  auto cones = coneSystem();
  CHECK(contains(Tree::fusion(cones), bs("0110")));
  CHECK_THROWS_AS(contains(Tree::restriction(Tree::cone(bs("0")), bs("1")), bs("1")),
                  ForcingError);
}

TEST_CASE("level examples") {
  CHECK(levelSet(Tree::full(), 2) == std::set<std::string>{"00", "01", "10", "11"});
  CHECK(levelSet(Tree::cone(bs("01")), 2) == std::set<std::string>{"01"});
  auto u = Tree::unite({Tree::cone(bs("00")), Tree::cone(bs("1"))});
  CHECK(levelSet(u, 1) == std::set<std::string>{"0", "1"});
  CHECK(levelSet(u, 2) == std::set<std::string>{"00", "10", "11"});
}

TEST_CASE("stem examples") {
  CHECK(stem(Tree::full()) == bs(""));
  CHECK(stem(Tree::cone(bs("011"))) == bs("011"));
  CHECK(stem(Tree::restriction(Tree::cone(bs("0")), bs("01"))) == bs("01"));
  CHECK(stem(Tree::unite({Tree::cone(bs("010")), Tree::cone(bs("011"))})) == bs("01"));
}

TEST_CASE("restrict examples and normalization") {
  CHECK(restrict(Tree::full(), bs("0")) == Tree::cone(bs("0")));
  CHECK(restrict(Tree::cone(bs("01")), bs("0")) == Tree::cone(bs("01")));
  CHECK(restrict(Tree::cone(bs("0")), bs("01")) == Tree::cone(bs("01")));
  CHECK_THROWS_WITH_AS(restrict(Tree::cone(bs("0")), bs("1")), doctest::Contains("NotInTree"),
                       ForcingError);
  auto r = restrict(Tree::fusion(coneSystem()), bs("10"));
  CHECK(levelSet(r, 3) == std::set<std::string>{"100", "101"});
}

TEST_CASE("isPerfectToDepth examples") {
  CHECK(isPerfectToDepth(Tree::cone(bs("0101")), 8).isYes());
  auto chain = fuse(defaultChain(Tree::full()), "dext");
  CHECK(isPerfectToDepth(chain.limit, 8).isYes());
  auto bad = isPerfectToDepth(Tree::fusion(corruptedSystem()), 8);
  REQUIRE(bad.isNo());
  CHECK(bad.witness == "1");
}

TEST_CASE("an isolated branch is not reported perfect") {
  // T_s = I_{1^{|s|}} fuses to the single branch 1^ω.
  auto sys = std::make_shared<FullSplitSys>(
      "spine", [](const BitString& s) { return Tree::cone(BitString::parse(std::string(s.size(), '1'))); },
      false);
  CHECK_FALSE(isPerfectToDepth(Tree::fusion(sys), 6, 6).isYes());
}

namespace {

std::vector<Tree> sampleTrees() {
  auto cones = coneSystem();
  auto dext = fuse(defaultChain(Tree::cone(bs("1"))), "dext1").limit;
  return {
      Tree::full(),
      Tree::cone(bs("0110")),
      Tree::unite({Tree::cone(bs("00")), Tree::cone(bs("101")), Tree::cone(bs("11"))}),
      Tree::fusion(cones),
      Tree::fusion(cones, bs("01")),
      dext,
      restrict(dext, bs("110")),
      restrict(Tree::unite({Tree::cone(bs("0")), Tree::fusion(cones, bs("11"))}), bs("11")),
  };
}

}  // namespace

TEST_CASE("downward closure and projection of levels") {
  for (const auto& t : sampleTrees()) {
    CAPTURE(t.text());
    for (std::size_t n = 0; n < 7; ++n) {
      auto next = level(t, n + 1);
      std::set<std::string> projected;
      for (const auto& x : next) {
        projected.insert(x.parent().bits());
        for (std::size_t k = 0; k <= x.size(); ++k) CHECK(contains(t, x.prefix(k)));
      }
      CHECK(projected == levelSet(t, n));
      CHECK_FALSE(next.empty());
    }
  }
}

TEST_CASE("fusion stabilization agrees with the brute-force intersection") {
  const std::size_t d = 7;
  std::vector<SysPtr> systems = {coneSystem(), fuse(defaultChain(Tree::full()), "a").system,
                                 fuse(defaultChain(Tree::cone(bs("10"))), "b").system};
  for (const auto& sys : systems) {
    for (const auto& at : allStringsUpTo(2)) {
      Tree f = Tree::fusion(sys, at);
      for (const auto& t : allStringsUpTo(d))
        CHECK(contains(f, t) == fusionOracle(*sys, at, t, d + 4));
    }
  }
}

TEST_CASE("stem children are in the tree and restriction is idempotent") {
  for (const auto& t : sampleTrees()) {
    CAPTURE(t.text());
    BitString s = stem(t);
    CHECK(contains(t, s.child(0)));
    CHECK(contains(t, s.child(1)));
    for (const auto& x : level(t, 3)) {
      Tree r = restrict(t, x);
      CHECK(equalToDepth(restrict(r, x), r, 8));
      for (std::size_t n = 0; n <= 8; ++n)
        for (const auto& y : level(r, n)) CHECK((x.isPrefixOf(y) || y.isPrefixOf(x)));
    }
  }
}

TEST_CASE("restricting a fusion tree gives a fusion tree with the same levels") {
  auto sys = fuse(defaultChain(Tree::cone(bs("0"))), "c").system;
  Tree f = Tree::fusion(sys);
  for (const auto& x : level(f, 4)) {
    Tree r = restrict(f, x);
    CHECK(r.kind() == Tree::Kind::Fusion);
    for (std::size_t n = 0; n <= 8; ++n) {
      std::set<std::string> expect;
      for (const auto& y : level(f, n))
        if (x.isPrefixOf(y) || y.isPrefixOf(x)) expect.insert(y.bits());
      CHECK(levelSet(r, n) == expect);
    }
  }
}

TEST_CASE("knownSubset is sound against level sets") {
  auto trees = sampleTrees();
  for (const auto& c : smallCones(2)) trees.push_back(c);
  for (const auto& a : trees)
    for (const auto& b : trees)
      if (knownSubset(a, b)) {
        CAPTURE(a.text());
        CAPTURE(b.text());
        CHECK(subsetToDepth(a, b, 9));
      }
  // Exact when the target is clopen.
  for (const auto& a : trees)
    for (const auto& c : smallCones(3)) CHECK(knownSubset(a, c) == subsetToDepth(a, c, 10));
}

TEST_CASE("parser round trip") {
  SysResolver resolve = [](std::string_view name) -> SysPtr {
    if (name == "cones") return coneSystem();
    return nullptr;
  };
  auto t = parseTree("union(cone(00),restrict(full,1))");
  CHECK(levelSet(t, 2) == std::set<std::string>{"00", "10", "11"});
  CHECK(parseTree(t.text()) == t);
  auto f = parseTree("fusion(cones,01)", resolve);
  CHECK(f.kind() == Tree::Kind::Fusion);
  CHECK(f.str() == bs("01"));
  CHECK_THROWS_AS(parseTree("cone(01"), ForcingError);
  CHECK_THROWS_AS(parseTree("frob"), ForcingError);
  CHECK_THROWS_AS(parseTree("fusion(cones)"), ForcingError);
}

TEST_CASE("membership is deterministic under concurrent realization") {
  auto fused = fuse(defaultChain(Tree::full()), "conc");
  std::vector<std::thread> threads;
  std::vector<std::set<std::string>> out(4);
  for (int i = 0; i < 4; ++i)
    threads.emplace_back([&, i] { out[i] = levelSet(fused.limit, 7); });
  for (auto& th : threads) th.join();
  for (int i = 1; i < 4; ++i) CHECK(out[i] == out[0]);
  CHECK(out[0].size() == 128);
}
