// Acceptance run: one line per criterion, "A<n> pass|fail <detail>".
//
//   acceptance <ptforce-cli> <golden-dir>

#include <array>
#include <bitset>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ptforce/demo.hpp"
#include "ptforce/errors.hpp"
#include "ptforce/jensen.hpp"
#include "ptforce/multi.hpp"
#include "ptforce/names.hpp"
#include "ptforce/ptf.hpp"
#include "ptforce/splitsys.hpp"
#include "ptforce/stages.hpp"

using namespace ptforce;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double secondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double s) {
  std::ostringstream o;
  o.precision(2);
  o << std::fixed << s << "s";
  return o.str();
}

BitString randomString(std::mt19937_64& rng, std::size_t minLen, std::size_t maxLen) {
  const std::size_t len = minLen + rng() % (maxLen - minLen + 1);
  return BitString::fromIndex(len, len == 0 ? 0 : rng() % (std::uint64_t{1} << len));
}

// ---------------------------------------------------------------- A1

constexpr std::size_t kA1Len = 10;
constexpr std::size_t kA1Depth = 14;

// Strings of length <= 10 indexed by heapIndex.
using StringSet = std::bitset<(1u << (kA1Len + 1)) - 1>;

Tree randomSeed(std::mt19937_64& rng) {
  switch (rng() % 3) {
    case 0: return Tree::cone(randomString(rng, 0, 4));
    case 1: {
      std::vector<Tree> parts;
      const std::size_t n = 2 + rng() % 2;
      for (std::size_t i = 0; i < n; ++i) parts.push_back(Tree::cone(randomString(rng, 1, 4)));
      return Tree::unite(parts);
    }
    default: {
      Tree u = Tree::unite({Tree::cone(randomString(rng, 1, 3)), Tree::cone(randomString(rng, 1, 3))});
      auto lv = level(u, 4);
      return restrict(u, lv[rng() % lv.size()]);
    }
  }
}

// ⋂_{n ≤ 14} ⋃_{|r| = n} T_r on strings of length ≤ 10, where the chain
// is unfolded directly: T_{r⌢i} = T_r↾(stem(T_r)⌢i).
StringSet bruteFusion(const Tree& seed) {
  std::vector<std::vector<bool>> top(kA1Depth + 1, std::vector<bool>(std::size_t{1} << kA1Len));
  std::function<void(const Tree&, std::size_t)> unfold = [&](const Tree& t, std::size_t n) {
    for (const auto& x : level(t, kA1Len)) top[n][x.value()] = true;
    if (n == kA1Depth) return;
    const BitString s = stem(t);
    unfold(restrict(t, s.child(0)), n + 1);
    unfold(restrict(t, s.child(1)), n + 1);
  };
  unfold(seed, 0);
  StringSet result;
  result.set();
  for (const auto& layerTop : top) {
    // Trees are pruned, so a short string is in the union iff some
    // length-10 extension is.
    StringSet layer;
    for (std::size_t v = 0; v < layerTop.size(); ++v)
      if (layerTop[v]) {
        BitString x = BitString::fromIndex(kA1Len, v);
        for (std::size_t k = 0; k <= kA1Len; ++k) layer.set(x.prefix(k).heapIndex());
      }
    result &= layer;
  }
  return result;
}

Outcome a1() {
  const auto start = Clock::now();
  std::mt19937_64 rng(20240611);
  const auto strings = allStringsUpTo(kA1Len);
  std::size_t compared = 0;
  for (int chain = 0; chain < 500; ++chain) {
    Tree seed = randomSeed(rng);
    StringSet brute = bruteFusion(seed);
    Tree limit = fuse(defaultChain(seed), "a1").limit;
    for (const auto& t : strings) {
      ++compared;
      if (contains(limit, t) != brute.test(t.heapIndex()))
        return {false, "chain " + std::to_string(chain) + " seed " + seed.text() + " at " + t.display()};
    }
  }
  const double took = secondsSince(start);
  return {took < 10.0, "500 chains, " + std::to_string(compared) + " strings, " + fmt(took)};
}

// ---------------------------------------------------------------- A2

Outcome a2() {
  const auto start = Clock::now();
  auto p0 = cohenForcing();
  std::vector<std::pair<Tree, Tree>> pairs;
  const auto stems = allStringsUpTo(4);
  for (const auto& a : stems)
    for (const auto& b : stems) pairs.emplace_back(Tree::cone(a), Tree::cone(b));
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i)
    pairs.emplace_back(Tree::cone(randomString(rng, 0, 8)), Tree::cone(randomString(rng, 0, 8)));
  for (const auto& [t, u] : pairs) {
    auto r = disjointShrink(*p0, t, *p0, u, 8);
    const bool ok = p0->accepts(r.first) && p0->accepts(r.second) && subsetToDepth(r.first, t, 8) &&
                    subsetToDepth(r.second, u, 8) && disjointAtDepth(r.first, r.second, 8);
    if (!ok) return {false, t.text() + " / " + u.text()};
  }
  const double took = secondsSince(start);
  return {took < 5.0, std::to_string(pairs.size()) + " pairs, " + fmt(took)};
}

// ---------------------------------------------------------------- A3

// spe2 for cone entries: stem(T_s)⌢i is a prefix of stem(T_{s⌢i}).
bool coneSpe2(const SplitSys& sys) {
  for (std::size_t len = 1; len < sys.height(); ++len)
    for (const auto& s : allStrings(len)) {
      const Tree& parent = sys.at(s.parent());
      const Tree& child = sys.at(s);
      if (child.kind() != Tree::Kind::Cone) return false;
      BitString p = parent.kind() == Tree::Kind::Full ? BitString() : parent.str();
      if (!p.child(s[len - 1]).isPrefixOf(child.str())) return false;
    }
  return true;
}

// Every spe2 system of cones up to height 3 whose root stem has length
// ≤ 2 and where each child stem adds at most one bit past the forced one.
std::vector<SplitSys> smallSystems() {
  auto stemOptions = [](const BitString& forced) {
    return std::vector<BitString>{forced, forced.child(0), forced.child(1)};
  };
  auto treeFor = [](const BitString& s) { return s.empty() ? Tree::full() : Tree::cone(s); };
  auto stemOf = [](const Tree& t) { return t.kind() == Tree::Kind::Full ? BitString() : t.str(); };
  std::vector<SplitSys> out;
  for (const auto& root : allStringsUpTo(2)) {
    SplitSys h1 = SplitSys::seeded(treeFor(root));
    out.push_back(h1);
    for (const auto& c0 : stemOptions(root.child(0)))
      for (const auto& c1 : stemOptions(root.child(1))) {
        SplitSys h2 = h1.grown({treeFor(c0), treeFor(c1)});
        out.push_back(h2);
        std::vector<std::vector<BitString>> options;
        for (const auto& s : allStrings(1)) {
          const BitString parent = stemOf(h2.at(s));
          options.push_back(stemOptions(parent.child(0)));
          options.push_back(stemOptions(parent.child(1)));
        }
        for (std::size_t idx = 0; idx < 81; ++idx) {
          std::vector<Tree> layer;
          std::size_t rest = idx;
          for (const auto& opt : options) {
            layer.push_back(treeFor(opt[rest % 3]));
            rest /= 3;
          }
          out.push_back(h2.grown(layer));
        }
      }
  }
  return out;
}

Outcome a3() {
  const auto start = Clock::now();
  auto systems = smallSystems();
  std::size_t perfect = 0;
  for (const auto& sys : systems) {
    if (!coneSpe2(sys) || !checkSpe2(sys, 8).isYes())
      return {false, "enumerated system is not spe2"};
    SplitSys ext = defaultExtend(sys);
    if (!coneSpe2(ext) || !checkSpe2(ext, 8).isYes())
      return {false, "extension breaks spe2 at height " + std::to_string(sys.height())};
    // Changing the last entry to a cone off its forced stem is caught.
    if (sys.height() >= 2) {
      const BitString last = BitString::fromIndex(sys.height() - 1, 0);
      BitString wrong = sys.at(last.parent()).kind() == Tree::Kind::Full
                            ? BitString::parse("1")
                            : sys.at(last.parent()).str().child(1);
      if (checkSpe2(sys.with(last, Tree::cone(wrong)), 8).isYes())
        return {false, "spe2 violation not detected"};
    }
    auto current = std::make_shared<SplitSys>(sys);
    ChainGenerator chain = [current] {
      *current = defaultExtend(*current);
      return *current;
    };
    Tree limit = Tree::fusion(fuse(chain, "a3").system);
    if (!isPerfectToDepth(limit, 8).isYes()) return {false, "limit not perfect: " + limit.text()};
    ++perfect;
  }
  return {true, std::to_string(systems.size()) + " systems, " + std::to_string(perfect) +
                    " perfect limits, " + fmt(secondsSince(start))};
}

// ---------------------------------------------------------------- A4 - A6

ScheduleRecipe lemmaRecipe() {
  ScheduleRecipe r;
  r.xiBound = 2;
  r.mBound = 3;
  r.hBound = 5;
  r.disjointMBound = 3;
  r.seeds = {{0, Tree::cone(BitString::parse("01"))}, {1, Tree::cone(BitString::parse("1"))}};
  CoverSpec cover;
  cover.label = "thirds";
  cover.xi = 0;
  cover.mBound = 3;
  cover.slen = 3;
  cover.predense = {Tree::cone(BitString::parse("0")), Tree::cone(BitString::parse("10")),
                    Tree::cone(BitString::parse("11"))};
  r.covers = {cover};
  return r;
}

const Report& lemmaReport() {
  static const Report report = [] {
    auto p = std::make_shared<Seq>("p", std::vector<NotionPtr>(2, cohenForcing()));
    auto recipe = lemmaRecipe();
    auto g = GenericSeq::build(p, buildSchedule(*p, recipe, 8), 0);
    LemmaOptions opts;
    opts.depth = 8;
    opts.maxStringLength = 3;
    return verifyJensenLemmas(jensenExtend(*p, g), recipe, opts);
  }();
  return report;
}

Outcome lemmaPair(std::initializer_list<const char*> names) {
  Outcome out{true, ""};
  for (const char* name : names) {
    const CheckResult* c = lemmaReport().find(name);
    const bool pass = c && c->status == CheckStatus::Pass;
    out.ok = out.ok && pass;
    if (!out.detail.empty()) out.detail += "; ";
    out.detail += std::string(name) + " " + (c ? std::string(statusName(c->status)) + " " + c->detail : "missing");
  }
  return out;
}

// ---------------------------------------------------------------- A7

Outcome a7() {
  auto r = lemmaXrCheck(1000, 5, 8);
  return {r.status == CheckStatus::Pass, r.detail};
}

// ---------------------------------------------------------------- A8

Outcome a8() {
  const std::size_t xi = 0, k = 1;
  RealName name = canonicalName(xi, k, 8);
  std::size_t cases = 0;
  const auto stems = allStringsUpTo(4);
  for (const Coord at : {Coord{xi, k}, Coord{xi, k + 1}, Coord{xi + 1, k}}) {
    for (const auto& s : stems) {
      MultiTree cond({{at, Tree::cone(s)}});
      // Only the named coordinate constrains the real.
      const BitString known = (at == Coord{xi, k}) ? s : BitString();
      for (const auto& t : stems) {
        ++cases;
        const bool forced = directForces(cond, name, PrefixAssertion{t}, 8).isYes();
        if (forced != t.isPrefixOf(known))
          return {false, "cone(" + s.display() + ") at " + at.key() + ", prefix " + t.display()};
      }
    }
  }
  return {true, std::to_string(cases) + " cases"};
}

// ---------------------------------------------------------------- A9

Outcome avoidDemo(const AvoidDemoConfig& cfg, const char* which) {
  auto res = runAvoidDemo(cfg);
  const auto& r = res.result;
  if (!mtLeq(r.v, res.u, 10)) return {false, std::string(which) + ": v is not below u"};
  if (!r.avoids.isYes()) return {false, std::string(which) + ": avoid verdict " + r.avoids.str()};
  auto ext = jensenExtend(*res.generic->seq(), res.generic);
  if (!ext.uNotions.at(cfg.spec.eta)->accepts(r.uTree))
    return {false, std::string(which) + ": " + r.uTree.text() + " is not a U tree"};
  // Independent reading of c ∉ [U] under v.
  const auto& name = cfg.spec.name;
  bool outside = false;
  if (name.canonical) {
    Tree real = r.v.at(*name.canonical);
    outside = separationDepth(real, r.uTree).has_value();
  } else {
    const BitString constant =
        name.label == "const(0)" ? BitString::zeros(12) : BitString::parse(std::string(12, '1'));
    outside = !contains(r.uTree, constant);
  }
  if (!outside) return {false, std::string(which) + ": the real may lie in " + r.uTree.text()};
  return {true, std::string(which) + " U=" + r.uTree.text()};
}

Outcome a9() {
  const auto start = Clock::now();
  Outcome pi = avoidDemo(canonicalDemoConfig(), "pi(1,0)");
  if (!pi.ok) return pi;
  Outcome zero = avoidDemo(constantDemoConfig(), "zero");
  if (!zero.ok) return zero;
  const double took = secondsSince(start);
  return {took < 30.0, pi.detail + "; " + zero.detail + "; " + fmt(took)};
}

// ---------------------------------------------------------------- A10, A11

Outcome a10() {
  StageConfig cfg = defaultStageConfig();
  cfg.samples = 50;
  cfg.negativeControls = {
      {"cone0", {MultiTree({{{0, 0}, Tree::cone(BitString::parse("0"))}})}}};
  auto trace = runStages(cfg);
  auto report = checkPreDensity(trace, 8);
  std::size_t passed = 0;
  bool controlFailed = false;
  for (const auto& c : report.checks) {
    if (c.name.rfind("jden(", 0) != 0) continue;
    const bool control = c.name.find("cone0") != std::string::npos;
    if (control) {
      controlFailed = c.status == CheckStatus::Fail;
    } else if (c.status == CheckStatus::Pass) {
      ++passed;
    } else {
      return {false, c.name + " " + statusName(c.status) + " " + c.detail};
    }
  }
  if (passed == 0) return {false, "no pre-dense set was checked"};
  if (!controlFailed) return {false, "negative control was not reported failing"};
  return {true, std::to_string(passed) + " pre-dense sets pass, negative control fails"};
}

Outcome a11() {
  StageConfig cfg = defaultStageConfig();
  auto first = runStages(cfg);
  auto second = runStages(cfg);
  const auto& p1 = first.stages.at(1).p;
  if (p1->length() != 1 || p1->at(0) != cohenForcing()) return {false, "p1 is not <P0>"};
  for (std::size_t alpha = 0; alpha + 1 < first.stages.size(); ++alpha)
    if (first.stages[alpha + 1].p->at(alpha) != cohenForcing())
      return {false, "coordinate " + std::to_string(alpha) + " of p" + std::to_string(alpha + 1)};
  const auto h1 = traceHash(first), h2 = traceHash(second);
  if (h1 != h2) return {false, h1 + " != " + h2};
  return {true, "hash " + h1};
}

// ---------------------------------------------------------------- A12

struct Run {
  int exit = -1;
  std::string out;
};

Run runCli(const std::string& cli, const std::string& args) {
  Run r;
  const std::string cmd = "\"" + cli + "\" " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.exit = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome a12(const std::string& cli, const std::string& golden) {
  struct Case {
    std::string args;
    int exit;
    std::string goldenFile;
  };
  const std::vector<Case> cases = {
      {"dump-tree \"cone(01)\" --depth 2 --format json", 0, "dump_cone01.json"},
      {"dump-tree \"restrict(full,1)\" --depth 1", 0, "dump_restrict.json"},
      {"dump-tree \"cone(01\" --depth 2", 2, ""},
  };
  for (const auto& c : cases) {
    Run r = runCli(cli, c.args);
    if (r.exit != c.exit)
      return {false, c.args + ": exit " + std::to_string(r.exit) + ", expected " + std::to_string(c.exit)};
    if (!c.goldenFile.empty() && r.out != slurp(golden + "/" + c.goldenFile))
      return {false, c.args + ": output differs from " + c.goldenFile};
  }
  return {true, std::to_string(cases.size()) + " commands"};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance <ptforce-cli> <golden-dir>\n";
    return 2;
  }
  const std::string cli = argv[1], golden = argv[2];

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"A1", a1},
      {"A2", a2},
      {"A3", a3},
      {"A4", [] { return lemmaPair({"disj1", "disj4"}); }},
      {"A5", [] { return lemmaPair({"disj2", "disj3"}); }},
      {"A6", [] { return lemmaPair({"uu3"}); }},
      {"A7", a7},
      {"A8", a8},
      {"A9", a9},
      {"A10", a10},
      {"A11", a11},
      {"A12", [&] { return a12(cli, golden); }},
  };
  bool all = true;
  for (const auto& [id, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    all = all && o.ok;
    std::cout << id << " " << (o.ok ? "pass" : "fail") << " " << o.detail << std::endl;
  }
  return all ? 0 : 1;
}
