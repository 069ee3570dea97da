// Command-line front end: dump-tree, run-stages, verify, avoid-demo.
//
// Exit codes: 0 success, 1 a check or tree operation failed, 2 usage or
// config error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "ptforce/demo.hpp"
#include "ptforce/errors.hpp"
#include "ptforce/parse.hpp"
#include "ptforce/serialize.hpp"
#include "ptforce/stages.hpp"

using namespace ptforce;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

bool isConfigError(ErrorCode code) {
  return code == ErrorCode::ConfigError || code == ErrorCode::ParseError;
}

Json readJson(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ConfigError, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::ConfigError, path + ": " + e.what());
  }
}

void writeFile(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::ConfigError, "cannot write " + path);
  out << text << "\n";
}

StageConfig loadStages(const std::string& path) {
  return path.empty() ? defaultStageConfig() : stageConfigFromJson(readJson(path));
}

int dumpTree(const std::string& expr, std::size_t depth, const std::string& format) {
  Tree tree;
  try {
    tree = parseTree(expr);
  } catch (const ForcingError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  }
  if (format == "dot") std::cout << toDot(tree, depth);
  else std::cout << levelsJson(tree, depth).dump() << "\n";
  return kOk;
}

int runStagesCmd(const std::string& configPath, std::string outPath) {
  StageConfig cfg = loadStages(configPath);
  StageTrace trace = runStages(cfg);
  Json j = traceJson(trace);
  if (outPath.empty()) outPath = cfg.label + ".trace.json";
  writeFile(outPath, j.dump(2));
  std::cout << "stages " << cfg.stages << " hash " << sha256Hex(j.dump()) << "\n";
  return kOk;
}

// Report entry names each group covers, matched on the part after any
// "stage<α>:" prefix.
const std::map<std::string, std::vector<std::string>> kCheckGroups = {
    {"disj", {"disj1", "disj2", "disj3", "disj4"}},
    {"uu2", {"uu2"}},
    {"uu3", {"uu3"}},
    {"uu4", {"uu4"}},
    {"xr", {"xr"}},
    {"jden", {"jden("}},
    {"xiden", {"xiden("}},
    {"cross", {"xiden-uu3("}},
    {"monotone", {"monotone"}},
    {"default", {"default"}},
};

bool selected(const std::string& name, const std::set<std::string>& groups) {
  std::string base = name.substr(name.find(':') == std::string::npos ? 0 : name.find(':') + 1);
  for (const auto& g : groups)
    for (const auto& prefix : kCheckGroups.at(g))
      if (prefix.back() == '(' ? base.rfind(prefix, 0) == 0 : base == prefix) return true;
  return false;
}

int verifyCmd(const std::string& configPath, const std::string& checks, std::size_t depth,
              const std::string& reportPath) {
  std::set<std::string> groups;
  std::stringstream ss(checks);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item == "all") {
      for (const auto& [k, v] : kCheckGroups) groups.insert(k);
    } else if (kCheckGroups.count(item)) {
      groups.insert(item);
    } else {
      std::cerr << "unknown check '" << item << "'; known: all";
      for (const auto& [k, v] : kCheckGroups) std::cerr << "," << k;
      std::cerr << "\n";
      return kUsage;
    }
  }
  StageConfig cfg = loadStages(configPath);
  StageTrace trace = runStages(cfg);
  Report all = checkStageLemmas(trace, depth);
  for (auto& c : checkPreDensity(trace, depth).checks) all.checks.push_back(std::move(c));
  all.checks.push_back(lemmaXrCheck(1000, cfg.seed, depth));

  Report report;
  for (const auto& c : all.checks)
    if (selected(c.name, groups)) report.checks.push_back(c);
  for (const auto& c : report.checks) {
    std::cout << c.name << " " << statusName(c.status);
    if (!c.detail.empty()) std::cout << " " << c.detail;
    std::cout << "\n";
  }
  if (!reportPath.empty()) writeFile(reportPath, toJson(report).dump(2));
  return report.ok() ? kOk : kFailed;
}

int avoidDemoCmd(const std::string& configPath, const std::string& demo, const std::string& outPath) {
  AvoidDemoConfig cfg;
  if (!configPath.empty()) cfg = avoidDemoConfigFromJson(readJson(configPath));
  else if (demo == "zero") cfg = constantDemoConfig();
  else cfg = canonicalDemoConfig();
  auto res = runAvoidDemo(cfg);
  if (!outPath.empty()) writeFile(outPath, res.trace.dump(2));
  else std::cout << res.trace.dump(2) << "\n";
  std::cerr << "v refines u: " << (res.result.refines ? "yes" : "no")
            << ", avoid verdict: " << res.result.avoids.str() << "\n";
  return res.ok() ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perfect-tree forcing toolkit"};
  app.require_subcommand(1);

  std::string expr, format = "json";
  std::size_t depth = 3;
  auto* dump = app.add_subcommand("dump-tree", "Print the levels of a tree expression");
  dump->add_option("expr", expr, "Tree expression")->required();
  dump->add_option("--depth", depth, "Deepest level to print");
  dump->add_option("--format", format, "json or dot")->check(CLI::IsMember({"json", "dot"}));

  std::string config, out;
  auto* stages = app.add_subcommand("run-stages", "Run the staged construction and write its trace");
  stages->add_option("--config", config, "JSON config (defaults built in)");
  stages->add_option("--out", out, "Trace file (default <label>.trace.json)");

  std::string checks = "all", report;
  std::size_t verifyDepth = 8;
  auto* verify = app.add_subcommand("verify", "Run lemma and pre-density checks");
  verify->add_option("--config", config, "JSON config (defaults built in)");
  verify->add_option("--checks", checks, "Comma-separated groups, or all");
  verify->add_option("--depth", verifyDepth, "Level depth for the checks");
  verify->add_option("--report", report, "Also write the report as JSON");

  std::string demo = "pi";
  auto* avoid = app.add_subcommand("avoid-demo", "Build an avoiding condition for a name");
  avoid->add_option("--config", config, "JSON config");
  avoid->add_option("--demo", demo, "Built-in demo when no config: pi or zero")
      ->check(CLI::IsMember({"pi", "zero"}));
  avoid->add_option("--out", out, "Write the trace here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*dump) return dumpTree(expr, depth, format);
    if (*stages) return runStagesCmd(config, out);
    if (*verify) return verifyCmd(config, checks, verifyDepth, report);
    if (*avoid) return avoidDemoCmd(config, demo, out);
  } catch (const ForcingError& e) {
    std::cerr << e.what() << "\n";
    return isConfigError(e.code()) ? kUsage : kFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kUsage;
}
