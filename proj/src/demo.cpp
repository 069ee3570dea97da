#include "ptforce/demo.hpp"

#include <regex>
#include <set>

#include "ptforce/errors.hpp"

namespace ptforce {

AvoidDemoConfig canonicalDemoConfig() {
  AvoidDemoConfig cfg;
  cfg.spec.name = canonicalName(1, 0, 12);
  cfg.spec.u = {{{0, 1}, {0, BitString::parse("1")}},
                {{0, 4}, {1, BitString::parse("0")}},
                {{1, 2}, {0, BitString()}}};
  return cfg;
}

AvoidDemoConfig constantDemoConfig() {
  AvoidDemoConfig cfg;
  cfg.length = 1;
  cfg.spec.name = constantName(0, 10);
  return cfg;
}

RealName nameFromSpec(const std::string& spec, std::size_t horizon) {
  if (spec == "zero") return constantName(0, horizon);
  if (spec == "one") return constantName(1, horizon);
  static const std::regex pi(R"(pi\((\d+),(\d+)\))");
  std::smatch m;
  if (std::regex_match(spec, m, pi))
    return canonicalName(std::stoul(m[1].str()), std::stoul(m[2].str()), horizon);
  fail(ErrorCode::ConfigError, "unknown name '" + spec + "'");
}

namespace {

std::size_t natural(const Json& j, const char* key, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    fail(ErrorCode::ConfigError, std::string("'") + key + "' must be a natural number");
  return v.get<std::size_t>();
}

}  // namespace

AvoidDemoConfig avoidDemoConfigFromJson(const Json& j) {
  if (!j.is_object()) fail(ErrorCode::ConfigError, "the config must be an object");
  static const std::set<std::string> known = {"length", "m", "h", "steps", "depth", "name",
                                              "horizon", "eta", "M", "u", "oracle"};
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) fail(ErrorCode::ConfigError, "unknown key '" + k + "'");
  AvoidDemoConfig cfg;
  cfg.length = natural(j, "length", cfg.length);
  cfg.mBound = natural(j, "m", cfg.mBound);
  cfg.hBound = natural(j, "h", cfg.hBound);
  cfg.steps = natural(j, "steps", cfg.steps);
  cfg.depth = natural(j, "depth", cfg.depth);
  if (!j.contains("name") || !j.at("name").is_string()) fail(ErrorCode::ConfigError, "missing 'name'");
  cfg.spec.name = nameFromSpec(j.at("name").get<std::string>(), natural(j, "horizon", 12));
  cfg.spec.eta = natural(j, "eta", 0);
  cfg.spec.M = natural(j, "M", 0);
  if (j.contains("oracle")) cfg.spec.oracle = j.at("oracle").get<std::string>();
  if (j.contains("u")) {
    for (const auto& [key, entry] : j.at("u").items()) {
      if (!entry.is_object() || !entry.contains("m"))
        fail(ErrorCode::ConfigError, "u entry " + key + " needs m and s");
      try {
        cfg.spec.u[Coord::parse(key)] = {natural(entry, "m", 0),
                                         BitString::parse(entry.value("s", std::string()))};
      } catch (const ForcingError& e) {
        fail(ErrorCode::ConfigError, "u entry " + key + ": " + e.what());
      }
    }
  }
  if (cfg.length == 0 || cfg.mBound == 0 || cfg.hBound == 0)
    fail(ErrorCode::ConfigError, "length, m and h must be positive");
  for (const auto& c : relevantCoords(cfg.spec.name))
    if (c.xi >= cfg.length) fail(ErrorCode::ConfigError, "the name reads beyond the sequence");
  return cfg;
}

AvoidDemoResult runAvoidDemo(const AvoidDemoConfig& cfg) {
  auto p = std::make_shared<Seq>("p", std::vector<NotionPtr>(cfg.length, cohenForcing()));
  auto trace = std::make_shared<AvoidTrace>();
  DenseSchedule schedule;
  schedule.hBound = cfg.hBound;
  schedule.mBound = cfg.mBound;
  schedule.families.push_back(heightsFamily(*p, cfg.length, cfg.mBound, cfg.hBound));
  schedule.families.push_back(avoidanceFamily(*p, cfg.spec, 8, trace));
  auto g = GenericSeq::build(p, schedule, cfg.steps, "g", 8);
  g->completeSchedule();

  const MultiTree u = conditionFromSpec(*g, cfg.spec);
  const auto nc = normalize(u, *g, cfg.spec.eta, cfg.spec.M);
  AvoidDemoResult out;
  out.u = u;
  out.generic = g;
  out.result = deriveAvoider(*g, avoidLabel(cfg.spec), u, nc, cfg.spec.name, cfg.depth);

  Json j{{"name", toJson(cfg.spec.name)},
         {"eta", cfg.spec.eta},
         {"M", cfg.spec.M},
         {"oracle", cfg.spec.oracle},
         {"u", toJson(u)},
         {"normalized", toJson(nc.tree)},
         {"step", out.result.step},
         {"sigma_witness", toJson(out.result.witness.sigma)},
         {"v", toJson(out.result.v)},
         {"U", out.result.uTree.text()},
         {"refines", out.result.refines},
         {"avoids", out.result.avoids.str()}};
  if (trace->rho) {
    j["rho"] = toJson(trace->rho->rho);
    j["ell"] = trace->rho->ell;
    j["sigma"] = toJson(*trace->sigma);
    j["phi_prime"] = toJson(*trace->output);
  }
  out.trace = std::move(j);
  return out;
}

}  // namespace ptforce
