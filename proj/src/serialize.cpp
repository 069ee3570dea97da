#include "ptforce/serialize.hpp"

#include <openssl/evp.h>

#include <cstdio>

#include "ptforce/errors.hpp"

namespace ptforce {

Json toJson(const Tree& tree) { return tree.text(); }

Json toJson(const SplitSys& sys) {
  Json out = Json::array();
  for (const auto& t : sys.entries()) out.push_back(t.text());
  return out;
}

Json toJson(const MultiTree& tree) {
  Json out = Json::object();
  for (const auto& [c, t] : tree.entries()) out[c.key()] = t.text();
  return out;
}

Json toJson(const MultiSys& sys) {
  Json out = Json::object();
  for (const auto& [c, s] : sys.entries()) out[c.key()] = toJson(s);
  return out;
}

Json toJson(const RealName& name) {
  if (name.canonical) return name.label;
  Json cells = Json::array();
  for (const auto& cell : name.cells) {
    Json pair = Json::array();
    for (const auto& side : cell) {
      Json members = Json::array();
      for (const auto& mt : side) members.push_back(toJson(mt));
      pair.push_back(members);
    }
    cells.push_back(pair);
  }
  return Json{{"label", name.label}, {"horizon", name.horizon}, {"cells", cells}};
}

Json toJson(const Report& report) {
  Json out = Json::array();
  for (const auto& c : report.checks)
    out.push_back({{"name", c.name}, {"status", statusName(c.status)}, {"detail", c.detail}});
  return out;
}

Json toJson(const std::vector<MetRecord>& log) {
  Json out = Json::array();
  for (const auto& r : log)
    out.push_back({{"label", r.label}, {"family", r.family}, {"step", r.step}, {"refined", r.refined}});
  return out;
}

Json toJson(const ScheduleRecipe& recipe) {
  Json seeds = Json::array();
  for (const auto& [xi, t] : recipe.seeds) seeds.push_back({{"xi", xi}, {"tree", t.text()}});
  Json covers = Json::array();
  for (const auto& c : recipe.covers) {
    Json pre = Json::array();
    for (const auto& t : c.predense) pre.push_back(t.text());
    covers.push_back({{"label", c.label}, {"xi", c.xi}, {"m", c.mBound}, {"slen", c.slen}, {"predense", pre}});
  }
  Json predense = Json::array();
  for (const auto& d : recipe.predense) {
    Json members = Json::array();
    for (const auto& m : d.members) members.push_back(toJson(m));
    predense.push_back({{"label", d.label}, {"members", members}});
  }
  Json out{{"xi", recipe.xiBound}, {"heights", {{"m", recipe.mBound}, {"h", recipe.hBound}}},
           {"seeds", seeds}, {"covers", covers}, {"predense", predense}};
  if (recipe.disjointMBound) out["disjoint"] = {{"m", *recipe.disjointMBound}};
  return out;
}

Json levelsJson(const Tree& tree, std::size_t depth) {
  Json levels = Json::array();
  for (std::size_t n = 0; n <= depth; ++n) {
    Json lv = Json::array();
    for (const auto& s : level(tree, n)) lv.push_back(s.display());
    levels.push_back(lv);
  }
  return Json{{"levels", levels}};
}

MultiTree multiTreeFromJson(const Json& j, const SysResolver& resolver) {
  if (!j.is_object()) fail(ErrorCode::ConfigError, "a multitree is an object keyed by \"xi,k\"");
  std::map<Coord, Tree> entries;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_string()) fail(ErrorCode::ConfigError, "entry " + key + " is not a tree expression");
    entries[Coord::parse(key)] = normalForm(parseTree(value.get<std::string>(), resolver));
  }
  return MultiTree(std::move(entries));
}

std::string sha256Hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  std::string out;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    out += buf;
  }
  return out;
}

}  // namespace ptforce
