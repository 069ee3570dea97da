#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ptforce/jensen.hpp"
#include "ptforce/multi.hpp"
#include "ptforce/names.hpp"
#include "ptforce/parse.hpp"
#include "ptforce/report.hpp"
#include "ptforce/splitsys.hpp"
#include "ptforce/tree.hpp"

namespace ptforce {

using Json = nlohmann::json;

Json toJson(const Tree& tree);
/// Entries in heap order.
Json toJson(const SplitSys& sys);
/// Object keyed by "xi,k".
Json toJson(const MultiTree& tree);
Json toJson(const MultiSys& sys);
/// Canonical names serialize as "pi(xi,k)"; others list their cells.
Json toJson(const RealName& name);
Json toJson(const Report& report);
Json toJson(const std::vector<MetRecord>& log);
Json toJson(const ScheduleRecipe& recipe);

/// {"levels":[[...],...]} for levels 0..depth, Λ for the empty string.
Json levelsJson(const Tree& tree, std::size_t depth);

/// Inverse of toJson(MultiTree); tree texts use parseTree syntax.
MultiTree multiTreeFromJson(const Json& j, const SysResolver& resolver = {});

/// Lowercase hex SHA-256 of the bytes.
std::string sha256Hex(const std::string& bytes);

}  // namespace ptforce
