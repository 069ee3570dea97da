#pragma once

#include <string>
#include <vector>

namespace ptforce {

enum class CheckStatus { Pass, Fail, Skipped };

inline const char* statusName(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Skipped: return "skipped";
  }
  return "?";
}

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::Skipped;
  std::string detail;  // witness on failure, reason when skipped
};

struct Report {
  std::vector<CheckResult> checks;

  void add(std::string name, CheckStatus status, std::string detail = {}) {
    checks.push_back({std::move(name), status, std::move(detail)});
  }
  bool ok() const {
    for (const auto& c : checks)
      if (c.status == CheckStatus::Fail) return false;
    return true;
  }
  const CheckResult* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

}  // namespace ptforce
