#pragma once

#include <cstddef>
#include <optional>
#include <string>

namespace ptforce {

/// Three-valued answer. Yes and No are exact claims; Unknown records the
/// depth to which the positive condition was seen to hold.
struct Verdict {
  enum class Kind { Yes, No, Unknown };

  Kind kind = Kind::Unknown;
  std::size_t checkedDepth = 0;
  std::optional<std::string> witness;

  static Verdict yes() { return {Kind::Yes, 0, std::nullopt}; }
  static Verdict no(std::string witness = {}) {
    return {Kind::No, 0, witness.empty() ? std::nullopt : std::optional(std::move(witness))};
  }
  static Verdict unknown(std::size_t depth) { return {Kind::Unknown, depth, std::nullopt}; }

  bool isYes() const noexcept { return kind == Kind::Yes; }
  bool isNo() const noexcept { return kind == Kind::No; }
  bool isUnknown() const noexcept { return kind == Kind::Unknown; }

  std::string str() const {
    switch (kind) {
      case Kind::Yes: return "yes";
      case Kind::No: return witness ? "no(" + *witness + ")" : "no";
      case Kind::Unknown: return "unknown(" + std::to_string(checkedDepth) + ")";
    }
    return "?";
  }
};

}  // namespace ptforce
