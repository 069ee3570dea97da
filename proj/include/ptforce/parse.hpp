#pragma once

#include <functional>
#include <string_view>

#include "ptforce/tree.hpp"

namespace ptforce {

/// Maps the <sysref> of `fusion(<sysref>[,<bits>])` to a system.
using SysResolver = std::function<SysPtr(std::string_view ref)>;

/// Parses the textual syntax
///   full | cone(<bits>) | restrict(<expr>,<bits>) | union(<expr>,...) |
///   fusion(<sysref>[,<bits>])
/// into an unnormalized expression. Errors are ParseError with the byte
/// offset of the failure.
Tree parseTree(std::string_view text, const SysResolver& resolver = {});

}  // namespace ptforce
