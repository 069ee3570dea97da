#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace ptforce {

/// A finite binary string. Ordered length-lexicographically, which is the
/// canonical enumeration order used everywhere in the library.
class BitString {
 public:
  BitString() = default;

  /// Accepts a run of '0'/'1' characters; "" and "Λ" both denote the empty
  /// string. Throws ForcingError(ParseError) on any other character.
  static BitString parse(std::string_view text);
  static BitString zeros(std::size_t n) { return BitString(std::string(n, '0')); }
  /// The string of length `len` whose bits spell `value` (most significant
  /// bit first).
  static BitString fromIndex(std::size_t len, std::uint64_t value);
  /// The n-th string in length-lexicographic order (0 -> Λ, 1 -> 0, ...).
  static BitString nth(std::uint64_t n);

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }
  int operator[](std::size_t i) const { return bits_[i] == '1' ? 1 : 0; }

  BitString child(int bit) const;
  BitString prefix(std::size_t n) const { return BitString(bits_.substr(0, n)); }
  BitString parent() const { return prefix(size() - 1); }

  bool isPrefixOf(const BitString& other) const noexcept;
  bool comparableWith(const BitString& other) const noexcept {
    return isPrefixOf(other) || other.isPrefixOf(*this);
  }
  /// Numeric value of the bits; only meaningful for size() < 64.
  std::uint64_t value() const;
  /// Position in the heap layout of 2^{<n}: (2^len - 1) + value.
  std::size_t heapIndex() const;

  const std::string& bits() const noexcept { return bits_; }
  /// Bits, with "Λ" for the empty string.
  std::string display() const { return bits_.empty() ? std::string("Λ") : bits_; }

  friend bool operator==(const BitString&, const BitString&) = default;
  friend std::strong_ordering operator<=>(const BitString& a, const BitString& b) {
    if (a.size() != b.size()) return a.size() <=> b.size();
    return a.bits_.compare(b.bits_) <=> 0;
  }

 private:
  explicit BitString(std::string bits) : bits_(std::move(bits)) {}
  std::string bits_;
};

/// All strings of length n in lexicographic order.
std::vector<BitString> allStrings(std::size_t n);
/// All strings of length <= n in length-lexicographic order.
std::vector<BitString> allStringsUpTo(std::size_t n);

}  // namespace ptforce

template <>
struct std::hash<ptforce::BitString> {
  std::size_t operator()(const ptforce::BitString& s) const noexcept {
    return std::hash<std::string>{}(s.bits());
  }
};
