#include "ptforce/bitstring.hpp"

#include "ptforce/errors.hpp"

namespace ptforce {

std::string_view errorName(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::IllFormed: return "IllFormed";
    case ErrorCode::NotInTree: return "NotInTree";
    case ErrorCode::SystemUnavailable: return "SystemUnavailable";
    case ErrorCode::StemDepthExceeded: return "StemDepthExceeded";
    case ErrorCode::NotMember: return "NotMember";
    case ErrorCode::HeightZero: return "HeightZero";
    case ErrorCode::ChainStalled: return "ChainStalled";
    case ErrorCode::SeqMismatch: return "SeqMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::RefinerContract: return "RefinerContract";
    case ErrorCode::ScheduleMissing: return "ScheduleMissing";
    case ErrorCode::HorizonExceeded: return "HorizonExceeded";
    case ErrorCode::NotUForm: return "NotUForm";
    case ErrorCode::ConditionOneFails: return "ConditionOneFails";
    case ErrorCode::StepConflict: return "StepConflict";
    case ErrorCode::OracleFailure: return "OracleFailure";
    case ErrorCode::NotMet: return "NotMet";
    case ErrorCode::StageOrder: return "StageOrder";
    case ErrorCode::StageBudget: return "StageBudget";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

BitString BitString::parse(std::string_view text) {
  if (text == "Λ") return BitString();
  std::string bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1')
      fail(ErrorCode::ParseError, "invalid bit '" + std::string(1, c) + "' in \"" +
                                      std::string(text) + "\"");
    bits.push_back(c);
  }
  return BitString(std::move(bits));
}

BitString BitString::fromIndex(std::size_t len, std::uint64_t value) {
  std::string bits(len, '0');
  for (std::size_t i = 0; i < len; ++i)
    if ((value >> (len - 1 - i)) & 1U) bits[i] = '1';
  return BitString(std::move(bits));
}

BitString BitString::nth(std::uint64_t n) {
  // Strings of length L occupy positions [2^L - 1, 2^{L+1} - 1).
  std::size_t len = 0;
  while (((std::uint64_t{1} << (len + 1)) - 1) <= n) ++len;
  return fromIndex(len, n - ((std::uint64_t{1} << len) - 1));
}

BitString BitString::child(int bit) const {
  std::string bits = bits_;
  bits.push_back(bit ? '1' : '0');
  return BitString(std::move(bits));
}

bool BitString::isPrefixOf(const BitString& other) const noexcept {
  return bits_.size() <= other.bits_.size() &&
         other.bits_.compare(0, bits_.size(), bits_) == 0;
}

std::uint64_t BitString::value() const {
  std::uint64_t v = 0;
  for (char c : bits_) v = (v << 1) | (c == '1' ? 1U : 0U);
  return v;
}

std::size_t BitString::heapIndex() const {
  return ((std::size_t{1} << size()) - 1) + static_cast<std::size_t>(value());
}

std::vector<BitString> allStrings(std::size_t n) {
  std::vector<BitString> out;
  out.reserve(std::size_t{1} << n);
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v)
    out.push_back(BitString::fromIndex(n, v));
  return out;
}

std::vector<BitString> allStringsUpTo(std::size_t n) {
  std::vector<BitString> out;
  for (std::size_t len = 0; len <= n; ++len) {
    auto level = allStrings(len);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

}  // namespace ptforce
