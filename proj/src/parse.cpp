#include "ptforce/parse.hpp"

#include <cctype>
#include <string>

#include "ptforce/errors.hpp"

namespace ptforce {
namespace {

class Parser {
 public:
  Parser(std::string_view text, const SysResolver& resolver)
      : text_(text), resolver_(resolver) {}

  Tree parseAll() {
    Tree tree = expr();
    skipSpace();
    if (pos_ != text_.size()) error("trailing input");
    return tree;
  }

 private:
  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorCode::ParseError, what + " at position " + std::to_string(pos_));
  }

  void skipSpace() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skipSpace();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) error(std::string("expected '") + c + "'");
  }

  std::string word() {
    skipSpace();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  BitString bits() {
    skipSpace();
    std::size_t start = pos_;
    while (pos_ < text_.size() && (text_[pos_] == '0' || text_[pos_] == '1')) ++pos_;
    return BitString::parse(text_.substr(start, pos_ - start));
  }

  // A system reference runs to the first top-level ',' or ')'.
  std::string sysref() {
    skipSpace();
    std::size_t start = pos_;
    int depth = 0;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '(') ++depth;
      if (c == ')') {
        if (depth == 0) break;
        --depth;
      }
      if (c == ',' && depth == 0) break;
      ++pos_;
    }
    std::string ref(text_.substr(start, pos_ - start));
    while (!ref.empty() && std::isspace(static_cast<unsigned char>(ref.back()))) ref.pop_back();
    if (ref.empty()) error("empty system reference");
    return ref;
  }

  Tree expr() {
    const std::size_t start = pos_;
    std::string head = word();
    if (head == "full") return Tree::full();
    if (head == "cone") {
      expect('(');
      BitString s = bits();
      expect(')');
      return Tree::cone(std::move(s));
    }
    if (head == "restrict") {
      expect('(');
      Tree base = expr();
      expect(',');
      BitString s = bits();
      expect(')');
      return Tree::restriction(std::move(base), std::move(s));
    }
    if (head == "union") {
      expect('(');
      std::vector<Tree> parts{expr()};
      while (accept(',')) parts.push_back(expr());
      expect(')');
      return Tree::unite(std::move(parts));
    }
    if (head == "fusion") {
      expect('(');
      std::string ref = sysref();
      BitString at;
      if (accept(',')) at = bits();
      expect(')');
      if (!resolver_) error("no system resolver for '" + ref + "'");
      SysPtr sys = resolver_(ref);
      if (!sys) error("unknown system '" + ref + "'");
      return Tree::fusion(std::move(sys), std::move(at));
    }
    pos_ = start;
    error(head.empty() ? "expected a tree expression" : "unknown constructor '" + head + "'");
  }

  std::string_view text_;
  const SysResolver& resolver_;
  std::size_t pos_ = 0;
};

}  // namespace

Tree parseTree(std::string_view text, const SysResolver& resolver) {
  return Parser(text, resolver).parseAll();
}

}  // namespace ptforce
