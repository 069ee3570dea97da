#include "ptforce/splitsys.hpp"

#include <memory>
#include <mutex>

#include "ptforce/errors.hpp"

namespace ptforce {

SplitSys SplitSys::seeded(Tree root) {
  SplitSys sys;
  sys.height_ = 1;
  sys.entries_.push_back(std::move(root));
  return sys;
}

SplitSys SplitSys::fromEntries(std::vector<Tree> entries) {
  SplitSys sys;
  std::size_t n = 0;
  while (((std::size_t{1} << n) - 1) < entries.size()) ++n;
  if (((std::size_t{1} << n) - 1) != entries.size())
    fail(ErrorCode::IllFormed, "entry count " + std::to_string(entries.size()) +
                                   " is not 2^n - 1");
  sys.height_ = n;
  sys.entries_ = std::move(entries);
  return sys;
}

const Tree& SplitSys::at(const BitString& s) const {
  if (s.size() >= height_)
    fail(ErrorCode::IllFormed, s.display() + " outside a system of height " +
                                   std::to_string(height_));
  return entries_[s.heapIndex()];
}

SplitSys SplitSys::with(const BitString& s, Tree tree) const {
  (void)at(s);
  SplitSys out = *this;
  out.entries_[s.heapIndex()] = std::move(tree);
  return out;
}

SplitSys SplitSys::grown(std::vector<Tree> layer) const {
  if (layer.size() != (std::size_t{1} << height_))
    fail(ErrorCode::IllFormed, "layer of wrong width");
  SplitSys out = *this;
  out.entries_.insert(out.entries_.end(), std::make_move_iterator(layer.begin()),
                      std::make_move_iterator(layer.end()));
  ++out.height_;
  return out;
}

Verdict checkSpe2(const SplitSys& sys, std::size_t d) {
  for (std::size_t len = 1; len < sys.height(); ++len) {
    for (const auto& child : allStrings(len)) {
      const Tree& parentTree = sys.at(child.parent());
      const Tree& childTree = sys.at(child);
      if (!subsetToDepth(childTree, parentTree, d)) return Verdict::no(child.display());
      BitString want = stem(parentTree).child(child[len - 1]);
      if (!want.isPrefixOf(stem(childTree))) return Verdict::no(child.display());
    }
  }
  return Verdict::yes();
}

SplitRelations relate(const SplitSys& older, const SplitSys& newer, std::size_t d) {
  SplitRelations rel;
  if (older.height() <= newer.height()) {
    bool agree = true;
    for (std::size_t i = 0; i < older.entries().size() && agree; ++i)
      agree = older.entries()[i] == newer.entries()[i];
    rel.extends = agree;
    rel.properlyExtends = agree && older.height() < newer.height();
  }
  if (older.height() == newer.height()) {
    const std::size_t n = older.height();
    bool ok = true;
    const std::size_t lower = n == 0 ? 0 : (std::size_t{1} << (n - 1)) - 1;
    for (std::size_t i = 0; i < lower && ok; ++i) ok = older.entries()[i] == newer.entries()[i];
    for (std::size_t i = lower; i < older.entries().size() && ok; ++i)
      ok = subsetToDepth(newer.entries()[i], older.entries()[i], d);
    rel.reduces = ok;
  }
  return rel;
}

SplitSys defaultExtend(const SplitSys& sys) {
  if (sys.empty())
    fail(ErrorCode::HeightZero, "the empty system has no stem to split; seed it first");
  std::vector<Tree> layer;
  layer.reserve(std::size_t{1} << sys.height());
  for (const auto& s : allStrings(sys.height() - 1)) {
    const Tree& t = sys.at(s);
    BitString st = stem(t);
    layer.push_back(restrict(t, st.child(0)));
    layer.push_back(restrict(t, st.child(1)));
  }
  return sys.grown(std::move(layer));
}

SplitSys truncate(const FullSplitSys& sys, std::size_t height) {
  std::vector<Tree> entries;
  for (std::size_t len = 0; len < height; ++len)
    for (const auto& s : allStrings(len)) entries.push_back(sys.at(s));
  return SplitSys::fromEntries(std::move(entries));
}

namespace {

struct ChainState {
  std::mutex mutex;
  ChainGenerator next;
  SplitSys current;
  std::size_t d = 0;
  std::size_t budget = 0;
};

}  // namespace

FusedChain fuse(ChainGenerator chain, std::string label, std::size_t d, std::size_t pullBudget) {
  auto state = std::make_shared<ChainState>();
  state->next = std::move(chain);
  state->d = d;
  state->budget = pullBudget;
  auto realize = [state](const BitString& s) -> Tree {
    std::lock_guard lock(state->mutex);
    std::size_t pulls = 0;
    const std::size_t needed = s.size() + 1;
    const std::size_t allowance =
        state->budget * (needed > state->current.height() ? needed - state->current.height() : 1);
    while (state->current.height() < needed) {
      if (pulls++ >= allowance)
        fail(ErrorCode::ChainStalled, "pull budget exhausted before height " +
                                          std::to_string(needed));
      SplitSys next = state->next();
      if (!relate(state->current, next, state->d).extends)
        fail(ErrorCode::ChainStalled, "chain step does not extend its predecessor");
      state->current = std::move(next);
    }
    return state->current.at(s);
  };
  auto sys = std::make_shared<const FullSplitSys>(std::move(label), realize, true);
  return {sys, Tree::fusion(sys)};
}

ChainGenerator defaultChain(Tree seed) {
  auto current = std::make_shared<SplitSys>();
  auto root = std::make_shared<Tree>(std::move(seed));
  return [current, root]() {
    *current = current->empty() ? SplitSys::seeded(*root) : defaultExtend(*current);
    return *current;
  };
}

}  // namespace ptforce
