#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "sst/error.hpp"
#include "sst/word.hpp"

namespace sst {

/// Total map from a machine's variables to words over its output alphabet and
/// variables. Entry `i` is the right-hand side of variable `i`.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::vector<Word> rhs) : rhs_(std::move(rhs)) {}

  static Assignment identity(std::size_t var_count) {
    std::vector<Word> rhs(var_count);
    for (std::size_t v = 0; v < var_count; ++v) rhs[v] = {Item::variable(static_cast<VarId>(v))};
    return Assignment(std::move(rhs));
  }

  /// Er_X: every variable is reset to the empty word.
  static Assignment eraser(std::size_t var_count) { return Assignment(std::vector<Word>(var_count)); }

  std::size_t var_count() const { return rhs_.size(); }
  const Word& operator[](VarId v) const { return rhs_.at(v); }
  Word& operator[](VarId v) { return rhs_.at(v); }
  const std::vector<Word>& words() const { return rhs_; }

  bool is_identity() const {
    for (std::size_t v = 0; v < rhs_.size(); ++v) {
      if (rhs_[v].size() != 1 || rhs_[v][0] != Item::variable(static_cast<VarId>(v))) return false;
    }
    return true;
  }

  /// Sum of right-hand-side lengths.
  std::size_t total_length() const {
    std::size_t n = 0;
    for (const auto& w : rhs_) n += w.size();
    return n;
  }

  auto operator<=>(const Assignment&) const = default;

 private:
  std::vector<Word> rhs_;
};

/// Extends `a` to a morphism and applies it to `w`: symbols are fixed and each
/// variable is replaced by its right-hand side.
inline Word apply_morphism(const Assignment& a, const Word& w) {
  for (Item it : w) {
    if (it.is_variable() && it.id() >= a.var_count()) {
      throw DomainError("variable #" + std::to_string(it.id()) + " is outside the assignment's domain");
    }
  }
  return substitute(w, [&](VarId v) { return &a[v]; });
}

/// first ∘ second, i.e. x ↦ first(second(x)).
inline Assignment sequential_compose(const Assignment& first, const Assignment& second) {
  if (first.var_count() != second.var_count()) {
    throw DomainError("cannot compose assignments over " + std::to_string(first.var_count()) + " and " +
                      std::to_string(second.var_count()) + " variables");
  }
  std::vector<Word> rhs;
  rhs.reserve(second.var_count());
  for (const Word& w : second.words()) rhs.push_back(apply_morphism(first, w));
  return Assignment(std::move(rhs));
}

}  // namespace sst
