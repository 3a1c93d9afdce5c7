#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace sst {

using StateId = std::uint32_t;
using SymbolId = std::uint32_t;
using VarId = std::uint32_t;

inline constexpr StateId no_state = UINT32_MAX;

/// One letter of a word over output symbols and variables. Ids are local to
/// the machine that owns the word: symbol ids index its output alphabet and
/// variable ids index its variable list.
class Item {
 public:
  static constexpr Item symbol(SymbolId id) { return Item{id}; }
  static constexpr Item variable(VarId id) { return Item{id | var_bit}; }

  constexpr bool is_variable() const { return (raw_ & var_bit) != 0; }
  constexpr bool is_symbol() const { return !is_variable(); }
  constexpr std::uint32_t id() const { return raw_ & ~var_bit; }

  constexpr auto operator<=>(const Item&) const = default;

 private:
  static constexpr std::uint32_t var_bit = 0x80000000u;
  constexpr explicit Item(std::uint32_t raw) : raw_(raw) {}
  std::uint32_t raw_;
};

/// Word over (Omega ∪ X)*.
using Word = std::vector<Item>;

/// Word over an alphabet only, as symbol ids.
using SymbolString = std::vector<SymbolId>;

/// Word over an alphabet, spelled with symbol names. Used wherever words cross
/// machine boundaries (relations, composition oracles, the CLI).
using Text = std::vector<std::string>;

/// Rewrites every variable of `w` through `lookup`, which returns a pointer to
/// the replacement word or nullptr to leave the variable in place.
template <class Lookup>
Word substitute(const Word& w, Lookup&& lookup) {
  Word out;
  out.reserve(w.size());
  for (Item it : w) {
    if (it.is_variable()) {
      if (const Word* rep = lookup(it.id())) {
        out.insert(out.end(), rep->begin(), rep->end());
        continue;
      }
    }
    out.push_back(it);
  }
  return out;
}

/// Er_X: drops every variable occurrence.
inline Word erase_variables(const Word& w) {
  Word out;
  for (Item it : w) {
    if (it.is_symbol()) out.push_back(it);
  }
  return out;
}

inline bool contains_variable(const Word& w, VarId v) {
  for (Item it : w) {
    if (it.is_variable() && it.id() == v) return true;
  }
  return false;
}

inline std::size_t count_variable(const Word& w, VarId v) {
  std::size_t n = 0;
  for (Item it : w) {
    if (it.is_variable() && it.id() == v) ++n;
  }
  return n;
}

/// Length-lexicographic order on texts, ranking symbols by `rank` (typically
/// the position of the symbol in a declared alphabet).
template <class Rank>
bool length_lex_less(const Text& a, const Text& b, Rank&& rank) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto ra = rank(a[i]);
    auto rb = rank(b[i]);
    if (ra != rb) return ra < rb;
  }
  return false;
}

}  // namespace sst
