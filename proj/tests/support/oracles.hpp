#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "sst/machine.hpp"
#include "sst/semantics.hpp"

// Reference implementations written directly from the definitions, sharing no
// code with the library beyond the machine representation.
namespace oracle {

using sst::Text;

/// Output sets by explicit run enumeration with string-valued variables.
inline std::set<Text> outputs(const sst::Sst& t, const Text& w) {
  std::vector<std::size_t> sym;
  for (const auto& s : w) {
    std::size_t i = 0;
    while (i < t.input_alphabet().size() && t.input_alphabet()[i] != s) ++i;
    if (i == t.input_alphabet().size()) return {};
    sym.push_back(i);
  }
  std::set<Text> out;
  auto expand = [&](const std::vector<Text>& env, const sst::Word& word) {
    Text r;
    for (auto it : word) {
      if (it.is_variable()) {
        r.insert(r.end(), env[it.id()].begin(), env[it.id()].end());
      } else {
        r.push_back(t.output_alphabet()[it.id()]);
      }
    }
    return r;
  };
  auto go = [&](auto&& self, sst::StateId q, std::size_t pos, const std::vector<Text>& env) -> void {
    if (pos == sym.size()) {
      for (const auto& f : t.outputs(q)) out.insert(expand(env, f));
      return;
    }
    for (const auto& tr : t.transitions()) {
      if (tr.src != q || tr.symbol != sym[pos]) continue;
      std::vector<Text> next(env.size());
      for (std::size_t y = 0; y < env.size(); ++y) next[y] = expand(env, tr.assign[static_cast<sst::VarId>(y)]);
      self(self, tr.dst, pos + 1, next);
    }
  };
  go(go, t.initial(), 0, std::vector<Text>(t.var_count()));
  return out;
}

/// Every word over `alphabet` of length at most max_len, length-lex ordered.
inline std::vector<Text> words(const std::vector<std::string>& alphabet, std::size_t max_len) {
  std::vector<Text> all{{}};
  std::size_t begin = 0;
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::size_t end = all.size();
    for (std::size_t i = begin; i < end; ++i) {
      for (const auto& s : alphabet) {
        Text w = all[i];
        w.push_back(s);
        all.push_back(std::move(w));
      }
    }
    begin = end;
  }
  return all;
}

inline std::set<std::pair<Text, Text>> relation(const sst::Sst& t, std::size_t max_len) {
  std::set<std::pair<Text, Text>> out;
  for (const auto& w : oracle::words(t.input_alphabet(), max_len)) {
    for (const auto& u : oracle::outputs(t, w)) out.emplace(w, u);
  }
  return out;
}

/// Relation of the sequential composition, evaluating the second machine on
/// every intermediate word.
inline std::set<std::pair<Text, Text>> composed_relation(const sst::Sst& t12, const sst::Sst& t23, std::size_t max_len) {
  std::set<std::pair<Text, Text>> out;
  for (const auto& [w, v] : oracle::relation(t12, max_len)) {
    for (const auto& u : oracle::outputs(t23, v)) out.emplace(w, u);
  }
  return out;
}

/// Number of words over n letters with no repeated letter, by enumeration.
inline std::size_t count_repetition_free(unsigned n) {
  std::vector<bool> used(n, false);
  auto go = [&](auto&& self) -> std::size_t {
    std::size_t total = 1;  // stop here
    for (unsigned i = 0; i < n; ++i) {
      if (used[i]) continue;
      used[i] = true;
      total += self(self);
      used[i] = false;
    }
    return total;
  };
  return go(go);
}

/// ⌊e · n!⌋ from the series e = Σ 1/k!: the partial sums through k = N bound
/// e·n! from below and the geometric tail bound 1/(N!·N) from above. N grows
/// until both bounds have the same floor.
inline boost::multiprecision::cpp_int floor_e_factorial(unsigned n) {
  using boost::multiprecision::cpp_int;
  using boost::multiprecision::cpp_rational;
  cpp_int fact = 1;
  for (unsigned i = 2; i <= n; ++i) fact *= i;
  cpp_rational lower = 0;
  cpp_int k_fact = 1;
  for (unsigned k = 0;; ++k) {
    if (k > 0) k_fact *= k;
    lower += cpp_rational(fact, k_fact);
    if (k == 0) continue;
    cpp_rational upper = lower + cpp_rational(fact, k_fact * k);
    cpp_int lo = numerator(lower) / denominator(lower);
    cpp_int hi = numerator(upper) / denominator(upper);
    // The upper bound is strict, so an integer upper bound still floors down.
    if (upper == cpp_rational(hi)) hi -= 1;
    if (lo == hi) return lo;
  }
}

}  // namespace oracle
