#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sst/error.hpp"
#include "sst/flow.hpp"
#include "sst/machine.hpp"
#include "sst/semantics.hpp"

namespace sst {

inline std::string render_text(const Text& w) {
  if (w.empty()) return "-";
  bool short_symbols = std::all_of(w.begin(), w.end(), [](const std::string& s) { return s.size() == 1; });
  std::string out;
  for (const auto& s : w) {
    if (!short_symbols && !out.empty()) out += ' ';
    out += s;
  }
  return out;
}

/// { (w, u) : (w, v) ∈ r12, (v, u) ∈ r23 }. Every intermediate word v must be
/// no longer than r23's bound.
inline BoundedRelation relation_compose(const BoundedRelation& r12, const BoundedRelation& r23) {
  BoundedRelation out{r12.max_len, {}};
  for (const auto& [w, v] : r12.pairs) {
    if (v.size() > r23.max_len) {
      throw CoverageError("intermediate word '" + render_text(v) + "' is longer than the second relation's bound " +
                          std::to_string(r23.max_len));
    }
    for (const auto& u : r23.outputs_of(v)) out.pairs.emplace(w, u);
  }
  return out;
}

/// Same, evaluating t23 directly on each intermediate word.
inline BoundedRelation relation_compose(const BoundedRelation& r12, const Sst& t23, const Budget& budget = {}) {
  BoundedRelation out{r12.max_len, {}};
  std::map<Text, std::set<Text>> cache;
  for (const auto& [w, v] : r12.pairs) {
    auto it = cache.find(v);
    if (it == cache.end()) {
      std::set<Text> outs;
      bool in_domain = std::all_of(v.begin(), v.end(), [&](const std::string& s) { return t23.find_input(s).has_value(); });
      if (in_domain) outs = evaluate(t23, v, budget);
      it = cache.emplace(v, std::move(outs)).first;
    }
    for (const auto& u : it->second) out.pairs.emplace(w, u);
  }
  return out;
}

struct EquivalenceWitness {
  Text input;
  std::set<Text> left;
  std::set<Text> right;
};

struct EquivalenceVerdict {
  bool equal = true;
  std::optional<EquivalenceWitness> witness;
};

/// Compares the output sets of `a` and `b` on every input of length at most
/// `max_len`, in length-lexicographic order over a's input alphabet. The first
/// disagreement is returned as the witness.
inline EquivalenceVerdict equiv_bounded(const Sst& a, const Sst& b, std::size_t max_len, const Budget& budget = {}) {
  const auto& sigma = a.input_alphabet();
  if (std::set<std::string>(sigma.begin(), sigma.end()) !=
      std::set<std::string>(b.input_alphabet().begin(), b.input_alphabet().end())) {
    throw ConfigError("machines have different input alphabets");
  }
  std::vector<SymbolId> b_of(sigma.size());
  for (SymbolId s = 0; s < sigma.size(); ++s) b_of[s] = *b.find_input(sigma[s]);

  Evaluator ea(a, budget.max_output), eb(b, budget.max_output);
  struct Node {
    SymbolString word;
    ConfigurationSet left, right;
  };
  std::vector<Node> level{{{}, ea.start(), eb.start()}};
  std::size_t words = 0;
  for (std::size_t len = 0;; ++len) {
    for (const auto& n : level) {
      if (++words > budget.max_words) throw BudgetError("word budget exceeded", words);
      auto lo = ea.outputs(n.left);
      auto ro = eb.outputs(n.right);
      std::set<Text> left, right;
      for (const auto& o : lo) left.insert(spell(a.output_alphabet(), o));
      for (const auto& o : ro) right.insert(spell(b.output_alphabet(), o));
      if (left != right) {
        return {false, EquivalenceWitness{spell(sigma, n.word), std::move(left), std::move(right)}};
      }
    }
    if (len == max_len) break;
    std::vector<Node> next;
    for (const auto& n : level) {
      for (SymbolId s = 0; s < sigma.size(); ++s) {
        Node c{n.word, ea.step(n.left, s), eb.step(n.right, b_of[s])};
        // Neither machine has a run: every extension agrees trivially.
        if (c.left.empty() && c.right.empty()) continue;
        c.word.push_back(s);
        next.push_back(std::move(c));
      }
    }
    if (next.empty()) break;
    level = std::move(next);
  }
  return {};
}

/// At most one output for every input of length at most `max_len`.
inline bool is_functional_bounded(const Sst& t, std::size_t max_len, const Budget& budget = {}, unsigned jobs = 1) {
  auto rel = relation(t, max_len, budget, jobs);
  const Text* prev = nullptr;
  for (const auto& [w, u] : rel.pairs) {
    if (prev && *prev == w) return false;
    prev = &w;
  }
  return true;
}

/// Largest right-hand-side total or output-word length of `t`.
inline std::size_t growth_constant(const Sst& t) {
  std::size_t c = 0;
  for (const auto& tr : t.transitions()) c = std::max(c, tr.assign.total_length());
  for (StateId q = 0; q < t.state_count(); ++q) {
    for (const auto& w : t.outputs(q)) c = std::max(c, w.size());
  }
  return c;
}

/// Every output for an input of length n has length at most C·(n+1), with C
/// the growth constant. Only meaningful for copyless machines.
inline bool growth_check(const Sst& t, std::size_t max_len, const Budget& budget = {}, unsigned jobs = 1) {
  if (auto i = first_copyful_transition(t)) {
    throw ConfigError("growth check needs a copyless machine; transition #" + std::to_string(*i) + " copies");
  }
  const std::size_t c = growth_constant(t);
  for (const auto& [w, u] : relation(t, max_len, budget, jobs).pairs) {
    if (u.size() > c * (w.size() + 1)) return false;
  }
  return true;
}

}  // namespace sst
