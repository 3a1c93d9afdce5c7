#pragma once

#include <atomic>
#include <cstddef>
#include <future>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sst/assignment.hpp"
#include "sst/error.hpp"
#include "sst/machine.hpp"
#include "sst/word.hpp"

namespace sst {

/// Enumeration limits. Exceeding any of them raises BudgetError; nothing is
/// ever silently truncated.
struct Budget {
  std::size_t max_words = 1'000'000;
  std::size_t max_symbols = 100'000'000;
  /// Cap on the total length of all variable contents of one configuration.
  /// Guards the exponential growth of copyful machines.
  std::size_t max_output = std::size_t{1} << 20;
};

struct Run {
  std::size_t var_count = 0;
  std::vector<StateId> states;
  std::vector<SymbolId> symbols;
  std::vector<Assignment> assigns;

  std::size_t length() const { return symbols.size(); }
};

/// V_ρ = α1 ∘ α2 ∘ … ∘ αn; identity for the empty run.
inline Assignment valuation(const Run& r) {
  Assignment v = Assignment::identity(r.var_count);
  for (const auto& a : r.assigns) v = sequential_compose(v, a);
  return v;
}

inline SymbolString input_symbols(const Sst& t, const Text& w) {
  SymbolString out;
  out.reserve(w.size());
  for (const auto& s : w) {
    auto id = t.find_input(s);
    if (!id) throw DomainError("symbol '" + s + "' is outside the input alphabet");
    out.push_back(*id);
  }
  return out;
}

inline Text spell(const std::vector<std::string>& alphabet, const SymbolString& w) {
  Text out;
  out.reserve(w.size());
  for (SymbolId s : w) out.push_back(alphabet.at(s));
  return out;
}

/// All runs from the initial state reading exactly `w`.
inline std::vector<Run> runs(const Sst& t, const SymbolString& w) {
  for (SymbolId s : w) {
    if (s >= t.input_alphabet().size()) throw DomainError("symbol outside the input alphabet");
  }
  std::vector<Run> done;
  Run cur;
  cur.var_count = t.var_count();
  cur.states.push_back(t.initial());
  auto extend = [&](auto&& self) -> void {
    if (cur.length() == w.size()) {
      done.push_back(cur);
      return;
    }
    SymbolId s = w[cur.length()];
    for (const auto& tr : t.transitions_from(cur.states.back(), s)) {
      cur.states.push_back(tr.dst);
      cur.symbols.push_back(s);
      cur.assigns.push_back(tr.assign);
      self(self);
      cur.states.pop_back();
      cur.symbols.pop_back();
      cur.assigns.pop_back();
    }
  };
  extend(extend);
  return done;
}

inline std::vector<Run> runs(const Sst& t, const Text& w) { return runs(t, input_symbols(t, w)); }

/// A state together with the current contents of every variable.
struct Configuration {
  StateId state = 0;
  std::vector<SymbolString> env;

  auto operator<=>(const Configuration&) const = default;
};

using ConfigurationSet = std::set<Configuration>;

/// Forward evaluation: steps sets of configurations left to right, starting
/// with every variable empty.
class Evaluator {
 public:
  explicit Evaluator(const Sst& t, std::size_t output_cap = Budget{}.max_output) : t_(t), cap_(output_cap) {}

  ConfigurationSet start() const { return {Configuration{t_.initial(), std::vector<SymbolString>(t_.var_count())}}; }

  ConfigurationSet step(const ConfigurationSet& from, SymbolId s) const {
    ConfigurationSet next;
    for (const auto& c : from) {
      for (const auto& tr : t_.transitions_from(c.state, s)) next.insert(apply(c, tr));
    }
    return next;
  }

  std::set<SymbolString> outputs(const ConfigurationSet& configs) const {
    std::set<SymbolString> out;
    for (const auto& c : configs) {
      for (const auto& w : t_.outputs(c.state)) out.insert(expand(c.env, w));
    }
    return out;
  }

  static std::size_t size_of(const Configuration& c) {
    std::size_t n = 0;
    for (const auto& v : c.env) n += v.size();
    return n;
  }

 private:
  SymbolString expand(const std::vector<SymbolString>& env, const Word& w) const {
    SymbolString out;
    for (Item it : w) {
      if (it.is_variable()) {
        const auto& v = env[it.id()];
        out.insert(out.end(), v.begin(), v.end());
      } else {
        out.push_back(it.id());
      }
      if (out.size() > cap_) throw BudgetError("output length cap exceeded", out.size());
    }
    return out;
  }

  Configuration apply(const Configuration& c, const Transition& tr) const {
    Configuration n{tr.dst, std::vector<SymbolString>(c.env.size())};
    std::size_t total = 0;
    for (VarId y = 0; y < n.env.size(); ++y) {
      n.env[y] = expand(c.env, tr.assign[y]);
      total += n.env[y].size();
      if (total > cap_) throw BudgetError("variable contents exceed the output length cap", total);
    }
    return n;
  }

  const Sst& t_;
  std::size_t cap_;
};

inline std::set<SymbolString> evaluate(const Sst& t, const SymbolString& w, const Budget& budget = {}) {
  Evaluator ev(t, budget.max_output);
  ConfigurationSet cs = ev.start();
  for (SymbolId s : w) {
    if (s >= t.input_alphabet().size()) throw DomainError("symbol outside the input alphabet");
    cs = ev.step(cs, s);
  }
  return ev.outputs(cs);
}

inline std::set<Text> evaluate(const Sst& t, const Text& w, const Budget& budget = {}) {
  std::set<Text> out;
  for (const auto& o : evaluate(t, input_symbols(t, w), budget)) out.insert(spell(t.output_alphabet(), o));
  return out;
}

/// Er_X ∘ V_ρ ∘ F(q_n) over every accepting run. Slower than evaluate; kept as
/// an independent cross-check.
inline std::set<SymbolString> evaluate_by_valuation(const Sst& t, const SymbolString& w) {
  std::set<SymbolString> out;
  for (const auto& r : runs(t, w)) {
    const auto& finals = t.outputs(r.states.back());
    if (finals.empty()) continue;
    Assignment v = valuation(r);
    for (const auto& f : finals) {
      SymbolString s;
      for (Item it : erase_variables(apply_morphism(v, f))) s.push_back(it.id());
      out.insert(std::move(s));
    }
  }
  return out;
}

/// Finite restriction of ⟦T⟧ to inputs of length at most max_len.
struct BoundedRelation {
  std::size_t max_len = 0;
  std::set<std::pair<Text, Text>> pairs;

  friend bool operator==(const BoundedRelation&, const BoundedRelation&) = default;

  std::set<Text> outputs_of(const Text& input) const {
    std::set<Text> out;
    for (auto it = pairs.lower_bound({input, Text{}}); it != pairs.end() && it->first == input; ++it) out.insert(it->second);
    return out;
  }
};

namespace detail {

struct RelationWalk {
  const Sst& t;
  const Evaluator& ev;
  std::size_t max_len;
  const Budget& budget;
  std::atomic<std::size_t>& words;
  std::atomic<std::size_t>& symbols;
  std::set<std::pair<Text, Text>> pairs;
  SymbolString prefix;

  void visit(const ConfigurationSet& cs) {
    if (words.fetch_add(1) + 1 > budget.max_words) throw BudgetError("word budget exceeded", words.load());
    std::size_t produced = 0;
    for (const auto& c : cs) produced += Evaluator::size_of(c);
    if (symbols.fetch_add(produced) + produced > budget.max_symbols) {
      throw BudgetError("symbol budget exceeded", words.load());
    }
    Text in = spell(t.input_alphabet(), prefix);
    for (const auto& o : ev.outputs(cs)) pairs.emplace(in, spell(t.output_alphabet(), o));
    if (prefix.size() == max_len) return;
    for (SymbolId s = 0; s < t.input_alphabet().size(); ++s) descend(cs, s);
  }

  void descend(const ConfigurationSet& cs, SymbolId s) {
    ConfigurationSet next = ev.step(cs, s);
    // Words without a run contribute nothing, and neither do their extensions.
    if (next.empty()) return;
    prefix.push_back(s);
    visit(next);
    prefix.pop_back();
  }
};

}  // namespace detail

/// { (w, u) : |w| ≤ max_len, u ∈ evaluate(t, w) }. With jobs > 1 the subtrees
/// below each first symbol are explored concurrently.
inline BoundedRelation relation(const Sst& t, std::size_t max_len, const Budget& budget = {}, unsigned jobs = 1) {
  Evaluator ev(t, budget.max_output);
  std::atomic<std::size_t> words{0}, symbols{0};
  BoundedRelation rel{max_len, {}};
  detail::RelationWalk root{t, ev, max_len, budget, words, symbols, {}, {}};
  if (jobs <= 1 || max_len == 0) {
    root.visit(ev.start());
    rel.pairs = std::move(root.pairs);
    return rel;
  }
  ConfigurationSet start = ev.start();
  // Root word (ε) handled here; subtrees fan out.
  if (words.fetch_add(1) + 1 > budget.max_words) throw BudgetError("word budget exceeded", 1);
  for (const auto& o : ev.outputs(start)) rel.pairs.emplace(Text{}, spell(t.output_alphabet(), o));
  std::vector<std::future<std::set<std::pair<Text, Text>>>> parts;
  for (SymbolId s = 0; s < t.input_alphabet().size(); ++s) {
    parts.push_back(std::async(std::launch::async, [&, s] {
      detail::RelationWalk walk{t, ev, max_len, budget, words, symbols, {}, {}};
      walk.descend(start, s);
      return std::move(walk.pairs);
    }));
  }
  for (auto& p : parts) rel.pairs.merge(p.get());
  return rel;
}

}  // namespace sst
