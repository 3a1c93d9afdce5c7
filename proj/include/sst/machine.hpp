#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "sst/assignment.hpp"
#include "sst/error.hpp"
#include "sst/word.hpp"

namespace sst {

struct Transition {
  StateId src = 0;
  SymbolId symbol = 0;
  Assignment assign;
  StateId dst = 0;

  friend bool operator==(const Transition&, const Transition&) = default;
  friend auto operator<=>(const Transition& a, const Transition& b) {
    return std::tie(a.src, a.symbol, a.dst, a.assign) <=> std::tie(b.src, b.symbol, b.dst, b.assign);
  }
};

struct OutputRule {
  StateId state = 0;
  std::vector<Word> words;
};

/// Names of states, symbols and variables are printable tokens: non-empty, no
/// whitespace, and none of the characters reserved by the `.sst` text format.
inline bool is_valid_name(std::string_view name) {
  if (name.empty()) return false;
  for (unsigned char c : name) {
    if (c >= 0x80) continue;
    if (!std::isgraph(c)) return false;
    switch (c) {
      case ';': case ':': case '{': case '}': case '=': case '#': case '\'': case '"': case '-':
        return false;
      default:
        break;
    }
  }
  return true;
}

/// A streaming string transducer. Immutable once constructed; the constructor
/// validates every cross-reference and sorts transitions and output words so
/// that structurally equal machines compare equal.
class Sst {
 public:
  Sst(std::vector<std::string> input_alphabet, std::vector<std::string> output_alphabet,
      std::vector<std::string> states, StateId initial, std::vector<std::string> vars,
      std::vector<Transition> transitions, std::vector<OutputRule> outputs)
      : input_(std::move(input_alphabet)),
        output_(std::move(output_alphabet)),
        states_(std::move(states)),
        initial_(initial),
        vars_(std::move(vars)),
        transitions_(std::move(transitions)),
        outputs_(states_.size()) {
    check_names(input_, "input symbol");
    check_names(output_, "output symbol");
    check_names(states_, "state");
    check_names(vars_, "variable");
    if (states_.empty()) throw ConfigError("a machine needs at least one state");
    if (initial_ >= states_.size()) throw ConfigError("initial state is not declared");
    for (const auto& v : vars_) {
      if (std::find(input_.begin(), input_.end(), v) != input_.end() ||
          std::find(output_.begin(), output_.end(), v) != output_.end()) {
        throw ConfigError("variable '" + v + "' clashes with an alphabet symbol");
      }
    }
    for (const auto& t : transitions_) {
      if (t.src >= states_.size() || t.dst >= states_.size()) throw ConfigError("transition refers to an undeclared state");
      if (t.symbol >= input_.size()) throw ConfigError("transition reads a symbol outside the input alphabet");
      if (t.assign.var_count() != vars_.size()) {
        throw ConfigError("transition assignment covers " + std::to_string(t.assign.var_count()) + " variables, expected " +
                          std::to_string(vars_.size()));
      }
      for (const auto& w : t.assign.words()) check_word(w);
    }
    std::sort(transitions_.begin(), transitions_.end());
    transitions_.erase(std::unique(transitions_.begin(), transitions_.end()), transitions_.end());

    for (auto& rule : outputs) {
      if (rule.state >= states_.size()) throw ConfigError("output rule refers to an undeclared state");
      for (auto& w : rule.words) {
        check_word(w);
        outputs_[rule.state].push_back(std::move(w));
      }
    }
    for (auto& ws : outputs_) {
      std::sort(ws.begin(), ws.end());
      ws.erase(std::unique(ws.begin(), ws.end()), ws.end());
    }

    index_.assign(states_.size() * input_.size() + 1, 0);
    for (const auto& t : transitions_) ++index_[t.src * input_.size() + t.symbol + 1];
    for (std::size_t i = 1; i < index_.size(); ++i) index_[i] += index_[i - 1];
  }

  const std::vector<std::string>& input_alphabet() const { return input_; }
  const std::vector<std::string>& output_alphabet() const { return output_; }
  const std::vector<std::string>& states() const { return states_; }
  const std::vector<std::string>& vars() const { return vars_; }
  StateId initial() const { return initial_; }
  std::size_t state_count() const { return states_.size(); }
  std::size_t var_count() const { return vars_.size(); }

  const std::vector<Transition>& transitions() const { return transitions_; }

  std::span<const Transition> transitions_from(StateId q, SymbolId s) const {
    std::size_t slot = q * input_.size() + s;
    return std::span<const Transition>(transitions_).subspan(index_[slot], index_[slot + 1] - index_[slot]);
  }

  /// Output words at `q`; empty when `q` is not accepting.
  const std::vector<Word>& outputs(StateId q) const { return outputs_.at(q); }
  bool is_accepting(StateId q) const { return !outputs_.at(q).empty(); }

  std::optional<StateId> find_state(std::string_view name) const { return find(states_, name); }
  std::optional<VarId> find_var(std::string_view name) const { return find(vars_, name); }
  std::optional<SymbolId> find_input(std::string_view name) const { return find(input_, name); }
  std::optional<SymbolId> find_output(std::string_view name) const { return find(output_, name); }

  friend bool operator==(const Sst& a, const Sst& b) {
    return a.input_ == b.input_ && a.output_ == b.output_ && a.states_ == b.states_ && a.initial_ == b.initial_ &&
           a.vars_ == b.vars_ && a.transitions_ == b.transitions_ && a.outputs_ == b.outputs_;
  }

 private:
  static std::optional<std::uint32_t> find(const std::vector<std::string>& names, std::string_view name) {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) return std::nullopt;
    return static_cast<std::uint32_t>(it - names.begin());
  }

  static void check_names(const std::vector<std::string>& names, const char* what) {
    std::vector<std::string_view> seen(names.begin(), names.end());
    std::sort(seen.begin(), seen.end());
    for (std::size_t i = 0; i < seen.size(); ++i) {
      if (!is_valid_name(seen[i])) throw ConfigError(std::string("invalid ") + what + " name '" + std::string(seen[i]) + "'");
      if (i > 0 && seen[i] == seen[i - 1]) throw ConfigError(std::string("duplicate ") + what + " '" + std::string(seen[i]) + "'");
    }
  }

  void check_word(const Word& w) const {
    for (Item it : w) {
      if (it.is_variable() ? it.id() >= vars_.size() : it.id() >= output_.size()) {
        throw ConfigError(it.is_variable() ? "word uses an undeclared variable" : "word uses a symbol outside the output alphabet");
      }
    }
  }

  std::vector<std::string> input_;
  std::vector<std::string> output_;
  std::vector<std::string> states_;
  StateId initial_;
  std::vector<std::string> vars_;
  std::vector<Transition> transitions_;
  std::vector<std::vector<Word>> outputs_;
  std::vector<std::size_t> index_;
};

/// At most one transition per (state, symbol) and at most one output word per
/// state. Missing transitions are allowed; see is_total.
inline bool is_deterministic(const Sst& t) {
  for (StateId q = 0; q < t.state_count(); ++q) {
    if (t.outputs(q).size() > 1) return false;
    for (SymbolId s = 0; s < t.input_alphabet().size(); ++s) {
      if (t.transitions_from(q, s).size() > 1) return false;
    }
  }
  return true;
}

/// (state, symbol) pairs with no outgoing transition.
inline std::vector<std::pair<StateId, SymbolId>> missing_transitions(const Sst& t) {
  std::vector<std::pair<StateId, SymbolId>> out;
  for (StateId q = 0; q < t.state_count(); ++q) {
    for (SymbolId s = 0; s < t.input_alphabet().size(); ++s) {
      if (t.transitions_from(q, s).empty()) out.emplace_back(q, s);
    }
  }
  return out;
}

inline bool is_total(const Sst& t) { return missing_transitions(t).empty(); }

/// Human-readable rendering of a word: variables bare, symbols quoted.
inline std::string render_word(const Sst& t, const Word& w) {
  std::string out;
  for (Item it : w) {
    if (!out.empty()) out += ' ';
    if (it.is_variable()) {
      out += t.vars().at(it.id());
    } else {
      out += '\'' + t.output_alphabet().at(it.id()) + '\'';
    }
  }
  return out;
}

/// Builds machines from names. Right-hand sides are space-separated tokens; a
/// token naming a declared variable is a variable, anything else must be an
/// output symbol. Variables without an explicit right-hand side keep their
/// value (x = x).
class SstBuilder {
 public:
  SstBuilder& input(std::vector<std::string> syms) { input_ = std::move(syms); return *this; }
  SstBuilder& output(std::vector<std::string> syms) { output_ = std::move(syms); return *this; }
  SstBuilder& states(std::vector<std::string> names) { states_ = std::move(names); return *this; }
  SstBuilder& initial(std::string name) { initial_ = std::move(name); return *this; }
  SstBuilder& vars(std::vector<std::string> names) { vars_ = std::move(names); return *this; }

  SstBuilder& trans(std::string src, std::string symbol, std::string dst,
                    std::vector<std::pair<std::string, std::string>> rhs = {}) {
    trans_.push_back({std::move(src), std::move(symbol), std::move(dst), std::move(rhs)});
    return *this;
  }

  SstBuilder& out(std::string state, std::string word) {
    outs_.emplace_back(std::move(state), std::move(word));
    return *this;
  }

  Sst build() const {
    auto index_of = [](const std::vector<std::string>& names, const std::string& n, const char* what) {
      auto it = std::find(names.begin(), names.end(), n);
      if (it == names.end()) throw ConfigError(std::string("unknown ") + what + " '" + n + "'");
      return static_cast<std::uint32_t>(it - names.begin());
    };
    auto parse_word = [&](const std::string& text) {
      Word w;
      std::istringstream in(text);
      std::string tok;
      while (in >> tok) {
        auto v = std::find(vars_.begin(), vars_.end(), tok);
        if (v != vars_.end()) {
          w.push_back(Item::variable(static_cast<VarId>(v - vars_.begin())));
        } else {
          w.push_back(Item::symbol(index_of(output_, tok, "output symbol")));
        }
      }
      return w;
    };
    std::vector<Transition> ts;
    for (const auto& spec : trans_) {
      Assignment a = Assignment::identity(vars_.size());
      for (const auto& [var, rhs] : spec.rhs) a[index_of(vars_, var, "variable")] = parse_word(rhs);
      ts.push_back({index_of(states_, spec.src, "state"), index_of(input_, spec.symbol, "input symbol"), std::move(a),
                    index_of(states_, spec.dst, "state")});
    }
    std::vector<OutputRule> outs;
    for (const auto& [state, word] : outs_) outs.push_back({index_of(states_, state, "state"), {parse_word(word)}});
    std::string init = initial_.empty() && !states_.empty() ? states_.front() : initial_;
    return Sst(input_, output_, states_, index_of(states_, init, "state"), vars_, std::move(ts), std::move(outs));
  }

 private:
  struct TransSpec {
    std::string src, symbol, dst;
    std::vector<std::pair<std::string, std::string>> rhs;
  };
  std::vector<std::string> input_, output_, states_, vars_;
  std::string initial_;
  std::vector<TransSpec> trans_;
  std::vector<std::pair<std::string, std::string>> outs_;
};

}  // namespace sst
