#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sst/assignment.hpp"
#include "sst/composition.hpp"
#include "sst/error.hpp"
#include "sst/flow.hpp"
#include "sst/machine.hpp"
#include "sst/word.hpp"

namespace sst {

/// Copyless assignments covering one diamond-free assignment.
using DecompositionSet = std::set<Assignment>;

/// Variables whose contents were discarded and may not be read until
/// reassigned. Sorted.
using DeadSet = std::vector<VarId>;

/// Which copied variable the decomposition splits first.
enum class DecomposeOrder { least, greatest };

namespace detail {

/// Source variables read by more than one right-hand side.
inline std::vector<VarId> copied_variables(const Assignment& a) {
  std::vector<std::size_t> uses(a.var_count(), 0);
  for (const auto& w : a.words()) {
    for (Item it : w) {
      if (it.is_variable()) ++uses[it.id()];
    }
  }
  std::vector<VarId> out;
  for (VarId x = 0; x < uses.size(); ++x) {
    if (uses[x] > 1) out.push_back(x);
  }
  return out;
}

inline void decompose_into(const Assignment& a, DecomposeOrder order, DecompositionSet& out, std::size_t& steps) {
  if (steps == 0) throw BudgetError("decomposition step budget exceeded", out.size());
  --steps;
  auto copied = copied_variables(a);
  if (copied.empty()) {
    out.insert(a);
    return;
  }
  const VarId x = order == DecomposeOrder::least ? copied.front() : copied.back();
  std::vector<VarId> targets;
  for (VarId y = 0; y < a.var_count(); ++y) {
    if (contains_variable(a[y], x)) targets.push_back(y);
  }
  for (VarId y : targets) {
    for (VarId z : targets) {
      if (z == y) continue;
      Assignment b = a;
      b[z].clear();
      decompose_into(b, order, out, steps);
    }
  }
}

}  // namespace detail

/// Splits a copyful assignment into copyless ones: each copied variable is
/// kept in one of its targets and every other target is reset to ε.
inline DecompositionSet decompose(const Assignment& a, DecomposeOrder order = DecomposeOrder::least,
                                  std::size_t max_steps = 1'000'000) {
  for (VarId y = 0; y < a.var_count(); ++y) {
    for (Item it : a[y]) {
      if (it.is_variable() && count_variable(a[y], it.id()) > 1) {
        throw ConfigError("cannot decompose: variable #" + std::to_string(it.id()) +
                          " occurs twice in one right-hand side");
      }
    }
  }
  DecompositionSet out;
  detail::decompose_into(a, order, out, max_steps);
  return out;
}

/// Same, naming the offending variable through `t` on error.
inline DecompositionSet decompose(const Sst& t, const Assignment& a, DecomposeOrder order = DecomposeOrder::least,
                                  std::size_t max_steps = 1'000'000) {
  for (VarId y = 0; y < a.var_count(); ++y) {
    for (Item it : a[y]) {
      if (it.is_variable() && count_variable(a[y], it.id()) > 1) {
        throw ConfigError("cannot decompose: variable '" + t.vars().at(it.id()) + "' occurs twice in the right-hand side of '" +
                          t.vars().at(y) + "'");
      }
    }
  }
  return decompose(a, order, max_steps);
}

/// How the conversion treats a decomposition member that reads a dead
/// variable.
enum class DeadReadPolicy {
  /// No transition is emitted.
  forbid,
  /// The member is kept; each right-hand side that reads a dead variable is
  /// reset to ε and its target becomes dead as well.
  propagate,
};

struct CopylessOptions {
  DeadReadPolicy dead_reads = DeadReadPolicy::forbid;
  std::size_t max_states = 1'000'000;
  std::size_t max_transitions = 1'000'000;
  /// Recursive splitting steps allowed per decomposed assignment.
  std::size_t max_decomposition_steps = 1'000'000;
};

/// `t`'s transitions rendered as a readable run, e.g. "q0 -a-> q1 -b-> q1".
inline std::string describe_run(const Sst& t, const std::vector<std::size_t>& transition_indices) {
  std::string out = t.states().at(t.initial());
  for (std::size_t i : transition_indices) {
    const Transition& tr = t.transitions().at(i);
    out += " -" + t.input_alphabet().at(tr.symbol) + "-> " + t.states().at(tr.dst);
  }
  return out;
}

inline std::string dead_state_name(const Sst& t, StateId q, const DeadSet& dead) {
  std::string out = t.states().at(q) + "[";
  for (std::size_t i = 0; i < dead.size(); ++i) {
    if (i) out += ",";
    out += t.vars().at(dead[i]);
  }
  return out + "]";
}

struct CopylessResult {
  Sst machine;
  /// states[i] is the (source state, dead set) pair behind machine state i.
  std::vector<std::pair<StateId, DeadSet>> states;
};

/// Converts a machine with no diamond (in its runs or its output words) into
/// an equivalent copyless one over (state, dead set) pairs reachable from
/// (q0, ∅). Transitions carry decomposition members of the original
/// assignments; output words reading a dead variable are dropped.
inline CopylessResult to_copyless_detailed(const Sst& t, const CopylessOptions& opts = {}) {
  auto report = analyze_diamonds(t, DiamondScope::runs_and_outputs);
  if (!report.diamond_free) {
    throw ConfigError(std::string("machine is not diamond-free") +
                      (report.closes_at_output ? " (an output word joins two copies)" : "") +
                      "; witness run: " + describe_run(t, report.witness));
  }
  const std::size_t m = t.var_count();

  /// Decompositions of the transitions reached so far, computed on first use.
  std::vector<std::optional<std::vector<std::pair<Assignment, DeadSet>>>> moves(t.transitions().size());
  auto moves_of = [&](std::size_t i) -> const std::vector<std::pair<Assignment, DeadSet>>& {
    if (moves[i]) return *moves[i];
    moves[i].emplace();
    const Assignment& alpha = t.transitions()[i].assign;
    for (const auto& beta : decompose(t, alpha, DecomposeOrder::least, opts.max_decomposition_steps)) {
      DeadSet emptied;
      for (VarId y = 0; y < m; ++y) {
        for (Item it : alpha[y]) {
          if (it.is_variable() && !contains_variable(beta[y], it.id())) {
            emptied.push_back(y);
            break;
          }
        }
      }
      moves[i]->emplace_back(beta, std::move(emptied));
    }
    return *moves[i];
  };

  std::map<std::pair<StateId, DeadSet>, StateId> ids;
  std::vector<std::pair<StateId, DeadSet>> states;
  auto intern = [&](StateId q, DeadSet dead) {
    auto [it, fresh] = ids.emplace(std::make_pair(q, dead), static_cast<StateId>(states.size()));
    if (fresh) {
      if (states.size() >= opts.max_states) throw BudgetError("copyless conversion state budget exceeded", states.size());
      states.emplace_back(q, std::move(dead));
    }
    return it->second;
  };

  std::vector<Transition> transitions;
  std::vector<OutputRule> outputs;
  intern(t.initial(), {});
  std::vector<bool> is_dead(m);
  for (StateId r = 0; r < states.size(); ++r) {
    const auto [q, dead] = states[r];
    std::fill(is_dead.begin(), is_dead.end(), false);
    for (VarId v : dead) is_dead[v] = true;
    auto reads_dead = [&](const Word& w) {
      return std::any_of(w.begin(), w.end(), [&](Item it) { return it.is_variable() && is_dead[it.id()]; });
    };

    for (std::size_t i = 0; i < t.transitions().size(); ++i) {
      const Transition& tr = t.transitions()[i];
      if (tr.src != q) continue;
      for (const auto& [beta, emptied] : moves_of(i)) {
        Assignment b = beta;
        DeadSet next = emptied;
        bool blocked = false;
        for (VarId y = 0; y < m && !blocked; ++y) {
          if (!reads_dead(b[y])) continue;
          if (opts.dead_reads == DeadReadPolicy::forbid) {
            blocked = true;
          } else {
            b[y].clear();
            next.push_back(y);
          }
        }
        if (blocked) continue;
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        StateId dst = intern(tr.dst, std::move(next));
        if (transitions.size() >= opts.max_transitions) {
          throw BudgetError("copyless conversion transition budget exceeded", transitions.size());
        }
        transitions.push_back({r, tr.symbol, std::move(b), dst});
      }
    }
    std::vector<Word> words;
    for (const auto& w : t.outputs(q)) {
      if (!reads_dead(w)) words.push_back(w);
    }
    if (!words.empty()) outputs.push_back({r, std::move(words)});
  }

  std::vector<std::string> names;
  for (const auto& [q, dead] : states) names.push_back(dead_state_name(t, q, dead));
  Sst machine(t.input_alphabet(), t.output_alphabet(), std::move(names), 0, t.vars(), std::move(transitions),
              std::move(outputs));
  return {std::move(machine), std::move(states)};
}

inline Sst to_copyless(const Sst& t, const CopylessOptions& opts = {}) { return to_copyless_detailed(t, opts).machine; }

/// Composes two copyless machines and removes the copies of the result. Uses
/// the deterministic construction when both inputs are deterministic.
inline Sst compose_and_eliminate(const Sst& t12, const Sst& t23, const CompositionOptions& compose_opts = {},
                                 CopylessOptions copyless_opts = {DeadReadPolicy::propagate}) {
  Sst composite = is_deterministic(t12) && is_deterministic(t23) ? compose_dsst(t12, t23, compose_opts)
                                                                  : compose_nsst(t12, t23, compose_opts);
  return to_copyless(composite, copyless_opts);
}

}  // namespace sst
