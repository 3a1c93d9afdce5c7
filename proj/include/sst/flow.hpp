#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "sst/assignment.hpp"
#include "sst/error.hpp"
#include "sst/machine.hpp"
#include "sst/semantics.hpp"
#include "sst/word.hpp"

namespace sst {

using BigInt = boost::multiprecision::cpp_int;

// ---------------------------------------------------------------------------
// Copylessness

/// True iff no variable below `var_count` occurs twice in `w`.
inline bool is_copyless_word(const Word& w, std::size_t var_count) {
  std::vector<bool> seen(var_count, false);
  for (Item it : w) {
    if (!it.is_variable() || it.id() >= var_count) continue;
    if (seen[it.id()]) return false;
    seen[it.id()] = true;
  }
  return true;
}

/// The concatenation α(x1)⋯α(xn) is copyless in X.
inline bool is_copyless_assignment(const Assignment& a) {
  std::vector<bool> seen(a.var_count(), false);
  for (const auto& w : a.words()) {
    for (Item it : w) {
      if (!it.is_variable()) continue;
      if (seen[it.id()]) return false;
      seen[it.id()] = true;
    }
  }
  return true;
}

/// Index of the first transition (in canonical order) whose assignment copies.
inline std::optional<std::size_t> first_copyful_transition(const Sst& t) {
  for (std::size_t i = 0; i < t.transitions().size(); ++i) {
    if (!is_copyless_assignment(t.transitions()[i].assign)) return i;
  }
  return std::nullopt;
}

inline bool is_copyless_sst(const Sst& t) { return !first_copyful_transition(t).has_value(); }

// ---------------------------------------------------------------------------
// Flow graphs

/// Layered multigraph of a sequence of assignments: layer k holds a copy of
/// every variable, and x at layer k-1 has one edge to y at layer k per
/// occurrence of x in α_k(y).
class FlowGraph {
 public:
  struct Edge {
    std::size_t layer;  // source layer; the target sits at layer + 1
    VarId from;
    VarId to;
    std::uint32_t multiplicity;
  };

  FlowGraph(std::size_t var_count, std::size_t steps)
      : vars_(var_count), mult_(steps, std::vector<std::uint32_t>(var_count * var_count, 0)) {}

  std::size_t layer_count() const { return mult_.size() + 1; }
  std::size_t var_count() const { return vars_; }

  /// Edge multiplicity between x at layer `layer` and y at layer `layer + 1`.
  std::uint32_t multiplicity(std::size_t layer, VarId x, VarId y) const { return mult_.at(layer)[x * vars_ + y]; }
  void add_edge(std::size_t layer, VarId x, VarId y) { ++mult_.at(layer)[x * vars_ + y]; }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (std::size_t k = 0; k < mult_.size(); ++k) {
      for (VarId x = 0; x < vars_; ++x) {
        for (VarId y = 0; y < vars_; ++y) {
          if (auto m = multiplicity(k, x, y)) out.push_back({k, x, y, m});
        }
      }
    }
    return out;
  }

  /// Number of edges counted with multiplicity.
  std::size_t edge_count() const {
    std::size_t n = 0;
    for (const auto& layer : mult_) {
      for (auto m : layer) n += m;
    }
    return n;
  }

 private:
  std::size_t vars_;
  std::vector<std::vector<std::uint32_t>> mult_;
};

inline FlowGraph flow_graph(std::span<const Assignment> assigns, std::size_t var_count) {
  FlowGraph g(var_count, assigns.size());
  for (std::size_t k = 0; k < assigns.size(); ++k) {
    const Assignment& a = assigns[k];
    if (a.var_count() != var_count) throw DomainError("flow graph over assignments with different variable sets");
    for (VarId y = 0; y < var_count; ++y) {
      for (Item it : a[y]) {
        if (it.is_variable()) g.add_edge(k, it.id(), y);
      }
    }
  }
  return g;
}

inline FlowGraph flow_graph(std::span<const Assignment> assigns) {
  return flow_graph(assigns, assigns.empty() ? 0 : assigns.front().var_count());
}

/// True iff two distinct paths (parallel edges count as distinct) join some
/// pair of vertices. Path counts from each source vertex are propagated layer
/// by layer, saturating at 2.
inline bool has_diamond(const FlowGraph& g) {
  const std::size_t m = g.var_count();
  const std::size_t steps = g.layer_count() - 1;
  std::vector<std::uint32_t> count(m), next(m);
  for (std::size_t src_layer = 0; src_layer < steps; ++src_layer) {
    for (VarId src = 0; src < m; ++src) {
      std::fill(count.begin(), count.end(), 0);
      count[src] = 1;
      for (std::size_t k = src_layer; k < steps; ++k) {
        bool any = false;
        for (VarId y = 0; y < m; ++y) {
          std::uint32_t c = 0;
          for (VarId x = 0; x < m; ++x) c += count[x] * g.multiplicity(k, x, y);
          if (c >= 2) return true;
          next[y] = c;
          any = any || c > 0;
        }
        if (!any) break;
        count.swap(next);
      }
    }
  }
  return false;
}

/// No diamond in G(αα).
inline bool is_diamond_free_assignment(const Assignment& a) {
  const Assignment twice[] = {a, a};
  return !has_diamond(flow_graph(twice));
}

// ---------------------------------------------------------------------------
// Whole-machine diamond-freeness

/// Whether output words count as a final assignment into a virtual output
/// variable. The run-only notion ignores them; conversion to a copyless
/// machine needs the stronger one, since an output reading two copies of one
/// value cannot be reproduced after the copies are split apart.
enum class DiamondScope { runs, runs_and_outputs };

struct DiamondReport {
  bool diamond_free = true;
  /// Shortest witnessing run as indices into Sst::transitions().
  std::vector<std::size_t> witness;
  /// The diamond closes in an output word of the witness's last state rather
  /// than along the run itself.
  bool closes_at_output = false;
  std::size_t explored = 0;
};

inline Run run_of(const Sst& t, std::span<const std::size_t> transition_indices) {
  Run r;
  r.var_count = t.var_count();
  r.states.push_back(t.initial());
  for (std::size_t i : transition_indices) {
    const Transition& tr = t.transitions().at(i);
    if (tr.src != r.states.back()) throw DomainError("transition sequence is not a run");
    r.symbols.push_back(tr.symbol);
    r.assigns.push_back(tr.assign);
    r.states.push_back(tr.dst);
  }
  return r;
}

namespace detail {

/// Unordered pair {u, v}, u < v, encoded as u * m + v.
using PairSet = std::vector<std::uint32_t>;

class DivergenceStep {
 public:
  explicit DivergenceStep(const Assignment& a) : m_(a.var_count()), targets_(m_) {
    for (VarId y = 0; y < m_; ++y) {
      if (!is_copyless_word(a[y], m_)) parallel_ = true;
      for (Item it : a[y]) {
        if (it.is_variable()) targets_[it.id()].push_back(y);
      }
    }
  }

  /// Successor pair set, or nullopt when the step closes a diamond.
  std::optional<PairSet> apply(const PairSet& pairs) const {
    if (parallel_) return std::nullopt;
    PairSet out;
    for (VarId x = 0; x < m_; ++x) {
      const auto& ts = targets_[x];
      for (std::size_t i = 0; i < ts.size(); ++i) {
        for (std::size_t j = i + 1; j < ts.size(); ++j) out.push_back(encode(ts[i], ts[j]));
      }
    }
    for (std::uint32_t code : pairs) {
      VarId u = code / m_, v = code % m_;
      for (VarId a : targets_[u]) {
        for (VarId b : targets_[v]) {
          if (a == b) return std::nullopt;
          out.push_back(encode(a, b));
        }
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  std::uint32_t encode(VarId a, VarId b) const {
    if (a > b) std::swap(a, b);
    return a * static_cast<std::uint32_t>(m_) + b;
  }

  std::size_t m_;
  std::vector<std::vector<VarId>> targets_;
  bool parallel_ = false;
};

inline bool output_closes_diamond(const Word& w, const PairSet& pairs, std::size_t m) {
  if (!is_copyless_word(w, m)) return true;
  std::vector<bool> present(m, false);
  for (Item it : w) {
    if (it.is_variable()) present[it.id()] = true;
  }
  for (std::uint32_t code : pairs) {
    if (present[code / m] && present[code % m]) return true;
  }
  return false;
}

}  // namespace detail

/// Decides diamond-freeness by exploring reachable (state, divergence pairs)
/// configurations breadth first. A divergence pair {u, v} records that the
/// current contents of u and v descend from a common earlier vertex along
/// different paths; a diamond closes when a later right-hand side reads both,
/// or reads one variable twice. The search space is bounded by
/// |Q| · 2^(m(m-1)/2), so the procedure always terminates.
inline DiamondReport analyze_diamonds(const Sst& t, DiamondScope scope = DiamondScope::runs) {
  const std::size_t m = t.var_count();
  std::vector<detail::DivergenceStep> steps;
  steps.reserve(t.transitions().size());
  for (const auto& tr : t.transitions()) steps.emplace_back(tr.assign);

  struct Node {
    StateId state;
    detail::PairSet pairs;
    std::size_t parent;
    std::size_t via;
  };
  std::vector<Node> nodes;
  std::map<std::pair<StateId, detail::PairSet>, std::size_t> seen;
  constexpr std::size_t none = SIZE_MAX;

  auto path_to = [&](std::size_t n) {
    std::vector<std::size_t> path;
    for (; nodes[n].parent != none; n = nodes[n].parent) path.push_back(nodes[n].via);
    std::reverse(path.begin(), path.end());
    return path;
  };

  nodes.push_back({t.initial(), {}, none, none});
  seen.emplace(std::make_pair(t.initial(), detail::PairSet{}), 0);
  DiamondReport report;
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    report.explored = n + 1;
    const StateId q = nodes[n].state;
    if (scope == DiamondScope::runs_and_outputs) {
      for (const auto& w : t.outputs(q)) {
        if (detail::output_closes_diamond(w, nodes[n].pairs, m)) {
          report.diamond_free = false;
          report.witness = path_to(n);
          report.closes_at_output = true;
          return report;
        }
      }
    }
    for (SymbolId s = 0; s < t.input_alphabet().size(); ++s) {
      auto outgoing = t.transitions_from(q, s);
      for (const auto& tr : outgoing) {
        std::size_t idx = static_cast<std::size_t>(&tr - t.transitions().data());
        auto next = steps[idx].apply(nodes[n].pairs);
        if (!next) {
          report.diamond_free = false;
          report.witness = path_to(n);
          report.witness.push_back(idx);
          return report;
        }
        auto key = std::make_pair(tr.dst, *next);
        if (seen.contains(key)) continue;
        seen.emplace(key, nodes.size());
        nodes.push_back({tr.dst, std::move(*next), n, idx});
      }
    }
  }
  return report;
}

inline bool is_diamond_free_sst(const Sst& t, DiamondScope scope = DiamondScope::runs) {
  return analyze_diamonds(t, scope).diamond_free;
}

/// Flow graph of a run followed by one virtual layer per output word, in which
/// variable 0 receives the output word and every other variable is emptied.
inline bool run_has_diamond(const Run& r, const std::vector<Word>& outputs, DiamondScope scope) {
  if (has_diamond(flow_graph(r.assigns, r.var_count))) return true;
  if (scope == DiamondScope::runs || r.var_count == 0) return false;
  for (const auto& w : outputs) {
    std::vector<Assignment> seq = r.assigns;
    Assignment last = Assignment::eraser(r.var_count);
    last[0] = w;
    seq.push_back(std::move(last));
    if (has_diamond(flow_graph(seq, r.var_count))) return true;
  }
  return false;
}

/// Brute force: checks the flow graph of every run of length at most
/// `max_len`. Independent of analyze_diamonds and used as its oracle.
inline bool is_diamond_free_bounded(const Sst& t, std::size_t max_len, const Budget& budget = {},
                                    DiamondScope scope = DiamondScope::runs) {
  Run cur;
  cur.var_count = t.var_count();
  cur.states.push_back(t.initial());
  std::size_t visited = 0;
  auto walk = [&](auto&& self) -> bool {
    if (++visited > budget.max_words) throw BudgetError("run budget exceeded", visited);
    if (run_has_diamond(cur, t.outputs(cur.states.back()), scope)) return false;
    if (cur.length() == max_len) return true;
    for (const auto& tr : t.transitions()) {
      if (tr.src != cur.states.back()) continue;
      cur.states.push_back(tr.dst);
      cur.symbols.push_back(tr.symbol);
      cur.assigns.push_back(tr.assign);
      bool ok = self(self);
      cur.states.pop_back();
      cur.symbols.pop_back();
      cur.assigns.pop_back();
      if (!ok) return false;
    }
    return true;
  };
  return walk(walk);
}

/// Number of copyless strings over an n-letter alphabet: Σ_{k=0}^{n} n!/(n-k)!.
inline BigInt copyless_count(unsigned n) {
  BigInt sum = 1, term = 1;
  for (unsigned k = 1; k <= n; ++k) {
    term *= (n - k + 1);
    sum += term;
  }
  return sum;
}

}  // namespace sst
