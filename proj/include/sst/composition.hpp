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
#include "sst/error.hpp"
#include "sst/flow.hpp"
#include "sst/machine.hpp"
#include "sst/word.hpp"

namespace sst {

/// Variable numbering shared by the summary operators. The composite's own
/// variables z^{p,x}_{y,b} come first, ordered by (p, x, y, b); the second
/// machine's variables y follow them, so one Word type covers Y ∪ Z ∪ Σ3.
class CompositionLayout {
 public:
  struct ZIndex {
    StateId p;
    VarId x;
    VarId y;
    unsigned b;
    auto operator<=>(const ZIndex&) const = default;
  };

  CompositionLayout(std::size_t p_count, std::size_t x_count, std::size_t y_count)
      : p_(p_count), x_(x_count), y_(y_count) {}

  std::size_t p_count() const { return p_; }
  std::size_t x_count() const { return x_; }
  std::size_t y_count() const { return y_; }
  std::size_t z_count() const { return 2 * p_ * x_ * y_; }

  VarId z(StateId p, VarId x, VarId y, unsigned b) const {
    return static_cast<VarId>(((p * x_ + x) * y_ + y) * 2 + b);
  }
  ZIndex decode(VarId z) const {
    return {static_cast<StateId>(z / (2 * y_ * x_)), static_cast<VarId>((z / (2 * y_)) % x_),
            static_cast<VarId>((z / 2) % y_), static_cast<unsigned>(z % 2)};
  }

  VarId y_var(VarId y) const { return static_cast<VarId>(z_count() + y); }
  bool is_y(VarId v) const { return v >= z_count(); }
  VarId y_of(VarId v) const { return static_cast<VarId>(v - z_count()); }

  std::size_t px(StateId p, VarId x) const { return p * x_ + x; }
  std::size_t pxy(StateId p, VarId x, VarId y) const { return (p * x_ + x) * y_ + y; }

 private:
  std::size_t p_, x_, y_;
};

/// f : (P × X) → P. Entries are no_state where the second machine has no run
/// on the variable's contents.
struct StateSummary {
  std::vector<StateId> table;
  auto operator<=>(const StateSummary&) const = default;
};

/// g : (P × X × Y) → ⟨Y ∪ Z⟩, indexed by CompositionLayout::pxy. Entries under
/// an undefined state-summary entry are left empty.
struct ShapeSummary {
  std::vector<Word> table;
  auto operator<=>(const ShapeSummary&) const = default;
};

struct CompositeState {
  StateId q = 0;
  StateSummary f;
  ShapeSummary g;
  auto operator<=>(const CompositeState&) const = default;
};

/// Map Y → word over Y ∪ Z ∪ Σ3 in layout numbering.
using YMap = std::vector<Word>;

/// Result of the synchronized summarizer: reachable (end state, assignment
/// summary) pairs.
using SummaryChoice = std::set<std::pair<StateId, YMap>>;

struct CompositionOptions {
  std::size_t max_states = 200'000;
  /// Cap on transitions emitted from one composite state by the
  /// nondeterministic construction.
  std::size_t max_choices = 100'000;
};

/// Holds both input machines and evaluates the summary operators over them.
class Composer {
 public:
  Composer(const Sst& t12, const Sst& t23)
      : t12_(t12), t23_(t23), layout_(t23.state_count(), t12.var_count(), t23.var_count()) {
    for (const auto& s : t12.output_alphabet()) {
      auto id = t23.find_input(s);
      if (!id) throw ConfigError("output symbol '" + s + "' of the first machine is not an input of the second");
      symbol_map_.push_back(*id);
    }
    for (const auto& tr : t23.transitions()) {
      YMap beta;
      for (const auto& w : tr.assign.words()) beta.push_back(lift(w));
      betas_.push_back(std::move(beta));
    }
  }

  const Sst& first() const { return t12_; }
  const Sst& second() const { return t23_; }
  const CompositionLayout& layout() const { return layout_; }

  /// Second machine's word (over Y ∪ Σ3) in layout numbering.
  Word lift(const Word& w) const {
    Word out;
    out.reserve(w.size());
    for (Item it : w) out.push_back(it.is_variable() ? Item::variable(layout_.y_var(it.id())) : it);
    return out;
  }

  YMap identity() const {
    YMap h(layout_.y_count());
    for (VarId y = 0; y < h.size(); ++y) h[y] = {Item::variable(layout_.y_var(y))};
    return h;
  }

  /// Applies `h` as a morphism that fixes symbols and Z variables.
  Word apply(const YMap& h, const Word& w) const {
    return substitute(w, [&](VarId v) -> const Word* { return layout_.is_y(v) ? &h[layout_.y_of(v)] : nullptr; });
  }

  /// outer ∘ inner.
  YMap then(const YMap& outer, const YMap& inner) const {
    YMap out;
    out.reserve(inner.size());
    for (const auto& w : inner) out.push_back(apply(outer, w));
    return out;
  }

  YMap shape_slice(const ShapeSummary& g, StateId p, VarId x) const {
    auto first = g.table.begin() + static_cast<std::ptrdiff_t>(layout_.pxy(p, x, 0));
    return YMap(first, first + static_cast<std::ptrdiff_t>(layout_.y_count()));
  }

  CompositeState initial_state() const {
    CompositeState r;
    r.q = t12_.initial();
    for (StateId p = 0; p < layout_.p_count(); ++p) {
      for (VarId x = 0; x < layout_.x_count(); ++x) {
        r.f.table.push_back(p);
        for (VarId y = 0; y < layout_.y_count(); ++y) r.g.table.push_back({Item::variable(layout_.y_var(y))});
      }
    }
    return r;
  }

  /// State transition summarizer. nullopt when the simulation needs a missing
  /// transition or an undefined summary entry.
  std::optional<StateId> state_summary(StateId p, const Word& xw, const StateSummary& f) const {
    StateId cur = p;
    for (Item it : xw) {
      if (it.is_symbol()) {
        auto ts = t23_.transitions_from(cur, symbol_map_.at(it.id()));
        if (ts.empty()) return std::nullopt;
        if (ts.size() > 1) throw ConfigError("state summarizer needs a deterministic second machine");
        cur = ts.front().dst;
      } else {
        cur = f.table.at(layout_.px(cur, it.id()));
        if (cur == no_state) return std::nullopt;
      }
    }
    return cur;
  }

  /// Assignment summarizer: composes β for symbols and g^p_x for variables in
  /// reading order.
  std::optional<YMap> assignment_summary(StateId p, const Word& xw, const StateSummary& f, const ShapeSummary& g) const {
    StateId cur = p;
    YMap h = identity();
    for (Item it : xw) {
      if (it.is_symbol()) {
        auto ts = t23_.transitions_from(cur, symbol_map_.at(it.id()));
        if (ts.empty()) return std::nullopt;
        if (ts.size() > 1) throw ConfigError("assignment summarizer needs a deterministic second machine");
        h = then(h, beta(ts.front()));
        cur = ts.front().dst;
      } else {
        StateId next = f.table.at(layout_.px(cur, it.id()));
        if (next == no_state) return std::nullopt;
        h = then(h, shape_slice(g, cur, it.id()));
        cur = next;
      }
    }
    return h;
  }

  /// Synchronized summarizer: follows every matching transition of the second
  /// machine, so state and assignment summaries always describe the same run.
  SummaryChoice nondet_summary(StateId p, const Word& xw, const StateSummary& f, const ShapeSummary& g) const {
    SummaryChoice cur{{p, identity()}};
    for (Item it : xw) {
      SummaryChoice next;
      for (const auto& [state, h] : cur) {
        if (it.is_symbol()) {
          for (const auto& tr : t23_.transitions_from(state, symbol_map_.at(it.id()))) {
            next.emplace(tr.dst, then(h, beta(tr)));
          }
        } else {
          StateId to = f.table.at(layout_.px(state, it.id()));
          if (to != no_state) next.emplace(to, then(h, shape_slice(g, state, it.id())));
        }
      }
      cur = std::move(next);
      if (cur.empty()) break;
    }
    return cur;
  }

  /// Shape generator: y ↦ (∏ z^{p,x}_{y_k,0} y_k) z^{p,x}_{y,1} where y_1..y_n
  /// are the Y variables of h(y) in order.
  YMap shape(StateId p, VarId x, const YMap& h) const {
    require_copyless(h);
    YMap out(h.size());
    for (VarId y = 0; y < h.size(); ++y) {
      for (Item it : h[y]) {
        if (it.is_variable() && layout_.is_y(it.id())) {
          out[y].push_back(Item::variable(layout_.z(p, x, layout_.y_of(it.id()), 0)));
          out[y].push_back(it);
        }
      }
      out[y].push_back(Item::variable(layout_.z(p, x, y, 1)));
    }
    return out;
  }

  /// Assignment generator for the slice {z^{p,x}_{y,b}}: z_{y,0} receives the
  /// segment in front of y wherever y occurs (ε if nowhere), z_{y,1} the
  /// segment after the last Y variable of h(y). Indexed by y * 2 + b.
  std::vector<Word> slice_assignment(StateId p, VarId x, const YMap& h) const {
    (void)p;
    (void)x;
    require_copyless(h);
    std::vector<Word> out(2 * h.size());
    for (VarId y = 0; y < h.size(); ++y) {
      Word segment;
      for (Item it : h[y]) {
        if (it.is_variable() && layout_.is_y(it.id())) {
          out[layout_.y_of(it.id()) * 2] = std::move(segment);
          segment.clear();
        } else {
          segment.push_back(it);
        }
      }
      out[y * 2 + 1] = std::move(segment);
    }
    return out;
  }

  std::span<const YMap> betas() const { return betas_; }
  const YMap& beta(const Transition& tr) const {
    return betas_[static_cast<std::size_t>(&tr - t23_.transitions().data())];
  }

 private:
  void require_copyless(const YMap& h) const {
    std::vector<bool> seen_y(layout_.y_count(), false);
    for (const auto& w : h) {
      if (!is_copyless_word(w, layout_.z_count() + layout_.y_count())) {
        throw ConfigError("contract violation: summary word is not copyless");
      }
      for (Item it : w) {
        if (!it.is_variable() || !layout_.is_y(it.id())) continue;
        if (seen_y[layout_.y_of(it.id())]) throw ConfigError("contract violation: summary copies a variable");
        seen_y[layout_.y_of(it.id())] = true;
      }
    }
  }

  const Sst& t12_;
  const Sst& t23_;
  CompositionLayout layout_;
  std::vector<SymbolId> symbol_map_;
  std::vector<YMap> betas_;
};

// Free-function forms of the summary operators.

inline StateId summarize_state(const Composer& c, StateId p, const Word& xw, const StateSummary& f) {
  auto r = c.state_summary(p, xw, f);
  if (!r) throw UndefinedSummaryError("state summary is undefined: the second machine has no run");
  return *r;
}

inline YMap summarize_assignment(const Composer& c, StateId p, const Word& xw, const StateSummary& f,
                                 const ShapeSummary& g) {
  auto r = c.assignment_summary(p, xw, f, g);
  if (!r) throw UndefinedSummaryError("assignment summary is undefined: the second machine has no run");
  return *r;
}

inline SummaryChoice summarize_nondet(const Composer& c, StateId p, const Word& xw, const StateSummary& f,
                                      const ShapeSummary& g) {
  return c.nondet_summary(p, xw, f, g);
}

inline YMap shape_of(const Composer& c, StateId p, VarId x, const YMap& h) { return c.shape(p, x, h); }

inline std::vector<Word> assignment_of(const Composer& c, StateId p, VarId x, const YMap& h) {
  return c.slice_assignment(p, x, h);
}

/// Composite machine together with the summaries behind each of its states.
struct Composite {
  Sst machine;
  /// states[i] is the summary triple of machine state i.
  std::vector<CompositeState> states;
  /// origins[i] lists the first machine's transitions (indices) that gave rise
  /// to machine.transitions()[i].
  std::vector<std::vector<std::size_t>> origins;
  CompositionLayout layout;
};

/// Composite variable names z1..zN in layout order, with a prefix chosen to
/// avoid every name in `taken`.
inline std::vector<std::string> z_names(std::size_t count, const std::vector<std::vector<std::string>*>& taken) {
  auto clashes = [&](const std::string& prefix) {
    for (auto* names : taken) {
      for (const auto& n : *names) {
        if (n.rfind(prefix, 0) == 0) return true;
      }
    }
    return false;
  };
  std::string prefix = "z";
  while (clashes(prefix)) prefix += "_";
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= count; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

namespace detail {

inline void check_composable(const Sst& t12, const Sst& t23, bool deterministic) {
  if (auto i = first_copyful_transition(t12)) throw ConfigError("first machine is not copyless");
  if (auto i = first_copyful_transition(t23)) throw ConfigError("second machine is not copyless");
  if (deterministic) {
    if (!is_deterministic(t12)) throw ConfigError("first machine is not deterministic");
    if (!is_deterministic(t23)) throw ConfigError("second machine is not deterministic");
  }
}

/// Worklist driver shared by both constructions. `expand` emits the outgoing
/// edges of a composite state; `outputs` its output words.
template <class Expand, class Outputs>
Composite build_composite(const Composer& c, const CompositionOptions& opts, Expand&& expand, Outputs&& outputs) {
  const Sst& t12 = c.first();
  const Sst& t23 = c.second();
  const auto& layout = c.layout();

  std::map<CompositeState, StateId> ids;
  std::vector<CompositeState> states;
  auto intern = [&](CompositeState r) {
    auto [it, fresh] = ids.emplace(r, static_cast<StateId>(states.size()));
    if (fresh) {
      if (states.size() >= opts.max_states) throw BudgetError("composite state budget exceeded", states.size());
      states.push_back(std::move(r));
    }
    return it->second;
  };

  std::map<Transition, std::set<std::size_t>> raw;
  std::vector<OutputRule> out_rules;
  intern(c.initial_state());
  for (StateId r = 0; r < states.size(); ++r) {
    const CompositeState cur = states[r];
    expand(cur, [&](std::size_t origin, Assignment gamma, CompositeState next) {
      StateId dst = intern(std::move(next));
      SymbolId s = t12.transitions()[origin].symbol;
      raw[Transition{r, s, std::move(gamma), dst}].insert(origin);
    });
    auto words = outputs(cur);
    if (!words.empty()) out_rules.push_back({r, std::move(words)});
  }

  std::vector<std::string> names;
  for (std::size_t i = 0; i < states.size(); ++i) names.push_back("r" + std::to_string(i));
  auto input = t12.input_alphabet();
  auto output = t23.output_alphabet();
  auto vars = z_names(layout.z_count(), {&input, &output});

  std::vector<Transition> transitions;
  for (const auto& [tr, _] : raw) transitions.push_back(tr);
  Sst machine(input, output, names, 0, vars, std::move(transitions), std::move(out_rules));
  std::vector<std::vector<std::size_t>> origins;
  for (const auto& tr : machine.transitions()) {
    const auto& o = raw.at(tr);
    origins.emplace_back(o.begin(), o.end());
  }
  return Composite{std::move(machine), std::move(states), std::move(origins), layout};
}

/// Writes slice (p, x) of a successor state and its assignment.
inline void fill_slice(const Composer& c, StateId p, VarId x, std::optional<std::pair<StateId, YMap>> summary,
                       CompositeState& next, Assignment& gamma) {
  const auto& layout = c.layout();
  if (!summary) {
    next.f.table[layout.px(p, x)] = no_state;
    return;  // shape entries stay empty, slice variables are reset to ε
  }
  next.f.table[layout.px(p, x)] = summary->first;
  YMap shape = c.shape(p, x, summary->second);
  for (VarId y = 0; y < layout.y_count(); ++y) next.g.table[layout.pxy(p, x, y)] = std::move(shape[y]);
  auto slice = c.slice_assignment(p, x, summary->second);
  for (VarId y = 0; y < layout.y_count(); ++y) {
    for (unsigned b = 0; b < 2; ++b) gamma[layout.z(p, x, y, b)] = std::move(slice[y * 2 + b]);
  }
}

inline CompositeState blank_successor(const Composer& c, StateId q) {
  const auto& layout = c.layout();
  CompositeState next;
  next.q = q;
  next.f.table.assign(layout.p_count() * layout.x_count(), no_state);
  next.g.table.assign(layout.p_count() * layout.x_count() * layout.y_count(), Word{});
  return next;
}

/// Er_Y ∘ h applied to an output word of the second machine.
inline Word composite_output(const Composer& c, const YMap& h, const Word& w23) {
  Word out;
  for (Item it : c.apply(h, c.lift(w23))) {
    if (it.is_variable() && c.layout().is_y(it.id())) continue;
    out.push_back(it);
  }
  return out;
}

}  // namespace detail

/// Composition of two copyless deterministic machines, restricted to the
/// composite states reachable from (q0, f0, g0).
inline Composite compose_dsst_detailed(const Sst& t12, const Sst& t23, const CompositionOptions& opts = {}) {
  detail::check_composable(t12, t23, true);
  Composer c(t12, t23);
  const auto& layout = c.layout();
  auto expand = [&](const CompositeState& cur, auto&& emit) {
    for (std::size_t i = 0; i < t12.transitions().size(); ++i) {
      const Transition& tr = t12.transitions()[i];
      if (tr.src != cur.q) continue;
      CompositeState next = detail::blank_successor(c, tr.dst);
      Assignment gamma = Assignment::eraser(layout.z_count());
      for (StateId p = 0; p < layout.p_count(); ++p) {
        for (VarId x = 0; x < layout.x_count(); ++x) {
          std::optional<std::pair<StateId, YMap>> summary;
          if (auto to = c.state_summary(p, tr.assign[x], cur.f)) {
            summary.emplace(*to, *c.assignment_summary(p, tr.assign[x], cur.f, cur.g));
          }
          detail::fill_slice(c, p, x, std::move(summary), next, gamma);
        }
      }
      emit(i, std::move(gamma), std::move(next));
    }
  };
  auto outputs = [&](const CompositeState& cur) {
    std::vector<Word> words;
    for (const auto& w12 : t12.outputs(cur.q)) {
      auto p = c.state_summary(t23.initial(), w12, cur.f);
      if (!p) continue;
      auto h = c.assignment_summary(t23.initial(), w12, cur.f, cur.g);
      for (const auto& w23 : t23.outputs(*p)) words.push_back(detail::composite_output(c, *h, w23));
    }
    return words;
  };
  return detail::build_composite(c, opts, expand, outputs);
}

inline Sst compose_dsst(const Sst& t12, const Sst& t23, const CompositionOptions& opts = {}) {
  return compose_dsst_detailed(t12, t23, opts).machine;
}

/// Composition of two copyless machines, either of which may be
/// nondeterministic. Every (p, x) slice independently picks one element of
/// the synchronized summary; one composite transition is emitted per
/// combination. A slice whose summary is empty is left undefined.
inline Composite compose_nsst_detailed(const Sst& t12, const Sst& t23, const CompositionOptions& opts = {}) {
  detail::check_composable(t12, t23, false);
  Composer c(t12, t23);
  const auto& layout = c.layout();
  const std::size_t slices = layout.p_count() * layout.x_count();
  auto expand = [&](const CompositeState& cur, auto&& emit) {
    std::size_t emitted = 0;
    for (std::size_t i = 0; i < t12.transitions().size(); ++i) {
      const Transition& tr = t12.transitions()[i];
      if (tr.src != cur.q) continue;
      std::vector<std::vector<std::optional<std::pair<StateId, YMap>>>> options(slices);
      for (StateId p = 0; p < layout.p_count(); ++p) {
        for (VarId x = 0; x < layout.x_count(); ++x) {
          auto& opt = options[layout.px(p, x)];
          for (auto& choice : c.nondet_summary(p, tr.assign[x], cur.f, cur.g)) opt.emplace_back(choice);
          if (opt.empty()) opt.emplace_back(std::nullopt);
        }
      }
      std::vector<std::size_t> pick(slices, 0);
      while (true) {
        if (++emitted > opts.max_choices) {
          throw BudgetError("choice product exceeds the per-state transition budget; try smaller machines", emitted);
        }
        CompositeState next = detail::blank_successor(c, tr.dst);
        Assignment gamma = Assignment::eraser(layout.z_count());
        for (StateId p = 0; p < layout.p_count(); ++p) {
          for (VarId x = 0; x < layout.x_count(); ++x) {
            std::size_t k = layout.px(p, x);
            detail::fill_slice(c, p, x, options[k][pick[k]], next, gamma);
          }
        }
        emit(i, std::move(gamma), std::move(next));
        std::size_t k = 0;
        while (k < slices && ++pick[k] == options[k].size()) pick[k++] = 0;
        if (k == slices) break;
      }
    }
  };
  auto outputs = [&](const CompositeState& cur) {
    std::vector<Word> words;
    for (const auto& w12 : t12.outputs(cur.q)) {
      for (const auto& [p, h] : c.nondet_summary(t23.initial(), w12, cur.f, cur.g)) {
        for (const auto& w23 : t23.outputs(p)) words.push_back(detail::composite_output(c, h, w23));
      }
    }
    return words;
  };
  return detail::build_composite(c, opts, expand, outputs);
}

inline Sst compose_nsst(const Sst& t12, const Sst& t23, const CompositionOptions& opts = {}) {
  return compose_nsst_detailed(t12, t23, opts).machine;
}

struct CompositionBounds {
  BigInt state_bound;
  std::size_t var_count = 0;
};

/// Size of the full composite state space, k · n^(ln) · ⌊e(m + 2lnm)!⌋^(lnm),
/// and its variable count 2lnm, for a first machine with k states and l
/// variables and a second with n states and m variables.
inline CompositionBounds theoretical_bounds(const Sst& t12, const Sst& t23) {
  const std::size_t k = t12.state_count(), l = t12.var_count();
  const std::size_t n = t23.state_count(), m = t23.var_count();
  const std::size_t z = 2 * l * n * m;
  BigInt shapes = copyless_count(static_cast<unsigned>(m + z));
  BigInt bound = k;
  bound *= boost::multiprecision::pow(BigInt(n), static_cast<unsigned>(l * n));
  bound *= boost::multiprecision::pow(shapes, static_cast<unsigned>(l * n * m));
  return {bound, z};
}

}  // namespace sst
