#pragma once

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sst/composition.hpp"
#include "sst/copy_elimination.hpp"
#include "sst/error.hpp"
#include "sst/flow.hpp"
#include "sst/machine.hpp"
#include "sst/semantics.hpp"
#include "sst/text_format.hpp"
#include "sst/verification.hpp"

namespace sst::cli {

enum ExitCode : int { exit_ok = 0, exit_false = 1, exit_usage = 2, exit_budget = 3 };

/// Splits a command-line word into input symbols. Whitespace-separated tokens
/// are taken as given; otherwise the word is cut greedily into the longest
/// matching alphabet symbols. "-" and "" denote the empty word.
inline Text tokenize_word(const Sst& t, const std::string& word) {
  if (word.empty() || word == "-") return {};
  Text out;
  if (word.find_first_of(" \t") != std::string::npos) {
    std::istringstream in(word);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
  }
  std::size_t pos = 0;
  while (pos < word.size()) {
    std::size_t best = 0;
    for (const auto& s : t.input_alphabet()) {
      if (s.size() > best && word.compare(pos, s.size(), s) == 0) best = s.size();
    }
    if (best == 0) throw DomainError("no input symbol matches '" + word.substr(pos) + "'");
    out.push_back(word.substr(pos, best));
    pos += best;
  }
  return out;
}

/// Assignment with every entry spelled out: "{ x = 'a' x; y = ; }".
inline std::string render_assignment(const Sst& t, const Assignment& a) {
  std::string out = "{";
  for (VarId v = 0; v < a.var_count(); ++v) {
    out += ' ' + t.vars()[v] + " =";
    if (!a[v].empty()) out += ' ' + render_word(t, a[v]);
    out += ';';
  }
  return out + " }";
}

inline std::string render_transition(const Sst& t, const Transition& tr) {
  return t.states()[tr.src] + " -" + t.input_alphabet()[tr.symbol] + "-> " + t.states()[tr.dst] + ' ' +
         render_assignment(t, tr.assign);
}

namespace detail {

inline SstDocument load(const std::string& path) {
  std::string text;
  if (path == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), {});
  } else {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  try {
    return parse(text);
  } catch (const ParseError& e) {
    throw ConfigError(path + ":" + e.what());
  }
}

inline Budget budget_from_env() {
  Budget b;
  if (const char* env = std::getenv("SST_BUDGET"); env && *env) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0' || v == 0) throw ConfigError(std::string("SST_BUDGET must be a positive integer, got '") + env + "'");
    b.max_words = static_cast<std::size_t>(v);
  }
  return b;
}

/// Length-lexicographic comparison by each symbol's position in `alphabet`.
struct AlphabetOrder {
  const std::vector<std::string>& alphabet;
  bool operator()(const Text& a, const Text& b) const {
    return length_lex_less(a, b, [&](const std::string& s) {
      return std::find(alphabet.begin(), alphabet.end(), s) - alphabet.begin();
    });
  }
};

inline void emit_machine(const std::string& name, const Sst& m, const std::string& path, std::ostream& out) {
  std::string text = serialize(name, m);
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file || !(file << text)) throw ConfigError("cannot write '" + path + "'");
}

}  // namespace detail

/// Runs one command line (without the program name) and returns its exit
/// code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Streaming string transducers: evaluation, composition and copy elimination", "sst"};
  app.require_subcommand(1);
  unsigned jobs = 1;
  app.add_option("--jobs", jobs, "Worker threads for enumeration")->check(CLI::PositiveNumber);

  std::string file, name, name2, word, output_path, out_name, property, dead_reads = "forbid";
  std::string state, symbol;
  std::size_t max_len = 0;
  bool nondet = false, with_outputs = false;

  auto* eval = app.add_subcommand("eval", "Print every output for WORD");
  eval->add_option("FILE", file)->required();
  eval->add_option("NAME", name)->required();
  eval->add_option("WORD", word, "Input word; '-' for the empty word")->required();

  auto* rel = app.add_subcommand("relation", "Print all (input, output) pairs up to a length bound");
  rel->add_option("FILE", file)->required();
  rel->add_option("NAME", name)->required();
  rel->add_option("--max-len", max_len)->required();

  auto* compose = app.add_subcommand("compose", "Compose two copyless machines");
  compose->add_option("FILE", file)->required();
  compose->add_option("NAME12", name)->required();
  compose->add_option("NAME23", name2)->required();
  compose->add_flag("--nondet", nondet, "Use the construction for nondeterministic machines");
  compose->add_option("-o,--output", output_path, "Write the result to a file");
  compose->add_option("--name", out_name, "Name of the resulting machine");

  auto* check = app.add_subcommand("check", "Decide a property; exit 1 when it fails");
  check->add_option("PROPERTY", property)
      ->required()
      ->check(CLI::IsMember({"copyless", "diamond-free", "deterministic", "functional"}));
  check->add_option("FILE", file)->required();
  check->add_option("NAME", name)->required();
  check->add_option("--max-len", max_len, "Length bound for 'functional'");
  check->add_flag("--with-outputs", with_outputs, "'diamond-free': also count output words");

  auto* decomp = app.add_subcommand("decompose", "Print the copyless decomposition of a transition's assignment");
  decomp->add_option("FILE", file)->required();
  decomp->add_option("NAME", name)->required();
  decomp->add_option("STATE", state)->required();
  decomp->add_option("SYMBOL", symbol)->required();

  auto* tocl = app.add_subcommand("to-copyless", "Convert a diamond-free machine into a copyless one");
  tocl->add_option("FILE", file)->required();
  tocl->add_option("NAME", name)->required();
  tocl->add_option("-o,--output", output_path, "Write the result to a file");
  tocl->add_option("--name", out_name, "Name of the resulting machine");
  tocl->add_option("--dead-reads", dead_reads, "Transitions reading discarded variables: forbid or propagate")
      ->check(CLI::IsMember({"forbid", "propagate"}));

  auto* pipeline = app.add_subcommand("pipeline", "Compose, then remove copies");
  pipeline->add_option("FILE", file)->required();
  pipeline->add_option("NAME12", name)->required();
  pipeline->add_option("NAME23", name2)->required();
  pipeline->add_option("-o,--output", output_path, "Write the result to a file");
  pipeline->add_option("--name", out_name, "Name of the resulting machine");

  auto* equiv = app.add_subcommand("equiv", "Compare two machines on all inputs up to a length bound");
  equiv->add_option("FILE", file)->required();
  equiv->add_option("NAME1", name)->required();
  equiv->add_option("NAME2", name2)->required();
  equiv->add_option("--max-len", max_len)->required();

  std::vector<std::string> argv_store{"sst"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    const Budget budget = detail::budget_from_env();
    const SstDocument doc = detail::load(file);
    const Sst& t = doc.at(name);

    if (*eval) {
      auto outputs = evaluate(t, tokenize_word(t, word), budget);
      std::vector<Text> sorted(outputs.begin(), outputs.end());
      std::sort(sorted.begin(), sorted.end(), detail::AlphabetOrder{t.output_alphabet()});
      for (const auto& o : sorted) out << render_text(o) << '\n';
      return exit_ok;
    }

    if (*rel) {
      auto r = relation(t, max_len, budget, jobs);
      std::vector<std::pair<Text, Text>> pairs(r.pairs.begin(), r.pairs.end());
      detail::AlphabetOrder in_order{t.input_alphabet()}, out_order{t.output_alphabet()};
      std::sort(pairs.begin(), pairs.end(), [&](const auto& a, const auto& b) {
        if (in_order(a.first, b.first)) return true;
        if (in_order(b.first, a.first)) return false;
        return out_order(a.second, b.second);
      });
      for (const auto& [w, u] : pairs) out << render_text(w) << '\t' << render_text(u) << '\n';
      return exit_ok;
    }

    if (*compose) {
      const Sst& t23 = doc.at(name2);
      Sst m = nondet ? compose_nsst(t, t23) : compose_dsst(t, t23);
      detail::emit_machine(out_name.empty() ? name + "_" + name2 : out_name, m, output_path, out);
      return exit_ok;
    }

    if (*pipeline) {
      Sst m = compose_and_eliminate(t, doc.at(name2));
      detail::emit_machine(out_name.empty() ? name + "_" + name2 : out_name, m, output_path, out);
      return exit_ok;
    }

    if (*tocl) {
      CopylessOptions opts;
      opts.dead_reads = dead_reads == "propagate" ? DeadReadPolicy::propagate : DeadReadPolicy::forbid;
      Sst m = to_copyless(t, opts);
      detail::emit_machine(out_name.empty() ? name + "_copyless" : out_name, m, output_path, out);
      return exit_ok;
    }

    if (*decomp) {
      auto q = t.find_state(state);
      if (!q) throw ConfigError("no state named '" + state + "'");
      auto s = t.find_input(symbol);
      if (!s) throw ConfigError("no input symbol named '" + symbol + "'");
      auto trs = t.transitions_from(*q, *s);
      if (trs.empty()) throw ConfigError("no transition from '" + state + "' on '" + symbol + "'");
      for (const auto& tr : trs) {
        auto members = decompose(t, tr.assign);
        out << t.states()[tr.src] << " -" << symbol << "-> " << t.states()[tr.dst] << ": " << members.size()
            << (members.size() == 1 ? " member\n" : " members\n");
        for (const auto& m : members) out << "  " << render_assignment(t, m) << '\n';
      }
      return exit_ok;
    }

    if (*equiv) {
      const Sst& b = doc.at(name2);
      auto verdict = equiv_bounded(t, b, max_len, budget);
      if (verdict.equal) {
        out << "equivalent up to length " << max_len << '\n';
        return exit_ok;
      }
      const auto& w = *verdict.witness;
      out << "inequivalent\n";
      for (const auto& u : w.left) {
        if (!w.right.contains(u)) out << render_text(w.input) << '\t' << render_text(u) << "\tonly " << name << '\n';
      }
      for (const auto& u : w.right) {
        if (!w.left.contains(u)) out << render_text(w.input) << '\t' << render_text(u) << "\tonly " << name2 << '\n';
      }
      return exit_false;
    }

    if (*check) {
      if (property == "copyless") {
        if (auto i = first_copyful_transition(t)) {
          out << "false\ncopyful transition: " << render_transition(t, t.transitions()[*i]) << '\n';
          return exit_false;
        }
      } else if (property == "diamond-free") {
        auto report = analyze_diamonds(t, with_outputs ? DiamondScope::runs_and_outputs : DiamondScope::runs);
        if (!report.diamond_free) {
          out << "false\nwitness run: " << describe_run(t, report.witness)
              << (report.closes_at_output ? " (closed by an output word)" : "") << '\n';
          return exit_false;
        }
      } else if (property == "deterministic") {
        if (!is_deterministic(t)) {
          out << "false\n";
          return exit_false;
        }
      } else {
        if (check->count("--max-len") == 0) {
          err << "check functional: --max-len is required\n";
          return exit_usage;
        }
        if (!is_functional_bounded(t, max_len, budget, jobs)) {
          out << "false\n";
          return exit_false;
        }
      }
      out << "true\n";
      return exit_ok;
    }
  } catch (const BudgetError& e) {
    err << "error: " << e.what() << '\n';
    return exit_budget;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  }
  return exit_usage;
}

}  // namespace sst::cli
