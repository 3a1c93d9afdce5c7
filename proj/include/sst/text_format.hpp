#pragma once

#include <cctype>
#include <cstddef>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sst/error.hpp"
#include "sst/machine.hpp"

namespace sst {

/// Named machines from one `.sst` file, in file order.
class SstDocument {
 public:
  void add(std::string name, Sst machine) {
    if (find(name)) throw ConfigError("machine '" + name + "' is defined twice");
    machines_.emplace_back(std::move(name), std::move(machine));
  }

  const Sst* find(std::string_view name) const {
    for (const auto& [n, m] : machines_) {
      if (n == name) return &m;
    }
    return nullptr;
  }

  const Sst& at(std::string_view name) const {
    if (const Sst* m = find(name)) return *m;
    throw ConfigError("no machine named '" + std::string(name) + "'");
  }

  const std::vector<std::pair<std::string, Sst>>& machines() const { return machines_; }
  std::size_t size() const { return machines_.size(); }
  bool empty() const { return machines_.empty(); }

  friend bool operator==(const SstDocument&, const SstDocument&) = default;

 private:
  std::vector<std::pair<std::string, Sst>> machines_;
};

namespace detail {

struct Token {
  enum Kind { name, quoted, punct, arrow, end } kind;
  std::string text;
  std::size_t line, column;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_blank();
    Token t{Token::end, "", line_, col_};
    if (pos_ >= src_.size()) return t;
    char c = src_[pos_];
    if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
      advance(2);
      t.kind = Token::arrow;
      t.text = "->";
    } else if (c == ';' || c == ':' || c == '{' || c == '}' || c == '=' || c == '-') {
      advance(1);
      t.kind = Token::punct;
      t.text = std::string(1, c);
    } else if (c == '\'') {
      advance(1);
      std::size_t start = pos_;
      while (pos_ < src_.size() && src_[pos_] != '\'' && src_[pos_] != '\n') advance(1);
      if (pos_ >= src_.size() || src_[pos_] != '\'') throw ParseError("unterminated quoted symbol", t.line, t.column);
      t.kind = Token::quoted;
      t.text = std::string(src_.substr(start, pos_ - start));
      advance(1);
    } else if (c == '"') {
      throw ParseError("symbols are quoted with single quotes", t.line, t.column);
    } else {
      std::size_t start = pos_;
      while (pos_ < src_.size() && !is_break(src_[pos_])) advance(1);
      t.kind = Token::name;
      t.text = std::string(src_.substr(start, pos_ - start));
    }
    return t;
  }

 private:
  static bool is_break(char c) {
    return std::isspace(static_cast<unsigned char>(c)) || c == ';' || c == ':' || c == '{' || c == '}' || c == '=' ||
           c == '#' || c == '\'' || c == '"' || c == '-';
  }

  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i, ++pos_) {
      if (src_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
    }
  }

  void skip_blank() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance(1);
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance(1);
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0, line_ = 1, col_ = 1;
};

/// Word item before name resolution.
struct RawItem {
  bool quoted;
  std::string text;
  std::size_t line, column;
};

struct RawTransition {
  std::string src, symbol, dst;
  std::vector<std::pair<RawItem, std::vector<RawItem>>> rhs;
  std::size_t line, column;
};

struct RawMachine {
  std::string name;
  std::size_t line;
  std::optional<std::vector<std::string>> input, output, states, vars;
  std::optional<std::string> initial;
  std::vector<RawTransition> transitions;
  std::vector<std::pair<RawItem, std::vector<RawItem>>> outputs;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) { tok_ = lex_.next(); }

  SstDocument document() {
    SstDocument doc;
    while (tok_.kind != Token::end) {
      RawMachine raw = machine();
      Sst m = build(raw);
      try {
        doc.add(raw.name, std::move(m));
      } catch (const ConfigError& e) {
        throw ConfigError("line " + std::to_string(raw.line) + ": " + e.what());
      }
    }
    return doc;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, tok_.line, tok_.column); }

  std::string describe() const {
    switch (tok_.kind) {
      case Token::end: return "end of input";
      case Token::quoted: return "'" + tok_.text + "'";
      default: return "'" + tok_.text + "'";
    }
  }

  bool at_punct(char c) const { return tok_.kind == Token::punct && tok_.text[0] == c; }

  void expect_punct(char c) {
    if (!at_punct(c)) fail(std::string("expected '") + c + "', found " + describe());
    tok_ = lex_.next();
  }

  std::string expect_name(const char* what) {
    if (tok_.kind != Token::name && tok_.kind != Token::quoted) fail(std::string("expected ") + what + ", found " + describe());
    std::string s = tok_.text;
    tok_ = lex_.next();
    return s;
  }

  std::vector<std::string> name_list() {
    std::vector<std::string> out;
    while (!at_punct(';')) out.push_back(expect_name("a name or ';'"));
    expect_punct(';');
    return out;
  }

  RawItem item() {
    RawItem r{tok_.kind == Token::quoted, tok_.text, tok_.line, tok_.column};
    if (tok_.kind != Token::name && tok_.kind != Token::quoted) fail("expected a variable, a quoted symbol or ';', found " + describe());
    tok_ = lex_.next();
    return r;
  }

  std::vector<RawItem> word() {
    std::vector<RawItem> out;
    while (!at_punct(';')) out.push_back(item());
    expect_punct(';');
    return out;
  }

  RawMachine machine() {
    if (tok_.kind != Token::name || tok_.text != "sst") fail("expected 'sst', found " + describe());
    RawMachine m;
    m.line = tok_.line;
    tok_ = lex_.next();
    m.name = expect_name("a machine name");
    expect_punct('{');
    while (!at_punct('}')) {
      if (tok_.kind != Token::name) fail("expected a declaration, found " + describe());
      std::string kw = tok_.text;
      auto once = [&](auto& slot) {
        if (slot) fail("'" + kw + "' declared twice");
        tok_ = lex_.next();
        expect_punct(':');
      };
      if (kw == "input") {
        once(m.input);
        m.input = name_list();
      } else if (kw == "output") {
        once(m.output);
        m.output = name_list();
      } else if (kw == "states") {
        once(m.states);
        m.states = name_list();
      } else if (kw == "vars") {
        once(m.vars);
        m.vars = name_list();
      } else if (kw == "initial") {
        once(m.initial);
        m.initial = expect_name("a state name");
        expect_punct(';');
      } else if (kw == "trans") {
        m.transitions.push_back(transition());
      } else if (kw == "out") {
        tok_ = lex_.next();
        RawItem state{false, tok_.text, tok_.line, tok_.column};
        state.text = expect_name("a state name");
        expect_punct('=');
        m.outputs.emplace_back(std::move(state), word());
      } else {
        fail("unknown declaration '" + kw + "'");
      }
    }
    expect_punct('}');
    return m;
  }

  RawTransition transition() {
    RawTransition t;
    t.line = tok_.line;
    t.column = tok_.column;
    tok_ = lex_.next();
    t.src = expect_name("a source state");
    expect_punct('-');
    t.symbol = expect_name("an input symbol");
    if (tok_.kind != Token::arrow) fail("expected '->', found " + describe());
    tok_ = lex_.next();
    t.dst = expect_name("a target state");
    if (at_punct(';')) {
      expect_punct(';');
      return t;
    }
    expect_punct('{');
    while (!at_punct('}')) {
      RawItem var = item();
      if (var.quoted) throw ParseError("left-hand side must be a variable", var.line, var.column);
      expect_punct('=');
      t.rhs.emplace_back(std::move(var), word());
    }
    expect_punct('}');
    return t;
  }

  static Sst build(const RawMachine& raw) {
    auto where = [&](std::size_t line) {
      return "machine '" + raw.name + "', line " + std::to_string(line) + ": ";
    };
    auto need = [&](const auto& slot, const char* kw) -> decltype(auto) {
      if (!slot) throw ConfigError(where(raw.line) + "missing '" + kw + "' declaration");
      return *slot;
    };
    const auto& input = need(raw.input, "input");
    const auto& output = need(raw.output, "output");
    const auto& states = need(raw.states, "states");
    std::vector<std::string> vars = raw.vars.value_or(std::vector<std::string>{});

    auto index_of = [&](const std::vector<std::string>& names, const std::string& n, const char* what, std::size_t line) {
      for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == n) return static_cast<std::uint32_t>(i);
      }
      throw ConfigError(where(line) + "unknown " + what + " '" + n + "'");
    };
    auto resolve = [&](const std::vector<RawItem>& items) {
      Word w;
      for (const auto& it : items) {
        if (it.quoted) {
          w.push_back(Item::symbol(index_of(output, it.text, "output symbol", it.line)));
        } else {
          w.push_back(Item::variable(index_of(vars, it.text, "variable (quote output symbols)", it.line)));
        }
      }
      return w;
    };

    try {
      StateId initial = raw.initial ? index_of(states, *raw.initial, "state", raw.line) : 0;
      std::vector<Transition> ts;
      for (const auto& rt : raw.transitions) {
        Assignment a = Assignment::identity(vars.size());
        std::set<VarId> assigned;
        for (const auto& [lhs, rhs] : rt.rhs) {
          VarId v = index_of(vars, lhs.text, "variable", lhs.line);
          if (!assigned.insert(v).second) throw ConfigError(where(lhs.line) + "variable '" + lhs.text + "' assigned twice");
          a[v] = resolve(rhs);
        }
        ts.push_back({index_of(states, rt.src, "state", rt.line), index_of(input, rt.symbol, "input symbol", rt.line),
                      std::move(a), index_of(states, rt.dst, "state", rt.line)});
      }
      std::vector<OutputRule> outs;
      for (const auto& [state, w] : raw.outputs) {
        outs.push_back({index_of(states, state.text, "state", state.line), {resolve(w)}});
      }
      return Sst(input, output, states, initial, vars, std::move(ts), std::move(outs));
    } catch (const ConfigError& e) {
      std::string msg = e.what();
      if (msg.rfind("machine '", 0) == 0) throw;
      throw ConfigError(where(raw.line) + msg);
    }
  }

  Lexer lex_;
  Token tok_;
};

inline void write_word(std::ostream& out, const Sst& t, const Word& w) {
  for (Item it : w) {
    out << ' ';
    if (it.is_variable()) {
      out << t.vars()[it.id()];
    } else {
      out << '\'' << t.output_alphabet()[it.id()] << '\'';
    }
  }
}

inline void write_names(std::ostream& out, const char* kw, const std::vector<std::string>& names) {
  out << "  " << kw << ':';
  for (const auto& n : names) out << ' ' << n;
  out << ";\n";
}

}  // namespace detail

inline SstDocument parse(std::string_view text) { return detail::Parser(text).document(); }

/// Canonical text of one machine. Right-hand sides equal to the identity are
/// omitted.
inline std::string serialize(const std::string& name, const Sst& t) {
  std::ostringstream out;
  out << "sst " << name << " {\n";
  detail::write_names(out, "input", t.input_alphabet());
  detail::write_names(out, "output", t.output_alphabet());
  detail::write_names(out, "states", t.states());
  out << "  initial: " << t.states()[t.initial()] << ";\n";
  detail::write_names(out, "vars", t.vars());
  for (const auto& tr : t.transitions()) {
    out << "  trans " << t.states()[tr.src] << " -" << t.input_alphabet()[tr.symbol] << "-> " << t.states()[tr.dst]
        << " {";
    for (VarId v = 0; v < t.var_count(); ++v) {
      const Word& w = tr.assign[v];
      if (w.size() == 1 && w[0] == Item::variable(v)) continue;
      out << ' ' << t.vars()[v] << " =";
      detail::write_word(out, t, w);
      out << ';';
    }
    out << " }\n";
  }
  for (StateId q = 0; q < t.state_count(); ++q) {
    for (const auto& w : t.outputs(q)) {
      out << "  out " << t.states()[q] << " =";
      detail::write_word(out, t, w);
      out << ";\n";
    }
  }
  out << "}\n";
  return out.str();
}

inline std::string serialize(const SstDocument& doc) {
  std::string out;
  for (const auto& [name, m] : doc.machines()) {
    if (!out.empty()) out += '\n';
    out += serialize(name, m);
  }
  return out;
}

}  // namespace sst
