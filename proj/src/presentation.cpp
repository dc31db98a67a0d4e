#include "kodaira/presentation.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace kodaira {

void Word::append(int g, int e) {
  if (e == 0) return;
  if (!syms.empty() && syms.back().first == g) {
    syms.back().second += e;
    if (syms.back().second == 0) syms.pop_back();
  } else {
    syms.emplace_back(g, e);
  }
}

Word Word::inverse() const {
  Word w;
  for (auto it = syms.rbegin(); it != syms.rend(); ++it) w.append(it->first, -it->second);
  return w;
}

Word Word::operator*(const Word& o) const {
  Word w = *this;
  for (auto& [g, e] : o.syms) w.append(g, e);
  return w;
}

Word Word::gen(int g, int e) {
  Word w;
  w.append(g, e);
  return w;
}

Word Word::commutator_of(const Word& a, const Word& b) {
  return a * b * a.inverse() * b.inverse();
}

std::string word_to_string(const Word& w, const std::vector<std::string>& names) {
  if (w.syms.empty()) return "1";
  std::string out;
  for (size_t i = 0; i < w.syms.size(); ++i) {
    if (i) out += "*";
    out += names[w.syms[i].first];
    if (w.syms[i].second != 1) out += "^" + std::to_string(w.syms[i].second);
  }
  return out;
}

ElemId evaluate_word(const FiniteGroup& G, std::span<const ElemId> assignment,
                     const Word& w) {
  ElemId acc = kIdentity;
  for (auto& [g, e] : w.syms) {
    if (g < 0 || static_cast<size_t>(g) >= assignment.size() || assignment[g] < 0)
      throw std::invalid_argument("evaluate_word: unassigned generator index " +
                                  std::to_string(g));
    ElemId base = e < 0 ? G.inv(assignment[g]) : assignment[g];
    int k = e < 0 ? -e : e;
    for (int i = 0; i < k; ++i) acc = G.mul(acc, base);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// DSL parser
// ---------------------------------------------------------------------------

namespace {

enum class Tok { Name, Int, Str, Punct, End };

struct Token {
  Tok kind;
  std::string text;
  long long value = 0;
  int line = 1, col = 1;
};

struct Lexer {
  const std::string& s;
  size_t pos = 0;
  int line = 1, col = 1;

  explicit Lexer(const std::string& src) : s(src) {}

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line, col, msg); }

  void bump() {
    if (pos < s.size() && s[pos] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  void skip_ws() {
    while (pos < s.size()) {
      if (std::isspace(static_cast<unsigned char>(s[pos]))) {
        bump();
      } else if (s[pos] == '#') {
        while (pos < s.size() && s[pos] != '\n') bump();
      } else {
        break;
      }
    }
  }

  Token next() {
    skip_ws();
    Token t;
    t.line = line;
    t.col = col;
    if (pos >= s.size()) {
      t.kind = Tok::End;
      return t;
    }
    char c = s[pos];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string name;
      while (pos < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) {
        name += s[pos];
        bump();
      }
      t.kind = Tok::Name;
      t.text = std::move(name);
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && pos + 1 < s.size() &&
         std::isdigit(static_cast<unsigned char>(s[pos + 1])))) {
      std::string num;
      if (c == '-') {
        num += c;
        bump();
      }
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
        num += s[pos];
        bump();
      }
      t.kind = Tok::Int;
      t.value = std::stoll(num);
      t.text = std::move(num);
      return t;
    }
    if (c == '"') {
      bump();
      std::string str;
      while (pos < s.size() && s[pos] != '"') {
        str += s[pos];
        bump();
      }
      if (pos >= s.size()) fail("unterminated string");
      bump();
      t.kind = Tok::Str;
      t.text = std::move(str);
      return t;
    }
    if (c == '.' && pos + 1 < s.size() && s[pos + 1] == '.') {
      bump();
      bump();
      t.kind = Tok::Punct;
      t.text = "..";
      return t;
    }
    static const std::string punct = ",;=^*()[]{}";
    if (punct.find(c) != std::string::npos) {
      bump();
      t.kind = Tok::Punct;
      t.text = std::string(1, c);
      return t;
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

struct Parser {
  Lexer lex;
  Token tok;
  Presentation pres;
  std::map<std::string, int> gen_index;

  explicit Parser(const std::string& src) : lex(src) { tok = lex.next(); }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(tok.line, tok.col, msg);
  }

  void advance() { tok = lex.next(); }

  bool accept_punct(const std::string& p) {
    if (tok.kind == Tok::Punct && tok.text == p) {
      advance();
      return true;
    }
    return false;
  }

  void expect_punct(const std::string& p) {
    if (!accept_punct(p)) fail("expected '" + p + "'");
  }

  bool at_name(const std::string& n) const { return tok.kind == Tok::Name && tok.text == n; }

  void declare_gen(const std::string& name, int line, int col) {
    if (gen_index.count(name)) throw ParseError(line, col, "duplicate generator '" + name + "'");
    gen_index[name] = static_cast<int>(pres.generator_names.size());
    pres.generator_names.push_back(name);
  }

  void parse_gens() {
    advance();  // 'gens'
    if (tok.kind == Tok::Punct && tok.text == ";") fail("empty generator list");
    while (true) {
      if (tok.kind != Tok::Name) fail("expected generator name");
      std::string first = tok.text;
      int line = tok.line, col = tok.col;
      advance();
      if (accept_punct("..")) {
        if (tok.kind != Tok::Name) fail("expected generator name after '..'");
        std::string last = tok.text;
        advance();
        expand_range(first, last, line, col);
      } else {
        declare_gen(first, line, col);
      }
      if (accept_punct(",")) continue;
      expect_punct(";");
      break;
    }
  }

  // x1..x6 expands to x1, x2, ..., x6 (shared alphabetic prefix, numeric tail).
  void expand_range(const std::string& first, const std::string& last, int line, int col) {
    auto split = [](const std::string& s) -> std::pair<std::string, long long> {
      size_t i = s.size();
      while (i > 0 && std::isdigit(static_cast<unsigned char>(s[i - 1]))) --i;
      if (i == s.size()) return {s, -1};
      return {s.substr(0, i), std::stoll(s.substr(i))};
    };
    auto [p1, n1] = split(first);
    auto [p2, n2] = split(last);
    if (p1 != p2 || n1 < 0 || n2 < n1)
      throw ParseError(line, col, "bad generator range '" + first + ".." + last + "'");
    for (long long k = n1; k <= n2; ++k) declare_gen(p1 + std::to_string(k), line, col);
  }

  Word parse_atom() {
    if (tok.kind == Tok::Int && tok.value == 1) {
      advance();
      return Word{};
    }
    if (tok.kind == Tok::Name) {
      auto it = gen_index.find(tok.text);
      if (it == gen_index.end()) fail("undeclared generator '" + tok.text + "'");
      advance();
      return Word::gen(it->second);
    }
    if (accept_punct("(")) {
      Word w = parse_word();
      expect_punct(")");
      return w;
    }
    if (accept_punct("[")) {
      Word a = parse_word();
      expect_punct(",");
      Word b = parse_word();
      expect_punct("]");
      return Word::commutator_of(a, b);
    }
    fail("expected word");
  }

  Word parse_term() {
    Word base = parse_atom();
    if (accept_punct("^")) {
      if (tok.kind != Tok::Int) fail("expected integer exponent");
      long long e = tok.value;
      advance();
      if (e == 0) return Word{};
      Word w;
      Word b = e < 0 ? base.inverse() : base;
      long long k = e < 0 ? -e : e;
      for (long long i = 0; i < k; ++i) w = w * b;
      return w;
    }
    return base;
  }

  Word parse_word() {
    Word w = parse_term();
    while (accept_punct("*")) w = w * parse_term();
    return w;
  }

  void parse_rel() {
    advance();  // 'rel'
    std::vector<Word> chain;
    chain.push_back(parse_word());
    if (!(tok.kind == Tok::Punct && tok.text == "="))
      fail("expected '=' in relation");
    while (accept_punct("=")) chain.push_back(parse_word());
    expect_punct(";");
    for (size_t i = 0; i + 1 < chain.size(); ++i) {
      Word r = chain[i] * chain[i + 1].inverse();
      if (!r.empty()) pres.relators.push_back(std::move(r));
    }
  }

  void parse_body() {
    bool saw_gens = false;
    while (true) {
      if (at_name("gens")) {
        if (saw_gens) fail("duplicate gens statement");
        saw_gens = true;
        parse_gens();
      } else if (at_name("rel")) {
        if (!saw_gens) fail("rel before gens");
        parse_rel();
      } else {
        break;
      }
    }
    if (!saw_gens) fail("expected gens statement");
  }

  Presentation parse() {
    if (at_name("group")) {
      advance();
      if (tok.kind != Tok::Str) fail("expected quoted label after 'group'");
      pres.label = tok.text;
      advance();
      expect_punct("{");
      parse_body();
      expect_punct("}");
    } else {
      parse_body();
    }
    if (tok.kind != Tok::End) fail("trailing input");
    return std::move(pres);
  }
};

}  // namespace

Presentation parse_presentation(const std::string& text) {
  Parser p(text);
  return p.parse();
}

Word parse_word(const std::vector<std::string>& generator_names,
                const std::string& text) {
  Parser p(text);
  for (size_t i = 0; i < generator_names.size(); ++i) {
    p.gen_index[generator_names[i]] = static_cast<int>(i);
    p.pres.generator_names.push_back(generator_names[i]);
  }
  Word w = p.parse_word();
  if (p.tok.kind != Tok::End) p.fail("trailing input after word");
  return w;
}

}  // namespace kodaira
