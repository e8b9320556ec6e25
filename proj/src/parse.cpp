#include "sepwand/parse.hpp"

#include <cctype>
#include <cstdlib>

#include "sepwand/error.hpp"
#include "sepwand/preds.hpp"

namespace sepwand {

namespace {

struct Lexer {
  const std::string& s;
  size_t i = 0;
  int line = 1;
  int col = 1;

  explicit Lexer(const std::string& text) : s(text) {}

  void bump(char c) {
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }

  void skip_space() {
    while (i < s.size()) {
      char c = s[i];
      if (c == ';') {  // comment to end of line
        while (i < s.size() && s[i] != '\n') {
          bump(s[i]);
          ++i;
        }
        continue;
      }
      if (!std::isspace((unsigned char)c)) return;
      bump(c);
      ++i;
    }
  }

  bool atom_char(char c) const {
    return !std::isspace((unsigned char)c) && c != '(' && c != ')' && c != ';';
  }

  // Reads one atom. "Agg:(...)" sorts embed spaces and parens in
  // their printed form, so an atom that reaches "Agg:(" swallows the
  // balanced group to keep such sorts a single token.
  std::string read_atom() {
    std::string out;
    while (i < s.size() && atom_char(s[i])) {
      out += s[i];
      bump(s[i]);
      ++i;
      if (out.size() >= 4 && out.compare(out.size() - 4, 4, "Agg:") == 0 &&
          i < s.size() && s[i] == '(') {
        int depth = 0;
        do {
          char c = s[i];
          if (c == '(') ++depth;
          if (c == ')') --depth;
          out += c;
          bump(c);
          ++i;
        } while (i < s.size() && depth > 0);
        if (depth > 0) throw ParseError(line, "unterminated aggregate sort");
      }
    }
    return out;
  }
};

Sexpr read_one(Lexer& lx) {
  lx.skip_space();
  if (lx.i >= lx.s.size()) throw ParseError(lx.line, "unexpected end of input");
  Sexpr e;
  e.line = lx.line;
  e.col = lx.col;
  if (lx.s[lx.i] == ')')
    throw ParseError(lx.line, "unexpected ')' at column " + std::to_string(lx.col));
  if (lx.s[lx.i] == '(') {
    lx.bump('(');
    ++lx.i;
    e.atom = false;
    while (true) {
      lx.skip_space();
      if (lx.i >= lx.s.size()) throw ParseError(e.line, "unterminated '(' here");
      if (lx.s[lx.i] == ')') {
        lx.bump(')');
        ++lx.i;
        return e;
      }
      e.items.push_back(read_one(lx));
    }
  }
  e.text = lx.read_atom();
  if (e.text.empty())
    throw ParseError(lx.line, "stray character at column " + std::to_string(lx.col));
  return e;
}

[[noreturn]] void fail(const Sexpr& e, const std::string& msg) {
  throw ParseError(e.line, msg + " at column " + std::to_string(e.col));
}

const std::string& head(const Sexpr& e) {
  if (e.atom || e.items.empty() || !e.items[0].atom)
    fail(e, "expected a (head ...) form");
  return e.items[0].text;
}

void expect_n(const Sexpr& e, size_t n, const char* what) {
  if (e.items.size() != n + 1)
    fail(e, std::string(what) + " takes " + std::to_string(n) + " arguments, got " +
                std::to_string(e.items.size() - 1));
}

bool integer_atom(const std::string& t) {
  size_t k = (t.size() > 1 && (t[0] == '-' || t[0] == '+')) ? 1 : 0;
  if (k == t.size()) return false;
  for (; k < t.size(); ++k)
    if (!std::isdigit((unsigned char)t[k])) return false;
  return true;
}

uint32_t small_nat(const Sexpr& e, const char* what) {
  if (!e.atom || !integer_atom(e.text) || e.text[0] == '-')
    fail(e, std::string(what) + " must be a nonnegative integer");
  long v = std::strtol(e.text.c_str(), nullptr, 10);
  return (uint32_t)v;
}

PathV parse_path(const Sexpr& e) {
  if (e.atom || e.items.empty() || !e.items[0].atom || e.items[0].text != "path")
    fail(e, "expected (path i j ...)");
  PathV p;
  for (size_t i = 1; i < e.items.size(); ++i)
    p.push_back(small_nat(e.items[i], "path index"));
  return p;
}

}  // namespace

bool valid_user_name(const std::string& name) {
  if (name.empty()) return false;
  if (!std::isalpha((unsigned char)name[0]) && name[0] != '_') return false;
  for (char c : name) {
    if (std::isalnum((unsigned char)c) || c == '_' || c == '\'') continue;
    return false;
  }
  return true;
}

std::vector<Sexpr> read_sexprs(const std::string& text) {
  Lexer lx(text);
  std::vector<Sexpr> out;
  while (true) {
    lx.skip_space();
    if (lx.i >= lx.s.size()) return out;
    out.push_back(read_one(lx));
  }
}

Sexpr read_sexpr(const std::string& text) {
  auto all = read_sexprs(text);
  if (all.size() != 1)
    throw ParseError(all.empty() ? 1 : all[1].line,
                     "expected exactly one expression, got " + std::to_string(all.size()));
  return all[0];
}

Sort parse_sort_node(const Sexpr& e) {
  if (!e.atom) fail(e, "expected a sort name");
  try {
    return parse_sort(e.text);
  } catch (const ParseError& pe) {
    fail(e, pe.what());
  }
}

Term parse_term(const Sexpr& e, const VarScope& sc) {
  if (e.atom) {
    const std::string& t = e.text;
    if (t == "null") return Term::null_lit();
    if (t == "E") return Term::tree_e();
    if (t == "nil") return Term::list_nil();
    if (integer_atom(t)) return Term::int_lit(std::strtoll(t.c_str(), nullptr, 10));
    auto it = sc.find(t);
    if (it == sc.end()) {
      if (!valid_user_name(t)) fail(e, "'" + t + "' is not a usable identifier");
      fail(e, "undeclared variable '" + t + "'");
    }
    return Term::var(t, it->second);
  }
  const std::string& h = head(e);
  auto sub = [&](size_t i) { return parse_term(e.items[i], sc); };
  if (h == "addr") {
    expect_n(e, 1, "addr");
    return Term::addr_lit(small_nat(e.items[1], "address"));
  }
  if (h == "field") {
    expect_n(e, 2, "field");
    return Term::field(sub(1), small_nat(e.items[2], "field offset"));
  }
  if (h == "T") {
    expect_n(e, 4, "T");
    return Term::tree_t(sub(1), sub(2), sub(3), sub(4));
  }
  if (h == "ins") {
    expect_n(e, 3, "ins");
    return Term::ins(sub(1), sub(2), sub(3));
  }
  if (h == "ctx") {
    std::vector<CtxFrameT> frames;
    for (size_t i = 1; i < e.items.size(); ++i) {
      const Sexpr& f = e.items[i];
      const std::string& fh = head(f);
      if (fh == "lhole") {
        expect_n(f, 3, "lhole");
        frames.push_back(lhole(parse_term(f.items[1], sc), parse_term(f.items[2], sc),
                               parse_term(f.items[3], sc)));
      } else if (fh == "rhole") {
        expect_n(f, 3, "rhole");
        frames.push_back(rhole(parse_term(f.items[1], sc), parse_term(f.items[2], sc),
                               parse_term(f.items[3], sc)));
      } else {
        fail(f, "context frame must be (lhole k v t) or (rhole t k v)");
      }
    }
    return Term::ctx(frames);
  }
  if (h == "apply") {
    expect_n(e, 2, "apply");
    return Term::apply(sub(1), sub(2));
  }
  if (h == "compose") {
    expect_n(e, 2, "compose");
    return Term::compose(sub(1), sub(2));
  }
  if (h == "cons") {
    expect_n(e, 2, "cons");
    return Term::list_cons(sub(1), sub(2));
  }
  if (h == "app") {
    expect_n(e, 2, "app");
    return Term::list_app(sub(1), sub(2));
  }
  if (h == "tuple") {
    std::vector<Term> fields;
    for (size_t i = 1; i < e.items.size(); ++i) fields.push_back(sub(i));
    return Term::tuple(fields);
  }
  if (h == "get") {
    expect_n(e, 2, "get");
    return Term::get(sub(1), parse_path(e.items[2]));
  }
  if (h == "set") {
    expect_n(e, 3, "set");
    return Term::set(sub(1), parse_path(e.items[2]), sub(3));
  }
  if (h == "update") {
    expect_n(e, 3, "update");
    return Term::map_upd(sub(1), sub(2), sub(3));
  }
  fail(e, "unknown term form '" + h + "'");
}

Prop parse_prop(const Sexpr& e, const VarScope& sc) {
  if (e.atom) {
    if (e.text == "true") return Prop::true_();
    if (e.text == "false") return Prop::false_();
    fail(e, "unknown proposition '" + e.text + "'");
  }
  const std::string& h = head(e);
  auto t = [&](size_t i) { return parse_term(e.items[i], sc); };
  auto p = [&](size_t i) { return parse_prop(e.items[i], sc); };
  if (h == "=") {
    expect_n(e, 2, "=");
    return Prop::eq(t(1), t(2));
  }
  if (h == "!=") {
    expect_n(e, 2, "!=");
    return Prop::neq(t(1), t(2));
  }
  if (h == "<") {
    expect_n(e, 2, "<");
    return Prop::lt(t(1), t(2));
  }
  if (h == "and") {
    expect_n(e, 2, "and");
    return Prop::and_(p(1), p(2));
  }
  if (h == "or") {
    expect_n(e, 2, "or");
    return Prop::or_(p(1), p(2));
  }
  if (h == "not") {
    expect_n(e, 1, "not");
    return Prop::not_(p(1));
  }
  if (h == "search-tree") {
    expect_n(e, 1, "search-tree");
    return Prop::search_tree(t(1));
  }
  if (h == "abs") {
    expect_n(e, 2, "abs");
    return Prop::abs(t(1), t(2));
  }
  fail(e, "unknown proposition form '" + h + "'");
}

namespace {

std::pair<std::string, Sort> parse_binder(const Sexpr& e) {
  if (e.atom || e.items.size() != 2 || !e.items[0].atom)
    fail(e, "binder must be (name Sort)");
  const std::string& n = e.items[0].text;
  if (!valid_user_name(n)) fail(e.items[0], "'" + n + "' is not a usable binder name");
  return {n, parse_sort_node(e.items[1])};
}

}  // namespace

Assertion parse_assertion(const Sexpr& e, const VarScope& sc) {
  if (e.atom) {
    if (e.text == "emp") return Assertion::emp();
    fail(e, "unknown assertion '" + e.text + "'");
  }
  const std::string& h = head(e);
  auto a = [&](size_t i) { return parse_assertion(e.items[i], sc); };
  if (h == "pto") {
    expect_n(e, 2, "pto");
    return Assertion::pto(parse_term(e.items[1], sc), parse_term(e.items[2], sc));
  }
  if (h == "star") {
    expect_n(e, 2, "star");
    return Assertion::star(a(1), a(2));
  }
  if (h == "wand") {
    expect_n(e, 2, "wand");
    return Assertion::wand(a(1), a(2));
  }
  if (h == "forall" || h == "exists") {
    expect_n(e, 2, h.c_str());
    auto [name, sort] = parse_binder(e.items[1]);
    VarScope inner = sc;
    inner[name] = sort;
    Assertion body = parse_assertion(e.items[2], inner);
    return h == "forall" ? Assertion::forall(name, sort, body)
                         : Assertion::exists(name, sort, body);
  }
  if (h == "pure") {
    if (e.items.size() != 2 && e.items.size() != 3)
      fail(e, "pure takes a proposition and an optional body");
    Prop p = parse_prop(e.items[1], sc);
    Assertion body = e.items.size() == 3 ? a(2) : Assertion::emp();
    return Assertion::and_pure(p, body);
  }
  if (pred_lookup(h)) {
    std::vector<Term> args;
    for (size_t i = 1; i < e.items.size(); ++i) args.push_back(parse_term(e.items[i], sc));
    try {
      return Assertion::pred(h, args);
    } catch (const SortError& se) {
      fail(e, se.what());
    }
  }
  fail(e, "unknown assertion form '" + h + "'");
}

namespace {

int parse_shape_node(const Sexpr& e) {
  if (e.atom) {
    if (e.text == "int") return agg_shape_int();
    if (e.text == "val") return agg_shape_val();
    int id = lookup_agg_name(e.text);
    if (id < 0) fail(e, "unknown aggregate shape '" + e.text + "'");
    return id;
  }
  std::vector<int> fields;
  for (const Sexpr& f : e.items) fields.push_back(parse_shape_node(f));
  if (fields.empty()) fail(e, "aggregate shape needs at least one field");
  return agg_shape_tuple(fields);
}

}  // namespace

EntailFile parse_entail_file(const std::string& text) {
  EntailFile out;
  for (const Sexpr& e : read_sexprs(text)) {
    const std::string& h = head(e);
    if (h == "sorts") {
      for (size_t i = 1; i < e.items.size(); ++i) {
        const Sexpr& d = e.items[i];
        if (d.atom || d.items.size() != 2 || !d.items[0].atom)
          fail(d, "sorts entry must be (name shape)");
        if (!valid_user_name(d.items[0].text))
          fail(d.items[0], "'" + d.items[0].text + "' is not a usable shape name");
        register_agg_name(d.items[0].text, parse_shape_node(d.items[1]));
      }
      continue;
    }
    if (h == "vars") {
      for (size_t i = 1; i < e.items.size(); ++i) {
        auto [name, sort] = parse_binder(e.items[i]);
        auto [it, fresh] = out.vars.emplace(name, sort);
        if (!fresh && !(it->second == sort))
          fail(e.items[i], "variable '" + name + "' redeclared at a different sort");
      }
      continue;
    }
    if (h == "entail") {
      expect_n(e, 2, "entail");
      Assertion ante = parse_assertion(e.items[1], out.vars);
      Assertion succ = parse_assertion(e.items[2], out.vars);
      out.entailments.emplace_back(std::move(ante), std::move(succ));
      continue;
    }
    fail(e, "expected a sorts, vars or entail form, found '" + h + "'");
  }
  return out;
}

}  // namespace sepwand
