#include "doctest.h"
#include "sepwand/error.hpp"
#include "sepwand/parse.hpp"

using namespace sepwand;

namespace {

VarScope scope() {
  VarScope sc;
  sc["p"] = Sort(SortKind::Val);
  sc["v"] = Sort(SortKind::Val);
  sc["t"] = Sort(SortKind::Tree);
  sc["l"] = Sort(SortKind::List);
  sc["c"] = Sort(SortKind::Ctx);
  sc["k"] = Sort(SortKind::Int);
  return sc;
}

Assertion rt(const std::string& s) {
  Assertion a = parse_assertion(read_sexpr(s), scope());
  Assertion b = parse_assertion(read_sexpr(a.str()), scope());
  CHECK(a.str() == b.str());
  return a;
}

}  // namespace

TEST_CASE("terms round-trip through their printed form") {
  VarScope sc = scope();
  const char* cases[] = {
      "p",
      "null",
      "(addr 3)",
      "-7",
      "(field p 1)",
      "E",
      "(T E 1 null E)",
      "(ins t 2 v)",
      "(ctx (lhole 1 null E) (rhole (T E 0 null E) 2 (addr 1)))",
      "(apply c t)",
      "(compose c c)",
      "nil",
      "(cons v l)",
      "(app l l)",
      "(get (tuple 1 2) (path 0))",
      "(set (tuple 1 2) (path 1) 9)",
  };
  for (const char* s : cases) {
    Term t = parse_term(read_sexpr(s), sc);
    Term again = parse_term(read_sexpr(t.str()), sc);
    CHECK(t.str() == again.str());
    CHECK(t.str() == s);
  }
}

TEST_CASE("assertions round-trip and check their sorts") {
  rt("emp");
  rt("(pto p v)");
  rt("(star (pto p v) emp)");
  rt("(wand (pto p v) (pto p v))");
  rt("(forall (x Val) (pto p x))");
  rt("(exists (x Val) (star (pto p x) (pure (= x null))))");
  rt("(pure (and (= p null) (!= v null)))");
  rt("(pure (< k 3) (pto p v))");
  rt("(listrep l p)");
  rt("(lseg l p v)");
  rt("(treebox_rep t p)");
  rt("(pure (search-tree t))");

  CHECK_THROWS_AS(rt("(pto p q)"), ParseError);           // undeclared variable
  CHECK_THROWS_AS(rt("(listrep p l)"), ParseError);       // arguments swapped
  CHECK_THROWS_AS(rt("(frob p)"), ParseError);            // no such form
  CHECK_THROWS_AS(rt("(pto p v"), ParseError);            // unterminated
  CHECK_THROWS_AS(rt("(forall (q^ Val) emp)"), ParseError);  // reserved suffix
}

TEST_CASE("diagnostics carry the line number") {
  try {
    parse_assertion(read_sexpr("(star emp\n  (pto p missing))"), scope());
    FAIL("expected a parse error");
  } catch (const ParseError& pe) {
    CHECK(pe.line == 2);
    CHECK(std::string(pe.what()).find("missing") != std::string::npos);
  }
}

TEST_CASE("entail files declare shapes and variables up front") {
  const char* text =
      "; tiny example file\n"
      "(sorts (pair (int int)))\n"
      "(vars (p Val) (u Agg:pair))\n"
      "(entail (data_at p u) (data_at p u))\n"
      "(entail (pto p null) emp)\n";
  EntailFile f = parse_entail_file(text);
  CHECK(f.vars.size() == 2);
  REQUIRE(f.entailments.size() == 2);
  CHECK(f.entailments[0].first.str() == f.entailments[0].second.str());
  CHECK(f.entailments[1].second.str() == "emp");

  CHECK_THROWS_AS(parse_entail_file("(entail emp)"), ParseError);
  CHECK_THROWS_AS(parse_entail_file("(vars (p Val) (p Int)) (entail emp emp)"),
                  ParseError);
  // same sort twice is fine
  CHECK(parse_entail_file("(vars (p Val) (p Val)) (entail (pto p p) emp)")
            .entailments.size() == 1);
}
