#include <algorithm>

#include "doctest.h"
#include "sepwand/oracle.hpp"
#include "sepwand/preds.hpp"

using namespace sepwand;

namespace {

OracleBounds tiny() {
  OracleBounds b;
  b.addr_count = 4;
  b.int_values = {0, 1};
  b.max_tree_depth = 1;
  b.max_list_len = 2;
  b.max_heap_cells = 8;
  return b;
}

Term val_var(const char* n) { return Term::var(n, SortKind::Val); }
Term list_var(const char* n) { return Term::var(n, SortKind::List); }

Heap mk(std::initializer_list<std::pair<uint32_t, Value>> cells) {
  Heap h;
  for (const auto& [a, v] : cells) h.set(a, v);
  return h;
}

}  // namespace

TEST_CASE("sort universes are bounded and deterministic") {
  OracleBounds b = tiny();
  CHECK(enumerate_sort(SortKind::Val, b).size() == 5);  // null + 4 addresses
  CHECK(enumerate_sort(SortKind::Int, b).size() == 2);

  OracleBounds one;
  one.int_values = {0};
  one.payload_values = {Value::null()};
  one.max_tree_depth = 1;
  auto small_trees = enumerate_sort(SortKind::Tree, one);
  REQUIRE(small_trees.size() == 2);
  CHECK(small_trees[0].tree() == nullptr);
  CHECK(small_trees[1].tree()->key == 0);

  OracleBounds two = one;
  two.int_values = {0, 1};
  two.max_tree_depth = 2;
  CHECK(enumerate_sort(SortKind::Tree, two).size() == 19);

  CHECK(enumerate_sort(SortKind::List, b).size() == 31);  // 1 + 5 + 25

  // context spines: empty, or one frame (2 sides x 2 keys x 5 payloads)
  CHECK(enumerate_sort(SortKind::Ctx, b).size() == 21);
  for (const CVal& c : enumerate_sort(SortKind::Ctx, b))
    CHECK(tree_depth(ctx_apply(c.ctx(), nullptr)) <= b.max_tree_depth);

  int s1 = agg_shape_tuple(std::vector<int>(5, agg_shape_int()));
  CHECK(enumerate_sort(Sort::agg(s1), b).size() == 32);  // 2^5 leaf choices

  CHECK_THROWS_AS(enumerate_sort(SortKind::Path, b), EnumError);
  CHECK_THROWS_AS(enumerate_sort(SortKind::Map, b), EnumError);

  OracleBounds padded = b;
  padded.payload_values = {Value::null(), Value::addr(1)};
  CHECK(enumerate_sort(SortKind::Val, padded).size() == 2);
}

TEST_CASE("satisfaction of the core connectives") {
  OracleBounds b;  // defaults
  Env env;

  Assertion cell = Assertion::pto(Term::addr_lit(1), Term::int_lit(7));
  CHECK(satisfies(mk({{1, Value::of_int(7)}}), env, cell, b));
  CHECK_FALSE(satisfies(mk({{1, Value::of_int(8)}}), env, cell, b));
  CHECK_FALSE(satisfies(Heap{}, env, cell, b));
  CHECK_FALSE(satisfies(mk({{1, Value::of_int(7)}, {2, Value::null()}}), env, cell, b));

  CHECK(satisfies(Heap{}, env, Assertion::emp(), b));
  CHECK_FALSE(satisfies(mk({{1, Value::null()}}), env, Assertion::emp(), b));

  // the empty heap satisfies p |-> v -* p |-> v
  CHECK(satisfies(Heap{}, env, Assertion::wand(cell, cell), b));

  Assertion pair = Assertion::star(cell, Assertion::pto(Term::addr_lit(3), Term::null_lit()));
  CHECK(satisfies(mk({{1, Value::of_int(7)}, {3, Value::null()}}), env, pair, b));
  CHECK_FALSE(satisfies(mk({{1, Value::of_int(7)}}), env, pair, b));

  CHECK(satisfies(Heap{}, env, Assertion::pure(Prop::eq(Term::int_lit(1), Term::int_lit(1))), b));
  CHECK_FALSE(satisfies(Heap{}, env, Assertion::pure(Prop::eq(Term::int_lit(1), Term::int_lit(2))), b));

  Term x = val_var("x");
  Assertion some = Assertion::exists("x", SortKind::Val, Assertion::pto(Term::addr_lit(1), x));
  CHECK(satisfies(mk({{1, Value::addr(2)}}), env, some, b));
  CHECK_FALSE(satisfies(mk({{1, Value::addr(2)}, {2, Value::null()}}), env, some, b));

  OracleBounds t = tiny();
  Term k = Term::var("k", SortKind::Int);
  Assertion twovalued = Assertion::forall(
      "k", SortKind::Int,
      Assertion::pure(Prop::or_(Prop::eq(k, Term::int_lit(0)), Prop::eq(k, Term::int_lit(1)))));
  CHECK(satisfies(Heap{}, env, twovalued, t));

  Assertion unit = Assertion::pred(
      "listrep", {Term::list_cons(Term::null_lit(), Term::list_nil()), Term::addr_lit(1)});
  CHECK(satisfies(mk({{1, Value::null()}, {2, Value::null()}}), env, unit, b));
  CHECK_FALSE(satisfies(mk({{1, Value::null()}, {2, Value::addr(3)}}), env, unit, b));
}

TEST_CASE("list segments hold on chains and on heaps occupying the end") {
  OracleBounds b = tiny();
  b.addr_count = 5;
  Env env;
  env["l"] = CVal(ListValV{Value::null()});
  env["p"] = CVal(Value::addr(1));
  env["q"] = CVal(Value::addr(3));
  Assertion seg = Assertion::pred("lseg", {list_var("l"), val_var("p"), val_var("q")});

  CHECK(satisfies(mk({{1, Value::null()}, {2, Value::addr(3)}}), env, seg, b));
  CHECK(satisfies(mk({{3, Value::null()}}), env, seg, b));   // blocks every continuation
  CHECK(satisfies(mk({{4, Value::null()}}), env, seg, b));   // same, via the tail cell
  CHECK_FALSE(satisfies(Heap{}, env, seg, b));
  CHECK_FALSE(satisfies(
      mk({{1, Value::null()}, {2, Value::addr(3)}, {5, Value::null()}}), env, seg, b));

  Env same;
  same["l"] = CVal(ListValV{});
  same["p"] = CVal(Value::addr(1));
  same["q"] = CVal(Value::addr(1));
  Assertion empty_seg = Assertion::pred("lseg", {list_var("l"), val_var("p"), val_var("q")});
  CHECK(satisfies(Heap{}, same, empty_seg, b));
}

TEST_CASE("segment atoms and their wand unfolding are equisatisfiable") {
  OracleBounds b = tiny();
  Term l = list_var("l");
  Term p = val_var("p");
  Term q = val_var("q");
  Term zs = list_var("zs");
  Assertion atom = Assertion::pred("lseg", {l, p, q});
  Assertion unfolded = Assertion::forall(
      "zs", SortKind::List,
      Assertion::wand(Assertion::pred("listrep", {zs, q}),
                      Assertion::pred("listrep", {Term::list_app(l, zs), p})));
  CHECK(oracle_entails(atom, unfolded, b).valid);
  CHECK(oracle_entails(unfolded, atom, b).valid);
}

TEST_CASE("counter-models are minimal, reproducible, and re-verify") {
  OracleBounds b = tiny();
  Assertion cell = Assertion::pto(val_var("p"), val_var("v"));

  EntailVerdict v = oracle_entails(cell, Assertion::emp(), b);
  REQUIRE_FALSE(v.valid);
  CHECK(v.heap.size() == 1);
  CHECK(v.heap.present(1));
  CHECK(v.heap.at(1).is_null());
  CHECK(v.env.at("p").value() == Value::addr(1));
  CHECK(v.env.at("v").value() == Value::null());
  CHECK(satisfies(v.heap, v.env, cell, b));
  CHECK_FALSE(satisfies(v.heap, v.env, Assertion::emp(), b));

  EntailVerdict w = oracle_entails(cell, Assertion::emp(), b);
  CHECK(w.heap == v.heap);
  CHECK(w.env == v.env);
  CHECK(w.note == v.note);

  CHECK(oracle_entails(cell, cell, b).valid);
  Assertion other = Assertion::pto(val_var("q"), val_var("w"));
  CHECK(oracle_entails(Assertion::star(cell, other), Assertion::star(other, cell), b).valid);
  CHECK_FALSE(oracle_entails(cell, Assertion::star(cell, cell), b).valid);

  CHECK(oracle_entails(cell, Assertion::emp(), b).note.empty());
  Assertion wand = Assertion::wand(cell, cell);
  CHECK_FALSE(oracle_entails(Assertion::emp(), wand, b).note.empty());
}

TEST_CASE("naive segment concatenation fails on a two-node cycle") {
  OracleBounds b = tiny();
  Term l1 = list_var("l1");
  Term l2 = list_var("l2");
  Term p = val_var("p");
  Term q = val_var("q");
  Term r = val_var("r");
  Assertion ante =
      Assertion::star(Assertion::pred("lseg_smallfoot", {l1, p, q}),
                      Assertion::pred("lseg_smallfoot", {l2, q, r}));
  Assertion succ = Assertion::pred("lseg_smallfoot", {Term::list_app(l1, l2), p, r});

  EntailVerdict v = oracle_entails(ante, succ, b);
  REQUIRE_FALSE(v.valid);
  CHECK(v.heap == mk({{1, Value::null()},
                      {2, Value::addr(3)},
                      {3, Value::null()},
                      {4, Value::addr(1)}}));
  CHECK(v.env.at("p").value() == Value::addr(1));
  CHECK(v.env.at("q").value() == Value::addr(3));
  CHECK(v.env.at("r").value() == Value::addr(1));
  CHECK(v.env.at("l1").list() == ListValV{Value::null()});
  CHECK(v.env.at("l2").list() == ListValV{Value::null()});
  CHECK(satisfies(v.heap, v.env, ante, b));
  CHECK_FALSE(satisfies(v.heap, v.env, succ, b));
}

TEST_CASE("wand-defined segments do concatenate at bounds") {
  OracleBounds b = tiny();
  Term l1 = list_var("l1");
  Term l2 = list_var("l2");
  Term l3 = list_var("l3");
  Term p = val_var("p");
  Term q = val_var("q");
  Term r = val_var("r");

  Assertion trans_ante = Assertion::star(Assertion::pred("lseg", {l1, p, q}),
                                         Assertion::pred("lseg", {l2, q, r}));
  Assertion trans_succ = Assertion::pred("lseg", {Term::list_app(l1, l2), p, r});
  EntailVerdict t = oracle_entails(trans_ante, trans_succ, b);
  CHECK(t.valid);
  CHECK_FALSE(t.note.empty());

  Assertion weak_ante =
      Assertion::star(trans_ante, Assertion::pred("listrep", {l3, r}));
  Assertion weak_succ = Assertion::pred(
      "listrep", {Term::list_app(l1, Term::list_app(l2, l3)), p});
  CHECK(oracle_entails(weak_ante, weak_succ, b).valid);
}

TEST_CASE("closed quantified-wand instances validate") {
  OracleBounds b = tiny();
  Term x = val_var("x");
  Assertion q_part = Assertion::pto(Term::addr_lit(3), Term::int_lit(0));
  Assertion px = Assertion::pto(Term::addr_lit(1), x);

  // adding a frame under a fresh binder
  Assertion intro_succ = Assertion::forall(
      "x", SortKind::Val, Assertion::wand(px, Assertion::star(px, q_part)));
  CHECK(oracle_entails(q_part, intro_succ, b).valid);

  // applying the quantified wand to a present instance
  Assertion elim_ante = Assertion::star(
      Assertion::pto(Term::addr_lit(1), Term::null_lit()),
      Assertion::forall("x", SortKind::Val,
                        Assertion::wand(px, Assertion::star(px, q_part))));
  Assertion elim_succ =
      Assertion::star(Assertion::pto(Term::addr_lit(1), Term::null_lit()), q_part);
  CHECK(oracle_entails(elim_ante, elim_succ, b).valid);

  // composing two quantified wands side by side
  Assertion p2x = Assertion::pto(Term::addr_lit(2), x);
  Assertion hor_ante = Assertion::star(
      Assertion::forall("x", SortKind::Val,
                        Assertion::wand(px, Assertion::star(px, q_part))),
      Assertion::forall("x", SortKind::Val, Assertion::wand(p2x, p2x)));
  Assertion hor_succ = Assertion::forall(
      "x", SortKind::Val,
      Assertion::wand(Assertion::star(px, p2x),
                      Assertion::star(Assertion::star(px, q_part), p2x)));
  CHECK(oracle_entails(hor_ante, hor_succ, b).valid);

  // chaining quantified wands
  Assertion rx = Assertion::star(Assertion::star(px, q_part),
                                 Assertion::pto(Term::addr_lit(4), Term::int_lit(1)));
  Assertion ver_ante = Assertion::star(
      Assertion::forall("x", SortKind::Val,
                        Assertion::wand(px, Assertion::star(px, q_part))),
      Assertion::forall("x", SortKind::Val,
                        Assertion::wand(Assertion::star(px, q_part), rx)));
  Assertion ver_succ =
      Assertion::forall("x", SortKind::Val, Assertion::wand(px, rx));
  CHECK(oracle_entails(ver_ante, ver_succ, b).valid);

  // specializing the index to a constant
  Assertion pn = Assertion::pto(Term::addr_lit(1), Term::null_lit());
  Assertion refine_succ = Assertion::forall(
      "y", SortKind::Val, Assertion::wand(pn, Assertion::star(pn, q_part)));
  Assertion refine_ante = Assertion::forall(
      "x", SortKind::Val, Assertion::wand(px, Assertion::star(px, q_part)));
  CHECK(oracle_entails(refine_ante, refine_succ, b).valid);
}

TEST_CASE("free variables are collected with their sorts") {
  Assertion a = Assertion::star(
      Assertion::pto(val_var("p"), val_var("v")),
      Assertion::exists("v", SortKind::Val,
                        Assertion::pred("listrep", {list_var("l"), val_var("v")})));
  auto fvs = free_vars_sorted(a);
  REQUIRE(fvs.size() == 3);
  CHECK(fvs[0].first == "l");
  CHECK(fvs[0].second == Sort(SortKind::List));
  CHECK(fvs[1].first == "p");
  CHECK(fvs[2].first == "v");

  Assertion clash = Assertion::star(
      Assertion::pto(val_var("p"), val_var("p")),
      Assertion::pure(Prop::eq(Term::var("p", SortKind::Int), Term::int_lit(0))));
  CHECK_THROWS_AS(free_vars_sorted(clash), SortError);
}

TEST_CASE("model enumeration matches satisfaction") {
  OracleBounds b = tiny();
  Env env;
  env["l"] = CVal(ListValV{Value::null()});
  env["p"] = CVal(Value::addr(1));
  env["q"] = CVal(Value::addr(3));

  Assertion shaped = Assertion::star(
      Assertion::pto(val_var("p"), Term::null_lit()),
      Assertion::pred("listrep", {list_var("l"), val_var("q")}));
  auto ms = models(shaped, env, b);
  REQUIRE(ms.size() == 1);
  CHECK(ms[0] == mk({{1, Value::null()}, {3, Value::null()}, {4, Value::null()}}));

  // The wand-shaped segment goes through the scan-everything path, so
  // this count independently pins down the family construction: one
  // proper chain plus every heap (up to 3 cells here) touching the
  // end's two cells.
  OracleBounds small = b;
  small.max_heap_cells = 3;
  Assertion seg = Assertion::pred("lseg", {list_var("l"), val_var("p"), val_var("q")});
  auto segms = models(seg, env, small);
  CHECK(segms.size() == 636);
  for (const Heap& h : segms) CHECK(satisfies(h, env, seg, small));
  CHECK(std::find(segms.begin(), segms.end(),
                  mk({{1, Value::null()}, {2, Value::addr(3)}})) != segms.end());
}
