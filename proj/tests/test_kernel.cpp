#include <functional>
#include <string>
#include <vector>

#include "doctest.h"
#include "sepwand/error.hpp"
#include "sepwand/kernel.hpp"
#include "sepwand/oracle.hpp"

using namespace sepwand;

namespace {

const Sort kVal{SortKind::Val};
const Sort kInt{SortKind::Int};
const Sort kTree{SortKind::Tree};
const Sort kList{SortKind::List};

Term V(const char* n) { return Term::var(n, kVal); }

OracleBounds tiny() {
  OracleBounds b;
  b.addr_count = 4;
  b.int_values = {0, 1};
  b.max_tree_depth = 1;
  b.max_list_len = 2;
  b.max_heap_cells = 8;
  return b;
}

// The soundness story: anything the kernel concludes, the bounded
// oracle must not refute.
void oracle_agrees(const Entailment& e) {
  EntailVerdict v = oracle_entails(e.ante(), e.succ(), tiny());
  CHECK_MESSAGE(v.valid, "oracle refutes a checked conclusion: ", e.str());
}

std::string reject_rule(const std::function<void()>& f) {
  try {
    f();
  } catch (const KernelReject& k) {
    return k.rule;
  }
  return "";
}

}  // namespace

TEST_CASE("reflexivity, units, and the adjunction behave as advertised") {
  Assertion A = Assertion::pto(V("p"), V("v"));
  Derivation r = Derivation::entail_refl(A);
  CHECK(check(r) == r.conclusion());
  CHECK(r.conclusion().str() == "(entail (pto p v) (pto p v))");

  Assertion P = Assertion::pto(V("p"), Term::null_lit());
  Assertion Q = Assertion::pto(V("q"), Term::null_lit());
  Derivation adj =
      Derivation::wand_adjoint_2(Derivation::entail_refl(Assertion::star(P, Q)));
  CHECK(adj.conclusion().str() ==
        "(entail (pto p null) (wand (pto q null) (star (pto p null) (pto q "
        "null))))");
  oracle_agrees(check(adj));

  Derivation back = Derivation::wand_adjoint_1(adj);
  CHECK(back.conclusion().str() ==
        "(entail (star (pto p null) (pto q null)) (star (pto p null) (pto q "
        "null)))");

  CHECK(Derivation::emp_unit_elim(A).conclusion().str() ==
        "(entail (star emp (pto p v)) (pto p v))");
  Derivation unit = Derivation::entail_trans(Derivation::emp_unit_intro(A),
                                             Derivation::emp_unit_elim(A));
  CHECK(unit.conclusion().ante() == unit.conclusion().succ());

  Assertion all = Assertion::forall(
      "t", kTree, Assertion::pred("tree_rep", {Term::var("t", kTree), V("p")}));
  Derivation inst = Derivation::forall_elim(all, Term::tree_e());
  CHECK(inst.conclusion().str() ==
        "(entail (forall (t Tree) (tree_rep t p)) (tree_rep E p))");
  CHECK(check(inst) == inst.conclusion());
}

TEST_CASE("applications that do not fit are rejected with the rule named") {
  Assertion A = Assertion::pto(V("p"), V("v"));
  Derivation de = Derivation::entail_refl(Assertion::emp());
  Derivation da = Derivation::entail_refl(A);

  CHECK(reject_rule([&] { Derivation::entail_trans(de, da); }) ==
        "entail_trans");
  CHECK(reject_rule([&] { Derivation::wand_adjoint_1(da); }) ==
        "wand_adjoint_1");
  CHECK(reject_rule([&] { Derivation::wand_adjoint_2(de); }) ==
        "wand_adjoint_2");

  Assertion all = Assertion::forall(
      "t", kTree, Assertion::pred("tree_rep", {Term::var("t", kTree), V("p")}));
  CHECK(reject_rule([&] { Derivation::forall_elim(all, Term::int_lit(1)); }) ==
        "forall_elim");
  CHECK(reject_rule([&] { Derivation::forall_elim(A, Term::tree_e()); }) ==
        "forall_elim");
  CHECK(reject_rule([&] {
          Derivation::forall_elim(all, Term::meta("?t", kTree));
        }) == "forall_elim");

  // Metavariables never make it into a judgment.
  CHECK(reject_rule([&] {
          Derivation::entail_refl(Assertion::pto(Term::meta("?a", kVal),
                                                 Term::null_lit()));
        }) == "entail_refl");

  // A variable used at two sorts across the sides is not a judgment
  // either; star_mono is the easiest way to try to build one.
  Derivation d1 = Derivation::pure_elim(
      Prop::eq(Term::var("x", kInt), Term::int_lit(1)), Assertion::emp());
  Derivation d2 = Derivation::entail_refl(
      Assertion::pto(Term::var("x", kVal), Term::null_lit()));
  CHECK(reject_rule([&] { Derivation::star_mono(d1, d2); }) == "star_mono");

  // Eigenvariable conditions.
  Derivation dx = Derivation::entail_refl(Assertion::pto(V("x"), Term::null_lit()));
  CHECK(reject_rule([&] { Derivation::forall_intro(dx, "x", kVal); }) ==
        "forall_intro");
  CHECK(reject_rule([&] { Derivation::exists_elim(dx, "x", kVal); }) ==
        "exists_elim");

  Derivation open = Derivation::forall_elim(
      Assertion::forall("z", kVal, Assertion::pto(V("z"), Term::null_lit())),
      V("x"));
  CHECK(reject_rule([&] { Derivation::forall_intro(open, "x", kInt); }) ==
        "forall_intro");
  Derivation closed = Derivation::forall_intro(open, "x", kVal);
  CHECK(closed.conclusion().str() ==
        "(entail (forall (z Val) (pto z null)) (forall (x Val) (pto x "
        "null)))");
  oracle_agrees(check(closed));
}

TEST_CASE("quantified wand framing composes from primitives") {
  Term x = V("x");
  Assertion Q = Assertion::pto(V("q"), Term::null_lit());
  Assertion Px = Assertion::pto(x, Term::null_lit());

  // Q |- forall x. (P(x) -* P(x) * Q): frame Q under any P.
  Derivation d1 = Derivation::star_comm(Q, Px);
  Derivation d2 = Derivation::wand_adjoint_2(d1);
  Derivation d3 = Derivation::forall_intro(d2, "x", kVal);
  CHECK(d3.conclusion().str() ==
        "(entail (pto q null) (forall (x Val) (wand (pto x null) (star (pto "
        "x null) (pto q null)))))");
  oracle_agrees(check(d3));

  // P(y) * forall x. (P(x) -* P(x) * Q) |- P(y) * Q: cash it in at y.
  Assertion qa = Assertion::forall(
      "x", kVal,
      Assertion::wand(Assertion::pto(x, Term::null_lit()),
                      Assertion::star(Assertion::pto(x, Term::null_lit()), Q)));
  Assertion Py = Assertion::pto(V("y"), Term::null_lit());
  Assertion R = Assertion::star(Py, Q);
  Assertion w = Assertion::wand(Py, R);

  Derivation e1 = Derivation::forall_elim(qa, V("y"));
  Derivation e2 = Derivation::star_mono(Derivation::entail_refl(Py), e1);
  Derivation c1 = Derivation::star_comm(Py, w);
  Derivation c2 = Derivation::wand_adjoint_1(Derivation::entail_refl(w));
  Derivation e3 = Derivation::entail_trans(c1, c2);
  Derivation e4 = Derivation::entail_trans(e2, e3);
  CHECK(e4.conclusion().str() ==
        "(entail (star (pto y null) (forall (x Val) (wand (pto x null) (star "
        "(pto x null) (pto q null))))) (star (pto y null) (pto q null)))");
  oracle_agrees(check(e4));

  // Checking is deterministic and repeatable.
  for (int i = 0; i < 3; ++i) CHECK(check(e4) == e4.conclusion());
}

TEST_CASE("pure facts move across stars and are asserted only when justified") {
  Prop f = Prop::eq(V("p"), Term::null_lit());
  Assertion B = Assertion::pto(V("q"), Term::null_lit());

  Derivation h = Derivation::pure_hoist(f, Assertion::emp(), B);
  Derivation l = Derivation::pure_lower(f, Assertion::emp(), B);
  CHECK(h.conclusion().str() ==
        "(entail (star (pure (= p null)) (pto q null)) (pure (= p null) (star "
        "emp (pto q null))))");
  Entailment round = Derivation::entail_trans(h, l).conclusion();
  CHECK(round.ante() == round.succ());
  oracle_agrees(check(h));

  CHECK(Derivation::pure_elim(f, B).conclusion().str() ==
        "(entail (pure (= p null) (pto q null)) (pto q null))");

  // Reassert a prefix fact in a different orientation: fine.
  Derivation base = Derivation::pure_elim(f, Assertion::emp());
  Derivation flip =
      Derivation::pure_intro(base, Prop::eq(Term::null_lit(), V("p")));
  CHECK(flip.conclusion().str() ==
        "(entail (pure (= p null)) (pure (= null p)))");
  oracle_agrees(check(flip));

  // A fact from nowhere: rejected. A ground tautology: fine.
  Derivation re = Derivation::entail_refl(Assertion::emp());
  CHECK(reject_rule([&] { Derivation::pure_intro(re, f); }) == "pure_intro");
  Derivation taut = Derivation::pure_intro(
      re, Prop::eq(Term::int_lit(1), Term::int_lit(1)));
  CHECK(taut.conclusion().str() == "(entail emp (pure (= 1 1)))");

  Derivation m = Derivation::pure_mono(Derivation::star_comm(B, Assertion::emp()), f);
  CHECK(m.conclusion().str() ==
        "(entail (pure (= p null) (star (pto q null) emp)) (pure (= p null) "
        "(star emp (pto q null))))");
}

TEST_CASE("rewriting needs a justified equation and respects binders") {
  // Outright: both sides reduce to the same normal form.
  Term from = Term::ins(Term::tree_e(), Term::int_lit(1), Term::null_lit());
  Term to = Term::tree_t(Term::tree_e(), Term::int_lit(1), Term::null_lit(),
                         Term::tree_e());
  Assertion a = Assertion::pred("tree_rep", {from, V("p")});
  Derivation d =
      Derivation::prop_rewrite(Derivation::entail_refl(a), from, to);
  CHECK(d.conclusion().str() ==
        "(entail (tree_rep (ins E 1 null) p) (tree_rep (T E 1 null E) p))");
  oracle_agrees(check(d));

  // Outright equations may rewrite the antecedent too.
  Derivation da =
      Derivation::prop_rewrite(Derivation::entail_refl(a), from, to, true);
  CHECK(da.conclusion().str() ==
        "(entail (tree_rep (T E 1 null E) p) (tree_rep (ins E 1 null) p))");

  // Hypothetical (prefix-entailed) equations may rewrite the
  // succedent only.
  Term tv = Term::var("t", kTree);
  Assertion hyp = Assertion::and_pure(
      Prop::eq(tv, Term::tree_e()), Assertion::pred("tree_rep", {tv, V("p")}));
  Derivation dh = Derivation::prop_rewrite(Derivation::entail_refl(hyp), tv,
                                           Term::tree_e());
  CHECK(dh.conclusion().str() ==
        "(entail (pure (= t E) (tree_rep t p)) (pure (= E E) (tree_rep E "
        "p)))");
  oracle_agrees(check(dh));
  CHECK(reject_rule([&] {
          Derivation::prop_rewrite(Derivation::entail_refl(hyp), tv,
                                   Term::tree_e(), true);
        }) == "prop_rewrite");

  // No justification at all, and mismatched sorts.
  CHECK(reject_rule([&] {
          Derivation::prop_rewrite(Derivation::entail_refl(a), V("p"), V("q"));
        }) == "prop_rewrite");
  CHECK(reject_rule([&] {
          Derivation::prop_rewrite(Derivation::entail_refl(a), Term::int_lit(1),
                                   Term::null_lit());
        }) == "prop_rewrite");

  // app(l, nil) = l holds outright, but occurrences under a binder
  // that captures l stay put.
  Term lv = Term::var("l", kList);
  Term redex = Term::list_app(lv, Term::list_nil());
  Assertion open_occ = Assertion::pred("listrep", {redex, V("p")});
  Assertion bound_occ = Assertion::forall(
      "l", kList, Assertion::pred("listrep", {redex, V("p")}));
  Derivation db = Derivation::prop_rewrite(
      Derivation::entail_refl(Assertion::star(open_occ, bound_occ)), redex, lv);
  CHECK(db.conclusion().str() ==
        "(entail (star (listrep (app l nil) p) (forall (l List) (listrep "
        "(app l nil) p))) (star (listrep l p) (forall (l List) (listrep (app "
        "l nil) p))))");
}

TEST_CASE("unfolding tracks the definition and keeps nested binders apart") {
  Assertion nil_occ =
      Assertion::pred("listrep", {Term::list_nil(), V("p")});
  Derivation u = Derivation::pred_unfold(nil_occ);
  CHECK(u.conclusion().str() ==
        "(entail (listrep nil p) (pure (= p null)))");
  Derivation f = Derivation::pred_fold(nil_occ);
  Entailment round = Derivation::entail_trans(u, f).conclusion();
  CHECK(round.ante() == round.succ());
  oracle_agrees(check(u));

  CHECK(Derivation::pred_unfold(
            Assertion::pred("tree_rep", {Term::tree_e(), V("p")}))
            .conclusion()
            .str() == "(entail (tree_rep E p) (pure (= p null)))");

  // An occurrence whose pointer argument is itself a previous
  // unfold's binder name: the definition's own q^ must get out of
  // the way instead of capturing it.
  Assertion occ2 = Assertion::pred(
      "listrep",
      {Term::list_cons(V("h"), Term::var("l", kList)), Term::var("q^", kVal)});
  Assertion body = Derivation::pred_unfold(occ2).conclusion().succ();
  CHECK(occurs_free("q^", body));
  REQUIRE(body.kind() == Ak::Star);
  REQUIRE(body.kids()[1].kind() == Ak::Exists);
  CHECK(body.kids()[1].binder() != "q^");
  EntailVerdict both = oracle_entails(occ2, body, tiny());
  CHECK(both.valid);
  EntailVerdict back = oracle_entails(body, occ2, tiny());
  CHECK(back.valid);

  // Not constructor-headed: no unfolding step exists.
  CHECK(reject_rule([&] {
          Derivation::pred_unfold(
              Assertion::pred("listrep", {Term::var("l", kList), V("p")}));
        }) == "pred_unfold");
}

TEST_CASE("traces print one rule per line and parse back") {
  Term x = V("x");
  Assertion Q = Assertion::pto(V("q"), Term::null_lit());
  Assertion Px = Assertion::pto(x, Term::null_lit());
  Derivation d3 = Derivation::forall_intro(
      Derivation::wand_adjoint_2(Derivation::star_comm(Q, Px)), "x", kVal);

  std::string text = d3.trace();
  CHECK(text ==
        "forall_intro x Val\n"
        "  wand_adjoint_2\n"
        "    star_comm (pto q null) (pto x null)\n");

  // x is scoped by its own line; only q comes from outside.
  VarScope sc;
  sc["q"] = kVal;
  Derivation d4 = trace_parse(text, sc);
  CHECK(check(d4) == check(d3));

  // A larger tree with elimination, rewriting, and pure movement.
  Assertion qa = Assertion::forall(
      "x", kVal,
      Assertion::wand(Assertion::pto(x, Term::null_lit()),
                      Assertion::star(Assertion::pto(x, Term::null_lit()), Q)));
  Assertion Py = Assertion::pto(V("y"), Term::null_lit());
  Assertion w = Assertion::wand(Py, Assertion::star(Py, Q));
  Derivation e4 = Derivation::entail_trans(
      Derivation::star_mono(Derivation::entail_refl(Py),
                            Derivation::forall_elim(qa, V("y"))),
      Derivation::entail_trans(
          Derivation::star_comm(Py, w),
          Derivation::wand_adjoint_1(Derivation::entail_refl(w))));
  VarScope sc2;
  sc2["q"] = kVal;
  sc2["y"] = kVal;
  Derivation e5 = trace_parse(e4.trace(), sc2);
  CHECK(e5.conclusion() == e4.conclusion());
  CHECK(e5.trace() == e4.trace());

  // Node count shows up as line count.
  int lines = 0;
  for (char c : e4.trace())
    if (c == '\n') ++lines;
  CHECK(lines == 8);

  CHECK_THROWS_AS(trace_parse("bogus_rule emp\n", sc), ParseError);
  CHECK_THROWS_AS(trace_parse("entail_trans\n  entail_refl emp\n", sc),
                  ParseError);
  CHECK_THROWS_AS(trace_parse("entail_refl emp\n    entail_refl emp\n", sc),
                  ParseError);
  CHECK_THROWS_AS(
      trace_parse("entail_refl emp\nentail_refl emp\n", sc), ParseError);
  try {
    trace_parse("entail_refl emp\n  entail_refl (pto p v)\n", sc);
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }
}
