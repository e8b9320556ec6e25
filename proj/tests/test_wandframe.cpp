#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "sepwand/error.hpp"
#include "sepwand/oracle.hpp"
#include "sepwand/wandframe.hpp"

using namespace sepwand;

namespace {

const Sort kVal{SortKind::Val};
const Sort kTree{SortKind::Tree};

Term V(const char* n) { return Term::var(n, kVal); }

Assertion cell(const char* p) {
  return Assertion::pto(V(p), Term::null_lit());
}

OracleBounds tiny() {
  OracleBounds b;
  b.addr_count = 4;
  b.int_values = {0, 1};
  b.max_tree_depth = 1;
  b.max_list_len = 2;
  b.max_heap_cells = 8;
  return b;
}

void oracle_agrees(const Entailment& e, const OracleBounds& b) {
  EntailVerdict v = oracle_entails(e.ante(), e.succ(), b);
  CHECK_MESSAGE(v.valid, "oracle refutes a checked conclusion: ", e.str());
}

// P(x) = x |-> null, the workhorse indexed cell.
IndexedAssertion icell() {
  return IndexedAssertion{"x", kVal, Assertion::pto(V("x"), Term::null_lit())};
}

}  // namespace

TEST_CASE("wandq_intro packages a frame under a fresh index") {
  Derivation d = wandq_intro(icell(), cell("q"));
  CHECK(d.conclusion().str() ==
        "(entail (pto q null) (forall (x Val) (wand (pto x null) (star (pto x "
        "null) (pto q null)))))");
  CHECK(check(d) == d.conclusion());
  oracle_agrees(d.conclusion(), tiny());

  // Freshness is the kernel's to police: the index occurring free in
  // the framed assertion must bounce.
  CHECK_THROWS_AS(wandq_intro(icell(), cell("x")), KernelReject);

  // Degenerate indexed body: an unsatisfiable P still goes through,
  // the quantified wand is just vacuously usable.
  IndexedAssertion absurd{"x", kVal, Assertion::pure(Prop::false_())};
  Derivation dd = wandq_intro(absurd, cell("q"));
  CHECK(check(dd) == dd.conclusion());
  oracle_agrees(dd.conclusion(), tiny());
}

TEST_CASE("wandq_elim instantiates and discharges") {
  IndexedAssertion p = icell();
  IndexedAssertion q{"x", kVal,
                     Assertion::star(Assertion::pto(V("x"), Term::null_lit()),
                                     cell("r"))};
  Derivation d = wandq_elim(p, q, V("w"));
  CHECK(d.conclusion().str() ==
        "(entail (star (pto w null) (forall (x Val) (wand (pto x null) (star "
        "(pto x null) (pto r null))))) (star (pto w null) (pto r null)))");
  CHECK(check(d) == d.conclusion());
  oracle_agrees(d.conclusion(), tiny());

  IndexedAssertion mismatched{"y", kVal, Assertion::emp()};
  CHECK_THROWS_AS(wandq_elim(p, mismatched, V("w")), SideConditionError);

  // Witness sort mismatches are caught before any substitution runs.
  CHECK_THROWS_AS(wandq_elim(p, q, Term::var("t", kTree)), SideConditionError);
}

TEST_CASE("wandq_hor runs two quantified frames side by side") {
  IndexedAssertion p1 = icell();
  IndexedAssertion q1{"x", kVal,
                      Assertion::star(p1.body, cell("a"))};
  IndexedAssertion p2{"x", kVal, cell("b")};
  IndexedAssertion q2{"x", kVal, Assertion::star(cell("b"), cell("c"))};
  Derivation d = wandq_hor(p1, q1, p2, q2);
  const Entailment& e = d.conclusion();
  CHECK(e.ante().str() ==
        "(star (forall (x Val) (wand (pto x null) (star (pto x null) (pto a "
        "null)))) (forall (x Val) (wand (pto b null) (star (pto b null) (pto "
        "c null)))))");
  CHECK(e.succ().str() ==
        "(forall (x Val) (wand (star (pto x null) (pto b null)) (star (star "
        "(pto x null) (pto a null)) (star (pto b null) (pto c null)))))");
  CHECK(check(d) == e);

  // The trivial emp-indexed instance, fully closed: checked at stock
  // bounds against the oracle.
  IndexedAssertion ie{"x", kVal, Assertion::emp()};
  Derivation de = wandq_hor(ie, ie, ie, ie);
  CHECK(check(de) == de.conclusion());
  oracle_agrees(de.conclusion(), OracleBounds{});

  IndexedAssertion other{"y", kVal, Assertion::emp()};
  CHECK_THROWS_AS(wandq_hor(p1, q1, other, other), SideConditionError);
}

TEST_CASE("wandq_ver chains two quantified frames") {
  IndexedAssertion p = icell();
  IndexedAssertion q{"x", kVal, Assertion::star(p.body, cell("a"))};
  IndexedAssertion r{"x", kVal,
                     Assertion::star(Assertion::star(p.body, cell("a")),
                                     cell("b"))};
  Derivation d = wandq_ver(p, q, r);
  CHECK(d.conclusion().str() ==
        "(entail (star (forall (x Val) (wand (pto x null) (star (pto x null) "
        "(pto a null)))) (forall (x Val) (wand (star (pto x null) (pto a "
        "null)) (star (star (pto x null) (pto a null)) (pto b null))))) "
        "(forall (x Val) (wand (pto x null) (star (star (pto x null) (pto a "
        "null)) (pto b null)))))");
  CHECK(check(d) == d.conclusion());

  // Q = P: composing a frame with the identity frame.
  Derivation triv = wandq_ver(p, p, q);
  CHECK(check(triv) == triv.conclusion());
  oracle_agrees(triv.conclusion(), tiny());
}

TEST_CASE("wandq_refine reindexes along a term former") {
  IndexedAssertion p{"t", kTree,
                     Assertion::pred("tree_rep", {Term::var("t", kTree), V("p")})};
  IndexedAssertion q{"t", kTree,
                     Assertion::pred("treebox_rep", {Term::var("t", kTree), V("p")})};

  // f(y) = ins(y, 1, null): the refined rule speaks only about trees
  // in the image of an insertion.
  IndexedTerm f{"y", kTree,
                Term::ins(Term::var("y", kTree), Term::int_lit(1),
                          Term::null_lit())};
  Derivation d = wandq_refine(p, q, f);
  CHECK(d.conclusion().str() ==
        "(entail (forall (t Tree) (wand (tree_rep t p) (treebox_rep t p))) "
        "(forall (y Tree) (wand (tree_rep (ins y 1 null) p) (treebox_rep (ins "
        "y 1 null) p))))");
  CHECK(check(d) == d.conclusion());

  // Identity former: conclusion is an alpha-renaming of the premise.
  IndexedTerm id{"u", kTree, Term::var("u", kTree)};
  Derivation di = wandq_refine(p, q, id);
  CHECK(di.conclusion().succ().str() ==
        "(forall (u Tree) (wand (tree_rep u p) (treebox_rep u p)))");

  IndexedTerm wrong{"y", kVal, V("y")};
  CHECK_THROWS_AS(wandq_refine(p, q, wrong), SideConditionError);
}

TEST_CASE("all five builders accept generated well-sorted inputs") {
  std::mt19937 rng(411);
  // Bodies in which the index x may occur, and index-free frames.
  std::vector<Assertion> indexed = {
      Assertion::pto(V("x"), Term::null_lit()),
      Assertion::pto(V("p"), V("x")),
      Assertion::emp(),
      Assertion::star(Assertion::pto(V("x"), Term::null_lit()), cell("p")),
      Assertion::and_pure(Prop::neq(V("x"), Term::null_lit()), Assertion::emp()),
  };
  std::vector<Assertion> frames = {
      Assertion::emp(),
      cell("q"),
      Assertion::star(cell("q"), cell("r")),
      Assertion::pure(Prop::true_()),
  };
  std::uniform_int_distribution<size_t> pi(0, indexed.size() - 1);
  std::uniform_int_distribution<size_t> fi(0, frames.size() - 1);
  auto ia = [&](size_t i) { return IndexedAssertion{"x", kVal, indexed[i]}; };

  for (int iter = 0; iter < 40; ++iter) {
    IndexedAssertion p = ia(pi(rng));
    IndexedAssertion q = ia(pi(rng));
    IndexedAssertion r = ia(pi(rng));
    Assertion frame = frames[fi(rng)];

    Derivation d1 = wandq_intro(p, frame);
    CHECK(check(d1) == d1.conclusion());
    Derivation d2 = wandq_elim(p, q, V("w"));
    CHECK(check(d2) == d2.conclusion());
    Derivation d3 = wandq_hor(p, q, q, r);
    CHECK(check(d3) == d3.conclusion());
    Derivation d4 = wandq_ver(p, q, r);
    CHECK(check(d4) == d4.conclusion());
    IndexedTerm f{"y", kVal, V("y")};
    Derivation d5 = wandq_refine(p, q, f);
    CHECK(check(d5) == d5.conclusion());
  }
}

TEST_CASE("identity ramification") {
  // The skip command: local step L -> L, frame derivation
  // L |- L * (L -* L) assembled from unit and adjoint moves.
  Assertion L = cell("p");
  Derivation frame = Derivation::entail_trans(
      star_emp_intro_r(L),
      Derivation::star_mono(
          Derivation::entail_refl(L),
          Derivation::wand_adjoint_2(Derivation::emp_unit_elim(L))));
  CHECK(frame.conclusion().str() ==
        "(entail (pto p null) (star (pto p null) (wand (pto p null) (pto p "
        "null))))");

  HoareTriple local{L, L, {}};
  Ramification ram = ramif(local, frame);
  CHECK(ram.global.pre == L);
  CHECK(ram.global.post == L);
  CHECK(ram.global.modified.empty());
}

TEST_CASE("plain ramification recovers the frame rule") {
  // Local step touches p's cell only; q's cell rides along framed.
  Assertion L = cell("p");
  Assertion Q = cell("q");
  Derivation curried = Derivation::wand_adjoint_2(Derivation::star_comm(Q, L));
  Derivation frame = Derivation::star_mono(Derivation::entail_refl(L), curried);
  // Conclusion: L * Q |- L * (L -* L * Q).
  HoareTriple local{L, L, {"z"}};
  Ramification ram = ramif(local, frame);
  CHECK(ram.global.pre.str() == "(star (pto p null) (pto q null))");
  CHECK(ram.global.post.str() == "(star (pto p null) (pto q null))");
  CHECK(ram.global.modified == std::vector<std::string>{"z"});

  // The framed residue must survive the command: naming q as modified
  // is exactly the unsound case.
  HoareTriple clobbers{L, L, {"q"}};
  CHECK_THROWS_AS(ramif(clobbers, frame), SideConditionError);

  // Mismatched local step.
  HoareTriple wrong{Q, L, {}};
  CHECK_THROWS_AS(ramif(wrong, frame), ShapeError);
  // Frame entailment with no wand on the right.
  CHECK_THROWS_AS(ramif(local, Derivation::entail_refl(L)), ShapeError);
}

TEST_CASE("quantified ramification") {
  // Local step ends in exists x. x |-> null; the frame abstracts the
  // same index, so the global step ends in exists x. (x |-> null * Q).
  Assertion L = cell("p");
  Assertion Q = cell("q");
  IndexedAssertion lp = icell();
  Derivation frame =
      Derivation::star_mono(Derivation::entail_refl(L), wandq_intro(lp, Q));
  // Conclusion: L * Q |- L * forall x. (x |-> null -* (x |-> null) * Q).

  HoareTriple local{L, Assertion::exists("x", kVal, lp.body), {"t0"}};
  Ramification ram = ramifq(local, frame);
  CHECK(ram.global.pre.str() == "(star (pto p null) (pto q null))");
  CHECK(ram.global.post.str() ==
        "(exists (x Val) (star (pto x null) (pto q null)))");

  // Local post must be the matching existential.
  HoareTriple bare{L, lp.body, {}};
  CHECK_THROWS_AS(ramifq(bare, frame), ShapeError);
  HoareTriple renamed{L, Assertion::exists("y", kVal, cell("y")), {}};
  CHECK_THROWS_AS(ramifq(renamed, frame), ShapeError);
  // Frame mentions q, so q must not be modified.
  HoareTriple clobbers{L, Assertion::exists("x", kVal, lp.body), {"q"}};
  CHECK_THROWS_AS(ramifq(clobbers, frame), SideConditionError);
}

TEST_CASE("hobor_villard composes two decompositions") {
  auto identity_frame = [](const Assertion& l) {
    return Derivation::entail_trans(
        star_emp_intro_r(l),
        Derivation::star_mono(
            Derivation::entail_refl(l),
            Derivation::wand_adjoint_2(Derivation::emp_unit_elim(l))));
  };
  Assertion L1 = cell("p");
  Assertion L2 = cell("q");
  Derivation d = hobor_villard(identity_frame(L1), identity_frame(L2));
  CHECK(d.conclusion().str() ==
        "(entail (star (pto p null) (pto q null)) (star (star (pto p null) "
        "(pto q null)) (wand (star (pto p null) (pto q null)) (star (pto p "
        "null) (pto q null)))))");
  CHECK(check(d) == d.conclusion());
  oracle_agrees(d.conclusion(), tiny());

  CHECK_THROWS_AS(
      hobor_villard(Derivation::entail_refl(L1), identity_frame(L2)),
      ShapeError);
}
