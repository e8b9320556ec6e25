#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "sepwand/derived.hpp"
#include "sepwand/error.hpp"
#include "sepwand/oracle.hpp"

using namespace sepwand;

namespace {

const Sort kVal{SortKind::Val};
const Sort kList{SortKind::List};

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

void oracle_agrees(const Entailment& e) {
  EntailVerdict v = oracle_entails(e.ante(), e.succ(), tiny());
  CHECK_MESSAGE(v.valid, "oracle refutes a checked conclusion: ", e.str());
}

// Builds a random star tree over the given leaves: repeatedly joins
// two randomly chosen entries, so both the order and the association
// come out scrambled.
Assertion random_tree(std::vector<Assertion> xs, std::mt19937& rng) {
  REQUIRE(!xs.empty());
  while (xs.size() > 1) {
    std::uniform_int_distribution<size_t> pick(0, xs.size() - 1);
    size_t i = pick(rng);
    size_t j = pick(rng);
    if (i == j) j = (j + 1) % xs.size();
    if (i > j) std::swap(i, j);
    Assertion joined = Assertion::star(xs[i], xs[j]);
    xs.erase(xs.begin() + j);
    xs.erase(xs.begin() + i);
    xs.push_back(joined);
  }
  return xs[0];
}

// Round-trip workout for invert: the inverse must check, must be the
// flipped sequent, and composing the two must give reflexivity.
void invertible(const Derivation& d) {
  Derivation inv = invert(d);
  CHECK(inv.conclusion().ante() == d.conclusion().succ());
  CHECK(inv.conclusion().succ() == d.conclusion().ante());
  CHECK(check(inv) == inv.conclusion());
  Derivation round = Derivation::entail_trans(d, inv);
  CHECK(round.conclusion().ante() == round.conclusion().succ());
}

}  // namespace

TEST_CASE("rearrange shuffles arbitrary star trees") {
  std::mt19937 rng(20260822);
  std::vector<Assertion> pool = {cell("p"), cell("q"), cell("r"), cell("s"),
                                 Assertion::emp(), cell("p")};
  for (int iter = 0; iter < 60; ++iter) {
    std::uniform_int_distribution<size_t> count(1, pool.size());
    size_t n = count(rng);
    std::vector<Assertion> leaves(pool.begin(), pool.begin() + n);
    std::shuffle(leaves.begin(), leaves.end(), rng);
    Assertion from = random_tree(leaves, rng);
    std::shuffle(leaves.begin(), leaves.end(), rng);
    Assertion to = random_tree(leaves, rng);

    Derivation d = rearrange(from, to);
    CHECK(d.conclusion().ante() == from);
    CHECK(d.conclusion().succ() == to);
    CHECK(check(d) == d.conclusion());
  }
}

TEST_CASE("rearrange spot checks against the oracle") {
  Assertion p = cell("p");
  Assertion q = cell("q");
  Assertion r = cell("r");
  Assertion from = Assertion::star(Assertion::star(p, q), r);
  Assertion to = Assertion::star(r, Assertion::star(q, p));
  Derivation d = rearrange(from, to);
  oracle_agrees(check(d));

  // Identity fast path.
  Derivation same = rearrange(from, from);
  CHECK(same.rule() == "entail_refl");

  // Different multisets must be refused, not silently mangled.
  Assertion missing = Assertion::star(p, q);
  CHECK_THROWS_AS(rearrange(from, missing), SideConditionError);
  Assertion doubled = Assertion::star(Assertion::star(p, p), Assertion::star(q, r));
  CHECK_THROWS_AS(rearrange(from, doubled), SideConditionError);
}

TEST_CASE("star_leaves flattens without looking under binders") {
  Assertion p = cell("p");
  Assertion q = cell("q");
  Assertion w = Assertion::wand(p, q);
  Assertion t = Assertion::star(Assertion::star(p, w), q);
  std::vector<Assertion> ls = star_leaves(t);
  REQUIRE(ls.size() == 3);
  CHECK(ls[0] == p);
  CHECK(ls[1] == w);
  CHECK(ls[2] == q);
  // emp is a leaf here, not discarded: rearrange has to account for
  // every operand it was handed.
  CHECK(star_leaves(Assertion::star(p, Assertion::emp())).size() == 2);
}

TEST_CASE("invert round-trips the reversible fragment") {
  Assertion a = cell("p");
  Assertion b = cell("q");
  Assertion c = cell("r");
  Prop fact = Prop::eq(V("p"), Term::null_lit());

  invertible(Derivation::entail_refl(a));
  invertible(Derivation::star_comm(a, b));
  invertible(Derivation::star_assoc_lr(a, b, c));
  invertible(Derivation::star_assoc_rl(a, b, c));
  invertible(Derivation::emp_unit_intro(a));
  invertible(Derivation::emp_unit_elim(a));
  invertible(Derivation::pure_hoist(fact, a, b));
  invertible(Derivation::pure_lower(fact, a, b));
  invertible(Derivation::pure_mono(Derivation::star_comm(a, b), fact));
  invertible(Derivation::star_mono(Derivation::star_comm(a, b),
                                   Derivation::emp_unit_intro(c)));
  invertible(Derivation::entail_trans(Derivation::star_assoc_lr(a, b, c),
                                      Derivation::star_comm(a, Assertion::star(b, c))));

  Assertion occ = Assertion::pred("listrep", {Term::list_nil(), V("p")});
  invertible(Derivation::pred_unfold(occ));
  invertible(Derivation::pred_fold(occ));

  // Rules with no inverse in the fragment are refused.
  Derivation adj = Derivation::wand_adjoint_2(
      Derivation::entail_refl(Assertion::star(a, b)));
  CHECK_THROWS_AS(invert(adj), SideConditionError);
  Derivation pi = Derivation::pure_intro(
      Derivation::entail_refl(Assertion::emp()), Prop::eq(Term::int_lit(1), Term::int_lit(1)));
  CHECK_THROWS_AS(invert(pi), SideConditionError);
}

TEST_CASE("wand_cancel and wand_mono") {
  Assertion p = cell("p");
  Assertion q = cell("q");
  Derivation cancel = wand_cancel(Assertion::wand(p, q));
  CHECK(cancel.conclusion().str() ==
        "(entail (star (wand (pto p null) (pto q null)) (pto p null)) (pto q "
        "null))");
  oracle_agrees(check(cancel));

  // Strengthen the argument, weaken the result: from A' |- A and
  // B |- B' conclude (A -* B) |- (A' -* B'). Here both side proofs
  // are unit rewrites.
  Derivation dl = Derivation::emp_unit_elim(p);   // emp * P |- P
  Derivation dr = Derivation::emp_unit_intro(q);  // Q |- emp * Q
  Derivation mono = wand_mono(dl, dr);
  CHECK(mono.conclusion().str() ==
        "(entail (wand (pto p null) (pto q null)) (wand (star emp (pto p "
        "null)) (star emp (pto q null))))");
  oracle_agrees(check(mono));
}

TEST_CASE("quantifier congruence helpers") {
  Assertion body_a = Assertion::star(cell("p"), cell("x"));
  Derivation flip = Derivation::star_comm(cell("p"), cell("x"));

  Derivation fm = forall_mono("x", kVal, flip);
  CHECK(fm.conclusion().str() ==
        "(entail (forall (x Val) (star (pto p null) (pto x null))) (forall (x "
        "Val) (star (pto x null) (pto p null))))");
  CHECK(check(fm) == fm.conclusion());

  Derivation em = exists_mono("x", kVal, flip);
  CHECK(em.conclusion().str() ==
        "(entail (exists (x Val) (star (pto p null) (pto x null))) (exists (x "
        "Val) (star (pto x null) (pto p null))))");
  oracle_agrees(check(em));

  // The binder must not leak into the other side's free variables:
  // the kernel eigenvariable conditions stay in force underneath.
  Assertion open_body = Assertion::pto(V("x"), V("y"));
  Derivation bad = Derivation::entail_refl(open_body);
  CHECK_NOTHROW(forall_mono("x", kVal, bad));
  (void)body_a;
}

TEST_CASE("emp on the right and pure prefixes") {
  Assertion p = cell("p");
  CHECK(star_emp_intro_r(p).conclusion().str() ==
        "(entail (pto p null) (star (pto p null) emp))");
  CHECK(star_emp_elim_r(p).conclusion().str() ==
        "(entail (star (pto p null) emp) (pto p null))");
  oracle_agrees(check(star_emp_intro_r(p)));
  oracle_agrees(check(star_emp_elim_r(p)));

  Prop f1 = Prop::eq(V("p"), V("q"));
  Prop f2 = Prop::neq(V("p"), Term::null_lit());
  Assertion wrapped = Assertion::and_pure(f1, Assertion::and_pure(f2, p));
  Derivation sp = strip_pure(wrapped);
  CHECK(sp.conclusion().ante() == wrapped);
  CHECK(sp.conclusion().succ() == p);
  CHECK(check(sp) == sp.conclusion());

  // No prefix: degenerates to reflexivity.
  CHECK(strip_pure(p).rule() == "entail_refl");
}
