#include <cstdio>

#include "sepwand/error.hpp"
#include "sepwand/kernel.hpp"
#include "sepwand/shapes.hpp"
#include "sepwand/wandframe.hpp"

using namespace sepwand;

static const Sort kVal{SortKind::Val};
static const Sort kInt{SortKind::Int};
static const Sort kTree{SortKind::Tree};
static const Sort kList{SortKind::List};
static const Sort kCtx{SortKind::Ctx};

static Term V(const char* n) { return Term::var(n, kVal); }

static void show(const char* tag, const Derivation& d) {
  Entailment e = check(d);
  std::printf("%-22s %s\n", tag, e.str().c_str());
}

int main() {
  Term p = V("p"), q = V("q"), r = V("r"), i = V("i");
  Term k = Term::var("k", kInt), v = V("v");
  Term t1 = Term::var("t1", kTree), t2 = Term::var("t2", kTree);
  Term qa = V("qa"), qb = V("qb");
  Term l1 = Term::var("l1", kList), l2 = Term::var("l2", kList);
  Term h = V("h");
  Term c1 = Term::var("c1", kCtx), c2 = Term::var("c2", kCtx);
  Term t = Term::var("t", kTree);

  try {
    show("single_left", partial_single_left(p, q, k, v, t2));
    show("single_right", partial_single_right(p, q, k, v, t1));
    show("tree_single_left", tree_single_left(p, k, v, qa, qb, t2));
    show("tree_single_right", tree_single_right(p, k, v, qa, qb, t1));
    show("identity_treebox", partial_identity("partialT_treebox", p));
    show("identity_tree", partial_identity("partialT_tree", p));
    show("lseg_nil", lseg_nil(p));
    show("fill", partial_fill(Assertion::pred("partialT_treebox", {c1, r, i}), t));
    show("compose",
         partial_compose(Assertion::pred("partialT_treebox", {c1, p, q}),
                         Assertion::pred("partialT_treebox", {c2, q, r})));
    show("lseg_single", lseg_single(h, p, q));
    show("lseg_fill", lseg_fill(l1, l2, p, q));
    show("lseg_concat", lseg_concat(l1, l2, p, q, r));

    int s1 = agg_shape_tuple({agg_shape_int(), agg_shape_int(), agg_shape_int(),
                              agg_shape_int(), agg_shape_int()});
    int s2 = agg_shape_tuple({s1, s1, s1});
    Term u1 = Term::var("u", Sort::agg(s1));
    Term u2 = Term::var("u", Sort::agg(s2));
    show("focus_empty", focus_path(p, u1, {}));
    show("focus_s1_2", focus_path(p, u1, {2}));
    show("focus_s2_1", focus_path(p, u2, {1}));
    show("focus_s2_1_2", focus_path(p, u2, {1, 2}));
  } catch (const Error& e) {
    std::printf("ERROR: %s\n", e.what());
    return 1;
  }
  return 0;
}
