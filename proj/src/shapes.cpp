#include "sepwand/shapes.hpp"

#include <optional>
#include <set>

#include "sepwand/eval.hpp"
#include "sepwand/preds.hpp"

namespace sepwand {
namespace {

using D = Derivation;

D trans(const D& a, const D& b) { return D::entail_trans(a, b); }
D refl(const Assertion& a) { return D::entail_refl(a); }

// Introduce the existentials of `goal` with `wits`, consumed in
// preorder: the premise is goal with each binder replaced by its
// witness. Star nodes split the walk; anything else is left alone.
D intro_wits(const Assertion& goal, const std::vector<Term>& wits, size_t& k) {
  switch (goal.kind()) {
    case Ak::Exists: {
      if (k >= wits.size())
        throw ShapeError("not enough witnesses for " + goal.str());
      D outer = D::exists_intro(goal, wits[k++]);
      D inner = intro_wits(outer.conclusion().ante(), wits, k);
      return trans(inner, outer);
    }
    case Ak::Star: {
      D l = intro_wits(goal.kids()[0], wits, k);
      D r = intro_wits(goal.kids()[1], wits, k);
      return D::star_mono(l, r);
    }
    default:
      return refl(goal);
  }
}

// forall x. (A -* B) |- forall x. (A -* B with `from` replaced by
// `to`), justified outright by reduction. The rewrite runs inside
// the per-index derivation, which is the only place a term
// mentioning the bound variable can be rewritten.
D rewrite_under_wand(const std::string& var, Sort s, const Assertion& a,
                     const Assertion& b, const Term& from, const Term& to) {
  D inner = D::prop_rewrite(refl(b), from, to, false);
  return forall_mono(var, s, wand_mono(refl(a), inner));
}

// The unfolding of a quantified-wand partial predicate, split into
// its pieces. ShapeError when the predicate is not of that form.
struct PartialShape {
  std::string binder;
  Sort sort;
  Assertion lhs;  // rep(x, hole)
  Assertion rhs;  // rep(S(x), root)
};

PartialShape split_partial(const Assertion& unfolded, const std::string& who) {
  if (unfolded.kind() != Ak::Forall || unfolded.kids()[0].kind() != Ak::Wand)
    throw ShapeError(who + ": predicate does not unfold to a quantified wand");
  const Assertion& w = unfolded.kids()[0];
  return {unfolded.binder(), unfolded.binder_sort(), w.kids()[0], w.kids()[1]};
}

// Structure argument of a representation-predicate occurrence.
const Term& structure_of(const Assertion& rep, const std::string& who) {
  if (rep.kind() != Ak::Pred)
    throw ShapeError(who + ": wand side is not a predicate occurrence");
  const PredDef& def = pred_get(rep.pred_name());
  if (def.structure_arg < 0)
    throw ShapeError(who + ": " + rep.pred_name() + " has no structure argument");
  return rep.terms()[(size_t)def.structure_arg];
}

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  if (!avoid.count(base)) return base;
  for (int i = 0;; ++i) {
    std::string cand = base + std::to_string(i);
    if (!avoid.count(cand)) return cand;
  }
}

}  // namespace

Derivation frame_to_partial(const Assertion& occ, const Assertion& ante,
                            const std::vector<Term>& wits) {
  if (occ.kind() != Ak::Pred)
    throw ShapeError("frame_to_partial: target is not a predicate occurrence");
  D fold_p = D::pred_fold(occ);
  PartialShape ps = split_partial(fold_p.conclusion().ante(), "frame_to_partial");
  Term sx = structure_of(ps.rhs, "frame_to_partial");
  Term sred = reduce(sx);

  D d0 = wandq_intro(IndexedAssertion{ps.binder, ps.sort, ps.lhs}, ante);
  D dr = [&]() -> D {
    if (sred == Term::var(ps.binder, ps.sort)) {
      // identity spine: the wand's two sides coincide up to
      // reduction, so the frame has to be empty
      if (!(ante == Assertion::emp()))
        throw ShapeError("frame_to_partial: identity structure needs an emp frame");
      return D::prop_rewrite(star_emp_elim_r(ps.lhs), sred, sx, false);
    }
    std::vector<Term> args = ps.rhs.terms();
    args[(size_t)pred_get(ps.rhs.pred_name()).structure_arg] = sred;
    D fold_t = D::pred_fold(Assertion::pred(ps.rhs.pred_name(), args));
    size_t used = 0;
    D intro = intro_wits(fold_t.conclusion().ante(), wits, used);
    if (used != wits.size())
      throw ShapeError("frame_to_partial: " + std::to_string(wits.size() - used) +
                       " witnesses left over");
    D re = rearrange(Assertion::star(ps.lhs, ante), intro.conclusion().ante());
    return D::prop_rewrite(trans(trans(re, intro), fold_t), sred, sx, false);
  }();
  D lift = forall_mono(ps.binder, ps.sort, wand_mono(refl(ps.lhs), dr));
  return trans(trans(d0, lift), fold_p);
}

Derivation partial_single_left(const Term& p, const Term& q, const Term& k,
                               const Term& v, const Term& t2) {
  Term c = Term::ctx({lhole(k, v, t2)});
  Assertion occ = Assertion::pred("partialT_treebox", {c, p, Term::field(q, 2)});
  Assertion ante = Assertion::star(
      Assertion::pto(p, q),
      Assertion::star(
          Assertion::pto(Term::field(q, 0), k),
          Assertion::star(Assertion::pto(Term::field(q, 1), v),
                          Assertion::pred("treebox_rep", {t2, Term::field(q, 3)}))));
  return frame_to_partial(occ, ante, {q});
}

Derivation partial_single_right(const Term& p, const Term& q, const Term& k,
                                const Term& v, const Term& t1) {
  Term c = Term::ctx({rhole(t1, k, v)});
  Assertion occ = Assertion::pred("partialT_treebox", {c, p, Term::field(q, 3)});
  Assertion ante = Assertion::star(
      Assertion::pto(p, q),
      Assertion::star(
          Assertion::pto(Term::field(q, 0), k),
          Assertion::star(Assertion::pto(Term::field(q, 1), v),
                          Assertion::pred("treebox_rep", {t1, Term::field(q, 2)}))));
  return frame_to_partial(occ, ante, {q});
}

Derivation tree_single_left(const Term& p, const Term& k, const Term& v,
                            const Term& qa, const Term& qb, const Term& t2) {
  Term c = Term::ctx({lhole(k, v, t2)});
  Assertion occ = Assertion::pred("partialT_tree", {c, p, qa});
  Assertion ante = Assertion::star(
      Assertion::pto(Term::field(p, 0), k),
      Assertion::star(
          Assertion::pto(Term::field(p, 1), v),
          Assertion::star(
              Assertion::pto(Term::field(p, 2), qa),
              Assertion::star(Assertion::pto(Term::field(p, 3), qb),
                              Assertion::pred("tree_rep", {t2, qb})))));
  return frame_to_partial(occ, ante, {qa, qb});
}

Derivation tree_single_right(const Term& p, const Term& k, const Term& v,
                             const Term& qa, const Term& qb, const Term& t1) {
  Term c = Term::ctx({rhole(t1, k, v)});
  Assertion occ = Assertion::pred("partialT_tree", {c, p, qb});
  Assertion ante = Assertion::star(
      Assertion::pto(Term::field(p, 0), k),
      Assertion::star(
          Assertion::pto(Term::field(p, 1), v),
          Assertion::star(
              Assertion::pto(Term::field(p, 2), qa),
              Assertion::star(Assertion::pto(Term::field(p, 3), qb),
                              Assertion::pred("tree_rep", {t1, qa})))));
  return frame_to_partial(occ, ante, {qa, qb});
}

Derivation partial_identity(const std::string& partial_pred, const Term& p) {
  const PredDef& def = pred_get(partial_pred);
  if (def.arg_sorts.size() != 3)
    throw ShapeError(partial_pred + " is not a partial-structure predicate");
  Term empty = [&]() -> Term {
    switch (def.arg_sorts[0].kind) {
      case SortKind::Ctx: return Term::ctx({});
      case SortKind::List: return Term::list_nil();
      default:
        throw ShapeError(partial_pred + " has no empty structure literal");
    }
  }();
  return frame_to_partial(Assertion::pred(partial_pred, {empty, p, p}),
                          Assertion::emp(), {});
}

Derivation partial_fill(const Assertion& occ, const Term& t) {
  D un = D::pred_unfold(occ);
  PartialShape ps = split_partial(un.conclusion().succ(), "partial_fill");
  IndexedAssertion P{ps.binder, ps.sort, ps.lhs};
  IndexedAssertion Q{ps.binder, ps.sort, ps.rhs};
  D spread = D::star_mono(refl(P.at(t)), un);
  return trans(spread, wandq_elim(P, Q, t));
}

Derivation partial_compose(const Assertion& occ1, const Assertion& occ2) {
  if (occ1.kind() != Ak::Pred || occ2.kind() != Ak::Pred ||
      occ1.pred_name() != occ2.pred_name())
    throw ShapeError("partial_compose: occurrences must use one predicate");
  D u1 = D::pred_unfold(occ1);
  D u2 = D::pred_unfold(occ2);
  PartialShape w1 = split_partial(u1.conclusion().succ(), "partial_compose");
  PartialShape w2 = split_partial(u2.conclusion().succ(), "partial_compose");

  Term s2 = structure_of(w2.rhs, "partial_compose");
  if (!(subst(w1.lhs, w1.binder, s2) == w2.rhs))
    throw ShapeError("partial_compose: seam addresses do not line up");

  // outer wand specialized along the inner structure, then chained
  // behind the inner wand
  D refined = wandq_refine(IndexedAssertion{w1.binder, w1.sort, w1.lhs},
                           IndexedAssertion{w1.binder, w1.sort, w1.rhs},
                           IndexedTerm{w1.binder, w1.sort, s2});
  Assertion b3 = subst(w1.rhs, w1.binder, s2);
  D chain = wandq_ver(IndexedAssertion{w1.binder, w1.sort, w2.lhs},
                      IndexedAssertion{w1.binder, w1.sort, w2.rhs},
                      IndexedAssertion{w1.binder, w1.sort, b3});

  D d = D::star_mono(trans(u1, refined), u2);
  d = trans(d, D::star_comm(refined.conclusion().succ(), u2.conclusion().succ()));
  d = trans(d, chain);

  // fold the composed structure, aligning the nested application
  // with the composed one inside the wand
  const Term& c1 = occ1.terms()[0];
  const Term& c2 = occ2.terms()[0];
  Term comb = c1.sort().kind == SortKind::Ctx ? Term::compose(c1, c2)
                                              : Term::list_app(c1, c2);
  std::vector<Term> targs = occ1.terms();
  targs[0] = comb;
  targs[2] = occ2.terms()[2];
  D fold = D::pred_fold(Assertion::pred(occ1.pred_name(), targs));
  PartialShape wt = split_partial(fold.conclusion().ante(), "partial_compose");
  Term s3 = structure_of(b3, "partial_compose");
  Term st = structure_of(wt.rhs, "partial_compose");
  d = trans(d, rewrite_under_wand(w1.binder, w1.sort, w2.lhs, b3, s3, st));
  return trans(d, fold);
}

Derivation lseg_nil(const Term& p) { return partial_identity("lseg", p); }

Derivation lseg_single(const Term& h, const Term& p, const Term& q) {
  Assertion occ = Assertion::pred(
      "lseg", {Term::list_cons(h, Term::list_nil()), p, q});
  Assertion ante = Assertion::star(Assertion::pto(Term::field(p, 0), h),
                                   Assertion::pto(Term::field(p, 1), q));
  return frame_to_partial(occ, ante, {q});
}

Derivation lseg_fill(const Term& l1, const Term& l2, const Term& p,
                     const Term& q) {
  Assertion seg = Assertion::pred("lseg", {l1, p, q});
  Assertion rep = Assertion::pred("listrep", {l2, q});
  return trans(D::star_comm(seg, rep), partial_fill(seg, l2));
}

Derivation lseg_concat(const Term& l1, const Term& l2, const Term& p,
                       const Term& q, const Term& r) {
  return partial_compose(Assertion::pred("lseg", {l1, p, q}),
                         Assertion::pred("lseg", {l2, q, r}));
}

// ---------------------------------------------------------------- //
// Aggregate focusing.

namespace {

// Flat cell offset of field i: scalar leaves of the preceding fields.
int flat_off(const AggShape& sh, uint32_t i) {
  int off = 0;
  for (uint32_t j = 0; j < i; ++j) off += agg_shape(sh.fields[j]).leaf_count;
  return off;
}

Assertion data_at(const Term& p, const Term& u) {
  return Assertion::pred("data_at", {p, u});
}

// Points-to for scalar components, data_at for sub-aggregates.
Assertion carrier(const Term& addr, const Term& payload) {
  if (payload.sort().kind == SortKind::Agg) return data_at(addr, payload);
  return Assertion::pto(addr, payload);
}

// data_at(p, u) |- C(p.i, get(u, [i]))
//                  * forall b. (C(p.i, b) -* data_at(p, set(u, [i], b)))
D one_level(const Term& p, const Term& u, uint32_t i, const std::string& bn) {
  const AggShape& sh = agg_shape(u.sort().shape);
  size_t m = sh.fields.size();
  Term addr_i = Term::field(p, flat_off(sh, i));
  Term get_i = Term::get(u, {i});
  Sort s_i = get_i.sort();
  bool leaf_field = agg_shape(sh.fields[i]).leaf;

  // spread u into its projections and split off one level of cells
  std::vector<Term> gets;
  for (uint32_t j = 0; j < m; ++j) gets.push_back(Term::get(u, {j}));
  Term etau = Term::tuple(gets);
  D d = D::prop_rewrite(refl(data_at(p, u)), u, etau, false);
  D unf = D::pred_unfold(data_at(p, etau));
  d = trans(d, unf);

  std::vector<Assertion> leaves = star_leaves(unf.conclusion().succ());
  Assertion focal = leaves[i];
  if (!(focal == data_at(addr_i, get_i)))
    throw ShapeError("focus: unexpected field layout at index " +
                     std::to_string(i));
  std::optional<Assertion> restc;
  for (size_t j = m; j-- > 0;)
    if (j != i) restc = restc ? Assertion::star(leaves[j], *restc) : leaves[j];
  d = trans(d, restc ? rearrange(unf.conclusion().succ(),
                                 Assertion::star(focal, *restc))
                     : star_emp_intro_r(focal));
  Assertion rest_a = restc ? *restc : Assertion::emp();

  // the write-back wand, one index derivation at a time
  Term bvar = Term::var(bn, s_i);
  Assertion da_b = data_at(addr_i, bvar);
  Assertion cell_b = carrier(addr_i, bvar);
  D d0 = wandq_intro(IndexedAssertion{bn, s_i, cell_b}, rest_a);

  std::vector<Term> kids2 = gets;
  kids2[i] = bvar;
  Term tup_b = Term::tuple(kids2);
  D fold_t = D::pred_fold(data_at(p, tup_b));
  D cell_to_da = leaf_field ? D::pred_fold(da_b) : refl(da_b);
  D acc = restc ? trans(D::star_mono(cell_to_da, refl(rest_a)),
                        rearrange(Assertion::star(da_b, rest_a),
                                  fold_t.conclusion().ante()))
                : trans(star_emp_elim_r(cell_b), cell_to_da);
  acc = trans(acc, fold_t);
  acc = D::prop_rewrite(acc, tup_b, Term::set(u, {i}, bvar), false);

  D wpart = trans(d0, forall_mono(bn, s_i, wand_mono(refl(cell_b), acc)));
  D first = leaf_field ? D::pred_unfold(focal) : refl(focal);
  return trans(d, D::star_mono(first, wpart));
}

D focus_impl(const Term& p, const Term& u, const PathV& path,
             const std::string& vn, const std::string& wn) {
  if (path.empty()) {
    // identity focus: the component is the whole aggregate
    Assertion da = data_at(p, u);
    D left = D::prop_rewrite(refl(da), u, Term::get(u, {}), false);
    Term wvar = Term::var(wn, u.sort());
    Assertion cw = data_at(p, wvar);
    D d0 = wandq_intro(IndexedAssertion{wn, u.sort(), cw}, Assertion::emp());
    D inner = D::prop_rewrite(star_emp_elim_r(cw), wvar,
                              Term::set(u, {}, wvar), false);
    D wp = trans(d0, forall_mono(wn, u.sort(), wand_mono(refl(cw), inner)));
    return trans(star_emp_intro_r(da), D::star_mono(left, wp));
  }
  uint32_t i = path[0];
  PathV rest(path.begin() + 1, path.end());
  if (rest.empty()) return one_level(p, u, i, wn);

  const AggShape& sh = agg_shape(u.sort().shape);
  Term addr_i = Term::field(p, flat_off(sh, i));
  Term get_i = Term::get(u, {i});
  Sort s_i = get_i.sort();

  D l1 = one_level(p, u, i, vn);
  D r = focus_impl(addr_i, get_i, rest, vn, wn);

  const Assertion& w1 = l1.conclusion().succ().kids()[1];
  const Assertion& c2g = r.conclusion().succ().kids()[0];
  const Assertion& w2 = r.conclusion().succ().kids()[1];
  const Assertion& a2w = w2.kids()[0].kids()[0];
  const Assertion& b2w = w2.kids()[0].kids()[1];
  Sort ws = Term::get(u, path).sort();
  Term wvar = Term::var(wn, ws);

  // chain the inner write-back behind the outer one, fusing the two
  // writes into one deep write
  IndexedTerm f{wn, ws, Term::set(get_i, rest, wvar)};
  D t3 = wandq_refine(
      IndexedAssertion{vn, s_i, data_at(addr_i, Term::var(vn, s_i))},
      IndexedAssertion{vn, s_i,
                       data_at(p, Term::set(u, {i}, Term::var(vn, s_i)))},
      f);
  Assertion fused = data_at(p, Term::set(u, {i}, f.body));
  D chain = wandq_ver(IndexedAssertion{wn, ws, a2w},
                      IndexedAssertion{wn, ws, b2w},
                      IndexedAssertion{wn, ws, fused});
  D wpart = trans(D::star_mono(refl(w2), t3), chain);
  wpart = trans(wpart, rewrite_under_wand(wn, ws, a2w, fused,
                                          Term::set(u, {i}, f.body),
                                          Term::set(u, path, wvar)));

  D dfirst = D::prop_rewrite(refl(c2g), Term::get(get_i, rest),
                             Term::get(u, path), false);

  D out = trans(l1, D::star_mono(r, refl(w1)));
  out = trans(out, rearrange(Assertion::star(Assertion::star(c2g, w2), w1),
                             Assertion::star(c2g, Assertion::star(w2, w1))));
  return trans(out, D::star_mono(dfirst, wpart));
}

}  // namespace

Derivation focus_path(const Term& p, const Term& u, const PathV& path) {
  if (u.sort().kind != SortKind::Agg)
    throw ShapeError("focus_path: subject must be an aggregate");
  if (agg_shape(u.sort().shape).leaf)
    throw ShapeError("focus_path: subject is a bare scalar cell");
  agg_locate(u.sort().shape, path);  // validates; throws PathError

  std::set<std::string> avoid;
  for (const std::string& n : data_at(p, u).fv()) avoid.insert(n);
  std::string wn = fresh_name("w", avoid);
  avoid.insert(wn);
  std::string vn = fresh_name("v", avoid);
  return focus_impl(p, u, path, vn, wn);
}

// ---------------------------------------------------------------- //
// Oracle claims.

namespace {
Assertion sf(const Term& l, const Term& p, const Term& q) {
  return Assertion::pred("lseg_smallfoot", {l, p, q});
}
}  // namespace

Entailment smallfoot_concat_claim(const Term& l1, const Term& l2, const Term& p,
                                  const Term& q, const Term& r) {
  return Entailment(Assertion::star(sf(l1, p, q), sf(l2, q, r)),
                    sf(Term::list_app(l1, l2), p, r));
}

Entailment smallfoot_weaker_claim(const Term& l1, const Term& l2, const Term& l3,
                                  const Term& p, const Term& q, const Term& r) {
  Assertion tail = sf(l3, r, Term::null_lit());
  return Entailment(
      Assertion::star(sf(l1, p, q), Assertion::star(sf(l2, q, r), tail)),
      Assertion::star(sf(Term::list_app(l1, l2), p, r), tail));
}

Entailment lseg_concat_claim(const Term& l1, const Term& l2, const Term& p,
                             const Term& q, const Term& r) {
  return Entailment(
      Assertion::star(Assertion::pred("lseg", {l1, p, q}),
                      Assertion::pred("lseg", {l2, q, r})),
      Assertion::pred("lseg", {Term::list_app(l1, l2), p, r}));
}

Entailment partial_unrolled_claim(const Term& c, const Term& r, const Term& i) {
  return Entailment(Assertion::pred("partial_treebox_rep_R", {c, r, i}),
                    Assertion::pred("partialT_treebox", {c, r, i}));
}

std::pair<Assertion, Assertion> treebox_forms(const Term& t, const Term& b) {
  Term p = Term::var("p^", Sort(SortKind::Val));
  Assertion boxed = Assertion::pred("treebox_rep", {t, b});
  Assertion open = Assertion::exists(
      "p^", Sort(SortKind::Val),
      Assertion::star(Assertion::pto(b, p),
                      Assertion::pred("tree_rep", {t, p})));
  return {boxed, open};
}

// ---------------------------------------------------------------- //
// Reference layouts.

namespace {

uint32_t place_tree(const TreeV& t, Heap& h, uint32_t& next) {
  if (!t) return 0;
  uint32_t a = next;
  next += 4;
  uint32_t l = place_tree(t->left, h, next);
  uint32_t r = place_tree(t->right, h, next);
  h.set(a + 0, Value::of_int(t->key));
  h.set(a + 1, t->val);
  h.set(a + 2, l ? Value::addr(l) : Value::null());
  h.set(a + 3, r ? Value::addr(r) : Value::null());
  return a;
}

}  // namespace

LayoutResult layout_tree(const TreeV& t, uint32_t base) {
  Heap h;
  uint32_t next = base;
  uint32_t root = place_tree(t, h, next);
  return {h, root ? Value::addr(root) : Value::null(), next};
}

LayoutResult layout_treebox(const TreeV& t, uint32_t box) {
  Heap h;
  uint32_t next = box + 1;
  uint32_t root = place_tree(t, h, next);
  h.set(box, root ? Value::addr(root) : Value::null());
  return {h, Value::addr(box), next};
}

LayoutResult layout_list(const ListValV& l, uint32_t base) {
  Heap h;
  uint32_t next = base;
  uint32_t first = 0, prev = 0;
  for (const Value& v : l) {
    uint32_t a = next;
    next += 2;
    h.set(a, v);
    if (prev)
      h.set(prev + 1, Value::addr(a));
    else
      first = a;
    prev = a;
  }
  if (prev) h.set(prev + 1, Value::null());
  return {h, first ? Value::addr(first) : Value::null(), next};
}

// ---------------------------------------------------------------- //
// Random generators.

Value random_leaf_value(std::mt19937& rng) {
  switch (rng() % 3) {
    case 0: return Value::null();
    case 1: return Value::of_int((int64_t)(rng() % 4));
    default: return Value::addr(1 + rng() % 4);
  }
}

TreeV random_search_tree(std::mt19937& rng, int max_nodes, int64_t key_range) {
  int n = (int)(rng() % (uint32_t)(max_nodes + 1));
  TreeV t;
  for (int i = 0; i < n; ++i)
    t = tree_ins(t, (int64_t)(rng() % (uint64_t)key_range),
                 random_leaf_value(rng));
  return t;
}

TreeV random_tree(std::mt19937& rng, int max_depth, int64_t key_range) {
  if (max_depth <= 0 || rng() % 4 == 0) return nullptr;
  TreeV l = random_tree(rng, max_depth - 1, key_range);
  TreeV r = random_tree(rng, max_depth - 1, key_range);
  return tree_node(l, (int64_t)(rng() % (uint64_t)key_range),
                   random_leaf_value(rng), r);
}

TreeCtxV random_ctx(std::mt19937& rng, int max_frames, int64_t key_range) {
  TreeCtxV c;
  int n = (int)(rng() % (uint32_t)(max_frames + 1));
  for (int i = 0; i < n; ++i) {
    CtxFrameV f;
    f.hole_left = rng() % 2 == 0;
    f.key = (int64_t)(rng() % (uint64_t)key_range);
    f.val = random_leaf_value(rng);
    f.sub = random_tree(rng, 2, key_range);
    c.push_back(f);
  }
  return c;
}

}  // namespace sepwand
