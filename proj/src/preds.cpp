#include "sepwand/preds.hpp"

#include <map>

namespace sepwand {
namespace {

struct Registry {
  std::map<std::string, PredDef> defs;
  bool seeded = false;
};

Registry& raw() {
  static Registry r;
  return r;
}

const Sort kVal{SortKind::Val};
const Sort kInt{SortKind::Int};
const Sort kTree{SortKind::Tree};
const Sort kList{SortKind::List};
const Sort kCtx{SortKind::Ctx};
const Sort kMap{SortKind::Map};

Assertion cant(const std::string& why) { throw CannotUnfold(why); }

// tree_rep(t, p): p is the address of the root node, null for the
// empty tree. Four cells per node: key, value, left child pointer,
// right child pointer, at offsets 0..3.
Assertion unfold_tree_rep(const std::vector<Term>& a) {
  const Term& t = a[0];
  const Term& p = a[1];
  if (t.kind() == Tk::TreeE)
    return Assertion::and_pure(Prop::eq(p, Term::null_lit()), Assertion::emp());
  if (t.kind() != Tk::TreeT) return cant("tree_rep structure argument " + t.str());
  Term pa = Term::var("pa^", kVal);
  Term pb = Term::var("pb^", kVal);
  Assertion body = Assertion::star(
      Assertion::pto(Term::field(p, 0), t.kids()[1]),
      Assertion::star(
          Assertion::pto(Term::field(p, 1), t.kids()[2]),
          Assertion::star(
              Assertion::pto(Term::field(p, 2), pa),
              Assertion::star(Assertion::pto(Term::field(p, 3), pb),
                              Assertion::star(Assertion::pred("tree_rep", {t.kids()[0], pa}),
                                              Assertion::pred("tree_rep", {t.kids()[3], pb}))))));
  return Assertion::exists("pa^", kVal, Assertion::exists("pb^", kVal, body));
}

// treebox_rep(t, b): b is the address of a cell holding the root
// pointer. Subtrees hang off the child *fields*, which act as boxes
// themselves.
Assertion unfold_treebox_rep(const std::vector<Term>& a) {
  const Term& t = a[0];
  const Term& b = a[1];
  if (t.kind() == Tk::TreeE)
    return Assertion::and_pure(Prop::true_(), Assertion::pto(b, Term::null_lit()));
  if (t.kind() != Tk::TreeT) return cant("treebox_rep structure argument " + t.str());
  Term q = Term::var("q^", kVal);
  Assertion body = Assertion::star(
      Assertion::pto(b, q),
      Assertion::star(
          Assertion::pto(Term::field(q, 0), t.kids()[1]),
          Assertion::star(
              Assertion::pto(Term::field(q, 1), t.kids()[2]),
              Assertion::star(
                  Assertion::pred("treebox_rep", {t.kids()[0], Term::field(q, 2)}),
                  Assertion::pred("treebox_rep", {t.kids()[3], Term::field(q, 3)})))));
  return Assertion::exists("q^", kVal, body);
}

// listrep(l, p): head cell at offset 0, tail pointer at offset 1.
Assertion unfold_listrep(const std::vector<Term>& a) {
  const Term& l = a[0];
  const Term& p = a[1];
  if (l.kind() == Tk::ListNil)
    return Assertion::and_pure(Prop::eq(p, Term::null_lit()), Assertion::emp());
  if (l.kind() != Tk::ListCons) return cant("listrep structure argument " + l.str());
  Term q = Term::var("q^", kVal);
  return Assertion::star(
      Assertion::pto(Term::field(p, 0), l.kids()[0]),
      Assertion::exists("q^", kVal,
                        Assertion::star(Assertion::pto(Term::field(p, 1), q),
                                        Assertion::pred("listrep", {l.kids()[1], q}))));
}

// lseg(l, p, q): the wand-based segment. Whatever list hangs off q,
// prefixing it with l hangs off p.
Assertion unfold_lseg(const std::vector<Term>& a) {
  Term rest = Term::var("l^", kList);
  return Assertion::forall(
      "l^", kList,
      Assertion::wand(Assertion::pred("listrep", {rest, a[2]}),
                      Assertion::pred("listrep", {Term::list_app(a[0], rest), a[1]})));
}

// lseg_smallfoot(l, p, q): the classical inductive segment. The
// cons case's p != q guard is what breaks unconditional transitivity.
Assertion unfold_lseg_smallfoot(const std::vector<Term>& a) {
  const Term& l = a[0];
  const Term& p = a[1];
  const Term& q = a[2];
  if (l.kind() == Tk::ListNil)
    return Assertion::and_pure(Prop::eq(p, q), Assertion::emp());
  if (l.kind() != Tk::ListCons)
    return cant("lseg_smallfoot structure argument " + l.str());
  Term r = Term::var("r^", kVal);
  return Assertion::and_pure(
      Prop::neq(p, q),
      Assertion::exists(
          "r^", kVal,
          Assertion::star(
              Assertion::pto(Term::field(p, 0), l.kids()[0]),
              Assertion::star(Assertion::pto(Term::field(p, 1), r),
                              Assertion::pred("lseg_smallfoot", {l.kids()[1], r, q})))));
}

Assertion unfold_partialT_treebox(const std::vector<Term>& a) {
  Term t = Term::var("t^", kTree);
  return Assertion::forall(
      "t^", kTree,
      Assertion::wand(
          Assertion::pred("treebox_rep", {t, a[2]}),
          Assertion::pred("treebox_rep", {Term::apply(a[0], t), a[1]})));
}

Assertion unfold_partialT_tree(const std::vector<Term>& a) {
  Term t = Term::var("t^", kTree);
  return Assertion::forall(
      "t^", kTree,
      Assertion::wand(Assertion::pred("tree_rep", {t, a[2]}),
                      Assertion::pred("tree_rep", {Term::apply(a[0], t), a[1]})));
}

// partial_treebox_rep_R(P, r, i): the recursive characterization of a
// boxed-tree context as a chain of node records along the hole path.
// Only literal context spines unfold.
Assertion unfold_partialT_treebox_R(const std::vector<Term>& a) {
  const Term& c = a[0];
  const Term& r = a[1];
  const Term& i = a[2];
  if (c.kind() != Tk::CtxLit)
    return cant("partial_treebox_rep_R needs a literal context, got " + c.str());
  if (c.ctx_size() == 0)
    return Assertion::and_pure(Prop::eq(r, i), Assertion::emp());
  std::vector<CtxFrameT> rest;
  for (size_t k = 1; k < c.ctx_size(); ++k)
    rest.push_back(CtxFrameT{c.ctx_hole_left(k), c.ctx_key(k), c.ctx_val(k), c.ctx_sub(k)});
  Term restc = Term::ctx(rest);
  Term q = Term::var("q^", kVal);
  Assertion hole_side =
      Assertion::pred("partial_treebox_rep_R",
                      {restc, Term::field(q, c.ctx_hole_left(0) ? 2 : 3), i});
  Assertion sub_side = Assertion::pred(
      "treebox_rep", {c.ctx_sub(0), Term::field(q, c.ctx_hole_left(0) ? 3 : 2)});
  // Hole on the left: recurse through q.left, subtree on q.right;
  // mirrored otherwise. Spatial order fixed as hole side then subtree.
  Assertion body = Assertion::star(
      Assertion::pto(r, q),
      Assertion::star(
          Assertion::pto(Term::field(q, 0), c.ctx_key(0)),
          Assertion::star(Assertion::pto(Term::field(q, 1), c.ctx_val(0)),
                          Assertion::star(hole_side, sub_side))));
  return Assertion::exists("q^", kVal, body);
}

// data_at(p, u): u laid out flat starting at p, one cell per scalar
// leaf. Scalar u unfolds to a single points-to; a tuple literal
// unfolds one level, to data_at of each field at its flat offset.
void check_data_at(const std::vector<Term>& a) {
  if (a.size() != 2) throw SortError("data_at expects 2 arguments");
  if (!(a[0].sort() == kVal)) throw SortError("data_at address must be Val");
  SortKind k = a[1].sort().kind;
  if (k != SortKind::Int && k != SortKind::Val && k != SortKind::Agg)
    throw SortError("data_at payload must be Int, Val, or an aggregate");
}

Assertion unfold_data_at(const std::vector<Term>& a) {
  const Term& p = a[0];
  const Term& u = a[1];
  if (u.sort().kind != SortKind::Agg) return Assertion::pto(p, u);
  if (u.kind() != Tk::AggTuple)
    return cant("data_at payload " + u.str() + " is not a tuple literal");
  const AggShape& shape = agg_shape(u.sort().shape);
  Assertion out = Assertion::emp();
  bool have = false;
  int off = shape.leaf_count;
  for (size_t idx = shape.fields.size(); idx-- > 0;) {
    off -= agg_shape(shape.fields[idx]).leaf_count;
    Assertion part = Assertion::pred("data_at", {Term::field(p, off), u.kids()[idx]});
    out = have ? Assertion::star(part, out) : part;
    have = true;
  }
  return out;
}

// mapbox_rep(m, b): some search tree with abstraction m sits in the
// box at b. The functional layer's insert/lookup specs live here.
Assertion unfold_mapbox_rep(const std::vector<Term>& a) {
  Term t = Term::var("t^", kTree);
  return Assertion::exists(
      "t^", kTree,
      Assertion::and_pure(
          Prop::and_(Prop::abs(t, a[0]), Prop::search_tree(t)),
          Assertion::pred("treebox_rep", {t, a[1]})));
}

// map_rep(m, p): same thing without the box indirection; p points at
// the root node directly.
Assertion unfold_map_rep(const std::vector<Term>& a) {
  Term t = Term::var("t^", kTree);
  return Assertion::exists(
      "t^", kTree,
      Assertion::and_pure(
          Prop::and_(Prop::abs(t, a[0]), Prop::search_tree(t)),
          Assertion::pred("tree_rep", {t, a[1]})));
}

void seed(Registry& r) {
  auto add = [&](PredDef d) { r.defs.emplace(d.name, std::move(d)); };
  add({"tree_rep", {kTree, kVal}, nullptr, 0, false, unfold_tree_rep});
  add({"treebox_rep", {kTree, kVal}, nullptr, 0, false, unfold_treebox_rep});
  add({"listrep", {kList, kVal}, nullptr, 0, false, unfold_listrep});
  add({"lseg", {kList, kVal, kVal}, nullptr, -1, true, unfold_lseg});
  add({"lseg_smallfoot", {kList, kVal, kVal}, nullptr, 0, false, unfold_lseg_smallfoot});
  add({"partialT_treebox", {kCtx, kVal, kVal}, nullptr, -1, true, unfold_partialT_treebox});
  add({"partialT_tree", {kCtx, kVal, kVal}, nullptr, -1, true, unfold_partialT_tree});
  add({"partial_treebox_rep_R", {kCtx, kVal, kVal}, nullptr, 0, false, unfold_partialT_treebox_R});
  add({"data_at", {}, check_data_at, 1, false, unfold_data_at});
  add({"mapbox_rep", {kMap, kVal}, nullptr, -1, false, unfold_mapbox_rep});
  add({"map_rep", {kMap, kVal}, nullptr, -1, false, unfold_map_rep});
}

Registry& reg() {
  Registry& r = raw();
  if (!r.seeded) {
    r.seeded = true;  // set first: seeding itself constructs no Pred nodes
    seed(r);
  }
  return r;
}

}  // namespace

void pred_register(PredDef def) {
  Registry& r = reg();
  if (def.name.empty()) throw Error("predicate with empty name");
  auto it = r.defs.find(def.name);
  if (it != r.defs.end()) throw Error("predicate '" + def.name + "' already registered");
  r.defs.emplace(def.name, std::move(def));
}

const PredDef* pred_lookup(const std::string& name) {
  Registry& r = reg();
  auto it = r.defs.find(name);
  return it == r.defs.end() ? nullptr : &it->second;
}

const PredDef& pred_get(const std::string& name) {
  const PredDef* d = pred_lookup(name);
  if (!d) throw SortError("unknown predicate '" + name + "'");
  return *d;
}

std::vector<std::string> pred_names() {
  Registry& r = reg();
  std::vector<std::string> out;
  for (const auto& [name, _] : r.defs) out.push_back(name);
  return out;
}

Assertion unfold_pred(const Assertion& occurrence) {
  if (occurrence.kind() != Ak::Pred)
    throw CannotUnfold("not a predicate occurrence: " + occurrence.str());
  const PredDef& def = pred_get(occurrence.pred_name());
  return def.unfold(occurrence.terms());
}

}  // namespace sepwand
