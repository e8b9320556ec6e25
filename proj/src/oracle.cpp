#include "sepwand/oracle.hpp"

#include <algorithm>
#include <climits>
#include <functional>
#include <optional>
#include <set>

#include "sepwand/preds.hpp"

namespace sepwand {

std::vector<Value> OracleBounds::payloads() const {
  if (!payload_values.empty()) return payload_values;
  std::vector<Value> out;
  out.push_back(Value::null());
  for (int a = 1; a <= addr_count; ++a) out.push_back(Value::addr((uint32_t)a));
  return out;
}

bool OracleBounds::in_bounds(const Heap& h) const {
  if (h.size() > max_heap_cells) return false;
  uint64_t uni = 0;
  for (int a = 1; a <= addr_count; ++a) uni |= (uint64_t)1 << a;
  return (h.mask & ~uni) == 0;
}

namespace {

struct Ctx {
  const OracleBounds& b;
  uint64_t universe = 0;  // bit a set <=> address a is in the universe
  std::vector<Value> pay;
  bool pay_has_null = false;
};

Ctx make_ctx(const OracleBounds& b) {
  Ctx cx{b, 0, b.payloads(), false};
  for (int a = 1; a <= b.addr_count; ++a) cx.universe |= (uint64_t)1 << a;
  for (const Value& v : cx.pay)
    if (v.is_null()) cx.pay_has_null = true;
  return cx;
}

Heap heap_sub(const Heap& h, uint64_t mask) {
  Heap r = h;
  r.mask = mask;
  return r;
}

Heap heap_minus(const Heap& h, const Heap& part) {
  Heap r = h;
  r.mask &= ~part.mask;
  return r;
}

// Does h extend core cell for cell (same addresses, same payloads)?
bool heap_covers(const Heap& h, const Heap& core) {
  if ((h.mask & core.mask) != core.mask) return false;
  for (uint32_t a = 1; a <= kMaxAddr; ++a)
    if (core.present(a) && !(h.at(a) == core.at(a))) return false;
  return true;
}

std::vector<uint32_t> heap_cells(const Heap& h) {
  std::vector<uint32_t> out;
  for (uint32_t a = 1; a <= kMaxAddr; ++a)
    if (h.present(a)) out.push_back(a);
  return out;
}

// ---------------------------------------------------------------- universes

std::vector<TreeV> gen_trees(int depth, const Ctx& cx) {
  std::vector<TreeV> out;
  out.push_back(nullptr);
  if (depth <= 0) return out;
  std::vector<TreeV> sub = gen_trees(depth - 1, cx);
  for (const TreeV& l : sub)
    for (int64_t k : cx.b.int_values)
      for (const Value& v : cx.pay)
        for (const TreeV& r : sub) out.push_back(tree_node(l, k, v, r));
  return out;
}

// Context spines: frame i (outermost first) carries a bystander
// subtree of depth at most budget-1-i, so filling the hole with a
// bounded tree yields a tree that is itself within the tree bound.
std::vector<TreeCtxV> gen_ctxs(int budget, const Ctx& cx) {
  std::vector<TreeCtxV> out;
  out.push_back({});
  if (budget <= 0) return out;
  std::vector<TreeV> subs = gen_trees(budget - 1, cx);
  std::vector<TreeCtxV> rest = gen_ctxs(budget - 1, cx);
  for (int hl = 1; hl >= 0; --hl)
    for (int64_t k : cx.b.int_values)
      for (const Value& v : cx.pay)
        for (const TreeV& s : subs)
          for (const TreeCtxV& r : rest) {
            TreeCtxV c;
            c.push_back(CtxFrameV{hl == 1, k, v, s});
            c.insert(c.end(), r.begin(), r.end());
            out.push_back(std::move(c));
          }
  return out;
}

std::vector<ListValV> gen_lists(const Ctx& cx) {
  std::vector<ListValV> out{{}};
  size_t lo = 0;
  for (int len = 1; len <= cx.b.max_list_len; ++len) {
    size_t hi = out.size();
    for (size_t i = lo; i < hi; ++i)
      for (const Value& v : cx.pay) {
        ListValV l = out[i];
        l.push_back(v);
        out.push_back(std::move(l));
      }
    lo = hi;
  }
  return out;
}

void agg_leaf_kinds(int shape, std::vector<SortKind>& out) {
  const AggShape& s = agg_shape(shape);
  if (s.leaf) {
    out.push_back(s.leaf_kind);
    return;
  }
  for (int f : s.fields) agg_leaf_kinds(f, out);
}

std::vector<AggV> gen_aggs(int shape, const Ctx& cx) {
  std::vector<SortKind> kinds;
  agg_leaf_kinds(shape, kinds);
  std::vector<std::vector<Value>> doms;
  for (SortKind k : kinds) {
    if (k == SortKind::Int) {
      std::vector<Value> d;
      for (int64_t i : cx.b.int_values) d.push_back(Value::of_int(i));
      doms.push_back(std::move(d));
    } else {
      doms.push_back(cx.pay);
    }
  }
  std::vector<AggV> out;
  AggV cur{shape, std::vector<Value>(kinds.size())};
  std::function<void(size_t)> go = [&](size_t i) {
    if (i == doms.size()) {
      out.push_back(cur);
      return;
    }
    for (const Value& v : doms[i]) {
      cur.leaves[i] = v;
      go(i + 1);
    }
  };
  go(0);
  return out;
}

std::vector<CVal> universe_of(const Sort& s, const Ctx& cx) {
  std::vector<CVal> out;
  switch (s.kind) {
    case SortKind::Val:
      for (const Value& v : cx.pay) out.emplace_back(v);
      return out;
    case SortKind::Int: {
      std::vector<int64_t> is = cx.b.int_values;
      std::sort(is.begin(), is.end());
      is.erase(std::unique(is.begin(), is.end()), is.end());
      for (int64_t i : is) out.emplace_back(Value::of_int(i));
      return out;
    }
    case SortKind::Tree:
      for (TreeV& t : gen_trees(cx.b.max_tree_depth, cx)) out.emplace_back(std::move(t));
      return out;
    case SortKind::List:
      for (ListValV& l : gen_lists(cx)) out.emplace_back(std::move(l));
      return out;
    case SortKind::Ctx:
      for (TreeCtxV& c : gen_ctxs(cx.b.max_tree_depth, cx)) out.emplace_back(std::move(c));
      return out;
    case SortKind::Agg:
      for (AggV& u : gen_aggs(s.shape, cx)) out.emplace_back(std::move(u));
      return out;
    default:
      throw EnumError("sort " + s.str() + " has no bounded universe");
  }
}

// ------------------------------------------------------------- model sets

// A family denotes the heaps h such that h extends `core` and the
// remaining cells can be split into one part per group, where each
// part intersects every address set of its group. Families arise from
// wand-shaped conjuncts, whose models are "anything occupying the
// wand argument's footprint"; the witness-cell bookkeeping keeps
// star-conjunction of such conjuncts exact (the parts must be
// disjoint because star splits the heap).
struct Family {
  Heap core;
  std::vector<std::vector<std::vector<uint32_t>>> groups;
};

struct ModelSet {
  std::vector<Heap> exact;
  std::vector<Family> fams;
};

bool assign_groups(const std::vector<std::vector<std::vector<uint32_t>>>& groups,
                   size_t gi, uint64_t avail, uint64_t used, int budget);

bool hit_sets(const std::vector<std::vector<std::vector<uint32_t>>>& groups,
              size_t gi, size_t si, uint64_t avail, uint64_t used, uint64_t gmask,
              int budget) {
  const auto& sets = groups[gi];
  if (budget >= 0 && __builtin_popcountll(gmask) > budget) return false;
  if (si == sets.size()) {
    int spent = __builtin_popcountll(gmask);
    return assign_groups(groups, gi + 1, avail, used | gmask,
                         budget < 0 ? budget : budget - spent);
  }
  for (uint32_t a : sets[si]) {
    if (a < 1 || a > kMaxAddr) continue;
    uint64_t bit = (uint64_t)1 << a;
    if (gmask & bit) {
      if (hit_sets(groups, gi, si + 1, avail, used, gmask, budget)) return true;
    } else if ((avail & bit) && !(used & bit)) {
      if (hit_sets(groups, gi, si + 1, avail, used, gmask | bit, budget)) return true;
    }
  }
  return false;
}

bool assign_groups(const std::vector<std::vector<std::vector<uint32_t>>>& groups,
                   size_t gi, uint64_t avail, uint64_t used, int budget) {
  if (gi == groups.size()) return true;
  return hit_sets(groups, gi, 0, avail, used, 0, budget);
}

bool family_member(const Heap& h, const Family& f) {
  if (!heap_covers(h, f.core)) return false;
  return assign_groups(f.groups, 0, h.mask & ~f.core.mask, 0, -1);
}

// Can any in-bounds heap belong to the family at all?
bool family_feasible(const Family& f, const Ctx& cx) {
  if ((f.core.mask & ~cx.universe) != 0) return false;
  int budget = cx.b.max_heap_cells - f.core.size();
  if (budget < 0) return false;
  return assign_groups(f.groups, 0, cx.universe & ~f.core.mask, 0, budget);
}

void ms_norm(ModelSet& ms) {
  std::sort(ms.exact.begin(), ms.exact.end());
  ms.exact.erase(std::unique(ms.exact.begin(), ms.exact.end()), ms.exact.end());
}

ModelSet ms_join(const ModelSet& x, const ModelSet& y) {
  ModelSet r;
  for (const Heap& a : x.exact)
    for (const Heap& b : y.exact)
      if (a.disjoint(b)) r.exact.push_back(a.join(b));
  for (const Heap& a : x.exact)
    for (const Family& f : y.fams)
      if (a.disjoint(f.core)) r.fams.push_back(Family{a.join(f.core), f.groups});
  for (const Family& f : x.fams)
    for (const Heap& b : y.exact)
      if (b.disjoint(f.core)) r.fams.push_back(Family{f.core.join(b), f.groups});
  for (const Family& fa : x.fams)
    for (const Family& fb : y.fams)
      if (fa.core.disjoint(fb.core)) {
        Family f{fa.core.join(fb.core), fa.groups};
        f.groups.insert(f.groups.end(), fb.groups.begin(), fb.groups.end());
        r.fams.push_back(std::move(f));
      }
  ms_norm(r);
  return r;
}

// Intersections only stay representable while every family is in the
// "no core, single group" shape wand models produce; there a merged
// single group expresses that the same heap meets both constraint
// lists. Anything else reports failure and the caller falls back.
bool fam_intersectable(const Family& f) {
  return f.core.mask == 0 && f.groups.size() == 1;
}

std::optional<ModelSet> ms_intersect(const ModelSet& x, const ModelSet& y) {
  ModelSet r;
  for (const Heap& h : x.exact) {
    bool in = std::binary_search(y.exact.begin(), y.exact.end(), h);
    if (!in)
      for (const Family& f : y.fams)
        if (family_member(h, f)) {
          in = true;
          break;
        }
    if (in) r.exact.push_back(h);
  }
  for (const Heap& h : y.exact) {
    for (const Family& f : x.fams)
      if (family_member(h, f)) {
        r.exact.push_back(h);
        break;
      }
  }
  auto everything = [](const Family& f) { return f.core.mask == 0 && f.groups.empty(); };
  for (const Family& fa : x.fams)
    for (const Family& fb : y.fams) {
      if (everything(fa)) {
        r.fams.push_back(fb);
        continue;
      }
      if (everything(fb)) {
        r.fams.push_back(fa);
        continue;
      }
      if (!fam_intersectable(fa) || !fam_intersectable(fb)) return std::nullopt;
      Family f{Heap{}, {fa.groups[0]}};
      f.groups[0].insert(f.groups[0].end(), fb.groups[0].begin(), fb.groups[0].end());
      r.fams.push_back(std::move(f));
    }
  ms_norm(r);
  return r;
}

// ------------------------------------------------------------- satisfaction

bool sat(const Heap& h, Env& env, const Assertion& a, const Ctx& cx);
std::optional<ModelSet> try_models(const Assertion& a, Env& env, const Ctx& cx);

// Enumerates every heap whose cells lie in addr_mask (at most
// max_cells of them, payloads from the universe), including whatever
// cur already holds. Returns false when the callback aborted.
template <typename Fn>
bool enum_heaps_rec(uint64_t addr_mask, int budget, uint32_t a, Heap& cur,
                    const Ctx& cx, Fn& fn) {
  while (a <= kMaxAddr && !((addr_mask >> a) & 1)) ++a;
  if (a > kMaxAddr) return fn(cur);
  if (!enum_heaps_rec(addr_mask, budget, a + 1, cur, cx, fn)) return false;
  if (budget > 0) {
    for (const Value& v : cx.pay) {
      cur.set(a, v);
      if (!enum_heaps_rec(addr_mask, budget - 1, a + 1, cur, cx, fn)) {
        cur.erase(a);
        return false;
      }
    }
    cur.erase(a);
  }
  return true;
}

template <typename Fn>
bool enum_heaps(uint64_t addr_mask, int max_cells, const Ctx& cx, Heap base, Fn fn) {
  return enum_heaps_rec(addr_mask & ~base.mask, max_cells, 1, base, cx, fn);
}

// Unfold a predicate occurrence on ground arguments. Every argument
// is evaluated and turned back into a literal first: an occurrence
// produced by a previous unfold may mention that unfold's binders,
// and passing those names into the next unfold verbatim would let its
// own binders capture them. Map-valued arguments have no literal form
// and stay as written; no unfold binds a map variable, so they are
// safe from capture.
Assertion pred_body(const Assertion& a, const Env& env) {
  const PredDef& d = pred_get(a.pred_name());
  std::vector<Term> args = a.terms();
  for (size_t i = 0; i < args.size(); ++i) {
    if (d.structure_arg >= 0 && i == (size_t)d.structure_arg) {
      args[i] = reify(eval_term(args[i], env));
      continue;
    }
    CVal v = eval_term(args[i], env);
    if (!std::holds_alternative<FinMapV>(v.v) && !std::holds_alternative<PathV>(v.v))
      args[i] = reify(v);
  }
  return d.unfold(args);
}

struct Scope {
  Env& env;
  std::string name;
  std::optional<CVal> saved;
  Scope(Env& e, const std::string& n) : env(e), name(n) {
    auto it = env.find(name);
    if (it != env.end()) saved = it->second;
  }
  void bind(const CVal& v) { env[name] = v; }
  ~Scope() {
    if (saved)
      env[name] = *saved;
    else
      env.erase(name);
  }
};

// Address position of a points-to. Unfolding a list or tree shape at a
// pointer that turns out to be null produces field offsets from null;
// the cell assertion is then simply unsatisfiable, not an evaluation
// error, so resolve the base here instead of letting eval_term throw.
std::optional<uint32_t> cell_addr(const Term& t, Env& env) {
  if (t.kind() == Tk::FieldAddr) {
    CVal base = eval_term(t.kids()[0], env);
    if (!base.is_value() || !base.value().is_addr()) return std::nullopt;
    uint32_t at = base.value().a + t.offset();
    if (at < 1 || at > kMaxAddr) return std::nullopt;
    return at;
  }
  CVal addr = eval_term(t, env);
  if (!addr.is_value() || !addr.value().is_addr()) return std::nullopt;
  uint32_t at = addr.value().a;
  if (at < 1 || at > kMaxAddr) return std::nullopt;
  return at;
}

bool sat(const Heap& h, Env& env, const Assertion& a, const Ctx& cx) {
  switch (a.kind()) {
    case Ak::Emp:
      return h.mask == 0;
    case Ak::PointsTo: {
      auto at = cell_addr(a.terms()[0], env);
      if (!at) return false;
      CVal val = eval_term(a.terms()[1], env);
      return h.size() == 1 && h.present(*at) && val.is_value() && h.at(*at) == val.value();
    }
    case Ak::Star: {
      uint64_t m = h.mask;
      uint64_t s = m;
      while (true) {
        if (sat(heap_sub(h, s), env, a.kids()[0], cx) &&
            sat(heap_sub(h, m & ~s), env, a.kids()[1], cx))
          return true;
        if (s == 0) break;
        s = (s - 1) & m;
      }
      return false;
    }
    case Ak::Wand: {
      auto ext = try_models(a.kids()[0], env, cx);
      if (ext && ext->fams.empty()) {
        for (const Heap& m1 : ext->exact) {
          if ((m1.mask & ~cx.universe) != 0) continue;
          if (m1.size() > cx.b.max_heap_cells) continue;
          if (!h.disjoint(m1)) continue;
          if (!sat(h.join(m1), env, a.kids()[1], cx)) return false;
        }
        return true;
      }
      // No constructive enumeration of the argument: quantify over
      // raw extension heaps. Exponential in the universe, so only
      // reasonable at small bounds.
      return enum_heaps(cx.universe & ~h.mask, cx.b.max_heap_cells, cx, Heap{},
                        [&](const Heap& m1) {
                          if (!sat(m1, env, a.kids()[0], cx)) return true;
                          return sat(h.join(m1), env, a.kids()[1], cx);
                        });
    }
    case Ak::Forall: {
      Scope sc(env, a.binder());
      for (const CVal& v : universe_of(a.binder_sort(), cx)) {
        sc.bind(v);
        if (!sat(h, env, a.kids()[0], cx)) return false;
      }
      return true;
    }
    case Ak::Exists: {
      Scope sc(env, a.binder());
      for (const CVal& v : universe_of(a.binder_sort(), cx)) {
        sc.bind(v);
        if (sat(h, env, a.kids()[0], cx)) return true;
      }
      return false;
    }
    case Ak::AndPure:
      return eval_prop(a.prop(), env) && sat(h, env, a.kids()[0], cx);
    case Ak::Pred:
      return sat(h, env, pred_body(a, env), cx);
  }
  return false;
}

// ------------------------------------------------------ constructive models

// Exact model set of a list segment. For a null end the segment is a
// complete list. For an end whose node cells fit the universe the
// models are the proper chains from start to end plus every heap
// touching the end's node footprint {end, end+1}: such a heap
// overlaps every possible continuation of the segment, so the
// defining wand holds vacuously. When no continuation fits the
// bounds at all, every heap is a model.
bool lseg_blockable(const Value& end, const Ctx& cx) {
  return end.is_addr() && cx.b.in_universe(end.a) && cx.b.in_universe(end.a + 1) &&
         cx.b.max_list_len >= 1 && cx.pay_has_null && !cx.pay.empty();
}

bool pay_contains(const Ctx& cx, const Value& v) {
  for (const Value& p : cx.pay)
    if (p == v) return true;
  return false;
}

std::vector<Heap> chain_models(const ListValV& l, size_t i, const Value& at,
                               const Value& end, const Ctx& cx) {
  std::vector<Heap> out;
  if (i == l.size()) {
    if (at == end) out.push_back(Heap{});
    return out;
  }
  if (!at.is_addr() || !cx.b.in_universe(at.a) || !cx.b.in_universe(at.a + 1)) return out;
  std::vector<Value> nexts;
  if (i + 1 == l.size()) {
    if (pay_contains(cx, end)) nexts.push_back(end);
  } else {
    nexts = cx.pay;
  }
  for (const Value& nx : nexts) {
    Heap node;
    node.set(at.a, l[i]);
    node.set(at.a + 1, nx);
    for (const Heap& rest : chain_models(l, i + 1, nx, end, cx))
      if (node.disjoint(rest)) out.push_back(node.join(rest));
  }
  return out;
}

std::optional<ModelSet> gen_lseg(const ListValV& l, const Value& start,
                                 const Value& end, const Ctx& cx) {
  if (end.is_null()) {
    Assertion full = Assertion::pred("listrep", {reify(CVal(l)), reify(CVal(start))});
    Env closed;
    return try_models(full, closed, cx);
  }
  ModelSet ms;
  if (!lseg_blockable(end, cx)) {
    ms.fams.push_back(Family{Heap{}, {}});  // every heap, vacuously
    return ms;
  }
  ms.exact = chain_models(l, 0, start, end, cx);
  Family f;
  f.groups.push_back({{end.a, end.a + 1}});
  ms.fams.push_back(std::move(f));
  ms_norm(ms);
  return ms;
}

// Model set of P -* Q against one extension footprint hp: either the
// heap overlaps hp (the wand holds vacuously for that extension), or
// joining hp lands in a model of Q. Intersecting over all extensions
// gives the wand's models.
std::optional<ModelSet> wand_models(const Assertion& l, const Assertion& r, Env& env,
                                    const Ctx& cx) {
  auto mlo = try_models(l, env, cx);
  if (!mlo || !mlo->fams.empty()) return std::nullopt;
  std::vector<Heap> exts;
  for (const Heap& hp : mlo->exact) {
    if ((hp.mask & ~cx.universe) != 0) continue;
    if (hp.size() > cx.b.max_heap_cells) continue;
    exts.push_back(hp);
  }
  std::sort(exts.begin(), exts.end());
  exts.erase(std::unique(exts.begin(), exts.end()), exts.end());
  if (exts.empty()) {
    ModelSet all;
    all.fams.push_back(Family{Heap{}, {}});
    return all;
  }
  auto mro = try_models(r, env, cx);
  if (!mro || !mro->fams.empty()) return std::nullopt;
  std::optional<ModelSet> acc;
  for (const Heap& hp : exts) {
    ModelSet cur;
    for (const Heap& g : mro->exact)
      if (heap_covers(g, hp)) cur.exact.push_back(heap_minus(g, hp));
    ms_norm(cur);
    if (hp.mask != 0) {
      Family f;
      f.groups.push_back({heap_cells(hp)});
      cur.fams.push_back(std::move(f));
    }
    if (!acc) {
      acc = std::move(cur);
    } else {
      auto next = ms_intersect(*acc, cur);
      if (!next) return std::nullopt;
      acc = std::move(*next);
    }
  }
  return acc;
}

std::optional<ModelSet> try_models(const Assertion& a, Env& env, const Ctx& cx) {
  switch (a.kind()) {
    case Ak::Emp: {
      ModelSet ms;
      ms.exact.push_back(Heap{});
      return ms;
    }
    case Ak::PointsTo: {
      ModelSet ms;
      auto at = cell_addr(a.terms()[0], env);
      if (at) {
        CVal val = eval_term(a.terms()[1], env);
        if (val.is_value()) {
          Heap h;
          h.set(*at, val.value());
          ms.exact.push_back(h);
        }
      }
      return ms;
    }
    case Ak::Star: {
      auto x = try_models(a.kids()[0], env, cx);
      if (!x) return std::nullopt;
      auto y = try_models(a.kids()[1], env, cx);
      if (!y) return std::nullopt;
      return ms_join(*x, *y);
    }
    case Ak::Wand:
      return wand_models(a.kids()[0], a.kids()[1], env, cx);
    case Ak::Forall: {
      Scope sc(env, a.binder());
      std::optional<ModelSet> acc;
      for (const CVal& v : universe_of(a.binder_sort(), cx)) {
        sc.bind(v);
        auto cur = try_models(a.kids()[0], env, cx);
        if (!cur) return std::nullopt;
        if (!acc) {
          acc = std::move(cur);
        } else {
          auto next = ms_intersect(*acc, *cur);
          if (!next) return std::nullopt;
          acc = std::move(*next);
        }
      }
      if (!acc) {
        // empty universe: the conjunction over nothing holds everywhere
        ModelSet all;
        all.fams.push_back(Family{Heap{}, {}});
        return all;
      }
      return acc;
    }
    case Ak::Exists: {
      Scope sc(env, a.binder());
      ModelSet ms;
      for (const CVal& v : universe_of(a.binder_sort(), cx)) {
        sc.bind(v);
        auto cur = try_models(a.kids()[0], env, cx);
        if (!cur) return std::nullopt;
        ms.exact.insert(ms.exact.end(), cur->exact.begin(), cur->exact.end());
        ms.fams.insert(ms.fams.end(), cur->fams.begin(), cur->fams.end());
      }
      ms_norm(ms);
      return ms;
    }
    case Ak::AndPure: {
      if (!eval_prop(a.prop(), env)) return ModelSet{};
      return try_models(a.kids()[0], env, cx);
    }
    case Ak::Pred: {
      const PredDef& d = pred_get(a.pred_name());
      if (d.name == "lseg") {
        CVal l = eval_term(a.terms()[0], env);
        CVal start = eval_term(a.terms()[1], env);
        CVal end = eval_term(a.terms()[2], env);
        if (!start.is_value() || !end.is_value()) return std::nullopt;
        return gen_lseg(l.list(), start.value(), end.value(), cx);
      }
      if (d.wand_shaped) return std::nullopt;
      return try_models(pred_body(a, env), env, cx);
    }
  }
  return std::nullopt;
}

// --------------------------------------------------- succedent vacuity info

// Sufficient conditions under which a heap satisfies the succedent no
// matter what else it contains: one address set per extension
// footprint, such that touching all of them starves every wand
// instance in the succedent of extensions. Families whose own
// constraints force such touching then satisfy the succedent
// member-free.
struct VacInfo {
  bool always = false;  // the succedent has no extensions at all
  bool usable = false;
  std::vector<std::vector<uint32_t>> sets;
};

VacInfo vac_info(const Assertion& s, Env& env, const Ctx& cx) {
  VacInfo none;
  switch (s.kind()) {
    case Ak::AndPure:
      if (!eval_prop(s.prop(), env)) return none;
      return vac_info(s.kids()[0], env, cx);
    case Ak::Wand: {
      auto mlo = try_models(s.kids()[0], env, cx);
      if (!mlo || !mlo->fams.empty()) return none;
      VacInfo vi;
      vi.usable = true;
      for (const Heap& hp : mlo->exact) {
        if ((hp.mask & ~cx.universe) != 0) continue;
        if (hp.size() > cx.b.max_heap_cells) continue;
        if (hp.mask == 0) return none;  // empty extension cannot be starved
        vi.sets.push_back(heap_cells(hp));
      }
      if (vi.sets.empty()) {
        vi.always = true;
        vi.usable = false;
      }
      return vi;
    }
    case Ak::Forall: {
      Scope sc(env, s.binder());
      VacInfo vi;
      bool all_always = true;
      bool any = false;
      for (const CVal& v : universe_of(s.binder_sort(), cx)) {
        any = true;
        sc.bind(v);
        VacInfo sub = vac_info(s.kids()[0], env, cx);
        if (!sub.usable && !sub.always) return none;
        if (!sub.always) all_always = false;
        vi.sets.insert(vi.sets.end(), sub.sets.begin(), sub.sets.end());
      }
      if (!any || all_always) {
        vi.always = true;
        return vi;
      }
      vi.usable = true;
      return vi;
    }
    case Ak::Pred: {
      const std::string& n = s.pred_name();
      if (n == "lseg") {
        CVal end = eval_term(s.terms()[2], env);
        if (!end.is_value()) return none;
        const Value& e = end.value();
        if (e.is_null()) return none;
        if (!lseg_blockable(e, cx)) {
          VacInfo vi;
          vi.always = true;
          return vi;
        }
        VacInfo vi;
        vi.usable = true;
        vi.sets.push_back({e.a, e.a + 1});
        return vi;
      }
      if (n == "partialT_treebox") {
        CVal i = eval_term(s.terms()[2], env);
        if (!i.is_value()) return none;
        const Value& iv = i.value();
        VacInfo vi;
        if (iv.is_addr() && cx.b.in_universe(iv.a)) {
          vi.usable = true;
          vi.sets.push_back({iv.a});
        } else {
          vi.always = true;  // no boxed tree fits at that address
        }
        return vi;
      }
      if (n == "partialT_tree") {
        CVal i = eval_term(s.terms()[2], env);
        if (!i.is_value()) return none;
        const Value& iv = i.value();
        if (iv.is_null()) return none;  // the empty tree is an unstarvable extension
        VacInfo vi;
        bool nodes_fit = iv.is_addr() && cx.b.in_universe(iv.a) &&
                         cx.b.in_universe(iv.a + 3) && cx.pay_has_null &&
                         !cx.b.int_values.empty() && cx.b.max_tree_depth >= 1;
        if (nodes_fit) {
          vi.usable = true;
          vi.sets.push_back({iv.a, iv.a + 1, iv.a + 2, iv.a + 3});
        } else {
          vi.always = true;
        }
        return vi;
      }
      return none;
    }
    default:
      return none;
  }
}

// Every heap of the family touches every set it carries; if for each
// vacuity set some family constraint set sits inside it (or the core
// already touches it), all members satisfy the succedent.
bool family_covered(const Family& f, const std::vector<std::vector<uint32_t>>& vac) {
  for (const auto& big : vac) {
    uint64_t bigmask = 0;
    for (uint32_t a : big)
      if (a >= 1 && a <= kMaxAddr) bigmask |= (uint64_t)1 << a;
    if (f.core.mask & bigmask) continue;
    bool ok = false;
    for (const auto& g : f.groups) {
      for (const auto& small : g) {
        bool sub = true;
        for (uint32_t a : small)
          if (a < 1 || a > kMaxAddr || !((bigmask >> a) & 1)) {
            sub = false;
            break;
          }
        if (sub) {
          ok = true;
          break;
        }
      }
      if (ok) break;
    }
    if (!ok) return false;
  }
  return true;
}

bool assertion_has_wand(const Assertion& a) {
  switch (a.kind()) {
    case Ak::Wand:
      return true;
    case Ak::Pred:
      return pred_get(a.pred_name()).wand_shaped;
    default:
      for (const Assertion& k : a.kids())
        if (assertion_has_wand(k)) return true;
      return false;
  }
}

void term_vars(const Term& t, const std::set<std::string>& bound,
               std::map<std::string, Sort>& out) {
  if (t.kind() == Tk::Var && !bound.count(t.name())) {
    auto it = out.find(t.name());
    if (it == out.end())
      out.emplace(t.name(), t.sort());
    else if (it->second != t.sort())
      throw SortError("free variable " + t.name() + " used at two sorts");
  }
  for (const Term& k : t.kids()) term_vars(k, bound, out);
}

void prop_vars(const Prop& p, const std::set<std::string>& bound,
               std::map<std::string, Sort>& out) {
  for (const Term& t : p.terms()) term_vars(t, bound, out);
  for (const Prop& q : p.props()) prop_vars(q, bound, out);
}

void assertion_vars(const Assertion& a, std::set<std::string>& bound,
                    std::map<std::string, Sort>& out) {
  for (const Term& t : a.terms()) term_vars(t, bound, out);
  if (a.kind() == Ak::AndPure) prop_vars(a.prop(), bound, out);
  if (a.kind() == Ak::Forall || a.kind() == Ak::Exists) {
    bool had = bound.count(a.binder()) > 0;
    bound.insert(a.binder());
    assertion_vars(a.kids()[0], bound, out);
    if (!had) bound.erase(a.binder());
    return;
  }
  for (const Assertion& k : a.kids()) assertion_vars(k, bound, out);
}

}  // namespace

std::vector<CVal> enumerate_sort(const Sort& s, const OracleBounds& b) {
  Ctx cx = make_ctx(b);
  return universe_of(s, cx);
}

bool satisfies(const Heap& h, const Env& env, const Assertion& a, const OracleBounds& b) {
  Ctx cx = make_ctx(b);
  Env e = env;
  return sat(h, e, a, cx);
}

std::vector<Heap> models(const Assertion& a, const Env& env, const OracleBounds& b) {
  Ctx cx = make_ctx(b);
  Env e = env;
  std::vector<Heap> out;
  auto ms = try_models(a, e, cx);
  if (ms && ms->fams.empty()) {
    for (const Heap& h : ms->exact)
      if (b.in_bounds(h)) out.push_back(h);
  } else {
    enum_heaps(cx.universe, b.max_heap_cells, cx, Heap{}, [&](const Heap& h) {
      if (sat(h, e, a, cx)) out.push_back(h);
      return true;
    });
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::pair<std::string, Sort>> free_vars_sorted(const Assertion& a) {
  std::map<std::string, Sort> found;
  std::set<std::string> bound;
  assertion_vars(a, bound, found);
  return {found.begin(), found.end()};
}

EntailVerdict oracle_entails(const Assertion& ante, const Assertion& succ,
                             const OracleBounds& b) {
  Ctx cx = make_ctx(b);
  std::map<std::string, Sort> found;
  {
    std::set<std::string> bound;
    assertion_vars(ante, bound, found);
    assertion_vars(succ, bound, found);
  }
  std::vector<std::pair<std::string, std::vector<CVal>>> doms;
  for (const auto& [name, sort] : found) doms.push_back({name, universe_of(sort, cx)});

  EntailVerdict out;
  if (assertion_has_wand(ante) || assertion_has_wand(succ))
    out.note = "bounded validity: wand extensions range over heaps of at most " +
               std::to_string(b.max_heap_cells) + " cells in a " +
               std::to_string(b.addr_count) + "-address universe";

  bool have = false;
  int best = INT_MAX;
  bool stop = false;  // a 0-cell counter-model cannot be improved on
  Env env;

  auto consider = [&](const Heap& h) {
    if (!have || h.size() < best) {
      have = true;
      best = h.size();
      out.heap = h;
      out.env = env;
      if (best == 0) stop = true;
    }
  };

  // The antecedent is scanned as a product over the model sets of its
  // star leaves rather than by materializing the joined set. Predicate
  // leaves recur across env assignments with the same ground arguments
  // constantly, so their sets are cached under a printed-argument key.
  std::vector<const Assertion*> leaves;
  std::function<void(const Assertion&)> flat = [&](const Assertion& a) {
    if (a.kind() == Ak::Star) {
      flat(a.kids()[0]);
      flat(a.kids()[1]);
      return;
    }
    leaves.push_back(&a);
  };
  flat(ante);

  std::unordered_map<std::string, std::optional<ModelSet>> atom_cache;
  auto pred_key = [&](const Assertion& a, std::string& k) -> bool {
    k = a.pred_name();
    k += '(';
    for (const Term& t : a.terms()) {
      CVal v = eval_term(t, env);
      if (std::holds_alternative<FinMapV>(v.v) || std::holds_alternative<PathV>(v.v))
        return false;
      k += v.str();
      k += ',';
    }
    return true;
  };
  // Cached model set for a predicate leaf, keyed by its evaluated
  // arguments; null for leaves the cache cannot key.
  auto resolve = [&](const Assertion& a) -> const std::optional<ModelSet>* {
    if (a.kind() != Ak::Pred) return nullptr;
    std::string k;
    if (!pred_key(a, k)) return nullptr;
    auto it = atom_cache.find(k);
    if (it == atom_cache.end())
      it = atom_cache.emplace(std::move(k), try_models(a, env, cx)).first;
    return &it->second;
  };

  std::vector<ModelSet> locals(leaves.size());
  std::vector<const ModelSet*> sets(leaves.size(), nullptr);
  std::vector<const Family*> fam_acc;

  std::function<void()> check_env = [&]() {
    bool fallback = false;
    for (size_t i = 0; i < leaves.size(); ++i) {
      if (const std::optional<ModelSet>* c = resolve(*leaves[i])) {
        if (!c->has_value()) {
          fallback = true;
          break;
        }
        sets[i] = &**c;
        continue;
      }
      auto ms = try_models(*leaves[i], env, cx);
      if (!ms) {
        fallback = true;
        break;
      }
      locals[i] = std::move(*ms);
      sets[i] = &locals[i];
    }

    // Succedent-side data, computed at most once per env and only
    // when some candidate heap actually needs checking.
    bool have_succ = false;
    std::optional<ModelSet> succ_local;
    const std::optional<ModelSet>* succ_ms = nullptr;
    auto succ_holds = [&](const Heap& h) {
      if (!have_succ) {
        have_succ = true;
        succ_ms = resolve(succ);
        if (!succ_ms) {
          succ_local = try_models(succ, env, cx);
          succ_ms = &succ_local;
        }
      }
      if (!succ_ms->has_value()) return sat(h, env, succ, cx);
      for (const Heap& g : (*succ_ms)->exact)
        if (g == h) return true;
      for (const Family& f : (*succ_ms)->fams)
        if (family_member(h, f)) return true;
      return false;
    };

    if (fallback) {
      // No constructive model set: scan every in-bounds heap.
      enum_heaps(cx.universe, b.max_heap_cells, cx, Heap{}, [&](const Heap& h) {
        if (h.size() < best && sat(h, env, ante, cx) && !succ_holds(h)) consider(h);
        return !stop;
      });
      return;
    }

    bool have_vac = false;
    VacInfo vi;

    std::function<void(size_t, const Heap&)> prod = [&](size_t i, const Heap& acc) {
      if (stop) return;
      if (i < sets.size()) {
        for (const Heap& h : sets[i]->exact) {
          if ((h.mask & ~cx.universe) != 0) continue;
          if (!acc.disjoint(h)) continue;
          if (acc.size() + h.size() > b.max_heap_cells) continue;
          prod(i + 1, acc.join(h));
        }
        for (const Family& f : sets[i]->fams) {
          fam_acc.push_back(&f);
          prod(i + 1, acc);
          fam_acc.pop_back();
        }
        return;
      }
      if (fam_acc.empty()) {
        if (!b.in_bounds(acc)) return;
        if (acc.size() >= best) return;
        if (!succ_holds(acc)) consider(acc);
        return;
      }
      Family f;
      f.core = acc;
      for (const Family* pf : fam_acc) {
        if (!f.core.disjoint(pf->core)) return;
        f.core = f.core.join(pf->core);
        f.groups.insert(f.groups.end(), pf->groups.begin(), pf->groups.end());
      }
      if (f.core.size() >= best) return;  // members only add cells
      if (!family_feasible(f, cx)) return;
      if (!have_vac) {
        have_vac = true;
        vi = vac_info(succ, env, cx);
      }
      if (vi.always) return;
      if (vi.usable && family_covered(f, vi.sets)) return;
      enum_heaps(cx.universe, b.max_heap_cells - f.core.size(), cx, f.core,
                 [&](const Heap& h) {
                   if (h.size() < best && family_member(h, f) && !succ_holds(h))
                     consider(h);
                   return !stop;
                 });
    };
    prod(0, Heap{});
  };

  std::function<void(size_t)> go = [&](size_t i) {
    if (stop) return;
    if (i == doms.size()) {
      check_env();
      return;
    }
    for (const CVal& v : doms[i].second) {
      env[doms[i].first] = v;
      go(i + 1);
      if (stop) break;
    }
    env.erase(doms[i].first);
  };
  go(0);

  out.valid = !have;
  return out;
}

}  // namespace sepwand
