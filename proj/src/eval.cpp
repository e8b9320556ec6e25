#include "sepwand/eval.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>

namespace sepwand {
namespace {

Value need_value(const CVal& c, const char* what) {
  if (!c.is_value()) throw EvalError(std::string(what) + " did not evaluate to a value");
  return c.value();
}

void splice_leaves(const CVal& c, std::vector<Value>& out) {
  if (c.is_value()) {
    out.push_back(c.value());
    return;
  }
  const AggV& u = std::get<AggV>(c.v);
  out.insert(out.end(), u.leaves.begin(), u.leaves.end());
}

}  // namespace

CVal eval_term(const Term& t, const Env& env) {
  switch (t.kind()) {
    case Tk::Var: {
      auto it = env.find(t.name());
      if (it == env.end()) throw EvalError("unbound variable " + t.name());
      return it->second;
    }
    case Tk::Meta: throw EvalError("metavariable " + t.str() + " has no value");
    case Tk::Lit: return CVal(t.lit_value());
    case Tk::FieldAddr: {
      Value b = need_value(eval_term(t.kids()[0], env), "field base");
      if (!b.is_addr()) throw EvalError("field offset from non-address " + b.str());
      return CVal(Value::addr(b.a + t.offset()));
    }
    case Tk::TreeE: return CVal(TreeV{});
    case Tk::TreeT: {
      TreeV l = eval_term(t.kids()[0], env).tree();
      Value k = need_value(eval_term(t.kids()[1], env), "tree key");
      Value v = need_value(eval_term(t.kids()[2], env), "tree payload");
      TreeV r = eval_term(t.kids()[3], env).tree();
      return CVal(tree_node(l, k.i, v, r));
    }
    case Tk::Ins: {
      TreeV tr = eval_term(t.kids()[0], env).tree();
      Value k = need_value(eval_term(t.kids()[1], env), "ins key");
      Value v = need_value(eval_term(t.kids()[2], env), "ins payload");
      return CVal(tree_ins(tr, k.i, v));
    }
    case Tk::CtxLit: {
      TreeCtxV c;
      for (size_t i = 0; i < t.ctx_size(); ++i) {
        CtxFrameV f;
        f.hole_left = t.ctx_hole_left(i);
        f.key = need_value(eval_term(t.ctx_key(i), env), "frame key").i;
        f.val = need_value(eval_term(t.ctx_val(i), env), "frame payload");
        f.sub = eval_term(t.ctx_sub(i), env).tree();
        c.push_back(std::move(f));
      }
      return CVal(std::move(c));
    }
    case Tk::CtxApply:
      return CVal(ctx_apply(eval_term(t.kids()[0], env).ctx(),
                            eval_term(t.kids()[1], env).tree()));
    case Tk::CtxCompose:
      return CVal(ctx_compose(eval_term(t.kids()[0], env).ctx(),
                              eval_term(t.kids()[1], env).ctx()));
    case Tk::ListNil: return CVal(ListValV{});
    case Tk::ListCons: {
      Value h = need_value(eval_term(t.kids()[0], env), "list head");
      ListValV rest = eval_term(t.kids()[1], env).list();
      ListValV out;
      out.push_back(h);
      out.insert(out.end(), rest.begin(), rest.end());
      return CVal(std::move(out));
    }
    case Tk::ListApp: {
      ListValV a = eval_term(t.kids()[0], env).list();
      ListValV b = eval_term(t.kids()[1], env).list();
      a.insert(a.end(), b.begin(), b.end());
      return CVal(std::move(a));
    }
    case Tk::AggTuple: {
      AggV u;
      u.shape = t.sort().shape;
      for (const Term& k : t.kids()) splice_leaves(eval_term(k, env), u.leaves);
      return CVal(std::move(u));
    }
    case Tk::AggGet: {
      AggV u = eval_term(t.kids()[0], env).agg();
      AggV sub = agg_get(u, t.path());
      if (agg_shape(sub.shape).leaf) return CVal(sub.leaves[0]);
      return CVal(std::move(sub));
    }
    case Tk::AggSet: {
      AggV u = eval_term(t.kids()[0], env).agg();
      CVal wc = eval_term(t.kids()[1], env);
      AggV w;
      if (wc.is_value()) {
        auto [start, subshape] = agg_locate(u.shape, t.path());
        (void)start;
        w.shape = subshape;
        w.leaves = {wc.value()};
      } else {
        w = wc.agg();
      }
      return CVal(agg_set(u, t.path(), w));
    }
    case Tk::MapUpd: {
      FinMapV m = eval_term(t.kids()[0], env).map();
      Value k = need_value(eval_term(t.kids()[1], env), "update key");
      Value v = need_value(eval_term(t.kids()[2], env), "update payload");
      return CVal(map_update(std::move(m), k.i, v));
    }
  }
  throw EvalError("unreachable term kind");
}

bool eval_prop(const Prop& p, const Env& env) {
  switch (p.kind()) {
    case Pk::True_: return true;
    case Pk::False_: return false;
    case Pk::Eq: return eval_term(p.terms()[0], env) == eval_term(p.terms()[1], env);
    case Pk::Neq: return !(eval_term(p.terms()[0], env) == eval_term(p.terms()[1], env));
    case Pk::Lt: {
      Value a = need_value(eval_term(p.terms()[0], env), "order operand");
      Value b = need_value(eval_term(p.terms()[1], env), "order operand");
      if (!a.is_int() || !b.is_int()) throw EvalError("< compares integers");
      return a.i < b.i;
    }
    case Pk::And: return eval_prop(p.props()[0], env) && eval_prop(p.props()[1], env);
    case Pk::Or: return eval_prop(p.props()[0], env) || eval_prop(p.props()[1], env);
    case Pk::Not: return !eval_prop(p.props()[0], env);
    case Pk::SearchTreeP: return search_tree(eval_term(p.terms()[0], env).tree());
    case Pk::AbsP: {
      TreeV t = eval_term(p.terms()[0], env).tree();
      FinMapV m = eval_term(p.terms()[1], env).map();
      return tree_abs(t, m.dflt) == m;
    }
  }
  throw EvalError("unreachable prop kind");
}

namespace {

Term reify_agg(int shape, const std::vector<Value>& leaves, int start) {
  const AggShape& s = agg_shape(shape);
  if (s.leaf) return Term::lit(leaves[start]);
  std::vector<Term> fields;
  int off = start;
  for (int f : s.fields) {
    fields.push_back(reify_agg(f, leaves, off));
    off += agg_shape(f).leaf_count;
  }
  return Term::tuple(fields);
}

}  // namespace

Term reify(const CVal& v) {
  switch (v.v.index()) {
    case 0: return Term::lit(v.value());
    case 1: {
      const TreeV& t = v.tree();
      if (!t) return Term::tree_e();
      return Term::tree_t(reify(CVal(t->left)), Term::int_lit(t->key),
                          Term::lit(t->val), reify(CVal(t->right)));
    }
    case 2: {
      std::vector<CtxFrameT> frames;
      for (const CtxFrameV& f : v.ctx()) {
        frames.push_back(CtxFrameT{f.hole_left, Term::int_lit(f.key),
                                   Term::lit(f.val), reify(CVal(f.sub))});
      }
      return Term::ctx(frames);
    }
    case 3: {
      Term out = Term::list_nil();
      const ListValV& l = v.list();
      for (auto it = l.rbegin(); it != l.rend(); ++it)
        out = Term::list_cons(Term::lit(*it), out);
      return out;
    }
    case 4: return reify_agg(v.agg().shape, v.agg().leaves, 0);
    default: throw EvalError("value " + v.str() + " has no literal term form");
  }
}

namespace {

// Hypothesis context for reduction. depth limits how far guard
// decisions may recurse through pure_entails (whose own reductions
// run at depth-1); at depth 0 only ground guards are decided.
struct FactCtx {
  const std::vector<Prop>* facts = nullptr;
  int depth = 0;
};

bool entails_at(const std::vector<Prop>& facts, const Prop& goal, int depth);

bool closed(const Term& t) { return t.fv().empty() && !t.has_meta(); }

enum class KeyCmp { Lt, Eq, Gt, Unknown };

KeyCmp compare_keys(const Term& a, const Term& b, const FactCtx& fc) {
  if (a == b) return KeyCmp::Eq;
  if (closed(a) && closed(b)) {
    int64_t x = eval_term(a, {}).value().i;
    int64_t y = eval_term(b, {}).value().i;
    return x < y ? KeyCmp::Lt : x == y ? KeyCmp::Eq : KeyCmp::Gt;
  }
  if (fc.facts && fc.depth > 0) {
    if (entails_at(*fc.facts, Prop::lt(a, b), fc.depth - 1)) return KeyCmp::Lt;
    if (entails_at(*fc.facts, Prop::lt(b, a), fc.depth - 1)) return KeyCmp::Gt;
    if (entails_at(*fc.facts, Prop::eq(a, b), fc.depth - 1)) return KeyCmp::Eq;
  }
  return KeyCmp::Unknown;
}

bool path_prefix(const PathV& p, const PathV& q) {
  if (p.size() > q.size()) return false;
  return std::equal(p.begin(), p.end(), q.begin());
}

PathV path_concat(PathV p, const PathV& q) {
  p.insert(p.end(), q.begin(), q.end());
  return p;
}

PathV path_suffix(const PathV& p, const PathV& q) {
  return PathV(q.begin() + p.size(), q.end());
}

// One head step at the root, or nothing. Kids are already reduced.
std::optional<Term> head_step(const Term& t, const FactCtx& fc) {
  switch (t.kind()) {
    case Tk::CtxApply: {
      const Term& c = t.kids()[0];
      const Term& x = t.kids()[1];
      if (c.kind() == Tk::CtxCompose)
        return Term::apply(c.kids()[0], Term::apply(c.kids()[1], x));
      if (c.kind() != Tk::CtxLit) return std::nullopt;
      if (c.ctx_size() == 0) return x;
      std::vector<CtxFrameT> rest;
      for (size_t i = 1; i < c.ctx_size(); ++i)
        rest.push_back(CtxFrameT{c.ctx_hole_left(i), c.ctx_key(i), c.ctx_val(i),
                                 c.ctx_sub(i)});
      Term inner = Term::apply(Term::ctx(rest), x);
      // outermost frame becomes the root node
      return c.ctx_hole_left(0)
                 ? Term::tree_t(inner, c.ctx_key(0), c.ctx_val(0), c.ctx_sub(0))
                 : Term::tree_t(c.ctx_sub(0), c.ctx_key(0), c.ctx_val(0), inner);
    }
    case Tk::CtxCompose: {
      const Term& a = t.kids()[0];
      const Term& b = t.kids()[1];
      if (a.kind() == Tk::CtxLit && a.ctx_size() == 0) return b;
      if (b.kind() == Tk::CtxLit && b.ctx_size() == 0) return a;
      if (a.kind() == Tk::CtxLit && b.kind() == Tk::CtxLit) {
        std::vector<CtxFrameT> frames;
        for (const Term* c : {&a, &b}) {
          for (size_t i = 0; i < c->ctx_size(); ++i)
            frames.push_back(CtxFrameT{c->ctx_hole_left(i), c->ctx_key(i),
                                       c->ctx_val(i), c->ctx_sub(i)});
        }
        return Term::ctx(frames);
      }
      return std::nullopt;
    }
    case Tk::ListApp: {
      const Term& a = t.kids()[0];
      const Term& b = t.kids()[1];
      if (a.kind() == Tk::ListNil) return b;
      if (b.kind() == Tk::ListNil) return a;
      if (a.kind() == Tk::ListCons)
        return Term::list_cons(a.kids()[0], Term::list_app(a.kids()[1], b));
      if (a.kind() == Tk::ListApp)
        return Term::list_app(a.kids()[0], Term::list_app(a.kids()[1], b));
      return std::nullopt;
    }
    case Tk::AggGet: {
      const Term& u = t.kids()[0];
      const PathV& q = t.path();
      if (q.empty()) return u;
      if (u.kind() == Tk::AggTuple) {
        Term kid = u.kids()[q[0]];
        PathV rest(q.begin() + 1, q.end());
        if (rest.empty()) return kid;
        return Term::get(kid, rest);
      }
      if (u.kind() == Tk::AggSet) {
        const PathV& p = u.path();
        if (p == q) return u.kids()[1];
        if (path_prefix(p, q)) {
          const Term& w = u.kids()[1];
          return Term::get(w, path_suffix(p, q));
        }
        if (path_prefix(q, p))
          return Term::set(Term::get(u.kids()[0], q), path_suffix(q, p), u.kids()[1]);
        return Term::get(u.kids()[0], q);
      }
      // chained projections concatenate their paths
      if (u.kind() == Tk::AggGet)
        return Term::get(u.kids()[0], path_concat(u.path(), q));
      return std::nullopt;
    }
    case Tk::AggSet: {
      const Term& u = t.kids()[0];
      const PathV& p = t.path();
      const Term& w = t.kids()[1];
      if (p.empty()) return w;
      if (u.kind() == Tk::AggSet) {
        const PathV& q = u.path();  // inner (earlier) write
        if (q == p || path_prefix(p, q)) return Term::set(u.kids()[0], p, w);
        if (path_prefix(q, p))
          return Term::set(u.kids()[0], q,
                           Term::set(u.kids()[1], path_suffix(q, p), w));
      }
      // nested-write fusion: u[p -> (u at p)[q -> w']] collapses to
      // the single deep write u[p.q -> w']
      if (w.kind() == Tk::AggSet && w.kids()[0].kind() == Tk::AggGet &&
          w.kids()[0].kids()[0] == u && w.kids()[0].path() == p) {
        return Term::set(u, path_concat(p, w.path()), w.kids()[1]);
      }
      // Write-through expansion over a tuple-shaped subject: rebuild
      // the tuple with the write pushed into the head-index field.
      // With get collapsing, this gives every set over a known shape
      // a tuple normal form, so equalities in the style of
      // u[i -> (u at i)[j -> w]] = u[i, j -> w] close under reduction
      // even when u is a variable.
      {
        const AggShape& shape = agg_shape(u.sort().shape);
        if (!shape.leaf && p[0] < shape.fields.size()) {
          std::vector<Term> fields;
          for (uint32_t i = 0; i < shape.fields.size(); ++i) {
            if (i != p[0]) {
              fields.push_back(Term::get(u, {i}));
            } else if (p.size() == 1) {
              fields.push_back(w);
            } else {
              fields.push_back(Term::set(Term::get(u, {p[0]}),
                                         PathV(p.begin() + 1, p.end()), w));
            }
          }
          return Term::tuple(fields);
        }
      }
      return std::nullopt;
    }
    case Tk::AggTuple: {
      // eta: a tuple of sibling projections is the projected source.
      // The kids must all read the same subject at paths pp ++ [i]
      // for one common prefix pp; the sort check pins the shapes.
      const AggShape& shape = agg_shape(t.sort().shape);
      if (shape.leaf || t.kids().size() != shape.fields.size()) return std::nullopt;
      const Term& first = t.kids()[0];
      if (first.kind() != Tk::AggGet || first.path().empty() ||
          first.path().back() != 0)
        return std::nullopt;
      const Term& u = first.kids()[0];
      PathV prefix(first.path().begin(), first.path().end() - 1);
      for (size_t i = 0; i < t.kids().size(); ++i) {
        const Term& k = t.kids()[i];
        if (k.kind() != Tk::AggGet || !(k.kids()[0] == u) ||
            k.path() != path_concat(prefix, {(uint32_t)i}))
          return std::nullopt;
      }
      Term out = prefix.empty() ? u : Term::get(u, prefix);
      if (!(out.sort() == t.sort())) return std::nullopt;
      return out;
    }
    case Tk::Ins: {
      const Term& tr = t.kids()[0];
      const Term& k = t.kids()[1];
      const Term& v = t.kids()[2];
      if (tr.kind() == Tk::TreeE)
        return Term::tree_t(Term::tree_e(), k, v, Term::tree_e());
      if (tr.kind() != Tk::TreeT) return std::nullopt;
      switch (compare_keys(k, tr.kids()[1], fc)) {
        case KeyCmp::Lt:
          return Term::tree_t(Term::ins(tr.kids()[0], k, v), tr.kids()[1],
                              tr.kids()[2], tr.kids()[3]);
        case KeyCmp::Gt:
          return Term::tree_t(tr.kids()[0], tr.kids()[1], tr.kids()[2],
                              Term::ins(tr.kids()[3], k, v));
        case KeyCmp::Eq: return Term::tree_t(tr.kids()[0], k, v, tr.kids()[3]);
        case KeyCmp::Unknown: return std::nullopt;
      }
      return std::nullopt;
    }
    default: return std::nullopt;
  }
}

Term reduce_pass(const Term& t, const FactCtx& fc) {
  Term r = t;
  switch (t.kind()) {
    case Tk::Var:
    case Tk::Meta:
    case Tk::Lit:
    case Tk::TreeE:
    case Tk::ListNil: break;
    default: {
      // rebuild with reduced kids; factories re-run their collapses
      std::vector<Term> kids;
      for (const Term& k : t.kids()) kids.push_back(reduce_pass(k, fc));
      switch (t.kind()) {
        case Tk::FieldAddr: r = Term::field(kids[0], t.offset()); break;
        case Tk::TreeT: r = Term::tree_t(kids[0], kids[1], kids[2], kids[3]); break;
        case Tk::Ins: r = Term::ins(kids[0], kids[1], kids[2]); break;
        case Tk::CtxLit: {
          std::vector<CtxFrameT> frames;
          for (size_t i = 0; i < t.ctx_size(); ++i)
            frames.push_back(
                CtxFrameT{t.ctx_hole_left(i), kids[3 * i], kids[3 * i + 1],
                          kids[3 * i + 2]});
          r = Term::ctx(frames);
          break;
        }
        case Tk::CtxApply: r = Term::apply(kids[0], kids[1]); break;
        case Tk::CtxCompose: r = Term::compose(kids[0], kids[1]); break;
        case Tk::ListCons: r = Term::list_cons(kids[0], kids[1]); break;
        case Tk::ListApp: r = Term::list_app(kids[0], kids[1]); break;
        case Tk::AggTuple: r = Term::tuple(kids); break;
        case Tk::AggGet: r = Term::get(kids[0], t.path()); break;
        case Tk::AggSet: r = Term::set(kids[0], t.path(), kids[1]); break;
        case Tk::MapUpd: r = Term::map_upd(kids[0], kids[1], kids[2]); break;
        default: break;
      }
    }
  }
  if (auto s = head_step(r, fc)) return *s;
  return r;
}

Term reduce_impl(const Term& t, const FactCtx& fc) {
  Term cur = t;
  for (int i = 0; i < 10000; ++i) {
    Term next = reduce_pass(cur, fc);
    if (next == cur) return cur;
    cur = next;
  }
  throw Error("term reduction did not terminate: " + t.str());
}

Prop mk_and(const std::vector<Prop>& ps) {
  if (ps.empty()) return Prop::true_();
  Prop out = ps.back();
  for (size_t i = ps.size() - 1; i-- > 0;) out = Prop::and_(ps[i], out);
  return out;
}

// Injectivity and clash analysis for structural equality. Returns
// the simplified proposition, or nothing when no analysis applies.
std::optional<Prop> structural_eq(const Term& a, const Term& b) {
  auto ctor = [](Tk k) {
    return k == Tk::TreeE || k == Tk::TreeT || k == Tk::ListNil ||
           k == Tk::ListCons || k == Tk::Lit || k == Tk::CtxLit;
  };
  if (!ctor(a.kind()) || !ctor(b.kind())) return std::nullopt;
  if (a.kind() != b.kind()) {
    // Lit vs constructor of a structured sort cannot happen at equal
    // sorts, so distinct head constructors mean distinct values.
    return Prop::false_();
  }
  switch (a.kind()) {
    case Tk::TreeT: {
      std::vector<Prop> parts;
      for (int i = 0; i < 4; ++i) parts.push_back(Prop::eq(a.kids()[i], b.kids()[i]));
      return mk_and(parts);
    }
    case Tk::ListCons:
      return Prop::and_(Prop::eq(a.kids()[0], b.kids()[0]),
                        Prop::eq(a.kids()[1], b.kids()[1]));
    case Tk::Lit: return a == b ? Prop::true_() : Prop::false_();
    case Tk::CtxLit: {
      if (a.ctx_size() != b.ctx_size()) return Prop::false_();
      std::vector<Prop> parts;
      for (size_t i = 0; i < a.ctx_size(); ++i) {
        if (a.ctx_hole_left(i) != b.ctx_hole_left(i)) return Prop::false_();
        parts.push_back(Prop::eq(a.ctx_key(i), b.ctx_key(i)));
        parts.push_back(Prop::eq(a.ctx_val(i), b.ctx_val(i)));
        parts.push_back(Prop::eq(a.ctx_sub(i), b.ctx_sub(i)));
      }
      if (parts.empty()) return Prop::true_();
      return mk_and(parts);
    }
    default: return std::nullopt;  // TreeE/ListNil handled by a == b upstream
  }
}

Prop reduce_prop_pass(const Prop& p, const FactCtx& fc) {
  switch (p.kind()) {
    case Pk::True_:
    case Pk::False_: return p;
    case Pk::Eq:
    case Pk::Neq: {
      Term a = reduce_impl(p.terms()[0], fc);
      Term b = reduce_impl(p.terms()[1], fc);
      bool want = p.kind() == Pk::Eq;
      if (a == b) return want ? Prop::true_() : Prop::false_();
      if (auto s = structural_eq(a, b))
        return want ? *s : Prop::not_(*s);
      if (closed(a) && closed(b) && a.sort().kind != SortKind::Map) {
        bool eq = eval_term(a, {}) == eval_term(b, {});
        return eq == want ? Prop::true_() : Prop::false_();
      }
      return want ? Prop::eq(a, b) : Prop::neq(a, b);
    }
    case Pk::Lt: {
      Term a = reduce_impl(p.terms()[0], fc);
      Term b = reduce_impl(p.terms()[1], fc);
      if (closed(a) && closed(b))
        return eval_prop(Prop::lt(a, b), {}) ? Prop::true_() : Prop::false_();
      return Prop::lt(a, b);
    }
    case Pk::And: {
      Prop a = reduce_prop_pass(p.props()[0], fc);
      Prop b = reduce_prop_pass(p.props()[1], fc);
      if (a.kind() == Pk::False_ || b.kind() == Pk::False_) return Prop::false_();
      if (a.kind() == Pk::True_) return b;
      if (b.kind() == Pk::True_) return a;
      return Prop::and_(a, b);
    }
    case Pk::Or: {
      Prop a = reduce_prop_pass(p.props()[0], fc);
      Prop b = reduce_prop_pass(p.props()[1], fc);
      if (a.kind() == Pk::True_ || b.kind() == Pk::True_) return Prop::true_();
      if (a.kind() == Pk::False_) return b;
      if (b.kind() == Pk::False_) return a;
      return Prop::or_(a, b);
    }
    case Pk::Not: {
      Prop a = reduce_prop_pass(p.props()[0], fc);
      if (a.kind() == Pk::True_) return Prop::false_();
      if (a.kind() == Pk::False_) return Prop::true_();
      if (a.kind() == Pk::Not) return a.props()[0];
      return Prop::not_(a);
    }
    case Pk::SearchTreeP: {
      Term a = reduce_impl(p.terms()[0], fc);
      if (closed(a))
        return eval_prop(Prop::search_tree(a), {}) ? Prop::true_() : Prop::false_();
      if (a.kind() == Tk::TreeE) return Prop::true_();
      return Prop::search_tree(a);
    }
    case Pk::AbsP: {
      Term a = reduce_impl(p.terms()[0], fc);
      Term b = reduce_impl(p.terms()[1], fc);
      return Prop::abs(a, b);
    }
  }
  throw EvalError("unreachable prop kind");
}

Prop reduce_prop_impl(const Prop& p, const FactCtx& fc) {
  Prop cur = p;
  for (int i = 0; i < 1000; ++i) {
    Prop next = reduce_prop_pass(cur, fc);
    if (next == cur) return cur;
    cur = next;
  }
  throw Error("proposition reduction did not terminate: " + p.str());
}

// ---- pure entailment ----

struct TermLess {
  bool operator()(const Term& a, const Term& b) const { return term_cmp(a, b) < 0; }
};

// Union-find over a fixed node set, with congruence propagation.
struct CongruenceClosure {
  std::vector<Term> nodes;
  std::map<Term, int, TermLess> index;
  std::vector<int> parent;

  void add_term(const Term& t) {
    if (index.count(t)) return;
    index.emplace(t, (int)nodes.size());
    nodes.push_back(t);
    parent.push_back((int)parent.size());
    for (const Term& k : t.kids()) add_term(k);
  }

  void add_prop(const Prop& p) {
    for (const Term& t : p.terms()) add_term(t);
    for (const Prop& q : p.props()) add_prop(q);
  }

  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }

  bool merge(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }

  bool same(const Term& a, const Term& b) {
    auto ia = index.find(a);
    auto ib = index.find(b);
    if (ia == index.end() || ib == index.end()) return a == b;
    return find(ia->second) == find(ib->second);
  }

  // Congruence: nodes with the same head whose kids are pairwise
  // merged get merged too; repeat to a fixed point.
  void propagate() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (size_t i = 0; i < nodes.size(); ++i) {
        for (size_t j = i + 1; j < nodes.size(); ++j) {
          const Term& a = nodes[i];
          const Term& b = nodes[j];
          if (find((int)i) == find((int)j)) continue;
          if (a.kind() != b.kind()) continue;
          if (a.kind() == Tk::Var || a.kind() == Tk::Meta || a.kind() == Tk::Lit)
            continue;
          if (a.name() != b.name() || a.offset() != b.offset() ||
              a.path() != b.path() || a.kids().size() != b.kids().size())
            continue;
          if (a.kind() == Tk::CtxLit) {
            if (a.ctx_size() != b.ctx_size()) continue;
            bool ok = true;
            for (size_t f = 0; ok && f < a.ctx_size(); ++f)
              ok = a.ctx_hole_left(f) == b.ctx_hole_left(f);
            if (!ok) continue;
          }
          bool kids_same = true;
          for (size_t k = 0; kids_same && k < a.kids().size(); ++k)
            kids_same = same(a.kids()[k], b.kids()[k]);
          if (kids_same && merge((int)i, (int)j)) changed = true;
        }
      }
    }
  }

  // A ground literal known equal to t, when one exists in its class.
  std::optional<Value> literal_of(const Term& t) {
    auto it = index.find(t);
    if (it == index.end()) {
      if (t.kind() == Tk::Lit) return t.lit_value();
      return std::nullopt;
    }
    int root = find(it->second);
    for (size_t i = 0; i < nodes.size(); ++i) {
      if (find((int)i) == root && nodes[i].kind() == Tk::Lit)
        return nodes[i].lit_value();
    }
    return std::nullopt;
  }

  // Head-constructor discriminator for "definitely different values".
  std::optional<std::string> head_of(const Term& t) {
    auto it = index.find(t);
    int root = it == index.end() ? -1 : find(it->second);
    auto head = [](const Term& n) -> std::optional<std::string> {
      switch (n.kind()) {
        case Tk::TreeE: return std::string("E");
        case Tk::TreeT: return std::string("T");
        case Tk::ListNil: return std::string("nil");
        case Tk::ListCons: return std::string("cons");
        case Tk::Lit: return "lit:" + n.lit_value().str();
        default: return std::nullopt;
      }
    };
    if (root < 0) return head(t);
    for (size_t i = 0; i < nodes.size(); ++i) {
      if (find((int)i) == root) {
        if (auto h = head(nodes[i])) return h;
      }
    }
    return std::nullopt;
  }
};

void flatten_fact(const Prop& p, std::vector<Prop>& out) {
  if (p.kind() == Pk::True_) return;
  if (p.kind() == Pk::And) {
    flatten_fact(p.props()[0], out);
    flatten_fact(p.props()[1], out);
    return;
  }
  out.push_back(p);
}

bool atoms_match(CongruenceClosure& cc, const Prop& a, const Prop& b);

bool terms_match(CongruenceClosure& cc, const Prop& a, const Prop& b, bool swapped) {
  const auto& ta = a.terms();
  const auto& tb = b.terms();
  if (ta.size() != tb.size()) return false;
  for (size_t i = 0; i < ta.size(); ++i) {
    size_t j = swapped && ta.size() == 2 ? 1 - i : i;
    if (!cc.same(ta[i], tb[j])) return false;
  }
  return true;
}

bool atoms_match(CongruenceClosure& cc, const Prop& a, const Prop& b) {
  if (a.kind() != b.kind()) return false;
  if (a.props().size() != b.props().size()) return false;
  for (size_t i = 0; i < a.props().size(); ++i) {
    if (!atoms_match(cc, a.props()[i], b.props()[i])) return false;
  }
  if (terms_match(cc, a, b, false)) return true;
  if (a.kind() == Pk::Eq || a.kind() == Pk::Neq) return terms_match(cc, a, b, true);
  return false;
}

struct EntailState {
  std::vector<Prop> facts;
  CongruenceClosure cc;

  bool inconsistent() {
    for (const Prop& f : facts) {
      if (f.kind() == Pk::False_) return true;
      if (f.kind() == Pk::Eq) {
        auto la = cc.head_of(f.terms()[0]);
        auto lb = cc.head_of(f.terms()[1]);
        if (la && lb && *la != *lb) return true;
      }
      if (f.kind() == Pk::Neq && cc.same(f.terms()[0], f.terms()[1])) return true;
      if (f.kind() == Pk::Lt && cc.same(f.terms()[0], f.terms()[1])) return true;
    }
    // strict order is asymmetric
    for (size_t i = 0; i < facts.size(); ++i) {
      if (facts[i].kind() != Pk::Lt) continue;
      for (size_t j = i + 1; j < facts.size(); ++j) {
        if (facts[j].kind() != Pk::Lt) continue;
        if (cc.same(facts[i].terms()[0], facts[j].terms()[1]) &&
            cc.same(facts[i].terms()[1], facts[j].terms()[0]))
          return true;
      }
    }
    return false;
  }

  bool holds(const Prop& goal);

  bool distinct(const Term& a, const Term& b) {
    auto ha = cc.head_of(a);
    auto hb = cc.head_of(b);
    if (ha && hb && *ha != *hb) return true;
    for (const Prop& f : facts) {
      if (f.kind() == Pk::Neq &&
          ((cc.same(f.terms()[0], a) && cc.same(f.terms()[1], b)) ||
           (cc.same(f.terms()[0], b) && cc.same(f.terms()[1], a))))
        return true;
      if (f.kind() == Pk::Lt &&
          ((cc.same(f.terms()[0], a) && cc.same(f.terms()[1], b)) ||
           (cc.same(f.terms()[0], b) && cc.same(f.terms()[1], a))))
        return true;
    }
    return false;
  }
};

bool EntailState::holds(const Prop& goal) {
  switch (goal.kind()) {
    case Pk::True_: return true;
    case Pk::False_: return false;
    case Pk::And:
      return holds(goal.props()[0]) && holds(goal.props()[1]);
    case Pk::Or: return holds(goal.props()[0]) || holds(goal.props()[1]);
    case Pk::Eq: return cc.same(goal.terms()[0], goal.terms()[1]);
    case Pk::Neq: return distinct(goal.terms()[0], goal.terms()[1]);
    case Pk::Lt: {
      auto la = cc.literal_of(goal.terms()[0]);
      auto lb = cc.literal_of(goal.terms()[1]);
      if (la && lb && la->is_int() && lb->is_int() && la->i < lb->i) return true;
      for (const Prop& f : facts) {
        if (f.kind() == Pk::Lt && terms_match(cc, f, goal, false)) return true;
      }
      return false;
    }
    case Pk::Not: {
      const Prop& inner = goal.props()[0];
      if (inner.kind() == Pk::Eq)
        return holds(Prop::neq(inner.terms()[0], inner.terms()[1]));
      if (inner.kind() == Pk::Neq)
        return holds(Prop::eq(inner.terms()[0], inner.terms()[1]));
      if (inner.kind() == Pk::Lt) {
        // total order: b < a or a = b refutes a < b
        if (holds(Prop::lt(inner.terms()[1], inner.terms()[0]))) return true;
        if (cc.same(inner.terms()[0], inner.terms()[1])) return true;
      }
      for (const Prop& f : facts) {
        if (atoms_match(cc, f, goal)) return true;
      }
      return false;
    }
    case Pk::SearchTreeP:
    case Pk::AbsP: {
      for (const Prop& f : facts) {
        if (atoms_match(cc, f, goal)) return true;
      }
      return false;
    }
  }
  return false;
}

bool entails_at(const std::vector<Prop>& hyps, const Prop& goal0, int depth) {
  std::vector<Prop> facts;
  FactCtx plain{nullptr, 0};
  FactCtx rich{&facts, depth};

  for (const Prop& h : hyps) flatten_fact(reduce_prop_impl(h, plain), facts);
  Prop goal = reduce_prop_impl(goal0, depth > 0 ? rich : plain);

  // Oriented equality substitution to a fixed point: replace a
  // variable by its definition wherever one of the facts is a
  // variable-rooted equation, then re-reduce everything.
  for (int round = 0; round < 64; ++round) {
    std::optional<std::pair<std::string, Term>> pick;
    for (const Prop& f : facts) {
      if (f.kind() != Pk::Eq) continue;
      for (int side = 0; side < 2 && !pick; ++side) {
        const Term& x = f.terms()[side];
        const Term& t = f.terms()[1 - side];
        if (x.kind() != Tk::Var || occurs_free(x.name(), t)) continue;
        if (t.kind() == Tk::Var && term_cmp(t, x) > 0) continue;  // orient var pairs
        pick = {x.name(), t};
      }
      if (pick) break;
    }
    if (!pick) break;
    std::vector<Prop> next;
    for (const Prop& f : facts) {
      Prop g = reduce_prop_impl(subst(f, pick->first, pick->second), plain);
      flatten_fact(g, next);
    }
    facts = std::move(next);
    goal = reduce_prop_impl(subst(goal, pick->first, pick->second),
                            depth > 0 ? rich : plain);
  }

  // Order enrichment: strict inequality gives apartness, and a
  // two-sided non-inequality pins equality (totality of <).
  size_t base = facts.size();
  for (size_t i = 0; i < base; ++i) {
    if (facts[i].kind() == Pk::Lt)
      facts.push_back(Prop::neq(facts[i].terms()[0], facts[i].terms()[1]));
    if (facts[i].kind() == Pk::Not && facts[i].props()[0].kind() == Pk::Lt) {
      const Prop& ab = facts[i].props()[0];
      for (size_t j = 0; j < base; ++j) {
        if (j == i || facts[j].kind() != Pk::Not ||
            facts[j].props()[0].kind() != Pk::Lt)
          continue;
        const Prop& ba = facts[j].props()[0];
        if (ab.terms()[0] == ba.terms()[1] && ab.terms()[1] == ba.terms()[0])
          facts.push_back(Prop::eq(ab.terms()[0], ab.terms()[1]));
      }
    }
  }

  EntailState st;
  st.facts = facts;
  for (const Prop& f : st.facts) st.cc.add_prop(f);
  st.cc.add_prop(goal);
  for (const Prop& f : st.facts) {
    if (f.kind() == Pk::Eq)
      st.cc.merge(st.cc.index.at(f.terms()[0]), st.cc.index.at(f.terms()[1]));
  }
  st.cc.propagate();

  if (st.inconsistent()) return true;
  return st.holds(goal);
}

}  // namespace

Term reduce(const Term& t) { return reduce_impl(t, FactCtx{nullptr, 0}); }

Term reduce(const Term& t, const std::vector<Prop>& facts) {
  return reduce_impl(t, FactCtx{&facts, 2});
}

Prop reduce_prop(const Prop& p) { return reduce_prop_impl(p, FactCtx{nullptr, 0}); }

Prop reduce_prop(const Prop& p, const std::vector<Prop>& facts) {
  return reduce_prop_impl(p, FactCtx{&facts, 2});
}

bool pure_entails(const std::vector<Prop>& facts, const Prop& goal) {
  return entails_at(facts, goal, 2);
}

}  // namespace sepwand
