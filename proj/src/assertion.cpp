#include "sepwand/assertion.hpp"

#include <algorithm>

#include "sepwand/preds.hpp"

namespace sepwand {
namespace {

uint64_t mix(uint64_t h, uint64_t x) {
  h ^= x + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

uint64_t str_hash(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::vector<std::string> merge_names(std::vector<std::string> a,
                                     const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

}  // namespace

Assertion Assertion::make(Rep rep) {
  uint64_t h = 0x51d3c2a9e47b6f83ull;
  h = mix(h, (uint64_t)rep.kind);
  h = mix(h, str_hash(rep.binder));
  h = mix(h, str_hash(rep.binder_sort.str()));
  h = mix(h, str_hash(rep.pred_name));
  if (rep.prop) {
    h = mix(h, rep.prop->hash());
    rep.has_meta = rep.has_meta || rep.prop->has_meta();
    rep.fv = merge_names(std::move(rep.fv), rep.prop->fv());
  }
  for (const Term& t : rep.terms) {
    h = mix(h, t.hash());
    rep.has_meta = rep.has_meta || t.has_meta();
    rep.fv = merge_names(std::move(rep.fv), t.fv());
  }
  for (const Assertion& a : rep.kids) {
    h = mix(h, a.hash());
    rep.has_meta = rep.has_meta || a.has_meta();
    rep.fv = merge_names(std::move(rep.fv), a.fv());
  }
  if (!rep.binder.empty()) {
    auto it = std::lower_bound(rep.fv.begin(), rep.fv.end(), rep.binder);
    if (it != rep.fv.end() && *it == rep.binder) rep.fv.erase(it);
  }
  rep.hash = h;
  return Assertion(std::make_shared<const Rep>(std::move(rep)));
}

Assertion Assertion::emp() { return make(Rep{}); }

Assertion Assertion::pto(const Term& addr, const Term& value) {
  if (!(addr.sort() == Sort(SortKind::Val)))
    throw SortError("points-to address must be Val, got " + addr.sort().str());
  if (!(value.sort() == Sort(SortKind::Val)) && !(value.sort() == Sort(SortKind::Int)))
    throw SortError("points-to payload must be Val or Int");
  Rep r;
  r.kind = Ak::PointsTo;
  r.terms = {addr, value};
  return make(std::move(r));
}

Assertion Assertion::star(const Assertion& l, const Assertion& r_) {
  Rep r;
  r.kind = Ak::Star;
  r.kids = {l, r_};
  return make(std::move(r));
}

Assertion Assertion::wand(const Assertion& l, const Assertion& r_) {
  Rep r;
  r.kind = Ak::Wand;
  r.kids = {l, r_};
  return make(std::move(r));
}

Assertion Assertion::forall(const std::string& var, Sort sort, const Assertion& body) {
  if (var.empty()) throw SortError("binder with empty name");
  Rep r;
  r.kind = Ak::Forall;
  r.binder = var;
  r.binder_sort = sort;
  r.kids = {body};
  return make(std::move(r));
}

Assertion Assertion::exists(const std::string& var, Sort sort, const Assertion& body) {
  if (var.empty()) throw SortError("binder with empty name");
  Rep r;
  r.kind = Ak::Exists;
  r.binder = var;
  r.binder_sort = sort;
  r.kids = {body};
  return make(std::move(r));
}

Assertion Assertion::and_pure(const Prop& p, const Assertion& body) {
  Rep r;
  r.kind = Ak::AndPure;
  r.prop = p;
  r.kids = {body};
  return make(std::move(r));
}

Assertion Assertion::pred(const std::string& name, const std::vector<Term>& args) {
  const PredDef& def = pred_get(name);
  if (def.check) {
    def.check(args);
  } else {
    if (args.size() != def.arg_sorts.size())
      throw SortError(name + " expects " + std::to_string(def.arg_sorts.size()) +
                      " arguments");
    for (size_t i = 0; i < args.size(); ++i) {
      if (!(args[i].sort() == def.arg_sorts[i]))
        throw SortError(name + " argument " + std::to_string(i) + " must be " +
                        def.arg_sorts[i].str() + ", got " + args[i].sort().str());
    }
  }
  Rep r;
  r.kind = Ak::Pred;
  r.pred_name = name;
  r.terms = args;
  return make(std::move(r));
}

bool Assertion::operator==(const Assertion& o) const {
  if (rep_ == o.rep_) return true;
  if (hash() != o.hash()) return false;
  return assertion_cmp(*this, o) == 0;
}

int assertion_cmp(const Assertion& a, const Assertion& b) {
  if (a.kind() != b.kind()) return (int)a.kind() < (int)b.kind() ? -1 : 1;
  if (int c = a.binder().compare(b.binder())) return c < 0 ? -1 : 1;
  if (!(a.binder_sort() == b.binder_sort()))
    return a.binder_sort().str() < b.binder_sort().str() ? -1 : 1;
  if (int c = a.pred_name().compare(b.pred_name())) return c < 0 ? -1 : 1;
  if (a.kind() == Ak::AndPure) {
    if (int c = prop_cmp(a.prop(), b.prop())) return c;
  }
  if (a.terms().size() != b.terms().size())
    return a.terms().size() < b.terms().size() ? -1 : 1;
  for (size_t i = 0; i < a.terms().size(); ++i) {
    if (int c = term_cmp(a.terms()[i], b.terms()[i])) return c;
  }
  if (a.kids().size() != b.kids().size())
    return a.kids().size() < b.kids().size() ? -1 : 1;
  for (size_t i = 0; i < a.kids().size(); ++i) {
    if (int c = assertion_cmp(a.kids()[i], b.kids()[i])) return c;
  }
  return 0;
}

std::string Assertion::str() const {
  switch (kind()) {
    case Ak::Emp: return "emp";
    case Ak::PointsTo: return "(pto " + terms()[0].str() + " " + terms()[1].str() + ")";
    case Ak::Star: return "(star " + kids()[0].str() + " " + kids()[1].str() + ")";
    case Ak::Wand: return "(wand " + kids()[0].str() + " " + kids()[1].str() + ")";
    case Ak::Forall:
      return "(forall (" + binder() + " " + binder_sort().str() + ") " +
             kids()[0].str() + ")";
    case Ak::Exists:
      return "(exists (" + binder() + " " + binder_sort().str() + ") " +
             kids()[0].str() + ")";
    case Ak::AndPure:
      if (kids()[0].kind() == Ak::Emp) return "(pure " + prop().str() + ")";
      return "(pure " + prop().str() + " " + kids()[0].str() + ")";
    case Ak::Pred: {
      std::string out = "(" + pred_name();
      for (const Term& t : terms()) out += " " + t.str();
      return out + ")";
    }
  }
  return "?";
}

namespace {

Assertion subst_impl(const Assertion& a, std::map<std::string, Term> sub) {
  // Drop bindings that cannot fire; keeps the shadowing logic simple.
  for (auto it = sub.begin(); it != sub.end();) {
    if (!occurs_free(it->first, a))
      it = sub.erase(it);
    else
      ++it;
  }
  if (sub.empty()) return a;
  switch (a.kind()) {
    case Ak::Emp: return a;
    case Ak::PointsTo:
      return Assertion::pto(subst(a.terms()[0], sub), subst(a.terms()[1], sub));
    case Ak::Star:
      return Assertion::star(subst_impl(a.kids()[0], sub), subst_impl(a.kids()[1], sub));
    case Ak::Wand:
      return Assertion::wand(subst_impl(a.kids()[0], sub), subst_impl(a.kids()[1], sub));
    case Ak::AndPure:
      return Assertion::and_pure(subst(a.prop(), sub), subst_impl(a.kids()[0], sub));
    case Ak::Pred: {
      std::vector<Term> args;
      for (const Term& t : a.terms()) args.push_back(subst(t, sub));
      return Assertion::pred(a.pred_name(), args);
    }
    case Ak::Forall:
    case Ak::Exists: {
      std::string x = a.binder();
      Assertion body = a.kids()[0];
      sub.erase(x);
      if (sub.empty()) return a;
      std::vector<std::string> clash;
      for (const auto& [_, t] : sub) clash = merge_names(std::move(clash), t.fv());
      if (std::binary_search(clash.begin(), clash.end(), x)) {
        std::vector<std::string> avoid = clash;
        avoid = merge_names(std::move(avoid), body.fv());
        for (const auto& [n, _] : sub) avoid.push_back(n);
        std::string x2 = fresh_name(x, avoid);
        body = subst_impl(body, {{x, Term::var(x2, a.binder_sort())}});
        x = x2;
      }
      Assertion body2 = subst_impl(body, sub);
      return a.kind() == Ak::Forall ? Assertion::forall(x, a.binder_sort(), body2)
                                    : Assertion::exists(x, a.binder_sort(), body2);
    }
  }
  throw Error("unreachable assertion kind");
}

}  // namespace

Assertion subst(const Assertion& a, const std::map<std::string, Term>& sub) {
  return subst_impl(a, sub);
}

Assertion subst(const Assertion& a, const std::string& var, const Term& replacement) {
  return subst_impl(a, {{var, replacement}});
}

Assertion subst_meta(const Assertion& a, const std::map<std::string, Term>& sub) {
  if (!a.has_meta() || sub.empty()) return a;
  switch (a.kind()) {
    case Ak::Emp: return a;
    case Ak::PointsTo:
      return Assertion::pto(subst_meta(a.terms()[0], sub), subst_meta(a.terms()[1], sub));
    case Ak::Star:
      return Assertion::star(subst_meta(a.kids()[0], sub), subst_meta(a.kids()[1], sub));
    case Ak::Wand:
      return Assertion::wand(subst_meta(a.kids()[0], sub), subst_meta(a.kids()[1], sub));
    case Ak::AndPure:
      return Assertion::and_pure(subst_meta(a.prop(), sub), subst_meta(a.kids()[0], sub));
    case Ak::Pred: {
      std::vector<Term> args;
      for (const Term& t : a.terms()) args.push_back(subst_meta(t, sub));
      return Assertion::pred(a.pred_name(), args);
    }
    case Ak::Forall:
      return Assertion::forall(a.binder(), a.binder_sort(),
                               subst_meta(a.kids()[0], sub));
    case Ak::Exists:
      return Assertion::exists(a.binder(), a.binder_sort(),
                               subst_meta(a.kids()[0], sub));
  }
  throw Error("unreachable assertion kind");
}

bool occurs_free(const std::string& var, const Assertion& a) {
  return std::binary_search(a.fv().begin(), a.fv().end(), var);
}

namespace {

void flatten(const Assertion& a, std::vector<Prop>& props, std::vector<Assertion>& sp) {
  switch (a.kind()) {
    case Ak::Emp: return;
    case Ak::Star:
      flatten(a.kids()[0], props, sp);
      flatten(a.kids()[1], props, sp);
      return;
    case Ak::AndPure:
      props.push_back(a.prop());
      flatten(a.kids()[0], props, sp);
      return;
    default: sp.push_back(a);
  }
}

}  // namespace

Canon normalize_star(const Assertion& a) {
  Canon c;
  flatten(a, c.props, c.spatial);
  std::stable_sort(c.props.begin(), c.props.end(), [](const Prop& x, const Prop& y) {
    if (x.hash() != y.hash()) return x.hash() < y.hash();
    return prop_cmp(x, y) < 0;
  });
  std::stable_sort(c.spatial.begin(), c.spatial.end(),
                   [](const Assertion& x, const Assertion& y) {
                     if (x.hash() != y.hash()) return x.hash() < y.hash();
                     return assertion_cmp(x, y) < 0;
                   });
  return c;
}

Assertion Canon::assemble() const {
  Assertion body = Assertion::emp();
  if (!spatial.empty()) {
    body = spatial.back();
    for (auto it = spatial.rbegin() + 1; it != spatial.rend(); ++it)
      body = Assertion::star(*it, body);
  }
  for (auto it = props.rbegin(); it != props.rend(); ++it)
    body = Assertion::and_pure(*it, body);
  return body;
}

bool Canon::operator==(const Canon& o) const {
  if (props.size() != o.props.size() || spatial.size() != o.spatial.size()) return false;
  for (size_t i = 0; i < props.size(); ++i)
    if (props[i] != o.props[i]) return false;
  for (size_t i = 0; i < spatial.size(); ++i)
    if (spatial[i] != o.spatial[i]) return false;
  return true;
}

Assertion normal_form(const Assertion& a) { return normalize_star(a).assemble(); }

std::vector<Prop> pure_prefix(const Assertion& a) {
  std::vector<Prop> out;
  const Assertion* cur = &a;
  while (cur->kind() == Ak::AndPure) {
    out.push_back(cur->prop());
    cur = &cur->kids()[0];
  }
  return out;
}

Assertion strip_pure_prefix(const Assertion& a) {
  Assertion cur = a;
  while (cur.kind() == Ak::AndPure) cur = cur.kids()[0];
  return cur;
}

}  // namespace sepwand
