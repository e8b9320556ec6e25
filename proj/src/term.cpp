#include "sepwand/term.hpp"

#include <algorithm>

namespace sepwand {
namespace {

uint64_t fnv(uint64_t h, uint64_t x) {
  // FNV-1a over the 8 bytes of x; stable across runs by construction.
  for (int i = 0; i < 8; ++i) {
    h ^= (x >> (8 * i)) & 0xff;
    h *= 1099511628211ull;
  }
  return h;
}

uint64_t fnv_str(uint64_t h, const std::string& s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

uint64_t value_hash(const Value& v) {
  uint64_t h = 1469598103934665603ull;
  h = fnv(h, (uint64_t)v.k);
  h = fnv(h, (uint64_t)v.i);
  return fnv(h, v.a);
}

std::vector<std::string> merge_names(std::vector<std::string> a,
                                     const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

void expect(bool ok, const std::string& what) {
  if (!ok) throw SortError(what);
}

}  // namespace

Term Term::make(Rep rep) {
  uint64_t h = 1469598103934665603ull;
  h = fnv(h, (uint64_t)rep.kind);
  h = fnv_str(h, rep.name);
  h = fnv(h, value_hash(rep.lit));
  h = fnv(h, rep.offset);
  for (uint8_t b : rep.holes) h = fnv(h, b);
  for (uint32_t p : rep.path) h = fnv(h, p);
  for (const Term& k : rep.kids) {
    h = fnv(h, k.hash());
    rep.has_meta = rep.has_meta || k.has_meta();
    rep.fv = merge_names(std::move(rep.fv), k.fv());
  }
  rep.hash = h;
  return Term(std::make_shared<const Rep>(std::move(rep)));
}

Term Term::var(const std::string& name, Sort sort) {
  expect(!name.empty(), "variable with empty name");
  Rep r;
  r.kind = Tk::Var;
  r.sort = sort;
  r.name = name;
  r.fv = {name};
  return make(std::move(r));
}

Term Term::meta(const std::string& name, Sort sort) {
  expect(!name.empty(), "metavariable with empty name");
  Rep r;
  r.kind = Tk::Meta;
  r.sort = sort;
  r.name = name;
  r.has_meta = true;
  return make(std::move(r));
}

Term Term::lit(Value v) {
  Rep r;
  r.kind = Tk::Lit;
  r.sort = v.is_int() ? SortKind::Int : SortKind::Val;
  r.lit = v;
  return make(std::move(r));
}

Term Term::field(const Term& base, uint32_t offset) {
  expect(base.sort() == Sort(SortKind::Val), "field base must be Val");
  // Collapse literal nesting so (field (field p 2) 1) and (field p 3)
  // denote the same node.
  if (base.kind() == Tk::FieldAddr) return field(base.kids()[0], base.offset() + offset);
  if (base.kind() == Tk::Lit && base.lit_value().is_addr())
    return addr_lit(base.lit_value().a + offset);
  if (offset == 0) return base;
  Rep r;
  r.kind = Tk::FieldAddr;
  r.sort = SortKind::Val;
  r.offset = offset;
  r.kids = {base};
  return make(std::move(r));
}

Term Term::tree_e() {
  Rep r;
  r.kind = Tk::TreeE;
  r.sort = SortKind::Tree;
  return make(std::move(r));
}

Term Term::tree_t(const Term& l, const Term& k, const Term& v, const Term& r_) {
  expect(l.sort() == Sort(SortKind::Tree) && r_.sort() == Sort(SortKind::Tree),
         "tree node subtrees must be Tree");
  expect(k.sort() == Sort(SortKind::Int), "tree node key must be Int");
  expect(v.sort() == Sort(SortKind::Val), "tree node payload must be Val");
  Rep r;
  r.kind = Tk::TreeT;
  r.sort = SortKind::Tree;
  r.kids = {l, k, v, r_};
  return make(std::move(r));
}

Term Term::ins(const Term& t, const Term& k, const Term& v) {
  expect(t.sort() == Sort(SortKind::Tree), "ins target must be Tree");
  expect(k.sort() == Sort(SortKind::Int), "ins key must be Int");
  expect(v.sort() == Sort(SortKind::Val), "ins payload must be Val");
  Rep r;
  r.kind = Tk::Ins;
  r.sort = SortKind::Tree;
  r.kids = {t, k, v};
  return make(std::move(r));
}

Term Term::ctx(const std::vector<CtxFrameT>& frames) {
  Rep r;
  r.kind = Tk::CtxLit;
  r.sort = SortKind::Ctx;
  for (const auto& f : frames) {
    expect(f.key.sort() == Sort(SortKind::Int), "context frame key must be Int");
    expect(f.val.sort() == Sort(SortKind::Val), "context frame payload must be Val");
    expect(f.sub.sort() == Sort(SortKind::Tree), "context frame subtree must be Tree");
    r.holes.push_back(f.hole_left ? 1 : 0);
    r.kids.push_back(f.key);
    r.kids.push_back(f.val);
    r.kids.push_back(f.sub);
  }
  return make(std::move(r));
}

Term Term::apply(const Term& c, const Term& t) {
  expect(c.sort() == Sort(SortKind::Ctx), "apply needs a Ctx");
  expect(t.sort() == Sort(SortKind::Tree), "apply needs a Tree");
  Rep r;
  r.kind = Tk::CtxApply;
  r.sort = SortKind::Tree;
  r.kids = {c, t};
  return make(std::move(r));
}

Term Term::compose(const Term& a, const Term& b) {
  expect(a.sort() == Sort(SortKind::Ctx) && b.sort() == Sort(SortKind::Ctx),
         "compose needs two Ctx");
  Rep r;
  r.kind = Tk::CtxCompose;
  r.sort = SortKind::Ctx;
  r.kids = {a, b};
  return make(std::move(r));
}

Term Term::list_nil() {
  Rep r;
  r.kind = Tk::ListNil;
  r.sort = SortKind::List;
  return make(std::move(r));
}

Term Term::list_cons(const Term& h, const Term& t) {
  expect(h.sort() == Sort(SortKind::Val), "list head must be Val");
  expect(t.sort() == Sort(SortKind::List), "list tail must be List");
  Rep r;
  r.kind = Tk::ListCons;
  r.sort = SortKind::List;
  r.kids = {h, t};
  return make(std::move(r));
}

Term Term::list_app(const Term& a, const Term& b) {
  expect(a.sort() == Sort(SortKind::List) && b.sort() == Sort(SortKind::List),
         "append needs two List");
  Rep r;
  r.kind = Tk::ListApp;
  r.sort = SortKind::List;
  r.kids = {a, b};
  return make(std::move(r));
}

namespace {

int field_shape_of(const Sort& s) {
  switch (s.kind) {
    case SortKind::Int: return agg_shape_int();
    case SortKind::Val: return agg_shape_val();
    case SortKind::Agg: return s.shape;
    default: throw SortError("tuple fields must be Int, Val, or Agg");
  }
}

Sort sort_of_shape(int shape) {
  const AggShape& s = agg_shape(shape);
  if (!s.leaf) return Sort::agg(shape);
  return s.leaf_kind == SortKind::Int ? Sort(SortKind::Int) : Sort(SortKind::Val);
}

}  // namespace

Term Term::tuple(const std::vector<Term>& fields) {
  expect(!fields.empty(), "empty tuple");
  std::vector<int> shapes;
  for (const Term& f : fields) shapes.push_back(field_shape_of(f.sort()));
  Rep r;
  r.kind = Tk::AggTuple;
  r.sort = Sort::agg(agg_shape_tuple(shapes));
  r.kids = fields;
  return make(std::move(r));
}

Term Term::get(const Term& u, PathV path) {
  expect(u.sort().kind == SortKind::Agg, "get needs an aggregate");
  auto [start, sub] = agg_locate(u.sort().shape, path);
  (void)start;
  Rep r;
  r.kind = Tk::AggGet;
  r.sort = sort_of_shape(sub);
  r.kids = {u};
  r.path = std::move(path);
  return make(std::move(r));
}

Term Term::set(const Term& u, PathV path, const Term& w) {
  expect(u.sort().kind == SortKind::Agg, "set needs an aggregate");
  auto [start, sub] = agg_locate(u.sort().shape, path);
  (void)start;
  expect(w.sort() == sort_of_shape(sub), "set stores a value of the wrong sort");
  Rep r;
  r.kind = Tk::AggSet;
  r.sort = u.sort();
  r.kids = {u, w};
  r.path = std::move(path);
  return make(std::move(r));
}

Term Term::map_upd(const Term& m, const Term& k, const Term& v) {
  expect(m.sort() == Sort(SortKind::Map), "update target must be Map");
  expect(k.sort() == Sort(SortKind::Int), "update key must be Int");
  expect(v.sort() == Sort(SortKind::Val), "update payload must be Val");
  Rep r;
  r.kind = Tk::MapUpd;
  r.sort = SortKind::Map;
  r.kids = {m, k, v};
  return make(std::move(r));
}

bool Term::operator==(const Term& o) const {
  if (rep_ == o.rep_) return true;
  if (rep_->hash != o.rep_->hash) return false;
  return term_cmp(*this, o) == 0;
}

int term_cmp(const Term& a, const Term& b) {
  if (a.kind() != b.kind()) return (int)a.kind() < (int)b.kind() ? -1 : 1;
  if (int c = a.name().compare(b.name())) return c < 0 ? -1 : 1;
  if (a.lit_value() != b.lit_value()) return a.lit_value() < b.lit_value() ? -1 : 1;
  if (a.offset() != b.offset()) return a.offset() < b.offset() ? -1 : 1;
  if (a.path() != b.path()) return a.path() < b.path() ? -1 : 1;
  if (a.kind() == Tk::CtxLit) {
    if (a.ctx_size() != b.ctx_size()) return a.ctx_size() < b.ctx_size() ? -1 : 1;
    for (size_t i = 0; i < a.ctx_size(); ++i) {
      if (a.ctx_hole_left(i) != b.ctx_hole_left(i)) return a.ctx_hole_left(i) ? -1 : 1;
    }
  }
  if (a.kind() == Tk::Var || a.kind() == Tk::Meta) {
    if (!(a.sort() == b.sort())) {
      // Same-name variables of different sorts are distinct terms.
      return a.sort().str() < b.sort().str() ? -1 : 1;
    }
  }
  if (a.kids().size() != b.kids().size())
    return a.kids().size() < b.kids().size() ? -1 : 1;
  for (size_t i = 0; i < a.kids().size(); ++i) {
    if (int c = term_cmp(a.kids()[i], b.kids()[i])) return c;
  }
  return 0;
}

std::string Term::str() const {
  switch (kind()) {
    case Tk::Var: return name();
    case Tk::Meta: return "?" + name();
    case Tk::Lit: return lit_value().str();
    case Tk::FieldAddr:
      return "(field " + kids()[0].str() + " " + std::to_string(offset()) + ")";
    case Tk::TreeE: return "E";
    case Tk::TreeT:
      return "(T " + kids()[0].str() + " " + kids()[1].str() + " " + kids()[2].str() +
             " " + kids()[3].str() + ")";
    case Tk::Ins:
      return "(ins " + kids()[0].str() + " " + kids()[1].str() + " " + kids()[2].str() + ")";
    case Tk::CtxLit: {
      std::string out = "(ctx";
      for (size_t i = 0; i < ctx_size(); ++i) {
        out += ctx_hole_left(i)
                   ? " (lhole " + ctx_key(i).str() + " " + ctx_val(i).str() + " " +
                         ctx_sub(i).str() + ")"
                   : " (rhole " + ctx_sub(i).str() + " " + ctx_key(i).str() + " " +
                         ctx_val(i).str() + ")";
      }
      return out + ")";
    }
    case Tk::CtxApply: return "(apply " + kids()[0].str() + " " + kids()[1].str() + ")";
    case Tk::CtxCompose:
      return "(compose " + kids()[0].str() + " " + kids()[1].str() + ")";
    case Tk::ListNil: return "nil";
    case Tk::ListCons: return "(cons " + kids()[0].str() + " " + kids()[1].str() + ")";
    case Tk::ListApp: return "(app " + kids()[0].str() + " " + kids()[1].str() + ")";
    case Tk::AggTuple: {
      std::string out = "(tuple";
      for (const Term& k : kids()) out += " " + k.str();
      return out + ")";
    }
    case Tk::AggGet: {
      std::string out = "(get " + kids()[0].str() + " (path";
      for (uint32_t p : path()) out += " " + std::to_string(p);
      return out + "))";
    }
    case Tk::AggSet: {
      std::string out = "(set " + kids()[0].str() + " (path";
      for (uint32_t p : path()) out += " " + std::to_string(p);
      return out + ") " + kids()[1].str() + ")";
    }
    case Tk::MapUpd:
      return "(update " + kids()[0].str() + " " + kids()[1].str() + " " +
             kids()[2].str() + ")";
  }
  return "?";
}

namespace {

template <typename Rebuild>
Term map_kids(const Term& t, Rebuild rebuild) {
  switch (t.kind()) {
    case Tk::Var:
    case Tk::Meta:
    case Tk::Lit:
    case Tk::TreeE:
    case Tk::ListNil:
      return t;
    case Tk::FieldAddr: return Term::field(rebuild(t.kids()[0]), t.offset());
    case Tk::TreeT:
      return Term::tree_t(rebuild(t.kids()[0]), rebuild(t.kids()[1]),
                          rebuild(t.kids()[2]), rebuild(t.kids()[3]));
    case Tk::Ins:
      return Term::ins(rebuild(t.kids()[0]), rebuild(t.kids()[1]), rebuild(t.kids()[2]));
    case Tk::CtxLit: {
      std::vector<CtxFrameT> frames;
      for (size_t i = 0; i < t.ctx_size(); ++i) {
        frames.push_back(CtxFrameT{t.ctx_hole_left(i), rebuild(t.ctx_key(i)),
                                   rebuild(t.ctx_val(i)), rebuild(t.ctx_sub(i))});
      }
      return Term::ctx(frames);
    }
    case Tk::CtxApply: return Term::apply(rebuild(t.kids()[0]), rebuild(t.kids()[1]));
    case Tk::CtxCompose:
      return Term::compose(rebuild(t.kids()[0]), rebuild(t.kids()[1]));
    case Tk::ListCons:
      return Term::list_cons(rebuild(t.kids()[0]), rebuild(t.kids()[1]));
    case Tk::ListApp:
      return Term::list_app(rebuild(t.kids()[0]), rebuild(t.kids()[1]));
    case Tk::AggTuple: {
      std::vector<Term> fields;
      for (const Term& k : t.kids()) fields.push_back(rebuild(k));
      return Term::tuple(fields);
    }
    case Tk::AggGet: return Term::get(rebuild(t.kids()[0]), t.path());
    case Tk::AggSet:
      return Term::set(rebuild(t.kids()[0]), t.path(), rebuild(t.kids()[1]));
    case Tk::MapUpd:
      return Term::map_upd(rebuild(t.kids()[0]), rebuild(t.kids()[1]),
                           rebuild(t.kids()[2]));
  }
  throw Error("unreachable term kind");
}

}  // namespace

Term subst(const Term& t, const std::map<std::string, Term>& sub) {
  if (sub.empty()) return t;
  if (t.kind() == Tk::Var) {
    auto it = sub.find(t.name());
    if (it == sub.end()) return t;
    if (!(it->second.sort() == t.sort()))
      throw SortError("substituting " + it->second.str() + " of sort " +
                      it->second.sort().str() + " for " + t.name() + " of sort " +
                      t.sort().str());
    return it->second;
  }
  bool relevant = false;
  for (const auto& name : t.fv()) {
    if (sub.count(name)) {
      relevant = true;
      break;
    }
  }
  if (!relevant) return t;
  return map_kids(t, [&](const Term& k) { return subst(k, sub); });
}

Term subst(const Term& t, const std::string& var, const Term& replacement) {
  return subst(t, std::map<std::string, Term>{{var, replacement}});
}

Term subst_meta(const Term& t, const std::map<std::string, Term>& sub) {
  if (!t.has_meta() || sub.empty()) return t;
  if (t.kind() == Tk::Meta) {
    auto it = sub.find(t.name());
    if (it == sub.end()) return t;
    if (!(it->second.sort() == t.sort()))
      throw SortError("metavariable " + t.name() + " bound at the wrong sort");
    return it->second;
  }
  return map_kids(t, [&](const Term& k) { return subst_meta(k, sub); });
}

bool occurs_free(const std::string& var, const Term& t) {
  return std::binary_search(t.fv().begin(), t.fv().end(), var);
}

std::string fresh_name(const std::string& base, const std::vector<std::string>& avoid) {
  auto taken = [&](const std::string& n) {
    return std::find(avoid.begin(), avoid.end(), n) != avoid.end();
  };
  if (!taken(base)) return base;
  for (int i = 1;; ++i) {
    std::string cand = base + "#" + std::to_string(i);
    if (!taken(cand)) return cand;
  }
}

}  // namespace sepwand
