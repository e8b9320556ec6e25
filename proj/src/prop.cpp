#include "sepwand/prop.hpp"

#include <algorithm>

namespace sepwand {
namespace {

uint64_t mix(uint64_t h, uint64_t x) {
  h ^= x + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
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

Prop Prop::make(Rep rep) {
  uint64_t h = 0x8f3a94c27be01d57ull;
  h = mix(h, (uint64_t)rep.kind);
  for (const Term& t : rep.terms) {
    h = mix(h, t.hash());
    rep.has_meta = rep.has_meta || t.has_meta();
    rep.fv = merge_names(std::move(rep.fv), t.fv());
  }
  for (const Prop& p : rep.props) {
    h = mix(h, p.hash());
    rep.has_meta = rep.has_meta || p.has_meta();
    rep.fv = merge_names(std::move(rep.fv), p.fv());
  }
  rep.hash = h;
  return Prop(std::make_shared<const Rep>(std::move(rep)));
}

Prop Prop::true_() { return make(Rep{}); }

Prop Prop::false_() {
  Rep r;
  r.kind = Pk::False_;
  return make(std::move(r));
}

Prop Prop::eq(const Term& a, const Term& b) {
  if (!(a.sort() == b.sort()))
    throw SortError("equating " + a.str() + " : " + a.sort().str() + " with " +
                    b.str() + " : " + b.sort().str());
  Rep r;
  r.kind = Pk::Eq;
  r.terms = {a, b};
  return make(std::move(r));
}

Prop Prop::neq(const Term& a, const Term& b) {
  if (!(a.sort() == b.sort())) throw SortError("disequating terms of different sorts");
  Rep r;
  r.kind = Pk::Neq;
  r.terms = {a, b};
  return make(std::move(r));
}

Prop Prop::lt(const Term& a, const Term& b) {
  if (!(a.sort() == Sort(SortKind::Int)) || !(b.sort() == Sort(SortKind::Int)))
    throw SortError("< compares Int terms");
  Rep r;
  r.kind = Pk::Lt;
  r.terms = {a, b};
  return make(std::move(r));
}

Prop Prop::and_(const Prop& a, const Prop& b) {
  Rep r;
  r.kind = Pk::And;
  r.props = {a, b};
  return make(std::move(r));
}

Prop Prop::or_(const Prop& a, const Prop& b) {
  Rep r;
  r.kind = Pk::Or;
  r.props = {a, b};
  return make(std::move(r));
}

Prop Prop::not_(const Prop& a) {
  Rep r;
  r.kind = Pk::Not;
  r.props = {a};
  return make(std::move(r));
}

Prop Prop::search_tree(const Term& t) {
  if (!(t.sort() == Sort(SortKind::Tree))) throw SortError("search-tree needs a Tree");
  Rep r;
  r.kind = Pk::SearchTreeP;
  r.terms = {t};
  return make(std::move(r));
}

Prop Prop::abs(const Term& t, const Term& m) {
  if (!(t.sort() == Sort(SortKind::Tree))) throw SortError("abs needs a Tree");
  if (!(m.sort() == Sort(SortKind::Map))) throw SortError("abs needs a Map");
  Rep r;
  r.kind = Pk::AbsP;
  r.terms = {t, m};
  return make(std::move(r));
}

bool Prop::operator==(const Prop& o) const {
  if (rep_ == o.rep_) return true;
  if (hash() != o.hash()) return false;
  return prop_cmp(*this, o) == 0;
}

int prop_cmp(const Prop& a, const Prop& b) {
  if (a.kind() != b.kind()) return (int)a.kind() < (int)b.kind() ? -1 : 1;
  if (a.terms().size() != b.terms().size())
    return a.terms().size() < b.terms().size() ? -1 : 1;
  for (size_t i = 0; i < a.terms().size(); ++i) {
    if (int c = term_cmp(a.terms()[i], b.terms()[i])) return c;
  }
  if (a.props().size() != b.props().size())
    return a.props().size() < b.props().size() ? -1 : 1;
  for (size_t i = 0; i < a.props().size(); ++i) {
    if (int c = prop_cmp(a.props()[i], b.props()[i])) return c;
  }
  return 0;
}

std::string Prop::str() const {
  switch (kind()) {
    case Pk::True_: return "true";
    case Pk::False_: return "false";
    case Pk::Eq: return "(= " + terms()[0].str() + " " + terms()[1].str() + ")";
    case Pk::Neq: return "(!= " + terms()[0].str() + " " + terms()[1].str() + ")";
    case Pk::Lt: return "(< " + terms()[0].str() + " " + terms()[1].str() + ")";
    case Pk::And: return "(and " + props()[0].str() + " " + props()[1].str() + ")";
    case Pk::Or: return "(or " + props()[0].str() + " " + props()[1].str() + ")";
    case Pk::Not: return "(not " + props()[0].str() + ")";
    case Pk::SearchTreeP: return "(search-tree " + terms()[0].str() + ")";
    case Pk::AbsP: return "(abs " + terms()[0].str() + " " + terms()[1].str() + ")";
  }
  return "?";
}

namespace {

template <typename FT, typename FP>
Prop map_prop(const Prop& p, FT on_term, FP on_prop) {
  switch (p.kind()) {
    case Pk::True_:
    case Pk::False_:
      return p;
    case Pk::Eq: return Prop::eq(on_term(p.terms()[0]), on_term(p.terms()[1]));
    case Pk::Neq: return Prop::neq(on_term(p.terms()[0]), on_term(p.terms()[1]));
    case Pk::Lt: return Prop::lt(on_term(p.terms()[0]), on_term(p.terms()[1]));
    case Pk::And: return Prop::and_(on_prop(p.props()[0]), on_prop(p.props()[1]));
    case Pk::Or: return Prop::or_(on_prop(p.props()[0]), on_prop(p.props()[1]));
    case Pk::Not: return Prop::not_(on_prop(p.props()[0]));
    case Pk::SearchTreeP: return Prop::search_tree(on_term(p.terms()[0]));
    case Pk::AbsP: return Prop::abs(on_term(p.terms()[0]), on_term(p.terms()[1]));
  }
  throw Error("unreachable prop kind");
}

}  // namespace

Prop subst(const Prop& p, const std::map<std::string, Term>& sub) {
  if (sub.empty()) return p;
  return map_prop(
      p, [&](const Term& t) { return subst(t, sub); },
      [&](const Prop& q) { return subst(q, sub); });
}

Prop subst(const Prop& p, const std::string& var, const Term& replacement) {
  return subst(p, std::map<std::string, Term>{{var, replacement}});
}

Prop subst_meta(const Prop& p, const std::map<std::string, Term>& sub) {
  if (!p.has_meta() || sub.empty()) return p;
  return map_prop(
      p, [&](const Term& t) { return subst_meta(t, sub); },
      [&](const Prop& q) { return subst_meta(q, sub); });
}

bool occurs_free(const std::string& var, const Prop& p) {
  return std::binary_search(p.fv().begin(), p.fv().end(), var);
}

}  // namespace sepwand
