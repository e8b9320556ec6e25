#include "sepwand/kernel.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sepwand/error.hpp"
#include "sepwand/eval.hpp"
#include "sepwand/oracle.hpp"
#include "sepwand/preds.hpp"

namespace sepwand {
namespace {

[[noreturn]] void reject(const std::string& rule, const std::string& what) {
  throw KernelReject(rule, what);
}

// Sort of a free variable on one side, when it occurs there.
std::optional<Sort> var_sort_in(const Assertion& a, const std::string& name) {
  for (const auto& [v, s] : free_vars_sorted(a))
    if (v == name) return s;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Term replacement for prop_rewrite. Plain subterm replacement; terms
// bind nothing, so the only scoping concern lives at the assertion
// level.

Term term_replace(const Term& t, const Term& from, const Term& to) {
  if (t == from) return to;
  auto go = [&](const Term& k) { return term_replace(k, from, to); };
  switch (t.kind()) {
    case Tk::Var:
    case Tk::Lit:
    case Tk::Meta:
    case Tk::TreeE:
    case Tk::ListNil:
      return t;
    case Tk::FieldAddr:
      return Term::field(go(t.kids()[0]), t.offset());
    case Tk::TreeT:
      return Term::tree_t(go(t.kids()[0]), go(t.kids()[1]), go(t.kids()[2]),
                          go(t.kids()[3]));
    case Tk::Ins:
      return Term::ins(go(t.kids()[0]), go(t.kids()[1]), go(t.kids()[2]));
    case Tk::CtxLit: {
      std::vector<CtxFrameT> fs;
      for (size_t i = 0; i < t.ctx_size(); ++i)
        fs.push_back(CtxFrameT{t.ctx_hole_left(i), go(t.ctx_key(i)),
                               go(t.ctx_val(i)), go(t.ctx_sub(i))});
      return Term::ctx(fs);
    }
    case Tk::CtxApply:
      return Term::apply(go(t.kids()[0]), go(t.kids()[1]));
    case Tk::CtxCompose:
      return Term::compose(go(t.kids()[0]), go(t.kids()[1]));
    case Tk::ListCons:
      return Term::list_cons(go(t.kids()[0]), go(t.kids()[1]));
    case Tk::ListApp:
      return Term::list_app(go(t.kids()[0]), go(t.kids()[1]));
    case Tk::AggTuple: {
      std::vector<Term> ks;
      for (const Term& k : t.kids()) ks.push_back(go(k));
      return Term::tuple(ks);
    }
    case Tk::AggGet:
      return Term::get(go(t.kids()[0]), t.path());
    case Tk::AggSet:
      return Term::set(go(t.kids()[0]), t.path(), go(t.kids()[1]));
    case Tk::MapUpd:
      return Term::map_upd(go(t.kids()[0]), go(t.kids()[1]), go(t.kids()[2]));
  }
  throw Error("term_replace: unhandled term kind");
}

Prop prop_replace(const Prop& p, const Term& from, const Term& to) {
  auto gt = [&](const Term& t) { return term_replace(t, from, to); };
  auto gp = [&](const Prop& q) { return prop_replace(q, from, to); };
  switch (p.kind()) {
    case Pk::True_:
    case Pk::False_:
      return p;
    case Pk::Eq:
      return Prop::eq(gt(p.terms()[0]), gt(p.terms()[1]));
    case Pk::Neq:
      return Prop::neq(gt(p.terms()[0]), gt(p.terms()[1]));
    case Pk::Lt:
      return Prop::lt(gt(p.terms()[0]), gt(p.terms()[1]));
    case Pk::And:
      return Prop::and_(gp(p.props()[0]), gp(p.props()[1]));
    case Pk::Or:
      return Prop::or_(gp(p.props()[0]), gp(p.props()[1]));
    case Pk::Not:
      return Prop::not_(gp(p.props()[0]));
    case Pk::SearchTreeP:
      return Prop::search_tree(gt(p.terms()[0]));
    case Pk::AbsP:
      return Prop::abs(gt(p.terms()[0]), gt(p.terms()[1]));
  }
  throw Error("prop_replace: unhandled prop kind");
}

// Replaces every occurrence of `from` outside the scope of a binder
// that shadows a variable of either side. Occurrences under such a
// binder mean something else and are left alone.
Assertion assertion_replace(const Assertion& a, const Term& from, const Term& to) {
  auto gt = [&](const Term& t) { return term_replace(t, from, to); };
  auto ga = [&](const Assertion& k) { return assertion_replace(k, from, to); };
  switch (a.kind()) {
    case Ak::Emp:
      return a;
    case Ak::PointsTo:
      return Assertion::pto(gt(a.terms()[0]), gt(a.terms()[1]));
    case Ak::Star:
      return Assertion::star(ga(a.kids()[0]), ga(a.kids()[1]));
    case Ak::Wand:
      return Assertion::wand(ga(a.kids()[0]), ga(a.kids()[1]));
    case Ak::Forall:
    case Ak::Exists: {
      const std::string& b = a.binder();
      auto shadows = [&](const Term& t) {
        const auto& fv = t.fv();
        return std::find(fv.begin(), fv.end(), b) != fv.end();
      };
      if (shadows(from) || shadows(to)) return a;
      Assertion body = ga(a.kids()[0]);
      return a.kind() == Ak::Forall
                 ? Assertion::forall(b, a.binder_sort(), body)
                 : Assertion::exists(b, a.binder_sort(), body);
    }
    case Ak::AndPure:
      return Assertion::and_pure(prop_replace(a.prop(), from, to),
                                 ga(a.kids()[0]));
    case Ak::Pred: {
      std::vector<Term> args;
      for (const Term& t : a.terms()) args.push_back(gt(t));
      return Assertion::pred(a.pred_name(), args);
    }
  }
  throw Error("assertion_replace: unhandled assertion kind");
}

// ---------------------------------------------------------------------------
// Capture-safe predicate unfolding. Definition bodies name their
// binders in the '^' family, which the surface parser refuses, so a
// goal written by hand never collides. Goals produced by a previous
// unfold can: the body of one step feeds the arguments of the next,
// carrying '^' names into them, and passing those through the
// definition verbatim would let its binders capture them. When that
// is about to happen, the clashing argument variables are moved to
// temporaries, the definition is unfolded, its colliding binders are
// renamed away, and the temporaries are moved back.

Assertion alpha_avoid(const Assertion& a, const std::set<std::string>& avoid) {
  auto ga = [&](const Assertion& k) { return alpha_avoid(k, avoid); };
  switch (a.kind()) {
    case Ak::Emp:
    case Ak::PointsTo:
    case Ak::Pred:
      return a;
    case Ak::Star:
      return Assertion::star(ga(a.kids()[0]), ga(a.kids()[1]));
    case Ak::Wand:
      return Assertion::wand(ga(a.kids()[0]), ga(a.kids()[1]));
    case Ak::AndPure:
      return Assertion::and_pure(a.prop(), ga(a.kids()[0]));
    case Ak::Forall:
    case Ak::Exists: {
      std::string b = a.binder();
      Assertion body = a.kids()[0];
      if (avoid.count(b)) {
        std::vector<std::string> taken(avoid.begin(), avoid.end());
        for (const std::string& v : body.fv()) taken.push_back(v);
        std::string nb = fresh_name(b, taken);
        body = subst(body, b, Term::var(nb, a.binder_sort()));
        b = nb;
      }
      body = ga(body);
      return a.kind() == Ak::Forall ? Assertion::forall(b, a.binder_sort(), body)
                                    : Assertion::exists(b, a.binder_sort(), body);
    }
  }
  throw Error("alpha_avoid: unhandled assertion kind");
}

Assertion unfold_capture_safe(const Assertion& occ) {
  std::set<std::string> clash;
  for (const Term& t : occ.terms())
    for (const std::string& v : t.fv())
      if (!v.empty() && v.back() == '^') clash.insert(v);
  if (clash.empty()) return unfold_pred(occ);

  std::vector<std::string> taken;
  for (const auto& [v, s] : free_vars_sorted(occ)) {
    (void)s;
    taken.push_back(v);
  }
  std::map<std::string, Term> out, back;
  for (const std::string& v : clash) {
    std::optional<Sort> s = var_sort_in(occ, v);
    if (!s) continue;  // argument metavariable family; nothing to protect
    std::string tmp = fresh_name("u", taken);
    taken.push_back(tmp);
    out.emplace(v, Term::var(tmp, *s));
    back.emplace(tmp, Term::var(v, *s));
  }
  Assertion body = unfold_pred(subst(occ, out));
  return subst(alpha_avoid(body, clash), back);
}

// ---------------------------------------------------------------------------
// Equation justification for prop_rewrite.

bool holds_outright(const Term& from, const Term& to) {
  try {
    if (reduce(from) == reduce(to)) return true;
  } catch (const Error&) {
  }
  if (!from.fv().empty() || !to.fv().empty() || from.has_meta() ||
      to.has_meta())
    return false;
  try {
    Env none;
    return eval_term(from, none).str() == eval_term(to, none).str();
  } catch (const Error&) {
    return false;
  }
}

// ---------------------------------------------------------------------------
// The single validator. Both the rule constructors and check() funnel
// through here, so a conclusion can only ever be computed one way.
// `where` is the premise path when re-checking, empty at build time.

using Pay = Derivation::Pay;

std::string at(const std::string& where) {
  return where.empty() ? "" : " [at " + where + "]";
}

Entailment conclude(const std::string& rule, const Pay& pay,
                    const std::vector<Entailment>& prem,
                    const std::string& where) {
  auto fail = [&](const std::string& msg) -> void {
    reject(rule, msg + at(where));
  };
  auto want_prems = [&](size_t n) {
    if (prem.size() != n)
      fail("expects " + std::to_string(n) + " premise(s), got " +
           std::to_string(prem.size()));
  };
  auto wrap = [&](auto mk) -> Entailment {
    try {
      return mk();
    } catch (const KernelReject&) {
      throw;
    } catch (const SortError& e) {
      fail(e.what());
      throw;  // unreachable
    }
  };

  if (rule == "entail_refl") {
    want_prems(0);
    return wrap([&] { return Entailment(pay.as[0], pay.as[0]); });
  }
  if (rule == "entail_trans") {
    want_prems(2);
    if (prem[0].succ() != prem[1].ante())
      fail("middle assertions differ: " + prem[0].succ().str() + " vs " +
           prem[1].ante().str());
    return wrap([&] { return Entailment(prem[0].ante(), prem[1].succ()); });
  }
  if (rule == "star_comm") {
    want_prems(0);
    return wrap([&] {
      return Entailment(Assertion::star(pay.as[0], pay.as[1]),
                        Assertion::star(pay.as[1], pay.as[0]));
    });
  }
  if (rule == "star_assoc_lr") {
    want_prems(0);
    return wrap([&] {
      return Entailment(
          Assertion::star(Assertion::star(pay.as[0], pay.as[1]), pay.as[2]),
          Assertion::star(pay.as[0], Assertion::star(pay.as[1], pay.as[2])));
    });
  }
  if (rule == "star_assoc_rl") {
    want_prems(0);
    return wrap([&] {
      return Entailment(
          Assertion::star(pay.as[0], Assertion::star(pay.as[1], pay.as[2])),
          Assertion::star(Assertion::star(pay.as[0], pay.as[1]), pay.as[2]));
    });
  }
  if (rule == "emp_unit_intro") {
    want_prems(0);
    return wrap([&] {
      return Entailment(pay.as[0], Assertion::star(Assertion::emp(), pay.as[0]));
    });
  }
  if (rule == "emp_unit_elim") {
    want_prems(0);
    return wrap([&] {
      return Entailment(Assertion::star(Assertion::emp(), pay.as[0]), pay.as[0]);
    });
  }
  if (rule == "star_mono") {
    want_prems(2);
    return wrap([&] {
      return Entailment(Assertion::star(prem[0].ante(), prem[1].ante()),
                        Assertion::star(prem[0].succ(), prem[1].succ()));
    });
  }
  if (rule == "wand_adjoint_1") {
    want_prems(1);
    if (prem[0].succ().kind() != Ak::Wand)
      fail("premise succedent is not a wand: " + prem[0].succ().str());
    const Assertion& w = prem[0].succ();
    return wrap([&] {
      return Entailment(Assertion::star(prem[0].ante(), w.kids()[0]),
                        w.kids()[1]);
    });
  }
  if (rule == "wand_adjoint_2") {
    want_prems(1);
    if (prem[0].ante().kind() != Ak::Star)
      fail("premise antecedent is not a star: " + prem[0].ante().str());
    const Assertion& s = prem[0].ante();
    return wrap([&] {
      return Entailment(s.kids()[0],
                        Assertion::wand(s.kids()[1], prem[0].succ()));
    });
  }
  if (rule == "forall_intro") {
    want_prems(1);
    if (occurs_free(pay.name, prem[0].ante()))
      fail("eigenvariable " + pay.name + " occurs free in the antecedent");
    if (auto s = var_sort_in(prem[0].succ(), pay.name); s && *s != pay.sort)
      fail("eigenvariable " + pay.name + " is used at sort " + s->str() +
           ", not " + pay.sort.str());
    return wrap([&] {
      return Entailment(prem[0].ante(),
                        Assertion::forall(pay.name, pay.sort, prem[0].succ()));
    });
  }
  if (rule == "forall_elim") {
    want_prems(0);
    const Assertion& q = pay.as[0];
    const Term& w = pay.ts[0];
    if (q.kind() != Ak::Forall) fail("not a forall: " + q.str());
    if (w.has_meta()) fail("witness contains a metavariable: " + w.str());
    if (w.sort() != q.binder_sort())
      fail("witness sort " + w.sort().str() + " does not match binder sort " +
           q.binder_sort().str());
    return wrap([&] {
      return Entailment(q, subst(q.kids()[0], q.binder(), w));
    });
  }
  if (rule == "exists_intro") {
    want_prems(0);
    const Assertion& q = pay.as[0];
    const Term& w = pay.ts[0];
    if (q.kind() != Ak::Exists) fail("not an exists: " + q.str());
    if (w.has_meta()) fail("witness contains a metavariable: " + w.str());
    if (w.sort() != q.binder_sort())
      fail("witness sort " + w.sort().str() + " does not match binder sort " +
           q.binder_sort().str());
    return wrap([&] {
      return Entailment(subst(q.kids()[0], q.binder(), w), q);
    });
  }
  if (rule == "exists_elim") {
    want_prems(1);
    if (occurs_free(pay.name, prem[0].succ()))
      fail("eigenvariable " + pay.name + " occurs free in the conclusion");
    if (auto s = var_sort_in(prem[0].ante(), pay.name); s && *s != pay.sort)
      fail("eigenvariable " + pay.name + " is used at sort " + s->str() +
           ", not " + pay.sort.str());
    return wrap([&] {
      return Entailment(Assertion::exists(pay.name, pay.sort, prem[0].ante()),
                        prem[0].succ());
    });
  }
  if (rule == "pure_intro") {
    want_prems(1);
    if (!pure_entails(pure_prefix(prem[0].ante()), pay.ps[0]))
      fail("fact is not entailed by the antecedent's pure prefix: " +
           pay.ps[0].str());
    return wrap([&] {
      return Entailment(prem[0].ante(),
                        Assertion::and_pure(pay.ps[0], prem[0].succ()));
    });
  }
  if (rule == "pure_elim") {
    want_prems(0);
    return wrap([&] {
      return Entailment(Assertion::and_pure(pay.ps[0], pay.as[0]), pay.as[0]);
    });
  }
  if (rule == "pure_mono") {
    want_prems(1);
    return wrap([&] {
      return Entailment(Assertion::and_pure(pay.ps[0], prem[0].ante()),
                        Assertion::and_pure(pay.ps[0], prem[0].succ()));
    });
  }
  if (rule == "pure_hoist") {
    want_prems(0);
    return wrap([&] {
      return Entailment(
          Assertion::star(Assertion::and_pure(pay.ps[0], pay.as[0]), pay.as[1]),
          Assertion::and_pure(pay.ps[0],
                              Assertion::star(pay.as[0], pay.as[1])));
    });
  }
  if (rule == "pure_lower") {
    want_prems(0);
    return wrap([&] {
      return Entailment(
          Assertion::and_pure(pay.ps[0], Assertion::star(pay.as[0], pay.as[1])),
          Assertion::star(Assertion::and_pure(pay.ps[0], pay.as[0]),
                          pay.as[1]));
    });
  }
  if (rule == "pred_unfold" || rule == "pred_fold") {
    want_prems(0);
    const Assertion& occ = pay.as[0];
    if (occ.kind() != Ak::Pred) fail("not a predicate occurrence: " + occ.str());
    Assertion body = [&] {
      try {
        return unfold_capture_safe(occ);
      } catch (const CannotUnfold& e) {
        fail(e.what());
        throw;  // unreachable
      }
    }();
    return wrap([&] {
      return rule == "pred_unfold" ? Entailment(occ, body)
                                   : Entailment(body, occ);
    });
  }
  if (rule == "prop_rewrite") {
    want_prems(1);
    const Term& from = pay.ts[0];
    const Term& to = pay.ts[1];
    if (from.sort() != to.sort())
      fail("equation sides have different sorts: " + from.sort().str() +
           " vs " + to.sort().str());
    if (!holds_outright(from, to)) {
      if (pay.flag)
        fail("rewriting the antecedent needs an equation that holds "
             "outright; " +
             from.str() + " = " + to.str() + " is only hypothetical");
      bool justified = false;
      try {
        justified =
            pure_entails(pure_prefix(prem[0].ante()), Prop::eq(from, to));
      } catch (const SortError&) {
      }
      if (!justified)
        fail("equation not justified: " + from.str() + " = " + to.str());
    }
    return wrap([&] {
      return pay.flag
                 ? Entailment(assertion_replace(prem[0].ante(), from, to),
                              prem[0].succ())
                 : Entailment(prem[0].ante(),
                              assertion_replace(prem[0].succ(), from, to));
    });
  }
  reject(rule, "unknown rule" + at(where));
}

}  // namespace

// ---------------------------------------------------------------------------

Entailment::Entailment(const Assertion& ante, const Assertion& succ)
    : ante_(ante), succ_(succ) {
  if (ante.has_meta() || succ.has_meta())
    throw SortError("entailment sides must not contain metavariables");
  // One shared free-variable context: star them and let the sorted
  // free-variable scan object to any cross-side clash.
  free_vars_sorted(Assertion::star(ante, succ));
}

std::string Entailment::str() const {
  return "(entail " + ante_.str() + " " + succ_.str() + ")";
}

// ---------------------------------------------------------------------------

Derivation Derivation::make(const std::string& rule, Pay pay,
                            std::vector<Derivation> prems) {
  std::vector<Entailment> pe;
  pe.reserve(prems.size());
  for (const Derivation& p : prems) pe.push_back(p.conclusion());
  Entailment c = conclude(rule, pay, pe, "");
  return Derivation(std::make_shared<const Rep>(
      Rep{rule, std::move(pay), std::move(prems), std::move(c)}));
}

Derivation Derivation::entail_refl(const Assertion& a) {
  Pay p;
  p.as = {a};
  return make("entail_refl", std::move(p), {});
}

Derivation Derivation::entail_trans(const Derivation& ab, const Derivation& bc) {
  return make("entail_trans", Pay{}, {ab, bc});
}

Derivation Derivation::star_comm(const Assertion& p, const Assertion& q) {
  Pay pay;
  pay.as = {p, q};
  return make("star_comm", std::move(pay), {});
}

Derivation Derivation::star_assoc_lr(const Assertion& a, const Assertion& b,
                                     const Assertion& c) {
  Pay pay;
  pay.as = {a, b, c};
  return make("star_assoc_lr", std::move(pay), {});
}

Derivation Derivation::star_assoc_rl(const Assertion& a, const Assertion& b,
                                     const Assertion& c) {
  Pay pay;
  pay.as = {a, b, c};
  return make("star_assoc_rl", std::move(pay), {});
}

Derivation Derivation::emp_unit_intro(const Assertion& a) {
  Pay pay;
  pay.as = {a};
  return make("emp_unit_intro", std::move(pay), {});
}

Derivation Derivation::emp_unit_elim(const Assertion& a) {
  Pay pay;
  pay.as = {a};
  return make("emp_unit_elim", std::move(pay), {});
}

Derivation Derivation::star_mono(const Derivation& d1, const Derivation& d2) {
  return make("star_mono", Pay{}, {d1, d2});
}

Derivation Derivation::wand_adjoint_1(const Derivation& d) {
  return make("wand_adjoint_1", Pay{}, {d});
}

Derivation Derivation::wand_adjoint_2(const Derivation& d) {
  return make("wand_adjoint_2", Pay{}, {d});
}

Derivation Derivation::forall_intro(const Derivation& d, const std::string& var,
                                    Sort sort) {
  Pay pay;
  pay.name = var;
  pay.sort = sort;
  return make("forall_intro", std::move(pay), {d});
}

Derivation Derivation::forall_elim(const Assertion& quantified,
                                   const Term& witness) {
  Pay pay;
  pay.as = {quantified};
  pay.ts = {witness};
  return make("forall_elim", std::move(pay), {});
}

Derivation Derivation::exists_intro(const Assertion& quantified,
                                    const Term& witness) {
  Pay pay;
  pay.as = {quantified};
  pay.ts = {witness};
  return make("exists_intro", std::move(pay), {});
}

Derivation Derivation::exists_elim(const Derivation& d, const std::string& var,
                                   Sort sort) {
  Pay pay;
  pay.name = var;
  pay.sort = sort;
  return make("exists_elim", std::move(pay), {d});
}

Derivation Derivation::pure_intro(const Derivation& d, const Prop& fact) {
  Pay pay;
  pay.ps = {fact};
  return make("pure_intro", std::move(pay), {d});
}

Derivation Derivation::pure_elim(const Prop& fact, const Assertion& body) {
  Pay pay;
  pay.ps = {fact};
  pay.as = {body};
  return make("pure_elim", std::move(pay), {});
}

Derivation Derivation::pure_mono(const Derivation& d, const Prop& fact) {
  Pay pay;
  pay.ps = {fact};
  return make("pure_mono", std::move(pay), {d});
}

Derivation Derivation::pure_hoist(const Prop& fact, const Assertion& a,
                                  const Assertion& b) {
  Pay pay;
  pay.ps = {fact};
  pay.as = {a, b};
  return make("pure_hoist", std::move(pay), {});
}

Derivation Derivation::pure_lower(const Prop& fact, const Assertion& a,
                                  const Assertion& b) {
  Pay pay;
  pay.ps = {fact};
  pay.as = {a, b};
  return make("pure_lower", std::move(pay), {});
}

Derivation Derivation::pred_unfold(const Assertion& occurrence) {
  Pay pay;
  pay.as = {occurrence};
  return make("pred_unfold", std::move(pay), {});
}

Derivation Derivation::pred_fold(const Assertion& occurrence) {
  Pay pay;
  pay.as = {occurrence};
  return make("pred_fold", std::move(pay), {});
}

Derivation Derivation::prop_rewrite(const Derivation& d, const Term& from,
                                    const Term& to, bool in_ante) {
  Pay pay;
  pay.ts = {from, to};
  pay.flag = in_ante;
  return make("prop_rewrite", std::move(pay), {d});
}

// ---------------------------------------------------------------------------

Entailment check(const Derivation& d) {
  auto rec = [](auto&& self, const Derivation& n,
                const std::string& path) -> Entailment {
    std::vector<Entailment> pe;
    pe.reserve(n.premises().size());
    for (size_t i = 0; i < n.premises().size(); ++i)
      pe.push_back(self(self, n.premises()[i], path + "." + std::to_string(i)));
    Entailment e = conclude(n.rep_->rule, n.rep_->pay, pe, path);
    if (e != n.conclusion())
      reject(n.rep_->rule, "stored conclusion does not match the re-derived "
                           "one" +
                               at(path));
    return e;
  };
  return rec(rec, d, "root");
}

// ---------------------------------------------------------------------------
// Trace format. Line := indent, rule name, then the node's side data
// as space-separated s-expressions, in the order the constructor
// takes them. Premises follow on deeper lines.

std::string Derivation::trace() const {
  std::string out;
  auto walk = [&](auto&& self, const Derivation& d, int depth) -> void {
    out.append(static_cast<size_t>(depth) * 2, ' ');
    out += d.rep_->rule;
    const Pay& p = d.rep_->pay;
    auto put = [&](const std::string& s) {
      out += ' ';
      out += s;
    };
    const std::string& r = d.rep_->rule;
    if (r == "forall_intro" || r == "exists_elim") {
      put(p.name);
      put(p.sort.str());
    } else if (r == "prop_rewrite") {
      put(p.ts[0].str());
      put(p.ts[1].str());
      put(p.flag ? "ante" : "succ");
    } else {
      for (const Prop& f : p.ps) put(f.str());
      for (const Assertion& a : p.as) put(a.str());
      for (const Term& t : p.ts) put(t.str());
    }
    out += '\n';
    for (const Derivation& c : d.rep_->prems) self(self, c, depth + 1);
  };
  walk(walk, *this, 0);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct TraceLine {
  int depth = 0;
  int lineno = 0;
  std::string rule;
  std::vector<Sexpr> pay;
};

std::vector<TraceLine> trace_lines(const std::string& text) {
  std::vector<TraceLine> out;
  std::istringstream in(text);
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    size_t sp = line.find_first_not_of(' ');
    if (sp == std::string::npos) continue;
    if (sp % 2 != 0)
      throw ParseError(no, "trace indentation must be a multiple of two");
    TraceLine tl;
    tl.depth = static_cast<int>(sp / 2);
    tl.lineno = no;
    std::vector<Sexpr> items;
    try {
      items = read_sexprs(line.substr(sp));
    } catch (const ParseError& e) {
      throw ParseError(no, e.what());
    }
    if (items.empty() || !items[0].atom)
      throw ParseError(no, "expected a rule name");
    tl.rule = items[0].text;
    tl.pay.assign(items.begin() + 1, items.end());
    out.push_back(std::move(tl));
  }
  if (out.empty()) throw ParseError(0, "empty proof trace");
  return out;
}

}  // namespace

Derivation trace_parse(const std::string& text, const VarScope& scope) {
  std::vector<TraceLine> lines = trace_lines(text);
  size_t idx = 0;

  auto build = [&](auto&& self, int depth, VarScope sc) -> Derivation {
    const TraceLine& L = lines[idx];
    if (L.depth != depth)
      throw ParseError(L.lineno, "unexpected indentation depth");
    ++idx;

    auto bad = [&](const std::string& msg) -> ParseError {
      return ParseError(L.lineno, L.rule + ": " + msg);
    };
    auto want = [&](size_t n) {
      if (L.pay.size() != n)
        throw bad("expected " + std::to_string(n) + " payload item(s), got " +
                  std::to_string(L.pay.size()));
    };
    auto atom_at = [&](size_t i) -> const std::string& {
      if (!L.pay[i].atom) throw bad("expected an atom payload item");
      return L.pay[i].text;
    };
    auto sort_at = [&](size_t i) -> Sort {
      try {
        return parse_sort(atom_at(i));
      } catch (const Error& e) {
        throw bad(e.what());
      }
    };

    // Eigenvariable rules extend the scope for their premise.
    VarScope child = sc;
    if (L.rule == "forall_intro" || L.rule == "exists_elim") {
      want(2);
      child[atom_at(0)] = sort_at(1);
    }

    std::vector<Derivation> prems;
    while (idx < lines.size() && lines[idx].depth == depth + 1)
      prems.push_back(self(self, depth + 1, child));
    if (idx < lines.size() && lines[idx].depth > depth + 1)
      throw ParseError(lines[idx].lineno, "unexpected indentation depth");

    auto assn = [&](size_t i) {
      try {
        return parse_assertion(L.pay[i], sc);
      } catch (const ParseError& e) {
        throw ParseError(L.lineno, e.what());
      }
    };
    auto term = [&](size_t i) {
      try {
        return parse_term(L.pay[i], sc);
      } catch (const ParseError& e) {
        throw ParseError(L.lineno, e.what());
      }
    };
    auto prop = [&](size_t i) {
      try {
        return parse_prop(L.pay[i], sc);
      } catch (const ParseError& e) {
        throw ParseError(L.lineno, e.what());
      }
    };
    auto prem = [&](size_t i) -> const Derivation& {
      if (prems.size() <= i)
        throw bad("expects " + std::to_string(i + 1) + " premise(s), got " +
                  std::to_string(prems.size()));
      return prems[i];
    };
    auto want_prems = [&](size_t n) {
      if (prems.size() != n)
        throw bad("expects " + std::to_string(n) + " premise(s), got " +
                  std::to_string(prems.size()));
    };

    const std::string& r = L.rule;
    if (r == "entail_refl") {
      want(1);
      want_prems(0);
      return Derivation::entail_refl(assn(0));
    }
    if (r == "entail_trans") {
      want(0);
      want_prems(2);
      return Derivation::entail_trans(prem(0), prem(1));
    }
    if (r == "star_comm") {
      want(2);
      want_prems(0);
      return Derivation::star_comm(assn(0), assn(1));
    }
    if (r == "star_assoc_lr") {
      want(3);
      want_prems(0);
      return Derivation::star_assoc_lr(assn(0), assn(1), assn(2));
    }
    if (r == "star_assoc_rl") {
      want(3);
      want_prems(0);
      return Derivation::star_assoc_rl(assn(0), assn(1), assn(2));
    }
    if (r == "emp_unit_intro") {
      want(1);
      want_prems(0);
      return Derivation::emp_unit_intro(assn(0));
    }
    if (r == "emp_unit_elim") {
      want(1);
      want_prems(0);
      return Derivation::emp_unit_elim(assn(0));
    }
    if (r == "star_mono") {
      want(0);
      want_prems(2);
      return Derivation::star_mono(prem(0), prem(1));
    }
    if (r == "wand_adjoint_1") {
      want(0);
      want_prems(1);
      return Derivation::wand_adjoint_1(prem(0));
    }
    if (r == "wand_adjoint_2") {
      want(0);
      want_prems(1);
      return Derivation::wand_adjoint_2(prem(0));
    }
    if (r == "forall_intro") {
      want_prems(1);
      return Derivation::forall_intro(prem(0), atom_at(0), sort_at(1));
    }
    if (r == "forall_elim") {
      want(2);
      want_prems(0);
      return Derivation::forall_elim(assn(0), term(1));
    }
    if (r == "exists_intro") {
      want(2);
      want_prems(0);
      return Derivation::exists_intro(assn(0), term(1));
    }
    if (r == "exists_elim") {
      want_prems(1);
      return Derivation::exists_elim(prem(0), atom_at(0), sort_at(1));
    }
    if (r == "pure_intro") {
      want(1);
      want_prems(1);
      return Derivation::pure_intro(prem(0), prop(0));
    }
    if (r == "pure_elim") {
      want(2);
      want_prems(0);
      return Derivation::pure_elim(prop(0), assn(1));
    }
    if (r == "pure_mono") {
      want(1);
      want_prems(1);
      return Derivation::pure_mono(prem(0), prop(0));
    }
    if (r == "pure_hoist") {
      want(3);
      want_prems(0);
      return Derivation::pure_hoist(prop(0), assn(1), assn(2));
    }
    if (r == "pure_lower") {
      want(3);
      want_prems(0);
      return Derivation::pure_lower(prop(0), assn(1), assn(2));
    }
    if (r == "pred_unfold") {
      want(1);
      want_prems(0);
      return Derivation::pred_unfold(assn(0));
    }
    if (r == "pred_fold") {
      want(1);
      want_prems(0);
      return Derivation::pred_fold(assn(0));
    }
    if (r == "prop_rewrite") {
      want(3);
      want_prems(1);
      const std::string& side = atom_at(2);
      if (side != "ante" && side != "succ")
        throw bad("rewrite side must be ante or succ, got " + side);
      return Derivation::prop_rewrite(prem(0), term(0), term(1),
                                      side == "ante");
    }
    throw bad("unknown rule");
  };

  Derivation d = build(build, 0, scope);
  if (idx != lines.size())
    throw ParseError(lines[idx].lineno, "trailing lines after the root proof");
  return d;
}

}  // namespace sepwand
