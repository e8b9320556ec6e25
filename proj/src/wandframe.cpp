#include "sepwand/wandframe.hpp"

#include <algorithm>

#include "sepwand/error.hpp"

namespace sepwand {

namespace {

// W * P(w) |- Q(w), where W is a closed-over forall-wand assertion
// forall x. (P(x) -* Q(x)) and w the instantiation point. The wand
// gets specialized by forall_elim and then discharged against the
// payload sitting next to it.
Derivation cash_at(const Assertion& w_all, const Term& at, const Assertion& pw,
                   const Assertion& qw) {
  Derivation spec = Derivation::forall_elim(w_all, at);
  Derivation paired =
      Derivation::star_mono(spec, Derivation::entail_refl(pw));
  return Derivation::entail_trans(paired,
                                  wand_cancel(Assertion::wand(pw, qw)));
}

void need_same_index(const IndexedAssertion& a, const IndexedAssertion& b,
                     const char* who) {
  if (a.var != b.var || !(a.sort == b.sort))
    throw SideConditionError(std::string(who) +
                             ": indexed arguments must share one binder "
                             "variable and sort (got " +
                             a.var + ":" + a.sort.str() + " vs " + b.var + ":" +
                             b.sort.str() + ")");
}

Assertion forall_wand(const IndexedAssertion& p, const IndexedAssertion& q) {
  return Assertion::forall(p.var, p.sort,
                           Assertion::wand(p.body, q.body));
}

// Names listed in `modified` must not occur free in `frame`; the
// framed residue has to survive the command untouched.
void need_unmodified(const Assertion& frame,
                     const std::vector<std::string>& modified,
                     const char* who) {
  const std::vector<std::string>& free = frame.fv();
  for (const std::string& m : modified) {
    if (std::find(free.begin(), free.end(), m) != free.end())
      throw SideConditionError(std::string(who) + ": frame mentions modified "
                                                  "variable " +
                               m);
  }
}

}  // namespace

Derivation wandq_intro(const IndexedAssertion& p, const Assertion& q) {
  // Q * P(x) |- P(x) * Q, then adjoint to Q |- P(x) -* P(x) * Q and
  // generalize. forall_intro is where x-not-free-in-Q gets enforced.
  Derivation flip = Derivation::star_comm(q, p.body);
  Derivation curried = Derivation::wand_adjoint_2(flip);
  return Derivation::forall_intro(curried, p.var, p.sort);
}

Derivation wandq_elim(const IndexedAssertion& p, const IndexedAssertion& q,
                      const Term& witness) {
  need_same_index(p, q, "wandq_elim");
  if (!(witness.sort() == p.sort))
    throw SideConditionError("wandq_elim: witness has sort " +
                             witness.sort().str() + ", rule is indexed over " +
                             p.sort.str());
  Assertion w_all = forall_wand(p, q);
  Assertion pw = p.at(witness);
  Assertion qw = q.at(witness);
  Derivation flip = Derivation::star_comm(pw, w_all);
  return Derivation::entail_trans(flip, cash_at(w_all, witness, pw, qw));
}

Derivation wandq_hor(const IndexedAssertion& p1, const IndexedAssertion& q1,
                     const IndexedAssertion& p2, const IndexedAssertion& q2) {
  need_same_index(p1, q1, "wandq_hor");
  need_same_index(p1, p2, "wandq_hor");
  need_same_index(p1, q2, "wandq_hor");
  Assertion w1 = forall_wand(p1, q1);
  Assertion w2 = forall_wand(p2, q2);
  Term x = p1.index();

  // (W1 * W2) * (P1 * P2) |- Q1 * Q2 at the generic index, by pairing
  // each wand with its own payload.
  Assertion grouped = Assertion::star(Assertion::star(w1, p1.body),
                                      Assertion::star(w2, p2.body));
  Derivation regroup = rearrange(
      Assertion::star(Assertion::star(w1, w2),
                      Assertion::star(p1.body, p2.body)),
      grouped);
  Derivation cashed = Derivation::star_mono(
      cash_at(w1, x, p1.body, q1.body), cash_at(w2, x, p2.body, q2.body));
  Derivation body = Derivation::entail_trans(regroup, cashed);
  return Derivation::forall_intro(Derivation::wand_adjoint_2(body), p1.var,
                                  p1.sort);
}

Derivation wandq_ver(const IndexedAssertion& p, const IndexedAssertion& q,
                     const IndexedAssertion& r) {
  need_same_index(p, q, "wandq_ver");
  need_same_index(p, r, "wandq_ver");
  Assertion w1 = forall_wand(p, q);
  Assertion w2 = forall_wand(q, r);
  Term x = p.index();

  // (W1 * W2) * P |- R: feed P through W1 first, the result through
  // W2.
  Derivation regroup = rearrange(
      Assertion::star(Assertion::star(w1, w2), p.body),
      Assertion::star(w2, Assertion::star(w1, p.body)));
  Derivation first = Derivation::star_mono(Derivation::entail_refl(w2),
                                           cash_at(w1, x, p.body, q.body));
  Derivation second = cash_at(w2, x, q.body, r.body);
  Derivation body = Derivation::entail_trans(
      Derivation::entail_trans(regroup, first), second);
  return Derivation::forall_intro(Derivation::wand_adjoint_2(body), p.var,
                                  p.sort);
}

Derivation wandq_refine(const IndexedAssertion& p, const IndexedAssertion& q,
                        const IndexedTerm& f) {
  need_same_index(p, q, "wandq_refine");
  if (!(f.body.sort() == p.sort))
    throw SideConditionError(
        "wandq_refine: term former produces " + f.body.sort().str() +
        " but the rule is indexed over " + p.sort.str());
  Assertion w_all = forall_wand(p, q);
  Derivation at_f = Derivation::forall_elim(w_all, f.body);
  return Derivation::forall_intro(at_f, f.var, f.sort);
}

Ramification ramif(const HoareTriple& local, const Derivation& frame_entail) {
  Entailment fe = check(frame_entail);
  const Assertion& rhs = fe.succ();
  if (rhs.kind() != Ak::Star)
    throw ShapeError("ramif: frame entailment must conclude G |- L * (L' -* G'), got succedent " +
                     rhs.str());
  const Assertion& l = rhs.kids()[0];
  const Assertion& f = rhs.kids()[1];
  if (f.kind() != Ak::Wand)
    throw ShapeError("ramif: frame part must be a wand, got " + f.str());
  if (!(l == local.pre))
    throw ShapeError("ramif: local precondition " + local.pre.str() +
                     " does not match framed-out " + l.str());
  if (!(f.kids()[0] == local.post))
    throw ShapeError("ramif: local postcondition " + local.post.str() +
                     " does not match wand argument " + f.kids()[0].str());
  need_unmodified(f, local.modified, "ramif");
  HoareTriple global{fe.ante(), f.kids()[1], local.modified};
  return Ramification{local, global, frame_entail};
}

Ramification ramifq(const HoareTriple& local, const Derivation& frame_entail) {
  Entailment fe = check(frame_entail);
  const Assertion& rhs = fe.succ();
  if (rhs.kind() != Ak::Star)
    throw ShapeError(
        "ramifq: frame entailment must conclude G |- L * forall x. (L' -* G'), "
        "got succedent " +
        rhs.str());
  const Assertion& l = rhs.kids()[0];
  const Assertion& f = rhs.kids()[1];
  if (f.kind() != Ak::Forall || f.kids()[0].kind() != Ak::Wand)
    throw ShapeError("ramifq: frame part must be a quantified wand, got " +
                     f.str());
  const Assertion& lp = f.kids()[0].kids()[0];
  const Assertion& gp = f.kids()[0].kids()[1];
  if (!(l == local.pre))
    throw ShapeError("ramifq: local precondition " + local.pre.str() +
                     " does not match framed-out " + l.str());
  // The local step ends in exists x. L'(x) with the same binder the
  // frame abstracts over; the global step then ends in exists x. G'(x).
  if (local.post.kind() != Ak::Exists || local.post.binder() != f.binder() ||
      !(local.post.binder_sort() == f.binder_sort()) ||
      !(local.post.kids()[0] == lp))
    throw ShapeError("ramifq: local postcondition must be exists " +
                     f.binder() + ". " + lp.str() + ", got " +
                     local.post.str());
  need_unmodified(f, local.modified, "ramifq");
  HoareTriple global{fe.ante(),
                     Assertion::exists(f.binder(), f.binder_sort(), gp),
                     local.modified};
  return Ramification{local, global, frame_entail};
}

Derivation hobor_villard(const Derivation& d1, const Derivation& d2) {
  const Entailment& c1 = d1.conclusion();
  const Entailment& c2 = d2.conclusion();
  auto split = [](const Entailment& c, const char* which) {
    const Assertion& s = c.succ();
    if (s.kind() != Ak::Star || s.kids()[1].kind() != Ak::Wand)
      throw ShapeError(std::string("hobor_villard: ") + which +
                       " must conclude G |- L * (L' -* G'), got succedent " +
                       s.str());
    return std::pair<Assertion, Assertion>(s.kids()[0], s.kids()[1]);
  };
  auto [l1, f1] = split(c1, "first argument");
  auto [l2, f2] = split(c2, "second argument");
  const Assertion& l1p = f1.kids()[0];
  const Assertion& l2p = f2.kids()[0];

  // G1 * G2 |- (L1 * F1) * (L2 * F2) |- (L1 * L2) * (F1 * F2), then
  // fuse the two wands into one over the combined payload.
  Derivation side_by_side = Derivation::star_mono(d1, d2);
  Derivation regroup = rearrange(
      Assertion::star(Assertion::star(l1, f1), Assertion::star(l2, f2)),
      Assertion::star(Assertion::star(l1, l2), Assertion::star(f1, f2)));

  Assertion both_posts = Assertion::star(l1p, l2p);
  Derivation pair_up = rearrange(
      Assertion::star(Assertion::star(f1, f2), both_posts),
      Assertion::star(Assertion::star(f1, l1p), Assertion::star(f2, l2p)));
  Derivation cancel_both =
      Derivation::star_mono(wand_cancel(f1), wand_cancel(f2));
  Derivation fused = Derivation::wand_adjoint_2(
      Derivation::entail_trans(pair_up, cancel_both));

  Derivation lift = Derivation::star_mono(
      Derivation::entail_refl(Assertion::star(l1, l2)), fused);
  return Derivation::entail_trans(side_by_side,
                                  Derivation::entail_trans(regroup, lift));
}

}  // namespace sepwand
