#ifndef SEPWAND_WANDFRAME_HPP
#define SEPWAND_WANDFRAME_HPP

#include <string>
#include <vector>

#include "sepwand/derived.hpp"
#include "sepwand/kernel.hpp"

namespace sepwand {

// An assertion indexed by one variable: x together with P(x). The
// body is an ordinary assertion in which `var` may occur free; sort
// is the index sort. at(w) is P(w).
struct IndexedAssertion {
  std::string var;
  Sort sort;
  Assertion body;

  Assertion at(const Term& w) const { return subst(body, var, w); }
  Term index() const { return Term::var(var, sort); }
};

// A term indexed the same way: y together with f(y), for refinement.
struct IndexedTerm {
  std::string var;
  Sort sort;
  Term body;
};

// The quantified-wand frame rules, as derivation builders. Shared
// preconditions: rules taking two or three indexed assertions need
// them to agree on the index variable and sort (SideConditionError
// otherwise); freshness conditions are the kernel's to enforce and
// surface as KernelReject.
//
//   wandq_intro(P, Q):  Q |- forall x. (P(x) -* P(x) * Q)   [x not free in Q]
//   wandq_elim(P, Q, w): P(w) * forall x. (P(x) -* Q(x)) |- Q(w)
//   wandq_hor(P1,Q1,P2,Q2):
//       forall x. (P1 -* Q1) * forall x. (P2 -* Q2)
//         |- forall x. (P1 * P2 -* Q1 * Q2)
//   wandq_ver(P, Q, R):
//       forall x. (P -* Q) * forall x. (Q -* R) |- forall x. (P -* R)
//   wandq_refine(P, Q, f):
//       forall x. (P(x) -* Q(x)) |- forall y. (P(f(y)) -* Q(f(y)))
Derivation wandq_intro(const IndexedAssertion& p, const Assertion& q);
Derivation wandq_elim(const IndexedAssertion& p, const IndexedAssertion& q,
                      const Term& witness);
Derivation wandq_hor(const IndexedAssertion& p1, const IndexedAssertion& q1,
                     const IndexedAssertion& p2, const IndexedAssertion& q2);
Derivation wandq_ver(const IndexedAssertion& p, const IndexedAssertion& q,
                     const IndexedAssertion& r);
Derivation wandq_refine(const IndexedAssertion& p, const IndexedAssertion& q,
                        const IndexedTerm& f);

// A pre/post pair with the set of program variables the command in
// between modifies. The command itself is opaque here; the executor
// owns it and only the footprint matters for framing.
struct HoareTriple {
  Assertion pre;
  Assertion post;
  std::vector<std::string> modified;
};

// Ramification: a local step plus a checked frame entailment justify
// a global step. `frame` concludes global.pre |- local.pre * F with
// F either L' -* G' (plain) or forall x. (L'(x) -* G'(x))
// (quantified, in which case the posts are the matching exists).
struct Ramification {
  HoareTriple local;
  HoareTriple global;
  Derivation frame;
};

// Plain and quantified ramification. The frame entailment is
// re-checked; its shape must match the local triple's post
// (ShapeError otherwise); the frame assertion must not mention any
// modified program variable (SideConditionError).
Ramification ramif(const HoareTriple& local, const Derivation& frame_entail);
Ramification ramifq(const HoareTriple& local, const Derivation& frame_entail);

// Composes two plain-frame decompositions side by side:
// from G1 |- L1 * (L1' -* G1') and G2 |- L2 * (L2' -* G2') derive
//   G1 * G2 |- (L1 * L2) * ((L1' * L2') -* (G1' * G2')).
Derivation hobor_villard(const Derivation& d1, const Derivation& d2);

}  // namespace sepwand

#endif
