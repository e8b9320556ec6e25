#ifndef SEPWAND_KERNEL_HPP
#define SEPWAND_KERNEL_HPP

#include <memory>
#include <string>
#include <vector>

#include "sepwand/assertion.hpp"
#include "sepwand/parse.hpp"

namespace sepwand {

// A sequent ante |- succ. Both sides are metavariable-free and use
// each shared free variable at one sort; the constructor enforces
// this (SortError otherwise), so an Entailment that exists is a
// meaningful judgment.
class Entailment {
 public:
  Entailment(const Assertion& ante, const Assertion& succ);

  const Assertion& ante() const { return ante_; }
  const Assertion& succ() const { return succ_; }

  bool operator==(const Entailment& o) const {
    return ante_ == o.ante_ && succ_ == o.succ_;
  }
  bool operator!=(const Entailment& o) const { return !(*this == o); }

  std::string str() const;

 private:
  Assertion ante_;
  Assertion succ_;
};

// Proof trees. The only way to obtain a Derivation is through the
// rule constructors below; each validates its side conditions and
// computes the node's conclusion up front, throwing KernelReject
// without constructing anything when an application is ill-formed.
// Everything else in the system (lemma builders, tactics, the
// verifier) produces conclusions by composing these constructors, so
// trusting a result means trusting this file only.
//
// There is no implicit normalization here. Commutativity,
// associativity and unit steps are explicit rule applications; a
// caller wanting A*B where it has B*A must say star_comm. The
// rearrangement helpers that make this bearable live outside the
// kernel and expand to primitive applications.
//
// Nodes are immutable and structurally shared; copying a Derivation
// copies a pointer. No rule mutates shared state, so building and
// checking derivations from several threads at once is fine.
class Derivation {
 public:
  const std::string& rule() const { return rep_->rule; }
  const Entailment& conclusion() const { return rep_->concl; }
  const std::vector<Derivation>& premises() const { return rep_->prems; }

  // Structural rules.
  //   entail_refl(A):           A |- A
  //   entail_trans(A|-B, B|-C): A |- C  (middle assertions must match
  //                             exactly, not just up to rearrangement)
  static Derivation entail_refl(const Assertion& a);
  static Derivation entail_trans(const Derivation& ab, const Derivation& bc);

  // The commutative monoid of * with unit emp, as one-step axioms.
  //   star_comm(P, Q):         P * Q |- Q * P
  //   star_assoc_lr(A, B, C):  (A * B) * C |- A * (B * C)
  //   star_assoc_rl(A, B, C):  A * (B * C) |- (A * B) * C
  //   emp_unit_intro(A):       A |- emp * A
  //   emp_unit_elim(A):        emp * A |- A
  static Derivation star_comm(const Assertion& p, const Assertion& q);
  static Derivation star_assoc_lr(const Assertion& a, const Assertion& b,
                                  const Assertion& c);
  static Derivation star_assoc_rl(const Assertion& a, const Assertion& b,
                                  const Assertion& c);
  static Derivation emp_unit_intro(const Assertion& a);
  static Derivation emp_unit_elim(const Assertion& a);

  //   star_mono(A1|-B1, A2|-B2): A1 * A2 |- B1 * B2
  static Derivation star_mono(const Derivation& d1, const Derivation& d2);

  // The wand adjunction, both directions.
  //   wand_adjoint_1(P |- Q -* R): P * Q |- R
  //   wand_adjoint_2(P * Q |- R):  P |- Q -* R
  static Derivation wand_adjoint_1(const Derivation& d);
  static Derivation wand_adjoint_2(const Derivation& d);

  // Quantifiers, eigenvariable style. The intro/elim pair that takes
  // a premise binds `var` in the premise's open side; the variable
  // must not occur free on the side that stays fixed.
  //   forall_intro(A |- B, x, s):  A |- forall x:s. B   [x not free in A]
  //   forall_elim(forall x:s. B, w):  forall x:s. B |- B[w/x]
  //   exists_intro(exists x:s. B, w): B[w/x] |- exists x:s. B
  //   exists_elim(B |- C, x, s):   exists x:s. B |- C   [x not free in C]
  static Derivation forall_intro(const Derivation& d, const std::string& var,
                                 Sort sort);
  static Derivation forall_elim(const Assertion& quantified, const Term& witness);
  static Derivation exists_intro(const Assertion& quantified, const Term& witness);
  static Derivation exists_elim(const Derivation& d, const std::string& var,
                                Sort sort);

  // The pure layer. A fact can be asserted on the right when the
  // antecedent's own pure prefix entails it, dropped on the left,
  // carried along, or moved across a star (pure facts are
  // heap-independent, so hoisting is sound in both directions).
  //   pure_intro(A |- B, f): A |- (pure f B)   [prefix of A entails f]
  //   pure_elim(f, A):       (pure f A) |- A
  //   pure_mono(A |- B, f):  (pure f A) |- (pure f B)
  //   pure_hoist(f, A, B):   (pure f A) * B |- (pure f (A * B))
  //   pure_lower(f, A, B):   (pure f (A * B)) |- (pure f A) * B
  static Derivation pure_intro(const Derivation& d, const Prop& fact);
  static Derivation pure_elim(const Prop& fact, const Assertion& body);
  static Derivation pure_mono(const Derivation& d, const Prop& fact);
  static Derivation pure_hoist(const Prop& fact, const Assertion& a,
                               const Assertion& b);
  static Derivation pure_lower(const Prop& fact, const Assertion& a,
                               const Assertion& b);

  // One definitional unfolding step of a predicate occurrence, and
  // its inverse. The body is produced with binders renamed wherever
  // they would capture a free variable of the arguments, which can
  // happen when one unfold's output feeds another's input.
  //   pred_unfold(P(args)): P(args) |- body
  //   pred_fold(P(args)):   body |- P(args)
  static Derivation pred_unfold(const Assertion& occurrence);
  static Derivation pred_fold(const Assertion& occurrence);

  // Term rewriting under an equation from = to. The equation must be
  // justified: either it holds outright (both sides reduce to the
  // same normal form, or both are closed and evaluate to the same
  // value), or the premise antecedent's pure prefix entails it. A
  // prefix-justified equation may only rewrite the succedent; the
  // antecedent's own facts cannot soundly rewrite the antecedent,
  // since the justifying fact itself may be rewritten away.
  // Occurrences under a binder that captures a variable of either
  // side are left alone.
  //   prop_rewrite(A |- B, from, to, in_ante=false): A |- B[from:=to]
  //   prop_rewrite(A |- B, from, to, in_ante=true):  A[from:=to] |- B
  static Derivation prop_rewrite(const Derivation& d, const Term& from,
                                 const Term& to, bool in_ante = false);

  // Textual proof trace: one rule per line, two-space indent per tree
  // depth, premises under the rule that consumes them. The tokens
  // after the rule name are exactly the side data needed to rebuild
  // the node, so traces parse back via trace_parse.
  std::string trace() const;

  // Side data carried by a node: just what the rule constructor was
  // given, in its parameter order. Having one is no license to mint
  // conclusions; only the constructors above build Derivations.
  struct Pay {
    std::vector<Assertion> as;
    std::vector<Term> ts;
    std::vector<Prop> ps;
    std::string name;
    Sort sort;
    bool flag = false;
  };

 private:
  struct Rep {
    std::string rule;
    Pay pay;
    std::vector<Derivation> prems;
    Entailment concl;
  };
  explicit Derivation(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
  static Derivation make(const std::string& rule, Pay pay,
                         std::vector<Derivation> prems);
  std::shared_ptr<const Rep> rep_;

  friend Entailment check(const Derivation& d);
};

// Re-derives every conclusion in the tree from the stored rule names
// and side data, bottom-up, and compares against what the nodes
// claim. Returns the root conclusion. Throws KernelReject naming the
// rule and the premise path (root, root.0, root.0.1, ...) of the
// first node that fails. Deterministic, terminating, and free of
// shared state.
Entailment check(const Derivation& d);

// Parses what Derivation::trace produces. The scope supplies sorts
// for the conclusion's free variables; eigenvariables introduced
// along the trace are scoped by their own lines. Throws ParseError
// with the offending line number.
Derivation trace_parse(const std::string& text, const VarScope& scope);

}  // namespace sepwand

#endif
