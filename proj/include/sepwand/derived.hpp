#ifndef SEPWAND_DERIVED_HPP
#define SEPWAND_DERIVED_HPP

#include <string>
#include <vector>

#include "sepwand/kernel.hpp"

namespace sepwand {

// Derived proof steps: no new trust, just packaged compositions of
// kernel rules. Everything here returns a Derivation whose shape is
// documented at the declaration; side conditions that fail throw
// SideConditionError before any kernel call is made (kernel-level
// violations still surface as KernelReject).

// The star leaves of an assertion, left to right, with the tree
// structure forgotten. A non-star assertion is its own single leaf;
// emp leaves are kept, not dropped.
std::vector<Assertion> star_leaves(const Assertion& a);

// Inverse of a derivation built from the self-inverse fragment:
// refl, trans, star_mono, star_comm, the assoc pair, the emp_unit
// pair, the pure hoist/lower pair, pure_mono, and pred_unfold/fold.
// Anything else throws SideConditionError.
Derivation invert(const Derivation& d);

// from |- to, where both are star trees over the same multiset of
// leaves. Pure AC shuffling: flatten, permute, rebuild. Throws
// SideConditionError when the leaf multisets differ.
Derivation rearrange(const Assertion& from, const Assertion& to);

// (A -* B) * A |- B, for w = A -* B.
Derivation wand_cancel(const Assertion& w);

// Congruence steps.
//   wand_mono(A' |- A, B |- B'):    (A -* B) |- (A' -* B')
//   forall_mono(x, s, A |- B):      forall x. A |- forall x. B
//   exists_mono(x, s, A |- B):      exists x. A |- exists x. B
Derivation wand_mono(const Derivation& dl, const Derivation& dr);
Derivation forall_mono(const std::string& var, Sort sort, const Derivation& d);
Derivation exists_mono(const std::string& var, Sort sort, const Derivation& d);

// Right-side emp bookkeeping, saving the comm dance at call sites.
//   star_emp_intro_r(A): A |- A * emp
//   star_emp_elim_r(A):  A * emp |- A
Derivation star_emp_intro_r(const Assertion& a);
Derivation star_emp_elim_r(const Assertion& a);

// (pure f1 (pure f2 ... A)) |- A: drops the whole pure prefix.
Derivation strip_pure(const Assertion& a);

}  // namespace sepwand

#endif
