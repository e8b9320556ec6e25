#ifndef SEPWAND_SHAPES_HPP
#define SEPWAND_SHAPES_HPP

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "sepwand/derived.hpp"
#include "sepwand/model.hpp"
#include "sepwand/oracle.hpp"
#include "sepwand/wandframe.hpp"

namespace sepwand {

// The lemma library over the registered shape predicates: builders
// for partial-structure entailments (tree contexts and list
// segments), aggregate cell focusing, claim forms the oracle judges,
// reference heap layouts, and the random generators the property
// suites share. Every Derivation returned here is kernel-checked by
// construction.

// ---------------------------------------------------------------- //
// Partial-structure lemmas.

// General worker behind the specific builders below.
//
//   ante |- partial_occ
//
// partial_occ must unfold to forall x. (rep(x, hole) -* rep(S(x),
// root)); rep(S(x), root)'s own unfolding, with `witnesses` filling
// its existentials outside-in, has to be an AC-rearrangement of
// rep(x, hole) * ante. The degenerate S(x) = x case (empty spine)
// demands ante = emp and no witnesses.
Derivation frame_to_partial(const Assertion& partial_occ, const Assertion& ante,
                            const std::vector<Term>& witnesses);

// A node record with one subtree framed off entails a one-frame
// boxed-tree context from the box above the node to the unframed
// child field.
//
//   partial_single_left(p, q, k, v, t2):
//     p |-> q * q.key |-> k * q.value |-> v * treebox_rep(t2, q.right)
//       |- partialT_treebox([hole left of (k, v, t2)], p, q.left)
//
// partial_single_right mirrors it, framing the left subtree t1 and
// leaving the hole on the right.
Derivation partial_single_left(const Term& p, const Term& q, const Term& k,
                               const Term& v, const Term& t2);
Derivation partial_single_right(const Term& p, const Term& q, const Term& k,
                                const Term& v, const Term& t1);

// The same two shapes for node-rooted trees: the four cells of the
// node at p, with child pointers qa and qb, and the opposite subtree
// represented, entail a one-frame partialT_tree from p to the hole
// child's pointer value.
Derivation tree_single_left(const Term& p, const Term& k, const Term& v,
                            const Term& qa, const Term& qb, const Term& t2);
Derivation tree_single_right(const Term& p, const Term& k, const Term& v,
                             const Term& qa, const Term& qb, const Term& t1);

// emp |- partial(identity, p, p), for any registered quantified-wand
// partial predicate whose structure argument is a context (empty
// spine) or a list (nil).
Derivation partial_identity(const std::string& partial_pred, const Term& p);

// Cash the quantified wand at a concrete structure:
//
//   rep(t, i) * partial(c, r, i) |- rep(c applied to t, r)
Derivation partial_fill(const Assertion& partial_occ, const Term& t);

// Chain two partial structures through their shared seam:
//
//   partial(c1, p1, p2) * partial(c2, p2, p3)
//     |- partial(c1 composed with c2, p1, p3)
//
// Works for any quantified-wand partial predicate; the composed
// structure argument is ctx composition or list append depending on
// the structure sort. ShapeError when the seam addresses disagree.
Derivation partial_compose(const Assertion& occ1, const Assertion& occ2);

// ---------------------------------------------------------------- //
// List segment lemmas. lseg here is the quantified-wand definition.
//
//   lseg_nil(p):              emp |- lseg(nil, p, p)
//   lseg_single(h, p, q):     p.head |-> h * p.tail |-> q
//                               |- lseg([h], p, q)
//   lseg_fill(l1, l2, p, q):  lseg(l1, p, q) * listrep(l2, q)
//                               |- listrep(l1 ++ l2, p)
//   lseg_concat(l1, l2, p, q, r):
//                             lseg(l1, p, q) * lseg(l2, q, r)
//                               |- lseg(l1 ++ l2, p, r)
Derivation lseg_nil(const Term& p);
Derivation lseg_single(const Term& h, const Term& p, const Term& q);
Derivation lseg_fill(const Term& l1, const Term& l2, const Term& p,
                     const Term& q);
Derivation lseg_concat(const Term& l1, const Term& l2, const Term& p,
                       const Term& q, const Term& r);

// ---------------------------------------------------------------- //
// Aggregate focusing.

// Single out one component of a flat aggregate, keeping a way to put
// a new value back:
//
//   data_at(p, u) |- C(p.path, get(u, path))
//                    * forall w. (C(p.path, w)
//                                  -* data_at(p, set(u, path, w)))
//
// C is a bare points-to when the component at `path` is a scalar
// leaf and data_at when it is a sub-aggregate; p.path is the nested
// field address along the flat offsets. The empty path is the
// identity focus. Invalid paths throw PathError; a subject whose
// whole shape is a scalar leaf is rejected with ShapeError.
Derivation focus_path(const Term& p, const Term& u, const PathV& path);

// ---------------------------------------------------------------- //
// Claim forms for the oracle. No derivations exist for these; they
// state entailments whose truth or refutation the bounded semantics
// decides.

// Unconditional segment concatenation for the classical inductive
// definition. Refutable: a cycle through q makes the combined
// segment's endpoint guard fail.
Entailment smallfoot_concat_claim(const Term& l1, const Term& l2, const Term& p,
                                  const Term& q, const Term& r);

// The repaired variant: a full list hanging off r pins r apart from
// the segment cells, restoring validity.
//
//   sf(l1, p, q) * sf(l2, q, r) * sf(l3, r, null)
//     |- sf(l1 ++ l2, p, r) * sf(l3, r, null)
Entailment smallfoot_weaker_claim(const Term& l1, const Term& l2, const Term& l3,
                                  const Term& p, const Term& q, const Term& r);

// The same unconditional concatenation over the quantified-wand
// segment, where it does hold.
Entailment lseg_concat_claim(const Term& l1, const Term& l2, const Term& p,
                             const Term& q, const Term& r);

// One direction of the recursive boxed-context characterization:
// the node-chain unrolling entails the quantified-wand form.
Entailment partial_unrolled_claim(const Term& c, const Term& r, const Term& i);

// The boxed tree predicate next to its box-plus-node reading, for
// equisatisfiability checks: treebox_rep(t, b) on the left, exists
// p. b |-> p * tree_rep(t, p) on the right.
std::pair<Assertion, Assertion> treebox_forms(const Term& t, const Term& b);

// ---------------------------------------------------------------- //
// Reference heap layouts. Deterministic flat layouts matching the
// predicate unfoldings, for oracle cross-checks and concrete runs.
// Nodes are placed preorder from `base` upward, four cells per tree
// node (key, value, left, right) and two per list node (head, tail).

struct LayoutResult {
  Heap heap;
  Value root;        // the pointer value the predicate takes
  uint32_t next = 0; // first address past the layout
};

LayoutResult layout_tree(const TreeV& t, uint32_t base);
LayoutResult layout_treebox(const TreeV& t, uint32_t box);
LayoutResult layout_list(const ListValV& l, uint32_t base);

// ---------------------------------------------------------------- //
// Random structure generators, shared by the property suites here
// and in the acceptance runner.

// Leaf payloads drawn from a small mixed palette of null, integers,
// and low addresses.
Value random_leaf_value(std::mt19937& rng);

// A search tree grown by inserting up to max_nodes random keys from
// [0, key_range). Search-tree shaped by construction.
TreeV random_search_tree(std::mt19937& rng, int max_nodes, int64_t key_range);

// An arbitrarily shaped tree of the given maximum depth; no key
// ordering discipline.
TreeV random_tree(std::mt19937& rng, int max_depth, int64_t key_range);

// A context spine of up to max_frames frames with random subtrees.
TreeCtxV random_ctx(std::mt19937& rng, int max_frames, int64_t key_range);

}  // namespace sepwand

#endif
