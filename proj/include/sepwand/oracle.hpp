#ifndef SEPWAND_ORACLE_HPP
#define SEPWAND_ORACLE_HPP

#include <string>
#include <vector>

#include "sepwand/assertion.hpp"
#include "sepwand/eval.hpp"
#include "sepwand/model.hpp"
#include "sepwand/value.hpp"

namespace sepwand {

// Enumeration bounds for the finite-model semantics. Addresses are
// 1..addr_count; payload_values overrides the default payload
// universe (null plus every address) when nonempty.
struct OracleBounds {
  int addr_count = 8;
  std::vector<int64_t> int_values = {0, 1, 2, 3};
  int max_tree_depth = 2;
  int max_list_len = 3;
  int max_heap_cells = 8;
  std::vector<Value> payload_values;

  std::vector<Value> payloads() const;
  bool in_universe(uint32_t a) const { return a >= 1 && a <= (uint32_t)addr_count; }
  bool in_bounds(const Heap& h) const;
};

// Finite-model satisfaction. Star tries all splits of h; Wand
// quantifies over extension heaps with domain inside the universe
// minus dom(h), at most max_heap_cells cells, and universe payloads;
// quantifiers enumerate their sort's bounded universe; predicates
// unfold against the concrete structure argument.
bool satisfies(const Heap& h, const Env& env, const Assertion& a,
               const OracleBounds& b);

// Deterministic, duplicate-free universe of a sort. Val, Int, Tree,
// List, Ctx always; Agg only for registered shapes; Path and Map have
// no bounded universe -> EnumError.
std::vector<CVal> enumerate_sort(const Sort& s, const OracleBounds& b);

struct EntailVerdict {
  bool valid = true;
  Heap heap;  // counter-model pieces, meaningful when !valid
  Env env;
  std::string note;  // bounded-validity caveat when wands are involved
};

// Semantic entailment at bounds: valid iff every env (free variables
// enumerated by sort) and every in-bounds heap satisfying ante also
// satisfies succ. Counter-models have the fewest cells, ties broken
// by enumeration order, and re-verify through satisfies().
EntailVerdict oracle_entails(const Assertion& ante, const Assertion& succ,
                             const OracleBounds& b);

// All in-bounds heaps satisfying a closed-under-env assertion.
// Constructive for wand-free assertions; falls back to scanning every
// bounded heap otherwise, so keep bounds small in that case.
std::vector<Heap> models(const Assertion& a, const Env& env, const OracleBounds& b);

// Free variables of an assertion together with their sorts; rejects a
// name used at two different sorts.
std::vector<std::pair<std::string, Sort>> free_vars_sorted(const Assertion& a);

}  // namespace sepwand

#endif
