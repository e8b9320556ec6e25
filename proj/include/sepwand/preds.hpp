#ifndef SEPWAND_PREDS_HPP
#define SEPWAND_PREDS_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sepwand/assertion.hpp"

namespace sepwand {

// Registry of named spatial predicates. Built-in definitions (trees,
// boxed trees, lists, list segments, tree contexts, aggregates) are
// seeded on first use; further predicates can be registered by name.
struct PredDef {
  std::string name;
  std::vector<Sort> arg_sorts;
  // Validates argument sorts when the fixed signature is too rigid
  // (data_at's second argument can be Int, Val, or any aggregate).
  std::function<void(const std::vector<Term>&)> check;
  // Index of the argument whose head constructor drives unfolding;
  // -1 when the definition is a single uniform equation.
  int structure_arg = -1;
  // True when the definition's right hand side is a quantified wand,
  // so tactics can treat occurrences as absorption opportunities.
  bool wand_shaped = false;
  std::function<Assertion(const std::vector<Term>&)> unfold;
};

void pred_register(PredDef def);
const PredDef* pred_lookup(const std::string& name);
const PredDef& pred_get(const std::string& name);
std::vector<std::string> pred_names();

// One unfolding step of a predicate occurrence. Throws CannotUnfold
// when the occurrence's structure argument is not constructor-headed
// (or, for data_at, not a tuple literal or scalar-sorted term).
Assertion unfold_pred(const Assertion& occurrence);

}  // namespace sepwand

#endif
