#ifndef SEPWAND_EVAL_HPP
#define SEPWAND_EVAL_HPP

#include <vector>

#include "sepwand/model.hpp"
#include "sepwand/prop.hpp"
#include "sepwand/term.hpp"

namespace sepwand {

// Evaluation of closed-under-env terms and pure propositions.
// Throws EvalError on unbound variables and metavariables.
CVal eval_term(const Term& t, const Env& env);
bool eval_prop(const Prop& p, const Env& env);

// Concrete value back to a closed term. Maps have no literal term
// former, so they (and bare paths) cannot be reified.
Term reify(const CVal& v);

// Rewrites redexes to a fixed point. Justified steps only:
//   - ground evaluation of closed operator applications
//   - context application/composition unrolling over literal spines
//   - list append unit laws and right-nesting
//   - aggregate get/set over tuple literals, set-set collapse,
//     nested-set fusion, tuple-eta
//   - functional insert once its guard is decided, either by ground
//     comparison or (for the fact-taking overloads) by pure_entails
//     from the supplied hypotheses
//   - propositional simplification: connective units, reflexivity,
//     constructor injectivity and clash
Term reduce(const Term& t);
Term reduce(const Term& t, const std::vector<Prop>& facts);
Prop reduce_prop(const Prop& p);
Prop reduce_prop(const Prop& p, const std::vector<Prop>& facts);

// Decides facts |- goal for pure propositions over finite structures.
// Sound, not complete: oriented equality substitution to a fixed
// point, then congruence closure, order-facts enrichment (a<b gives
// a!=b; together not(a<b), not(b<a) give a=b), inconsistency checks,
// then structural goal decision. Hypothesis reduction never consults
// the hypotheses for insert guards, which keeps the procedure
// well-founded.
bool pure_entails(const std::vector<Prop>& facts, const Prop& goal);

}  // namespace sepwand

#endif
