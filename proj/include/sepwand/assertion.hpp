#ifndef SEPWAND_ASSERTION_HPP
#define SEPWAND_ASSERTION_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sepwand/prop.hpp"
#include "sepwand/term.hpp"

namespace sepwand {

enum class Ak : uint8_t {
  Emp,
  PointsTo,
  Star,
  Wand,
  Forall,
  Exists,
  AndPure,
  Pred,
};

// Separation logic assertions. Immutable, structurally shared, and
// well-sorted by construction, like Term. AndPure is its own
// constructor: (pure p A) asserts p about the environment and A about
// the heap. A bare pure fact is (pure p emp).
class Assertion {
 public:
  static Assertion emp();
  static Assertion pto(const Term& addr, const Term& value);
  static Assertion star(const Assertion& l, const Assertion& r);
  static Assertion wand(const Assertion& l, const Assertion& r);
  static Assertion forall(const std::string& var, Sort sort, const Assertion& body);
  static Assertion exists(const std::string& var, Sort sort, const Assertion& body);
  static Assertion and_pure(const Prop& p, const Assertion& body);
  static Assertion pure(const Prop& p) { return and_pure(p, emp()); }
  // Predicate occurrences are checked against the registry: the name
  // must be registered and the arguments must fit its signature.
  static Assertion pred(const std::string& name, const std::vector<Term>& args);

  Ak kind() const { return rep_->kind; }
  const std::vector<Term>& terms() const { return rep_->terms; }       // PointsTo, Pred
  const std::vector<Assertion>& kids() const { return rep_->kids; }
  const Prop& prop() const { return *rep_->prop; }                     // AndPure
  const std::string& binder() const { return rep_->binder; }           // Forall, Exists
  const Sort& binder_sort() const { return rep_->binder_sort; }
  const std::string& pred_name() const { return rep_->pred_name; }
  uint64_t hash() const { return rep_->hash; }
  bool has_meta() const { return rep_->has_meta; }
  const std::vector<std::string>& fv() const { return rep_->fv; }

  bool operator==(const Assertion& o) const;
  bool operator!=(const Assertion& o) const { return !(*this == o); }

  std::string str() const;

 private:
  struct Rep {
    Ak kind = Ak::Emp;
    uint64_t hash = 0;
    bool has_meta = false;
    std::vector<Term> terms;
    std::vector<Assertion> kids;
    std::optional<Prop> prop;
    std::string binder;
    Sort binder_sort;
    std::string pred_name;
    std::vector<std::string> fv;
  };
  explicit Assertion(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
  static Assertion make(Rep rep);
  std::shared_ptr<const Rep> rep_;
};

int assertion_cmp(const Assertion& a, const Assertion& b);

// Capture-avoiding substitution; binders are renamed when they would
// capture a free variable of a replacement.
Assertion subst(const Assertion& a, const std::map<std::string, Term>& sub);
Assertion subst(const Assertion& a, const std::string& var, const Term& replacement);
Assertion subst_meta(const Assertion& a, const std::map<std::string, Term>& sub);
bool occurs_free(const std::string& var, const Assertion& a);

// Star-normal form: pure facts hoisted to the front (in a canonical
// order), spatial conjuncts flattened, emp dropped, both lists sorted
// by structural hash with full structural comparison as tiebreak.
// Normalization does not look under wand, quantifiers, or predicates.
struct Canon {
  std::vector<Prop> props;
  std::vector<Assertion> spatial;

  Assertion assemble() const;
  bool operator==(const Canon& o) const;
};

Canon normalize_star(const Assertion& a);
Assertion normal_form(const Assertion& a);

// The outermost AndPure prefix of an assertion, used as the
// hypothesis set when justifying pure steps about it.
std::vector<Prop> pure_prefix(const Assertion& a);
Assertion strip_pure_prefix(const Assertion& a);

}  // namespace sepwand

#endif
