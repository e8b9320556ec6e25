#ifndef SEPWAND_TERM_HPP
#define SEPWAND_TERM_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "sepwand/model.hpp"
#include "sepwand/sort.hpp"
#include "sepwand/value.hpp"

namespace sepwand {

enum class Tk : uint8_t {
  Var,
  Lit,
  FieldAddr,
  TreeE,
  TreeT,
  Ins,
  CtxLit,
  CtxApply,
  CtxCompose,
  ListNil,
  ListCons,
  ListApp,
  AggTuple,
  AggGet,
  AggSet,
  MapUpd,
  Meta,
};

struct CtxFrameT;

// Immutable term nodes. Sorts are computed and checked at
// construction, so a Term that exists is well-sorted. Copies share
// structure; equality is structural with a cached hash fast path.
class Term {
 public:
  static Term var(const std::string& name, Sort sort);
  static Term meta(const std::string& name, Sort sort);
  static Term lit(Value v);
  static Term null_lit() { return lit(Value::null()); }
  static Term int_lit(int64_t v) { return lit(Value::of_int(v)); }
  static Term addr_lit(uint32_t a) { return lit(Value::addr(a)); }
  static Term field(const Term& base, uint32_t offset);
  static Term tree_e();
  static Term tree_t(const Term& l, const Term& k, const Term& v, const Term& r);
  static Term ins(const Term& t, const Term& k, const Term& v);
  static Term ctx(const std::vector<CtxFrameT>& frames);
  static Term apply(const Term& c, const Term& t);
  static Term compose(const Term& a, const Term& b);
  static Term list_nil();
  static Term list_cons(const Term& h, const Term& t);
  static Term list_app(const Term& a, const Term& b);
  static Term tuple(const std::vector<Term>& fields);
  static Term get(const Term& u, PathV path);
  static Term set(const Term& u, PathV path, const Term& w);
  static Term map_upd(const Term& m, const Term& k, const Term& v);

  Tk kind() const { return rep_->kind; }
  const Sort& sort() const { return rep_->sort; }
  const std::string& name() const { return rep_->name; }
  const Value& lit_value() const { return rep_->lit; }
  uint32_t offset() const { return rep_->offset; }
  const std::vector<Term>& kids() const { return rep_->kids; }
  const PathV& path() const { return rep_->path; }
  uint64_t hash() const { return rep_->hash; }
  bool has_meta() const { return rep_->has_meta; }
  // Free variables, sorted and de-duplicated. Metavariables do not
  // count as free variables; has_meta tracks those.
  const std::vector<std::string>& fv() const { return rep_->fv; }

  // CtxLit access: frame i, outermost first. Kids are stored flat as
  // key/value/subtree triples; holes_ records the hole side per frame.
  size_t ctx_size() const { return rep_->holes.size(); }
  bool ctx_hole_left(size_t i) const { return rep_->holes[i] != 0; }
  const Term& ctx_key(size_t i) const { return rep_->kids[3 * i]; }
  const Term& ctx_val(size_t i) const { return rep_->kids[3 * i + 1]; }
  const Term& ctx_sub(size_t i) const { return rep_->kids[3 * i + 2]; }

  bool operator==(const Term& o) const;
  bool operator!=(const Term& o) const { return !(*this == o); }

  std::string str() const;

 private:
  struct Rep {
    Tk kind = Tk::Var;
    Sort sort;
    uint64_t hash = 0;
    bool has_meta = false;
    std::string name;
    Value lit;
    uint32_t offset = 0;
    std::vector<Term> kids;
    std::vector<uint8_t> holes;
    PathV path;
    std::vector<std::string> fv;
  };
  explicit Term(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
  static Term make(Rep rep);
  std::shared_ptr<const Rep> rep_;
};

struct CtxFrameT {
  bool hole_left = true;
  Term key, val, sub;
};

inline CtxFrameT lhole(const Term& k, const Term& v, const Term& sub) {
  return CtxFrameT{true, k, v, sub};
}
inline CtxFrameT rhole(const Term& sub, const Term& k, const Term& v) {
  return CtxFrameT{false, k, v, sub};
}

// Total order on terms; structural, deterministic across runs.
int term_cmp(const Term& a, const Term& b);

// Simultaneous substitution of free variables. Terms bind nothing, so
// there is no capture at this level. Replacements must match the
// variable's sort.
Term subst(const Term& t, const std::map<std::string, Term>& sub);
Term subst(const Term& t, const std::string& var, const Term& replacement);

// Substitution for metavariables (used by unification).
Term subst_meta(const Term& t, const std::map<std::string, Term>& sub);

bool occurs_free(const std::string& var, const Term& t);

// A fresh name based on `base` that avoids everything in `avoid`.
std::string fresh_name(const std::string& base, const std::vector<std::string>& avoid);

}  // namespace sepwand

#endif
