#ifndef SEPWAND_PROP_HPP
#define SEPWAND_PROP_HPP

#include <memory>
#include <string>
#include <vector>

#include "sepwand/term.hpp"

namespace sepwand {

enum class Pk : uint8_t {
  True_,
  False_,
  Eq,
  Neq,
  Lt,
  And,
  Or,
  Not,
  SearchTreeP,
  AbsP,
};

// Pure (heap-independent) propositions over terms.
class Prop {
 public:
  static Prop true_();
  static Prop false_();
  static Prop eq(const Term& a, const Term& b);    // same-sort terms
  static Prop neq(const Term& a, const Term& b);
  static Prop lt(const Term& a, const Term& b);    // Int only
  static Prop and_(const Prop& a, const Prop& b);
  static Prop or_(const Prop& a, const Prop& b);
  static Prop not_(const Prop& a);
  static Prop search_tree(const Term& t);
  static Prop abs(const Term& t, const Term& m);   // Tree, Map

  Pk kind() const { return rep_->kind; }
  const std::vector<Term>& terms() const { return rep_->terms; }
  const std::vector<Prop>& props() const { return rep_->props; }
  uint64_t hash() const { return rep_->hash; }
  bool has_meta() const { return rep_->has_meta; }
  const std::vector<std::string>& fv() const { return rep_->fv; }

  bool operator==(const Prop& o) const;
  bool operator!=(const Prop& o) const { return !(*this == o); }

  std::string str() const;

 private:
  struct Rep {
    Pk kind = Pk::True_;
    uint64_t hash = 0;
    bool has_meta = false;
    std::vector<Term> terms;
    std::vector<Prop> props;
    std::vector<std::string> fv;
  };
  explicit Prop(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
  static Prop make(Rep rep);
  std::shared_ptr<const Rep> rep_;
};

int prop_cmp(const Prop& a, const Prop& b);

Prop subst(const Prop& p, const std::map<std::string, Term>& sub);
Prop subst(const Prop& p, const std::string& var, const Term& replacement);
Prop subst_meta(const Prop& p, const std::map<std::string, Term>& sub);
bool occurs_free(const std::string& var, const Prop& p);

}  // namespace sepwand

#endif
