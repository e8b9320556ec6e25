#include "sepwand/derived.hpp"

#include <algorithm>
#include <map>

#include "sepwand/error.hpp"

namespace sepwand {
namespace {

using D = Derivation;

void collect_leaves(const Assertion& a, std::vector<Assertion>& out) {
  if (a.kind() == Ak::Star) {
    collect_leaves(a.kids()[0], out);
    collect_leaves(a.kids()[1], out);
    return;
  }
  out.push_back(a);
}

// Right-nested star over v[i..], v must be nonempty from i.
Assertion spine_of(const std::vector<Assertion>& v, size_t i = 0) {
  if (i + 1 == v.size()) return v[i];
  return Assertion::star(v[i], spine_of(v, i + 1));
}

// sl * sr |- the one spine of their concatenated leaves, where sl and
// sr are already spines.
Derivation append_spines(const Assertion& sl, const Assertion& sr) {
  if (sl.kind() != Ak::Star) return D::entail_refl(Assertion::star(sl, sr));
  Derivation d1 = D::star_assoc_lr(sl.kids()[0], sl.kids()[1], sr);
  Derivation d2 = D::star_mono(D::entail_refl(sl.kids()[0]),
                               append_spines(sl.kids()[1], sr));
  return D::entail_trans(d1, d2);
}

// a |- spine(star_leaves(a)).
Derivation to_spine(const Assertion& a) {
  if (a.kind() != Ak::Star) return D::entail_refl(a);
  Derivation dl = to_spine(a.kids()[0]);
  Derivation dr = to_spine(a.kids()[1]);
  Derivation flat = D::star_mono(dl, dr);
  return D::entail_trans(
      flat, append_spines(flat.conclusion().succ().kids()[0],
                          flat.conclusion().succ().kids()[1]));
}

std::vector<Assertion> without(const std::vector<Assertion>& v, size_t i) {
  std::vector<Assertion> out;
  for (size_t j = 0; j < v.size(); ++j)
    if (j != i) out.push_back(v[j]);
  return out;
}

// spine(v) |- spine(v[i] :: v-without-i).
Derivation bring_to_front(const std::vector<Assertion>& v, size_t i) {
  if (i == 0) return D::entail_refl(spine_of(v));
  if (i == 1) {
    if (v.size() == 2) return D::star_comm(v[0], v[1]);
    Assertion rest = spine_of(v, 2);
    Derivation d = D::star_assoc_rl(v[0], v[1], rest);
    d = D::entail_trans(
        d, D::star_mono(D::star_comm(v[0], v[1]), D::entail_refl(rest)));
    return D::entail_trans(d, D::star_assoc_lr(v[1], v[0], rest));
  }
  // Rotate within the tail, then swap the head pair.
  std::vector<Assertion> tail(v.begin() + 1, v.end());
  Derivation up = D::star_mono(D::entail_refl(v[0]), bring_to_front(tail, i - 1));
  std::vector<Assertion> mid;
  mid.push_back(v[0]);
  mid.push_back(v[i]);
  for (const Assertion& a : without(tail, i - 1)) mid.push_back(a);
  return D::entail_trans(up, bring_to_front(mid, 1));
}

// spine(from) |- spine(to), to a permutation of from.
Derivation perm_spine(const std::vector<Assertion>& from,
                      const std::vector<Assertion>& to) {
  if (from.size() == 1) return D::entail_refl(from[0]);
  size_t i = 0;
  while (i < from.size() && from[i] != to[0]) ++i;
  Derivation d = bring_to_front(from, i);
  std::vector<Assertion> rest_from = without(from, i);
  std::vector<Assertion> rest_to(to.begin() + 1, to.end());
  return D::entail_trans(
      d, D::star_mono(D::entail_refl(to[0]), perm_spine(rest_from, rest_to)));
}

}  // namespace

std::vector<Assertion> star_leaves(const Assertion& a) {
  std::vector<Assertion> out;
  collect_leaves(a, out);
  return out;
}

Derivation invert(const Derivation& d) {
  const std::string& r = d.rule();
  const Entailment& c = d.conclusion();
  if (r == "entail_refl") return d;
  if (r == "entail_trans")
    return D::entail_trans(invert(d.premises()[1]), invert(d.premises()[0]));
  if (r == "star_mono")
    return D::star_mono(invert(d.premises()[0]), invert(d.premises()[1]));
  if (r == "star_comm")
    return D::star_comm(c.ante().kids()[1], c.ante().kids()[0]);
  if (r == "star_assoc_lr") {
    const Assertion& lhs = c.ante();
    return D::star_assoc_rl(lhs.kids()[0].kids()[0], lhs.kids()[0].kids()[1],
                            lhs.kids()[1]);
  }
  if (r == "star_assoc_rl") {
    const Assertion& lhs = c.ante();
    return D::star_assoc_lr(lhs.kids()[0], lhs.kids()[1].kids()[0],
                            lhs.kids()[1].kids()[1]);
  }
  if (r == "emp_unit_intro") return D::emp_unit_elim(c.ante());
  if (r == "emp_unit_elim") return D::emp_unit_intro(c.succ());
  if (r == "pure_hoist") {
    const Assertion& lhs = c.ante();
    return D::pure_lower(lhs.kids()[0].prop(), lhs.kids()[0].kids()[0],
                         lhs.kids()[1]);
  }
  if (r == "pure_lower") {
    const Assertion& lhs = c.ante();
    return D::pure_hoist(lhs.prop(), lhs.kids()[0].kids()[0],
                         lhs.kids()[0].kids()[1]);
  }
  if (r == "pure_mono")
    return D::pure_mono(invert(d.premises()[0]), c.ante().prop());
  if (r == "pred_unfold") return D::pred_fold(c.ante());
  if (r == "pred_fold") return D::pred_unfold(c.succ());
  throw SideConditionError("derivation rule " + r + " has no inverse here");
}

Derivation rearrange(const Assertion& from, const Assertion& to) {
  if (from == to) return D::entail_refl(from);
  std::vector<Assertion> lf = star_leaves(from);
  std::vector<Assertion> lt = star_leaves(to);
  auto key = [](const std::vector<Assertion>& v) {
    std::vector<std::string> k;
    for (const Assertion& a : v) k.push_back(a.str());
    std::sort(k.begin(), k.end());
    return k;
  };
  if (key(lf) != key(lt))
    throw SideConditionError("rearrange: " + from.str() + " and " + to.str() +
                             " are not star permutations of each other");
  Derivation d = D::entail_trans(to_spine(from), perm_spine(lf, lt));
  return D::entail_trans(d, invert(to_spine(to)));
}

Derivation wand_cancel(const Assertion& w) {
  if (w.kind() != Ak::Wand)
    throw SideConditionError("wand_cancel needs a wand, got " + w.str());
  return D::wand_adjoint_1(D::entail_refl(w));
}

Derivation wand_mono(const Derivation& dl, const Derivation& dr) {
  // dl: A' |- A, dr: B |- B'. Build (A -* B) * A' |- B', then adjoin.
  Assertion w = Assertion::wand(dl.conclusion().succ(), dr.conclusion().ante());
  Derivation d = D::star_mono(D::entail_refl(w), dl);
  d = D::entail_trans(d, wand_cancel(w));
  d = D::entail_trans(d, dr);
  return D::wand_adjoint_2(d);
}

Derivation forall_mono(const std::string& var, Sort sort, const Derivation& d) {
  Assertion qa = Assertion::forall(var, sort, d.conclusion().ante());
  Derivation e = D::forall_elim(qa, Term::var(var, sort));
  return D::forall_intro(D::entail_trans(e, d), var, sort);
}

Derivation exists_mono(const std::string& var, Sort sort, const Derivation& d) {
  Assertion qb = Assertion::exists(var, sort, d.conclusion().succ());
  Derivation e = D::exists_intro(qb, Term::var(var, sort));
  return D::exists_elim(D::entail_trans(d, e), var, sort);
}

Derivation star_emp_intro_r(const Assertion& a) {
  return D::entail_trans(D::emp_unit_intro(a),
                         D::star_comm(Assertion::emp(), a));
}

Derivation star_emp_elim_r(const Assertion& a) {
  return D::entail_trans(D::star_comm(a, Assertion::emp()),
                         D::emp_unit_elim(a));
}

Derivation strip_pure(const Assertion& a) {
  if (a.kind() != Ak::AndPure) return D::entail_refl(a);
  return D::entail_trans(D::pure_elim(a.prop(), a.kids()[0]),
                         strip_pure(a.kids()[0]));
}

}  // namespace sepwand
