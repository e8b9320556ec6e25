#include "sepwand/model.hpp"

#include <algorithm>

namespace sepwand {

TreeV tree_node(TreeV l, int64_t k, Value v, TreeV r) {
  auto n = std::make_shared<TreeNodeV>();
  n->left = std::move(l);
  n->key = k;
  n->val = v;
  n->right = std::move(r);
  return n;
}

int tree_size(const TreeV& t) {
  return t ? 1 + tree_size(t->left) + tree_size(t->right) : 0;
}

int tree_depth(const TreeV& t) {
  return t ? 1 + std::max(tree_depth(t->left), tree_depth(t->right)) : 0;
}

bool tree_eq(const TreeV& a, const TreeV& b) {
  if (!a || !b) return !a && !b;
  return a->key == b->key && a->val == b->val && tree_eq(a->left, b->left) &&
         tree_eq(a->right, b->right);
}

bool tree_lt(const TreeV& a, const TreeV& b) {
  if (!a || !b) return !a && b;
  if (a->key != b->key) return a->key < b->key;
  if (a->val != b->val) return a->val < b->val;
  if (!tree_eq(a->left, b->left)) return tree_lt(a->left, b->left);
  return tree_lt(a->right, b->right);
}

std::string tree_str(const TreeV& t) {
  if (!t) return "E";
  return "(T " + tree_str(t->left) + " " + std::to_string(t->key) + " " +
         t->val.str() + " " + tree_str(t->right) + ")";
}

TreeV tree_ins(const TreeV& t, int64_t k, Value v) {
  if (!t) return tree_node(nullptr, k, v, nullptr);
  if (k < t->key) return tree_node(tree_ins(t->left, k, v), t->key, t->val, t->right);
  if (t->key < k) return tree_node(t->left, t->key, t->val, tree_ins(t->right, k, v));
  return tree_node(t->left, k, v, t->right);
}

namespace {

bool search_tree_in(const TreeV& t, const int64_t* lo, const int64_t* hi) {
  if (!t) return true;
  if (lo && !(*lo < t->key)) return false;
  if (hi && !(t->key < *hi)) return false;
  return search_tree_in(t->left, lo, &t->key) && search_tree_in(t->right, &t->key, hi);
}

}  // namespace

bool search_tree(const TreeV& t) { return search_tree_in(t, nullptr, nullptr); }

namespace {

void abs_into(const TreeV& t, FinMapV& m) {
  if (!t) return;
  abs_into(t->left, m);
  m = map_update(std::move(m), t->key, t->val);
  abs_into(t->right, m);
}

}  // namespace

FinMapV tree_abs(const TreeV& t, Value dflt) {
  FinMapV m{dflt, {}};
  abs_into(t, m);
  return m;
}

FinMapV map_update(FinMapV m, int64_t k, Value v) {
  if (v == m.dflt)
    m.entries.erase(k);
  else
    m.entries[k] = v;
  return m;
}

TreeV ctx_apply(const TreeCtxV& c, TreeV t) {
  for (auto it = c.rbegin(); it != c.rend(); ++it) {
    t = it->hole_left ? tree_node(t, it->key, it->val, it->sub)
                      : tree_node(it->sub, it->key, it->val, t);
  }
  return t;
}

TreeCtxV ctx_compose(const TreeCtxV& outer, const TreeCtxV& inner) {
  TreeCtxV c = outer;
  c.insert(c.end(), inner.begin(), inner.end());
  return c;
}

bool ctx_eq(const TreeCtxV& a, const TreeCtxV& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].hole_left != b[i].hole_left || a[i].key != b[i].key ||
        a[i].val != b[i].val || !tree_eq(a[i].sub, b[i].sub))
      return false;
  }
  return true;
}

bool ctx_lt(const TreeCtxV& a, const TreeCtxV& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].hole_left != b[i].hole_left) return a[i].hole_left;
    if (a[i].key != b[i].key) return a[i].key < b[i].key;
    if (a[i].val != b[i].val) return a[i].val < b[i].val;
    if (!tree_eq(a[i].sub, b[i].sub)) return tree_lt(a[i].sub, b[i].sub);
  }
  return false;
}

std::string ctx_str(const TreeCtxV& c) {
  std::string out = "(ctx";
  for (const auto& f : c) {
    out += f.hole_left
               ? " (lhole " + std::to_string(f.key) + " " + f.val.str() + " " + tree_str(f.sub) + ")"
               : " (rhole " + tree_str(f.sub) + " " + std::to_string(f.key) + " " + f.val.str() + ")";
  }
  return out + ")";
}

std::pair<int, int> agg_locate(int shape, const PathV& path) {
  int start = 0;
  int cur = shape;
  for (uint32_t step : path) {
    const AggShape& s = agg_shape(cur);
    if (s.leaf) throw PathError("path descends into a leaf");
    if (step >= s.fields.size()) throw PathError("field index out of range");
    for (uint32_t i = 0; i < step; ++i) start += agg_shape(s.fields[i]).leaf_count;
    cur = s.fields[step];
  }
  return {start, cur};
}

int agg_flat_offset(int shape, const PathV& path) {
  return agg_locate(shape, path).first;
}

AggV agg_get(const AggV& u, const PathV& path) {
  auto [start, sub] = agg_locate(u.shape, path);
  AggV out;
  out.shape = sub;
  int n = agg_shape(sub).leaf_count;
  out.leaves.assign(u.leaves.begin() + start, u.leaves.begin() + start + n);
  return out;
}

AggV agg_set(const AggV& u, const PathV& path, const AggV& w) {
  auto [start, sub] = agg_locate(u.shape, path);
  if (w.shape != sub) throw PathError("stored value has the wrong shape");
  AggV out = u;
  std::copy(w.leaves.begin(), w.leaves.end(), out.leaves.begin() + start);
  return out;
}

bool agg_eq(const AggV& a, const AggV& b) {
  return a.shape == b.shape && a.leaves == b.leaves;
}

bool agg_lt(const AggV& a, const AggV& b) {
  if (a.shape != b.shape) return a.shape < b.shape;
  return std::lexicographical_compare(a.leaves.begin(), a.leaves.end(),
                                      b.leaves.begin(), b.leaves.end());
}

std::string agg_str(const AggV& u) {
  const AggShape& s = agg_shape(u.shape);
  if (s.leaf) return u.leaves.at(0).str();
  std::string out = "(tuple";
  int off = 0;
  for (int f : s.fields) {
    AggV sub;
    sub.shape = f;
    int n = agg_shape(f).leaf_count;
    sub.leaves.assign(u.leaves.begin() + off, u.leaves.begin() + off + n);
    off += n;
    out += " " + agg_str(sub);
  }
  return out + ")";
}

bool CVal::operator==(const CVal& o) const {
  if (v.index() != o.v.index()) return false;
  switch (v.index()) {
    case 0: return value() == o.value();
    case 1: return tree_eq(tree(), o.tree());
    case 2: return ctx_eq(ctx(), o.ctx());
    case 3: return list() == o.list();
    case 4: return agg_eq(agg(), o.agg());
    case 5: return map() == o.map();
    case 6: return path() == o.path();
  }
  return false;
}

bool CVal::operator<(const CVal& o) const {
  if (v.index() != o.v.index()) return v.index() < o.v.index();
  switch (v.index()) {
    case 0: return value() < o.value();
    case 1: return tree_lt(tree(), o.tree());
    case 2: return ctx_lt(ctx(), o.ctx());
    case 3: return list() < o.list();
    case 4: return agg_lt(agg(), o.agg());
    case 5: return map() < o.map();
    case 6: return path() < o.path();
  }
  return false;
}

std::string CVal::str() const {
  switch (v.index()) {
    case 0: return value().str();
    case 1: return tree_str(tree());
    case 2: return ctx_str(ctx());
    case 3: {
      std::string out = "(list";
      for (const auto& x : list()) out += " " + x.str();
      return out + ")";
    }
    case 4: return agg_str(agg());
    case 5: {
      std::string out = "(map " + map().dflt.str();
      for (const auto& [k, val] : map().entries)
        out += " (" + std::to_string(k) + " " + val.str() + ")";
      return out + ")";
    }
    case 6: {
      std::string out = "(path";
      for (uint32_t s : path()) out += " " + std::to_string(s);
      return out + ")";
    }
  }
  return "?";
}

std::string env_str(const Env& e) {
  std::string out = "[";
  bool first = true;
  for (const auto& [name, val] : e) {
    if (!first) out += ", ";
    first = false;
    out += name + " := " + val.str();
  }
  return out + "]";
}

}  // namespace sepwand
