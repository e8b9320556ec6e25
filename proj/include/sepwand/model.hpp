#ifndef SEPWAND_MODEL_HPP
#define SEPWAND_MODEL_HPP

#include <map>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "sepwand/sort.hpp"
#include "sepwand/value.hpp"

namespace sepwand {

// Concrete first-order structures the logic talks about. These are
// the semantic side: terms evaluate to these, the oracle enumerates
// them, and the functional correctness properties quantify over them.

struct TreeNodeV;
using TreeV = std::shared_ptr<const TreeNodeV>;  // nullptr = empty tree

struct TreeNodeV {
  TreeV left;
  int64_t key = 0;
  Value val;
  TreeV right;
};

TreeV tree_node(TreeV l, int64_t k, Value v, TreeV r);
int tree_size(const TreeV& t);
int tree_depth(const TreeV& t);
bool tree_eq(const TreeV& a, const TreeV& b);
bool tree_lt(const TreeV& a, const TreeV& b);  // arbitrary total order
std::string tree_str(const TreeV& t);

// Functional insert: replaces the payload when the key is present,
// otherwise grows a fresh leaf at the search position.
TreeV tree_ins(const TreeV& t, int64_t k, Value v);

// Strict BST property: every key in the left subtree is smaller and
// every key in the right subtree larger than the root key.
bool search_tree(const TreeV& t);

// A total map over Int keys: `dflt` almost everywhere, with finitely
// many exceptions in `entries`. Entries equal to the default are
// normalized away on update, so structural equality is map equality.
struct FinMapV {
  Value dflt;
  std::map<int64_t, Value> entries;

  Value get(int64_t k) const {
    auto it = entries.find(k);
    return it == entries.end() ? dflt : it->second;
  }
  bool operator==(const FinMapV& o) const {
    return dflt == o.dflt && entries == o.entries;
  }
  bool operator<(const FinMapV& o) const {
    if (!(dflt == o.dflt)) return dflt < o.dflt;
    return entries < o.entries;
  }
};

FinMapV tree_abs(const TreeV& t, Value dflt);
FinMapV map_update(FinMapV m, int64_t k, Value v);

// A tree context: a spine of node frames with exactly one hole.
// Frames are listed outermost first. A frame with hole_left carries
// the node's key/value and its *right* subtree (the hole sits where
// the left child would be), and symmetrically for !hole_left.
struct CtxFrameV {
  bool hole_left = true;
  int64_t key = 0;
  Value val;
  TreeV sub;
};

using TreeCtxV = std::vector<CtxFrameV>;

TreeV ctx_apply(const TreeCtxV& c, TreeV t);
TreeCtxV ctx_compose(const TreeCtxV& outer, const TreeCtxV& inner);
bool ctx_eq(const TreeCtxV& a, const TreeCtxV& b);
bool ctx_lt(const TreeCtxV& a, const TreeCtxV& b);
std::string ctx_str(const TreeCtxV& c);

using ListValV = std::vector<Value>;

// Aggregates, flattened: the shape gives the structure, `leaves`
// stores the scalars in field order. Paths index into the structure.
struct AggV {
  int shape = 0;
  std::vector<Value> leaves;
};

using PathV = std::vector<uint32_t>;

// Resolves a path to the flat range it covers: (start, sub-shape id).
// Throws PathError when the path leaves the shape.
std::pair<int, int> agg_locate(int shape, const PathV& path);
AggV agg_get(const AggV& u, const PathV& path);
AggV agg_set(const AggV& u, const PathV& path, const AggV& w);
// Cell offset of a path when each scalar leaf occupies one cell.
int agg_flat_offset(int shape, const PathV& path);
bool agg_eq(const AggV& a, const AggV& b);
bool agg_lt(const AggV& a, const AggV& b);
std::string agg_str(const AggV& u);

// One concrete value of any sort. Value covers both Val and Int
// (disambiguated by Value::k); the rest carry their own structure.
struct CVal {
  std::variant<Value, TreeV, TreeCtxV, ListValV, AggV, FinMapV, PathV> v;

  CVal() : v(Value::null()) {}
  CVal(Value x) : v(x) {}
  CVal(TreeV x) : v(std::move(x)) {}
  CVal(TreeCtxV x) : v(std::move(x)) {}
  CVal(ListValV x) : v(std::move(x)) {}
  CVal(AggV x) : v(std::move(x)) {}
  CVal(FinMapV x) : v(std::move(x)) {}
  CVal(PathV x) : v(std::move(x)) {}

  bool is_value() const { return std::holds_alternative<Value>(v); }
  const Value& value() const { return std::get<Value>(v); }
  const TreeV& tree() const { return std::get<TreeV>(v); }
  const TreeCtxV& ctx() const { return std::get<TreeCtxV>(v); }
  const ListValV& list() const { return std::get<ListValV>(v); }
  const AggV& agg() const { return std::get<AggV>(v); }
  const FinMapV& map() const { return std::get<FinMapV>(v); }
  const PathV& path() const { return std::get<PathV>(v); }

  bool operator==(const CVal& o) const;
  bool operator<(const CVal& o) const;
  std::string str() const;
};

using Env = std::map<std::string, CVal>;

std::string env_str(const Env& e);

}  // namespace sepwand

#endif
