#ifndef SEPWAND_SORT_HPP
#define SEPWAND_SORT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "sepwand/error.hpp"

namespace sepwand {

enum class SortKind : uint8_t {
  Val,   // heap values: addresses and null
  Int,   // mathematical integers (keys)
  Tree,  // binary search tree skeletons
  List,  // value sequences
  Ctx,   // tree contexts (linear spines with one hole)
  Path,  // aggregate field paths
  Agg,   // fixed-shape aggregates; Sort::shape picks the shape
  Map,   // finite maps from keys to values
};

// Aggregate shapes form a little first-order type universe of their
// own: a shape is either an Int leaf, a Val leaf, or a tuple of
// previously registered shapes. Shapes are interned; the id is the
// index into the registry and is stable for the process lifetime.
struct AggShape {
  bool leaf = true;
  SortKind leaf_kind = SortKind::Int;  // leaf only; Int or Val
  std::vector<int> fields;             // tuple only; child shape ids
  int leaf_count = 1;                  // total number of scalar leaves
};

int agg_shape_int();
int agg_shape_val();
int agg_shape_tuple(const std::vector<int>& fields);
const AggShape& agg_shape(int id);
std::string agg_shape_str(int id);

// Symbolic names for tuple shapes, so surface syntax can say Agg:s1
// instead of spelling the whole structure. Rebinding a name to a
// different shape is an error; rebinding to the same shape is a no-op.
void register_agg_name(const std::string& name, int id);
int lookup_agg_name(const std::string& name);  // -1 when absent

struct Sort {
  SortKind kind = SortKind::Val;
  int shape = -1;  // Agg only

  constexpr Sort() = default;
  constexpr Sort(SortKind k) : kind(k) {}  // NOLINT: implicit by design
  static Sort agg(int shape_id) {
    Sort s{SortKind::Agg};
    s.shape = shape_id;
    return s;
  }

  bool operator==(const Sort& o) const {
    return kind == o.kind && (kind != SortKind::Agg || shape == o.shape);
  }
  bool operator!=(const Sort& o) const { return !(*this == o); }

  std::string str() const;
};

// Parses what Sort::str produces: Val, Int, Tree, List, Ctx, Path,
// Map, or Agg:<shape> where <shape> is like (int val (int int)).
Sort parse_sort(const std::string& text);

}  // namespace sepwand

#endif
