#include "sepwand/value.hpp"

namespace sepwand {

std::string Value::str() const {
  switch (k) {
    case K::Null: return "null";
    case K::Int: return std::to_string(i);
    case K::Addr: return "(addr " + std::to_string(a) + ")";
  }
  return "?";
}

Heap Heap::join(const Heap& o) const {
  if (!disjoint(o)) throw EvalError("heap join: overlapping footprints");
  Heap h = *this;
  for (uint32_t a = 1; a <= kMaxAddr; ++a) {
    if (o.present(a)) h.set(a, o.cell[a]);
  }
  return h;
}

bool Heap::operator==(const Heap& o) const {
  if (mask != o.mask) return false;
  for (uint32_t a = 1; a <= kMaxAddr; ++a) {
    if (present(a) && !(cell[a] == o.cell[a])) return false;
  }
  return true;
}

bool Heap::operator<(const Heap& o) const {
  if (size() != o.size()) return size() < o.size();
  if (mask != o.mask) return mask < o.mask;
  for (uint32_t a = 1; a <= kMaxAddr; ++a) {
    if (!present(a)) continue;
    if (cell[a] != o.cell[a]) return cell[a] < o.cell[a];
  }
  return false;
}

std::string Heap::str() const {
  std::string out = "{";
  bool first = true;
  for (uint32_t a = 1; a <= kMaxAddr; ++a) {
    if (!present(a)) continue;
    if (!first) out += ", ";
    first = false;
    out += std::to_string(a) + " |-> " + cell[a].str();
  }
  return out + "}";
}

}  // namespace sepwand
