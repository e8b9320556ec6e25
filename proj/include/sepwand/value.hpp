#ifndef SEPWAND_VALUE_HPP
#define SEPWAND_VALUE_HPP

#include <array>
#include <cstdint>
#include <string>

#include "sepwand/error.hpp"

namespace sepwand {

// Largest address universe a Heap can represent. Oracle bounds choose
// an addr_count <= this; the hard cap buys us a 64-bit footprint mask.
inline constexpr uint32_t kMaxAddr = 32;

// A runtime value: null, an integer, or an address. Addresses are
// 1-based so that 0 never aliases a real cell.
struct Value {
  enum class K : uint8_t { Null, Int, Addr };
  K k = K::Null;
  int64_t i = 0;
  uint32_t a = 0;

  static Value null() { return {}; }
  static Value of_int(int64_t v) {
    Value x;
    x.k = K::Int;
    x.i = v;
    return x;
  }
  static Value addr(uint32_t v) {
    Value x;
    x.k = K::Addr;
    x.a = v;
    return x;
  }

  bool is_null() const { return k == K::Null; }
  bool is_int() const { return k == K::Int; }
  bool is_addr() const { return k == K::Addr; }

  bool operator==(const Value& o) const {
    if (k != o.k) return false;
    if (k == K::Int) return i == o.i;
    if (k == K::Addr) return a == o.a;
    return true;
  }
  bool operator!=(const Value& o) const { return !(*this == o); }
  bool operator<(const Value& o) const {
    if (k != o.k) return (int)k < (int)o.k;
    if (k == K::Int) return i < o.i;
    if (k == K::Addr) return a < o.a;
    return false;
  }

  std::string str() const;
};

// A finite heap: cells at addresses 1..kMaxAddr, presence tracked by a
// bitmask (bit a set means address a is allocated). Cheap to copy, so
// the oracle shuffles these around by value.
struct Heap {
  uint64_t mask = 0;
  std::array<Value, kMaxAddr + 1> cell{};

  bool present(uint32_t a) const { return a >= 1 && a <= kMaxAddr && (mask >> a) & 1u; }
  const Value& at(uint32_t a) const {
    if (!present(a)) throw EvalError("heap: address " + std::to_string(a) + " not allocated");
    return cell[a];
  }
  void set(uint32_t a, Value v) {
    if (a < 1 || a > kMaxAddr) throw EvalError("heap: address out of range");
    mask |= (uint64_t)1 << a;
    cell[a] = v;
  }
  void erase(uint32_t a) {
    if (a >= 1 && a <= kMaxAddr) mask &= ~((uint64_t)1 << a);
  }
  int size() const { return __builtin_popcountll(mask); }

  bool disjoint(const Heap& o) const { return (mask & o.mask) == 0; }

  // Disjoint union; throws when footprints overlap.
  Heap join(const Heap& o) const;

  bool operator==(const Heap& o) const;
  bool operator<(const Heap& o) const;  // by size, then mask, then cells

  std::string str() const;
};

}  // namespace sepwand

#endif
