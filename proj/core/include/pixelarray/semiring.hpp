#pragma once

#include <cstdint>
#include <limits>

namespace pixelarray {

// Boolean semiring: add = OR, mul = AND, ordered 0 <= 1.
struct BoolSemiring {
  using Value = std::uint8_t;
  static constexpr bool idempotent_add = true;
  static constexpr const char* name = "bool";

  static constexpr Value zero() { return 0; }
  static constexpr Value one() { return 1; }
  static constexpr Value add(Value a, Value b) { return a | b; }
  static constexpr Value mul(Value a, Value b) { return a & b; }
  static constexpr bool leq(Value a, Value b) { return a <= b; }
};

// Counting semiring over the naturals, saturating at the maximum
// representable value so addition and multiplication stay total and the
// order is preserved. Deviates from exact arithmetic only at saturation.
struct CountSemiring {
  using Value = std::uint64_t;
  static constexpr bool idempotent_add = false;
  static constexpr const char* name = "count";
  static constexpr Value max_value = std::numeric_limits<std::uint64_t>::max();

  static constexpr Value zero() { return 0; }
  static constexpr Value one() { return 1; }
  static Value add(Value a, Value b) {
    Value out = 0;
    return __builtin_add_overflow(a, b, &out) ? max_value : out;
  }
  static Value mul(Value a, Value b) {
    Value out = 0;
    return __builtin_mul_overflow(a, b, &out) ? max_value : out;
  }
  static constexpr bool leq(Value a, Value b) { return a <= b; }
};

}  // namespace pixelarray
