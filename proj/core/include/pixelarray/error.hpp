#pragma once

#include <stdexcept>
#include <string>

namespace pixelarray {

enum class Errc {
  duplicate_port,
  bad_bounds,
  bad_resolution,
  unknown_variable,
  exposed_not_used,
  index_out_of_range,
  pack_mismatch,
  semiring_mismatch,
  syntax_error,
  unknown_function,
  missing_variable,
  empty_cluster,
  full_cluster,
  too_many_packs,
  cost_overflow,
  not_two_dimensional,
  bad_input,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace pixelarray
