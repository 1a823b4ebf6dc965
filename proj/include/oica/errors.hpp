#pragma once

#include <stdexcept>
#include <string>

namespace oica {

// Reason codes surfaced through the CLI's structured error output.
enum class errc {
  unsupported_order,
  dimension_mismatch,
  spec_mismatch,
  insufficient_data,
  invalid_data,
  undefined_fourth_moment,
  invalid_start,
  decomposition_failure,
  residual_too_large,
  gaussian_column_undetected,
  invalid_witness,
  degenerate_witness,
  invalid_count,
  size_limit,
  model_violation,
  io_error,
  usage_error,
};

const char* errc_name(errc c);

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace oica
