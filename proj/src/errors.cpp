#include "oica/errors.hpp"

namespace oica {

const char* errc_name(errc c) {
  switch (c) {
    case errc::unsupported_order:
      return "unsupported_order";
    case errc::dimension_mismatch:
      return "dimension_mismatch";
    case errc::spec_mismatch:
      return "spec_mismatch";
    case errc::insufficient_data:
      return "insufficient_data";
    case errc::invalid_data:
      return "invalid_data";
    case errc::undefined_fourth_moment:
      return "undefined_fourth_moment";
    case errc::invalid_start:
      return "invalid_start";
    case errc::decomposition_failure:
      return "decomposition_failure";
    case errc::residual_too_large:
      return "residual_too_large";
    case errc::gaussian_column_undetected:
      return "gaussian_column_undetected";
    case errc::invalid_witness:
      return "invalid_witness";
    case errc::degenerate_witness:
      return "degenerate_witness";
    case errc::invalid_count:
      return "invalid_count";
    case errc::size_limit:
      return "size_limit";
    case errc::model_violation:
      return "model_violation";
    case errc::io_error:
      return "io_error";
    case errc::usage_error:
      return "usage_error";
  }
  return "unknown";
}

}  // namespace oica
