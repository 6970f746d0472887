#pragma once

#include <stdexcept>

namespace lorasg {

// Invalid inputs throw std::invalid_argument. Failures that arise from the
// arithmetic itself (overflow to non-finite, quadrature non-convergence)
// throw numeric_error so the CLI can map them to a distinct exit code.
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace lorasg
