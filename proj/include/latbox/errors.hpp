#pragma once

#include <stdexcept>

namespace latbox {

// Enumeration or sample budgets exceeded.
struct resource_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Quadrature failed to reach the requested tolerance.
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File could not be opened or written.
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace latbox
