#pragma once

#include <stdexcept>
#include <string>

namespace rsc {

// Base for every error raised by the library.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A dimension or index argument is outside its allowed range.
struct dimension_error : error {
  using error::error;
};

// A simplex that must be present in a complex is not.
struct membership_error : error {
  using error::error;
};

// A size or memory budget would be exceeded.
struct resource_error : error {
  using error::error;
};

// A numeric argument is outside the domain of the function.
struct domain_error : error {
  using error::error;
};

// Input does not have the required shape (e.g. a rooted complex that is not a tree).
struct shape_error : error {
  using error::error;
};

// Invalid user configuration (CLI flags or config file).
struct config_error : error {
  using error::error;
};

}  // namespace rsc
