#pragma once

#include <stdexcept>
#include <string>

namespace tomo {

// Library-wide error with a machine-readable category. The CLI maps the
// category to its exit code; tests match on it to distinguish failure modes.
class Error : public std::runtime_error {
 public:
  enum class Kind {
    invalid_argument,   // precondition violated
    degenerate_basis,   // zero column / rank defect where full rank required
    not_symmetric,      // symmetric solve on a non-symmetric matrix
    bad_magic,          // IDX file with wrong magic number
    shape_mismatch,     // IDX image/label counts disagree or dims wrong
    truncated,          // IDX file shorter than its header promises
    memory_guard,       // materialization would exceed the configured cap
    config,             // bad or unknown configuration field
    io,                 // filesystem failure
  };

  Error(Kind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

}  // namespace tomo
