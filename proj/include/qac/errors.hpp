#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qac {

/// Malformed textual input (graph6, edge lists, config files, JSON payloads).
class parse_error : public std::runtime_error {
public:
  parse_error(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

/// A request that is well-formed but exceeds a size limit (factorial blow-up,
/// exhaustive verification out of reach, state vector too large).
class size_refusal : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Integrator or eigensolver failed to meet its accuracy contract.
class numerical_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace qac
