#pragma once

#include <stdexcept>
#include <string>

namespace dnf {

// Invalid configuration: bad parameter windows, malformed input, or a
// certified-bounds assumption that an algorithm relies on turning out false.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Iterative method failed to reach its tolerance; carries the last residual.
class numeric_error : public std::runtime_error {
 public:
  numeric_error(const std::string& what, double residual)
      : std::runtime_error(what + " (final residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// A cylinder or region does not resolve on the grid; names the deficient axis.
class geometry_error : public std::runtime_error {
 public:
  geometry_error(const std::string& what, std::string axis)
      : std::runtime_error(what + " [axis: " + axis + "]"), axis_(std::move(axis)) {}
  const std::string& axis() const { return axis_; }

 private:
  std::string axis_;
};

// A caller or callee broke an interface contract (e.g. a line search that
// cannot decrease a strictly convex functional).
class contract_error : public std::runtime_error {
 public:
  explicit contract_error(const std::string& what) : std::runtime_error(what) {}
};

// File format / persistence failure.
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dnf
