#pragma once

#include <stdexcept>
#include <string>

namespace qs {

enum class ErrorKind {
  dimension,
  invalid_argument,
  not_bounded_below,
  singular_parameter,
  log_branch,
  rank_deficient,
  divergence,
  aliasing,
  io,
  config,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Divergence of an iteration; carries the largest step that did converge (0 if none).
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, double safe_t)
      : Error(ErrorKind::divergence, what), safe_t_(safe_t) {}
  double safe_t() const noexcept { return safe_t_; }

 private:
  double safe_t_;
};

}  // namespace qs
