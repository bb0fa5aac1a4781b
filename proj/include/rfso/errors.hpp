#pragma once

#include <stdexcept>
#include <string>

namespace rfso {

// Configuration text is malformed or violates a model constraint.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Gram matrix is rank deficient or too ill-conditioned to invert.
class singular_matrix_error : public std::domain_error {
 public:
  explicit singular_matrix_error(const std::string& what) : std::domain_error(what) {}
};

// Iterative solver failed to reach its tolerance; carries the last residual.
class convergence_error : public std::runtime_error {
 public:
  convergence_error(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Filesystem write failed.
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rfso
