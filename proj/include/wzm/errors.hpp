#pragma once

#include <stdexcept>
#include <string>

namespace wzm {

// Requested a normalized coherence between fields of zero mean intensity
// (chi = 0 makes g1 a 0/0 expression on the moment route).
class undefined_coherence : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The Fock-space doubling schedule could not meet its tolerance under the
// per-mode cutoff cap.
class convergence_failure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A scan configuration failed validation; the message names the field.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An output file could not be written; the message carries the path.
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wzm
