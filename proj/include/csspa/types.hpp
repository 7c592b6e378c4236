#ifndef CSSPA_TYPES_HPP
#define CSSPA_TYPES_HPP

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace csspa {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Invalid user-supplied configuration: schedules, problem wiring, CLI input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A solver quantity left the finite range, or an offline solve stalled
// before reaching its tolerance.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require_dim(const Vector& v, Index dim, const char* what) {
  if (v.size() != dim) {
    throw std::domain_error(std::string(what) + ": expected dimension " +
                            std::to_string(dim) + ", got " +
                            std::to_string(v.size()));
  }
}

inline void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) {
    throw std::domain_error(std::string(what) + ": non-finite input");
  }
}

}  // namespace csspa

#endif
