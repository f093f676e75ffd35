#ifndef CTAP_ERRORS_HPP
#define CTAP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ctap {

// Precondition on a numeric argument violated (non-positive frequency, bad index, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Invalid experiment configuration. `path` names the offending config field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& what)
      : std::runtime_error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

// Numerical failure during a computation (divergence, non-convergence, NaN).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ctap

#endif  // CTAP_ERRORS_HPP
