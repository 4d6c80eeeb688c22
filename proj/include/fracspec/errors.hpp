#pragma once

#include <stdexcept>
#include <string>

namespace fracspec {

class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

// bad argument or violated precondition
struct DomainError : Error {
  explicit DomainError(const std::string& w) : Error("domain", w) {}
};

struct SingularityError : Error {
  explicit SingularityError(const std::string& w) : Error("singularity", w) {}
};

// operation called outside its Hurst regime
struct RegimeError : Error {
  explicit RegimeError(const std::string& w) : Error("regime", w) {}
};

// convergence failures, unresolved layers, bad conditioning
struct NumericalError : Error {
  explicit NumericalError(const std::string& w) : Error("numerical", w) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error("config", w) {}
};

}  // namespace fracspec
