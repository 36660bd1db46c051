#pragma once

#include <stdexcept>
#include <string>

namespace lur {

// Error taxonomy shared across the library. The CLI maps these onto
// process exit codes (see tools/).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite loss during optimization; carries the epoch it was detected in.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, int epoch)
      : std::runtime_error(what), epoch_(epoch) {}
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

// Placement budget exhausted; carries how many points were placed.
class CapacityError : public std::runtime_error {
 public:
  CapacityError(const std::string& what, int achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  int achieved() const { return achieved_; }

 private:
  int achieved_;
};

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Rank-deficient design matrix; names the offending column.
class SingularDesignError : public std::runtime_error {
 public:
  SingularDesignError(const std::string& what, const std::string& column)
      : std::runtime_error(what), column_(column) {}
  const std::string& column() const { return column_; }

 private:
  std::string column_;
};

}  // namespace lur
