#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace cvcluster {

// Precondition violations on library inputs (bad mode index, non-unitary
// matrix, negative sigma, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A witness verdict was requested for a graph whose inequality pairing is
// not defined (anything other than linear4 / square4 / tshape4).
class UnsupportedGraph : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Scenario configuration problem; `field()` names the offending entry as a
// dotted path, e.g. "loss[2]" or "network".
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace cvcluster
