#pragma once

#include <stdexcept>
#include <string>

namespace dirpg {

/// A caller broke an operation's precondition (illegal action, empty legal
/// set, unmaterialized prefix, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Invalid experiment configuration; `field` names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace dirpg
