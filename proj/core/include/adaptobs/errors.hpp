#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace adaptobs {

/// Invalid scenario or model configuration. Carries every offending field.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what), fields_{what} {}
  explicit ConfigError(std::vector<std::string> fields);
  const std::vector<std::string>& fields() const { return fields_; }

 private:
  std::vector<std::string> fields_;
};

}  // namespace adaptobs
