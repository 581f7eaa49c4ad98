#pragma once

#include <stdexcept>
#include <string>

namespace i2a {

/// Bad or inconsistent configuration (template sets, ratios, shapes).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid runtime input (empty text, out-of-range values, bad slot data).
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed file content (corpus, scene, checkpoint, trajectory).
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure: NaN propagation, singular systems, divergence.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Training-loop failure (loss divergence), names the offending epoch.
class TrainingError : public std::runtime_error {
 public:
  explicit TrainingError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace i2a
