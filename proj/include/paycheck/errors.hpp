#pragma once

#include <stdexcept>
#include <string>

namespace paycheck {

// Invalid plan, goal, or training configuration. `path` is a JSON-pointer-like
// location of the offending field when one is known ("/goals/2/weight_p").
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& message, std::string path = {})
      : std::invalid_argument(path.empty() ? message : path + ": " + message),
        message_(message),
        path_(std::move(path)) {}

  // The message without the path prefix.
  const std::string& message() const noexcept { return message_; }
  const std::string& path() const noexcept { return path_; }

 private:
  std::string message_;
  std::string path_;
};

// Malformed or insufficient input data (rate files, trajectories, datasets).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& message, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

// Operation applied out of order, e.g. advancing a state past the horizon.
class SequencingError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Training diverged. `iteration` is the zero-based iteration that failed.
class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& message, int iteration)
      : std::runtime_error("iteration " + std::to_string(iteration) + ": " + message),
        iteration_(iteration) {}

  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

}  // namespace paycheck
