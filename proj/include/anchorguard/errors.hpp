#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace anchorguard {

/// Anchor triple is collinear or has coincident points.
class DegenerateGeometry : public std::runtime_error {
 public:
  explicit DegenerateGeometry(const std::string& what, std::optional<int> group_id = std::nullopt)
      : std::runtime_error(what), group_id_(group_id) {}

  std::optional<int> group_id() const noexcept { return group_id_; }

 private:
  std::optional<int> group_id_;
};

class DeploymentFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownGroup : public std::runtime_error {
 public:
  explicit UnknownGroup(int group_id)
      : std::runtime_error("unknown group " + std::to_string(group_id)), group_id_(group_id) {}
  int group_id() const noexcept { return group_id_; }

 private:
  int group_id_;
};

class NoNeighborGroup : public std::runtime_error {
 public:
  explicit NoNeighborGroup(int group_id)
      : std::runtime_error("group " + std::to_string(group_id) + " has no usable neighbor group"),
        group_id_(group_id) {}
  int group_id() const noexcept { return group_id_; }

 private:
  int group_id_;
};

class InvalidSpec : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InsufficientData : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SingularCovariance : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed scenario or fixture document.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, std::string key, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + (key.empty() ? "" : " (" + key + ")") + ": " +
                           message),
        line_(line),
        key_(std::move(key)) {}

  int line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  int line_;
  std::string key_;
};

/// Well-formed document whose values break a constraint.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace anchorguard
