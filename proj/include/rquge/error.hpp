#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rquge {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (JSON syntax, wrong field types).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A record parsed fine but broke a domain invariant.
class ValidationError : public Error {
 public:
  ValidationError(std::string record_id, std::string field, const std::string& what)
      : Error("record '" + record_id + "', field '" + field + "': " + what),
        record_id_(std::move(record_id)),
        field_(std::move(field)) {}
  const std::string& record_id() const { return record_id_; }
  const std::string& field() const { return field_; }

 private:
  std::string record_id_;
  std::string field_;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A model backend failed; carries the runner name and, once known, the
/// id of the instance being scored.
class RunnerError : public Error {
 public:
  RunnerError(std::string runner, std::string cause, std::string instance_id = {})
      : Error(format(runner, cause, instance_id)),
        runner_(std::move(runner)),
        cause_(std::move(cause)),
        instance_id_(std::move(instance_id)) {}

  const std::string& runner() const { return runner_; }
  const std::string& cause() const { return cause_; }
  const std::string& instance_id() const { return instance_id_; }

  RunnerError tagged(const std::string& instance_id) const {
    return RunnerError(runner_, cause_, instance_id);
  }

 private:
  static std::string format(const std::string& runner, const std::string& cause,
                            const std::string& instance_id) {
    std::string s = "runner '" + runner + "'";
    if (!instance_id.empty()) s += " on instance '" + instance_id + "'";
    return s + ": " + cause;
  }

  std::string runner_;
  std::string cause_;
  std::string instance_id_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A statistic is mathematically undefined for the given input.
class UndefinedError : public Error {
 public:
  using Error::Error;
};

/// Reference-based metric called on an instance with no reference question.
class ReferenceRequiredError : public Error {
 public:
  explicit ReferenceRequiredError(const std::string& metric)
      : Error("metric '" + metric + "' requires a reference question") {}
};

}  // namespace rquge
