#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace eitq {

/// Invalid argument to an operation (out-of-range physical parameter,
/// bandwidth above Nyquist, record too short, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parameter set that places the susceptibility on a pole.
class DegenerateParameters : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

/// Caller broke an operation's precondition (e.g. mismatched frequencies).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Cross-correlation peak too weak to call a delay.
class NoDelayFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Least-squares fit failed; carries the iterate history.
class FitError : public std::runtime_error {
 public:
  FitError(const std::string& what, std::vector<std::string> trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const std::vector<std::string>& trace() const { return trace_; }

 private:
  std::vector<std::string> trace_;
};

/// Jacobian is rank deficient at the optimum.
class DegenerateFit : public FitError {
 public:
  using FitError::FitError;
};

/// Scenario file is malformed; `line` is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, int line, const std::string& msg)
      : std::runtime_error(format(field, line, msg)), field_(field), line_(line) {}
  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  static std::string format(const std::string& field, int line, const std::string& msg) {
    std::string s = "config error";
    if (line > 0) s += " at line " + std::to_string(line);
    if (!field.empty()) s += " [" + field + "]";
    return s + ": " + msg;
  }
  std::string field_;
  int line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace eitq
