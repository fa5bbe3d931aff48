#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace eitflash {

// Invalid parameters / configuration. CLI maps this family to exit code 2.
class ValidationError : public std::invalid_argument {
public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

class ConfigError : public ValidationError {
public:
  ConfigError(const std::string& what, int line = 0)
      : ValidationError(line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  int line() const { return line_; }

private:
  int line_;
};

// Numerical failures. CLI maps this family to exit code 3.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

class QuadratureError : public NumericalError {
public:
  QuadratureError(const std::string& what, double achieved_error)
      : NumericalError(what + " (achieved error " + format_error(achieved_error) + ")"),
        achieved_error_(achieved_error) {}
  double achieved_error() const { return achieved_error_; }

private:
  static std::string format_error(double e) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", e);
    return buf;
  }
  double achieved_error_;
};

class GridError : public ValidationError {
public:
  explicit GridError(const std::string& what) : ValidationError(what) {}
};

class TruncationError : public NumericalError {
public:
  explicit TruncationError(const std::string& what) : NumericalError(what) {}
};

class FitError : public NumericalError {
public:
  explicit FitError(const std::string& what) : NumericalError(what) {}
};

class ThresholdNotReached : public NumericalError {
public:
  explicit ThresholdNotReached(const std::string& what) : NumericalError(what) {}
};

}  // namespace eitflash
