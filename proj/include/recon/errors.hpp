#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace recon {

/// Bad argument, shape mismatch, or out-of-range id.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input file. `line()` is 0 when the problem is not tied to a line
/// (e.g. a node that never appears).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : std::runtime_error(format(source, line, what)), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& source, std::size_t line,
                            const std::string& what) {
    std::string msg = source;
    if (line != 0) msg += ":" + std::to_string(line);
    return msg + ": " + what;
  }

  std::size_t line_;
};

/// Non-convergence or non-finite values in a numerical routine.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A metric that is not defined for the given input (e.g. modularity with no
/// positive edges).
class UndefinedMetric : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace recon
