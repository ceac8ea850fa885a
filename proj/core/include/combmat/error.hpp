#pragma once

#include <stdexcept>
#include <string>

namespace combmat {

/// Raised when a caller violates an operation's precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The row span has dimension < n-1, so its unit normal is not unique.
class CorankError : public std::runtime_error {
 public:
  explicit CorankError(int corank)
      : std::runtime_error("span has corank " + std::to_string(corank) + " (need exactly 1)"),
        corank_(corank) {}

  int corank() const noexcept { return corank_; }

 private:
  int corank_;
};

/// Exact enumeration would exceed its configured outcome budget.
class GuardExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Filesystem failure; the message always carries the offending path.
class IoError : public std::runtime_error {
 public:
  IoError(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(path) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace combmat
