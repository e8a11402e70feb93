#pragma once

#include <stdexcept>
#include <string>

namespace isimm {

/// Broad failure categories; the CLI maps each one to its own exit code.
enum class ErrorKind { invalid_input, infeasible, io };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& what) : Error(ErrorKind::invalid_input, what) {}
};

class Infeasible : public Error {
 public:
  explicit Infeasible(const std::string& what) : Error(ErrorKind::infeasible, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

const char* to_string(ErrorKind kind) noexcept;

}  // namespace isimm
