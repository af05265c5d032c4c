#ifndef IQA_ERROR_HPP
#define IQA_ERROR_HPP

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace iqa {

// Base class for every error raised by the library. The C API maps each
// subclass onto one status code.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Argument outside the documented domain of an operation.
class DomainError : public Error {
public:
  using Error::Error;
};

// Problem too large for an exhaustive or state-vector method.
class CapacityError : public Error {
public:
  using Error::Error;
};

// Operation not defined for the given field profile.
class UnsupportedProfileError : public Error {
public:
  using Error::Error;
};

// Invalid, unknown or inconsistent run configuration.
class ConfigError : public Error {
public:
  ConfigError(std::string key, const std::string& what)
      : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

private:
  std::string key_;
};

// Iterative method failed to converge or produced an invalid result.
class NumericError : public Error {
public:
  using Error::Error;
};

// File system or record-store failure.
class IoError : public Error {
public:
  using Error::Error;
};

using WarningHandler = std::function<void(std::string_view)>;

// Replaces the process-wide warning sink (default: stderr). Returns the
// previous handler.
WarningHandler set_warning_handler(WarningHandler handler);
void emit_warning(std::string_view message);

} // namespace iqa

#endif
