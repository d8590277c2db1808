#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dincl {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed expression text. `offset` is the byte position of the problem.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : Error(message + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Evaluation outside an expression's domain (ln of a non-positive value, ...).
class DomainError : public Error {
 public:
  DomainError(const std::string& message, double s, std::string node)
      : Error(message + " in '" + node + "' at s=" + std::to_string(s)),
        s_(s), node_(std::move(node)) {}
  double s() const noexcept { return s_; }
  const std::string& node() const noexcept { return node_; }

 private:
  double s_;
  std::string node_;
};

class InvalidMap : public Error {
 public:
  using Error::Error;
};

class SelectionViolation : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

class HypothesisViolation : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, const std::string& message)
      : Error("config key '" + key + "': " + message), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace dincl
