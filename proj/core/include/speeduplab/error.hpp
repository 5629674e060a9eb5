#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace speeduplab {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset()` is the 1-based character position.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, std::size_t offset)
      : Error(message + " at offset " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class EvalError : public Error {
 public:
  enum class Kind { UnboundIdentifier, Domain, NonFinite };

  EvalError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// An argument lies outside the domain of a speedup-algebra relation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid cost model, growth function or model file.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// T_par(p,n) / T_par(1,n) exceeds 1/2, so the exponent of parallelism has
/// no real value under the quadratic approximation.
class MinimalConditionViolated : public Error {
 public:
  explicit MinimalConditionViolated(double ratio)
      : Error("minimal condition of parallelism violated: time ratio " + std::to_string(ratio) +
              " exceeds 1/2"),
        ratio_(ratio) {}

  double ratio() const noexcept { return ratio_; }

 private:
  double ratio_;
};

/// A sequence could not be evaluated at a scheduled processor count.
class LimitError : public Error {
 public:
  LimitError(double p, const std::string& message)
      : Error("limit estimation failed at p=" + std::to_string(p) + ": " + message), p_(p) {}

  double p() const noexcept { return p_; }

 private:
  double p_;
};

/// Least-squares problem is underdetermined or rank deficient.
class FitError : public Error {
 public:
  using Error::Error;
};

/// Malformed measurement data. `rows()` lists offending 1-based line numbers, if any.
class DataError : public Error {
 public:
  explicit DataError(const std::string& message, std::vector<std::size_t> rows = {})
      : Error(message), rows_(std::move(rows)) {}

  const std::vector<std::size_t>& rows() const noexcept { return rows_; }

 private:
  std::vector<std::size_t> rows_;
};

}  // namespace speeduplab
