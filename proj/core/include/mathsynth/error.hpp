// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace mathsynth {

/// Base of every error thrown across the library boundary.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " (at offset " + std::to_string(position) + ")"), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class ArithmeticError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class TypeError : public Error {
 public:
  using Error::Error;
};

class PrimitiveError : public Error {
 public:
  using Error::Error;
};

class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& what, std::size_t failing_step)
      : Error(what), failing_step_(failing_step) {}
  /// 1-based count of the primitive application that failed (0 if none ran).
  std::size_t failing_step() const noexcept { return failing_step_; }

 private:
  std::size_t failing_step_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Reason a pure operation declined to produce a value. Cheap to create; used on
/// hot paths (search) where exceptions would dominate runtime.
enum class FaultCode {
  IndexOutOfRange,
  ContainsEquality,
  RootReplacement,
  NotApplicable,
  NonCommutative,
  LeafNode,
  MixedOperatorClass,
  NoCommonFactor,
  DivisionByZero,
  Overflow,
  TypeMismatch,
  StepLimit,
};

std::string_view fault_name(FaultCode code) noexcept;

struct Fault {
  FaultCode code;
  std::string_view detail;  // static storage only
};

std::string describe(const Fault& fault);

/// Value-or-fault result for the non-throwing core.
template <class T>
class Outcome {
 public:
  Outcome(T value) : data_(std::move(value)) {}  // NOLINT(google-explicit-constructor)
  Outcome(Fault fault) : data_(fault) {}         // NOLINT(google-explicit-constructor)

  bool ok() const noexcept { return data_.index() == 0; }
  explicit operator bool() const noexcept { return ok(); }

  const T& value() const& { return std::get<0>(data_); }
  T&& value() && { return std::get<0>(std::move(data_)); }
  const T& operator*() const& { return value(); }
  const T* operator->() const { return &std::get<0>(data_); }
  const Fault& fault() const { return std::get<1>(data_); }

 private:
  std::variant<T, Fault> data_;
};

}  // namespace mathsynth
