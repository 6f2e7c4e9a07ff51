#pragma once

#include <stdexcept>
#include <string>

namespace fracdiff {

/// Base class for all library errors. Each concrete error corresponds to a
/// documented failure mode of one of the public operations.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

class TailNotIntegrable : public Error {
 public:
  using Error::Error;
};

class NonpositiveArgument : public Error {
 public:
  using Error::Error;
};

class NegativeArgument : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

class Pole : public Error {
 public:
  using Error::Error;
};

class NewtonDiverged : public Error {
 public:
  using Error::Error;
};

class OrderViolation : public Error {
 public:
  using Error::Error;
};

class NonConvergent : public Error {
 public:
  using Error::Error;
};

class NotConverging : public Error {
 public:
  using Error::Error;
};

class NotRearranged : public Error {
 public:
  using Error::Error;
};

class MassMismatch : public Error {
 public:
  using Error::Error;
};

class PreconditionFailed : public Error {
 public:
  using Error::Error;
};

class NonpositiveProfile : public Error {
 public:
  using Error::Error;
};

class SupportViolation : public Error {
 public:
  using Error::Error;
};

class WindowTooShort : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace fracdiff
