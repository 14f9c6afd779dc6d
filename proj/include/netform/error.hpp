#pragma once

#include <stdexcept>
#include <string>

namespace netform {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (files, fields, domains).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A numerical or geometric precondition that fails at run time,
/// e.g. an empty averaging ball or a disconnected chain.
class ComputeError : public Error {
 public:
  using Error::Error;
};

}  // namespace netform
