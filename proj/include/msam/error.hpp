// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace msam {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor shapes that do not fit the operation they were passed to.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Numerical failures: NaN/Inf where finite values are required.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Malformed files, unknown keys, unreadable paths.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace msam
