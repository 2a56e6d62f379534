/*
 * Copyright 2026 The mimo-precode Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace mimo {

/// Base class for every recoverable numerical failure raised by the library.
/// Simulation drivers catch this type to record a failed trial and continue.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RankDeficient : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class Singular : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NotPositiveDefinite : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DivisionByZero : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DimensionalityViolation : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InvalidDelta : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class AllZeroChannels : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace mimo
