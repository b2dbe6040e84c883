// Copyright 2026 The qfc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QFC_ERRORS_HPP_
#define QFC_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace qfc {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// A scalar parameter (alpha, epsilon, beta, grid size, ...) is out of its domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

class StateValidityError : public Error {
 public:
  using Error::Error;
};

// Conditioning on an outcome whose probability is below the zero threshold.
class ConditioningError : public Error {
 public:
  using Error::Error;
};

// The filtered state assigns (numerically) zero probability to a real outcome.
class FilterDivergence : public Error {
 public:
  using Error::Error;
};

class ContractViolation : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class MissingCheckpoint : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace qfc

#endif  // QFC_ERRORS_HPP_
