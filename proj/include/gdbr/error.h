// Copyright 2026 The GDBR Authors
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

#ifndef GDBR_ERROR_H_
#define GDBR_ERROR_H_

#include <stdexcept>
#include <string>

namespace gdbr {

// Base class for every error raised by the library. Each subclass names the
// contract that was violated so callers can dispatch on type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor shapes do not conform.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Class index out of range.
class IndexError : public Error {
 public:
  using Error::Error;
};

// Model specification violates the bottom-stack structure.
class SpecError : public Error {
 public:
  using Error::Error;
};

// Request forbidden by the restricted-sharing threat model.
class PolicyError : public Error {
 public:
  using Error::Error;
};

class SamplingError : public Error {
 public:
  using Error::Error;
};

class EstimationError : public Error {
 public:
  using Error::Error;
};

// Division by a zero activation estimate.
class DivisionGuardError : public Error {
 public:
  using Error::Error;
};

// Malformed IDX file.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Metric preconditions violated.
class ContractError : public Error {
 public:
  using Error::Error;
};

// Invalid experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace gdbr

#endif  // GDBR_ERROR_H_
