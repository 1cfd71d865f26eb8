// SPDX-License-Identifier: Apache-2.0
//
// z3ro-toolkit: precoder synthesis and verification for arrays with nonlinear PAs
// Copyright (C) 2026 The z3ro-toolkit authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <stdexcept>
#include <string>

namespace z3ro {

// Invalid user-facing parameters (CLI exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Vector lengths that do not agree with the array size.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operation requested on the wrong PA variant.
class VariantError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnsupportedModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Angular grid unsuitable for integration (non-uniform or too coarse).
class ResolutionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Monte Carlo sample count too small for the requested estimate.
class PrecisionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Channel or saturated-antenna selection leads to a division by zero.
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite intermediate results (CLI exit code 4).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// No feasible point of a constrained problem was reached (CLI exit code 3).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace z3ro
