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

#include <string>
#include <variant>

#include "z3ro/array_core.hpp"

namespace z3ro {

// All PA variants have unit small-signal gain and are memoryless. Every
// antenna uses the same model.

struct IdealPa {};

// y = x + a3 x |x|^2. A complex a3 captures both AM/AM and AM/PM.
struct ThirdOrderPa {
  cdouble a3;
};

// y = x / (1 + |x / sqrt(p_sat)|^(2S))^(1 / 2S). AM/AM only.
struct RappPa {
  double saturation_power;
  double smoothness;
};

using PaModel = std::variant<IdealPa, ThirdOrderPa, RappPa>;

// Validating constructors.
PaModel make_third_order(cdouble a3);
PaModel make_rapp(double saturation_power, double smoothness);

cdouble amplify(const PaModel& model, cdouble x);

// Real amplitude gain of the Rapp PA at the given input power |x|^2.
double rapp_gain(const RappPa& pa, double input_power);

struct ThirdOrderSplit {
  cdouble linear;
  cdouble distortion;
};

// (x, a3 x |x|^2). Throws VariantError unless `model` is ThirdOrderPa.
ThirdOrderSplit third_order_split(const PaModel& model, cdouble x);

// Human-readable descriptor in the CLI syntax (ideal, poly3:re,im, rapp:psat_db,S).
std::string describe(const PaModel& model);

}  // namespace z3ro
