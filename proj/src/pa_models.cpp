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

#include "z3ro/pa_models.hpp"

#include <cmath>
#include <sstream>

namespace z3ro {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

double rapp_gain(const RappPa& pa, double input_power) {
  const double u = input_power / pa.saturation_power;
  if (pa.smoothness == 2.0) {
    // (1 + u^2)^(-1/4); this branch carries the Monte Carlo hot loop.
    return 1.0 / std::sqrt(std::sqrt(1.0 + u * u));
  }
  return std::pow(1.0 + std::pow(u, pa.smoothness), -1.0 / (2.0 * pa.smoothness));
}

PaModel make_third_order(cdouble a3) {
  if (!std::isfinite(a3.real()) || !std::isfinite(a3.imag())) {
    throw ConfigError("third-order PA: a3 must be finite");
  }
  return ThirdOrderPa{a3};
}

PaModel make_rapp(double saturation_power, double smoothness) {
  if (!(saturation_power > 0.0) || !std::isfinite(saturation_power)) {
    throw ConfigError("Rapp PA: saturation power must be positive");
  }
  if (!(smoothness > 0.0) || !std::isfinite(smoothness)) {
    throw ConfigError("Rapp PA: smoothness must be positive");
  }
  return RappPa{saturation_power, smoothness};
}

cdouble amplify(const PaModel& model, cdouble x) {
  return std::visit(
      overloaded{
          [&](const IdealPa&) { return x; },
          [&](const ThirdOrderPa& pa) { return x + pa.a3 * x * std::norm(x); },
          [&](const RappPa& pa) { return x * rapp_gain(pa, std::norm(x)); },
      },
      model);
}

ThirdOrderSplit third_order_split(const PaModel& model, cdouble x) {
  const auto* pa = std::get_if<ThirdOrderPa>(&model);
  if (pa == nullptr) throw VariantError("third_order_split: PA model is not third-order");
  return {x, pa->a3 * x * std::norm(x)};
}

std::string describe(const PaModel& model) {
  std::ostringstream os;
  os.precision(12);
  std::visit(overloaded{
                 [&](const IdealPa&) { os << "ideal"; },
                 [&](const ThirdOrderPa& pa) {
                   os << "poly3:" << pa.a3.real() << ',' << pa.a3.imag();
                 },
                 [&](const RappPa& pa) {
                   os << "rapp:" << 10.0 * std::log10(pa.saturation_power) << ','
                      << pa.smoothness;
                 },
             },
             model);
  return os.str();
}

}  // namespace z3ro
