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

#include "z3ro/opt_oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace z3ro {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// (sum g)^2 on R^M with the power and cubic constraints.
struct RealProblem {
  std::size_t dim;
  double budget;

  double objective(const VectorXd& x) const {
    const double s = x.sum();
    return s * s;
  }
  VectorXd gradient(const VectorXd& x) const {
    return VectorXd::Constant(static_cast<Eigen::Index>(dim), 2.0 * x.sum());
  }
  VectorXd constraints(const VectorXd& x) const {
    VectorXd c(2);
    c(0) = x.squaredNorm() - budget;
    c(1) = x.array().cube().sum();
    return c;
  }
  MatrixXd jacobian(const VectorXd& x) const {
    MatrixXd J(2, x.size());
    J.row(0) = 2.0 * x.transpose();
    J.row(1) = 3.0 * x.array().square().matrix().transpose();
    return J;
  }
};

// |sum g|^2 over complex g packed as x = [Re g; Im g].
struct ComplexProblem {
  std::size_t dim;  // 2M
  double budget;

  std::size_t half() const { return dim / 2; }
  double objective(const VectorXd& x) const {
    const auto n = static_cast<Eigen::Index>(half());
    const double re = x.head(n).sum();
    const double im = x.tail(n).sum();
    return re * re + im * im;
  }
  VectorXd gradient(const VectorXd& x) const {
    const auto n = static_cast<Eigen::Index>(half());
    VectorXd g(x.size());
    g.head(n).setConstant(2.0 * x.head(n).sum());
    g.tail(n).setConstant(2.0 * x.tail(n).sum());
    return g;
  }
  VectorXd constraints(const VectorXd& x) const {
    const auto n = static_cast<Eigen::Index>(half());
    const auto re = x.head(n).array();
    const auto im = x.tail(n).array();
    const Eigen::ArrayXd mag2 = re.square() + im.square();
    VectorXd c(3);
    c(0) = mag2.sum() - budget;
    c(1) = (re * mag2).sum();
    c(2) = (im * mag2).sum();
    return c;
  }
  MatrixXd jacobian(const VectorXd& x) const {
    const auto n = static_cast<Eigen::Index>(half());
    const Eigen::ArrayXd re = x.head(n).array();
    const Eigen::ArrayXd im = x.tail(n).array();
    MatrixXd J(3, x.size());
    J.row(0).head(n) = 2.0 * re.matrix().transpose();
    J.row(0).tail(n) = 2.0 * im.matrix().transpose();
    J.row(1).head(n) = (3.0 * re.square() + im.square()).matrix().transpose();
    J.row(1).tail(n) = (2.0 * re * im).matrix().transpose();
    J.row(2).head(n) = (2.0 * re * im).matrix().transpose();
    J.row(2).tail(n) = (re.square() + 3.0 * im.square()).matrix().transpose();
    return J;
  }
};

constexpr int kMaxRetractionSteps = 60;
constexpr int kMaxAscentSteps = 20000;

// Gauss-Newton (minimum-norm) steps back onto the constraint manifold.
template <typename Problem>
bool retract(const Problem& problem, VectorXd& x) {
  const double tol = 1e-13 * problem.budget;
  for (int it = 0; it < kMaxRetractionSteps; ++it) {
    const VectorXd c = problem.constraints(x);
    if (!c.allFinite()) return false;
    if (c.template lpNorm<Eigen::Infinity>() <= tol) return true;
    const MatrixXd J = problem.jacobian(x);
    x -= J.completeOrthogonalDecomposition().solve(c);
  }
  const VectorXd c_final = problem.constraints(x);
  return c_final.template lpNorm<Eigen::Infinity>() <= tol;
}

struct AscentResult {
  VectorXd x;
  bool feasible = false;
};

// Projected-gradient ascent with Armijo backtracking; every trial point is
// retracted before it is compared.
template <typename Problem>
AscentResult ascend(const Problem& problem, VectorXd x) {
  if (!retract(problem, x)) return {std::move(x), false};
  double f = problem.objective(x);
  double eta = 0.1;
  for (int it = 0; it < kMaxAscentSteps; ++it) {
    const VectorXd grad = problem.gradient(x);
    const MatrixXd Jt = problem.jacobian(x).transpose();
    const VectorXd tangent = grad - Jt * Jt.completeOrthogonalDecomposition().solve(grad);
    const double slope = tangent.squaredNorm();
    if (std::sqrt(slope) <= 1e-11 * (1.0 + grad.norm())) break;

    bool accepted = false;
    while (eta > 1e-16) {
      VectorXd trial = x + eta * tangent;
      if (retract(problem, trial)) {
        const double f_trial = problem.objective(trial);
        if (f_trial >= f + 1e-4 * eta * slope) {
          x = std::move(trial);
          f = f_trial;
          accepted = true;
          break;
        }
      }
      eta *= 0.5;
    }
    if (!accepted) break;
    eta = std::min(eta * 2.0, 10.0);
  }
  return {std::move(x), true};
}

VectorXd random_start(SeededRng& rng, std::size_t dim, double budget) {
  VectorXd x(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.normal();
  return x * std::sqrt(budget / x.squaredNorm());
}

std::vector<double> to_std(const VectorXd& x) { return {x.data(), x.data() + x.size()}; }

// Number of distinct values in g, clustering within `tol`.
std::size_t distinct_levels(std::vector<double> g, double tol) {
  std::sort(g.begin(), g.end());
  std::size_t levels = g.empty() ? 0 : 1;
  for (std::size_t i = 1; i < g.size(); ++i) {
    if (g[i] - g[i - 1] > tol) ++levels;
  }
  return levels;
}

void check_oracle_size(std::size_t num_antennas, std::size_t starts) {
  if (num_antennas < 2) throw ConfigError("optimization oracle: M must be >= 2");
  if (starts < kMinOracleStarts) {
    throw ConfigError("optimization oracle: need at least " + std::to_string(kMinOracleStarts) +
                      " starts");
  }
}

}  // namespace

// ---------------------------------------------------------------------------

bool RealProblemSolution::feasible() const {
  const double M = static_cast<double>(g.size());
  return std::abs(power_residual) <= 1e-8 * M && std::abs(cubic_residual) <= 1e-8 * std::pow(M, 1.5);
}

RealProblemSolution evaluate_real_solution(std::vector<double> g) {
  RealProblemSolution out;
  double sum = 0.0;
  double sum2 = 0.0;
  double sum3 = 0.0;
  for (double v : g) {
    sum += v;
    sum2 += v * v;
    sum3 += v * v * v;
  }
  out.objective = sum * sum;
  out.power_residual = sum2 - static_cast<double>(g.size());
  out.cubic_residual = sum3;
  out.g = std::move(g);
  return out;
}

RealProblemSolution closed_form_candidate(std::size_t num_antennas, std::size_t num_saturated) {
  if (num_saturated == 0 || 2 * num_saturated >= num_antennas) {
    throw ConfigError("closed_form_candidate: need 0 < M_s < M/2 (M = " +
                      std::to_string(num_antennas) + ", M_s = " + std::to_string(num_saturated) +
                      ")");
  }
  const double M = static_cast<double>(num_antennas);
  const double Ms = static_cast<double>(num_saturated);
  const double regular = M - Ms;
  const double alpha = std::sqrt(M) / std::sqrt(regular + std::cbrt(Ms) * std::pow(regular, 2.0 / 3.0));
  const double delta = -alpha * std::cbrt(regular / Ms);
  std::vector<double> g(num_antennas, alpha);
  std::fill_n(g.begin(), num_saturated, delta);
  auto out = evaluate_real_solution(std::move(g));
  const auto check = verify_critical_point(out.g);
  out.multipliers = LagrangeMultipliers{check.lambda, check.mu};
  return out;
}

CriticalPointCheck verify_critical_point(std::span<const double> g) {
  const auto eval = evaluate_real_solution({g.begin(), g.end()});
  if (!eval.feasible()) {
    throw std::invalid_argument("verify_critical_point: g violates the constraints");
  }
  const auto n = static_cast<Eigen::Index>(g.size());
  const VectorXd x = Eigen::Map<const VectorXd>(g.data(), n);
  const double sum = x.sum();

  // 2 sum - 2 lambda g_m - 3 mu g_m^2 = 0 for all m.
  MatrixXd A(n, 2);
  A.col(0) = 2.0 * x;
  A.col(1) = 3.0 * x.array().square().matrix();
  const VectorXd rhs = VectorXd::Constant(n, 2.0 * sum);
  const VectorXd coef = A.colPivHouseholderQr().solve(rhs);

  CriticalPointCheck out;
  out.lambda = coef(0);
  out.mu = coef(1);
  out.gradient_residual = (rhs - A * coef).lpNorm<Eigen::Infinity>();
  out.is_critical = out.gradient_residual <= 1e-6 * std::abs(sum);
  return out;
}

OracleReport solve_real_problem(std::size_t num_antennas, std::size_t starts,
                                const SeededRng& rng, unsigned workers) {
  check_oracle_size(num_antennas, starts);
  const RealProblem problem{num_antennas, static_cast<double>(num_antennas)};

  std::vector<double> fallback;
  if (num_antennas >= 3) {
    fallback = closed_form_candidate(num_antennas, 1).g;
  } else {
    fallback = {1.0, -1.0};
  }

  const std::size_t total = starts + 1;
  std::vector<AscentResult> runs(total);
  parallel_for(total, workers, [&](std::size_t i) {
    VectorXd x0;
    if (i < starts) {
      SeededRng stream = rng.substream(i);
      x0 = random_start(stream, num_antennas, problem.budget);
    } else {
      x0 = Eigen::Map<const VectorXd>(fallback.data(), static_cast<Eigen::Index>(num_antennas));
    }
    runs[i] = ascend(problem, std::move(x0));
  });

  OracleReport report;
  report.starts = starts;
  report.best_random_objective = -std::numeric_limits<double>::infinity();
  bool have_best = false;
  for (std::size_t i = 0; i < total; ++i) {
    if (!runs[i].feasible) continue;
    auto sol = evaluate_real_solution(to_std(runs[i].x));
    if (!sol.feasible()) continue;
    if (i < starts) {
      ++report.converged_starts;
      report.best_random_objective = std::max(report.best_random_objective, sol.objective);
      const auto check = verify_critical_point(sol.g);
      if (check.is_critical && distinct_levels(sol.g, 1e-6) > 2) report.off_family.push_back(sol);
    }
    if (!have_best || sol.objective > report.best.objective) {
      report.best = std::move(sol);
      report.best_start = i;
      have_best = true;
    }
  }
  if (!have_best) throw InfeasibleError("solve_real_problem: no start reached a feasible point");
  const auto check = verify_critical_point(report.best.g);
  report.best.multipliers = LagrangeMultipliers{check.lambda, check.mu};
  return report;
}

// ---------------------------------------------------------------------------

RealnessReport realness_of(std::span<const cdouble> g) {
  cdouble sum{};
  cdouble sum_sq{};
  for (const auto& v : g) {
    sum += v;
    sum_sq += v * v;
  }
  // The global phase is that of sum g; when the sum vanishes, fall back to the
  // principal axis of the points (half the phase of sum g^2).
  const double scale = std::sqrt(static_cast<double>(g.size()));
  const double psi = std::abs(sum) > 1e-9 * scale ? std::arg(sum) : 0.5 * std::arg(sum_sq);
  const cdouble derotate = std::polar(1.0, -psi);

  RealnessReport out;
  out.best_objective = std::norm(sum);
  out.best_g.reserve(g.size());
  for (const auto& v : g) {
    const cdouble r = v * derotate;
    out.best_g.push_back(r);
    out.max_imag_after_phasor = std::max(out.max_imag_after_phasor, std::abs(r.imag()));
  }
  return out;
}

RealnessReport probe_realness_conjecture(std::size_t num_antennas, std::size_t starts,
                                         const SeededRng& rng, unsigned workers) {
  if (num_antennas < 2 || num_antennas > 12) {
    throw ConfigError("probe_realness_conjecture: M must lie in [2, 12]");
  }
  check_oracle_size(num_antennas, starts);
  const ComplexProblem problem{2 * num_antennas, static_cast<double>(num_antennas)};

  std::vector<AscentResult> runs(starts);
  parallel_for(starts, workers, [&](std::size_t i) {
    SeededRng stream = rng.substream(i);
    runs[i] = ascend(problem, random_start(stream, problem.dim, problem.budget));
  });

  const auto n = static_cast<Eigen::Index>(num_antennas);
  RealnessReport best;
  bool have_best = false;
  std::size_t converged = 0;
  for (const auto& run : runs) {
    if (!run.feasible) continue;
    const VectorXd c = problem.constraints(run.x);
    if (std::abs(c(0)) > 1e-8 * problem.budget ||
        std::hypot(c(1), c(2)) > 1e-8 * std::pow(problem.budget, 1.5)) {
      continue;
    }
    ++converged;
    ComplexVector g(num_antennas);
    for (Eigen::Index m = 0; m < n; ++m) g[static_cast<std::size_t>(m)] = {run.x(m), run.x(n + m)};
    auto report = realness_of(g);
    if (!have_best || report.best_objective > best.best_objective) {
      best = std::move(report);
      have_best = true;
    }
  }
  if (!have_best) throw InfeasibleError("probe_realness_conjecture: no feasible start");
  best.converged_starts = converged;
  return best;
}

}  // namespace z3ro
