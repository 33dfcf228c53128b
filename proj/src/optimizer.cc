//
// Copyright 2026 The mtboot Authors
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
//

#include "mtboot/optimizer.h"

#include <algorithm>
#include <cmath>
#include <deque>

namespace mtboot {
namespace {

double Dot(std::span<const double> a, std::span<const double> b) {
  double total = 0.0;
  for (size_t i = 0; i < a.size(); ++i) total += a[i] * b[i];
  return total;
}

struct Correction {
  std::vector<double> s;
  std::vector<double> y;
  double rho;
};

}  // namespace

OptimizerResult MinimizeLbfgs(const DifferentiableFunction& function,
                              std::vector<double> x0,
                              const OptimizerOptions& options) {
  const size_t n = x0.size();
  OptimizerResult result;
  result.x = std::move(x0);
  std::vector<double> gradient(n);
  result.value = function(result.x, gradient);
  result.values.push_back(result.value);
  result.gradient_norm = std::sqrt(Dot(gradient, gradient));

  std::deque<Correction> history;
  std::vector<double> direction(n);
  std::vector<double> alpha;
  std::vector<double> candidate(n);
  std::vector<double> candidate_gradient(n);

  while (result.iterations < options.max_iterations) {
    if (result.gradient_norm < options.gradient_tolerance) {
      result.converged = true;
      break;
    }

    // Two-loop recursion: direction = -H * gradient.
    for (size_t i = 0; i < n; ++i) direction[i] = -gradient[i];
    alpha.assign(history.size(), 0.0);
    for (size_t k = history.size(); k-- > 0;) {
      alpha[k] = history[k].rho * Dot(history[k].s, direction);
      for (size_t i = 0; i < n; ++i) direction[i] -= alpha[k] * history[k].y[i];
    }
    if (!history.empty()) {
      const Correction& last = history.back();
      const double gamma = Dot(last.s, last.y) / Dot(last.y, last.y);
      for (double& d : direction) d *= gamma;
    }
    for (size_t k = 0; k < history.size(); ++k) {
      const double beta = history[k].rho * Dot(history[k].y, direction);
      for (size_t i = 0; i < n; ++i) {
        direction[i] += (alpha[k] - beta) * history[k].s[i];
      }
    }

    double slope = Dot(gradient, direction);
    if (!(slope < 0.0)) {
      history.clear();
      for (size_t i = 0; i < n; ++i) direction[i] = -gradient[i];
      slope = -result.gradient_norm * result.gradient_norm;
    }

    double step = history.empty() ? 1.0 / std::max(1.0, result.gradient_norm)
                                  : 1.0;
    constexpr double kArmijo = 1e-4;
    bool accepted = false;
    double candidate_value = 0.0;
    for (int attempt = 0; attempt < options.max_line_search_steps; ++attempt) {
      for (size_t i = 0; i < n; ++i) {
        candidate[i] = result.x[i] + step * direction[i];
      }
      candidate_value = function(candidate, candidate_gradient);
      if (std::isfinite(candidate_value) &&
          candidate_value <= result.value + kArmijo * step * slope &&
          candidate_value < result.value) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    Correction correction;
    correction.s.resize(n);
    correction.y.resize(n);
    for (size_t i = 0; i < n; ++i) {
      correction.s[i] = candidate[i] - result.x[i];
      correction.y[i] = candidate_gradient[i] - gradient[i];
    }
    const double curvature = Dot(correction.s, correction.y);
    if (curvature > 1e-12) {
      correction.rho = 1.0 / curvature;
      history.push_back(std::move(correction));
      if (static_cast<int>(history.size()) > options.history_size) {
        history.pop_front();
      }
    }

    const double improvement = result.value - candidate_value;
    result.x.swap(candidate);
    gradient.swap(candidate_gradient);
    result.value = candidate_value;
    result.values.push_back(result.value);
    result.gradient_norm = std::sqrt(Dot(gradient, gradient));
    ++result.iterations;
    if (improvement <
        options.relative_tolerance * std::max(1.0, std::abs(result.value))) {
      result.converged = true;
      break;
    }
  }
  if (result.gradient_norm < options.gradient_tolerance) result.converged = true;
  return result;
}

}  // namespace mtboot
