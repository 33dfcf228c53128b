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

#ifndef MTBOOT_OPTIMIZER_H_
#define MTBOOT_OPTIMIZER_H_

#include <functional>
#include <span>
#include <vector>

namespace mtboot {

// Returns f(x) and writes the gradient into `gradient` (same size as x).
using DifferentiableFunction =
    std::function<double(std::span<const double> x, std::span<double> gradient)>;

struct OptimizerOptions {
  int max_iterations = 200;
  // Stop once the gradient's Euclidean norm falls below this.
  double gradient_tolerance = 1e-5;
  // Stop once an accepted step improves f by less than this, relative to
  // max(1, |f|).
  double relative_tolerance = 1e-10;
  int history_size = 10;
  int max_line_search_steps = 50;
};

struct OptimizerResult {
  std::vector<double> x;
  double value = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  // f at the start and after every accepted step.
  std::vector<double> values;
};

// Limited-memory BFGS with a backtracking Armijo line search. Every accepted
// step strictly decreases f. Falls back to steepest descent whenever the
// quasi-Newton direction is not a descent direction.
OptimizerResult MinimizeLbfgs(const DifferentiableFunction& function,
                              std::vector<double> x0,
                              const OptimizerOptions& options = {});

}  // namespace mtboot

#endif  // MTBOOT_OPTIMIZER_H_
