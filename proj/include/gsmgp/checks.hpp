/*
 * Copyright 2026 the gsmgp authors
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

#include <string>
#include <vector>

namespace gsmgp {

// One verified property: `passed` iff residual <= threshold.
struct CheckResult {
  std::string name;
  bool passed = false;
  double residual = 0.0;
  double threshold = 0.0;
};

// Named verification suites with fixed seeds:
//   psd        eigenvalue floors of random Gram matrices
//   fourier    closed forms against numerical quadrature
//   gradient   analytic gradients against central finite differences
//   kronecker  grid backend against the dense backend
//   reduction  stationary special cases of the non-stationary kernel
std::vector<std::string> check_suite_names();
std::vector<CheckResult> run_check_suite(const std::string& suite);

}  // namespace gsmgp
