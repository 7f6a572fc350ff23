// Copyright 2026 The qlan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>

#include <Eigen/Dense>

namespace qlan {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// Every numerical tolerance used by validation and by the tests.
namespace tol {
inline constexpr double validation = 1e-10;   // density-matrix checks
inline constexpr double property = 1e-9;      // slack for property tests
inline constexpr double eigen_clip = 1e-10;   // eigenvalues in [-clip, 0] are rounded to zero
inline constexpr double block_skip = 1e-12;   // blocks below this probability are skipped
inline constexpr double pmf_tail = 1e-12;     // mass left outside sampler tables
inline constexpr double fock_budget = 1e-6;   // allowed Fock truncation loss
inline constexpr double lindblad_trace = 1e-6;
inline constexpr double min_acceptance = 1e-3;
}  // namespace tol

inline constexpr double pi = 3.14159265358979323846;

}  // namespace qlan
