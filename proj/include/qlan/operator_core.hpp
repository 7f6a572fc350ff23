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

#include <Eigen/Dense>

#include "qlan/constants.hpp"

namespace qlan {

// Throws ValidationError naming the first failed invariant: "square", "hermitian",
// "trace" or "negative eigenvalue".
void validate_density(const CMatrix& m, double tolerance = tol::validation);

// Hermitian, unit trace, positive semidefinite.
class DensityMatrix {
public:
    DensityMatrix() = default;
    explicit DensityMatrix(CMatrix m, double tolerance = tol::validation);

    const CMatrix& matrix() const { return m_; }
    Eigen::Index dim() const { return m_.rows(); }

private:
    CMatrix m_;
};

// Qubit state in the Pauli basis, rho = (I + r.sigma)/2 with |r| <= 1.
class QubitState {
public:
    QubitState() = default;
    explicit QubitState(const Eigen::Vector3d& bloch);

    static QubitState from_matrix(const CMatrix& m);

    const Eigen::Vector3d& bloch() const { return r_; }
    CMatrix to_matrix() const;

private:
    Eigen::Vector3d r_ = Eigen::Vector3d::Zero();
};

CMatrix pauli_x();
CMatrix pauli_y();
CMatrix pauli_z();

// Eigenvalues of the Hermitian part of m, ascending.
RVector hermitian_eigenvalues(const CMatrix& m);

// Trace norm of a Hermitian matrix.
double trace_norm(const CMatrix& m);

// ||a - b||_1, the sum of absolute eigenvalues of the difference.
double trace_norm_distance(const CMatrix& a, const CMatrix& b);

// Principal square root of a positive semidefinite matrix.
CMatrix psd_sqrt(const CMatrix& m);

// Tr sqrt(sqrt(a) b sqrt(a)). Both inputs are validated as density matrices.
double fidelity(const CMatrix& a, const CMatrix& b);

}  // namespace qlan
