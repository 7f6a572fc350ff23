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

#include "qlan/operator_core.hpp"

#include <cmath>
#include <sstream>

#include "qlan/errors.hpp"

namespace qlan {

namespace {

CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace

void validate_density(const CMatrix& m, double tolerance) {
    if (m.rows() == 0 || m.rows() != m.cols()) {
        throw ValidationError("density matrix invariant failed: square (got " +
                              std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ")");
    }
    const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (asym > tolerance) {
        std::ostringstream os;
        os << "density matrix invariant failed: hermitian (max |m - m^*| = " << asym << ")";
        throw ValidationError(os.str());
    }
    const cplx tr = m.trace();
    if (std::abs(tr.real() - 1.0) > tolerance || std::abs(tr.imag()) > tolerance) {
        std::ostringstream os;
        os.precision(17);
        os << "density matrix invariant failed: trace (Tr = " << tr.real() << ")";
        throw ValidationError(os.str());
    }
    const double lo = hermitian_eigenvalues(m).minCoeff();
    if (lo < -tolerance) {
        std::ostringstream os;
        os << "density matrix invariant failed: negative eigenvalue (" << lo << ")";
        throw ValidationError(os.str());
    }
}

DensityMatrix::DensityMatrix(CMatrix m, double tolerance) : m_(std::move(m)) {
    validate_density(m_, tolerance);
}

QubitState::QubitState(const Eigen::Vector3d& bloch) : r_(bloch) {
    if (!r_.allFinite() || r_.norm() > 1.0 + tol::validation) {
        throw ValidationError("Bloch vector must satisfy |r| <= 1");
    }
}

QubitState QubitState::from_matrix(const CMatrix& m) {
    if (m.rows() != 2 || m.cols() != 2) {
        throw ValidationError("qubit state needs a 2x2 matrix");
    }
    validate_density(m);
    Eigen::Vector3d r;
    r << 2.0 * m(1, 0).real(), 2.0 * m(1, 0).imag(), (m(0, 0) - m(1, 1)).real();
    return QubitState(r);
}

CMatrix QubitState::to_matrix() const {
    CMatrix m(2, 2);
    m(0, 0) = 0.5 * (1.0 + r_.z());
    m(1, 1) = 0.5 * (1.0 - r_.z());
    m(0, 1) = 0.5 * cplx(r_.x(), -r_.y());
    m(1, 0) = 0.5 * cplx(r_.x(), r_.y());
    return m;
}

CMatrix pauli_x() {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
    return m;
}

CMatrix pauli_y() {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 1) = cplx(0.0, -1.0);
    m(1, 0) = cplx(0.0, 1.0);
    return m;
}

CMatrix pauli_z() {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return m;
}

RVector hermitian_eigenvalues(const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(m), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw ComputationError("Hermitian eigensolver did not converge");
    }
    return solver.eigenvalues();
}

double trace_norm(const CMatrix& m) {
    if (m.rows() != m.cols()) {
        throw ValidationError("trace norm needs a square matrix");
    }
    if (m.rows() == 0) {
        return 0.0;
    }
    return hermitian_eigenvalues(m).cwiseAbs().sum();
}

double trace_norm_distance(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ValidationError("trace distance: dimension mismatch (" + std::to_string(a.rows()) +
                              " vs " + std::to_string(b.rows()) + ")");
    }
    return trace_norm(a - b);
}

CMatrix psd_sqrt(const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(m));
    if (solver.info() != Eigen::Success) {
        throw ComputationError("Hermitian eigensolver did not converge");
    }
    RVector ev = solver.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) < -tol::eigen_clip) {
            throw ValidationError("square root of a matrix with negative eigenvalue");
        }
        ev(i) = std::sqrt(std::max(ev(i), 0.0));
    }
    const CMatrix& v = solver.eigenvectors();
    return v * ev.cast<cplx>().asDiagonal() * v.adjoint();
}

double fidelity(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ValidationError("fidelity: dimension mismatch (" + std::to_string(a.rows()) + " vs " +
                              std::to_string(b.rows()) + ")");
    }
    validate_density(a);
    validate_density(b);
    const CMatrix sa = psd_sqrt(a);
    const RVector ev = hermitian_eigenvalues(sa * b * sa);
    double f = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) < -tol::eigen_clip) {
            throw ComputationError("fidelity: sqrt(a) b sqrt(a) has a negative eigenvalue");
        }
        f += std::sqrt(std::max(ev(i), 0.0));
    }
    return f;
}

}  // namespace qlan
