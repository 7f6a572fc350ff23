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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "qlan/errors.hpp"
#include "qlan/operator_core.hpp"

namespace qlan {
namespace {

CMatrix diag2(double a, double b) {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

CMatrix random_density(std::mt19937_64& gen, int dim) {
    std::normal_distribution<double> nd;
    CMatrix g(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) g(i, j) = cplx(nd(gen), nd(gen));
    }
    CMatrix r = g * g.adjoint();
    return r / r.trace().real();
}

Eigen::Vector3d random_bloch(std::mt19937_64& gen) {
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud;
    Eigen::Vector3d v(nd(gen), nd(gen), nd(gen));
    return v.normalized() * std::cbrt(ud(gen));
}

std::string failure_of(const CMatrix& m, double tol) {
    try {
        validate_density(m, tol);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "";
}

TEST(TraceNorm, Examples) {
    EXPECT_NEAR(trace_norm_distance(diag2(0.75, 0.25), diag2(0.75, 0.25)), 0.0, 1e-15);
    EXPECT_NEAR(trace_norm_distance(diag2(0.75, 0.25), diag2(0.8, 0.2)), 0.10, 1e-12);
    const CMatrix a = QubitState(Eigen::Vector3d(1, 0, 0)).to_matrix();
    const CMatrix b = QubitState(Eigen::Vector3d(0, 1, 0)).to_matrix();
    EXPECT_NEAR(trace_norm_distance(a, b), std::sqrt(2.0), 1e-12);
}

TEST(TraceNorm, DimensionMismatchThrows) {
    EXPECT_THROW(trace_norm_distance(diag2(0.5, 0.5), CMatrix::Identity(3, 3) / 3.0),
                 ValidationError);
}

TEST(TraceNorm, TriangleInequality) {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 200; ++trial) {
        const int d = 2 + trial % 4;
        const CMatrix a = random_density(gen, d), b = random_density(gen, d),
                      c = random_density(gen, d);
        EXPECT_LE(trace_norm_distance(a, c),
                  trace_norm_distance(a, b) + trace_norm_distance(b, c) + 1e-9);
        EXPECT_NEAR(trace_norm_distance(a, b), trace_norm_distance(b, a), 1e-12);
        EXPECT_LE(trace_norm_distance(a, b), 2.0 + 1e-12);
    }
}

TEST(TraceNorm, QubitEqualsBlochDistance) {
    std::mt19937_64 gen(12);
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Vector3d r = random_bloch(gen), s = random_bloch(gen);
        EXPECT_NEAR(trace_norm_distance(QubitState(r).to_matrix(), QubitState(s).to_matrix()),
                    (r - s).norm(), 1e-10);
    }
}

TEST(Fidelity, Examples) {
    EXPECT_NEAR(fidelity(diag2(0.75, 0.25), diag2(0.75, 0.25)), 1.0, 1e-10);
    EXPECT_NEAR(fidelity(diag2(1, 0), diag2(0, 1)), 0.0, 1e-10);
    EXPECT_NEAR(fidelity(diag2(0.75, 0.25), diag2(0.5, 0.5)),
                std::sqrt(0.375) + std::sqrt(0.125), 1e-10);
}

TEST(Fidelity, RejectsNonPositiveInput) {
    EXPECT_THROW(fidelity(diag2(1.5, -0.5), diag2(0.5, 0.5)), ValidationError);
    EXPECT_THROW(fidelity(diag2(0.5, 0.5), diag2(1.5, -0.5)), ValidationError);
}

TEST(Fidelity, SymmetricAndFuchsVanDeGraaf) {
    std::mt19937_64 gen(13);
    for (int trial = 0; trial < 300; ++trial) {
        const CMatrix a = QubitState(random_bloch(gen)).to_matrix();
        const CMatrix b = QubitState(random_bloch(gen)).to_matrix();
        const double f = fidelity(a, b);
        const double d = trace_norm_distance(a, b);
        EXPECT_GE(f, -1e-12);
        EXPECT_LE(f, 1.0 + 1e-12);
        EXPECT_NEAR(f, fidelity(b, a), 1e-9);
        EXPECT_LE(f * f + 0.25 * d * d, 1.0 + 1e-9);
    }
}

TEST(ValidateDensity, Examples) {
    EXPECT_NO_THROW(validate_density(CMatrix::Identity(2, 2) / 2.0));
    EXPECT_NE(failure_of(diag2(1.5, -0.5), 1e-10).find("negative eigenvalue"), std::string::npos);
    EXPECT_NE(failure_of(diag2(0.5, 0.5 + 2e-10), 1e-12).find("trace"), std::string::npos);
    CMatrix h = diag2(0.5, 0.5);
    h(0, 1) = 0.1;
    EXPECT_NE(failure_of(h, 1e-10).find("hermitian"), std::string::npos);
    EXPECT_NE(failure_of(CMatrix::Zero(2, 3), 1e-10).find("square"), std::string::npos);
}

TEST(QubitState, RoundTrip) {
    std::mt19937_64 gen(14);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Vector3d r = random_bloch(gen);
        const QubitState q(r);
        EXPECT_LE((QubitState::from_matrix(q.to_matrix()).bloch() - r).norm(), 1e-12);
        EXPECT_NO_THROW(DensityMatrix(q.to_matrix()));
    }
    EXPECT_THROW(QubitState(Eigen::Vector3d(1.0, 0.5, 0.0)), ValidationError);
}

}  // namespace
}  // namespace qlan
