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
#include <complex>
#include <vector>

#include <gtest/gtest.h>

#include "qlan/errors.hpp"
#include "qlan/operator_core.hpp"
#include "qlan/qsde.hpp"
#include "qlan/rng.hpp"
#include "qlan/spin_blocks.hpp"

namespace qlan {
namespace {

double binomial(int m, int i) {
    return std::exp(std::lgamma(m + 1.0) - std::lgamma(i + 1.0) - std::lgamma(m - i + 1.0));
}

std::int64_t valid_twice(const ModelParams& p, double j) {
    std::int64_t tj = std::llround(2.0 * j);
    if ((tj - p.n) % 2 != 0) ++tj;
    return tj;
}

CMatrix level_projector(int d, int k) {
    CMatrix r = CMatrix::Zero(d, d);
    r(k, k) = 1.0;
    return r;
}

TEST(CCoefficients, FirstIsOneAndSingleStep) {
    const ModelParams p{0.75, 100};  // j_n = 25
    for (int m : {0, 1, 3, 6}) {
        EXPECT_EQ(c_coefficients(p, 60, m)[0], 1.0);
    }
    const auto c = c_coefficients(p, 50, 1);
    EXPECT_NEAR(c[1], 1.0, 1e-15);
    EXPECT_THROW(c_coefficients(ModelParams{0.75, 100}, 4, 5), ValidationError);
}

TEST(CCoefficients, BoundOnTypicalSet) {
    const double eps = 0.05, eps2 = 0.05;
    const ModelParams p{0.75, 10000};
    const SpinRange js = typical_set(p, eps);
    const double growth = 1.0 + 2.0 / eps2 * std::pow(1e4, -0.5 + eps);
    for (std::int64_t tj : {js.lo_twice, reference_twice_spin(p), js.hi_twice}) {
        for (int m = 0; m <= 6; ++m) {
            const auto c = c_coefficients(p, tj, m);
            for (int i = 0; i <= m; ++i) {
                EXPECT_GT(c[i], 0.0);
                EXPECT_LE(c[i] * c[i], binomial(m, i) * std::pow(growth, i) * (1 + 1e-12))
                    << "2j=" << tj << " m=" << m << " i=" << i;
            }
        }
    }
}

TEST(XiState, Norms) {
    const ModelParams p{0.75, 100};
    for (double t : {0.0, 0.5, 3.0}) {
        EXPECT_NEAR(xi_state(p, 60, 0, t).norm_squared(), 1.0, 1e-15);
        EXPECT_NEAR(xi_state(p, 50, 1, t).norm_squared(), 1.0, 1e-14);
        EXPECT_NEAR(xi_state_oscillator(4, t).norm_squared(), 1.0, 1e-13);
    }
}

TEST(XiState, NormDeviationScalesLikeMOverRootN) {
    // Off-centre block j = j_n + sqrt(n): the deviation is driven by (j - j_n) / j_n.
    for (int m = 1; m <= 4; ++m) {
        for (std::int64_t n : {100, 1000, 10000}) {
            const ModelParams p{0.75, n};
            const double rn = std::sqrt(double(n));
            const std::int64_t tj = valid_twice(p, reference_spin(p) + rn);
            const double dev = std::abs(std::sqrt(xi_state(p, tj, m, 2.0).norm_squared()) - 1.0);
            EXPECT_LE(dev, 2.0 * m / rn) << "n=" << n << " m=" << m;
        }
    }
}

TEST(OscillatorSolution, ExamplesAndResidual) {
    const cplx z(0.7, -0.4);
    const OscillatorSolution s0 = oscillator_solution(z, 0.0);
    EXPECT_EQ(s0.system_amplitude(0.0), z);
    for (double t : {0.0, 0.3, 2.0, 10.0}) {
        const OscillatorSolution s = oscillator_solution(z, t);
        const double field = std::norm(z) * -std::expm1(-t);
        EXPECT_NEAR(std::norm(s.system_amplitude(t)) + field, std::norm(z), 1e-14);
        EXPECT_LE(s.residual(), 1e-12);
        EXPECT_NEAR(std::exp(-std::norm(s.system_amplitude(t))), std::exp(-std::norm(z) * std::exp(-t)),
                    1e-15);
    }
    EXPECT_GT(std::exp(-std::norm(oscillator_solution(z, 30.0).system_amplitude(30.0))), 1 - 1e-9);
}

TEST(Collision, GroundSectorIsInvariant) {
    const ModelParams p{0.75, 10000};
    const JointWaveVector psi = collision_integrate(p, reference_twice_spin(p), 0, 5.0, 500);
    ASSERT_EQ(psi.size(), 1u);
    EXPECT_EQ(psi.amplitude(0), cplx(1.0));
    EXPECT_EQ(psi.system_level(0), 0);
}

TEST(Collision, SingleExcitationDecay) {
    const ModelParams p{0.75, 10000};
    const std::int64_t tj = reference_twice_spin(p) + 100;  // j = j_n + 50, gamma != 1
    const double gamma = double(tj) / (2.0 * reference_spin(p));
    const JointWaveVector psi = collision_integrate(p, tj, 1, 5.0, 2000);
    EXPECT_EQ(psi.system_level(0), 1);
    EXPECT_NEAR(std::abs(psi.amplitude(0)), std::exp(-gamma * 2.5), 1e-3);
    EXPECT_NEAR(psi.norm_squared(), 1.0, 2e-9);
}

TEST(Collision, SectorSizeNormAndMemoryCap) {
    const ModelParams p{0.75, 10000};
    const std::int64_t tj = reference_twice_spin(p);
    const JointWaveVector psi = collision_integrate(p, tj, 2, 5.0, 1000);
    EXPECT_NEAR(double(psi.size()), collision_sector_size(2, 1000), 1e-3);
    EXPECT_NEAR(psi.norm_squared(), 1.0, 1e-9);
    for (std::size_t e = 0; e < psi.size(); e += 997) {
        EXPECT_EQ(psi.system_level(e) + int(psi.photons(e).size()), 2);
    }
    EXPECT_THROW(collision_integrate(p, tj, 3, 5.0, 1000, 1000), ComputationError);
}

TEST(Collision, TrotterDeficitHalves) {
    // The oscillator makes xi exact, so ||psi - xi|| is pure discretization error. The overlap
    // deficit is quadratic in that distance and drops fourfold.
    auto run = [](int steps) {
        return collision_integrate(oscillator_couplings(2), 1, 5.0, steps);
    };
    const XiState xi = xi_state_oscillator(1, 5.0);
    const JointWaveVector a = run(250), b = run(500), c = run(1000);
    EXPECT_NEAR(xi_distance(a, xi) / xi_distance(b, xi), 2.0, 0.4);
    EXPECT_NEAR(xi_distance(b, xi) / xi_distance(c, xi), 2.0, 0.4);
    const double oa = 1.0 - std::abs(a.overlap(xi)), ob = 1.0 - std::abs(b.overlap(xi));
    EXPECT_NEAR(oa / ob, 4.0, 0.8);
}

TEST(Lindblad, GroundStateAndDecay) {
    const ModelParams p{0.75, 10000};
    const std::int64_t tj = reference_twice_spin(p) + 100;
    const LindbladResult g = lindblad_reduce(p, tj, level_projector(3, 0), 4.0, 1e-2);
    EXPECT_LE((g.rho - level_projector(3, 0)).cwiseAbs().maxCoeff(), 1e-15);
    const double gamma = double(tj) / (2.0 * reference_spin(p));
    const LindbladResult r = lindblad_reduce(p, tj, level_projector(2, 1), 3.0, 1e-3);
    EXPECT_NEAR(r.rho(1, 1).real(), std::exp(-gamma * 3.0), 1e-6);
    EXPECT_LE(r.trace_drift, 1e-9);
    EXPECT_GE(r.min_eigenvalue, -1e-12);
}

TEST(Lindblad, MatchesCollisionReduction) {
    const ModelParams p{0.75, 10000};
    const std::int64_t tj = reference_twice_spin(p) + 100;
    for (int m : {1, 2}) {
        const JointWaveVector psi = collision_integrate(p, tj, m, 5.0, 2000);
        const auto pops = psi.system_populations();
        const CMatrix rho = lindblad_reduce(p, tj, level_projector(m + 1, m), 5.0, 1e-3).rho;
        CMatrix sys = CMatrix::Zero(m + 1, m + 1);
        for (int k = 0; k <= m; ++k) sys(k, k) = pops[k];
        EXPECT_LE(trace_norm_distance(sys, rho), 1e-3) << "m=" << m;
    }
}

TEST(XiErrorBound, Examples) {
    const double eps = 0.01, eps2 = 0.05;
    EXPECT_EQ(xi_error_bound(10000, 0, eps, eps2, 1.4), 0.0);
    for (std::int64_t n : {100, 10000, 1000000}) {
        for (int m = 0; m < 8; ++m) {
            EXPECT_LE(xi_error_bound(n, m, eps, eps2, 1.4), xi_error_bound(n, m + 1, eps, eps2, 1.4));
        }
    }
    const double ratio = xi_error_bound(400000000, 2, eps, eps2, 1.0) /
                         xi_error_bound(100000000, 2, eps, eps2, 1.0);
    EXPECT_NEAR(ratio, std::pow(2.0, -1.0 + 2 * eps), 2e-3);
}

TEST(XiErrorBound, CalibratedConstantDominates) {
    const double eps = 0.05, eps2 = 0.05;
    const ModelParams p{0.75, 10000};
    for (int m : {1, 2}) {
        const JointWaveVector osc = collision_integrate(oscillator_couplings(m + 1), m, 5.0, 300);
        const XiState xo = xi_state_oscillator(m, 5.0);
        for (double shift : {-100.0, 0.0, 100.0}) {
            const std::int64_t tj = valid_twice(p, reference_spin(p) + shift);
            const JointWaveVector psi = collision_integrate(p, tj, m, 5.0, 300);
            const double d = residual_difference(psi, xi_state(p, tj, m, 5.0), osc, xo);
            EXPECT_LE(d, xi_error_bound(p.n, m, eps, eps2, xi_bound_constant))
                << "m=" << m << " shift=" << shift;
        }
    }
}

TEST(XiReducedState, ApproachesLindbladWithN) {
    // Corner of the block state near j_n, compared at t = ln n.
    std::vector<double> dist;
    for (std::int64_t n : {100, 1000, 10000}) {
        const ModelParams p{0.75, n};
        const std::int64_t tj = reference_twice_spin(p);
        const BlockCorner corner = block_state_corner(p, LocalParam(1, 1, 1), tj, 8);
        const CMatrix rho0 = corner.m / corner.m.trace().real();
        const double t = std::log(double(n));
        const CMatrix a = xi_reduced_state(p, tj, rho0, t);
        const CMatrix b = lindblad_reduce(p, tj, rho0, t, 1e-3).rho;
        dist.push_back(trace_norm_distance(a, b));
    }
    EXPECT_GT(dist[0], dist[1]);
    EXPECT_GT(dist[1], dist[2]);
}

TEST(EnergyMeasurement, Moments) {
    Rng rng(11);
    const std::int64_t n = 400, tj = 200;
    const double t = 2.0, mean = 0.5 * tj / 20.0, var = 1.0 / (4.0 * t);
    const int draws = 100000;
    double s = 0, s2 = 0;
    for (int i = 0; i < draws; ++i) {
        const double y = energy_measurement_sample(n, tj, t, rng);
        s += y;
        s2 += y * y;
    }
    const double m = s / draws, v = s2 / draws - m * m;
    EXPECT_NEAR(m, mean, 3.0 * std::sqrt(var / draws));
    EXPECT_NEAR(v, var, 3.0 * var * std::sqrt(2.0 / draws));
    Rng r2(12);
    EXPECT_NEAR(energy_measurement_sample(n, tj, 1e12, r2), mean, 1e-5);
    EXPECT_THROW(energy_measurement_sample(n, tj, 0.0, r2), ValidationError);
}

TEST(QsdeCheck, RowsAndReferenceSurvival) {
    const auto rows = qsde_check(0.75, {2500, 10000}, {1, 2}, 5.0, 400, 0.05, 0.05);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_NEAR(rows[1].survival, rows[1].survival_ref, 3e-3);
    EXPECT_TRUE(std::isnan(rows[2].survival_ref));
    // At j = j_n the single-excitation coupling is exactly the oscillator one.
    EXPECT_LE(rows[0].deficit, 1e-12);
    EXPECT_LT(rows[3].deficit, rows[2].deficit);
    EXPECT_EQ(rows[2].slope, rows[3].slope);
    EXPECT_LT(rows[2].slope, -0.4);
    EXPECT_THROW(qsde_check(0.75, {}, {1}, 5.0, 100, 0.05, 0.05), ValidationError);
}

}  // namespace
}  // namespace qlan
