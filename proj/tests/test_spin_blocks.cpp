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
#include <map>
#include <random>

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "oracle.hpp"
#include "qlan/errors.hpp"
#include "qlan/operator_core.hpp"
#include "qlan/spin_blocks.hpp"
#include "stats.hpp"

namespace qlan {
namespace {

TEST(Multiplicity, Examples) {
    EXPECT_EQ(multiplicity(2, 2), 1u);
    EXPECT_EQ(multiplicity(2, 0), 1u);
    EXPECT_EQ(multiplicity(4, 2), 3u);
    EXPECT_THROW(multiplicity(4, 1), ValidationError);
    EXPECT_THROW(multiplicity(4, 6), ValidationError);
}

TEST(Multiplicity, DimensionCount) {
    for (std::int64_t n = 1; n <= 40; ++n) {
        long double total = 0;
        for (std::int64_t tj = min_twice_spin(n); tj <= n; tj += 2) {
            total += (long double)multiplicity(n, tj) * (long double)(tj + 1);
            EXPECT_NEAR(log_multiplicity(n, tj), std::log(double(multiplicity(n, tj))), 1e-9);
        }
        EXPECT_EQ(total, std::ldexp((long double)1, int(n)));
    }
}

TEST(BlockProbability, TwoQubits) {
    const ModelParams p{0.75, 2};
    EXPECT_NEAR(block_probability(p, LocalParam::Zero(), 2), 0.8125, 1e-12);
    EXPECT_NEAR(block_probability(p, LocalParam::Zero(), 0), 0.1875, 1e-12);
}

TEST(BlockProbability, Normalized) {
    for (std::int64_t n : {2, 3, 10, 51}) {
        for (double mu : {0.6, 0.9}) {
            for (double uz : {0.0, 1.0}) {
                const ModelParams p{mu, n};
                const LocalParam u(0.3, -0.2, uz);
                if (!(local_mu(p, u) < 1.0)) continue;
                double s = 0.0;
                for (std::int64_t tj = min_twice_spin(n); tj <= n; tj += 2) {
                    s += block_probability(p, u, tj);
                }
                EXPECT_NEAR(s, 1.0, 1e-9) << "n=" << n << " mu=" << mu << " uz=" << uz;
            }
        }
    }
}

TEST(BlockProbability, PureLimit) {
    const ModelParams p{1.0 - 1e-12, 30};
    EXPECT_NEAR(block_probability(p, LocalParam::Zero(), 30), 1.0, 1e-9);
}

TEST(BlockProbability, OutsideModelThrows) {
    const ModelParams p{0.8, 20};
    EXPECT_THROW(block_probability(p, LocalParam(0, 0, 1), 20), OutsideModelError);
    EXPECT_THROW(block_probability(ModelParams{0.5, 20}, LocalParam::Zero(), 20),
                 ValidationError);
}

TEST(BlockProbability, FactoredFormAgreesOnTypicalSet) {
    for (std::int64_t n : {100, 1000, 10000}) {
        const ModelParams p{0.7, n};
        const LocalParam u(0.5, 0.5, 0.8);
        const SpinRange r = typical_set(p, 0.1);
        for (std::int64_t tj = r.lo_twice; tj <= r.hi_twice; tj += 2) {
            const double a = block_probability(p, u, tj);
            const double b = block_probability_factored(p, u, tj);
            if (a > 1e-300) {
                EXPECT_NEAR(b / a, 1.0, 1e-9) << "n=" << n << " 2j=" << tj;
            }
        }
    }
}

TEST(BlockState, TwoQubitTriplet) {
    const CMatrix s = block_state(ModelParams{0.75, 2}, LocalParam::Zero(), 2);
    EXPECT_NEAR(s(0, 0).real(), 9.0 / 13.0, 1e-12);
    EXPECT_NEAR(s(1, 1).real(), 3.0 / 13.0, 1e-12);
    EXPECT_NEAR(s(2, 2).real(), 1.0 / 13.0, 1e-12);
}

TEST(BlockState, RotationPreservesSpectrumAndTrace) {
    const ModelParams p{0.7, 40};
    for (std::int64_t tj : {4, 10, 20}) {
        const RVector e0 = hermitian_eigenvalues(block_state(p, LocalParam(0, 0, 0.5), tj));
        const CMatrix s = block_state(p, LocalParam(1.3, -0.7, 0.5), tj);
        EXPECT_NEAR(s.trace().real(), 1.0, 1e-12);
        EXPECT_LE((hermitian_eigenvalues(s) - e0).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(BlockState, RotationCovariance) {
    const ModelParams p{0.75, 50};
    const LocalParam u(0.9, -1.1, 0.4);
    const double s = std::sqrt(50.0);
    for (std::int64_t tj : {2, 8, 16}) {
        const CMatrix w = rotation_unitary(tj, u.x() / s, u.y() / s);
        const CMatrix base = block_state(p, LocalParam(0, 0, u.z()), tj);
        const CMatrix direct = block_state(p, u, tj);
        EXPECT_LE((w * base * w.adjoint() - direct).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(BlockState, CornerMatchesFullBlock) {
    const ModelParams p{0.8, 200};
    const LocalParam u(1, 1, 1);
    const CMatrix full = block_state(p, u, 120);
    const BlockCorner c = block_state_corner(p, u, 120, 30);
    EXPECT_LE((full.topLeftCorner(30, 30) - c.m).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(c.tail, 1.0 - full.topLeftCorner(30, 30).trace().real(), 1e-12);
}

TEST(SpinMatrices, SpinHalfAndSpinOne) {
    const SpinMatrices h = spin_matrices(1);
    EXPECT_LE((h.x - 0.5 * pauli_x()).norm(), 1e-15);
    EXPECT_LE((h.y - 0.5 * pauli_y()).norm(), 1e-15);
    EXPECT_LE((h.z - 0.5 * pauli_z()).norm(), 1e-15);
    const SpinMatrices one = spin_matrices(2);
    EXPECT_NEAR(one.z(0, 0).real(), 1.0, 1e-15);
    EXPECT_NEAR(one.z(1, 1).real(), 0.0, 1e-15);
    EXPECT_NEAR(one.z(2, 2).real(), -1.0, 1e-15);
}

TEST(SpinMatrices, CommutatorAndCasimir) {
    for (std::int64_t tj = 0; tj <= 20; ++tj) {
        const SpinMatrices s = spin_matrices(tj);
        const double j = 0.5 * double(tj);
        const CMatrix comm = s.x * s.y - s.y * s.x;
        EXPECT_LE((comm - cplx(0, 1) * s.z).cwiseAbs().maxCoeff(), 1e-12);
        const CMatrix cas = s.x * s.x + s.y * s.y + s.z * s.z;
        EXPECT_LE((cas - j * (j + 1) * CMatrix::Identity(tj + 1, tj + 1)).cwiseAbs().maxCoeff(),
                  1e-12);
    }
}

TEST(RotationUnitary, Examples) {
    EXPECT_LE((rotation_unitary(6, 0, 0) - CMatrix::Identity(7, 7)).norm(), 1e-14);
    EXPECT_LE((rotation_unitary(1, qlan::pi / 2, 0) - cplx(0, 1) * pauli_x()).norm(), 1e-12);
    std::mt19937_64 gen(3);
    std::normal_distribution<double> nd;
    for (std::int64_t tj = 1; tj <= 10; ++tj) {
        const CMatrix w = rotation_unitary(tj, nd(gen), nd(gen));
        EXPECT_LE((w * w.adjoint() - CMatrix::Identity(tj + 1, tj + 1)).cwiseAbs().maxCoeff(),
                  1e-12);
    }
}

TEST(LocalQubitState, Examples) {
    const CMatrix d = local_qubit_state(0.75, Eigen::Vector3d::Zero());
    EXPECT_NEAR(d(0, 0).real(), 0.75, 1e-15);
    EXPECT_NEAR(d(1, 1).real(), 0.25, 1e-15);

    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> ud(-0.2, 0.2);
    for (int k = 0; k < 50; ++k) {
        const Eigen::Vector3d v(ud(gen) * 5, ud(gen) * 5, ud(gen));
        const RVector e = hermitian_eigenvalues(local_qubit_state(0.7, v));
        EXPECT_NEAR(e(1), std::max(0.7 + v.z(), 0.3 - v.z()), 1e-12);
        EXPECT_NEAR(e(0), std::min(0.7 + v.z(), 0.3 - v.z()), 1e-12);
    }

    // independent matrix exponential
    const CMatrix gen_x = cplx(0, 0.1) * pauli_x();
    const CMatrix u = gen_x.exp();
    CMatrix base = CMatrix::Zero(2, 2);
    base(0, 0) = 0.75;
    base(1, 1) = 0.25;
    const CMatrix ref = u * base * u.adjoint();
    EXPECT_LE((local_qubit_state(0.75, Eigen::Vector3d(0.1, 0, 0)) - ref).cwiseAbs().maxCoeff(),
              1e-12);
    EXPECT_THROW(local_qubit_state(0.75, Eigen::Vector3d(0, 0, 0.3)), OutsideModelError);
}

TEST(BlockSampler, PureLimitAlwaysTop) {
    BlockIndexSampler s(ModelParams{1.0 - 1e-13, 40}, LocalParam::Zero());
    Rng rng(5);
    for (int k = 0; k < 1000; ++k) EXPECT_EQ(s.sample(rng), 40);
}

TEST(BlockSampler, ChiSquareGoodnessOfFit) {
    const ModelParams p{0.75, 100};
    BlockIndexSampler s(p, LocalParam::Zero());
    Rng rng(6);
    std::map<std::int64_t, double> counts;
    const int draws = 100000;
    for (int k = 0; k < draws; ++k) counts[s.sample(rng)] += 1.0;
    // pool cells with expected count below 5 into one
    double chi2 = 0.0, pooled_obs = 0.0, pooled_exp = 0.0;
    int cells = 0;
    for (std::int64_t tj = min_twice_spin(100); tj <= 100; tj += 2) {
        const double e = draws * block_probability(p, LocalParam::Zero(), tj);
        const double o = counts.count(tj) ? counts[tj] : 0.0;
        if (e < 5.0) {
            pooled_obs += o;
            pooled_exp += e;
            continue;
        }
        chi2 += (o - e) * (o - e) / e;
        ++cells;
    }
    if (pooled_exp > 0.0) {
        chi2 += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
        ++cells;
    }
    EXPECT_GT(stats::chi_square_pvalue(chi2, cells - 1), 1e-3);
}

TEST(BlockSampler, CentredStatisticMoments) {
    const ModelParams p{0.75, 10000};
    const LocalParam u(0, 0, 1);
    BlockIndexSampler s(p, u);
    Rng rng(7);
    std::vector<double> g;
    const double sn = std::sqrt(double(p.n));
    for (int k = 0; k < 100000; ++k) {
        g.push_back(0.5 * double(s.sample(rng)) / sn - sn * (p.mu - 0.5));
    }
    double exact = 0.0;
    for (std::size_t i = 0; i < s.support().size(); ++i) {
        exact += s.pmf()[i] * (0.5 * double(s.support()[i]) / sn - sn * (p.mu - 0.5));
    }
    const double var = stats::variance(g);
    EXPECT_NEAR(stats::mean(g), exact, 3.0 * std::sqrt(var / double(g.size())));
    // the limit mean u_z is reached up to an O(1/sqrt n) shift
    EXPECT_NEAR(exact, 1.0, 1.0 / sn);
    EXPECT_NEAR(var, 0.75 * 0.25, 0.02);
}

TEST(TypicalSet, Examples) {
    const SpinRange r = typical_set(ModelParams{0.75, 100}, 0.1);
    EXPECT_EQ(r.lo_twice, 20);
    EXPECT_EQ(r.hi_twice, 80);
    const SpinRange full = typical_set(ModelParams{0.6, 5}, 0.2);
    EXPECT_EQ(full.lo_twice, 1);
    EXPECT_EQ(full.hi_twice, 5);
}

TEST(TypicalSet, CarriesTheMass) {
    const double eps = 0.1;
    for (std::int64_t n : {100, 400, 1600}) {
        const ModelParams p{0.75, n};
        const SpinRange r = typical_set(p, eps);
        double mass = 0.0;
        for (std::int64_t tj = r.lo_twice; tj <= r.hi_twice; tj += 2) {
            mass += block_probability(p, LocalParam(1, 1, 1), tj);
        }
        EXPECT_GE(mass, 1.0 - std::pow(double(n), -0.5 + eps)) << "n=" << n;
    }
}

TEST(Oracle, TensorPowerDecomposition) {
    const std::vector<std::pair<double, LocalParam>> cases{
        {0.75, LocalParam::Zero()},
        {0.6, LocalParam(0.4, -0.3, 0.1)},
        {0.9, LocalParam(-0.8, 0.5, -0.3)}};
    for (int n = 1; n <= 8; ++n) {
        for (const auto& [mu, u] : cases) {
            const oracle::BlockCheck c = oracle::check_blocks(ModelParams{mu, n}, u);
            EXPECT_LE(c.max_probability_error, 1e-10) << "n=" << n << " mu=" << mu;
            EXPECT_LE(c.max_block_error, 1e-8) << "n=" << n << " mu=" << mu;
            EXPECT_LE(c.reconstruction_error, 1e-8) << "n=" << n << " mu=" << mu;
        }
    }
}

}  // namespace
}  // namespace qlan
