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

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qlan/constants.hpp"
#include "qlan/rng.hpp"

namespace qlan {

// Reference state diag(mu, 1 - mu) and sample size n.
struct ModelParams {
    double mu = 0.75;
    std::int64_t n = 1;
};

void validate_params(const ModelParams& p);

using LocalParam = Eigen::Vector3d;  // (u_x, u_y, u_z)

// Spin labels are stored as twice_j = 2j so half-integers stay exact.
bool is_valid_spin(std::int64_t n, std::int64_t twice_j);
std::int64_t min_twice_spin(std::int64_t n);

// Exact n_j. Throws ComputationError when the value does not fit in 64 bits.
std::uint64_t multiplicity(std::int64_t n, std::int64_t twice_j);
double log_multiplicity(std::int64_t n, std::int64_t twice_j);

// mu + u_z / sqrt(n); block quantities need it inside (1/2, 1).
double local_mu(const ModelParams& p, const LocalParam& u);

double log_block_probability(const ModelParams& p, const LocalParam& u, std::int64_t twice_j);
double block_probability(const ModelParams& p, const LocalParam& u, std::int64_t twice_j);

// Same quantity written as a binomial weight times a correction factor.
double block_probability_factored(const ModelParams& p, const LocalParam& u,
                                  std::int64_t twice_j);

struct SpinMatrices {
    CMatrix x;
    CMatrix y;
    CMatrix z;
};

// Basis index k = j - m, so k = 0 is the highest weight vector.
SpinMatrices spin_matrices(std::int64_t twice_j);

// exp(2i (v_x J_x + v_y J_y)) on the spin-j irrep.
CMatrix rotation_unitary(std::int64_t twice_j, double vx, double vy);

// Normalized block state rho^u_{j,n} of dimension 2j + 1.
CMatrix block_state(const ModelParams& p, const LocalParam& u, std::int64_t twice_j);

// Top-left levels x levels corner of the block state, for blocks too large to store densely.
// The populations of basis states k >= levels are dropped and reported as tail.
struct BlockCorner {
    CMatrix m;
    double tail = 0.0;
};
BlockCorner block_state_corner(const ModelParams& p, const LocalParam& u, std::int64_t twice_j,
                               int levels);

// U(v) diag(mu + v_z, 1 - mu - v_z) U(v)^* with U(v) = exp(i (v_x sigma_x + v_y sigma_y)).
CMatrix local_qubit_state(double mu, const Eigen::Vector3d& v);

// Inverse-CDF sampler for the block index under p_{n,u}.
class BlockIndexSampler {
public:
    BlockIndexSampler(const ModelParams& p, const LocalParam& u);

    std::int64_t sample(Rng& rng) const;

    const std::vector<std::int64_t>& support() const { return twice_j_; }
    const std::vector<double>& pmf() const { return pmf_; }
    double tail() const { return tail_; }

private:
    std::vector<std::int64_t> twice_j_;
    std::vector<double> pmf_;
    std::vector<double> cdf_;
    double tail_ = 0.0;
};

// Blocks with |j - (mu - 1/2) n| <= n^{1/2 + eps}, as an inclusive range of twice_j.
struct SpinRange {
    std::int64_t lo_twice = 0;
    std::int64_t hi_twice = 0;
};
SpinRange typical_set(const ModelParams& p, double eps);

}  // namespace qlan
