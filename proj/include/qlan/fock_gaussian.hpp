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

#include "qlan/constants.hpp"
#include "qlan/rng.hpp"
#include "qlan/spin_blocks.hpp"

namespace qlan {

// Density operator on span{|0>, ..., |dim-1>}; tail is the trace lost to truncation.
struct FockDensity {
    CMatrix m;
    double tail = 0.0;
};

// (1 - p) sum_k p^k |k><k|, 0 <= p < 1.
FockDensity thermal_state(double p, int dim);

// Truncated e^{-|z|^2/2} sum_k z^k / sqrt(k!) |k>.
CVector coherent_vector(cplx z, int dim);

// D(beta)|k> truncated to dim, for k = 0..count-1, as columns.
CMatrix displaced_number_states(cplx beta, int count, int dim);

// beta = sqrt(2 mu - 1) (-u_y + i u_x).
cplx displacement_amplitude(double mu, const LocalParam& u);

double thermal_ratio(double mu);

// D(beta) phi D(beta)^*, the quantum part of the limit experiment. Throws when more
// than tol::fock_budget of the trace falls outside dim.
FockDensity displaced_thermal(double mu, const LocalParam& u, int dim);

// Same state as a Gaussian mixture of coherent projectors, by Gauss-Hermite quadrature.
// Exact for order >= dim.
FockDensity displaced_thermal_quadrature(double mu, const LocalParam& u, int dim, int order);

// 40 for |u| <= 2, otherwise ceil(10 + 4 |beta|^2); grown until the truncation loss fits.
int auto_fock_dim(double mu, const LocalParam& u);

struct GaussHermite {
    std::vector<double> nodes;
    std::vector<double> weights;  // for the weight exp(-x^2)
};
GaussHermite gauss_hermite(int order);

// <z|rho|z> / pi.
double q_function(const CMatrix& rho, cplx z);

// Rejection sampler for the heterodyne outcome distribution of rho.
class HeterodyneSampler {
public:
    explicit HeterodyneSampler(const CMatrix& rho);

    cplx sample(Rng& rng) const;
    double acceptance_rate() const { return 1.0 / bound_; }
    cplx mean() const { return mean_; }

private:
    double envelope(cplx z) const;

    CMatrix rho_;
    cplx mean_;
    double sigma2_ = 0.0;
    double bound_ = 1.0;
};

cplx sample_heterodyne(const CMatrix& rho, Rng& rng);

// V_j : |j, m> -> |j - m>, as a dim x (2j + 1) matrix.
CMatrix embed_isometry(std::int64_t twice_j, int dim);

// V_j V_j^*.
CMatrix block_projector(std::int64_t twice_j, int dim);

}  // namespace qlan
