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

#include <array>
#include <cstdint>
#include <map>
#include <memory>

#include <Eigen/Dense>

#include "qlan/fock_gaussian.hpp"
#include "qlan/operator_core.hpp"
#include "qlan/rng.hpp"
#include "qlan/spin_blocks.hpp"

namespace qlan {

enum class SamplerMode { gaussian, exact };

struct EstimatorConfig {
    double kappa = 0.05;  // stage 1 uses ceil(n^{1 - kappa}) qubits
    double eps = 0.05;
    double eta = 0.08;    // truncation at 3 n^eta
    double t = 0.0;       // interaction time; 0 means ln n
    double t_energy = 0.0;  // energy measurement time; 0 means n
    int fock_dim = 0;     // 0 means auto_fock_dim
    SamplerMode sampler = SamplerMode::gaussian;
    bool truncate = true;
    double eps2 = 0.05;   // mu - 1/2 below this is outside the model
};

// Throws ValidationError naming the violated constraint.
void validate_config(const EstimatorConfig& c);

double interaction_time(const EstimatorConfig& c, std::int64_t n);
double energy_time(const EstimatorConfig& c, std::int64_t n);

std::int64_t stage1_size(std::int64_t n, double kappa);

struct Stage1Result {
    Eigen::Vector3d r_tilde = Eigen::Vector3d::Zero();  // raw averages
    QubitState rho_tilde;                                // projected into the ball
    Eigen::Matrix3d frame = Eigen::Matrix3d::Identity(); // frame * r_hat = e_z
    double mu_tilde = 0.5;
    std::int64_t n_tilde = 0;
};

// Rotation taking the unit vector r to +z; identity for r along +z.
Eigen::Matrix3d frame_rotation(const Eigen::Vector3d& r);

Stage1Result stage1(const QubitState& rho_true, std::int64_t n_tilde, Rng& rng);

// Bloch vector of local_qubit_state(mu, v) without building the matrix.
Eigen::Vector3d local_bloch(double mu, const Eigen::Vector3d& v);

// Local parameter of rho_true around rho_tilde at scale sqrt(n_rest).
LocalParam localize_frame(const QubitState& rho_true, const Stage1Result& s1, std::int64_t n_rest,
                          double eps2 = 0.05);

// Raw stage-2 output: rescaled heterodyne pair and the energy statistic.
struct Stage2Draw {
    double ux = 0.0;
    double uy = 0.0;
    double g = 0.0;
    std::int64_t twice_j = -1;  // exact mode only
};

// Per-(params, u) tables reused across exact-mode draws.
class ExactStage2Cache {
public:
    ExactStage2Cache(const ModelParams& est, const LocalParam& u, int fock_dim);

    const BlockIndexSampler& blocks() const { return blocks_; }
    const HeterodyneSampler& heterodyne(std::int64_t twice_j);

private:
    ModelParams est_;
    LocalParam u_;
    int dim_;
    BlockIndexSampler blocks_;
    std::map<std::int64_t, std::unique_ptr<HeterodyneSampler>> het_;
};

// est carries mu_tilde and the stage-2 sample size. Sampling uses the true mu_u, rescaling
// uses mu_tilde. A cache is required in exact mode.
Stage2Draw stage2_sample(const ModelParams& est, const LocalParam& u, const EstimatorConfig& c,
                         Rng& rng, ExactStage2Cache* cache = nullptr);

struct Truncated {
    LocalParam u_hat = LocalParam::Zero();
    std::array<bool, 3> flags{false, false, false};
};

// u_hat_i = u_tilde_i if |u_tilde_i| <= 3 n^eta, else 0.
Truncated truncate_estimate(const Stage2Draw& raw, double eta, std::int64_t n);

// Estimate in the stage-1 frame mapped back to the lab frame. v_z is clipped so the state
// stays physical.
QubitState reconstruct(const Stage1Result& s1, const LocalParam& u_hat, std::int64_t n_rest);

struct EstimateResult {
    LocalParam u_hat = LocalParam::Zero();
    LocalParam u_true = LocalParam::Zero();  // true state in the same local chart
    QubitState rho_hat;
    Stage1Result stage1;
    Stage2Draw raw;
    std::array<bool, 3> truncated{false, false, false};
    std::int64_t n_rest = 0;
};

// Test hooks: replace stage 1 by an exact rho_tilde and/or zero the stage-2 noise.
struct EstimatorHooks {
    const QubitState* exact_stage1 = nullptr;
    bool zero_noise = false;
};

EstimateResult full_estimate(const QubitState& rho_true, std::int64_t n, const EstimatorConfig& c,
                             Rng& rng, const EstimatorHooks& hooks = {});

}  // namespace qlan
