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

#include <cstddef>
#include <cstdint>
#include <vector>

#include "qlan/constants.hpp"
#include "qlan/rng.hpp"
#include "qlan/spin_blocks.hpp"

namespace qlan {

// j_n = n (mu - 1/2).
double reference_spin(const ModelParams& p);

// a_j |k> = g(k) |k - 1> in the oscillator picture k = j - m, with
// g(k) = sqrt(k) sqrt((2j - k + 1) / (2 j_n)). Entry k of the result is g(k), entry 0 unused.
std::vector<double> block_couplings(const ModelParams& p, std::int64_t twice_j, int levels);

// Plain oscillator couplings g(k) = sqrt(k).
std::vector<double> oscillator_couplings(int levels);

// c_n(m, i), i = 0..m.
std::vector<double> c_coefficients(const ModelParams& p, std::int64_t twice_j, int m);

// Approximate solution started from |m> (oscillator picture):
// sum_i c(m, i) exp(-(m - i) t / 2) |m - i> (x) (e^{-s/2} chi_[0,t])^{(x) i}.
struct XiState {
    int m = 0;
    double t = 0.0;
    std::vector<double> c;

    double alpha(int i) const;
    // Closed form sum_i c_i^2 e^{-(m-i) t} (1 - e^{-t})^i.
    double norm_squared() const;
};

XiState xi_state(const ModelParams& p, std::int64_t twice_j, int m, double t);
XiState xi_state_oscillator(int m, double t);

// Coherent solution for the oscillator started in e(z): system amplitude z e^{-t/2},
// field mode z e^{-s/2} on [0, t].
struct OscillatorSolution {
    cplx z;
    double t = 0.0;

    cplx system_amplitude(double time) const;
    cplx field_mode(double s) const;
    // |d alpha/dt + alpha/2| by a five-point stencil, and the mismatch f(s) - alpha(s).
    double residual() const;
};

OscillatorSolution oscillator_solution(cplx z, double t);

// Collision model: K slots of width t/K, each interacting once with the system through
// exp(sqrt(dt) (a (x) b^* - a^* (x) b)). Only the sector with m excitations is stored,
// one entry per (system level, multiset of occupied slots).
class JointWaveVector {
public:
    int sector() const { return m_; }
    int slots() const { return k_; }
    double dt() const { return dt_; }
    std::size_t size() const { return amp_.size(); }

    int system_level(std::size_t e) const { return level_[e]; }
    const cplx& amplitude(std::size_t e) const { return amp_[e]; }
    // Sorted slot indices of the photons of entry e (length m - level).
    std::vector<std::int32_t> photons(std::size_t e) const;

    double norm_squared() const;
    std::vector<double> system_populations() const;

    // Coefficient of entry e in the slot discretization of xi.
    double xi_coefficient(const XiState& xi, std::size_t e) const;
    cplx overlap(const XiState& xi) const;  // <xi|psi>
    double xi_norm_squared(const XiState& xi) const;

    friend JointWaveVector collision_integrate(const std::vector<double>& couplings, int m,
                                               double t, int steps, std::size_t memory_cap);

private:
    int m_ = 0;
    int k_ = 0;
    double dt_ = 0.0;
    std::vector<std::int8_t> level_;
    std::vector<std::int32_t> photons_;  // stride m_, padded with -1
    std::vector<cplx> amp_;
};

inline constexpr std::size_t default_memory_cap = std::size_t{1} << 23;

// Number of stored entries for sector m and K slots.
double collision_sector_size(int m, int steps);

JointWaveVector collision_integrate(const std::vector<double>& couplings, int m, double t,
                                    int steps, std::size_t memory_cap = default_memory_cap);

JointWaveVector collision_integrate(const ModelParams& p, std::int64_t twice_j, int m, double t,
                                    int steps, std::size_t memory_cap = default_memory_cap);

// || (psi_a - xi_a) - (psi_b - xi_b) || for two runs with the same sector and slot count.
double residual_difference(const JointWaveVector& psi_a, const XiState& xi_a,
                           const JointWaveVector& psi_b, const XiState& xi_b);

// || psi - xi || in the slot basis.
double xi_distance(const JointWaveVector& psi, const XiState& xi);

// d rho/dt = a rho a^* - {a^* a, rho}/2 by fixed-step RK4 on the first rho0.rows() levels
// of the block (closed under a_j). Throws when the trace drifts by more than 1e-6.
struct LindbladResult {
    CMatrix rho;
    double trace_drift = 0.0;
    double min_eigenvalue = 0.0;
};
LindbladResult lindblad_reduce(const ModelParams& p, std::int64_t twice_j, const CMatrix& rho0,
                               double t, double dt);

// System part of the xi approximation started from rho0 (levels k = j - m).
CMatrix xi_reduced_state(const ModelParams& p, std::int64_t twice_j, const CMatrix& rho0,
                         double t);

// C m^{3/2} (n^{-1/2+eps} + m/n) (1 + (2/eps2) n^{-1/2+eps})^{m/2}.
double xi_error_bound(std::int64_t n, int m, double eps, double eps2, double c);

// Fitted on n = 1e4, m <= 3, j in {j_n, j_n +- sqrt(n)}, t = 5 (see tools/qlan qsde-check).
inline constexpr double xi_bound_constant = 1.4;

// Outcome of the energy measurement: N(j / sqrt(n), 1 / (4 t)).
double energy_measurement_sample(std::int64_t n, std::int64_t twice_j, double t, Rng& rng);

// Validation table at the reference block j = j_n (rounded to a valid label). The
// discretization budget 1 - |<xi|psi>| is measured on the oscillator (couplings sqrt k), where
// xi is exact; deficit is residual_difference against that run. slope is the log-log slope of
// the deficit over n for each m (NaN with a single n).
struct QsdeCheckRow {
    std::int64_t n = 0;
    std::int64_t twice_j = 0;
    int m = 0;
    double t = 0.0;
    int steps = 0;
    double survival = 0.0;      // |amplitude of level m with no photon emitted|
    double survival_ref = 0.0;  // e^{-gamma t / 2} for m = 1, NaN otherwise
    double overlap = 0.0;       // |<xi|psi_K>|
    double overlap_osc = 0.0;
    double overlap_corrected = 0.0;
    double deficit = 0.0;
    double bound = 0.0;
    double slope = 0.0;
};

std::int64_t reference_twice_spin(const ModelParams& p);

std::vector<QsdeCheckRow> qsde_check(double mu, const std::vector<std::int64_t>& n_list,
                                     const std::vector<int>& m_list, double t, int steps,
                                     double eps, double eps2, double c = xi_bound_constant);

}  // namespace qlan
