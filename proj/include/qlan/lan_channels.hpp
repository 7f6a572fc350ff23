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
#include <string>
#include <vector>

#include "qlan/constants.hpp"
#include "qlan/fock_gaussian.hpp"
#include "qlan/parallel.hpp"
#include "qlan/spin_blocks.hpp"

namespace qlan {

// Uniform quadrature grid on the real line.
struct Grid {
    double lo = 0.0;
    double step = 1.0;
    int count = 0;

    double x(int i) const { return lo + step * i; }
};

// centre +- 8 sd with step sd / 50.
Grid make_grid(double centre, double sd);

struct ClassicalDensity {
    Grid grid;
    std::vector<double> values;
};

// Classical density times a conditional Fock state at every grid point. A product state
// stores a single conditional.
struct HybridState {
    ClassicalDensity classical;
    std::vector<CMatrix> conditional;
    double skipped_mass = 0.0;  // block mass left out (below tol::block_skip)
    double fock_tail = 0.0;     // largest per-block truncation loss

    const CMatrix& at(int i) const {
        return conditional.size() == 1 ? conditional.front() : conditional[static_cast<std::size_t>(i)];
    }
};

// Grid shared by the forward channel output and the Gaussian limit.
Grid channel_grid(const ModelParams& p, const LocalParam& u);

double normal_pdf(double x, double mean, double var);

// N(u_z, mu (1 - mu)) (x) phi^u.
HybridState gaussian_limit(const ModelParams& p, const LocalParam& u, int dim, const Grid& grid);

// sum_j p_{n,u}(j) tau_{n,j}(x).
ClassicalDensity smoothed_classical_density(const ModelParams& p, const LocalParam& u,
                                            const Grid& grid);

// T_n applied to rho^u_n. Blocks are embedded through V_j and cut to the first dim levels;
// a block losing more than tol::fock_budget of its trace raises ComputationError.
HybridState apply_T(const ModelParams& p, const LocalParam& u, int dim, const Grid& grid,
                    Execution exec = Execution::parallel);

// Trapezoid integral of || f_a(x) rho_a(x) - f_b(x) rho_b(x) ||_1.
double hybrid_trace_distance(const HybridState& a, const HybridState& b,
                             Execution exec = Execution::parallel);

// Block label selected by S_n from the classical outcome x.
std::int64_t inverse_block_label(const ModelParams& p, double x);

// S_n applied to N^u (x) phi^u, kept blockwise next to rho^u_n.
struct InverseBlock {
    std::int64_t twice_j = 0;
    double q = 0.0;        // mass S_n sends to the block
    double p = 0.0;        // p_{n,u}(j)
    double filler = 0.0;   // Tr(P_j^perp phi^u), spread as the maximally mixed block state
    CMatrix tau;           // first min(2j + 1, dim) levels of tau^u_{n,j}
    CMatrix rho;           // same corner of rho^u_{j,n}
    double remainder = 0.0;  // trace outside the stored corners, both sides
};

struct InverseResult {
    std::vector<InverseBlock> blocks;
    double neglected_mass = 0.0;
};

InverseResult apply_S(const ModelParams& p, const LocalParam& u, int dim);

// sum_j || q_j tau_j - p_j rho_j ||_1 over the stored corners.
double inverse_distance(const InverseResult& r);

struct SweepRow {
    std::int64_t n = 0;
    double dist_T = 0.0;
    double dist_S = 0.0;
    std::string status = "ok";
};

struct ConvergenceTable {
    std::vector<SweepRow> rows;
    double slope_T = 0.0;
    double slope_S = 0.0;
    double resid_T = 0.0;
    double resid_S = 0.0;
};

// Least-squares slope of log y against log x and the RMS residual.
struct LogLogFit {
    double slope = 0.0;
    double residual = 0.0;
};
LogLogFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

ConvergenceTable convergence_sweep(double mu, const LocalParam& u,
                                   const std::vector<std::int64_t>& n_list, int dim,
                                   Execution exec = Execution::parallel);

}  // namespace qlan
