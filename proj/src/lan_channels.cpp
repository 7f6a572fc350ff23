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

#include "qlan/lan_channels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qlan/errors.hpp"
#include "qlan/operator_core.hpp"

namespace qlan {

namespace {

struct WeightedBlock {
    std::int64_t twice_j;
    double weight;
};

// Blocks of p_{n,u} above the skip threshold, plus the mass that was left out.
std::vector<WeightedBlock> significant_blocks(const ModelParams& p, const LocalParam& u,
                                              double& skipped) {
    const BlockIndexSampler table(p, u);
    std::vector<WeightedBlock> out;
    skipped = table.tail();
    for (std::size_t i = 0; i < table.support().size(); ++i) {
        if (table.pmf()[i] < tol::block_skip) {
            skipped += table.pmf()[i];
        } else {
            out.push_back({table.support()[i], table.pmf()[i]});
        }
    }
    return out;
}

double kernel_centre(const ModelParams& p, std::int64_t twice_j) {
    const double rn = std::sqrt(static_cast<double>(p.n));
    return 0.5 * static_cast<double>(twice_j) / rn - rn * (p.mu - 0.5);
}

double kernel_var(const ModelParams& p) { return 0.5 / std::sqrt(static_cast<double>(p.n)); }

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

bool same_grid(const Grid& a, const Grid& b) {
    return a.count == b.count && a.lo == b.lo && a.step == b.step;
}

}  // namespace

Grid make_grid(double centre, double sd) {
    if (!(sd > 0.0)) {
        throw ValidationError("grid spread must be positive");
    }
    Grid g;
    g.step = sd / 50.0;
    g.lo = centre - 8.0 * sd;
    g.count = 801;
    return g;
}

Grid channel_grid(const ModelParams& p, const LocalParam& u) {
    validate_params(p);
    return make_grid(u.z(), std::sqrt(p.mu * (1.0 - p.mu) + kernel_var(p)));
}

double normal_pdf(double x, double mean, double var) {
    return std::exp(-0.5 * (x - mean) * (x - mean) / var) / std::sqrt(2.0 * pi * var);
}

HybridState gaussian_limit(const ModelParams& p, const LocalParam& u, int dim, const Grid& grid) {
    validate_params(p);
    HybridState s;
    s.classical.grid = grid;
    s.classical.values.resize(static_cast<std::size_t>(grid.count));
    const double var = p.mu * (1.0 - p.mu);
    for (int i = 0; i < grid.count; ++i) {
        s.classical.values[static_cast<std::size_t>(i)] = normal_pdf(grid.x(i), u.z(), var);
    }
    const FockDensity phi = displaced_thermal(p.mu, u, dim);
    s.conditional.push_back(phi.m);
    s.fock_tail = phi.tail;
    return s;
}

ClassicalDensity smoothed_classical_density(const ModelParams& p, const LocalParam& u,
                                            const Grid& grid) {
    validate_params(p);
    double skipped = 0.0;
    const auto blocks = significant_blocks(p, u, skipped);
    ClassicalDensity d;
    d.grid = grid;
    d.values.assign(static_cast<std::size_t>(grid.count), 0.0);
    const double var = kernel_var(p);
    for (int i = 0; i < grid.count; ++i) {
        double f = 0.0;
        for (const auto& b : blocks) {
            f += b.weight * normal_pdf(grid.x(i), kernel_centre(p, b.twice_j), var);
        }
        d.values[static_cast<std::size_t>(i)] = f;
    }
    return d;
}

HybridState apply_T(const ModelParams& p, const LocalParam& u, int dim, const Grid& grid,
                    Execution exec) {
    validate_params(p);
    if (dim < 1) {
        throw ValidationError("Fock dimension must be positive");
    }
    HybridState s;
    const auto blocks = significant_blocks(p, u, s.skipped_mass);
    const std::size_t nb = blocks.size();
    std::vector<CMatrix> embedded(nb);
    std::vector<double> centres(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        const BlockCorner c = block_state_corner(p, u, blocks[b].twice_j, dim);
        const Eigen::Index d = c.m.rows();
        embedded[b] = CMatrix::Zero(dim, dim);
        embedded[b].topLeftCorner(d, d) = c.m;
        const double lost = std::max(0.0, 1.0 - c.m.trace().real());
        if (lost > tol::fock_budget) {
            std::ostringstream os;
            os << "block 2j = " << blocks[b].twice_j << " loses " << lost
               << " of its trace at Fock dimension " << dim;
            throw ComputationError(os.str());
        }
        s.fock_tail = std::max(s.fock_tail, lost);
        centres[b] = kernel_centre(p, blocks[b].twice_j);
    }
    const double var = kernel_var(p);
    s.classical.grid = grid;
    s.classical.values.assign(static_cast<std::size_t>(grid.count), 0.0);
    s.conditional.assign(static_cast<std::size_t>(grid.count), CMatrix());

    auto point = [&](int i) {
        const double x = grid.x(i);
        CMatrix acc = CMatrix::Zero(dim, dim);
        double f = 0.0;
        for (std::size_t b = 0; b < nb; ++b) {
            const double w = blocks[b].weight * normal_pdf(x, centres[b], var);
            if (w > 0.0) {
                acc += w * embedded[b];
                f += w;
            }
        }
        s.classical.values[static_cast<std::size_t>(i)] = f;
        s.conditional[static_cast<std::size_t>(i)] = f > 0.0 ? CMatrix(acc / f) : acc;
    };
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 8)
        for (int i = 0; i < grid.count; ++i) {
            point(i);
        }
    } else {
        for (int i = 0; i < grid.count; ++i) {
            point(i);
        }
    }
    return s;
}

double hybrid_trace_distance(const HybridState& a, const HybridState& b, Execution exec) {
    if (!same_grid(a.classical.grid, b.classical.grid)) {
        throw ValidationError("hybrid distance needs both states on the same grid");
    }
    if (a.at(0).rows() != b.at(0).rows()) {
        throw ValidationError("hybrid distance: Fock dimension mismatch");
    }
    const Grid& g = a.classical.grid;
    std::vector<double> h(static_cast<std::size_t>(g.count), 0.0);
    auto point = [&](int i) {
        const auto k = static_cast<std::size_t>(i);
        const CMatrix diff = a.classical.values[k] * a.at(i) - b.classical.values[k] * b.at(i);
        h[k] = trace_norm(diff);
    };
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 8)
        for (int i = 0; i < g.count; ++i) {
            point(i);
        }
    } else {
        for (int i = 0; i < g.count; ++i) {
            point(i);
        }
    }
    double sum = 0.0;
    for (int i = 0; i < g.count; ++i) {
        const double w = (i == 0 || i == g.count - 1) ? 0.5 : 1.0;
        sum += w * h[static_cast<std::size_t>(i)];
    }
    return sum * g.step;
}

std::int64_t inverse_block_label(const ModelParams& p, double x) {
    validate_params(p);
    const double nd = static_cast<double>(p.n);
    const double y = std::sqrt(nd) * x + nd * (p.mu - 0.5);
    const std::int64_t lo = min_twice_spin(p.n);
    // Valid labels are lo/2, lo/2 + 1, ..., n/2; cells are [j, j + 1).
    const double steps = std::floor(y - 0.5 * static_cast<double>(lo));
    const double top = 0.5 * static_cast<double>(p.n - lo);
    const double k = std::clamp(steps, 0.0, top);
    return lo + 2 * static_cast<std::int64_t>(k);
}

InverseResult apply_S(const ModelParams& p, const LocalParam& u, int dim) {
    validate_params(p);
    const double nd = static_cast<double>(p.n);
    const double mean_y = std::sqrt(nd) * u.z() + nd * (p.mu - 0.5);
    const double sd_y = std::sqrt(nd * p.mu * (1.0 - p.mu));
    const std::int64_t lo_label = min_twice_spin(p.n);

    auto cell_mass = [&](std::int64_t twice_j) {
        const double j = 0.5 * static_cast<double>(twice_j);
        const double lo = twice_j == lo_label ? -std::numeric_limits<double>::infinity() : j;
        const double hi = twice_j == p.n ? std::numeric_limits<double>::infinity() : j + 1.0;
        const double a = std::isinf(lo) ? 0.0 : std_normal_cdf((lo - mean_y) / sd_y);
        const double b = std::isinf(hi) ? 1.0 : std_normal_cdf((hi - mean_y) / sd_y);
        return std::max(0.0, b - a);
    };

    const BlockIndexSampler table(p, u);
    std::int64_t lo = table.support().front();
    std::int64_t hi = table.support().back();
    const auto q_lo = static_cast<std::int64_t>(std::floor(2.0 * (mean_y - 12.0 * sd_y)));
    const auto q_hi = static_cast<std::int64_t>(std::ceil(2.0 * (mean_y + 12.0 * sd_y)));
    lo = std::clamp(std::min(lo, q_lo), lo_label, p.n);
    hi = std::clamp(std::max(hi, q_hi), lo_label, p.n);
    if ((p.n - lo) % 2 != 0) {
        --lo;
    }
    lo = std::max(lo, lo_label);

    const FockDensity phi = displaced_thermal(p.mu, u, dim);
    InverseResult r;
    double q_sum = 0.0;
    double p_sum = 0.0;
    for (std::int64_t t = lo; t <= hi; t += 2) {
        const double q = cell_mass(t);
        const double pj = block_probability(p, u, t);
        if (std::max(q, pj) < 1e-14) {
            continue;
        }
        q_sum += q;
        p_sum += pj;
        InverseBlock b;
        b.twice_j = t;
        b.q = q;
        b.p = pj;
        const Eigen::Index block_dim = t + 1;
        const Eigen::Index levels = std::min<Eigen::Index>(block_dim, dim);
        const CMatrix top = phi.m.topLeftCorner(levels, levels);
        if (block_dim <= dim) {
            b.filler = std::max(0.0, 1.0 - top.trace().real());
        } else {
            b.filler = phi.tail;
        }
        b.tau = top + (b.filler / static_cast<double>(block_dim)) *
                          CMatrix::Identity(levels, levels);
        const BlockCorner rc = block_state_corner(p, u, t, static_cast<int>(levels));
        b.rho = rc.m;
        b.remainder = q * std::max(0.0, 1.0 - b.tau.trace().real()) +
                      pj * std::max(0.0, 1.0 - b.rho.trace().real());
        r.blocks.push_back(std::move(b));
    }
    r.neglected_mass = std::max(0.0, 1.0 - q_sum) + std::max(0.0, 1.0 - p_sum);
    return r;
}

double inverse_distance(const InverseResult& r) {
    double d = 0.0;
    for (const auto& b : r.blocks) {
        d += trace_norm(b.q * b.tau - b.p * b.rho);
    }
    return d;
}

LogLogFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw ValidationError("log-log fit needs at least two points");
    }
    const double m = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    LogLogFit f;
    f.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double icpt = (sy - f.slope * sx) / m;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = std::log(y[i]) - (icpt + f.slope * std::log(x[i]));
        ss += e * e;
    }
    f.residual = std::sqrt(ss / m);
    return f;
}

ConvergenceTable convergence_sweep(double mu, const LocalParam& u,
                                   const std::vector<std::int64_t>& n_list, int dim,
                                   Execution exec) {
    if (n_list.empty()) {
        throw ValidationError("n list is empty");
    }
    ConvergenceTable table;
    std::vector<double> ns, dt, ds;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto n : n_list) {
        const ModelParams p{mu, n};
        validate_params(p);
        SweepRow row;
        row.n = n;
        try {
            const Grid g = channel_grid(p, u);
            const HybridState t = apply_T(p, u, dim, g, exec);
            const HybridState lim = gaussian_limit(p, u, dim, g);
            row.dist_T = hybrid_trace_distance(t, lim, exec);
            row.dist_S = inverse_distance(apply_S(p, u, dim));
            ns.push_back(static_cast<double>(n));
            dt.push_back(row.dist_T);
            ds.push_back(row.dist_S);
        } catch (const OutsideModelError& e) {
            row.dist_T = nan;
            row.dist_S = nan;
            row.status = std::string("outside model: ") + e.what();
        }
        table.rows.push_back(row);
    }
    if (ns.size() >= 2) {
        const LogLogFit ft = loglog_fit(ns, dt);
        const LogLogFit fs = loglog_fit(ns, ds);
        table.slope_T = ft.slope;
        table.resid_T = ft.residual;
        table.slope_S = fs.slope;
        table.resid_S = fs.residual;
    } else {
        table.slope_T = table.slope_S = nan;
        table.resid_T = table.resid_S = nan;
    }
    return table;
}

}  // namespace qlan
