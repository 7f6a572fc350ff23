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

#include "qlan/qsde.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qlan/errors.hpp"
#include "qlan/lan_channels.hpp"
#include "qlan/operator_core.hpp"

namespace qlan {

namespace {

void require_level(std::int64_t twice_j, int m) {
    if (m < 0 || m > twice_j) {
        std::ostringstream os;
        os << "excitation number m = " << m << " must satisfy 0 <= m <= 2j = " << twice_j;
        throw ValidationError(os.str());
    }
}

// Column l = 0 of exp(sqrt(dt) (a (x) b^* - a^* (x) b)) on the span of |s - l, l>, l = 0..s.
std::vector<double> emission_column(const std::vector<double>& g, int s, double dt) {
    CMatrix h = CMatrix::Zero(s + 1, s + 1);
    for (int l = 0; l < s; ++l) {
        const double c = std::sqrt(dt) * g[static_cast<std::size_t>(s - l)] * std::sqrt(l + 1.0);
        // Generator A has A(l+1, l) = c, A(l, l+1) = -c; H = iA is Hermitian, exp(A) = exp(-iH).
        h(l + 1, l) = cplx(0.0, c);
        h(l, l + 1) = cplx(0.0, -c);
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
    const RVector& ev = solver.eigenvalues();
    CVector phase(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        phase(i) = std::polar(1.0, -ev(i));
    }
    const CMatrix& v = solver.eigenvectors();
    const CMatrix w = v * phase.asDiagonal() * v.adjoint();
    std::vector<double> col(static_cast<std::size_t>(s + 1));
    for (int l = 0; l <= s; ++l) {
        col[static_cast<std::size_t>(l)] = w(l, 0).real();
    }
    return col;
}

double slot_mode(int k, double dt) {
    return 2.0 * (std::exp(-0.5 * k * dt) - std::exp(-0.5 * (k + 1) * dt)) / std::sqrt(dt);
}

}  // namespace

double reference_spin(const ModelParams& p) {
    validate_params(p);
    return static_cast<double>(p.n) * (p.mu - 0.5);
}

std::vector<double> block_couplings(const ModelParams& p, std::int64_t twice_j, int levels) {
    const double jn = reference_spin(p);
    if (!is_valid_spin(p.n, twice_j)) {
        throw ValidationError("invalid spin label for this n");
    }
    std::vector<double> g(static_cast<std::size_t>(std::max(levels, 1)), 0.0);
    for (int k = 1; k < levels && k <= twice_j; ++k) {
        g[static_cast<std::size_t>(k)] =
            std::sqrt(static_cast<double>(k)) *
            std::sqrt((static_cast<double>(twice_j) - k + 1.0) / (2.0 * jn));
    }
    return g;
}

std::vector<double> oscillator_couplings(int levels) {
    std::vector<double> g(static_cast<std::size_t>(std::max(levels, 1)), 0.0);
    for (int k = 1; k < levels; ++k) {
        g[static_cast<std::size_t>(k)] = std::sqrt(static_cast<double>(k));
    }
    return g;
}

std::vector<double> c_coefficients(const ModelParams& p, std::int64_t twice_j, int m) {
    const double jn = reference_spin(p);
    require_level(twice_j, m);
    std::vector<double> c(static_cast<std::size_t>(m + 1));
    c[0] = 1.0;
    for (int i = 1; i <= m; ++i) {
        c[static_cast<std::size_t>(i)] =
            c[static_cast<std::size_t>(i - 1)] *
            std::sqrt((static_cast<double>(twice_j) - m + i) / (2.0 * jn)) *
            std::sqrt(static_cast<double>(m - i + 1) / i);
    }
    return c;
}

double XiState::alpha(int i) const { return std::exp(-0.5 * (m - i) * t); }

double XiState::norm_squared() const {
    double s = 0.0;
    for (int i = 0; i <= m; ++i) {
        const double ci = c[static_cast<std::size_t>(i)];
        s += ci * ci * std::exp(-(m - i) * t) * std::pow(-std::expm1(-t), i);
    }
    return s;
}

XiState xi_state(const ModelParams& p, std::int64_t twice_j, int m, double t) {
    if (!(t >= 0.0)) {
        throw ValidationError("time must be non-negative");
    }
    return XiState{m, t, c_coefficients(p, twice_j, m)};
}

XiState xi_state_oscillator(int m, double t) {
    if (m < 0 || !(t >= 0.0)) {
        throw ValidationError("oscillator xi needs m >= 0 and t >= 0");
    }
    XiState xi{m, t, std::vector<double>(static_cast<std::size_t>(m + 1))};
    for (int i = 0; i <= m; ++i) {
        xi.c[static_cast<std::size_t>(i)] =
            std::sqrt(std::exp(std::lgamma(m + 1.0) - std::lgamma(i + 1.0) - std::lgamma(m - i + 1.0)));
    }
    return xi;
}

cplx OscillatorSolution::system_amplitude(double time) const { return z * std::exp(-0.5 * time); }

cplx OscillatorSolution::field_mode(double s) const {
    return (s >= 0.0 && s <= t) ? z * std::exp(-0.5 * s) : cplx(0.0);
}

double OscillatorSolution::residual() const {
    const double h = 1e-3;
    const double s = 0.5 * t;
    const cplx d = (-system_amplitude(s + 2 * h) + 8.0 * system_amplitude(s + h) -
                    8.0 * system_amplitude(s - h) + system_amplitude(s - 2 * h)) /
                   (12.0 * h);
    const double ode = std::abs(d + 0.5 * system_amplitude(s));
    const double mode = std::abs(field_mode(s) - system_amplitude(s));
    return std::max(ode, mode);
}

OscillatorSolution oscillator_solution(cplx z, double t) {
    if (!(t >= 0.0)) {
        throw ValidationError("time must be non-negative");
    }
    return OscillatorSolution{z, t};
}

std::vector<std::int32_t> JointWaveVector::photons(std::size_t e) const {
    const int count = m_ - level_[e];
    const auto first = photons_.begin() + static_cast<std::ptrdiff_t>(e * static_cast<std::size_t>(m_));
    return std::vector<std::int32_t>(first, first + count);
}

double JointWaveVector::norm_squared() const {
    double s = 0.0;
    for (const auto& a : amp_) {
        s += std::norm(a);
    }
    return s;
}

std::vector<double> JointWaveVector::system_populations() const {
    std::vector<double> pop(static_cast<std::size_t>(m_ + 1), 0.0);
    for (std::size_t e = 0; e < amp_.size(); ++e) {
        pop[static_cast<std::size_t>(level_[e])] += std::norm(amp_[e]);
    }
    return pop;
}

double JointWaveVector::xi_coefficient(const XiState& xi, std::size_t e) const {
    const int i = m_ - level_[e];
    double coef = xi.c[static_cast<std::size_t>(i)] * xi.alpha(i) * std::exp(0.5 * std::lgamma(i + 1.0));
    const std::int32_t* ph = photons_.data() + e * static_cast<std::size_t>(m_);
    int r = 0;
    while (r < i) {
        int run = 1;
        while (r + run < i && ph[r + run] == ph[r]) {
            ++run;
        }
        coef *= std::pow(slot_mode(ph[r], dt_), run) / std::exp(0.5 * std::lgamma(run + 1.0));
        r += run;
    }
    return coef;
}

cplx JointWaveVector::overlap(const XiState& xi) const {
    if (xi.m != m_ || std::abs(xi.t - dt_ * k_) > 1e-9 * std::max(1.0, xi.t)) {
        throw ValidationError("xi state does not match the sector or the integration time");
    }
    cplx s(0.0);
    for (std::size_t e = 0; e < amp_.size(); ++e) {
        s += xi_coefficient(xi, e) * amp_[e];
    }
    return s;
}

double JointWaveVector::xi_norm_squared(const XiState& xi) const {
    double f2 = 0.0;
    for (int k = 0; k < k_; ++k) {
        f2 += slot_mode(k, dt_) * slot_mode(k, dt_);
    }
    double s = 0.0;
    for (int i = 0; i <= m_; ++i) {
        const double ci = xi.c[static_cast<std::size_t>(i)] * xi.alpha(i);
        s += ci * ci * std::pow(f2, i);
    }
    return s;
}

double collision_sector_size(int m, int steps) {
    double total = 0.0;
    for (int i = 0; i <= m; ++i) {
        total += std::exp(std::lgamma(steps + i) - std::lgamma(i + 1.0) - std::lgamma(steps));
    }
    return total;
}

JointWaveVector collision_integrate(const std::vector<double>& couplings, int m, double t,
                                    int steps, std::size_t memory_cap) {
    if (m < 0 || m > 120 || static_cast<std::size_t>(m) >= couplings.size()) {
        throw ValidationError("collision model needs 0 <= m < number of couplings");
    }
    if (steps < 1 || !(t > 0.0)) {
        throw ValidationError("collision model needs t > 0 and at least one step");
    }
    const double size = collision_sector_size(m, steps);
    if (size > static_cast<double>(memory_cap)) {
        std::ostringstream os;
        os << "collision sector m = " << m << " with " << steps << " slots needs " << size
           << " entries, above the memory cap " << memory_cap;
        throw ComputationError(os.str());
    }
    JointWaveVector psi;
    psi.m_ = m;
    psi.k_ = steps;
    psi.dt_ = t / steps;
    const auto cap = static_cast<std::size_t>(size) + 1;
    psi.level_.reserve(cap);
    psi.amp_.reserve(cap);
    psi.photons_.reserve(cap * static_cast<std::size_t>(m));
    psi.level_.push_back(static_cast<std::int8_t>(m));
    psi.amp_.push_back(1.0);
    psi.photons_.insert(psi.photons_.end(), static_cast<std::size_t>(m), -1);

    std::vector<std::vector<double>> cols(static_cast<std::size_t>(m + 1));
    for (int s = 1; s <= m; ++s) {
        cols[static_cast<std::size_t>(s)] = emission_column(couplings, s, psi.dt_);
    }
    std::vector<std::size_t> active;
    if (m > 0) {
        active.push_back(0);
    }
    const auto stride = static_cast<std::size_t>(m);
    for (int k = 0; k < steps; ++k) {
        const std::size_t live = active.size();
        for (std::size_t a = 0; a < live; ++a) {
            const std::size_t e = active[a];
            const int s = psi.level_[e];
            const cplx amp = psi.amp_[e];
            const auto& w = cols[static_cast<std::size_t>(s)];
            psi.amp_[e] = amp * w[0];
            const int emitted = m - s;
            for (int l = 1; l <= s; ++l) {
                const std::size_t ne = psi.amp_.size();
                psi.level_.push_back(static_cast<std::int8_t>(s - l));
                psi.amp_.push_back(amp * w[static_cast<std::size_t>(l)]);
                for (std::size_t r = 0; r < stride; ++r) {
                    psi.photons_.push_back(psi.photons_[e * stride + r]);
                }
                for (int r = 0; r < l; ++r) {
                    psi.photons_[ne * stride + static_cast<std::size_t>(emitted + r)] = k;
                }
                if (s - l >= 1) {
                    active.push_back(ne);
                }
            }
        }
    }
    return psi;
}

JointWaveVector collision_integrate(const ModelParams& p, std::int64_t twice_j, int m, double t,
                                    int steps, std::size_t memory_cap) {
    require_level(twice_j, m);
    return collision_integrate(block_couplings(p, twice_j, m + 1), m, t, steps, memory_cap);
}

double residual_difference(const JointWaveVector& psi_a, const XiState& xi_a,
                           const JointWaveVector& psi_b, const XiState& xi_b) {
    if (psi_a.sector() != psi_b.sector() || psi_a.slots() != psi_b.slots() ||
        psi_a.size() != psi_b.size()) {
        throw ValidationError("residual difference needs runs with the same sector and slots");
    }
    psi_a.overlap(xi_a);  // validates the time and sector
    psi_b.overlap(xi_b);
    double s = 0.0;
    for (std::size_t e = 0; e < psi_a.size(); ++e) {
        const cplx ra = psi_a.amplitude(e) - psi_a.xi_coefficient(xi_a, e);
        const cplx rb = psi_b.amplitude(e) - psi_b.xi_coefficient(xi_b, e);
        s += std::norm(ra - rb);
    }
    return std::sqrt(s);
}

double xi_distance(const JointWaveVector& psi, const XiState& xi) {
    psi.overlap(xi);
    double s = 0.0;
    for (std::size_t e = 0; e < psi.size(); ++e) {
        s += std::norm(psi.amplitude(e) - psi.xi_coefficient(xi, e));
    }
    return std::sqrt(s);
}

LindbladResult lindblad_reduce(const ModelParams& p, std::int64_t twice_j, const CMatrix& rho0,
                               double t, double dt) {
    const Eigen::Index d = rho0.rows();
    if (d < 1 || rho0.cols() != d || d > twice_j + 1) {
        throw ValidationError("initial state must be square with at most 2j + 1 levels");
    }
    if (!(t >= 0.0) || !(dt > 0.0)) {
        throw ValidationError("lindblad integration needs t >= 0 and dt > 0");
    }
    const auto g = block_couplings(p, twice_j, static_cast<int>(d));
    CMatrix a = CMatrix::Zero(d, d);
    for (Eigen::Index k = 1; k < d; ++k) {
        a(k - 1, k) = g[static_cast<std::size_t>(k)];
    }
    const CMatrix ad = a.adjoint();
    const CMatrix n_op = ad * a;
    auto rhs = [&](const CMatrix& r) -> CMatrix {
        return a * r * ad - 0.5 * (n_op * r + r * n_op);
    };
    const int steps = std::max(1, static_cast<int>(std::ceil(t / dt - 1e-12)));
    const double h = t / steps;
    CMatrix r = rho0;
    const double tr0 = rho0.trace().real();
    for (int s = 0; s < steps; ++s) {
        const CMatrix k1 = rhs(r);
        const CMatrix k2 = rhs(r + 0.5 * h * k1);
        const CMatrix k3 = rhs(r + 0.5 * h * k2);
        const CMatrix k4 = rhs(r + h * k3);
        r += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    LindbladResult out;
    out.rho = 0.5 * (r + r.adjoint());
    out.trace_drift = std::abs(out.rho.trace().real() - tr0);
    if (out.trace_drift > tol::lindblad_trace) {
        std::ostringstream os;
        os << "lindblad trace drift " << out.trace_drift << " exceeds " << tol::lindblad_trace;
        throw ComputationError(os.str());
    }
    out.min_eigenvalue = hermitian_eigenvalues(out.rho).minCoeff();
    return out;
}

CMatrix xi_reduced_state(const ModelParams& p, std::int64_t twice_j, const CMatrix& rho0,
                         double t) {
    const Eigen::Index d = rho0.rows();
    if (d < 1 || rho0.cols() != d || d > twice_j + 1) {
        throw ValidationError("initial state must be square with at most 2j + 1 levels");
    }
    std::vector<std::vector<double>> c(static_cast<std::size_t>(d));
    for (Eigen::Index k = 0; k < d; ++k) {
        c[static_cast<std::size_t>(k)] = c_coefficients(p, twice_j, static_cast<int>(k));
    }
    const double emit = -std::expm1(-t);
    CMatrix out = CMatrix::Zero(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
        for (Eigen::Index l = 0; l < d; ++l) {
            const Eigen::Index top = std::min(k, l);
            for (Eigen::Index i = 0; i <= top; ++i) {
                const double w = c[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] *
                                 c[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)] *
                                 std::exp(-0.5 * static_cast<double>(k + l - 2 * i) * t) *
                                 std::pow(emit, static_cast<double>(i));
                out(k - i, l - i) += w * rho0(k, l);
            }
        }
    }
    return out;
}

double xi_error_bound(std::int64_t n, int m, double eps, double eps2, double c) {
    if (n < 1 || m < 0 || !(eps2 > 0.0)) {
        throw ValidationError("xi bound needs n >= 1, m >= 0 and eps2 > 0");
    }
    const double nd = static_cast<double>(n);
    const double r = std::pow(nd, -0.5 + eps);
    return c * std::pow(m, 1.5) * (r + m / nd) * std::pow(1.0 + 2.0 * r / eps2, 0.5 * m);
}

double energy_measurement_sample(std::int64_t n, std::int64_t twice_j, double t, Rng& rng) {
    if (n < 1 || !(t > 0.0)) {
        throw ValidationError("energy measurement needs n >= 1 and t > 0");
    }
    return rng.normal(0.5 * static_cast<double>(twice_j) / std::sqrt(static_cast<double>(n)),
                      0.5 / std::sqrt(t));
}

std::int64_t reference_twice_spin(const ModelParams& p) {
    std::int64_t tj = std::llround(2.0 * reference_spin(p));
    if ((tj - p.n) % 2 != 0) ++tj;
    return std::clamp(tj, min_twice_spin(p.n), p.n);
}

std::vector<QsdeCheckRow> qsde_check(double mu, const std::vector<std::int64_t>& n_list,
                                     const std::vector<int>& m_list, double t, int steps,
                                     double eps, double eps2, double c) {
    if (n_list.empty() || m_list.empty()) throw ValidationError("n and m lists must be non-empty");
    if (!(t > 0.0)) throw ValidationError("t must be > 0");
    if (steps < 1) throw ValidationError("steps must be >= 1");
    for (std::int64_t n : n_list) validate_params(ModelParams{mu, n});
    for (int m : m_list) {
        if (m < 1 || m > 8) throw ValidationError("m must lie in [1, 8]");
    }
    std::vector<QsdeCheckRow> rows;
    for (int m : m_list) {
        const JointWaveVector osc = collision_integrate(oscillator_couplings(m + 1), m, t, steps);
        const XiState xi_osc = xi_state_oscillator(m, t);
        const double overlap_osc = std::abs(osc.overlap(xi_osc));
        std::vector<double> ns, ds;
        const std::size_t first = rows.size();
        for (std::int64_t n : n_list) {
            const ModelParams p{mu, n};
            QsdeCheckRow r;
            r.n = n;
            r.twice_j = reference_twice_spin(p);
            r.m = m;
            r.t = t;
            r.steps = steps;
            const JointWaveVector psi = collision_integrate(p, r.twice_j, m, t, steps);
            const XiState xi = xi_state(p, r.twice_j, m, t);
            for (std::size_t e = 0; e < psi.size(); ++e) {
                if (psi.system_level(e) == m) r.survival = std::abs(psi.amplitude(e));
            }
            const double gamma = double(r.twice_j) / (2.0 * reference_spin(p));
            r.survival_ref = m == 1 ? std::exp(-gamma * t / 2.0) : std::nan("");
            r.overlap = std::abs(psi.overlap(xi));
            r.overlap_osc = overlap_osc;
            r.overlap_corrected = r.overlap + (1.0 - overlap_osc);
            r.deficit = residual_difference(psi, xi, osc, xi_osc);
            r.bound = xi_error_bound(n, m, eps, eps2, c);
            ns.push_back(double(n));
            ds.push_back(r.deficit);
            rows.push_back(r);
        }
        const double slope = ns.size() >= 2 ? loglog_fit(ns, ds).slope : std::nan("");
        for (std::size_t i = first; i < rows.size(); ++i) rows[i].slope = slope;
    }
    return rows;
}

}  // namespace qlan
