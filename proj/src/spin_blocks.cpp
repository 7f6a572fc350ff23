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

#include "qlan/spin_blocks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qlan/errors.hpp"

namespace qlan {

namespace {

using u128 = unsigned __int128;

// C(n, k) in 128 bits, or 0 when it would overflow.
u128 binomial_exact(std::int64_t n, std::int64_t k) {
    if (k < 0 || k > n) {
        return 0;
    }
    k = std::min(k, n - k);
    u128 c = 1;
    const u128 limit = (~u128(0)) >> 8;
    for (std::int64_t i = 0; i < k; ++i) {
        if (c > limit / static_cast<u128>(n - i)) {
            throw ComputationError("multiplicity: binomial coefficient overflows 128 bits");
        }
        c = c * static_cast<u128>(n - i) / static_cast<u128>(i + 1);
    }
    return c;
}

void require_spin(std::int64_t n, std::int64_t twice_j) {
    if (!is_valid_spin(n, twice_j)) {
        std::ostringstream os;
        os << "invalid spin label 2j = " << twice_j << " for n = " << n
           << " (need 0 <= 2j <= n and n - 2j even)";
        throw ValidationError(os.str());
    }
}

double checked_local_mu(const ModelParams& p, const LocalParam& u) {
    const double m = local_mu(p, u);
    if (!(m > 0.5 && m < 1.0)) {
        std::ostringstream os;
        os << "mu_u = " << m << " is outside (1/2, 1)";
        throw OutsideModelError(os.str());
    }
    return m;
}

CMatrix exp_i_hermitian(const CMatrix& h) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
    if (solver.info() != Eigen::Success) {
        throw ComputationError("Hermitian eigensolver did not converge");
    }
    const RVector& ev = solver.eigenvalues();
    CVector phase(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        phase(i) = std::polar(1.0, ev(i));
    }
    const CMatrix& v = solver.eigenvectors();
    return v * phase.asDiagonal() * v.adjoint();
}

// J_x, J_y restricted to the first w basis states of the spin-j irrep.
CMatrix rotation_generator(std::int64_t twice_j, double vx, double vy, Eigen::Index w) {
    const double j = 0.5 * static_cast<double>(twice_j);
    CMatrix h = CMatrix::Zero(w, w);
    for (Eigen::Index k = 1; k < w; ++k) {
        const double m = j - static_cast<double>(k);
        const double c = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
        // J_+ |k> = c |k - 1>; 2(v_x J_x + v_y J_y) = (v_x - i v_y) J_+ + (v_x + i v_y) J_-.
        h(k - 1, k) = cplx(vx, -vy) * c;
        h(k, k - 1) = cplx(vx, vy) * c;
    }
    return h;
}

RVector block_populations(double mu_u, std::int64_t twice_j, Eigen::Index count) {
    const double pu = (1.0 - mu_u) / mu_u;
    const double norm = -std::expm1(static_cast<double>(twice_j + 1) * std::log(pu));
    RVector d(count);
    for (Eigen::Index k = 0; k < count; ++k) {
        d(k) = (1.0 - pu) * std::pow(pu, static_cast<double>(k)) / norm;
    }
    return d;
}

}  // namespace

void validate_params(const ModelParams& p) {
    if (!(p.mu > 0.5 && p.mu < 1.0)) {
        std::ostringstream os;
        os << "mu = " << p.mu << " violates 1/2 < mu < 1";
        throw ValidationError(os.str());
    }
    if (p.n < 1) {
        throw ValidationError("n must be a positive integer");
    }
}

bool is_valid_spin(std::int64_t n, std::int64_t twice_j) {
    return n >= 0 && twice_j >= 0 && twice_j <= n && (n - twice_j) % 2 == 0;
}

std::int64_t min_twice_spin(std::int64_t n) { return n % 2; }

std::uint64_t multiplicity(std::int64_t n, std::int64_t twice_j) {
    require_spin(n, twice_j);
    const std::int64_t k = (n - twice_j) / 2;
    const u128 value = binomial_exact(n, k) - binomial_exact(n, k - 1);
    if (value > static_cast<u128>(std::numeric_limits<std::uint64_t>::max())) {
        throw ComputationError("multiplicity does not fit in 64 bits; use log_multiplicity");
    }
    return static_cast<std::uint64_t>(value);
}

double log_multiplicity(std::int64_t n, std::int64_t twice_j) {
    require_spin(n, twice_j);
    const double k = static_cast<double>((n - twice_j) / 2);
    const double nd = static_cast<double>(n);
    return std::lgamma(nd + 1.0) - std::lgamma(k + 1.0) - std::lgamma(nd - k + 1.0) +
           std::log(static_cast<double>(twice_j + 1)) - std::log(nd - k + 1.0);
}

double local_mu(const ModelParams& p, const LocalParam& u) {
    return p.mu + u.z() / std::sqrt(static_cast<double>(p.n));
}

double log_block_probability(const ModelParams& p, const LocalParam& u, std::int64_t twice_j) {
    validate_params(p);
    require_spin(p.n, twice_j);
    const double m = checked_local_mu(p, u);
    const double down = static_cast<double>((p.n - twice_j) / 2);
    const double up = static_cast<double>((p.n + twice_j) / 2);
    const double log_pu = std::log1p(-m) - std::log(m);
    return log_multiplicity(p.n, twice_j) - std::log(2.0 * m - 1.0) + down * std::log1p(-m) +
           (up + 1.0) * std::log(m) +
           std::log(-std::expm1(static_cast<double>(twice_j + 1) * log_pu));
}

double block_probability(const ModelParams& p, const LocalParam& u, std::int64_t twice_j) {
    return std::exp(log_block_probability(p, u, twice_j));
}

double block_probability_factored(const ModelParams& p, const LocalParam& u,
                                  std::int64_t twice_j) {
    validate_params(p);
    require_spin(p.n, twice_j);
    const double m = checked_local_mu(p, u);
    const double nd = static_cast<double>(p.n);
    const double j = 0.5 * static_cast<double>(twice_j);
    const double up = static_cast<double>((p.n + twice_j) / 2);
    const double log_binom = std::lgamma(nd + 1.0) - std::lgamma(up + 1.0) -
                             std::lgamma(nd - up + 1.0) + up * std::log(m) +
                             (nd - up) * std::log1p(-m);
    const double jn = nd * (p.mu - 0.5);
    const double d = j - jn - std::sqrt(nd) * u.z();
    const double pu = (1.0 - m) / m;
    const double k = -std::expm1(static_cast<double>(twice_j + 1) * std::log(pu)) *
                     (nd + (2.0 * d + 1.0) / (2.0 * m - 1.0)) / (nd + (d + 1.0) / m);
    return std::exp(log_binom) * k;
}

SpinMatrices spin_matrices(std::int64_t twice_j) {
    if (twice_j < 0) {
        throw ValidationError("spin must be non-negative");
    }
    const Eigen::Index d = twice_j + 1;
    const double j = 0.5 * static_cast<double>(twice_j);
    CMatrix jp = CMatrix::Zero(d, d);
    CMatrix jz = CMatrix::Zero(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
        const double m = j - static_cast<double>(k);
        jz(k, k) = m;
        if (k > 0) {
            jp(k - 1, k) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
        }
    }
    const CMatrix jm = jp.adjoint();
    SpinMatrices s;
    s.x = 0.5 * (jp + jm);
    s.y = cplx(0.0, -0.5) * (jp - jm);
    s.z = jz;
    return s;
}

CMatrix rotation_unitary(std::int64_t twice_j, double vx, double vy) {
    if (twice_j < 0) {
        throw ValidationError("spin must be non-negative");
    }
    return exp_i_hermitian(rotation_generator(twice_j, vx, vy, twice_j + 1));
}

CMatrix block_state(const ModelParams& p, const LocalParam& u, std::int64_t twice_j) {
    validate_params(p);
    require_spin(p.n, twice_j);
    const double m = checked_local_mu(p, u);
    const Eigen::Index d = twice_j + 1;
    const RVector pops = block_populations(m, twice_j, d);
    const double s = std::sqrt(static_cast<double>(p.n));
    const CMatrix rot = rotation_unitary(twice_j, u.x() / s, u.y() / s);
    CMatrix rho = rot * pops.cast<cplx>().asDiagonal() * rot.adjoint();
    return 0.5 * (rho + rho.adjoint());
}

BlockCorner block_state_corner(const ModelParams& p, const LocalParam& u, std::int64_t twice_j,
                               int levels) {
    if (levels < 1) {
        throw ValidationError("block corner needs at least one level");
    }
    BlockCorner out;
    if (levels >= twice_j + 1) {
        out.m = block_state(p, u, twice_j);
        return out;
    }
    validate_params(p);
    const double m = checked_local_mu(p, u);
    // Work space wide enough that the dropped boundary does not reach the kept corner.
    const Eigen::Index w = std::min<Eigen::Index>(twice_j + 1, 2 * levels + 40);
    const double s = std::sqrt(static_cast<double>(p.n));
    const CMatrix rot = exp_i_hermitian(rotation_generator(twice_j, u.x() / s, u.y() / s, w));
    const RVector pops = block_populations(m, twice_j, levels);
    const CMatrix cols = rot.topLeftCorner(levels, levels);
    out.m = cols * pops.cast<cplx>().asDiagonal() * cols.adjoint();
    out.m = 0.5 * (out.m + out.m.adjoint());
    out.tail = std::max(0.0, 1.0 - pops.sum());
    return out;
}

CMatrix local_qubit_state(double mu, const Eigen::Vector3d& v) {
    const double top = mu + v.z();
    if (!(top >= 0.0 && top <= 1.0)) {
        std::ostringstream os;
        os << "local qubit state needs 0 <= mu + v_z <= 1 (got " << top << ")";
        throw OutsideModelError(os.str());
    }
    const double r = std::hypot(v.x(), v.y());
    CMatrix u = CMatrix::Identity(2, 2) * std::cos(r);
    if (r > 0.0) {
        const double sr = std::sin(r) / r;
        u(0, 1) += cplx(0.0, sr) * cplx(v.x(), -v.y());
        u(1, 0) += cplx(0.0, sr) * cplx(v.x(), v.y());
    }
    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = top;
    d(1, 1) = 1.0 - top;
    CMatrix rho = u * d * u.adjoint();
    return 0.5 * (rho + rho.adjoint());
}

BlockIndexSampler::BlockIndexSampler(const ModelParams& p, const LocalParam& u) {
    validate_params(p);
    const double m = checked_local_mu(p, u);
    const double nd = static_cast<double>(p.n);
    const std::int64_t lo_limit = min_twice_spin(p.n);
    const std::int64_t hi_limit = p.n;
    const double centre = nd * (2.0 * m - 1.0);  // in units of 2j
    const double spread = 2.0 * std::sqrt(nd * m * (1.0 - m)) + 2.0;
    double half = 16.0 * spread;
    for (;;) {
        auto align = [&](double x, bool up) {
            std::int64_t t = static_cast<std::int64_t>(up ? std::ceil(x) : std::floor(x));
            t = std::clamp(t, lo_limit, hi_limit);
            if ((p.n - t) % 2 != 0) {
                t += up ? 1 : -1;
            }
            return std::clamp(t, lo_limit, hi_limit);
        };
        const std::int64_t lo = align(centre - half, true);
        const std::int64_t hi = align(centre + half, false);
        twice_j_.clear();
        pmf_.clear();
        double total = 0.0;
        for (std::int64_t t = lo; t <= hi; t += 2) {
            const double q = block_probability(p, u, t);
            twice_j_.push_back(t);
            pmf_.push_back(q);
            total += q;
        }
        tail_ = std::max(0.0, 1.0 - total);
        const bool full = lo == lo_limit && hi == hi_limit;
        if (tail_ < tol::pmf_tail || full) {
            break;
        }
        half *= 2.0;
    }
    cdf_.resize(pmf_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < pmf_.size(); ++i) {
        acc += pmf_[i];
        cdf_[i] = acc;
    }
}

std::int64_t BlockIndexSampler::sample(Rng& rng) const {
    const double x = rng.uniform() * cdf_.back();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), x);
    if (it == cdf_.end()) {
        --it;
    }
    return twice_j_[static_cast<std::size_t>(it - cdf_.begin())];
}

SpinRange typical_set(const ModelParams& p, double eps) {
    validate_params(p);
    if (!(eps > 0.0 && eps < 0.5)) {
        throw ValidationError("typical set needs 0 < eps < 1/2");
    }
    const double nd = static_cast<double>(p.n);
    const double centre = nd * (p.mu - 0.5);
    const double half = std::pow(nd, 0.5 + eps);
    // Work in units of 2j; valid labels share the parity of n.
    std::int64_t lo = static_cast<std::int64_t>(std::ceil(2.0 * (centre - half) - 1e-9));
    std::int64_t hi = static_cast<std::int64_t>(std::floor(2.0 * (centre + half) + 1e-9));
    lo = std::max(lo, min_twice_spin(p.n));
    hi = std::min(hi, p.n);
    if ((p.n - lo) % 2 != 0) {
        ++lo;
    }
    if ((p.n - hi) % 2 != 0) {
        --hi;
    }
    if (lo > hi) {
        throw ComputationError("typical set is empty");
    }
    return {lo, hi};
}

}  // namespace qlan
