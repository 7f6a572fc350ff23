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

#include "qlan/estimator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include <Eigen/Geometry>

#include "qlan/errors.hpp"
#include "qlan/qsde.hpp"

namespace qlan {

namespace {

std::string fmt(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

}  // namespace

double interaction_time(const EstimatorConfig& c, std::int64_t n) {
    return c.t > 0.0 ? c.t : std::log(double(n));
}

double energy_time(const EstimatorConfig& c, std::int64_t n) {
    return c.t_energy > 0.0 ? c.t_energy : double(n);
}

void validate_config(const EstimatorConfig& c) {
    if (!(c.kappa > 0.0 && c.kappa < 1.0)) {
        throw ValidationError("kappa = " + fmt(c.kappa) + " violates 0 < kappa < 1");
    }
    if (!(c.eps > 0.0 && c.eps < c.eta && c.eta < 1.0 / 6.0)) {
        throw ValidationError("eps = " + fmt(c.eps) + ", eta = " + fmt(c.eta) +
                              " violate 0 < eps < eta < 1/6");
    }
    if (!(c.kappa < 2.0 * c.eps)) {
        throw ValidationError("kappa = " + fmt(c.kappa) + " violates kappa < 2 eps (eps = " +
                              fmt(c.eps) + ")");
    }
    if (c.t < 0.0 || c.t_energy < 0.0) throw ValidationError("t and t_energy must be >= 0");
    if (c.fock_dim < 0) throw ValidationError("fock_dim must be >= 0");
    if (!(c.eps2 > 0.0 && c.eps2 < 0.5)) throw ValidationError("eps2 must lie in (0, 1/2)");
}

std::int64_t stage1_size(std::int64_t n, double kappa) {
    return static_cast<std::int64_t>(std::ceil(std::pow(double(n), 1.0 - kappa) - 1e-9));
}

Eigen::Matrix3d frame_rotation(const Eigen::Vector3d& r) {
    const double norm = r.norm();
    if (norm == 0.0) return Eigen::Matrix3d::Identity();
    return Eigen::Quaterniond::FromTwoVectors(r / norm, Eigen::Vector3d::UnitZ())
        .toRotationMatrix();
}

Stage1Result stage1(const QubitState& rho_true, std::int64_t n_tilde, Rng& rng) {
    if (n_tilde < 3) throw ValidationError("stage 1 needs at least 3 qubits");
    Stage1Result s;
    s.n_tilde = n_tilde;
    const Eigen::Vector3d& r = rho_true.bloch();
    for (int a = 0; a < 3; ++a) {
        // round-robin split: the first n_tilde % 3 axes get one extra copy
        const std::int64_t count = n_tilde / 3 + (a < n_tilde % 3 ? 1 : 0);
        const double p = std::clamp(0.5 * (1.0 + r(a)), 0.0, 1.0);
        const std::int64_t k = rng.binomial(count, p);
        s.r_tilde(a) = double(2 * k - count) / double(count);
    }
    Eigen::Vector3d proj = s.r_tilde;
    if (proj.norm() > 1.0) proj /= proj.norm();
    s.rho_tilde = QubitState(proj);
    s.frame = frame_rotation(proj);
    s.mu_tilde = 0.5 * (1.0 + proj.norm());
    return s;
}

Eigen::Vector3d local_bloch(double mu, const Eigen::Vector3d& v) {
    const double len = 2.0 * (mu + v.z()) - 1.0;
    const double th = std::hypot(v.x(), v.y());
    if (th == 0.0) return {0.0, 0.0, len};
    const double s = std::sin(2.0 * th) / th;
    return {-len * s * v.y(), len * s * v.x(), len * std::cos(2.0 * th)};
}

LocalParam localize_frame(const QubitState& rho_true, const Stage1Result& s1, std::int64_t n_rest,
                          double eps2) {
    if (s1.mu_tilde - 0.5 < eps2) {
        throw OutsideModelError("stage-1 estimate has mu_tilde - 1/2 = " +
                                fmt(s1.mu_tilde - 0.5) + " < eps2");
    }
    const Eigen::Vector3d b = s1.frame * rho_true.bloch();
    const double len = b.norm();
    const double mu_rot = 0.5 * (1.0 + len);
    if (mu_rot - 0.5 < eps2) {
        throw OutsideModelError("true state has mu - 1/2 = " + fmt(mu_rot - 0.5) + " < eps2");
    }
    const double th = 0.5 * std::acos(std::clamp(b.z() / len, -1.0, 1.0));
    const double bxy = std::hypot(b.x(), b.y());
    LocalParam v(0.0, 0.0, mu_rot - s1.mu_tilde);
    if (bxy > 0.0) {
        v.x() = th * b.y() / bxy;
        v.y() = -th * b.x() / bxy;
    }
    return std::sqrt(double(n_rest)) * v;
}

ExactStage2Cache::ExactStage2Cache(const ModelParams& est, const LocalParam& u, int fock_dim)
    : est_(est), u_(u), dim_(fock_dim > 0 ? fock_dim : auto_fock_dim(est.mu, u)),
      blocks_(est, u) {}

const HeterodyneSampler& ExactStage2Cache::heterodyne(std::int64_t twice_j) {
    auto it = het_.find(twice_j);
    if (it != het_.end()) return *it->second;
    const int levels = int(std::min<std::int64_t>(dim_, twice_j + 1));
    BlockCorner corner = block_state_corner(est_, u_, twice_j, levels);
    if (corner.tail > tol::fock_budget) {
        std::ostringstream os;
        os << "fock_dim = " << dim_ << " drops " << corner.tail << " of block 2j = " << twice_j
           << "; raise fock_dim";
        throw ComputationError(os.str());
    }
    CMatrix rho = CMatrix::Zero(dim_, dim_);
    rho.topLeftCorner(levels, levels) = corner.m / corner.m.trace().real();
    auto ins = het_.emplace(twice_j, std::make_unique<HeterodyneSampler>(rho));
    return *ins.first->second;
}

Stage2Draw stage2_sample(const ModelParams& est, const LocalParam& u, const EstimatorConfig& c,
                         Rng& rng, ExactStage2Cache* cache) {
    validate_params(est);
    const double scale = std::sqrt(2.0 * est.mu - 1.0);
    const double mu_s = local_mu(est, u);
    if (!(mu_s > 0.5 && mu_s < 1.0)) {
        throw OutsideModelError("mu_u = " + fmt(mu_s) + " violates 1/2 < mu_u < 1");
    }
    Stage2Draw d;
    cplx z;
    if (c.sampler == SamplerMode::gaussian) {
        const double sd = std::sqrt(mu_s / (2.0 * (2.0 * mu_s - 1.0)));
        const cplx centre = displacement_amplitude(mu_s, u);
        const double re = rng.normal(centre.real(), sd);
        const double im = rng.normal(centre.imag(), sd);
        z = cplx(re, im);
        d.g = rng.normal(u.z(), std::sqrt(mu_s * (1.0 - mu_s)));
    } else {
        if (cache == nullptr) throw ValidationError("exact stage-2 sampling needs a cache");
        const std::int64_t twice_j = cache->blocks().sample(rng);
        z = cache->heterodyne(twice_j).sample(rng);
        const double nd = double(est.n);
        const double y =
            energy_measurement_sample(est.n, twice_j, energy_time(c, est.n), rng);
        // tau kernel: variance 1 / (2 sqrt n), as in the forward channel
        d.g = y - std::sqrt(nd) * (est.mu - 0.5) +
              rng.normal(0.0, std::sqrt(0.5 / std::sqrt(nd)));
        d.twice_j = twice_j;
    }
    d.ux = z.imag() / scale;
    d.uy = -z.real() / scale;
    return d;
}

Truncated truncate_estimate(const Stage2Draw& raw, double eta, std::int64_t n) {
    const double cut = 3.0 * std::pow(double(n), eta);
    Truncated t;
    const double in[3] = {raw.ux, raw.uy, raw.g};
    for (int i = 0; i < 3; ++i) {
        t.flags[i] = std::abs(in[i]) > cut;
        t.u_hat(i) = t.flags[i] ? 0.0 : in[i];
    }
    return t;
}

QubitState reconstruct(const Stage1Result& s1, const LocalParam& u_hat, std::int64_t n_rest) {
    Eigen::Vector3d v = u_hat / std::sqrt(double(n_rest));
    v.z() = std::clamp(v.z(), -s1.mu_tilde, 1.0 - s1.mu_tilde);
    const Eigen::Vector3d b = s1.frame.transpose() * local_bloch(s1.mu_tilde, v);
    return QubitState(b.norm() > 1.0 ? Eigen::Vector3d(b / b.norm()) : b);
}

EstimateResult full_estimate(const QubitState& rho_true, std::int64_t n, const EstimatorConfig& c,
                             Rng& rng, const EstimatorHooks& hooks) {
    validate_config(c);
    const std::int64_t n_tilde = stage1_size(n, c.kappa);
    if (n_tilde < 3 || n - n_tilde < 1) {
        throw ValidationError("n = " + std::to_string(n) + " is too small for kappa = " +
                              fmt(c.kappa));
    }
    EstimateResult r;
    r.n_rest = n - n_tilde;
    if (hooks.exact_stage1 != nullptr) {
        const Eigen::Vector3d b = hooks.exact_stage1->bloch();
        r.stage1.r_tilde = b;
        r.stage1.rho_tilde = *hooks.exact_stage1;
        r.stage1.frame = frame_rotation(b);
        r.stage1.mu_tilde = 0.5 * (1.0 + b.norm());
        r.stage1.n_tilde = n_tilde;
    } else {
        r.stage1 = stage1(rho_true, n_tilde, rng);
    }
    r.u_true = localize_frame(rho_true, r.stage1, r.n_rest, c.eps2);
    const ModelParams est{r.stage1.mu_tilde, r.n_rest};
    if (hooks.zero_noise) {
        r.raw = Stage2Draw{r.u_true.x(), r.u_true.y(), r.u_true.z(), -1};
    } else if (c.sampler == SamplerMode::exact) {
        ExactStage2Cache cache(est, r.u_true, c.fock_dim);
        r.raw = stage2_sample(est, r.u_true, c, rng, &cache);
    } else {
        r.raw = stage2_sample(est, r.u_true, c, rng);
    }
    if (c.truncate) {
        const Truncated t = truncate_estimate(r.raw, c.eta, r.n_rest);
        r.u_hat = t.u_hat;
        r.truncated = t.flags;
    } else {
        r.u_hat = LocalParam(r.raw.ux, r.raw.uy, r.raw.g);
    }
    r.rho_hat = reconstruct(r.stage1, r.u_hat, r.n_rest);
    return r;
}

}  // namespace qlan
