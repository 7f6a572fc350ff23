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

#include "qlan/fock_gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qlan/errors.hpp"

namespace qlan {

namespace {

void require_dim(int dim) {
    if (dim < 1) {
        throw ValidationError("Fock dimension must be positive");
    }
}

void require_mu(double mu) {
    if (!(mu > 0.5 && mu < 1.0)) {
        std::ostringstream os;
        os << "mu = " << mu << " violates 1/2 < mu < 1";
        throw ValidationError(os.str());
    }
}

// Number of thermal populations needed before the remaining weight is below 1e-18.
int thermal_terms(double p) {
    if (p <= 0.0) {
        return 1;
    }
    const double k = std::ceil(std::log(1e-18) / std::log(p));
    return static_cast<int>(std::clamp(k, 1.0, 20000.0));
}

void check_budget(double tail, int dim, double mu, const LocalParam& u) {
    if (tail > tol::fock_budget) {
        std::ostringstream os;
        os << "Fock truncation at dim " << dim << " loses " << tail << " of the trace (budget "
           << tol::fock_budget << "); use at least dim " << auto_fock_dim(mu, u);
        throw ComputationError(os.str());
    }
}

}  // namespace

FockDensity thermal_state(double p, int dim) {
    require_dim(dim);
    if (!(p >= 0.0 && p < 1.0)) {
        throw ValidationError("thermal state needs 0 <= p < 1");
    }
    FockDensity out;
    out.m = CMatrix::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) {
        out.m(k, k) = (1.0 - p) * std::pow(p, k);
    }
    out.tail = std::pow(p, dim);
    return out;
}

CVector coherent_vector(cplx z, int dim) {
    require_dim(dim);
    CVector v(dim);
    v(0) = std::exp(-0.5 * std::norm(z));
    for (int k = 1; k < dim; ++k) {
        v(k) = v(k - 1) * z / std::sqrt(static_cast<double>(k));
    }
    return v;
}

CMatrix displaced_number_states(cplx beta, int count, int dim) {
    require_dim(dim);
    // D|k> = (a^* - conj(beta))^k |beta> / sqrt(k!); raising only reads lower levels,
    // so the recursion is exact on the truncated space.
    CMatrix cols(dim, count);
    CVector v = coherent_vector(beta, dim);
    const cplx bc = std::conj(beta);
    for (int k = 0; k < count; ++k) {
        if (k > 0) {
            CVector next(dim);
            for (int m = dim - 1; m >= 0; --m) {
                const cplx raised = m > 0 ? std::sqrt(static_cast<double>(m)) * v(m - 1) : cplx(0.0);
                next(m) = (raised - bc * v(m)) / std::sqrt(static_cast<double>(k));
            }
            v = next;
        }
        cols.col(k) = v;
    }
    return cols;
}

cplx displacement_amplitude(double mu, const LocalParam& u) {
    return std::sqrt(2.0 * mu - 1.0) * cplx(-u.y(), u.x());
}

double thermal_ratio(double mu) {
    require_mu(mu);
    return (1.0 - mu) / mu;
}

FockDensity displaced_thermal(double mu, const LocalParam& u, int dim) {
    require_dim(dim);
    const double p = thermal_ratio(mu);
    const int terms = thermal_terms(p);
    const CMatrix cols = displaced_number_states(displacement_amplitude(mu, u), terms, dim);
    RVector w(terms);
    for (int k = 0; k < terms; ++k) {
        w(k) = (1.0 - p) * std::pow(p, k);
    }
    FockDensity out;
    out.m = cols * w.cast<cplx>().asDiagonal() * cols.adjoint();
    out.m = 0.5 * (out.m + out.m.adjoint());
    out.tail = std::max(0.0, 1.0 - out.m.trace().real());
    check_budget(out.tail, dim, mu, u);
    return out;
}

FockDensity displaced_thermal_quadrature(double mu, const LocalParam& u, int dim, int order) {
    require_dim(dim);
    require_mu(mu);
    if (order < 1) {
        throw ValidationError("quadrature order must be positive");
    }
    const double s2 = (1.0 - mu) / (4.0 * mu - 2.0);
    const cplx beta = displacement_amplitude(mu, u);
    // Combine the mixing Gaussian with the e^{-|z|^2} of the coherent projector.
    const double kappa = 1.0 + 0.5 / s2;
    const cplx centre = beta / (1.0 + 2.0 * s2);
    const double prefactor = std::exp(-std::norm(beta) / (1.0 + 2.0 * s2)) / (pi * (1.0 + 2.0 * s2));
    const GaussHermite gh = gauss_hermite(order);
    const double scale = 1.0 / std::sqrt(kappa);
    FockDensity out;
    out.m = CMatrix::Zero(dim, dim);
    CVector e(dim);
    for (int a = 0; a < order; ++a) {
        for (int b = 0; b < order; ++b) {
            const cplx z = centre + scale * cplx(gh.nodes[a], gh.nodes[b]);
            e(0) = 1.0;
            for (int k = 1; k < dim; ++k) {
                e(k) = e(k - 1) * z / std::sqrt(static_cast<double>(k));
            }
            out.m.noalias() += (prefactor * gh.weights[a] * gh.weights[b]) * (e * e.adjoint());
        }
    }
    out.m = 0.5 * (out.m + out.m.adjoint());
    out.tail = std::max(0.0, 1.0 - out.m.trace().real());
    return out;
}

int auto_fock_dim(double mu, const LocalParam& u) {
    require_mu(mu);
    const double b2 = std::norm(displacement_amplitude(mu, u));
    int dim = u.head<2>().norm() <= 2.0 ? 40 : std::max(40, static_cast<int>(std::ceil(10.0 + 4.0 * b2)));
    const double p = thermal_ratio(mu);
    const int terms = thermal_terms(p);
    for (;;) {
        const CMatrix cols = displaced_number_states(displacement_amplitude(mu, u), terms, dim);
        double kept = 0.0;
        for (int k = 0; k < terms; ++k) {
            kept += (1.0 - p) * std::pow(p, k) * cols.col(k).squaredNorm();
        }
        if (1.0 - kept <= 0.1 * tol::fock_budget || dim > 4000) {
            return dim;
        }
        dim += 10;
    }
}

GaussHermite gauss_hermite(int order) {
    if (order < 1) {
        throw ValidationError("quadrature order must be positive");
    }
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(order, order);
    for (int i = 0; i + 1 < order; ++i) {
        jac(i, i + 1) = jac(i + 1, i) = std::sqrt(0.5 * (i + 1));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jac, Eigen::EigenvaluesOnly);
    // Orthonormal Hermite recursion; returns p_{order-1}(x), p_order(x) and sum_k p_k(x)^2.
    auto recurse = [order](double x, double& prev, double& last) {
        double a = std::pow(pi, -0.25);
        double b = 0.0;
        double sum = 0.0;
        for (int k = 0; k < order; ++k) {
            sum += a * a;
            const double next = std::sqrt(2.0 / (k + 1)) * x * a - std::sqrt(double(k) / (k + 1)) * b;
            b = a;
            a = next;
        }
        prev = b;
        last = a;
        return sum;
    };
    GaussHermite gh;
    gh.nodes.resize(order);
    gh.weights.resize(order);
    for (int i = 0; i < order; ++i) {
        // Eigenvalues give nodes to roundoff; Newton steps on p_order tighten the large ones.
        double x = solver.eigenvalues()(i);
        double prev = 0.0, last = 0.0;
        for (int it = 0; it < 3; ++it) {
            recurse(x, prev, last);
            x -= last / (std::sqrt(2.0 * order) * prev);
        }
        // Christoffel weights keep full relative accuracy at the outer nodes.
        gh.nodes[i] = x;
        gh.weights[i] = 1.0 / recurse(x, prev, last);
    }
    return gh;
}

double q_function(const CMatrix& rho, cplx z) {
    const CVector c = coherent_vector(z, static_cast<int>(rho.rows()));
    return (c.adjoint() * rho * c)(0, 0).real() / pi;
}

HeterodyneSampler::HeterodyneSampler(const CMatrix& rho) : rho_(rho) {
    if (rho.rows() < 1 || rho.rows() != rho.cols()) {
        throw ValidationError("heterodyne sampler needs a square density matrix");
    }
    const Eigen::Index d = rho.rows();
    cplx m(0.0), second(0.0);
    double number = 0.0;
    for (Eigen::Index k = 0; k < d; ++k) {
        number += rho(k, k).real() * static_cast<double>(k + 1);
        if (k + 1 < d) {
            m += rho(k + 1, k) * std::sqrt(static_cast<double>(k + 1));
        }
        if (k + 2 < d) {
            second += rho(k + 2, k) * std::sqrt(static_cast<double>((k + 1) * (k + 2)));
        }
    }
    mean_ = m;
    const double var_re = 0.5 * (number + second.real()) - m.real() * m.real();
    const double var_im = 0.5 * (number - second.real()) - m.imag() * m.imag();
    sigma2_ = 1.5 * std::max({var_re, var_im, 0.5});

    // Domination constant from a grid over +-10 envelope widths.
    const double sigma = std::sqrt(sigma2_);
    const int half = 60;
    const double step = 10.0 * sigma / half;
    double worst = 0.0;
    double edge = 0.0;
    for (int a = -half; a <= half; ++a) {
        for (int b = -half; b <= half; ++b) {
            const cplx z = mean_ + cplx(a * step, b * step);
            const double r = q_function(rho_, z) / envelope(z);
            worst = std::max(worst, r);
            if (std::abs(a) == half || std::abs(b) == half) {
                edge = std::max(edge, r);
            }
        }
    }
    if (!(worst > 0.0) || edge > 0.5 * worst) {
        throw ComputationError("heterodyne envelope does not dominate the Q function");
    }
    bound_ = 1.05 * worst;
    if (acceptance_rate() < tol::min_acceptance) {
        std::ostringstream os;
        os << "heterodyne acceptance rate " << acceptance_rate() << " below " << tol::min_acceptance;
        throw ComputationError(os.str());
    }
}

double HeterodyneSampler::envelope(cplx z) const {
    return std::exp(-std::norm(z - mean_) / (2.0 * sigma2_)) / (2.0 * pi * sigma2_);
}

cplx HeterodyneSampler::sample(Rng& rng) const {
    const double sigma = std::sqrt(sigma2_);
    for (;;) {
        const cplx z = mean_ + cplx(rng.normal(0.0, sigma), rng.normal(0.0, sigma));
        const double accept = q_function(rho_, z) / (bound_ * envelope(z));
        if (rng.uniform() < accept) {
            return z;
        }
    }
}

cplx sample_heterodyne(const CMatrix& rho, Rng& rng) { return HeterodyneSampler(rho).sample(rng); }

CMatrix embed_isometry(std::int64_t twice_j, int dim) {
    if (twice_j < 0) {
        throw ValidationError("spin must be non-negative");
    }
    if (dim < twice_j + 1) {
        std::ostringstream os;
        os << "Fock dimension " << dim << " cannot hold a spin block of dimension " << twice_j + 1;
        throw ValidationError(os.str());
    }
    CMatrix v = CMatrix::Zero(dim, twice_j + 1);
    for (std::int64_t k = 0; k <= twice_j; ++k) {
        v(k, k) = 1.0;
    }
    return v;
}

CMatrix block_projector(std::int64_t twice_j, int dim) {
    const CMatrix v = embed_isometry(twice_j, dim);
    return v * v.adjoint();
}

}  // namespace qlan
