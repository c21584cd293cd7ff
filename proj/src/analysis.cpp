/*
   Copyright 2026 The genmis Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include "genmis/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "genmis/errors.hpp"

namespace genmis {

namespace {

constexpr double kUnbiasedTolerance = 1e-8;

void require_positive(std::span<const double> values, const char* what) {
    for (double x : values) {
        if (!(x > 0)) {
            std::ostringstream msg;
            msg << what << " requires strictly positive values (got " << x << ")";
            throw NonPositiveValue(msg.str());
        }
    }
}

void require_same_size(std::size_t a, std::size_t b, const char* what) {
    if (a != b) throw ValidationError(std::string(what) + ": length mismatch");
}

// S(p) = sum alpha_i v_i^p
double power_sum(const MomentTable& m, double p) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) s += m.alpha[i] * std::pow(m.v[i], p);
    return s;
}

} // namespace

double weighted_mean(MeanKind kind, std::span<const double> values,
                     const SimplexVector& weights, double p) {
    require_same_size(values.size(), weights.size(), "weighted_mean");
    double s = 0.0;
    switch (kind) {
    case MeanKind::arithmetic:
        for (std::size_t i = 0; i < values.size(); ++i) s += weights[i] * values[i];
        return s;
    case MeanKind::harmonic:
        require_positive(values, "harmonic mean");
        for (std::size_t i = 0; i < values.size(); ++i) s += weights[i] / values[i];
        return 1.0 / s;
    case MeanKind::power:
        require_positive(values, "power mean");
        if (p == 0.0) {
            for (std::size_t i = 0; i < values.size(); ++i)
                s += weights[i] * std::log(values[i]);
            return std::exp(s);
        }
        for (std::size_t i = 0; i < values.size(); ++i)
            s += weights[i] * std::pow(values[i], p);
        return std::pow(s, 1.0 / p);
    }
    return s;
}

Real mixture_pdf(const Problem& problem, const SimplexVector& alpha, Real x) {
    require_same_size(problem.size(), alpha.size(), "mixture_pdf");
    Real psi = 0;
    for (std::size_t k = 0; k < alpha.size(); ++k)
        psi += alpha[k] * problem.techniques[k].pdf(x);
    return psi;
}

TechniqueMoments technique_moments(const Problem& problem,
                                   const QuadratureConfig& cfg) {
    const RealFn& f = problem.integrand;
    TechniqueMoments tm;
    tm.mu = integrate(f, problem.domain, cfg);
    for (const auto& t : problem.techniques) {
        const RealFn& p = t.pdf;
        const double mu_i = integrate(
            [&](Real x) { return p(x) > 0 ? f(x) : Real{0}; }, problem.domain, cfg);
        const Real centre = mu_i;
        const double v = integrate(
            [&](Real x) {
                const Real px = p(x);
                if (!(px > 0)) return Real{0};
                const Real d = f(x) - centre * px;
                return d * d / px;
            },
            problem.domain, cfg);
        tm.mu_i.push_back(mu_i);
        tm.v.push_back(std::max(0.0, v));
    }
    return tm;
}

MomentTable moments(const Problem& problem, const SimplexVector& alpha,
                    const QuadratureConfig& cfg) {
    return moments(problem, alpha, technique_moments(problem, cfg), cfg);
}

MixtureMoments mixture_moments(const Problem& problem, const SimplexVector& alpha,
                               const QuadratureConfig& cfg) {
    require_same_size(problem.size(), alpha.size(), "moments");
    const RealFn& f = problem.integrand;
    auto ratio = [&](Real x) {
        const Real psi = mixture_pdf(problem, alpha, x);
        return psi > 0 ? f(x) / psi : Real{0};
    };

    MixtureMoments mm;
    for (const auto& t : problem.techniques) {
        const RealFn& p = t.pdf;
        const double mp = integrate([&](Real x) { return ratio(x) * p(x); },
                                    problem.domain, cfg);
        const Real centre = mp;
        const double s2 = integrate(
            [&](Real x) {
                const Real d = ratio(x) - centre;
                return d * d * p(x);
            },
            problem.domain, cfg);
        mm.mu_prime.push_back(mp);
        mm.sigma_prime_sq.push_back(std::max(0.0, s2));
    }
    return mm;
}

MomentTable moments(const Problem& problem, const SimplexVector& alpha,
                    const TechniqueMoments& tm, const QuadratureConfig& cfg) {
    require_same_size(problem.size(), tm.v.size(), "moments");
    MixtureMoments mm = mixture_moments(problem, alpha, cfg);
    return MomentTable{alpha, std::move(mm.mu_prime), std::move(mm.sigma_prime_sq),
                       tm.v, tm.mu_i, tm.mu};
}

double variance_f1(const MomentTable& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) s += m.alpha[i] * m.sigma_prime_sq[i];
    return s;
}

double variance_g1(const MomentTable& m, const SimplexVector& beta) {
    require_same_size(m.size(), beta.size(), "variance_g1");
    double s = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i)
        s += m.alpha[i] * m.alpha[i] * m.sigma_prime_sq[i] / beta[i];
    return s;
}

double variance_gap(const MomentTable& m) {
    // Centered form: sum alpha_i (mu'_i - mu)^2, with mu = sum alpha_i mu'_i.
    double mean = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) mean += m.alpha[i] * m.mu_prime[i];
    double s = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double d = m.mu_prime[i] - mean;
        s += m.alpha[i] * d * d;
    }
    return s;
}

BoundsReport bounds_unbiased(const MomentTable& m) {
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (std::fabs(m.mu_i[i] - m.mu) > kUnbiasedTolerance * std::fabs(m.mu)) {
            std::ostringstream msg;
            msg << "technique " << i << " is biased: mu_i=" << m.mu_i[i]
                << ", mu=" << m.mu;
            throw BiasedTechnique(msg.str());
        }
    }
    require_positive(m.v, "unbiased bounds");

    std::vector<double> v2(m.v.size());
    std::transform(m.v.begin(), m.v.end(), v2.begin(), [](double x) { return x * x; });

    BoundsReport r;
    const double mu2 = m.mu * m.mu;
    r.arithmetic_mean = weighted_mean(MeanKind::arithmetic, m.v, m.alpha);
    r.harmonic_mean = weighted_mean(MeanKind::harmonic, m.v, m.alpha);
    r.power_mean_neg_half = weighted_mean(MeanKind::power, m.v, m.alpha, -0.5);
    const double h = r.harmonic_mean;
    const double h_sq = weighted_mean(MeanKind::harmonic, v2, m.alpha);
    r.harmonic_bound = h + mu2 * (h * h / h_sq - 1.0);
    r.arithmetic_bound = r.arithmetic_mean;
    r.power_half_bound =
        r.power_mean_neg_half + mu2 * (r.power_mean_neg_half / h - 1.0);
    r.variance_F1 = variance_f1(m);
    return r;
}

BoundsReport bounds_biased(const MomentTable& m) {
    require_positive(m.v, "biased bounds");
    const std::size_t n = m.size();
    std::vector<double> mu_sq(n);
    for (std::size_t i = 0; i < n; ++i) mu_sq[i] = m.mu_i[i] * m.mu_i[i];

    BoundsReport r;
    const double mu2 = m.mu * m.mu;
    r.arithmetic_mean = weighted_mean(MeanKind::arithmetic, m.v, m.alpha);
    r.harmonic_mean = weighted_mean(MeanKind::harmonic, m.v, m.alpha);
    r.power_mean_neg_half = weighted_mean(MeanKind::power, m.v, m.alpha, -0.5);
    const double h = r.harmonic_mean;
    const double pw = r.power_mean_neg_half;

    r.arithmetic_bound =
        r.arithmetic_mean + weighted_mean(MeanKind::arithmetic, mu_sq, m.alpha) - mu2;

    // Techniques with mu_i = 0 contribute nothing to the correction sums.
    double inv_h_ratio = 0.0, inv_p_ratio = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        inv_h_ratio += m.alpha[i] * mu_sq[i] / (m.v[i] * m.v[i]);
        inv_p_ratio += m.alpha[i] * mu_sq[i] / m.v[i];
    }
    r.harmonic_bound = h + h * h * inv_h_ratio - mu2;
    r.power_half_bound = pw + pw * inv_p_ratio - mu2;
    r.variance_F1 = variance_f1(m);
    return r;
}

double generalized_bound(const MomentTable& m, double t, bool biased) {
    require_positive(m.v, "generalized bound");
    const double s_t = power_sum(m, -t);
    const double lead = power_sum(m, 1.0 - 2.0 * t) / (s_t * s_t);
    const double mu2 = m.mu * m.mu;
    if (!biased) return lead + mu2 * (power_sum(m, -2.0 * t) / (s_t * s_t) - 1.0);
    double cross = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i)
        cross += m.alpha[i] * m.mu_i[i] * m.mu_i[i] * std::pow(m.v[i], -2.0 * t);
    return lead + cross / (s_t * s_t) - mu2;
}

double inverse_efficiency(const MomentTable& m, const SimplexVector& beta,
                          std::span<const double> costs) {
    require_same_size(m.size(), costs.size(), "inverse_efficiency");
    require_positive(costs, "inverse efficiency");
    double cost = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) cost += beta[i] * costs[i];
    return cost * variance_g1(m, beta);
}

} // namespace genmis
