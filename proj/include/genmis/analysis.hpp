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

#pragma once

#include <span>
#include <vector>

#include "genmis/model.hpp"
#include "genmis/quadrature.hpp"

namespace genmis {

/// All quadrature-derived quantities for one alpha. Recomputed only by an
/// explicit call to moments().
///
///   mu_prime[i]       = int f p_i / psi
///   sigma_prime_sq[i] = int (f/psi - mu_prime[i])^2 p_i
///   v[i]              = int (f/p_i - mu_i[i])^2 p_i
///   mu_i[i]           = int over {p_i > 0} of f
///
/// with psi = sum_k alpha_k p_k.
struct MomentTable {
    SimplexVector alpha;
    std::vector<double> mu_prime;
    std::vector<double> sigma_prime_sq;
    std::vector<double> v;
    std::vector<double> mu_i;
    double mu = 0.0;

    std::size_t size() const noexcept { return mu_prime.size(); }
};

struct BoundsReport {
    double arithmetic_bound = 0.0;   // B2
    double harmonic_bound = 0.0;     // B1
    double power_half_bound = 0.0;   // B3
    double harmonic_mean = 0.0;
    double arithmetic_mean = 0.0;
    double power_mean_neg_half = 0.0;
    double variance_F1 = 0.0;
};

enum class MeanKind { arithmetic, harmonic, power };

/// Weighted mean of `values`. For MeanKind::power the exponent `p` is used
/// ((sum w x^p)^(1/p), geometric at p = 0). Harmonic and power means need
/// strictly positive values; otherwise NonPositiveValue.
double weighted_mean(MeanKind kind, std::span<const double> values,
                     const SimplexVector& weights, double p = 1.0);

/// psi_alpha(x) = sum_k alpha_k p_k(x).
Real mixture_pdf(const Problem& problem, const SimplexVector& alpha, Real x);

/// The alpha-dependent part of a MomentTable: mu'_i and sigma'_i^2.
struct MixtureMoments {
    std::vector<double> mu_prime;
    std::vector<double> sigma_prime_sq;
};

MixtureMoments mixture_moments(const Problem& problem, const SimplexVector& alpha,
                               const QuadratureConfig& cfg = {});

/// Alpha-independent single-technique statistics (v_i, mu_i, mu).
TechniqueMoments technique_moments(const Problem& problem,
                                   const QuadratureConfig& cfg = {});

MomentTable moments(const Problem& problem, const SimplexVector& alpha,
                    const QuadratureConfig& cfg = {});

/// Same as above but reuses precomputed technique statistics.
MomentTable moments(const Problem& problem, const SimplexVector& alpha,
                    const TechniqueMoments& tm, const QuadratureConfig& cfg = {});

/// sum alpha_i sigma'_i^2
double variance_f1(const MomentTable& m);

/// sum alpha_i^2 sigma'_i^2 / beta_i
double variance_g1(const MomentTable& m, const SimplexVector& beta);

/// One-sample variance excess of the randomized mixture over the
/// deterministic one: sum alpha_i mu'_i^2 - mu^2.
double variance_gap(const MomentTable& m);

/// The three bounds for unbiased techniques, built from weighted means of
/// v. Throws BiasedTechnique when |mu_i - mu| > 1e-8 |mu| and
/// NonPositiveValue when some v_i <= 0.
BoundsReport bounds_unbiased(const MomentTable& m);

/// Bounds valid when techniques may be biased but sum alpha_i mu_i = mu.
BoundsReport bounds_biased(const MomentTable& m);

/// t-parameterized bound. Unbiased form:
///   S(1-2t)/S(-t)^2 + mu^2 (S(-2t)/S(-t)^2 - 1),   S(p) = sum alpha_i v_i^p
/// biased form replaces the mu^2 term by
///   sum alpha_i mu_i^2 v_i^(-2t) / S(-t)^2 - mu^2.
double generalized_bound(const MomentTable& m, double t, bool biased = false);

/// (sum beta_i c_i) (sum alpha_i^2 sigma'_i^2 / beta_i)
double inverse_efficiency(const MomentTable& m, const SimplexVector& beta,
                          std::span<const double> costs);

} // namespace genmis
