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

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "genmis/analysis.hpp"
#include "genmis/model.hpp"
#include "genmis/rng.hpp"

namespace genmis {

enum class EstimatorKind { F, G, randomized_F, Z_l1, Z_l2, Z_l3 };

std::string to_string(EstimatorKind kind);

/// Which linear-combination weights to use: w_i proportional to
/// alpha_i / v_i (l1), alpha_i (l2) or alpha_i / sqrt(v_i) (l3).
enum class LinearKind { l1, l2, l3 };

/// Outcome of one seeded Monte Carlo run.
///
/// per_technique[i] is the raw sum of the per-sample contributions drawn
/// from technique i and counts.counts[i] the number of those samples. For
/// randomized estimators the counts are the realized draws and may be zero.
struct EstimateRun {
    double value = 0.0;
    std::vector<double> per_technique;
    Allocation counts;
    EstimatorKind estimator_kind = EstimatorKind::F;
};

struct EmpiricalStats {
    double mean = 0.0;
    double variance_of_estimator = 0.0;
    std::size_t runs = 0;
    double std_error_of_variance = 0.0;
};

/// Everything needed to repeat one estimator. `v` is only read by the
/// linear-combination kinds; `beta` only by G (defaults to alpha).
struct EstimatorConfig {
    EstimatorKind kind = EstimatorKind::F;
    SimplexVector alpha;
    std::optional<SimplexVector> beta;
    std::size_t N = 1;
    std::vector<double> v;
    bool randomized = false;
};

/// Generalized balance heuristic with n_i = allocate(beta, N) samples per
/// technique: sum_i alpha_i / n_i * sum_j f(X_ij) / psi_alpha(X_ij).
EstimateRun estimate_g(const Problem& problem, const SimplexVector& alpha,
                       const SimplexVector& beta, std::size_t N, RngSeed seed);

EstimateRun estimate_f(const Problem& problem, const SimplexVector& alpha,
                       std::size_t N, RngSeed seed);

/// One-sample mixture: the technique of each sample is drawn from alpha.
EstimateRun estimate_randomized(const Problem& problem, const SimplexVector& alpha,
                                std::size_t N, RngSeed seed);

/// Constant-weight combination of single-technique estimators.
/// Deterministic: sum_i w_i / n_i sum_j f/p_i with n_i = allocate(alpha, N).
/// Randomized: mean of w_I f(X) / (alpha_I p_I(X)) with I drawn from alpha.
EstimateRun estimate_linear(const Problem& problem, LinearKind kind,
                            const SimplexVector& alpha, std::span<const double> v,
                            std::size_t N, RngSeed seed, bool randomized);

/// Weights of the linear-combination estimators (sum to one).
std::vector<double> linear_weights(LinearKind kind, const SimplexVector& alpha,
                                   std::span<const double> v);

EstimateRun run_estimator(const Problem& problem, const EstimatorConfig& cfg,
                          RngSeed seed);

/// Exact variance of one run of `cfg` (not normalized to one sample),
/// using the realized integer allocation for deterministic estimators.
/// `m` must be the moment table for cfg.alpha.
double analytic_variance(const EstimatorConfig& cfg, const MomentTable& m);

/// `runs` independent replications; run r uses stream base.stream + r.
/// Runs are spread over worker threads; results do not depend on the
/// thread count.
EmpiricalStats empirical_variance(const Problem& problem, const EstimatorConfig& cfg,
                                  std::size_t runs, RngSeed base,
                                  unsigned threads = 0);

/// Mean, unbiased variance and the standard error of that variance
/// estimate (fourth central moment formula).
EmpiricalStats summarize(std::span<const double> values);

/// Walker alias table for O(1) draws from a discrete distribution.
class AliasTable {
public:
    explicit AliasTable(std::span<const double> probabilities);

    std::size_t sample(double u) const noexcept;
    std::size_t size() const noexcept { return prob_.size(); }

private:
    std::vector<double> prob_;
    std::vector<std::size_t> alias_;
};

} // namespace genmis
