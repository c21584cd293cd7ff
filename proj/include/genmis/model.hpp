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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "genmis/quadrature.hpp"

namespace genmis {

/// Maps a uniform variate in [0, 1] to a point of the technique's domain.
using Sampler = std::function<Real(double)>;

/// One proposal density with its sampler and per-sample cost.
struct Technique {
    std::string label;
    RealFn pdf;
    Sampler sampler;
    double cost = 1.0;
};

/// Estimation task: mu = integral of f over the domain, sampled with a set
/// of techniques.
struct Problem {
    std::string name;
    RealFn integrand;
    Interval domain;
    std::vector<Technique> techniques;
    std::optional<double> reference_mu;

    std::size_t size() const noexcept { return techniques.size(); }
    std::vector<double> costs() const;

    /// Checks n >= 1, positive costs, pdf >= 0, unit mass, and the coverage
    /// condition on a dense grid. Throws ValidationError.
    void validate(const QuadratureConfig& cfg = {}) const;
};

/// Copy of `p` with technique costs replaced.
Problem with_costs(const Problem& p, std::span<const double> costs);

/// Strictly positive coefficients summing to one.
class SimplexVector {
public:
    static constexpr double kSumTolerance = 1e-12;

    /// Validates: every entry finite and > 0, sum within 1e-12 of 1.
    explicit SimplexVector(std::vector<double> coeffs);

    /// Normalizes strictly positive weights.
    static SimplexVector normalized(std::span<const double> weights);

    /// Normalizes nonnegative weights; zero entries are raised to `floor`
    /// (as a fraction of the total) before renormalizing.
    static SimplexVector normalized_with_floor(std::span<const double> weights,
                                               double floor);

    static SimplexVector uniform(std::size_t n);

    std::size_t size() const noexcept { return c_.size(); }
    double operator[](std::size_t i) const { return c_[i]; }
    std::span<const double> values() const noexcept { return c_; }
    const std::vector<double>& vector() const noexcept { return c_; }

    bool operator==(const SimplexVector&) const = default;

private:
    std::vector<double> c_;
};

/// Integer sample counts n_i, all >= 1, summing to N.
struct Allocation {
    std::vector<std::size_t> counts;
    std::size_t total = 0;
};

/// Largest-remainder rounding of beta*N with a floor of one sample per
/// technique. Throws BudgetTooSmall when N < n.
Allocation allocate(const SimplexVector& beta, std::size_t total);

/// Per-technique plain importance-sampling statistics: v_i (variance of the
/// one-sample estimator f/p_i) and mu_i (its expectation).
struct TechniqueMoments {
    std::vector<double> v;
    std::vector<double> mu_i;
    double mu = 0.0;
};

/// Named rule producing alpha coefficients.
struct AlphaStrategy {
    std::string name;
    std::function<SimplexVector(const Problem&, const TechniqueMoments&)> rule;
};

/// equal, inv-variance, inv-cost-variance.
std::vector<AlphaStrategy> builtin_strategies();

/// Looks up a strategy by name in `registry`; throws UnknownStrategy.
const AlphaStrategy& find_strategy(const std::vector<AlphaStrategy>& registry,
                                   const std::string& name);

/// The five benchmark problems (ids 1..5). Throws UnknownExample.
Problem example_problem(int id);

/// Cost vectors used for an example. Examples 1-4 have one profile,
/// example 5 has (1,1) and (1,5).
std::vector<std::vector<double>> example_cost_profiles(int id);

} // namespace genmis
