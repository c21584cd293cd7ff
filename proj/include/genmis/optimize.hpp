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

namespace genmis {

struct SolverConfig {
    std::size_t max_iters = 500;
    double grad_tol = 1e-7;
    double step_init = 0.1;
    double simplex_floor = 1e-6;

    /// Throws ValidationError unless every field is positive and
    /// simplex_floor < 1/n.
    void validate(std::size_t n) const;
};

/// Per-technique deviation of the stationarity expression from its
/// alpha-weighted mean, and the max-abs norm of those deviations.
struct OptimalityResidual {
    std::vector<double> per_technique;
    double norm = 0.0;
    /// The alpha-weighted mean of the stationarity expressions. For the
    /// unconstrained-beta objective this equals V[F^1]; for fixed beta it is
    /// identically zero.
    double multiplier = 0.0;
};

/// beta_i proportional to alpha_i sigma'_i. Entries with sigma'_i = 0 get
/// `floor` before renormalizing. Throws AllZeroVariance when every
/// sigma'_i is zero.
SimplexVector optimal_beta(const MomentTable& m, double floor = 1e-6);

/// beta_i proportional to alpha_i sigma'_i / sqrt(c_i).
SimplexVector optimal_beta_with_costs(const MomentTable& m,
                                      std::span<const double> costs,
                                      double floor = 1e-6);

/// e_j = sigma'_j^2 + 2 mu'_j^2 - 2 sum_i alpha_i mu'_i int f p_i p_j / psi^2,
/// the negated partial derivative of V[F^1] = sum alpha_i sigma'_i^2.
/// All e_j are equal at an interior stationary point.
OptimalityResidual case1_residual(const Problem& problem, const SimplexVector& alpha,
                                  const QuadratureConfig& cfg = {});

/// r_j = alpha_j sigma'_j^2 / beta_j
///       - sum_i alpha_i^2/beta_i (int f^2 p_i p_j/psi^3 - mu'_i int f p_i p_j/psi^2),
/// half the partial derivative of V[G^1] at fixed beta.
OptimalityResidual case3_residual(const Problem& problem, const SimplexVector& alpha,
                                  const SimplexVector& beta,
                                  const QuadratureConfig& cfg = {});

/// Quadrature settings used by the solver by default (tighter than the
/// library default so residuals resolve well below grad_tol).
QuadratureConfig solver_quadrature();

enum class Objective { case1, case3, case4 };

std::string to_string(Objective objective);

struct SolveResult {
    SimplexVector alpha;
    double objective = 0.0;
    OptimalityResidual residual;
    /// Residual norm over the free coordinates only. Equals residual.norm
    /// for interior solutions; at a boundary optimum the floored
    /// coordinates legitimately deviate and are left out.
    double kkt_residual = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    /// Some coordinate ended on the simplex floor.
    bool at_floor = false;
    /// Objective after each accepted iteration, starting with the initial
    /// point.
    std::vector<double> trace;
};

/// Minimizes V[F^1] (case1) or V[G^1] at fixed beta (case3; case4 uses
/// beta = 1/n) over the floored simplex, starting from `start` (uniform by
/// default).
///
/// Projected gradient descent with Barzilai-Borwein steps and monotone
/// Armijo backtracking. Gradients come from the residual expressions above.
/// Convergence is declared when the KKT-adjusted residual norm (floor
/// coordinates whose gradient points out of the simplex are excluded) is at
/// most grad_tol. Throws DidNotConverge with the best iterate otherwise.
SolveResult solve_alpha(const Problem& problem, Objective objective,
                        const std::optional<SimplexVector>& beta = std::nullopt,
                        const SolverConfig& cfg = {},
                        const QuadratureConfig& quad = solver_quadrature(),
                        const std::optional<SimplexVector>& start = std::nullopt);

/// Euclidean projection onto {x : x_i >= floor, sum x_i = 1}.
std::vector<double> project_to_simplex(std::span<const double> y, double floor);

enum class Dominance { F_geq_G, F_leq_G, equal, inconclusive };

std::string to_string(Dominance d);

struct DominanceVerdict {
    bool f_geq_g = false;
    bool f_leq_g = false;
    Dominance tag = Dominance::inconclusive;
};

/// Likelihood-dominance check with beta = 1/n. Techniques are ordered by
/// a_i = alpha_i sigma'_i^2 (values within 1e-12 relative form one tie
/// group, ordered freely). If alpha is non-increasing along that order then
/// V[F^1] >= V[G^1]; if non-decreasing then V[F^1] <= V[G^1]; both means
/// equality.
DominanceVerdict dominance_compare(const SimplexVector& alpha,
                                   std::span<const double> sigma_prime_sq);

} // namespace genmis
