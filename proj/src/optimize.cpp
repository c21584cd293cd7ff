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

#include "genmis/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "genmis/errors.hpp"

namespace genmis {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 40;

void check_length(std::size_t a, std::size_t b, const char* what) {
    if (a != b) throw ValidationError(std::string(what) + ": length mismatch");
}

SimplexVector beta_from_weights(std::vector<double> w, double floor) {
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    if (!(total > 0)) throw AllZeroVariance("every sigma'_i is zero; any beta is optimal");
    for (double& x : w) x /= total;
    for (double& x : w) x = std::max(x, floor);
    return SimplexVector::normalized(w);
}

OptimalityResidual finish_residual(const SimplexVector& alpha, std::vector<double> expr) {
    OptimalityResidual r;
    for (std::size_t j = 0; j < expr.size(); ++j) r.multiplier += alpha[j] * expr[j];
    for (double& e : expr) {
        e -= r.multiplier;
        r.norm = std::max(r.norm, std::fabs(e));
    }
    r.per_technique = std::move(expr);
    return r;
}

// e_j (not yet centred) for the unconstrained-beta objective.
std::vector<double> case1_expressions(const Problem& problem, const SimplexVector& alpha,
                                      const MixtureMoments& mm,
                                      const QuadratureConfig& cfg) {
    const std::size_t n = problem.size();
    const RealFn& f = problem.integrand;
    std::vector<double> e(n);
    for (std::size_t j = 0; j < n; ++j) {
        // sum_i alpha_i mu'_i int f p_i p_j / psi^2 as one integral.
        const double t = integrate(
            [&](Real x) {
                Real psi = 0, q = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    const Real p = problem.techniques[i].pdf(x);
                    psi += alpha[i] * p;
                    q += alpha[i] * mm.mu_prime[i] * p;
                }
                if (!(psi > 0)) return Real{0};
                return problem.techniques[j].pdf(x) * (f(x) / psi) * (q / psi);
            },
            problem.domain, cfg);
        const double mp = mm.mu_prime[j];
        e[j] = mm.sigma_prime_sq[j] + 2 * mp * mp - 2 * t;
    }
    return e;
}

// r_j for the fixed-beta objective.
std::vector<double> case3_expressions(const Problem& problem, const SimplexVector& alpha,
                                      const SimplexVector& beta, const MixtureMoments& mm,
                                      const QuadratureConfig& cfg) {
    const std::size_t n = problem.size();
    const RealFn& f = problem.integrand;
    std::vector<double> r(n);
    for (std::size_t j = 0; j < n; ++j) {
        // sum_i alpha_i^2/beta_i (K2_ij - mu'_i K1_ij) folded into a single
        // integrand: p_j (f/psi) sum_i alpha_i^2/beta_i (p_i/psi)(f/psi - mu'_i).
        const double u = integrate(
            [&](Real x) {
                Real psi = 0;
                for (std::size_t i = 0; i < n; ++i)
                    psi += alpha[i] * problem.techniques[i].pdf(x);
                if (!(psi > 0)) return Real{0};
                const Real ratio = f(x) / psi;
                Real s = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    const Real w = Real{alpha[i]} * alpha[i] / beta[i];
                    s += w * problem.techniques[i].pdf(x) / psi * (ratio - mm.mu_prime[i]);
                }
                return problem.techniques[j].pdf(x) * ratio * s;
            },
            problem.domain, cfg);
        r[j] = alpha[j] * mm.sigma_prime_sq[j] / beta[j] - u;
    }
    return r;
}

struct Iterate {
    std::vector<double> x;
    MixtureMoments mm;
    double value = 0.0;
    std::vector<double> grad;
    OptimalityResidual residual;
};

class ObjectiveEvaluator {
public:
    ObjectiveEvaluator(const Problem& problem, Objective objective,
                       std::optional<SimplexVector> beta, const QuadratureConfig& cfg)
        : problem_(problem), objective_(objective), beta_(std::move(beta)), cfg_(cfg) {}

    Iterate value_only(std::vector<double> x) const {
        Iterate it;
        it.x = std::move(x);
        const SimplexVector alpha(it.x);
        it.mm = mixture_moments(problem_, alpha, cfg_);
        it.value = value(alpha, it.mm);
        return it;
    }

    void add_gradient(Iterate& it) const {
        const SimplexVector alpha(it.x);
        std::vector<double> expr;
        if (objective_ == Objective::case1) {
            expr = case1_expressions(problem_, alpha, it.mm, cfg_);
            it.grad.resize(expr.size());
            std::transform(expr.begin(), expr.end(), it.grad.begin(),
                           [](double e) { return -e; });
        } else {
            expr = case3_expressions(problem_, alpha, *beta_, it.mm, cfg_);
            it.grad.resize(expr.size());
            std::transform(expr.begin(), expr.end(), it.grad.begin(),
                           [](double r) { return 2 * r; });
        }
        it.residual = finish_residual(alpha, std::move(expr));
    }

private:
    double value(const SimplexVector& alpha, const MixtureMoments& mm) const {
        double v = 0.0;
        for (std::size_t i = 0; i < alpha.size(); ++i) {
            v += objective_ == Objective::case1
                     ? alpha[i] * mm.sigma_prime_sq[i]
                     : alpha[i] * alpha[i] * mm.sigma_prime_sq[i] / (*beta_)[i];
        }
        return v;
    }

    const Problem& problem_;
    Objective objective_;
    std::optional<SimplexVector> beta_;
    QuadratureConfig cfg_;
};

bool on_floor(double x, double floor) { return x <= floor * (1 + 1e-9); }

// Stationarity check restricted to the free coordinates: those on the floor
// whose gradient points out of the simplex are dropped, and the remaining
// expressions are compared against their own weighted mean.
double kkt_norm(const Iterate& it, double floor) {
    const std::size_t n = it.x.size();
    double gmean = 0.0;
    for (std::size_t j = 0; j < n; ++j) gmean += it.x[j] * it.grad[j];
    std::vector<bool> free(n);
    double weight = 0.0, centre = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        free[j] = !(on_floor(it.x[j], floor) && it.grad[j] - gmean > 0);
        if (!free[j]) continue;
        weight += it.x[j];
        centre += it.x[j] * it.residual.per_technique[j];
    }
    if (weight > 0) centre /= weight;
    double norm = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        if (free[j]) norm = std::max(norm, std::fabs(it.residual.per_technique[j] - centre));
    return norm;
}

double noise_floor(double value) {
    return 64 * std::numeric_limits<double>::epsilon() * std::fabs(value) + 1e-300;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace

void SolverConfig::validate(std::size_t n) const {
    if (max_iters < 1 || !(grad_tol > 0) || !(step_init > 0) || !(simplex_floor > 0))
        throw ValidationError("solver config fields must be positive");
    if (!(simplex_floor < 1.0 / static_cast<double>(n)))
        throw ValidationError("simplex_floor must be below 1/n");
}

QuadratureConfig solver_quadrature() {
    QuadratureConfig q;
    q.rel_tol = 1e-12;
    q.abs_tol = 1e-15;
    return q;
}

SimplexVector optimal_beta(const MomentTable& m, double floor) {
    std::vector<double> w(m.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = m.alpha[i] * std::sqrt(m.sigma_prime_sq[i]);
    return beta_from_weights(std::move(w), floor);
}

SimplexVector optimal_beta_with_costs(const MomentTable& m, std::span<const double> costs,
                                      double floor) {
    check_length(m.size(), costs.size(), "optimal_beta_with_costs");
    std::vector<double> w(m.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!(costs[i] > 0)) throw NonPositiveValue("costs must be positive");
        w[i] = m.alpha[i] * std::sqrt(m.sigma_prime_sq[i]) / std::sqrt(costs[i]);
    }
    return beta_from_weights(std::move(w), floor);
}

OptimalityResidual case1_residual(const Problem& problem, const SimplexVector& alpha,
                                  const QuadratureConfig& cfg) {
    check_length(problem.size(), alpha.size(), "case1_residual");
    const MixtureMoments mm = mixture_moments(problem, alpha, cfg);
    return finish_residual(alpha, case1_expressions(problem, alpha, mm, cfg));
}

OptimalityResidual case3_residual(const Problem& problem, const SimplexVector& alpha,
                                  const SimplexVector& beta, const QuadratureConfig& cfg) {
    check_length(problem.size(), alpha.size(), "case3_residual");
    check_length(problem.size(), beta.size(), "case3_residual");
    const MixtureMoments mm = mixture_moments(problem, alpha, cfg);
    return finish_residual(alpha, case3_expressions(problem, alpha, beta, mm, cfg));
}

std::string to_string(Objective objective) {
    switch (objective) {
    case Objective::case1: return "case1";
    case Objective::case3: return "case3";
    case Objective::case4: return "case4";
    }
    return "?";
}

std::vector<double> project_to_simplex(std::span<const double> y, double floor) {
    const std::size_t n = y.size();
    if (n == 0) throw ValidationError("cannot project an empty vector");
    const double budget = 1.0 - floor * static_cast<double>(n);
    if (!(budget > 0)) throw ValidationError("simplex floor leaves no mass");

    // Project y - floor onto {z >= 0, sum z = budget} by thresholding.
    std::vector<double> z(y.begin(), y.end());
    for (double& v : z) v -= floor;
    std::vector<double> sorted = z;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumulative = 0.0, theta = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        cumulative += sorted[k];
        const double t = (cumulative - budget) / static_cast<double>(k + 1);
        if (sorted[k] - t > 0) theta = t;
    }
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = std::max(z[i] - theta, 0.0) + floor;
    // Remove the last bit of round-off so the result is a valid SimplexVector.
    const double total = std::accumulate(x.begin(), x.end(), 0.0);
    for (double& v : x) v /= total;
    return x;
}

SolveResult solve_alpha(const Problem& problem, Objective objective,
                        const std::optional<SimplexVector>& beta, const SolverConfig& cfg,
                        const QuadratureConfig& quad,
                        const std::optional<SimplexVector>& start) {
    const std::size_t n = problem.size();
    if (n < 2) throw ValidationError("solve_alpha needs at least two techniques");
    cfg.validate(n);
    quad.validate();

    std::optional<SimplexVector> fixed_beta;
    if (objective == Objective::case3) {
        if (!beta) throw ValidationError("case3 requires a beta vector");
        check_length(n, beta->size(), "solve_alpha");
        fixed_beta = beta;
    } else if (objective == Objective::case4) {
        fixed_beta = SimplexVector::uniform(n);
    }
    const Objective kind = objective == Objective::case1 ? Objective::case1 : Objective::case3;
    const ObjectiveEvaluator eval(problem, kind, fixed_beta, quad);

    std::vector<double> x0 = start ? start->vector() : SimplexVector::uniform(n).vector();
    if (start) check_length(n, x0.size(), "solve_alpha start");
    x0 = project_to_simplex(x0, cfg.simplex_floor);

    Iterate cur = eval.value_only(std::move(x0));
    eval.add_gradient(cur);
    std::vector<double> trace{cur.value};

    double step = 0.0;
    {
        double spread = 0.0;
        const double gmean = dot(cur.x, cur.grad);
        for (double g : cur.grad) spread = std::max(spread, std::fabs(g - gmean));
        step = spread > 0 ? cfg.step_init / spread : cfg.step_init;
    }

    std::size_t iter = 0;
    bool converged = kkt_norm(cur, cfg.simplex_floor) <= cfg.grad_tol;
    while (!converged && iter < cfg.max_iters) {
        ++iter;
        bool accepted = false;
        Iterate next;
        for (int k = 0; k < kMaxBacktracks; ++k) {
            std::vector<double> trial(n);
            for (std::size_t i = 0; i < n; ++i) trial[i] = cur.x[i] - step * cur.grad[i];
            trial = project_to_simplex(trial, cfg.simplex_floor);
            if (trial == cur.x) break;
            std::vector<double> dx(n);
            for (std::size_t i = 0; i < n; ++i) dx[i] = trial[i] - cur.x[i];
            next = eval.value_only(std::move(trial));
            if (next.value <= cur.value + kArmijo * dot(cur.grad, dx)) {
                eval.add_gradient(next);
                accepted = true;
                break;
            }
            // Close to the optimum the predicted decrease drops below the
            // rounding of the objective itself. A step that leaves the value
            // unchanged at that resolution is taken if it shrinks the
            // stationarity residual.
            if (next.value <= cur.value + noise_floor(cur.value)) {
                eval.add_gradient(next);
                if (kkt_norm(next, cfg.simplex_floor) < kkt_norm(cur, cfg.simplex_floor)) {
                    next.value = std::min(next.value, cur.value);
                    accepted = true;
                    break;
                }
            }
            step /= 2;
        }
        if (!accepted) break;

        std::vector<double> dx(n), dg(n);
        for (std::size_t i = 0; i < n; ++i) {
            dx[i] = next.x[i] - cur.x[i];
            dg[i] = next.grad[i] - cur.grad[i];
        }
        const double curvature = dot(dx, dg);
        step = curvature > 0 ? dot(dx, dx) / curvature : step * 2;
        cur = std::move(next);
        trace.push_back(cur.value);
        converged = kkt_norm(cur, cfg.simplex_floor) <= cfg.grad_tol;
    }

    if (!converged) {
        std::ostringstream msg;
        msg << "solve_alpha(" << to_string(objective) << ") stopped after " << iter
            << " iterations with residual " << kkt_norm(cur, cfg.simplex_floor)
            << " > grad_tol " << cfg.grad_tol;
        throw DidNotConverge(msg.str(), cur.x, kkt_norm(cur, cfg.simplex_floor));
    }

    SolveResult result{SimplexVector(cur.x), cur.value, cur.residual,
                       kkt_norm(cur, cfg.simplex_floor), iter, true, false,
                       std::move(trace)};
    result.at_floor = std::any_of(cur.x.begin(), cur.x.end(),
                                  [&](double v) { return on_floor(v, cfg.simplex_floor); });
    return result;
}

std::string to_string(Dominance d) {
    switch (d) {
    case Dominance::F_geq_G: return "F_geq_G";
    case Dominance::F_leq_G: return "F_leq_G";
    case Dominance::equal: return "equal";
    case Dominance::inconclusive: return "inconclusive";
    }
    return "?";
}

DominanceVerdict dominance_compare(const SimplexVector& alpha,
                                   std::span<const double> sigma_prime_sq) {
    check_length(alpha.size(), sigma_prime_sq.size(), "dominance_compare");
    const std::size_t n = alpha.size();
    std::vector<double> a(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(sigma_prime_sq[i] >= 0)) throw NonPositiveValue("sigma'^2 must be >= 0");
        a[i] = alpha[i] * sigma_prime_sq[i];
    }
    constexpr double kTie = 1e-12;
    auto strictly_less = [&](double x, double y) {
        return y - x > kTie * std::max(std::fabs(x), std::fabs(y));
    };
    auto at_least = [&](double x, double y) {
        return x - y >= -kTie * std::max(std::fabs(x), std::fabs(y));
    };

    // Pairs inside a tie group of a impose nothing; every strictly ordered
    // pair must have alpha ordered the same way (or the opposite way).
    DominanceVerdict v;
    v.f_geq_g = true;
    v.f_leq_g = true;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (!strictly_less(a[i], a[j])) continue;
            if (!at_least(alpha[i], alpha[j])) v.f_geq_g = false;
            if (!at_least(alpha[j], alpha[i])) v.f_leq_g = false;
        }
    }
    v.tag = v.f_geq_g && v.f_leq_g ? Dominance::equal
            : v.f_geq_g            ? Dominance::F_geq_G
            : v.f_leq_g            ? Dominance::F_leq_G
                                   : Dominance::inconclusive;
    return v;
}

} // namespace genmis
