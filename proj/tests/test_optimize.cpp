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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "genmis/analysis.hpp"
#include "genmis/errors.hpp"
#include "genmis/model.hpp"
#include "genmis/optimize.hpp"

using namespace genmis;

namespace {

// Two copies of the same density: the problem is symmetric in alpha.
Problem twin_problem() {
    Problem p;
    p.name = "twins";
    p.integrand = [](Real x) { return 1 + x * x; };
    p.domain = Interval(0, 1);
    const RealFn pdf = [](Real x) { return (1 + x) / 1.5L; };
    const Sampler s = [](double u) { return Real{std::sqrt(1 + 3 * u) - 1}; };
    p.techniques.push_back({"a", pdf, s, 1});
    p.techniques.push_back({"b", pdf, s, 1});
    return p;
}

double vf(const Problem& p, const std::vector<double>& a, const QuadratureConfig& q) {
    const SimplexVector alpha(a);
    const MixtureMoments mm = mixture_moments(p, alpha, q);
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * mm.sigma_prime_sq[i];
    return s;
}

double vg(const Problem& p, const std::vector<double>& a, const SimplexVector& b,
          const QuadratureConfig& q) {
    const MixtureMoments mm = mixture_moments(p, SimplexVector(a), q);
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * a[i] * mm.sigma_prime_sq[i] / b[i];
    return s;
}

} // namespace

TEST_CASE("simplex projection") {
    const auto x = project_to_simplex(std::vector<double>{0.5, 0.5, 0.5}, 0.0);
    for (double v : x) CHECK(v == doctest::Approx(1.0 / 3));
    const auto y = project_to_simplex(std::vector<double>{2.0, 0.0, -1.0}, 0.0);
    CHECK(y == std::vector<double>{1.0, 0.0, 0.0});
    const auto z = project_to_simplex(std::vector<double>{2.0, 0.0, -1.0}, 1e-6);
    CHECK(z[1] == doctest::Approx(1e-6));
    CHECK(z[0] == doctest::Approx(1 - 2e-6));
    const auto w = project_to_simplex(std::vector<double>{0.6, 0.5}, 0.0);
    CHECK(w[0] == doctest::Approx(0.55));
    CHECK_THROWS_AS(project_to_simplex(std::vector<double>{}, 0.0), ValidationError);
    CHECK_THROWS_AS(project_to_simplex(std::vector<double>{1, 1}, 0.5), ValidationError);
}

TEST_CASE("optimal beta closed forms") {
    const Problem p = example_problem(1);
    const MomentTable m = moments(p, SimplexVector({0.2, 0.5, 0.3}));
    const SimplexVector b = optimal_beta(m);
    double root = 0;
    for (std::size_t i = 0; i < 3; ++i) root += m.alpha[i] * std::sqrt(m.sigma_prime_sq[i]);
    CHECK(variance_g1(m, b) == doctest::Approx(root * root).epsilon(1e-12));
    CHECK(variance_g1(m, b) < variance_f1(m));
    CHECK(b[1] == doctest::Approx(0.5 * std::sqrt(m.sigma_prime_sq[1]) / root).epsilon(1e-12));

    const std::vector<double> c{1, 6.24, 3.28};
    const SimplexVector bc = optimal_beta_with_costs(m, c);
    CHECK(inverse_efficiency(m, bc, c) <= inverse_efficiency(m, m.alpha, c));
    CHECK(inverse_efficiency(m, bc, c) <= inverse_efficiency(m, b, c) * (1 + 1e-12));
    CHECK_THROWS_AS(optimal_beta_with_costs(m, std::vector<double>{1, 0, 1}), NonPositiveValue);

    MomentTable zero = m;
    zero.sigma_prime_sq = {0, 0, 0};
    CHECK_THROWS_AS(optimal_beta(zero), AllZeroVariance);
    zero.sigma_prime_sq = {0, 1, 1};
    CHECK(optimal_beta(zero, 1e-6)[0] > 0);
}

TEST_CASE("residual expressions are the exact gradients") {
    // Central differences along directions inside the simplex, with a tight
    // quadrature so the difference quotient is resolved.
    const Problem p = example_problem(2);
    QuadratureConfig q;
    q.rel_tol = 1e-13;
    q.abs_tol = 1e-16;
    const std::vector<double> a{0.25, 0.45, 0.3};
    const SimplexVector beta({0.5, 0.2, 0.3});
    const OptimalityResidual r1 = case1_residual(p, SimplexVector(a), q);
    const OptimalityResidual r3 = case3_residual(p, SimplexVector(a), beta, q);
    constexpr double h = 1e-4;
    for (auto [j, k] : {std::pair{0, 1}, std::pair{1, 2}, std::pair{0, 2}}) {
        std::vector<double> up = a, dn = a;
        up[j] += h, up[k] -= h;
        dn[j] -= h, dn[k] += h;
        const double d1 = (vf(p, up, q) - vf(p, dn, q)) / (2 * h);
        // d V_F / d alpha_j = -e_j; residuals are e_j minus a common constant.
        CHECK(d1 == doctest::Approx(-(r1.per_technique[j] - r1.per_technique[k])).epsilon(1e-6));
        const double d3 = (vg(p, up, beta, q) - vg(p, dn, beta, q)) / (2 * h);
        CHECK(d3 == doctest::Approx(2 * (r3.per_technique[j] - r3.per_technique[k])).epsilon(1e-6));
    }
    // The multiplier of the unconstrained-beta condition is V[F^1].
    CHECK(r1.multiplier == doctest::Approx(vf(p, a, q)).epsilon(1e-10));
    CHECK(std::fabs(r3.multiplier) < 1e-10);
}

TEST_CASE("zero-variance example is recovered by every objective") {
    const Problem p = example_problem(4);
    for (Objective o : {Objective::case1, Objective::case3, Objective::case4}) {
        std::optional<SimplexVector> beta;
        if (o == Objective::case3) beta = SimplexVector({0.2, 0.5, 0.3});
        const SolveResult r = solve_alpha(p, o, beta);
        INFO(to_string(o));
        CHECK(r.converged);
        CHECK(r.alpha[0] == doctest::Approx(0.3).epsilon(1e-3));
        CHECK(r.alpha[1] == doctest::Approx(0.3).epsilon(1e-3));
        CHECK(r.alpha[2] == doctest::Approx(0.4).epsilon(1e-3));
        CHECK(r.objective < 1e-10);
        CHECK(!r.at_floor);
    }
    const SimplexVector opt({0.3, 0.3, 0.4});
    CHECK(case1_residual(p, opt).norm <= 1e-6);
    CHECK(case3_residual(p, opt, SimplexVector::uniform(3)).norm <= 1e-6);
}

TEST_CASE("symmetric problem has the uniform optimum") {
    const Problem p = twin_problem();
    REQUIRE_NOTHROW(p.validate());
    const SolveResult r =
        solve_alpha(p, Objective::case4, std::nullopt, {}, solver_quadrature(), SimplexVector({0.8, 0.2}));
    CHECK(r.alpha[0] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(r.alpha[1] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("example 1: descent from the equal-alpha baseline") {
    const Problem p = example_problem(1);
    const SolveResult r4 = solve_alpha(p, Objective::case4);
    CHECK(r4.objective <= 29.1634);
    CHECK(r4.kkt_residual <= SolverConfig{}.grad_tol);
    for (std::size_t k = 1; k < r4.trace.size(); ++k) CHECK(r4.trace[k] <= r4.trace[k - 1]);

    const SolveResult r1 = solve_alpha(p, Objective::case1);
    CHECK(r1.objective <= 29.1634);
    CHECK(r1.kkt_residual <= SolverConfig{}.grad_tol);
    // The minimum sits on the simplex boundary.
    CHECK(r1.at_floor);
    CHECK(r1.alpha[0] == doctest::Approx(SolverConfig{}.simplex_floor).epsilon(1e-3));
    for (std::size_t k = 1; k < r1.trace.size(); ++k) CHECK(r1.trace[k] <= r1.trace[k - 1]);
}

TEST_CASE("solver failures and input checks") {
    const Problem p = example_problem(1);
    SolverConfig tight;
    tight.max_iters = 1;
    try {
        solve_alpha(p, Objective::case1, std::nullopt, tight);
        FAIL("expected DidNotConverge");
    } catch (const DidNotConverge& e) {
        CHECK(e.best().size() == 3);
        CHECK(e.residual() > tight.grad_tol);
    }
    CHECK_THROWS_AS(solve_alpha(p, Objective::case3), ValidationError);
    SolverConfig bad;
    bad.simplex_floor = 0.5;
    CHECK_THROWS_AS(solve_alpha(p, Objective::case4, std::nullopt, bad), ValidationError);
    bad = SolverConfig{};
    bad.grad_tol = 0;
    CHECK_THROWS_AS(bad.validate(3), ValidationError);
}

TEST_CASE("dominance verdicts") {
    CHECK(dominance_compare(SimplexVector::uniform(3), std::vector<double>{1, 2, 3}).tag ==
          Dominance::equal);
    // alpha proportional to 1/sigma'^2: every a_i ties.
    const std::vector<double> s{1, 2, 4};
    const auto inv = SimplexVector::normalized(std::vector<double>{1, 0.5, 0.25});
    const DominanceVerdict v = dominance_compare(inv, s);
    CHECK(v.f_geq_g);
    CHECK(v.tag == Dominance::equal);

    const SimplexVector a({0.5, 0.3, 0.2});
    const std::vector<double> s2{1, 2, 3};
    CHECK(dominance_compare(a, s2).tag == Dominance::F_geq_G);
    double f = 0, g = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        f += a[i] * s2[i];
        g += 3 * a[i] * a[i] * s2[i];
    }
    CHECK(g <= f);

    CHECK(dominance_compare(SimplexVector({0.2, 0.3, 0.5}), std::vector<double>{1, 1, 1}).tag ==
          Dominance::F_leq_G);
    CHECK(dominance_compare(SimplexVector({0.2, 0.5, 0.3}), std::vector<double>{1, 0.1, 2}).tag ==
          Dominance::inconclusive);
    CHECK_THROWS_AS(dominance_compare(a, std::vector<double>{1, 2}), ValidationError);
    CHECK_THROWS_AS(dominance_compare(a, std::vector<double>{1, -2, 1}), NonPositiveValue);
}

TEST_CASE("names") {
    CHECK(to_string(Objective::case3) == "case3");
    CHECK(to_string(Dominance::F_leq_G) == "F_leq_G");
}
