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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "genmis/analysis.hpp"
#include "genmis/bench.hpp"
#include "genmis/errors.hpp"
#include "genmis/estimators.hpp"
#include "genmis/model.hpp"
#include "genmis/optimize.hpp"

using namespace genmis;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

// Reference tables print decimal commas.
double reference_value(std::string s) {
    std::replace(s.begin(), s.end(), ',', '.');
    return std::stod(s);
}

std::vector<double> reference_row(std::initializer_list<const char*> cells) {
    std::vector<double> out;
    for (const char* c : cells) out.push_back(reference_value(c));
    return out;
}

bool within(double actual, double expected, double rel) {
    return std::fabs(actual - expected) <= rel * std::fabs(expected);
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

const Problem& example(int id) {
    static const std::array<Problem, 5> p{example_problem(1), example_problem(2),
                                          example_problem(3), example_problem(4),
                                          example_problem(5)};
    return p.at(static_cast<std::size_t>(id - 1));
}

const TechniqueMoments& example_tm(int id) {
    static const std::array<TechniqueMoments, 5> tm{
        technique_moments(example(1)), technique_moments(example(2)),
        technique_moments(example(3)), technique_moments(example(4)),
        technique_moments(example(5))};
    return tm.at(static_cast<std::size_t>(id - 1));
}

SimplexVector random_simplex(std::mt19937_64& rng, std::size_t n) {
    std::gamma_distribution<double> g(1.0);
    std::vector<double> w(n);
    for (double& x : w) x = std::max(g(rng), 1e-3);
    return SimplexVector::normalized(w);
}

// Compares one bounds row (B1, H, B2, B3, P, V) with a reference row.
void compare_row(Outcome& o, const bench::TableRow& row, const std::vector<double>& expect,
                 double rel) {
    static const char* names[] = {"B1", "harmonic_mean", "B2", "B3", "power_mean_m1_2",
                                  "variance"};
    double worst = 0;
    for (std::size_t c = 0; c < 6; ++c) {
        const double err = std::fabs(row.values[c] - expect[c]) / std::fabs(expect[c]);
        worst = std::max(worst, err);
        std::ostringstream what;
        what << row.labels[0] << " " << names[c] << " " << row.values[c] << " vs " << expect[c];
        o.require(err <= rel, what.str());
    }
    o.detail << " " << row.labels[0] << " max rel err " << worst << ";";
}

bench::Table bounds_table(int problem) {
    bench::RunConfig cfg;
    cfg.problem_id = problem;
    return bench::cmd_bounds(cfg);
}

Outcome criterion1() {
    Outcome o;
    const auto t0 = Clock::now();
    const auto t = bounds_table(1);
    const double dt = seconds_since(t0);
    compare_row(o, t.rows.at(0),
                reference_row({"59,8863", "33,6961", "53,7493", "46,4125", "36,767", "29,1634"}),
                5e-3);
    o.require(dt < 5.0, "runtime");
    o.detail << " runtime " << dt << " s";
    return o;
}

Outcome criterion2() {
    Outcome o;
    const auto t = bounds_table(1);
    compare_row(o, t.rows.at(1),
                reference_row({"34,2727", "27,0116", "33,6961", "30,876", "27,7974", "24,1116"}),
                5e-3);
    return o;
}

Outcome criterion3() {
    Outcome o;
    const auto t = bounds_table(2);
    compare_row(o, t.rows.at(0),
                reference_row({"6,96851", "5,9558", "6,53264", "6,36347", "6,08435", "4,9176"}),
                5e-3);
    compare_row(o, t.rows.at(1),
                reference_row({"6,25335", "5,52328", "5,9558", "5,82562", "5,61376", "4,5528"}),
                5e-3);
    return o;
}

Outcome criterion4() {
    Outcome o;
    const auto t3 = bounds_table(3);
    o.detail << " ex3:";
    compare_row(o, t3.rows.at(0),
                reference_row({"355,59", "11,0158", "3208,72", "213,213", "19,9094", "10,6877"}),
                1e-2);
    compare_row(o, t3.rows.at(1),
                reference_row({"25,7535", "4,51631", "11,0158", "15,9986", "4,72888", "2,02066"}),
                1e-2);
    const auto t4 = bounds_table(4);
    o.detail << " ex4:";
    compare_row(o, t4.rows.at(0),
                reference_row({"18463,3", "814,05", "57587,8", "11878,3", "1646,94", "28,1431"}),
                1e-2);
    compare_row(o, t4.rows.at(1),
                reference_row({"685,56", "294,421", "814,05", "573,436", "302,401", "330,852"}),
                1e-2);
    return o;
}

Outcome criterion5() {
    Outcome o;
    bench::RunConfig cfg;
    cfg.strategies = {"equal"};
    cfg.problem_id = 1;
    const auto t1 = bench::cmd_efficiency(cfg);
    const auto& r1 = t1.rows.at(0).values;
    o.require(within(r1[0], 102.26, 1e-2), "ex1 F");
    o.require(within(r1[1], 89.40, 1e-2), "ex1 G");
    o.detail << " ex1 F=" << r1[0] << " G=" << r1[1] << ";";

    cfg.problem_id = 5;
    const auto t5 = bench::cmd_efficiency(cfg);
    const double expect[2][2] = {{0.28, 0.23}, {0.83, 0.40}};
    for (std::size_t k = 0; k < 2; ++k) {
        const auto& r = t5.rows.at(k);
        o.require(within(r.values[0], expect[k][0], 5e-2), "ex5 F costs " + r.labels[1]);
        o.require(within(r.values[1], expect[k][1], 5e-2), "ex5 G costs " + r.labels[1]);
        o.detail << " ex5 costs " << r.labels[1] << " F=" << r.values[0] << " G=" << r.values[1]
                 << ";";
    }
    return o;
}

Outcome criterion6() {
    Outcome o;
    const Problem& p = example(4);
    const SimplexVector a({0.3, 0.3, 0.4});
    const double v = variance_f1(moments(p, a, example_tm(4)));
    o.require(v <= 1e-10, "analytic variance");
    o.detail << " V[F]=" << v << ";";

    std::mt19937_64 seeds(6);
    double worst = 0;
    for (int k = 0; k < 100; ++k) {
        const RngSeed s{seeds(), static_cast<std::uint32_t>(seeds())};
        const double est = estimate_g(p, a, a, 10000, s).value;
        worst = std::max(worst, std::fabs(est - 100));
    }
    o.require(worst <= 1e-9, "estimates");
    o.detail << " max |estimate-100| over 100 seeds=" << worst << ";";

    const SolveResult r = solve_alpha(p, Objective::case4);
    double dev = 0;
    for (std::size_t i = 0; i < 3; ++i) dev = std::max(dev, std::fabs(r.alpha[i] - a[i]));
    o.require(dev <= 1e-3, "solver");
    o.detail << " solver alpha=(" << r.alpha[0] << ", " << r.alpha[1] << ", " << r.alpha[2]
             << ") max dev " << dev;
    return o;
}

Outcome criterion7() {
    Outcome o;
    const auto t0 = Clock::now();
    std::mt19937_64 rng(7);
    std::size_t checks = 0;
    double worst_identity = 0;
    for (int id = 1; id <= 5; ++id) {
        const Problem& p = example(id);
        for (int k = 0; k < 50; ++k) {
            const SimplexVector a = random_simplex(rng, p.size());
            const MomentTable m = moments(p, a, example_tm(id));
            const BoundsReport b = bounds_unbiased(m);
            const double v = b.variance_F1;
            const double slack = 1e-12 * std::fabs(v);
            const double vmax = *std::max_element(m.v.begin(), m.v.end());
            const double bmin =
                std::min({b.harmonic_bound, b.arithmetic_bound, b.power_half_bound});
            o.require(v <= bmin + slack, "min bound, example " + std::to_string(id));
            o.require(v <= vmax + slack, "max v, example " + std::to_string(id));
            for (int j = 0; j < 20; ++j) {
                const double t = -2.0 + 4.0 * j / 19.0;
                o.require(v <= generalized_bound(m, t) + slack,
                          "generalized bound, example " + std::to_string(id));
            }
            const std::pair<double, double> ids[] = {{0.0, b.arithmetic_bound},
                                                     {1.0, b.harmonic_bound},
                                                     {0.5, b.power_half_bound}};
            for (auto [t, ref] : ids) {
                const double err = std::fabs(generalized_bound(m, t) - ref) / std::fabs(ref);
                worst_identity = std::max(worst_identity, err);
                o.require(err <= 1e-9, "special case of generalized bound");
            }
            checks += 22;
        }
    }
    const double dt = seconds_since(t0);
    o.require(dt < 120, "runtime");
    o.detail << " " << checks << " inequalities over 250 alphas; worst identity rel err "
             << worst_identity << "; runtime " << dt << " s";
    return o;
}

Outcome criterion8() {
    Outcome o;
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> cost(0.1, 10.0);
    double worst_closed = 0, worst_accel = 0;
    std::size_t strict = 0;
    for (int id = 1; id <= 5; ++id) {
        const Problem& p = example(id);
        const std::string tag = "example " + std::to_string(id);
        for (int k = 0; k < 50; ++k) {
            const SimplexVector a = random_simplex(rng, p.size());
            const MomentTable m = moments(p, a, example_tm(id));
            const double vf = variance_f1(m);
            const SimplexVector b = optimal_beta(m);
            const double vg = variance_g1(m, b);
            o.require(vg <= vf * (1 + 1e-12), "G <= F, " + tag);
            double root = 0, smin = INFINITY, smax = 0;
            for (std::size_t i = 0; i < m.size(); ++i) {
                const double s = std::sqrt(m.sigma_prime_sq[i]);
                root += a[i] * s;
                smin = std::min(smin, s);
                smax = std::max(smax, s);
            }
            const double closed_err = std::fabs(vg - root * root) / (root * root);
            worst_closed = std::max(worst_closed, closed_err);
            o.require(closed_err <= 1e-10, "closed form, " + tag);
            if (smax > smin * (1 + 1e-6)) {
                o.require(vg < vf, "strict improvement, " + tag);
                ++strict;
            }

            std::vector<double> c(p.size());
            for (double& x : c) x = cost(rng);
            const SimplexVector bc = optimal_beta_with_costs(m, c);
            o.require(inverse_efficiency(m, bc, c) <= inverse_efficiency(m, a, c) * (1 + 1e-12),
                      "cost-aware efficiency, " + tag);
        }
        const MomentTable u = moments(p, SimplexVector::uniform(p.size()), example_tm(id));
        const double accel = variance_f1(u) / variance_g1(u, optimal_beta(u));
        worst_accel = std::max(worst_accel, accel / static_cast<double>(p.size()));
        o.require(accel <= static_cast<double>(p.size()) * (1 + 1e-12), "acceleration, " + tag);
    }
    o.detail << " worst closed-form rel err " << worst_closed << "; " << strict
             << " strict improvements checked; max acceleration/n " << worst_accel;
    return o;
}

EmpiricalStats run_many(int id, EstimatorKind kind, std::uint64_t seed, bool randomized = false) {
    const Problem& p = example(id);
    const EstimatorConfig cfg{kind, SimplexVector::uniform(p.size()), std::nullopt, 10000,
                              example_tm(id).v, randomized};
    return empirical_variance(p, cfg, 1000, RngSeed{seed, 0});
}

Outcome criterion9() {
    Outcome o;
    const auto t0 = Clock::now();
    const char* table_variance[] = {"29,1634", "4,9176", "10,6877"};
    for (int id = 1; id <= 3; ++id) {
        const double N = 10000;
        const EmpiricalStats f = run_many(id, EstimatorKind::F, 9000 + id);
        const EmpiricalStats r = run_many(id, EstimatorKind::randomized_F, 9100 + id);
        const double ref = reference_value(table_variance[id - 1]);
        const double z = (f.variance_of_estimator * N - ref) / (f.std_error_of_variance * N);
        o.require(std::fabs(z) <= 3, "F variance, example " + std::to_string(id));

        const MomentTable m = moments(example(id), SimplexVector::uniform(3), example_tm(id));
        const double gap = variance_gap(m);
        const double diff = (r.variance_of_estimator - f.variance_of_estimator) * N;
        const double joint = std::hypot(r.std_error_of_variance, f.std_error_of_variance) * N;
        const double zg = (diff - gap) / joint;
        o.require(std::fabs(zg) <= 3, "randomized gap, example " + std::to_string(id));
        o.detail << " ex" << id << ": N*Var[F]=" << f.variance_of_estimator * N << " (z=" << z
                 << "), gap " << diff << " vs " << gap << " (z=" << zg << ");";
    }
    const double dt = seconds_since(t0);
    o.require(dt < 180, "runtime");
    o.detail << " runtime " << dt << " s";
    return o;
}

Outcome criterion10() {
    Outcome o;
    const double N = 10000;
    const std::pair<EstimatorKind, const char*> cases[] = {{EstimatorKind::Z_l1, "59,8863"},
                                                           {EstimatorKind::Z_l2, "53,7493"}};
    std::uint64_t seed = 10000;
    for (auto [kind, ref_text] : cases) {
        const EmpiricalStats s = run_many(1, kind, ++seed, true);
        const double ref = reference_value(ref_text);
        const double z = (s.variance_of_estimator * N - ref) / (s.std_error_of_variance * N);
        o.require(std::fabs(z) <= 3, to_string(kind));
        o.detail << " " << to_string(kind) << ": N*Var=" << s.variance_of_estimator * N << " vs "
                 << ref << " (z=" << z << ");";
    }
    return o;
}

Outcome criterion11() {
    Outcome o;
    const Problem& p4 = example(4);
    const SimplexVector opt({0.3, 0.3, 0.4});
    const double r1 = case1_residual(p4, opt).norm;
    const double r3 = case3_residual(p4, opt, SimplexVector::uniform(3)).norm;
    o.require(r1 <= 1e-6 && r3 <= 1e-6, "residuals at the zero-variance optimum");
    o.detail << " ex4 optimum residuals " << r1 << ", " << r3 << ";";

    const SolverConfig sc;
    double worst = 0;
    int solves = 0;
    for (int id = 1; id <= 5; ++id) {
        const Problem& p = example(id);
        const std::size_t n = p.size();
        std::vector<double> bw(n);
        for (std::size_t i = 0; i < n; ++i) bw[i] = 1.0 + static_cast<double>(i);
        const SimplexVector beta = SimplexVector::normalized(bw);
        for (Objective obj : {Objective::case1, Objective::case3, Objective::case4}) {
            const std::optional<SimplexVector> b =
                obj == Objective::case3 ? std::optional<SimplexVector>(beta) : std::nullopt;
            const SolveResult r = solve_alpha(p, obj, b, sc);
            ++solves;
            // Recompute the residual independently of the solver's bookkeeping.
            const OptimalityResidual chk =
                obj == Objective::case1
                    ? case1_residual(p, r.alpha, solver_quadrature())
                    : case3_residual(p, r.alpha, b ? *b : SimplexVector::uniform(n),
                                     solver_quadrature());
            const double res = r.at_floor ? r.kkt_residual : chk.norm;
            worst = std::max(worst, res);
            o.require(res <= sc.grad_tol,
                      "solver residual, example " + std::to_string(id) + " " + to_string(obj));
        }
    }
    o.detail << " " << solves << " solves, worst residual " << worst
             << " (free coordinates at boundary optima);";

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(0.05, 5.0);
    std::uniform_real_distribution<double> expo(0.0, 2.0);
    int counts[4] = {0, 0, 0, 0};
    for (int k = 0; k < 200; ++k) {
        const std::size_t n = 2 + static_cast<std::size_t>(k % 4);
        const SimplexVector a = random_simplex(rng, n);
        std::vector<double> s(n);
        if (k % 2 == 0) {
            for (double& x : s) x = unif(rng);
        } else {
            // sigma'^2 = c / alpha^g orders alpha_i sigma'^2_i with or against alpha.
            const double g = expo(rng);
            const double c = unif(rng);
            for (std::size_t i = 0; i < n; ++i) s[i] = c / std::pow(a[i], g);
        }
        double vf = 0, vg = 0;
        for (std::size_t i = 0; i < n; ++i) {
            vf += a[i] * s[i];
            vg += static_cast<double>(n) * a[i] * a[i] * s[i];
        }
        const DominanceVerdict d = dominance_compare(a, s);
        const double tol = 1e-12 * std::max(vf, vg);
        ++counts[static_cast<int>(d.tag)];
        if (d.f_geq_g) o.require(vf >= vg - tol, "F_geq_G verdict");
        if (d.f_leq_g) o.require(vf <= vg + tol, "F_leq_G verdict");
    }
    o.detail << " dominance verdicts over 200 instances: F_geq_G " << counts[0] << ", F_leq_G "
             << counts[1] << ", equal " << counts[2] << ", inconclusive " << counts[3];
    return o;
}

std::string run_capture(const std::string& cmd, int& status) {
    std::string out;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) {
        status = -1;
        return out;
    }
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
    status = pclose(pipe);
    return out;
}

Outcome criterion12() {
    Outcome o;
    const std::string cmd =
        std::string("\"") + GENMIS_BENCH_EXE + "\" bounds --problem 1 --seed 42 --format csv";
    int s1 = 0, s2 = 0;
    const std::string a = run_capture(cmd, s1);
    const std::string b = run_capture(cmd, s2);
    o.require(s1 == 0 && s2 == 0, "exit status");
    o.require(!a.empty(), "non-empty output");
    o.require(a == b, "byte-identical output");
    o.detail << " " << a.size() << " bytes, identical=" << (a == b ? "yes" : "no");
    return o;
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"Example 1 bounds, equal alpha", criterion1},
        {"Example 1 bounds, alpha ~ 1/v", criterion2},
        {"Example 2 bounds", criterion3},
        {"Examples 3 and 4 bounds", criterion4},
        {"efficiency, Examples 1 and 5", criterion5},
        {"Example 4 zero-variance certificate", criterion6},
        {"bound dominance suite", criterion7},
        {"optimal beta dominance suite", criterion8},
        {"empirical vs analytic variance", criterion9},
        {"linear-combination bounds realized", criterion10},
        {"stationarity residuals and dominance verdicts", criterion11},
        {"reproducible CSV output", criterion12},
    };
    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        if (!o.pass) ++failures;
        std::printf("criterion %2zu: %s  %s (%.2f s):%s\n", k + 1, o.pass ? "PASS" : "FAIL",
                    criteria[k].first, seconds_since(t0), o.detail.str().c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
                criteria.size());
    return failures == 0 ? 0 : 1;
}
