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

#include "genmis/bench.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "genmis/analysis.hpp"
#include "genmis/errors.hpp"

namespace genmis::bench {

namespace {

const std::vector<std::string> kBoundsStrategies{"equal", "inv-variance"};
const std::vector<std::string> kEfficiencyStrategies{"equal", "inv-variance",
                                                     "inv-cost-variance"};

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) throw ValidationError("empty list entry in '" + text + "'");
        out.push_back(item.substr(b, e - b + 1));
    }
    if (out.empty()) throw ValidationError("empty list");
    return out;
}

std::vector<double> parse_reals(const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split(text, ',')) {
        double x = 0.0;
        const auto* end = item.data() + item.size();
        const auto [ptr, ec] = std::from_chars(item.data(), end, x);
        if (ec != std::errc() || ptr != end)
            throw ValidationError("not a number: '" + item + "'");
        out.push_back(x);
    }
    return out;
}

std::string shortest(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

std::string join(const std::vector<double>& xs, const char* sep) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? sep : "") + shortest(xs[i]);
    return s;
}

std::string six_digits(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

EstimatorKind parse_estimator(const std::string& name) {
    for (auto k : {EstimatorKind::F, EstimatorKind::G, EstimatorKind::randomized_F,
                   EstimatorKind::Z_l1, EstimatorKind::Z_l2, EstimatorKind::Z_l3})
        if (to_string(k) == name) return k;
    throw ValidationError("unknown estimator '" + name + "'");
}

Objective parse_objective(const std::string& name) {
    for (auto o : {Objective::case1, Objective::case3, Objective::case4})
        if (to_string(o) == name) return o;
    throw ValidationError("unknown optimization case '" + name + "'");
}

OutputFormat parse_format(const std::string& name) {
    if (name == "csv") return OutputFormat::csv;
    if (name == "markdown") return OutputFormat::markdown;
    throw ValidationError("unknown format '" + name + "' (csv|markdown)");
}

const std::vector<std::string>& strategies_or(const RunConfig& cfg,
                                             const std::vector<std::string>& fallback) {
    return cfg.strategies.empty() ? fallback : cfg.strategies;
}

Problem unit_cost_problem(int id) {
    Problem p = example_problem(id);
    const std::vector<double> ones(p.size(), 1.0);
    return with_costs(p, ones);
}

TableRow key_value(const std::string& key, double value) {
    return TableRow{{key}, {value}};
}

} // namespace

void RunConfig::validate() const {
    if (problem_id < 1 || problem_id > 5)
        throw UnknownExample("unknown example id " + std::to_string(problem_id) +
                             " (expected 1..5)");
    if (runs < 1) throw ValidationError("runs must be >= 1");
    if (N < 1) throw ValidationError("N must be >= 1");
    quad.validate();
}

std::vector<std::vector<double>> resolve_costs(const std::string& profile, int problem) {
    if (profile == "paper") return example_cost_profiles(problem);
    const std::size_t n = example_problem(problem).size();
    if (profile == "unit") return {std::vector<double>(n, 1.0)};
    std::vector<double> c = parse_reals(profile);
    if (c.size() != n)
        throw ValidationError("expected " + std::to_string(n) + " costs, got " +
                              std::to_string(c.size()));
    for (double x : c)
        if (!(x > 0) || !std::isfinite(x)) throw ValidationError("costs must be positive");
    return {c};
}

Table cmd_bounds(const RunConfig& cfg) {
    cfg.validate();
    const Problem problem = unit_cost_problem(cfg.problem_id);
    const auto registry = builtin_strategies();
    const TechniqueMoments tm = technique_moments(problem, cfg.quad);

    Table t;
    t.label_names = {"strategy"};
    t.column_names = {"B1", "harmonic_mean", "B2", "B3", "power_mean_m1_2", "variance"};
    for (const auto& name : strategies_or(cfg, kBoundsStrategies)) {
        const AlphaStrategy& s = find_strategy(registry, name);
        const MomentTable m = moments(problem, s.rule(problem, tm), tm, cfg.quad);
        const BoundsReport b = bounds_unbiased(m);
        const double slack = 1e-12 * std::fabs(b.variance_F1);
        for (double bound : {b.harmonic_bound, b.arithmetic_bound, b.power_half_bound}) {
            if (bound < b.variance_F1 - slack) {
                std::ostringstream msg;
                msg.precision(17);
                msg << "self-check failed for strategy '" << name << "': bound " << bound
                    << " < variance " << b.variance_F1;
                throw SelfCheckViolation(msg.str());
            }
        }
        t.rows.push_back({{name},
                          {b.harmonic_bound, b.harmonic_mean, b.arithmetic_bound,
                           b.power_half_bound, b.power_mean_neg_half, b.variance_F1}});
    }
    return t;
}

Table cmd_efficiency(const RunConfig& cfg) {
    cfg.validate();
    const Problem base = example_problem(cfg.problem_id);
    const auto registry = builtin_strategies();
    const TechniqueMoments tm = technique_moments(base, cfg.quad);

    Table t;
    t.label_names = {"strategy", "costs"};
    t.column_names = {"E_F_inv", "E_G_inv"};
    for (const auto& costs : resolve_costs(cfg.cost_profile, cfg.problem_id)) {
        const Problem problem = with_costs(base, costs);
        for (const auto& name : strategies_or(cfg, kEfficiencyStrategies)) {
            const AlphaStrategy& s = find_strategy(registry, name);
            const SimplexVector alpha = s.rule(problem, tm);
            const MomentTable m = moments(problem, alpha, tm, cfg.quad);
            const SimplexVector beta =
                optimal_beta_with_costs(m, costs, cfg.solver.simplex_floor);
            const double ef = inverse_efficiency(m, alpha, costs);
            const double eg = inverse_efficiency(m, beta, costs);
            if (eg > ef * (1 + 1e-12)) {
                std::ostringstream msg;
                msg << "self-check failed for strategy '" << name
                    << "': optimal-beta inverse efficiency " << eg << " > " << ef;
                throw SelfCheckViolation(msg.str());
            }
            t.rows.push_back({{name, join(costs, ";")}, {ef, eg}});
        }
    }
    return t;
}

Table cmd_estimate(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.runs < 2) throw ValidationError("estimate needs runs >= 2");
    const Problem problem = example_problem(cfg.problem_id);

    // Validate inputs before any sampling or quadrature.
    std::optional<SimplexVector> alpha;
    if (cfg.alpha) alpha = SimplexVector(*cfg.alpha);
    std::optional<SimplexVector> beta;
    if (cfg.beta) beta = SimplexVector(*cfg.beta);
    if (alpha && alpha->size() != problem.size())
        throw ValidationError("alpha length does not match the technique count");
    if (beta && beta->size() != problem.size())
        throw ValidationError("beta length does not match the technique count");
    if (cfg.N < problem.size()) allocate(SimplexVector::uniform(problem.size()), cfg.N);

    const TechniqueMoments tm = technique_moments(problem, cfg.quad);
    if (!alpha) {
        const auto registry = builtin_strategies();
        const std::string name = cfg.strategies.empty() ? "equal" : cfg.strategies.front();
        alpha = find_strategy(registry, name).rule(problem, tm);
    }
    EstimatorKind kind = cfg.estimator;
    if (beta && kind == EstimatorKind::F) kind = EstimatorKind::G;

    const EstimatorConfig ec{kind, *alpha, beta, cfg.N, tm.v, cfg.randomized};
    const MomentTable m = moments(problem, *alpha, tm, cfg.quad);
    const double analytic = analytic_variance(ec, m);
    const EstimateRun first = run_estimator(problem, ec, cfg.seed);
    const EmpiricalStats st = empirical_variance(problem, ec, cfg.runs, cfg.seed);

    const double diff = st.variance_of_estimator - analytic;
    double z = 0.0;
    if (st.std_error_of_variance > 0)
        z = diff / st.std_error_of_variance;
    else if (std::fabs(diff) > 1e-12 * std::max(1.0, m.mu * m.mu))
        z = std::numeric_limits<double>::infinity();

    const double n = static_cast<double>(cfg.N);
    Table t;
    t.label_names = {"quantity"};
    t.column_names = {"value"};
    t.rows = {key_value("estimate", first.value),
              key_value("reference_mu", m.mu),
              key_value("empirical_mean", st.mean),
              key_value("empirical_variance", st.variance_of_estimator),
              key_value("std_error_of_variance", st.std_error_of_variance),
              key_value("analytic_variance", analytic),
              key_value("empirical_variance_times_N", st.variance_of_estimator * n),
              key_value("analytic_variance_times_N", analytic * n),
              key_value("z_discrepancy", z),
              key_value("N", n),
              key_value("runs", static_cast<double>(st.runs))};
    return t;
}

Table cmd_optimize(const RunConfig& cfg) {
    cfg.validate();
    const Problem problem = example_problem(cfg.problem_id);
    std::optional<SimplexVector> beta;
    if (cfg.beta) beta = SimplexVector(*cfg.beta);
    if (cfg.objective == Objective::case3 && !beta)
        throw ValidationError("case3 requires --beta");

    QuadratureConfig quad = solver_quadrature();
    quad.rel_tol = std::min(quad.rel_tol, cfg.quad.rel_tol);
    const SolveResult r = solve_alpha(problem, cfg.objective, beta, cfg.solver, quad);

    const SimplexVector equal = SimplexVector::uniform(problem.size());
    const MixtureMoments mm = mixture_moments(problem, equal, quad);
    const SimplexVector b = cfg.objective == Objective::case3 ? *beta : equal;
    double baseline = 0.0;
    for (std::size_t i = 0; i < problem.size(); ++i)
        baseline += equal[i] * equal[i] * mm.sigma_prime_sq[i] / b[i];

    Table t;
    t.label_names = {"quantity"};
    t.column_names = {"value"};
    for (std::size_t i = 0; i < r.alpha.size(); ++i)
        t.rows.push_back(key_value("alpha_" + std::to_string(i + 1), r.alpha[i]));
    t.rows.push_back(key_value("objective", r.objective));
    t.rows.push_back(key_value("baseline_equal_alpha", baseline));
    t.rows.push_back(key_value("residual_norm", r.residual.norm));
    t.rows.push_back(key_value("kkt_residual", r.kkt_residual));
    t.rows.push_back(key_value("iterations", static_cast<double>(r.iterations)));
    t.rows.push_back(key_value("at_floor", r.at_floor ? 1.0 : 0.0));
    return t;
}

std::string render(const Table& table, OutputFormat format) {
    std::ostringstream out;
    if (format == OutputFormat::csv) {
        bool first = true;
        for (const auto& h : table.label_names) out << (first ? "" : ",") << h, first = false;
        for (const auto& h : table.column_names) out << (first ? "" : ",") << h, first = false;
        out << '\n';
        for (const auto& row : table.rows) {
            first = true;
            for (const auto& l : row.labels) out << (first ? "" : ",") << l, first = false;
            for (double v : row.values) out << (first ? "" : ",") << shortest(v), first = false;
            out << '\n';
        }
        return out.str();
    }
    out << '|';
    for (const auto& h : table.label_names) out << ' ' << h << " |";
    for (const auto& h : table.column_names) out << ' ' << h << " |";
    out << "\n|";
    for (std::size_t i = 0; i < table.label_names.size(); ++i) out << "---|";
    for (std::size_t i = 0; i < table.column_names.size(); ++i) out << "---:|";
    out << '\n';
    for (const auto& row : table.rows) {
        out << '|';
        for (const auto& l : row.labels) out << ' ' << l << " |";
        for (double v : row.values) out << ' ' << six_digits(v) << " |";
        out << '\n';
    }
    return out.str();
}

namespace {

void apply_json(RunConfig& cfg, const nlohmann::json& j) {
    auto reals = [](const nlohmann::json& v) {
        if (v.is_string()) return parse_reals(v.get<std::string>());
        return v.get<std::vector<double>>();
    };
    for (const auto& [key, v] : j.items()) {
        if (key == "problem") cfg.problem_id = v.get<int>();
        else if (key == "strategy" || key == "strategies")
            cfg.strategies = v.is_string() ? split(v.get<std::string>(), ',')
                                           : v.get<std::vector<std::string>>();
        else if (key == "costs")
            cfg.cost_profile = v.is_string() ? v.get<std::string>() : join(reals(v), ",");
        else if (key == "n") cfg.N = v.get<std::size_t>();
        else if (key == "runs") cfg.runs = v.get<std::size_t>();
        else if (key == "seed") cfg.seed.seed = v.get<std::uint64_t>();
        else if (key == "stream") cfg.seed.stream = v.get<std::uint32_t>();
        else if (key == "format") cfg.format = parse_format(v.get<std::string>());
        else if (key == "tol_quad") cfg.quad.rel_tol = v.get<double>();
        else if (key == "alpha") cfg.alpha = reals(v);
        else if (key == "beta") cfg.beta = reals(v);
        else if (key == "estimator") cfg.estimator = parse_estimator(v.get<std::string>());
        else if (key == "randomized") cfg.randomized = v.get<bool>();
        else if (key == "case") cfg.objective = parse_objective(v.get<std::string>());
        else if (key == "quadrature") {
            for (const auto& [qk, qv] : v.items()) {
                if (qk == "rel_tol") cfg.quad.rel_tol = qv.get<double>();
                else if (qk == "abs_tol") cfg.quad.abs_tol = qv.get<double>();
                else if (qk == "max_subdivisions") cfg.quad.max_subdivisions = qv.get<std::size_t>();
                else throw ValidationError("unknown quadrature key '" + qk + "'");
            }
        } else if (key == "solver") {
            for (const auto& [sk, sv] : v.items()) {
                if (sk == "max_iters") cfg.solver.max_iters = sv.get<std::size_t>();
                else if (sk == "grad_tol") cfg.solver.grad_tol = sv.get<double>();
                else if (sk == "step_init") cfg.solver.step_init = sv.get<double>();
                else if (sk == "simplex_floor") cfg.solver.simplex_floor = sv.get<double>();
                else throw ValidationError("unknown solver key '" + sk + "'");
            }
        } else {
            throw ValidationError("unknown config key '" + key + "'");
        }
    }
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file '" + path + "'");
    RunConfig cfg;
    try {
        apply_json(cfg, nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("bad config file '" + path + "': " + e.what());
    }
    return cfg;
}

struct Flags {
    int problem = 1;
    std::string strategy, costs, format, config, alpha, beta, estimator, objective;
    std::size_t n = 0, runs = 0;
    std::uint64_t seed = 0;
    double tol_quad = 0.0;
    bool randomized = false;
};

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Balance-heuristic multiple importance sampling benchmarks"};
    app.name("bench");
    app.fallthrough();
    app.require_subcommand(1);

    Flags f;
    auto* o_problem = app.add_option("--problem", f.problem, "Example problem 1..5");
    auto* o_strategy = app.add_option("--strategy", f.strategy, "Alpha strategies, comma separated");
    auto* o_costs = app.add_option("--costs", f.costs, "paper | unit | c1,c2,...");
    auto* o_n = app.add_option("--n", f.n, "Sample budget N");
    auto* o_runs = app.add_option("--runs", f.runs, "Replications");
    auto* o_seed = app.add_option("--seed", f.seed, "RNG seed");
    auto* o_format = app.add_option("--format", f.format, "csv | markdown");
    auto* o_config = app.add_option("--config", f.config, "JSON config file");
    auto* o_tol = app.add_option("--tol-quad", f.tol_quad, "Quadrature relative tolerance");

    auto* bounds = app.add_subcommand("bounds", "Variance bounds table");
    auto* efficiency = app.add_subcommand("efficiency", "Inverse efficiency of F and optimal G");
    auto* estimate = app.add_subcommand("estimate", "Monte Carlo estimate and empirical variance");
    auto* optimize = app.add_subcommand("optimize", "Optimal alpha");

    CLI::Option* o_alpha = estimate->add_option("--alpha", f.alpha, "Alpha, comma separated");
    CLI::Option* o_beta_e = estimate->add_option("--beta", f.beta, "Beta, comma separated");
    CLI::Option* o_est = estimate->add_option("--estimator", f.estimator,
                                              "F | G | randomized_F | Z_l1 | Z_l2 | Z_l3");
    CLI::Option* o_rand = estimate->add_flag("--randomized", f.randomized,
                                             "Randomized index draw for Z estimators");
    CLI::Option* o_case = optimize->add_option("--case", f.objective, "case1 | case3 | case4");
    CLI::Option* o_beta_o = optimize->add_option("--beta", f.beta, "Fixed beta for case3");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        RunConfig cfg = o_config->count() ? load_config(f.config) : RunConfig{};
        if (o_problem->count()) cfg.problem_id = f.problem;
        if (o_strategy->count()) cfg.strategies = split(f.strategy, ',');
        if (o_costs->count()) cfg.cost_profile = f.costs;
        if (o_n->count()) cfg.N = f.n;
        if (o_runs->count()) cfg.runs = f.runs;
        if (o_seed->count()) cfg.seed.seed = f.seed;
        if (o_format->count()) cfg.format = parse_format(f.format);
        if (o_tol->count()) cfg.quad.rel_tol = f.tol_quad;
        if (o_alpha->count()) cfg.alpha = parse_reals(f.alpha);
        if (o_beta_e->count() || o_beta_o->count()) cfg.beta = parse_reals(f.beta);
        if (o_est->count()) cfg.estimator = parse_estimator(f.estimator);
        if (o_rand->count()) cfg.randomized = f.randomized;
        if (o_case->count()) cfg.objective = parse_objective(f.objective);

        Table t;
        if (bounds->parsed()) t = cmd_bounds(cfg);
        else if (efficiency->parsed()) t = cmd_efficiency(cfg);
        else if (estimate->parsed()) t = cmd_estimate(cfg);
        else t = cmd_optimize(cfg);
        out << render(t, cfg.format);
        return 0;
    } catch (const SelfCheckViolation& e) {
        err << "self-check violation: " << e.what() << '\n';
        return 4;
    } catch (const DidNotConverge& e) {
        err << "did not converge: " << e.what() << "\nbest iterate:";
        for (double x : e.best()) err << ' ' << x;
        err << '\n';
        return 3;
    } catch (const NonConvergence& e) {
        err << "quadrature did not converge: " << e.what() << '\n';
        return 3;
    } catch (const NonFiniteIntegrand& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const ValidationError& e) {
        err << "invalid input: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << "invalid input: " << e.what() << '\n';
        return 2;
    }
}

} // namespace genmis::bench
