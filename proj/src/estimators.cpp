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

#include "genmis/estimators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "genmis/analysis.hpp"
#include "genmis/errors.hpp"

namespace genmis {

namespace {

// Lane reserved for the one-sample estimators, above any technique index.
constexpr std::uint32_t kMixtureLane = 0xFFFFFFFFu;

void check_sizes(const Problem& problem, const SimplexVector& alpha) {
    if (problem.size() != alpha.size())
        throw ValidationError("alpha length does not match the technique count");
}

[[noreturn]] void throw_zero_mixture(Real x) {
    std::ostringstream msg;
    msg << "sampling density vanishes at x=" << static_cast<double>(x)
        << " where f is nonzero (coverage violated)";
    throw ZeroMixtureAtSample(msg.str(), x);
}

// f(x) / psi(x); zero where f vanishes.
Real balance_ratio(const Problem& problem, const SimplexVector& alpha, Real x) {
    const Real fx = problem.integrand(x);
    if (fx == 0) return 0;
    const Real psi = mixture_pdf(problem, alpha, x);
    if (!(psi > 0)) throw_zero_mixture(x);
    return fx / psi;
}

Real plain_ratio(const Problem& problem, std::size_t i, Real x) {
    const Real fx = problem.integrand(x);
    if (fx == 0) return 0;
    const Real p = problem.techniques[i].pdf(x);
    if (!(p > 0)) throw_zero_mixture(x);
    return fx / p;
}

Allocation realized(std::vector<std::size_t> counts, std::size_t total) {
    Allocation a;
    a.counts = std::move(counts);
    a.total = total;
    return a;
}

} // namespace

std::string to_string(EstimatorKind kind) {
    switch (kind) {
    case EstimatorKind::F: return "F";
    case EstimatorKind::G: return "G";
    case EstimatorKind::randomized_F: return "randomized_F";
    case EstimatorKind::Z_l1: return "Z_l1";
    case EstimatorKind::Z_l2: return "Z_l2";
    case EstimatorKind::Z_l3: return "Z_l3";
    }
    return "?";
}

AliasTable::AliasTable(std::span<const double> probabilities)
    : prob_(probabilities.size()), alias_(probabilities.size()) {
    const std::size_t n = probabilities.size();
    if (n == 0) throw ValidationError("alias table needs at least one entry");
    double total = 0.0;
    for (double p : probabilities) {
        if (!(p >= 0) || !std::isfinite(p))
            throw ValidationError("alias table probabilities must be >= 0");
        total += p;
    }
    if (!(total > 0)) throw ValidationError("alias table probabilities sum to 0");

    // Vose's construction.
    std::vector<double> scaled(n);
    std::vector<std::size_t> small, large;
    for (std::size_t i = 0; i < n; ++i) {
        scaled[i] = probabilities[i] * static_cast<double>(n) / total;
        (scaled[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
        const std::size_t s = small.back();
        small.pop_back();
        const std::size_t l = large.back();
        prob_[s] = scaled[s];
        alias_[s] = l;
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        if (scaled[l] < 1.0) {
            large.pop_back();
            small.push_back(l);
        }
    }
    for (std::size_t i : large) prob_[i] = 1.0, alias_[i] = i;
    for (std::size_t i : small) prob_[i] = 1.0, alias_[i] = i;
}

std::size_t AliasTable::sample(double u) const noexcept {
    const double x = u * static_cast<double>(prob_.size());
    const std::size_t i = std::min(static_cast<std::size_t>(x), prob_.size() - 1);
    return (x - static_cast<double>(i)) < prob_[i] ? i : alias_[i];
}

EstimateRun estimate_g(const Problem& problem, const SimplexVector& alpha,
                       const SimplexVector& beta, std::size_t N, RngSeed seed) {
    check_sizes(problem, alpha);
    check_sizes(problem, beta);
    const std::size_t n = problem.size();
    EstimateRun run;
    run.counts = allocate(beta, N);
    run.estimator_kind = (alpha == beta) ? EstimatorKind::F : EstimatorKind::G;
    run.per_technique.assign(n, 0.0);

    const CounterRng rng(seed);
    Real value = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& sampler = problem.techniques[i].sampler;
        Real sum = 0;
        for (std::size_t j = 0; j < run.counts.counts[i]; ++j) {
            const Real x = sampler(rng.uniform(static_cast<std::uint32_t>(i), j));
            sum += balance_ratio(problem, alpha, x);
        }
        run.per_technique[i] = static_cast<double>(sum);
        value += alpha[i] * sum / static_cast<Real>(run.counts.counts[i]);
    }
    run.value = static_cast<double>(value);
    return run;
}

EstimateRun estimate_f(const Problem& problem, const SimplexVector& alpha,
                       std::size_t N, RngSeed seed) {
    EstimateRun run = estimate_g(problem, alpha, alpha, N, seed);
    run.estimator_kind = EstimatorKind::F;
    return run;
}

EstimateRun estimate_randomized(const Problem& problem, const SimplexVector& alpha,
                                std::size_t N, RngSeed seed) {
    check_sizes(problem, alpha);
    if (N < 1) throw BudgetTooSmall("randomized estimator needs N >= 1");
    const std::size_t n = problem.size();
    const AliasTable table(alpha.values());
    const CounterRng rng(seed);

    std::vector<Real> sums(n, 0);
    std::vector<std::size_t> counts(n, 0);
    for (std::size_t j = 0; j < N; ++j) {
        const auto u = rng.uniforms(kMixtureLane, j);
        const std::size_t i = table.sample(u[1]);
        const Real x = problem.techniques[i].sampler(u[0]);
        sums[i] += balance_ratio(problem, alpha, x);
        ++counts[i];
    }

    EstimateRun run;
    run.estimator_kind = EstimatorKind::randomized_F;
    run.counts = realized(std::move(counts), N);
    Real total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        run.per_technique.push_back(static_cast<double>(sums[i]));
        total += sums[i];
    }
    run.value = static_cast<double>(total / static_cast<Real>(N));
    return run;
}

std::vector<double> linear_weights(LinearKind kind, const SimplexVector& alpha,
                                   std::span<const double> v) {
    if (v.size() != alpha.size())
        throw ValidationError("v length does not match alpha");
    std::vector<double> w(alpha.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (kind != LinearKind::l2 && !(v[i] > 0))
            throw NonPositiveValue("linear-combination weights need every v_i > 0");
        switch (kind) {
        case LinearKind::l1: w[i] = alpha[i] / v[i]; break;
        case LinearKind::l2: w[i] = alpha[i]; break;
        case LinearKind::l3: w[i] = alpha[i] / std::sqrt(v[i]); break;
        }
    }
    double total = 0.0;
    for (double x : w) total += x;
    for (double& x : w) x /= total;
    return w;
}

EstimateRun estimate_linear(const Problem& problem, LinearKind kind,
                            const SimplexVector& alpha, std::span<const double> v,
                            std::size_t N, RngSeed seed, bool randomized) {
    check_sizes(problem, alpha);
    const std::size_t n = problem.size();
    const std::vector<double> w = linear_weights(kind, alpha, v);
    const CounterRng rng(seed);

    EstimateRun run;
    run.estimator_kind = kind == LinearKind::l1   ? EstimatorKind::Z_l1
                         : kind == LinearKind::l2 ? EstimatorKind::Z_l2
                                                  : EstimatorKind::Z_l3;
    run.per_technique.assign(n, 0.0);

    if (!randomized) {
        run.counts = allocate(alpha, N);
        Real value = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& sampler = problem.techniques[i].sampler;
            Real sum = 0;
            for (std::size_t j = 0; j < run.counts.counts[i]; ++j)
                sum += plain_ratio(problem, i,
                                   sampler(rng.uniform(static_cast<std::uint32_t>(i), j)));
            run.per_technique[i] = static_cast<double>(sum);
            value += w[i] * sum / static_cast<Real>(run.counts.counts[i]);
        }
        run.value = static_cast<double>(value);
        return run;
    }

    if (N < 1) throw BudgetTooSmall("randomized estimator needs N >= 1");
    const AliasTable table(alpha.values());
    std::vector<Real> sums(n, 0);
    std::vector<std::size_t> counts(n, 0);
    for (std::size_t j = 0; j < N; ++j) {
        const auto u = rng.uniforms(kMixtureLane, j);
        const std::size_t i = table.sample(u[1]);
        const Real x = problem.techniques[i].sampler(u[0]);
        sums[i] += w[i] / alpha[i] * plain_ratio(problem, i, x);
        ++counts[i];
    }
    run.counts = realized(std::move(counts), N);
    Real total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        run.per_technique[i] = static_cast<double>(sums[i]);
        total += sums[i];
    }
    run.value = static_cast<double>(total / static_cast<Real>(N));
    return run;
}

EstimateRun run_estimator(const Problem& problem, const EstimatorConfig& cfg,
                          RngSeed seed) {
    switch (cfg.kind) {
    case EstimatorKind::F:
        return estimate_f(problem, cfg.alpha, cfg.N, seed);
    case EstimatorKind::G:
        return estimate_g(problem, cfg.alpha, cfg.beta.value_or(cfg.alpha), cfg.N, seed);
    case EstimatorKind::randomized_F:
        return estimate_randomized(problem, cfg.alpha, cfg.N, seed);
    case EstimatorKind::Z_l1:
        return estimate_linear(problem, LinearKind::l1, cfg.alpha, cfg.v, cfg.N, seed,
                               cfg.randomized);
    case EstimatorKind::Z_l2:
        return estimate_linear(problem, LinearKind::l2, cfg.alpha, cfg.v, cfg.N, seed,
                               cfg.randomized);
    case EstimatorKind::Z_l3:
        return estimate_linear(problem, LinearKind::l3, cfg.alpha, cfg.v, cfg.N, seed,
                               cfg.randomized);
    }
    throw ValidationError("unknown estimator kind");
}

double analytic_variance(const EstimatorConfig& cfg, const MomentTable& m) {
    if (!(m.alpha == cfg.alpha))
        throw ValidationError("moment table was computed for a different alpha");
    const std::size_t n = m.size();
    const double N = static_cast<double>(cfg.N);
    switch (cfg.kind) {
    case EstimatorKind::F:
    case EstimatorKind::G: {
        const SimplexVector& beta =
            cfg.kind == EstimatorKind::G && cfg.beta ? *cfg.beta : cfg.alpha;
        const Allocation a = allocate(beta, cfg.N);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            s += m.alpha[i] * m.alpha[i] * m.sigma_prime_sq[i] /
                 static_cast<double>(a.counts[i]);
        return s;
    }
    case EstimatorKind::randomized_F:
        return (variance_f1(m) + variance_gap(m)) / N;
    case EstimatorKind::Z_l1:
    case EstimatorKind::Z_l2:
    case EstimatorKind::Z_l3: {
        const LinearKind kind = cfg.kind == EstimatorKind::Z_l1   ? LinearKind::l1
                                : cfg.kind == EstimatorKind::Z_l2 ? LinearKind::l2
                                                                  : LinearKind::l3;
        const std::vector<double> w = linear_weights(kind, cfg.alpha, m.v);
        if (!cfg.randomized) {
            const Allocation a = allocate(cfg.alpha, cfg.N);
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                s += w[i] * w[i] * m.v[i] / static_cast<double>(a.counts[i]);
            return s;
        }
        double second = 0.0, mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            second += w[i] * w[i] / m.alpha[i] * (m.v[i] + m.mu_i[i] * m.mu_i[i]);
            mean += w[i] * m.mu_i[i];
        }
        return (second - mean * mean) / N;
    }
    }
    throw ValidationError("unknown estimator kind");
}

EmpiricalStats summarize(std::span<const double> values) {
    const std::size_t r = values.size();
    if (r < 2) throw ValidationError("need at least two runs for a variance");
    const double rd = static_cast<double>(r);
    long double mean = 0;
    for (double x : values) mean += x;
    mean /= rd;
    long double m2 = 0, m4 = 0;
    for (double x : values) {
        const long double d = x - mean;
        const long double d2 = d * d;
        m2 += d2;
        m4 += d2 * d2;
    }
    const long double s2 = m2 / (rd - 1);
    m4 /= rd;

    EmpiricalStats out;
    out.mean = static_cast<double>(mean);
    out.variance_of_estimator = static_cast<double>(s2);
    out.runs = r;
    const long double var_s2 = (m4 - s2 * s2 * (rd - 3) / (rd - 1)) / rd;
    out.std_error_of_variance = static_cast<double>(std::sqrt(std::max<long double>(0, var_s2)));
    return out;
}

EmpiricalStats empirical_variance(const Problem& problem, const EstimatorConfig& cfg,
                                  std::size_t runs, RngSeed base, unsigned threads) {
    if (runs < 2) throw ValidationError("empirical_variance needs runs >= 2");
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, runs));

    std::vector<double> values(runs);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (std::size_t r = next++; r < runs; r = next++) {
            try {
                RngSeed s{base.seed, base.stream + static_cast<std::uint32_t>(r)};
                values[r] = run_estimator(problem, cfg, s).value;
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = runs;
            }
        }
    };

    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return summarize(values);
}

} // namespace genmis
