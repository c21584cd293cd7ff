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

#include "genmis/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "genmis/errors.hpp"

namespace genmis {

std::vector<double> Problem::costs() const {
    std::vector<double> c;
    c.reserve(techniques.size());
    for (const auto& t : techniques) c.push_back(t.cost);
    return c;
}

void Problem::validate(const QuadratureConfig& cfg) const {
    if (techniques.empty())
        throw ValidationError("problem needs at least one technique");
    for (const auto& t : techniques) {
        if (!(t.cost > 0) || !std::isfinite(t.cost))
            throw ValidationError("technique '" + t.label +
                                  "' must have a positive cost");
        if (!t.pdf || !t.sampler)
            throw ValidationError("technique '" + t.label +
                                  "' lacks a pdf or sampler");
        const double mass = integrate(t.pdf, domain, cfg);
        if (std::fabs(mass - 1.0) > 1e-8) {
            std::ostringstream msg;
            msg << "technique '" << t.label << "' integrates to " << mass;
            throw NotNormalized(msg.str());
        }
    }
    constexpr int kGrid = 2000;
    for (int k = 1; k < kGrid; ++k) {
        const Real x = domain.lo + Real{domain.width()} * k / kGrid;
        Real total = 0;
        for (const auto& t : techniques) {
            const Real p = t.pdf(x);
            if (p < 0) throw ValidationError("technique '" + t.label +
                                             "' has a negative density");
            total += p;
        }
        if (integrand(x) != 0 && !(total > 0)) {
            std::ostringstream msg;
            msg << "coverage violated: f != 0 but every pdf is 0 at x="
                << static_cast<double>(x);
            throw ValidationError(msg.str());
        }
    }
}

Problem with_costs(const Problem& p, std::span<const double> costs) {
    if (costs.size() != p.size())
        throw ValidationError("cost vector length does not match techniques");
    Problem out = p;
    for (std::size_t i = 0; i < costs.size(); ++i) {
        if (!(costs[i] > 0) || !std::isfinite(costs[i]))
            throw ValidationError("costs must be positive");
        out.techniques[i].cost = costs[i];
    }
    return out;
}

SimplexVector::SimplexVector(std::vector<double> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) throw ValidationError("simplex vector is empty");
    double sum = 0.0;
    for (double x : c_) {
        if (!std::isfinite(x) || !(x > 0))
            throw ValidationError("simplex entries must be finite and > 0");
        sum += x;
    }
    if (std::fabs(sum - 1.0) > kSumTolerance) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "simplex entries sum to " << sum << ", not 1";
        throw ValidationError(msg.str());
    }
}

SimplexVector SimplexVector::normalized(std::span<const double> weights) {
    const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(sum > 0) || !std::isfinite(sum))
        throw ValidationError("weights must have a positive finite sum");
    std::vector<double> c(weights.begin(), weights.end());
    for (double& x : c) x /= sum;
    return SimplexVector(std::move(c));
}

SimplexVector SimplexVector::normalized_with_floor(std::span<const double> weights,
                                                   double floor) {
    const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(sum > 0) || !std::isfinite(sum))
        throw ValidationError("weights must have a positive finite sum");
    std::vector<double> c(weights.begin(), weights.end());
    for (double& x : c) {
        if (x < 0) throw ValidationError("weights must be nonnegative");
        x /= sum;
        if (x < floor) x = floor;
    }
    return normalized(c);
}

SimplexVector SimplexVector::uniform(std::size_t n) {
    if (n == 0) throw ValidationError("simplex vector is empty");
    return SimplexVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Allocation allocate(const SimplexVector& beta, std::size_t total) {
    const std::size_t n = beta.size();
    if (total < n) {
        std::ostringstream msg;
        msg << "budget N=" << total << " is smaller than n=" << n;
        throw BudgetTooSmall(msg.str());
    }
    Allocation a;
    a.total = total;
    a.counts.resize(n);
    std::vector<double> rem(n);
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double exact = beta[i] * static_cast<double>(total);
        const double fl = std::floor(exact);
        rem[i] = exact - fl;
        a.counts[i] = std::max<std::size_t>(1, static_cast<std::size_t>(fl));
        assigned += a.counts[i];
    }

    // Largest remainder first; ties go to the lower index.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return rem[x] > rem[y]; });

    for (std::size_t k = 0; assigned < total; k = (k + 1) % n) {
        ++a.counts[order[k]];
        ++assigned;
    }
    // Floors of one can overshoot; take back from the smallest remainders.
    for (std::size_t k = n; assigned > total;) {
        k = (k == 0 ? n : k) - 1;
        const std::size_t i = order[k];
        if (a.counts[i] > 1) {
            --a.counts[i];
            --assigned;
        }
    }
    return a;
}

std::vector<AlphaStrategy> builtin_strategies() {
    std::vector<AlphaStrategy> out;
    out.push_back({"equal", [](const Problem& p, const TechniqueMoments&) {
                       return SimplexVector::uniform(p.size());
                   }});
    out.push_back({"inv-variance", [](const Problem&, const TechniqueMoments& m) {
                       std::vector<double> w;
                       for (double v : m.v) {
                           if (!(v > 0))
                               throw NonPositiveValue(
                                   "inv-variance needs every v_i > 0");
                           w.push_back(1.0 / v);
                       }
                       return SimplexVector::normalized(w);
                   }});
    out.push_back({"inv-cost-variance",
                   [](const Problem& p, const TechniqueMoments& m) {
                       std::vector<double> w;
                       for (std::size_t i = 0; i < m.v.size(); ++i) {
                           if (!(m.v[i] > 0))
                               throw NonPositiveValue(
                                   "inv-cost-variance needs every v_i > 0");
                           w.push_back(1.0 / (p.techniques[i].cost * m.v[i]));
                       }
                       return SimplexVector::normalized(w);
                   }});
    return out;
}

const AlphaStrategy& find_strategy(const std::vector<AlphaStrategy>& registry,
                                   const std::string& name) {
    for (const auto& s : registry)
        if (s.name == name) return s;
    throw UnknownStrategy("unknown alpha strategy '" + name + "'");
}

} // namespace genmis
