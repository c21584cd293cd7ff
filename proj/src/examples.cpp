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

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "genmis/errors.hpp"
#include "genmis/model.hpp"

namespace genmis {

namespace {

constexpr Real kPi = std::numbers::pi_v<Real>;

Interval three_techniques_domain() {
    return Interval(3.0 / (2.0 * std::numbers::pi), std::numbers::pi);
}

Real linear_shape(Real x) { return x; }
Real quadratic_shape(Real x) { return x * x - x / kPi; }
Real sine_shape(Real x) { return std::sin(x); }

Technique normalized_technique(std::string label, Real (*shape)(Real),
                               Interval domain, Sampler sampler, double cost) {
    const Real z = integrate([shape](Real x) { return shape(x); }, domain);
    Technique t;
    t.label = std::move(label);
    t.pdf = [shape, z](Real x) { return shape(x) / z; };
    t.cost = cost;
    if (sampler) {
        t.sampler = std::move(sampler);
    } else {
        auto table = std::make_shared<const TabulatedInverseCdf>(t.pdf, domain);
        t.sampler = [table](double u) { return (*table)(u); };
    }
    return t;
}

// x on [a, b]: CDF (x^2 - a^2)/(b^2 - a^2).
Sampler linear_sampler(Interval d) {
    const Real a2 = Real{d.lo} * d.lo;
    const Real b2 = Real{d.hi} * d.hi;
    const Real lo = d.lo, hi = d.hi;
    return [=](double u) {
        const Real x = std::sqrt(a2 + u * (b2 - a2));
        return std::clamp(x, lo, hi);
    };
}

// sin x on [a, b]: CDF (cos a - cos x)/(cos a - cos b).
Sampler sine_sampler(Interval d) {
    const Real ca = std::cos(Real{d.lo});
    const Real cb = std::cos(Real{d.hi});
    const Real lo = d.lo, hi = d.hi;
    return [=](double u) {
        const Real c = std::clamp(ca - u * (ca - cb), Real{-1}, Real{1});
        return std::clamp(std::acos(c), lo, hi);
    };
}

// 2 - x on [a, b] with b < 2: invert G(x) = 2x - x^2/2.
Sampler tent_sampler(Interval d) {
    auto g = [](Real x) { return 2 * x - x * x / 2; };
    const Real ga = g(d.lo), gb = g(d.hi);
    const Real lo = d.lo, hi = d.hi;
    return [=](double u) {
        const Real target = ga + u * (gb - ga);
        const Real x = 2 - std::sqrt(std::max(Real{0}, 4 - 2 * target));
        return std::clamp(x, lo, hi);
    };
}

std::vector<Technique> three_techniques(Interval d) {
    const std::array<double, 3> cost{1.0, 6.24, 3.28};
    std::vector<Technique> ts;
    ts.push_back(normalized_technique("x", linear_shape, d, linear_sampler(d), cost[0]));
    ts.push_back(normalized_technique("x^2-x/pi", quadratic_shape, d, {}, cost[1]));
    ts.push_back(normalized_technique("sin(x)", sine_shape, d, sine_sampler(d), cost[2]));
    return ts;
}

Problem build(int id) {
    Problem p;
    if (id >= 1 && id <= 4) {
        p.domain = three_techniques_domain();
        p.techniques = three_techniques(p.domain);
    }
    switch (id) {
    case 1:
        p.name = "example1";
        p.integrand = [](Real x) { return x * quadratic_shape(x) * std::sin(x); };
        break;
    case 2:
        p.name = "example2";
        p.integrand = [](Real x) {
            const Real s = std::sin(x);
            return quadratic_shape(x) * s * s;
        };
        break;
    case 3:
        p.name = "example3";
        p.integrand = [](Real x) { return x + quadratic_shape(x) + std::sin(x); };
        break;
    case 4: {
        p.name = "example4";
        const RealFn p1 = p.techniques[0].pdf;
        const RealFn p2 = p.techniques[1].pdf;
        const RealFn p3 = p.techniques[2].pdf;
        p.integrand = [=](Real x) { return 30 * p1(x) + 30 * p2(x) + 40 * p3(x); };
        break;
    }
    case 5: {
        p.name = "example5";
        p.domain = Interval(0.01, std::numbers::pi / 2);
        p.integrand = [](Real x) { return std::sqrt(x) + std::sin(x); };
        p.techniques.push_back(normalized_technique(
            "2-x", [](Real x) { return 2 - x; }, p.domain, tent_sampler(p.domain), 1.0));
        p.techniques.push_back(normalized_technique(
            "sin^2(x)", [](Real x) { const Real s = std::sin(x); return s * s; },
            p.domain, {}, 1.0));
        break;
    }
    default:
        throw UnknownExample("unknown example id " + std::to_string(id) +
                             " (expected 1..5)");
    }
    p.reference_mu = integrate(p.integrand, p.domain);
    return p;
}

} // namespace

Problem example_problem(int id) {
    if (id < 1 || id > 5)
        throw UnknownExample("unknown example id " + std::to_string(id) +
                             " (expected 1..5)");
    static std::array<std::once_flag, 5> once;
    static std::array<std::unique_ptr<Problem>, 5> cache;
    const auto k = static_cast<std::size_t>(id - 1);
    std::call_once(once[k], [&] { cache[k] = std::make_unique<Problem>(build(id)); });
    return *cache[k];
}

std::vector<std::vector<double>> example_cost_profiles(int id) {
    if (id >= 1 && id <= 4) return {{1.0, 6.24, 3.28}};
    if (id == 5) return {{1.0, 1.0}, {1.0, 5.0}};
    throw UnknownExample("unknown example id " + std::to_string(id) +
                         " (expected 1..5)");
}

} // namespace genmis
