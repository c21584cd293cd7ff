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

#include "genmis/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>

#include "genmis/errors.hpp"

namespace genmis {

namespace {

constexpr int kOrder = 15;

struct Rule {
    std::vector<Real> nodes;
    std::vector<Real> weights;

    Rule() {
        // Newton iteration on P_n from the Tricomi initial guesses.
        const Real pi = std::numbers::pi_v<Real>;
        for (int i = 1; i <= kOrder; ++i) {
            Real z = std::cos(pi * (i - Real{0.25}) / (kOrder + Real{0.5}));
            Real dp = 1;
            for (int it = 0; it < 100; ++it) {
                Real p0 = 1, p1 = 0;
                for (int j = 1; j <= kOrder; ++j) {
                    const Real p2 = p1;
                    p1 = p0;
                    p0 = ((2 * j - 1) * z * p1 - (j - 1) * p2) / j;
                }
                dp = kOrder * (z * p0 - p1) / (z * z - 1);
                const Real step = p0 / dp;
                z -= step;
                if (std::fabs(step) < 4 * std::numeric_limits<Real>::epsilon())
                    break;
            }
            nodes.push_back(z);
            weights.push_back(2 / ((1 - z * z) * dp * dp));
        }
    }
};

const Rule& rule() {
    static const Rule r;
    return r;
}

struct Panel {
    Real lo;
    Real hi;
    Real value;
    Real error;

    bool operator<(const Panel& o) const { return error < o.error; }
};

class PanelEvaluator {
public:
    explicit PanelEvaluator(const RealFn& g) : g_(g) {}

    Real fixed(Real lo, Real hi) {
        const auto& r = rule();
        const Real mid = (lo + hi) / 2;
        const Real half = (hi - lo) / 2;
        Real sum = 0;
        for (int k = 0; k < kOrder; ++k) {
            const Real x = mid + half * r.nodes[k];
            const Real y = g_(x);
            ++evaluations;
            if (!std::isfinite(y)) {
                std::ostringstream msg;
                msg << "integrand is not finite at x=" << static_cast<double>(x);
                throw NonFiniteIntegrand(msg.str(), x);
            }
            sum += r.weights[k] * y;
        }
        return sum * half;
    }

    Panel make(Real lo, Real hi) {
        const Real mid = (lo + hi) / 2;
        const Real whole = fixed(lo, hi);
        const Real halves = fixed(lo, mid) + fixed(mid, hi);
        return {lo, hi, halves, std::fabs(halves - whole)};
    }

    std::size_t evaluations = 0;

private:
    const RealFn& g_;
};

// A panel is at the resolution limit once its width spans only a handful
// of representable points; halving it further cannot reduce the error.
bool at_resolution_limit(const Panel& p) {
    const Real mid = (p.lo + p.hi) / 2;
    if (!(mid > p.lo && mid < p.hi)) return true;
    const Real scale = std::max(std::fabs(p.lo), std::fabs(p.hi));
    const Real ulp =
        std::nextafter(scale, std::numeric_limits<Real>::infinity()) - scale;
    return (p.hi - p.lo) <= 64 * ulp;
}

QuadratureResult integrate_core(const RealFn& g, Real lo, Real hi,
                                const QuadratureConfig& cfg) {
    cfg.validate();
    QuadratureResult out;
    if (lo == hi) return out;

    PanelEvaluator eval(g);
    std::priority_queue<Panel> active;
    std::vector<Panel> frozen;

    Panel first = eval.make(lo, hi);
    Real total = first.value;
    Real active_error = first.error;
    Real frozen_error = 0;
    active.push(first);
    std::size_t splits = 0;

    auto target = [&] {
        return std::max<Real>(cfg.abs_tol, cfg.rel_tol * std::fabs(total));
    };

    while (!active.empty() && active_error > target()) {
        Panel p = active.top();
        if (at_resolution_limit(p)) {
            active.pop();
            active_error -= p.error;
            frozen_error += p.error;
            frozen.push_back(p);
            continue;
        }
        if (splits >= cfg.max_subdivisions) {
            Real est = 0;
            for (auto q = active; !q.empty(); q.pop()) est += q.top().value;
            for (const auto& f : frozen) est += f.value;
            throw NonConvergence("quadrature exhausted max_subdivisions",
                                 static_cast<double>(est),
                                 static_cast<double>(active_error));
        }
        active.pop();
        const Real mid = (p.lo + p.hi) / 2;
        const Panel left = eval.make(p.lo, mid);
        const Panel right = eval.make(mid, p.hi);
        total += left.value + right.value - p.value;
        active_error += left.error + right.error - p.error;
        active.push(left);
        active.push(right);
        ++splits;
    }

    // Sum in domain order so the result does not depend on queue layout.
    std::vector<Panel> all = std::move(frozen);
    for (; !active.empty(); active.pop()) all.push_back(active.top());
    std::sort(all.begin(), all.end(),
              [](const Panel& a, const Panel& b) { return a.lo < b.lo; });
    Real sum = 0;
    Real err = 0;
    Real unresolved = 0;
    for (const auto& p : all) {
        sum += p.value;
        if (at_resolution_limit(p))
            unresolved += p.error;
        else
            err += p.error;
    }

    out.value = static_cast<double>(sum);
    out.error = static_cast<double>(err);
    out.unresolved_error = static_cast<double>(unresolved);
    out.panels = all.size();
    out.evaluations = eval.evaluations;
    return out;
}

} // namespace

Interval::Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
        throw ValidationError("interval requires finite lo < hi");
}

void QuadratureConfig::validate() const {
    if (!(rel_tol > 0) || !(abs_tol > 0) || max_subdivisions < 1)
        throw ValidationError(
            "quadrature config requires rel_tol > 0, abs_tol > 0, "
            "max_subdivisions >= 1");
}

const std::vector<Real>& gauss_legendre_nodes() { return rule().nodes; }
const std::vector<Real>& gauss_legendre_weights() { return rule().weights; }

Real gauss_legendre_panel(const RealFn& g, Real lo, Real hi) {
    PanelEvaluator eval(g);
    return eval.fixed(lo, hi);
}

QuadratureResult integrate_detailed(const RealFn& g, Interval domain,
                                    const QuadratureConfig& cfg) {
    return integrate_core(g, domain.lo, domain.hi, cfg);
}

double integrate(const RealFn& g, Interval domain,
                 const QuadratureConfig& cfg) {
    return integrate_core(g, domain.lo, domain.hi, cfg).value;
}

double integrate_range(const RealFn& g, Real lo, Real hi,
                       const QuadratureConfig& cfg) {
    if (hi < lo) return -integrate_core(g, hi, lo, cfg).value;
    return integrate_core(g, lo, hi, cfg).value;
}

Real inverse_cdf(const RealFn& pdf, Interval domain, double u,
                 const QuadratureConfig& cfg) {
    if (!(u >= 0.0 && u <= 1.0))
        throw ValidationError("inverse_cdf requires u in [0, 1]");
    const double mass = integrate(pdf, domain, cfg);
    if (std::fabs(mass - 1.0) > 10 * cfg.rel_tol) {
        std::ostringstream msg;
        msg << "density integrates to " << mass << ", not 1";
        throw NotNormalized(msg.str());
    }
    if (u == 0.0) return domain.lo;
    if (u == 1.0) return domain.hi;

    Real lo = domain.lo;
    Real hi = domain.hi;
    Real cdf_lo = 0;
    Real x = (lo + hi) / 2;
    for (int it = 0; it < 256; ++it) {
        x = (lo + hi) / 2;
        if (!(x > lo && x < hi)) break;
        const Real cdf_x = cdf_lo + integrate_range(pdf, lo, x, cfg);
        if (std::fabs(cdf_x - u) <= cfg.rel_tol / 4) break;
        if (cdf_x < u) {
            lo = x;
            cdf_lo = cdf_x;
        } else {
            hi = x;
        }
    }
    return x;
}

TabulatedInverseCdf::TabulatedInverseCdf(RealFn pdf, Interval domain,
                                         std::size_t knots,
                                         const QuadratureConfig& cfg,
                                         int newton_steps)
    : pdf_(std::move(pdf)), domain_(domain), newton_steps_(newton_steps) {
    if (knots < 2) throw ValidationError("tabulated CDF needs >= 2 knots");
    if (newton_steps < 0) throw ValidationError("newton_steps must be >= 0");
    x_.resize(knots + 1);
    cdf_.resize(knots + 1);
    dens_.resize(knots + 1);
    const Real lo = domain.lo;
    const Real width = Real{domain.hi} - lo;
    for (std::size_t k = 0; k <= knots; ++k)
        x_[k] = (k == knots) ? Real{domain.hi} : lo + width * k / knots;
    cdf_[0] = 0;
    for (std::size_t k = 0; k < knots; ++k)
        cdf_[k + 1] = cdf_[k] + integrate_range(pdf_, x_[k], x_[k + 1], cfg);
    const Real mass = cdf_[knots];
    if (!(mass > 0)) throw NotNormalized("density has no mass on its domain");
    total_ = static_cast<double>(mass);
    for (std::size_t k = 0; k <= knots; ++k) {
        cdf_[k] /= mass;
        dens_[k] = pdf_(x_[k]) / mass;
    }
    cdf_[knots] = 1;
}

Real TabulatedInverseCdf::cdf_in_panel(std::size_t k, Real x) const {
    if (x <= x_[k]) return cdf_[k];
    return cdf_[k] + gauss_legendre_panel(pdf_, x_[k], x) / total_;
}

Real TabulatedInverseCdf::operator()(double u) const {
    u = std::clamp(u, 0.0, 1.0);
    const Real target = u;
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), target);
    std::size_t k = (it == cdf_.begin()) ? 0
                    : static_cast<std::size_t>(it - cdf_.begin()) - 1;
    if (k >= x_.size() - 1) return x_.back();
    // Skip zero-mass panels so the bracket has positive CDF width.
    while (k + 1 < x_.size() - 1 && cdf_[k + 1] <= target &&
           cdf_[k + 1] == cdf_[k])
        ++k;

    const Real x0 = x_[k], x1 = x_[k + 1];
    const Real c0 = cdf_[k], c1 = cdf_[k + 1];
    const Real dc = c1 - c0;
    const Real dx = x1 - x0;
    if (!(dc > 0)) return x0;

    const Real t = std::clamp((target - c0) / dc, Real{0}, Real{1});
    auto slope = [&](Real d) {
        // dx/dt = dc / pdf; fall back to the chord where pdf is tiny.
        if (!(d > 0)) return dx;
        const Real m = dc / d;
        return m > 3 * dx ? dx : m;
    };
    const Real m0 = slope(dens_[k]);
    const Real m1 = slope(dens_[k + 1]);
    const Real t2 = t * t, t3 = t2 * t;
    Real x = (2 * t3 - 3 * t2 + 1) * x0 + (t3 - 2 * t2 + t) * m0 +
             (-2 * t3 + 3 * t2) * x1 + (t3 - t2) * m1;
    x = std::clamp(x, x0, x1);

    for (int step = 0; step < newton_steps_; ++step) {
        const Real d = pdf_(x) / total_;
        if (!(d > 0)) break;
        const Real next = x - (cdf_in_panel(k, x) - target) / d;
        if (!(next >= x0 && next <= x1)) break;
        if (next == x) break;
        x = next;
    }
    return x;
}

} // namespace genmis
