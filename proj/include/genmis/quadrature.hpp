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
#include <vector>

namespace genmis {

/// Working precision for point evaluations of integrands and densities.
///
/// Extended precision lets the quadrature place nodes much closer to an
/// interval endpoint than a double can. That matters when an integrand has
/// a near-singularity just outside the domain, e.g. 1/sin(x) on an interval
/// ending at the double nearest to pi.
using Real = long double;

using RealFn = std::function<Real(Real)>;

struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    Interval() = default;
    Interval(double lo_, double hi_);

    double width() const noexcept { return hi - lo; }
    bool contains(Real x) const noexcept { return x >= lo && x <= hi; }
};

struct QuadratureConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-13;
    std::size_t max_subdivisions = std::size_t{1} << 20;

    void validate() const;
};

struct QuadratureResult {
    double value = 0.0;
    /// Error estimate over panels that could still be refined.
    double error = 0.0;
    /// Error estimate carried by panels narrower than the working precision
    /// can split further. Nonzero only for integrands that vary on a scale
    /// below the resolution of Real at some point of the domain.
    double unresolved_error = 0.0;
    std::size_t panels = 0;
    std::size_t evaluations = 0;
};

/// Adaptive 15-point Gauss-Legendre quadrature with interval halving.
///
/// The panel with the largest local error |two halves - whole| is split
/// until the summed error is at most max(abs_tol, rel_tol*|I|). Throws
/// NonConvergence after cfg.max_subdivisions splits and NonFiniteIntegrand
/// on a NaN/inf evaluation.
QuadratureResult integrate_detailed(const RealFn& g, Interval domain,
                                    const QuadratureConfig& cfg = {});

double integrate(const RealFn& g, Interval domain,
                 const QuadratureConfig& cfg = {});

/// Same as integrate() but over an arbitrary sub-range [lo, hi] given in
/// working precision. lo == hi yields 0.
double integrate_range(const RealFn& g, Real lo, Real hi,
                       const QuadratureConfig& cfg = {});

/// Nodes on [-1, 1] and weights of the 15-point Gauss-Legendre rule.
const std::vector<Real>& gauss_legendre_nodes();
const std::vector<Real>& gauss_legendre_weights();

/// One fixed 15-point panel, no adaptivity.
Real gauss_legendre_panel(const RealFn& g, Real lo, Real hi);

/// Inverse of the CDF of a normalized density by bisection on the
/// quadrature CDF. Throws NotNormalized when the density does not integrate
/// to one within 10*rel_tol.
Real inverse_cdf(const RealFn& pdf, Interval domain, double u,
                 const QuadratureConfig& cfg = {});

/// Inverse-CDF sampler backed by a CDF table built once by quadrature.
///
/// Lookups interpolate the inverse with cubic Hermite segments (slopes
/// 1/pdf at the knots). With the default 4096 knots the CDF error of a
/// lookup is ~1e-14 for smooth densities; `newton_steps` safeguarded Newton
/// steps on the per-panel CDF can polish it to round-off.
class TabulatedInverseCdf {
public:
    TabulatedInverseCdf(RealFn pdf, Interval domain, std::size_t knots = 4096,
                        const QuadratureConfig& cfg = {}, int newton_steps = 0);

    Real operator()(double u) const;

    Interval domain() const noexcept { return domain_; }
    /// Normalization found while tabulating (should be 1 for a density).
    double total_mass() const noexcept { return total_; }

private:
    Real cdf_in_panel(std::size_t k, Real x) const;

    RealFn pdf_;
    Interval domain_;
    std::vector<Real> x_;
    std::vector<Real> cdf_;
    std::vector<Real> dens_;
    double total_ = 1.0;
    int newton_steps_ = 0;
};

} // namespace genmis
