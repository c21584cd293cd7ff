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

#include <stdexcept>
#include <string>
#include <vector>

namespace genmis {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input caught before any numerical work starts.
class ValidationError : public Error {
public:
    using Error::Error;
};

class BudgetTooSmall : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class UnknownExample : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class UnknownStrategy : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class NonPositiveValue : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class BiasedTechnique : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class NotNormalized : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class NonFiniteIntegrand : public Error {
public:
    NonFiniteIntegrand(const std::string& what, long double at)
        : Error(what), at_(at) {}
    long double at() const noexcept { return at_; }

private:
    long double at_;
};

/// Adaptive quadrature ran out of subdivisions. Carries the best estimate.
class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, double estimate, double error)
        : Error(what), estimate_(estimate), error_(error) {}
    double estimate() const noexcept { return estimate_; }
    double error() const noexcept { return error_; }

private:
    double estimate_;
    double error_;
};

class ZeroMixtureAtSample : public Error {
public:
    ZeroMixtureAtSample(const std::string& what, long double at)
        : Error(what), at_(at) {}
    long double at() const noexcept { return at_; }

private:
    long double at_;
};

class AllZeroVariance : public Error {
public:
    using Error::Error;
};

/// Solver hit max_iters before the stationarity residual dropped below
/// tolerance. Carries the best iterate found.
class DidNotConverge : public Error {
public:
    DidNotConverge(const std::string& what, std::vector<double> best,
                   double residual)
        : Error(what), best_(std::move(best)), residual_(residual) {}
    const std::vector<double>& best() const noexcept { return best_; }
    double residual() const noexcept { return residual_; }

private:
    std::vector<double> best_;
    double residual_;
};

/// A computed bound fell below the variance it should dominate.
class SelfCheckViolation : public Error {
public:
    using Error::Error;
};

} // namespace genmis
