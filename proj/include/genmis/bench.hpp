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

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "genmis/estimators.hpp"
#include "genmis/optimize.hpp"
#include "genmis/quadrature.hpp"
#include "genmis/rng.hpp"

namespace genmis::bench {

enum class OutputFormat { csv, markdown };

struct RunConfig {
    int problem_id = 1;
    /// Empty means the command's default strategy list.
    std::vector<std::string> strategies;
    /// "paper", "unit" or an explicit comma-separated list.
    std::string cost_profile = "paper";
    std::size_t N = 10000;
    std::size_t runs = 100;
    RngSeed seed{42, 0};
    OutputFormat format = OutputFormat::csv;
    QuadratureConfig quad;
    SolverConfig solver;

    // estimate / optimize
    std::optional<std::vector<double>> alpha;
    std::optional<std::vector<double>> beta;
    EstimatorKind estimator = EstimatorKind::F;
    bool randomized = false;
    Objective objective = Objective::case4;

    void validate() const;
};

/// One output row: text labels first, then numeric columns.
struct TableRow {
    std::vector<std::string> labels;
    std::vector<double> values;
};

struct Table {
    std::vector<std::string> label_names;
    std::vector<std::string> column_names;
    std::vector<TableRow> rows;
};

/// Columns: B1, harmonic_mean, B2, B3, power_mean_m1_2, variance.
/// Unit costs are used for every strategy. Throws SelfCheckViolation if a
/// bound falls below the variance.
Table cmd_bounds(const RunConfig& cfg);

/// Columns: E_F_inv, E_G_inv, one row per (strategy, cost profile).
Table cmd_efficiency(const RunConfig& cfg);

/// Key/value report (single label column "quantity", one value column).
Table cmd_estimate(const RunConfig& cfg);

Table cmd_optimize(const RunConfig& cfg);

/// CSV uses shortest round-trip decimals; markdown rounds to 6 significant
/// digits.
std::string render(const Table& table, OutputFormat format);

/// Parses "paper" | "unit" | "c1,c2,..." for `problem`.
std::vector<std::vector<double>> resolve_costs(const std::string& profile, int problem);

/// Full command-line entry point. Returns the process exit code:
/// 0 success, 2 validation error, 3 convergence failure, 4 self-check
/// violation.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace genmis::bench
