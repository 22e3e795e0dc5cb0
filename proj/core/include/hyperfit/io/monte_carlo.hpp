#pragma once

// Repeated fits on freshly generated samples.
//
// Run i draws its sample with seed run_seed(master_seed, i), so a run's result
// depends only on (spec, config, i) and never on scheduling.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hyperfit/descent.hpp"
#include "hyperfit/io/family.hpp"
#include "hyperfit/io/generate.hpp"

namespace hyperfit::io {

struct McConfig {
    int runs = 100;
    std::uint64_t master_seed = 0;
    DescentConfig descent;
    Family family = Family::cauchy;
    /// Report scatter entries rescaled to this determinant instead of det-1.
    std::optional<double> scatter_det;
    unsigned threads = 0;  ///< 0: hardware concurrency
};

struct McRun {
    int index = 0;
    std::uint64_t seed = 0;
    FitStatus status = FitStatus::converged;
    int iterations = 0;
    double final_grad_norm = 0.0;
    std::vector<double> estimates;  ///< one per McSummary::quantities
    std::string error;              ///< non-empty when the fit threw
};

struct McSummary {
    std::vector<std::string> quantities;  ///< e.g. u, v or b1.., S11, S12..
    std::vector<McRun> runs;              ///< indexed by run
    /// Over converged runs only; NaN when none converged.
    std::vector<double> mean;
    std::vector<double> stddev;
    std::array<int, 4> status_counts{};  ///< indexed by FitStatus
    int errors = 0;

    int count(FitStatus s) const { return status_counts[static_cast<std::size_t>(s)]; }
    /// Index of a quantity by name; throws InvalidArgument if absent.
    std::size_t index_of(const std::string& name) const;
};

/// Throws InvalidArgument if runs < 1 or the family does not fit the sample kind.
McSummary run_mc(const GeneratorSpec& spec, const McConfig& config);

/// One row per run: run, seed, status, iterations, final_grad_norm, quantities.
void write_mc_table(std::ostream& out, const McSummary& summary);

}  // namespace hyperfit::io
