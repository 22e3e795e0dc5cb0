#pragma once

// JSON documents, one per command invocation. Field names are stable; wall
// time is left out so that identical inputs give byte-identical output.

#include <optional>
#include <string>

#include "hyperfit/descent.hpp"
#include "hyperfit/halfspace.hpp"
#include "hyperfit/io/check_grad.hpp"
#include "hyperfit/io/monte_carlo.hpp"
#include "hyperfit/spd.hpp"
#include "hyperfit/spline.hpp"

namespace hyperfit::io {

struct ReportOptions {
    std::optional<double> scatter_det;  ///< adds "scatter_rescaled"
    bool include_trace = true;
};

/// Multivariate Cauchy fit on Pos1(n+1); n = 1 also carries "scale".
std::string report_cauchy(const SpdPoint& t, const FitReport& r, const ReportOptions& opt = {});
/// Univariate (u, v) from fit1d.
std::string report_univariate(double u, double v, const FitReport& r, const ReportOptions& opt = {});
std::string report_matrix(const SpdPoint& t, int m, int n, const FitReport& r, const ReportOptions& opt = {});
std::string report_conformal(const HalfSpacePoint& z, const FitReport& r, const ReportOptions& opt = {});
std::string report_spline(const SplineSolution& s, const SplineKnots& knots, const ReportOptions& opt = {});
std::string report_check_grad(const GradCheckResult& g);
std::string report_mc(const McSummary& s, Family family);

/// 0 converged, 2 otherwise.
int exit_code(FitStatus s);

}  // namespace hyperfit::io
