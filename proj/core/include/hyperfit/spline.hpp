#pragma once

// First-order hyperbolic splines on the upper half-plane: minimize
//   sum_i busemann(x_i, h(t_i)) + (alpha/2) int |h'(t)|^2 dt
// over continuous paths h : R -> H^2. The optimal path is constant outside
// [t_1, t_k] and a constant-speed geodesic between consecutive knots, where an
// interval of length D joining z to w costs (alpha/2) d(z, w)^2 / D. The
// problem therefore reduces to the knot values z_1..z_k.

#include <span>
#include <vector>

#include "hyperfit/descent.hpp"
#include "hyperfit/halfspace.hpp"

namespace hyperfit {

/// Observation x_i made at time t_i. Times need not be sorted or distinct;
/// observations sharing a time act on the same knot.
struct SplineProblem {
    std::vector<double> times;
    std::vector<BoundaryPoint> observations;  ///< scalar or inf
    double alpha = 1.0;

    /// Throws InvalidArgument/DimensionError on an empty or inconsistent problem or alpha <= 0.
    void validate() const;
};

/// Distinct sorted knot times with the observations attached to each.
struct SplineKnots {
    std::vector<double> times;
    std::vector<std::vector<BoundaryPoint>> observations;
    double alpha = 1.0;

    std::size_t size() const noexcept { return times.size(); }
};

SplineKnots merge_knots(const SplineProblem& problem);

enum class SplineMethod {
    newton,    ///< damped Newton on (u, log v) knot coordinates with line search
    gradient,  ///< joint geodesic gradient descent with step 1/(1 + 2 alpha / min gap)
};

struct SplineSolution {
    std::vector<double> times;          ///< distinct knot times
    std::vector<HalfSpacePoint> values; ///< fitted h(t_i)
    FitReport report;

    /// Constant outside [t_1, t_k]; geodesic interpolation in between.
    HalfSpacePoint evaluate(double t) const;
};

/// Reduced objective at the given knot values (one per distinct time).
double objective(const SplineKnots& knots, std::span<const HalfSpacePoint> values);
double objective(const SplineProblem& problem, std::span<const HalfSpacePoint> values);

/// Riemannian gradient with respect to each knot value.
std::vector<HalfSpaceTangent> objective_grad(const SplineKnots& knots,
                                             std::span<const HalfSpacePoint> values);

/// Norm of alpha (h'(t_i+) - h'(t_i-)) + v_i at every knot, v_i being the sum of
/// unit forces pulling h(t_i) towards its observations.
std::vector<double> junction_residuals(const SplineKnots& knots, std::span<const HalfSpacePoint> values);

/// Reports DegenerateData when the iterate leaves the divergence radius, or when
/// it stalls with a knot too close to the boundary to be resolved in double.
SplineSolution fit_spline(const SplineProblem& problem, const DescentConfig& config = {},
                          SplineMethod method = SplineMethod::newton);

}  // namespace hyperfit
