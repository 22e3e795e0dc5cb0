#pragma once

// Conformal family on R^n u {inf}:
//   f(x | a, b) ~ (1 + |(x - b) / a|^2)^(-n),   (a, b) in H^(n+1).
// Its negative log-likelihood is n * busemann(x, (a, b)) plus a constant,
// so the MLE is the equilibrium point of unit forces in H^(n+1).

#include <span>
#include <utility>

#include "hyperfit/descent.hpp"
#include "hyperfit/halfspace.hpp"

namespace hyperfit {

/// (1/N) sum n * busemann(x_i, z). Throws InvalidArgument on empty data.
double loss_c(const HalfSpacePoint& z, std::span<const BoundaryPoint> data);
HalfSpaceTangent grad_c(const HalfSpacePoint& z, std::span<const BoundaryPoint> data);
std::pair<double, HalfSpaceTangent> loss_and_grad_c(const HalfSpacePoint& z,
                                                    std::span<const BoundaryPoint> data);

/// safe -> 1/n; improved and backtracking trial -> (n+1)/n^2.
double step_size_c(int n, StepPolicy policy);

/// True when the loss attains its minimum: no boundary point carries half of
/// the data or more, except for exactly two atoms of equal weight (then the
/// minimizers form the geodesic joining them and the fit returns one of them).
bool conformal_well_posed(std::span<const BoundaryPoint> data);

/// Descent from (a, b) = (1, 0).
std::pair<HalfSpacePoint, FitReport> fit_c(std::span<const BoundaryPoint> data, int n,
                                           const DescentConfig& config = {});

}  // namespace hyperfit
