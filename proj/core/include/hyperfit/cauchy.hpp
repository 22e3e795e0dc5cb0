#pragma once

// Maximum likelihood for the multivariate Cauchy family
//   f(x | T) ~ (x~^T T x~)^(-(n+1)/2),   T in Pos1(n+1),
// where x~ is x with 1 appended. The negative log-likelihood is, up to the
// factor (n+1)/2, the mean of Busemann functions on Pos1(n+1) and is
// minimized by geodesic gradient descent started at the identity.

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "hyperfit/descent.hpp"
#include "hyperfit/halfspace.hpp"
#include "hyperfit/spd.hpp"

namespace hyperfit {

/// Homogeneous representative of a point of RP^n.
class LiftedDatum {
public:
    /// x in R^n -> (x, 1).
    static LiftedDatum from_point(const Eigen::VectorXd& x);
    /// Any nonzero (n+1)-vector; final component 0 means a point at infinity.
    static LiftedDatum from_vector(Eigen::VectorXd v);
    /// (direction, 0).
    static LiftedDatum at_infinity(const Eigen::VectorXd& direction);
    /// Univariate convenience: finite x -> (x, 1), inf -> (1, 0).
    static LiftedDatum from_boundary(const BoundaryPoint& x);

    const Eigen::VectorXd& vector() const noexcept { return v_; }
    Eigen::Index n() const noexcept { return v_.size() - 1; }
    bool is_finite() const noexcept { return v_(v_.size() - 1) != 0.0; }

private:
    explicit LiftedDatum(Eigen::VectorXd v) : v_(std::move(v)) {}
    Eigen::VectorXd v_;
};

/// Column-wise storage of lifted data, (n+1) x N.
class LiftedData {
public:
    explicit LiftedData(Eigen::Index n);
    /// Rows of `points` (N x n) are observations in R^n.
    static LiftedData from_points(const Eigen::MatrixXd& points);
    static LiftedData from_boundary(std::span<const BoundaryPoint> xs);

    void push_back(const LiftedDatum& d);
    void reserve(std::size_t count);

    Eigen::Index n() const noexcept { return dim_ - 1; }
    Eigen::Index dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return count_; }
    bool empty() const noexcept { return count_ == 0; }

    /// (n+1) x size() view of the stored columns.
    Eigen::Block<const Eigen::MatrixXd, Eigen::Dynamic, Eigen::Dynamic, true> matrix() const { return cols_.leftCols(static_cast<Eigen::Index>(count_)); }
    Eigen::VectorXd column(std::size_t i) const { return cols_.col(static_cast<Eigen::Index>(i)); }

    /// Data with every column replaced by a * column.
    LiftedData transformed(const Eigen::MatrixXd& a) const;

private:
    Eigen::Index dim_;
    std::size_t count_ = 0;
    Eigen::MatrixXd cols_;
};

enum class ScatterConvention {
    unit_det_lift,  ///< S as read off the determinant-one T
    rescaled,       ///< S multiplied to a caller-chosen determinant
};

/// Location b and scatter S of f(x | S, b) ~ (1 + (x-b)^T S^-1 (x-b))^(-(n+1)/2).
struct CauchyParams {
    Eigen::VectorXd location;
    Eigen::MatrixXd scatter;
    ScatterConvention convention = ScatterConvention::unit_det_lift;
};

/// With T = [[A, c], [c^T, d]]: b = -A^-1 c, S = (d - b^T A b) A^-1.
CauchyParams to_params(const SpdPoint& t);
/// Inverse of to_params (the overall scale of S is absorbed by det T = 1).
SpdPoint from_params(const CauchyParams& p);
/// S scaled to have determinant `target_det` (> 0).
CauchyParams rescaled(CauchyParams p, double target_det);

/// Location/scale (u, v) of the univariate Cauchy density v / (pi ((x-u)^2 + v^2)).
struct UnivariateEstimate {
    double u = 0.0;
    double v = 1.0;
};

UnivariateEstimate to_univariate(const SpdPoint& t);
/// (1/v) [[1, -u], [-u, u^2 + v^2]].
SpdPoint from_univariate(const UnivariateEstimate& e);

/// Mean of log(x~_i^T T x~_i). Throws InvalidArgument on empty data.
double loss(const SpdPoint& t, const LiftedData& data);
/// Riemannian gradient: (1/N) T (sum x~ x~^T / x~^T T x~) T - T / (n+1).
TangentSym loss_grad(const SpdPoint& t, const LiftedData& data);
std::pair<double, TangentSym> loss_and_grad(const SpdPoint& t, const LiftedData& data);
/// Gradient of log(x~^T T x~) for a single datum; its norm is sqrt(n/(n+1)).
TangentSym datum_grad(const SpdPoint& t, const LiftedDatum& x);

/// safe -> 1, improved and backtracking (first trial) -> (n+3)/2.
double step_size(int n, StepPolicy policy);

/// N >= n+2 and every n+1 lifted vectors linearly independent. Exhaustive for
/// N <= exact_cap; above it only the necessary conditions (no repeated
/// projective point, full-rank data) are checked.
bool check_general_position(const LiftedData& data, int n, std::size_t exact_cap = 20);

/// Geodesic gradient descent from the identity.
std::pair<SpdPoint, FitReport> fit(const LiftedData& data, const DescentConfig& config = {});

/// Univariate fit carried out on the upper half-plane with unit Busemann
/// forces. Same optimum as fit() followed by to_univariate() on data in general
/// position; repeated values are allowed as long as conformal_well_posed() holds.
std::pair<UnivariateEstimate, FitReport> fit_univariate(std::span<const BoundaryPoint> data,
                                                        const DescentConfig& config = {});

/// The affine map x -> diag(1/mad) (x - median) on lifted coordinates,
/// computed coordinate-wise over the finite data.
Eigen::MatrixXd standardizing_transform(const LiftedData& data);

}  // namespace hyperfit
