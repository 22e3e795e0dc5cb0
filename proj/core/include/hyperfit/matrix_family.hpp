#pragma once

// Matrix-variate Cauchy family on Mat(n, m):
//   f(X | T) ~ det(X~^T T X~)^(-(m+n)/2),   T in Pos1(m+n),
// with X~ the (m+n) x m frame [X; I_m]. For m = 1 this is the multivariate
// Cauchy family.

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "hyperfit/descent.hpp"
#include "hyperfit/spd.hpp"

namespace hyperfit {

/// Full-column-rank (m+n) x m frame spanning the graph of X.
class MatrixDatum {
public:
    /// [X; I_m] for an n x m observation X.
    static MatrixDatum from_matrix(const Eigen::MatrixXd& x);
    /// Any (m+n) x m frame of full column rank (a point of the Grassmannian).
    static MatrixDatum from_frame(Eigen::MatrixXd frame);

    const Eigen::MatrixXd& frame() const noexcept { return f_; }
    Eigen::Index rows() const noexcept { return f_.rows() - f_.cols(); }  ///< n
    Eigen::Index cols() const noexcept { return f_.cols(); }              ///< m

private:
    explicit MatrixDatum(Eigen::MatrixXd f) : f_(std::move(f)) {}
    Eigen::MatrixXd f_;
};

/// (1/N) sum log det(X~_i^T T X~_i).
double loss_m(const SpdPoint& t, std::span<const MatrixDatum> data);
/// (1/N) sum T M_i T - (m/(m+n)) T with M_i = X~_i (X~_i^T T X~_i)^-1 X~_i^T.
TangentSym grad_m(const SpdPoint& t, std::span<const MatrixDatum> data);
std::pair<double, TangentSym> loss_and_grad_m(const SpdPoint& t, std::span<const MatrixDatum> data);
/// Single-datum gradient; its norm is sqrt(mn/(m+n)).
TangentSym datum_grad_m(const SpdPoint& t, const MatrixDatum& x);

/// safe -> 1; improved and backtracking trial -> ((m+n)(m+n+1) - 2) / (2mn).
double step_size_m(int m, int n, StepPolicy policy = StepPolicy::improved);

/// Geodesic gradient descent from the identity of size m+n.
std::pair<SpdPoint, FitReport> fit_m(std::span<const MatrixDatum> data, int m, int n,
                                     const DescentConfig& config = {});

/// With T = [[A, C], [C^T, D]] (A is n x n):
///   X~^T T X~ = (X - B)^T A (X - B) + D - B^T A B,   B = -A^-1 C.
struct MatrixParams {
    Eigen::MatrixXd location;     ///< B, n x m
    Eigen::MatrixXd row_scatter;  ///< A^-1, n x n
    Eigen::MatrixXd col_scatter;  ///< D - B^T A B, m x m
};
MatrixParams to_matrix_params(const SpdPoint& t, int n);

/// One draw from the T = I member: X = Z_top Z_bottom^-1 for a standard normal
/// (m+n) x m matrix Z, redrawn while the bottom block is singular.
Eigen::MatrixXd sample_standard_matrix(int m, int n, std::mt19937_64& rng);

}  // namespace hyperfit
