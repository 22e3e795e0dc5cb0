#pragma once

// Geometry of Pos1(p): symmetric positive-definite p x p matrices of unit
// determinant, with the affine-invariant metric (V, W) = Tr(T^-1 V T^-1 W).

#include <Eigen/Core>

namespace hyperfit {

/// A unit-determinant SPD matrix. Construction validates symmetry and
/// positivity and rescales the determinant to exactly 1.
class SpdPoint {
public:
    /// Identity of size p (p >= 2).
    static SpdPoint identity(Eigen::Index p);

    /// Validates `m` and divides it by det(m)^(1/p). Throws NumericRangeError
    /// when `m` is not symmetric (1e-12 relative) or not positive definite.
    static SpdPoint from_matrix(const Eigen::MatrixXd& m);

    Eigen::Index dim() const noexcept { return m_.rows(); }
    const Eigen::MatrixXd& matrix() const noexcept { return m_; }
    Eigen::MatrixXd inverse() const;

    /// Ratio of extreme eigenvalues.
    double condition_number() const;

private:
    explicit SpdPoint(Eigen::MatrixXd m) : m_(std::move(m)) {}
    Eigen::MatrixXd m_;
};

/// A symmetric matrix V with Tr(T^-1 V) = 0 for its base point T. The base
/// point is not stored; operations take it explicitly and check dimensions.
class TangentSym {
public:
    TangentSym() = default;
    /// Wraps `v` as is (only symmetrized). Use project_tangent() to build a
    /// tangent from an arbitrary matrix.
    explicit TangentSym(const Eigen::MatrixXd& v);

    static TangentSym zero(Eigen::Index p) { return TangentSym(Eigen::MatrixXd::Zero(p, p)); }

    Eigen::Index dim() const noexcept { return v_.rows(); }
    const Eigen::MatrixXd& matrix() const noexcept { return v_; }

    TangentSym operator-() const { return TangentSym(-v_); }
    friend TangentSym operator*(double s, const TangentSym& v) { return TangentSym(s * v.v_); }
    friend TangentSym operator+(const TangentSym& a, const TangentSym& b);
    friend TangentSym operator-(const TangentSym& a, const TangentSym& b);

private:
    Eigen::MatrixXd v_;
};

double inner(const SpdPoint& t, const TangentSym& v, const TangentSym& w);
double norm(const SpdPoint& t, const TangentSym& v);

/// gamma(s) with gamma(0) = t, gamma'(0) = v. Evaluated as L exp(sW) L^T with
/// t = L L^T and W = L^-1 v L^-T, then renormalized to unit determinant.
/// Throws NumericRangeError when the result is not finite.
SpdPoint geodesic(const SpdPoint& t, const TangentSym& v, double s);

/// Inverse of geodesic at s = 1.
TangentSym log_map(const SpdPoint& from, const SpdPoint& to);

/// Affine-invariant distance, sqrt(sum log^2 lambda_i(from^-1 to)).
double distance(const SpdPoint& a, const SpdPoint& b);

/// sym(m) - Tr(t^-1 sym(m)) / p * t.
TangentSym project_tangent(const SpdPoint& t, const Eigen::MatrixXd& m);

/// Congruence a^T t a, renormalized to unit determinant. `a` must be invertible.
SpdPoint congruence(const SpdPoint& t, const Eigen::MatrixXd& a);

}  // namespace hyperfit
