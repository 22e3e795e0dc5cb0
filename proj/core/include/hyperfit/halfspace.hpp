#pragma once

// Upper half-space model of hyperbolic space H^(n+1): points (a, b) with
// a > 0, b in R^n, metric ds = |d(a, b)| / a. For n = 1 this is the upper
// half-plane with z = b + i a.

#include <Eigen/Core>

#include <optional>

namespace hyperfit {

struct HalfSpacePoint {
    double a = 1.0;     ///< height (scale), > 0
    Eigen::VectorXd b;  ///< horizontal position (location)

    HalfSpacePoint() = default;
    /// Throws NumericRangeError when a <= 0 or any coordinate is not finite.
    HalfSpacePoint(double a, Eigen::VectorXd b);

    Eigen::Index n() const noexcept { return b.size(); }
};

/// A point of the ideal boundary R^n u {inf}.
class BoundaryPoint {
public:
    static BoundaryPoint at(Eigen::VectorXd x);
    static BoundaryPoint at(double x);
    static BoundaryPoint infinity() { return BoundaryPoint(); }

    bool is_infinity() const noexcept { return !x_.has_value(); }
    /// Precondition: !is_infinity().
    const Eigen::VectorXd& coords() const { return *x_; }

    friend bool operator==(const BoundaryPoint& l, const BoundaryPoint& r);

private:
    BoundaryPoint() = default;
    std::optional<Eigen::VectorXd> x_;
};

/// Tangent vector (da, db) at a base point; its Riemannian norm is |(da, db)| / a.
struct HalfSpaceTangent {
    double da = 0.0;
    Eigen::VectorXd db;

    static HalfSpaceTangent zero(Eigen::Index n) { return {0.0, Eigen::VectorXd::Zero(n)}; }

    HalfSpaceTangent& operator+=(const HalfSpaceTangent& o);
    friend HalfSpaceTangent operator+(HalfSpaceTangent l, const HalfSpaceTangent& r) { return l += r; }
    friend HalfSpaceTangent operator*(double s, HalfSpaceTangent v) {
        v.da *= s;
        v.db *= s;
        return v;
    }
    HalfSpaceTangent operator-() const { return {-da, -db}; }
};

double inner(const HalfSpacePoint& z, const HalfSpaceTangent& u, const HalfSpaceTangent& v);
double norm(const HalfSpacePoint& z, const HalfSpaceTangent& v);

/// Busemann function of x, normalized as log((a^2 + |b - x|^2) / a) for
/// finite x and -log a for x = inf. Equals -log of the Cauchy/conformal
/// kernel up to a z-independent constant.
double busemann(const BoundaryPoint& x, const HalfSpacePoint& z);

/// Riemannian gradient of busemann(x, .) at z; always of unit norm, pointing
/// away from x.
HalfSpaceTangent busemann_grad(const BoundaryPoint& x, const HalfSpacePoint& z);

/// Point at time t on the geodesic with initial velocity v at z.
/// Throws NumericRangeError if the result is not representable.
HalfSpacePoint exp_map(const HalfSpacePoint& z, const HalfSpaceTangent& v, double t = 1.0);

/// Initial velocity of the geodesic reaching w at time 1.
HalfSpaceTangent log_map(const HalfSpacePoint& z, const HalfSpacePoint& w);

double hdistance(const HalfSpacePoint& z, const HalfSpacePoint& w);

}  // namespace hyperfit
