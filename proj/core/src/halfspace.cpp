#include "hyperfit/halfspace.hpp"

#include <cmath>
#include <complex>
#include <utility>

#include "hyperfit/errors.hpp"

namespace hyperfit {

namespace {

void require_dim(Eigen::Index a, Eigen::Index b, const char* where) {
    if (a != b) {
        throw DimensionError(std::string(where) + ": dimension mismatch");
    }
}

// Places w in the hyperbolic plane spanned by the vertical through z and the
// horizontal direction from b_z towards b_w, normalized so that z maps to i.
struct PlaneFrame {
    Eigen::VectorXd e;  // unit horizontal direction (zero if b_w == b_z)
    std::complex<double> w;
};

PlaneFrame to_plane(const HalfSpacePoint& z, const HalfSpacePoint& w) {
    require_dim(z.n(), w.n(), "halfspace");
    const Eigen::VectorXd delta = w.b - z.b;
    const double len = delta.norm();
    PlaneFrame f;
    f.e = len > 0.0 ? Eigen::VectorXd(delta / len) : Eigen::VectorXd::Zero(z.n());
    f.w = {len / z.a, w.a / z.a};
    return f;
}

}  // namespace

HalfSpacePoint::HalfSpacePoint(double a_, Eigen::VectorXd b_) : a(a_), b(std::move(b_)) {
    if (!(a > 0.0) || !std::isfinite(a) || !b.allFinite()) {
        throw NumericRangeError("HalfSpacePoint requires finite coordinates and a > 0");
    }
}

BoundaryPoint BoundaryPoint::at(Eigen::VectorXd x) {
    if (!x.allFinite()) {
        throw NumericRangeError("finite boundary point has non-finite coordinates");
    }
    BoundaryPoint p;
    p.x_ = std::move(x);
    return p;
}

BoundaryPoint BoundaryPoint::at(double x) { return at(Eigen::VectorXd::Constant(1, x)); }

bool operator==(const BoundaryPoint& l, const BoundaryPoint& r) {
    if (l.is_infinity() || r.is_infinity()) {
        return l.is_infinity() == r.is_infinity();
    }
    return l.coords().size() == r.coords().size() && l.coords() == r.coords();
}

HalfSpaceTangent& HalfSpaceTangent::operator+=(const HalfSpaceTangent& o) {
    require_dim(db.size(), o.db.size(), "HalfSpaceTangent +");
    da += o.da;
    db += o.db;
    return *this;
}

double inner(const HalfSpacePoint& z, const HalfSpaceTangent& u, const HalfSpaceTangent& v) {
    require_dim(z.n(), u.db.size(), "inner");
    require_dim(z.n(), v.db.size(), "inner");
    return (u.da * v.da + u.db.dot(v.db)) / (z.a * z.a);
}

double norm(const HalfSpacePoint& z, const HalfSpaceTangent& v) {
    require_dim(z.n(), v.db.size(), "norm");
    return std::hypot(v.da, v.db.norm()) / z.a;
}

double busemann(const BoundaryPoint& x, const HalfSpacePoint& z) {
    if (x.is_infinity()) {
        return -std::log(z.a);
    }
    require_dim(z.n(), x.coords().size(), "busemann");
    const double r2 = (z.b - x.coords()).squaredNorm();
    return std::log((z.a * z.a + r2) / z.a);
}

HalfSpaceTangent busemann_grad(const BoundaryPoint& x, const HalfSpacePoint& z) {
    if (x.is_infinity()) {
        return {-z.a, Eigen::VectorXd::Zero(z.n())};
    }
    require_dim(z.n(), x.coords().size(), "busemann_grad");
    const Eigen::VectorXd d = z.b - x.coords();
    const double q = z.a * z.a + d.squaredNorm();
    // a^2 times the Euclidean gradient, written to avoid cancellation.
    const double da = z.a * (z.a * z.a - d.squaredNorm()) / q;
    return {da, (2.0 * z.a * z.a / q) * d};
}

HalfSpacePoint exp_map(const HalfSpacePoint& z, const HalfSpaceTangent& v, double t) {
    require_dim(z.n(), v.db.size(), "exp_map");
    const double horiz = v.db.norm();
    const std::complex<double> xi{horiz / z.a, v.da / z.a};
    const double speed = std::abs(xi);
    if (speed == 0.0 || t == 0.0) {
        return z;
    }
    // Cayley transform to the disk centered at z: the geodesic is the radius
    // in direction c, reaching radius tanh(x) at time t.
    std::complex<double> c = std::complex<double>{0.0, -1.0} * xi / speed;
    double x = 0.5 * speed * t;
    if (x < 0.0) {
        c = -c;
        x = -x;
    }
    const double tau = std::tanh(x);
    const double one_minus_tau = 2.0 / (1.0 + std::exp(2.0 * x));
    const double one_minus_re_c =
        c.real() >= 0.0 ? c.imag() * c.imag() / (1.0 + c.real()) : 1.0 - c.real();
    const double denom = one_minus_tau * one_minus_tau + 2.0 * tau * one_minus_re_c;
    const double sech = 1.0 / std::cosh(x);
    const double im_w = sech * sech / denom;
    const double re_w = -2.0 * tau * c.imag() / denom;

    const double a = z.a * im_w;
    if (!(a > 0.0) || !std::isfinite(a) || !std::isfinite(re_w)) {
        throw NumericRangeError("exp_map: geodesic left the representable range");
    }
    Eigen::VectorXd b = z.b;
    if (horiz > 0.0) {
        b += (z.a * re_w / horiz) * v.db;
    }
    return HalfSpacePoint(a, std::move(b));
}

HalfSpaceTangent log_map(const HalfSpacePoint& z, const HalfSpacePoint& w) {
    const PlaneFrame f = to_plane(z, w);
    const double d = hdistance(z, w);
    if (d == 0.0) {
        return HalfSpaceTangent::zero(z.n());
    }
    const std::complex<double> i{0.0, 1.0};
    const std::complex<double> zeta = (f.w - i) / (f.w + i);
    const std::complex<double> xi = i * (zeta / std::abs(zeta)) * d;
    return {z.a * xi.imag(), (z.a * xi.real()) * f.e};
}

double hdistance(const HalfSpacePoint& z, const HalfSpacePoint& w) {
    require_dim(z.n(), w.n(), "hdistance");
    const double chord = std::sqrt((z.b - w.b).squaredNorm() + (z.a - w.a) * (z.a - w.a));
    return 2.0 * std::asinh(chord / (2.0 * std::sqrt(z.a * w.a)));
}

}  // namespace hyperfit
