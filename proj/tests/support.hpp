#pragma once

#include <Eigen/Core>

#include <cmath>
#include <random>
#include <vector>

#include "hyperfit/cauchy.hpp"
#include "hyperfit/halfspace.hpp"
#include "hyperfit/random.hpp"
#include "hyperfit/spd.hpp"

namespace testing_support {

using namespace hyperfit;

inline Eigen::MatrixXd gaussian_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
        for (Eigen::Index i = 0; i < r; ++i) m(i, j) = standard_normal(rng);
    return m;
}

inline Eigen::VectorXd gaussian_vector(Eigen::Index n, std::mt19937_64& rng) { return gaussian_matrix(n, 1, rng).col(0); }

inline TangentSym random_tangent(const SpdPoint& t, std::mt19937_64& rng, double scale = 1.0) {
    return scale * project_tangent(t, gaussian_matrix(t.dim(), t.dim(), rng));
}

inline TangentSym unit_tangent(const SpdPoint& t, std::mt19937_64& rng) {
    TangentSym v = random_tangent(t, rng);
    return (1.0 / norm(t, v)) * v;
}

inline SpdPoint random_spd(Eigen::Index p, std::mt19937_64& rng, double spread = 1.0) {
    const SpdPoint id = SpdPoint::identity(p);
    return geodesic(id, unit_tangent(id, rng), spread * (0.2 + uniform01(rng)));
}

/// Unit-determinant matrix with moderate conditioning.
inline Eigen::MatrixXd random_sl(Eigen::Index p, std::mt19937_64& rng) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(p, p) + 0.5 * gaussian_matrix(p, p, rng);
    double d = a.determinant();
    if (d < 0) {
        a.col(0) *= -1.0;
        d = -d;
    }
    return a / std::pow(d, 1.0 / static_cast<double>(p));
}

inline HalfSpacePoint random_halfspace(Eigen::Index n, std::mt19937_64& rng) {
    return HalfSpacePoint(std::exp(standard_normal(rng)), gaussian_vector(n, rng));
}

inline HalfSpaceTangent unit_halfspace_tangent(const HalfSpacePoint& z, std::mt19937_64& rng) {
    HalfSpaceTangent v{standard_normal(rng), gaussian_vector(z.n(), rng)};
    return (1.0 / norm(z, v)) * v;
}

inline LiftedData random_points(Eigen::Index n, std::size_t count, std::mt19937_64& rng, double scale = 2.0) {
    LiftedData d(n);
    for (std::size_t i = 0; i < count; ++i) d.push_back(LiftedDatum::from_point(scale * gaussian_vector(n, rng)));
    return d;
}

inline std::vector<BoundaryPoint> boundary_sample(Eigen::Index n, std::size_t count, std::mt19937_64& rng,
                                                  double scale = 2.0) {
    std::vector<BoundaryPoint> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(BoundaryPoint::at(Eigen::VectorXd(scale * gaussian_vector(n, rng))));
    return out;
}

/// Central second difference of f along s.
template <class F>
double second_difference(F f, double h = 1e-4) {
    return (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
}

inline double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace testing_support
