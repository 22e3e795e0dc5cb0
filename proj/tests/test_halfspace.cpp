#include <gtest/gtest.h>

#include <numbers>

#include "hyperfit/errors.hpp"
#include "support.hpp"

using namespace hyperfit;
using namespace testing_support;

namespace {

HalfSpacePoint h2(double u, double v) { return HalfSpacePoint(v, Eigen::VectorXd::Constant(1, u)); }

// Riemannian gradient as a^2 times the coordinate gradient, by central differences.
HalfSpaceTangent fd_busemann_grad(const BoundaryPoint& x, const HalfSpacePoint& z) {
    const double h = 1e-6 * z.a;
    HalfSpaceTangent g = HalfSpaceTangent::zero(z.n());
    g.da = (busemann(x, HalfSpacePoint(z.a + h, z.b)) - busemann(x, HalfSpacePoint(z.a - h, z.b))) / (2 * h);
    for (Eigen::Index k = 0; k < z.n(); ++k) {
        Eigen::VectorXd bp = z.b, bm = z.b;
        bp(k) += h;
        bm(k) -= h;
        g.db(k) = (busemann(x, HalfSpacePoint(z.a, bp)) - busemann(x, HalfSpacePoint(z.a, bm))) / (2 * h);
    }
    return (z.a * z.a) * g;
}

}  // namespace

TEST(HalfSpace, PointValidation) {
    EXPECT_THROW(HalfSpacePoint(0.0, Eigen::VectorXd::Zero(1)), NumericRangeError);
    EXPECT_THROW(HalfSpacePoint(-1.0, Eigen::VectorXd::Zero(1)), NumericRangeError);
    EXPECT_THROW(HalfSpacePoint(1.0, Eigen::VectorXd::Constant(1, NAN)), NumericRangeError);
}

TEST(HalfSpace, BoundaryEquality) {
    EXPECT_EQ(BoundaryPoint::infinity(), BoundaryPoint::infinity());
    EXPECT_EQ(BoundaryPoint::at(1.0), BoundaryPoint::at(1.0));
    EXPECT_FALSE(BoundaryPoint::at(1.0) == BoundaryPoint::infinity());
    EXPECT_FALSE(BoundaryPoint::at(1.0) == BoundaryPoint::at(Eigen::Vector2d(1.0, 0.0)));
}

TEST(HalfSpace, BusemannExamples) {
    EXPECT_NEAR(busemann(BoundaryPoint::at(0.0), h2(0.0, 1.0)), 0.0, 1e-15);
    EXPECT_NEAR(busemann(BoundaryPoint::at(0.0), h2(0.0, 2.0)), 0.693147, 1e-6);
    EXPECT_NEAR(busemann(BoundaryPoint::infinity(), h2(3.0, std::numbers::e)), -1.0, 1e-15);
}

// -log of the Cauchy density (1/pi) v / ((x-u)^2 + v^2), less log pi.
TEST(HalfSpace, BusemannMatchesCauchyDensity) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const double u = 3 * standard_normal(rng), v = std::exp(standard_normal(rng)), x = 3 * standard_normal(rng);
        const double f = v / (std::numbers::pi * ((x - u) * (x - u) + v * v));
        EXPECT_NEAR(busemann(BoundaryPoint::at(x), h2(u, v)), -std::log(f) - std::log(std::numbers::pi), 1e-12);
    }
}

TEST(HalfSpace, BusemannGradExamples) {
    const HalfSpaceTangent g0 = busemann_grad(BoundaryPoint::at(0.0), h2(0.0, 1.0));
    const HalfSpaceTangent fd = fd_busemann_grad(BoundaryPoint::at(0.0), h2(0.0, 1.0));
    EXPECT_NEAR(g0.da, fd.da, 1e-8);
    EXPECT_NEAR(g0.db(0), fd.db(0), 1e-8);
    EXPECT_NEAR(g0.da, 1.0, 1e-15);
    EXPECT_NEAR(g0.db(0), 0.0, 1e-15);

    const HalfSpaceTangent gi = busemann_grad(BoundaryPoint::infinity(), h2(0.7, 2.5));
    EXPECT_NEAR(gi.da, -2.5, 1e-15);
    EXPECT_NEAR(gi.db(0), 0.0, 1e-15);
}

TEST(HalfSpaceProperty, UnitGradient) {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 1000; ++trial) {
        const Eigen::Index n = 1 + trial % 3;
        const HalfSpacePoint z = random_halfspace(n, rng);
        const BoundaryPoint x = trial % 10 == 0 ? BoundaryPoint::infinity()
                                                : BoundaryPoint::at(Eigen::VectorXd(3 * gaussian_vector(n, rng)));
        EXPECT_NEAR(norm(z, busemann_grad(x, z)), 1.0, 1e-10);
    }
}

TEST(HalfSpaceProperty, GradientMatchesFiniteDifferences) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Index n = 1 + trial % 3;
        const HalfSpacePoint z = random_halfspace(n, rng);
        const BoundaryPoint x = BoundaryPoint::at(Eigen::VectorXd(2 * gaussian_vector(n, rng)));
        const HalfSpaceTangent g = busemann_grad(x, z);
        const HalfSpaceTangent fd = fd_busemann_grad(x, z);
        const HalfSpaceTangent diff = g + (-fd);
        EXPECT_LT(norm(z, diff), 1e-6);
    }
}

TEST(HalfSpaceProperty, BusemannSecondDerivativeBand) {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 500; ++trial) {
        const Eigen::Index n = 1 + trial % 2;
        const HalfSpacePoint z = random_halfspace(n, rng);
        const HalfSpaceTangent v = unit_halfspace_tangent(z, rng);
        const BoundaryPoint x = trial % 7 == 0 ? BoundaryPoint::infinity()
                                               : BoundaryPoint::at(Eigen::VectorXd(2 * gaussian_vector(n, rng)));
        const double d2 = second_difference([&](double s) { return busemann(x, exp_map(z, v, s)); });
        EXPECT_GE(d2, -1e-6);
        EXPECT_LE(d2, 1.0 + 1e-6);
    }
}

TEST(HalfSpace, ExpMapExamples) {
    const HalfSpacePoint up = exp_map(h2(0.0, 1.0), {1.0, Eigen::VectorXd::Zero(1)}, 1.0);
    EXPECT_NEAR(up.a, std::numbers::e, 1e-14);
    EXPECT_NEAR(up.b(0), 0.0, 1e-15);

    const HalfSpacePoint z = h2(0.3, 1.7);
    const HalfSpacePoint same = exp_map(z, {0.4, Eigen::VectorXd::Constant(1, -0.2)}, 0.0);
    EXPECT_EQ(same.a, z.a);
    EXPECT_EQ(same.b(0), z.b(0));

    // Unit horizontal start at i runs along the unit semicircle: (tanh t, sech t).
    for (double t : {0.5, 1.0, 3.0, 10.0}) {
        const HalfSpacePoint w = exp_map(h2(0.0, 1.0), {0.0, Eigen::VectorXd::Constant(1, 1.0)}, t);
        EXPECT_NEAR(w.b(0), std::tanh(t), 1e-12);
        EXPECT_NEAR(w.a, 1.0 / std::cosh(t), 1e-12);
        EXPECT_NEAR(hdistance(h2(0.0, 1.0), w), t, 1e-9);
    }
}

TEST(HalfSpace, LogMapExamples) {
    const HalfSpacePoint z = h2(0.5, 2.0);
    const HalfSpaceTangent zero = log_map(z, z);
    EXPECT_EQ(zero.da, 0.0);
    EXPECT_EQ(zero.db(0), 0.0);
    const HalfSpaceTangent up = log_map(h2(0.0, 1.0), h2(0.0, std::numbers::e));
    EXPECT_NEAR(up.da, 1.0, 1e-14);
    EXPECT_NEAR(up.db(0), 0.0, 1e-15);
}

TEST(HalfSpace, DistanceExamples) {
    EXPECT_NEAR(hdistance(h2(0.0, 1.0), h2(0.0, std::numbers::e)), 1.0, 1e-15);
    const HalfSpacePoint z = h2(-1.0, 0.3);
    EXPECT_EQ(hdistance(z, z), 0.0);
}

TEST(HalfSpaceProperty, ScalingInvariance) {
    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 200; ++trial) {
        const HalfSpacePoint z = random_halfspace(2, rng), w = random_halfspace(2, rng);
        const double lambda = std::exp(2 * standard_normal(rng));
        EXPECT_NEAR(hdistance(z, w), hdistance(HalfSpacePoint(lambda * z.a, lambda * z.b), HalfSpacePoint(lambda * w.a, lambda * w.b)),
                    1e-10);
    }
}

TEST(HalfSpaceProperty, LogExpRoundTripAndSpeed) {
    std::mt19937_64 rng(16);
    for (int trial = 0; trial < 500; ++trial) {
        const Eigen::Index n = 1 + trial % 3;
        const HalfSpacePoint z = random_halfspace(n, rng), w = random_halfspace(n, rng);
        const HalfSpaceTangent v = log_map(z, w);
        EXPECT_NEAR(norm(z, v), hdistance(z, w), 1e-8 * (1 + hdistance(z, w)));
        EXPECT_LT(hdistance(exp_map(z, v, 1.0), w), 1e-8);
        const double t = 3 * standard_normal(rng);
        const HalfSpaceTangent u = unit_halfspace_tangent(z, rng);
        EXPECT_NEAR(hdistance(z, exp_map(z, u, t)), std::abs(t), 1e-8 * (1 + std::abs(t)));
    }
}
