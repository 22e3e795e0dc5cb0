#include <gtest/gtest.h>

#include <array>
#include <complex>
#include <limits>

#include "hyperfit/conformal.hpp"
#include "hyperfit/errors.hpp"
#include "hyperfit/spline.hpp"
#include "support.hpp"

using namespace hyperfit;
using namespace testing_support;

namespace {

HalfSpacePoint h2(double u, double v) { return HalfSpacePoint(v, Eigen::VectorXd::Constant(1, u)); }

SplineProblem random_problem(std::mt19937_64& rng, int k, double alpha) {
    SplineProblem p;
    p.alpha = alpha;
    double t = 0.0;
    for (int i = 0; i < k; ++i) {
        t += 0.2 + uniform01(rng);
        p.times.push_back(t);
        p.observations.push_back(BoundaryPoint::at(0.5 * t + standard_normal(rng)));
    }
    return p;
}

// x -> (a x + b) / (c x + d), ad - bc = 1, on the boundary and on H^2.
struct Mobius {
    double a, b, c, d;
    BoundaryPoint operator()(const BoundaryPoint& x) const {
        if (x.is_infinity()) return c == 0.0 ? x : BoundaryPoint::at(a / c);
        const double den = c * x.coords()(0) + d;
        if (den == 0.0) return BoundaryPoint::infinity();
        return BoundaryPoint::at((a * x.coords()(0) + b) / den);
    }
    HalfSpacePoint operator()(const HalfSpacePoint& z) const {
        const std::complex<double> w(z.b(0), z.a);
        const std::complex<double> m = (a * w + b) / (c * w + d);
        return h2(m.real(), m.imag());
    }
};

}  // namespace

TEST(Spline, ObjectiveExamples) {
    SplineProblem one{{0.0}, {BoundaryPoint::at(2.0)}, 3.0};
    const std::vector<HalfSpacePoint> z1{h2(0.5, 1.5)};
    EXPECT_NEAR(objective(one, z1), busemann(BoundaryPoint::at(2.0), z1[0]), 1e-15);

    SplineProblem two{{0.0, 1.0}, {BoundaryPoint::at(-1.0), BoundaryPoint::at(2.0)}, 5.0};
    const std::vector<HalfSpacePoint> same{h2(0.3, 0.7), h2(0.3, 0.7)};
    EXPECT_NEAR(objective(two, same),
                busemann(BoundaryPoint::at(-1.0), same[0]) + busemann(BoundaryPoint::at(2.0), same[0]), 1e-14);

    SplineProblem zeros{{0.0, 1.0}, {BoundaryPoint::at(0.0), BoundaryPoint::at(0.0)}, 1.0};
    EXPECT_NEAR(objective(zeros, std::vector<HalfSpacePoint>{h2(0, 1), h2(0, 1)}), 0.0, 1e-15);

    // Energy term (alpha/2) d^2 / gap.
    const std::vector<HalfSpacePoint> apart{h2(0, 1), h2(0, std::exp(1.0))};
    SplineProblem gap{{0.0, 2.0}, {BoundaryPoint::at(0.0), BoundaryPoint::at(0.0)}, 4.0};
    EXPECT_NEAR(objective(gap, apart), busemann(BoundaryPoint::at(0.0), apart[1]) + 4.0 / 2 * 1.0 / 2.0, 1e-14);
}

TEST(Spline, ProblemValidation) {
    EXPECT_THROW((SplineProblem{{}, {}, 1.0}.validate()), InvalidArgument);
    EXPECT_THROW((SplineProblem{{0.0}, {BoundaryPoint::at(0.0)}, 0.0}.validate()), InvalidArgument);
    EXPECT_THROW((SplineProblem{{0.0, 1.0}, {BoundaryPoint::at(0.0)}, 1.0}.validate()), DimensionError);
}

TEST(Spline, DuplicateTimesMerge) {
    SplineProblem p{{2.0, 0.0, 2.0, 1.0}, {BoundaryPoint::at(1.0), BoundaryPoint::at(2.0), BoundaryPoint::at(3.0), BoundaryPoint::at(4.0)}, 1.0};
    const SplineKnots k = merge_knots(p);
    ASSERT_EQ(k.size(), 3u);
    EXPECT_EQ(k.times, (std::vector<double>{0.0, 1.0, 2.0}));
    EXPECT_EQ(k.observations[2].size(), 2u);
    const std::vector<HalfSpacePoint> z{h2(0, 1), h2(1, 2), h2(2, 1)};
    EXPECT_DOUBLE_EQ(objective(k, z), objective(p, z));
}

TEST(SplineProperty, GradientMatchesFiniteDifferences) {
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 30; ++trial) {
        const SplineKnots k = merge_knots(random_problem(rng, 5, std::exp(standard_normal(rng))));
        std::vector<HalfSpacePoint> z;
        for (std::size_t i = 0; i < k.size(); ++i) z.push_back(random_halfspace(1, rng));
        const auto g = objective_grad(k, z);
        std::vector<HalfSpaceTangent> v;
        double an = 0.0;
        for (std::size_t i = 0; i < k.size(); ++i) {
            v.push_back(unit_halfspace_tangent(z[i], rng));
            an += inner(z[i], g[i], v[i]);
        }
        auto at = [&](double s) {
            std::vector<HalfSpacePoint> w;
            for (std::size_t i = 0; i < k.size(); ++i) w.push_back(exp_map(z[i], v[i], s));
            return objective(k, w);
        };
        const double h = 1e-5;
        const double fd = (at(h) - at(-h)) / (2 * h);
        EXPECT_LT(std::abs(fd - an) / std::max(1.0, std::abs(an)), 1e-6);
    }
}

TEST(Spline, LargeAlphaMatchesPooledFit) {
    std::mt19937_64 rng(72);
    const SplineProblem p = random_problem(rng, 25, 1e6);
    const SplineSolution s = fit_spline(p);
    ASSERT_EQ(s.report.status, FitStatus::converged);
    const auto [pooled, r] = fit_univariate(p.observations);
    ASSERT_EQ(r.status, FitStatus::converged);
    for (const auto& z : s.values) {
        EXPECT_NEAR(z.b(0), pooled.u, 1e-3);
        EXPECT_NEAR(z.a, pooled.v, 1e-3);
    }
}

// Isometries fixing -1 and +1 shift the two Busemann terms by opposite amounts,
// so the mirror-pair objective is constant on their orbits and the minimizer is
// an orbit. flow(t) moves a point along that family.
HalfSpacePoint flow(const HalfSpacePoint& z, double t) {
    const std::complex<double> w{z.b(0), z.a};
    const double c = std::cosh(0.5 * t), s = std::sinh(0.5 * t);
    const std::complex<double> m = (c * w + s) / (s * w + c);
    return HalfSpacePoint(m.imag(), Eigen::VectorXd::Constant(1, m.real()));
}

// The fit starts from the symmetric pooled estimate and so lands on the mirror
// pair within the minimizing orbit. Coarse grid search on (u1, v1, u2, v2): the
// fit must beat every grid point, and the grid minimizer must sit within a grid
// cell of the fitted orbit.
TEST(Spline, MirrorPairMatchesGridOracle) {
    for (double alpha : {0.3, 1.0, 4.0}) {
        const SplineProblem p{{0.0, 1.0}, {BoundaryPoint::at(-1.0), BoundaryPoint::at(1.0)}, alpha};
        const SplineSolution s = fit_spline(p);
        ASSERT_EQ(s.report.status, FitStatus::converged);
        const HalfSpacePoint& z1 = s.values[0];
        const HalfSpacePoint& z2 = s.values[1];
        EXPECT_NEAR(z2.b(0), -z1.b(0), 1e-6);
        EXPECT_NEAR(z2.a, z1.a, 1e-6);

        // Closed-form objective, independent of the library's evaluation path.
        auto f = [alpha](double u1, double v1, double u2, double v2) {
            const double chord = std::hypot(u1 - u2, v1 - v2);
            const double d = 2 * std::asinh(chord / (2 * std::sqrt(v1 * v2)));
            return std::log(((u1 + 1) * (u1 + 1) + v1 * v1) / v1) + std::log(((u2 - 1) * (u2 - 1) + v2 * v2) / v2) +
                   0.5 * alpha * d * d;
        };
        const double fit_value = f(z1.b(0), z1.a, z2.b(0), z2.a);
        EXPECT_NEAR(objective(p, s.values), fit_value, 1e-12);
        for (double t : {-1.0, -0.3, 0.4, 1.5}) {
            const HalfSpacePoint w1 = flow(z1, t), w2 = flow(z2, t);
            EXPECT_NEAR(f(w1.b(0), w1.a, w2.b(0), w2.a), fit_value, 1e-10);
        }

        const double du = 0.025, dv = 0.025;
        double best = std::numeric_limits<double>::infinity();
        std::array<double, 4> arg{};
        for (double u1 = -1.0; u1 <= 1.0 + 1e-12; u1 += du)
            for (double v1 = 0.1; v1 <= 2.0 + 1e-12; v1 += dv)
                for (double u2 = -1.0; u2 <= 1.0 + 1e-12; u2 += du)
                    for (double v2 = 0.1; v2 <= 2.0 + 1e-12; v2 += dv) {
                        const double val = f(u1, v1, u2, v2);
                        if (val < best) {
                            best = val;
                            arg = {u1, v1, u2, v2};
                        }
                    }
        EXPECT_LE(fit_value, best + 1e-12);

        double closest = std::numeric_limits<double>::infinity();
        for (double t = -8.0; t <= 8.0; t += 1e-3) {
            const HalfSpacePoint w1 = flow(z1, t), w2 = flow(z2, t);
            closest = std::min(closest, std::max({std::abs(w1.b(0) - arg[0]), std::abs(w1.a - arg[1]),
                                                  std::abs(w2.b(0) - arg[2]), std::abs(w2.a - arg[3])}));
        }
        EXPECT_LT(closest, du);
    }
}

TEST(SplineProperty, JunctionResidualsAtConvergence) {
    std::mt19937_64 rng(73);
    for (int trial = 0; trial < 20; ++trial) {
        const SplineProblem p = random_problem(rng, 4 + trial % 12, std::exp(2 * standard_normal(rng)));
        const SplineSolution s = fit_spline(p);
        ASSERT_EQ(s.report.status, FitStatus::converged);
        for (double r : junction_residuals(merge_knots(p), s.values)) EXPECT_LT(r, 1e-6);
    }
}

TEST(SplineProperty, ObjectiveNonIncreasing) {
    std::mt19937_64 rng(74);
    for (SplineMethod m : {SplineMethod::newton, SplineMethod::gradient}) {
        for (int trial = 0; trial < 5; ++trial) {
            DescentConfig cfg;
            cfg.max_iters = 500;
            const SplineSolution s = fit_spline(random_problem(rng, 6, 0.5), cfg, m);
            const auto& f = s.report.loss_trace;
            for (std::size_t i = 0; i + 1 < f.size(); ++i) EXPECT_LE(f[i + 1], f[i] + 1e-12);
        }
    }
}

TEST(Spline, GradientMethodAgreesWithNewton) {
    std::mt19937_64 rng(75);
    const SplineProblem p = random_problem(rng, 5, 0.5);
    DescentConfig cfg;
    cfg.max_iters = 200000;
    cfg.tol = 1e-10;
    const SplineSolution g = fit_spline(p, cfg, SplineMethod::gradient);
    const SplineSolution n = fit_spline(p);
    ASSERT_EQ(n.report.status, FitStatus::converged);
    for (std::size_t i = 0; i < n.values.size(); ++i) EXPECT_LT(hdistance(g.values[i], n.values[i]), 1e-7);
}

TEST(Spline, Evaluate) {
    std::mt19937_64 rng(76);
    const SplineSolution s = fit_spline(random_problem(rng, 6, 1.0));
    for (std::size_t i = 0; i < s.times.size(); ++i) {
        const HalfSpacePoint z = s.evaluate(s.times[i]);
        EXPECT_EQ(z.a, s.values[i].a);
        EXPECT_EQ(z.b(0), s.values[i].b(0));
    }
    EXPECT_EQ(s.evaluate(s.times.front() - 5.0).a, s.values.front().a);
    EXPECT_EQ(s.evaluate(s.times.back() + 5.0).b(0), s.values.back().b(0));
    for (std::size_t i = 0; i + 1 < s.times.size(); ++i) {
        const HalfSpacePoint mid = s.evaluate(0.5 * (s.times[i] + s.times[i + 1]));
        const double d = hdistance(s.values[i], s.values[i + 1]);
        EXPECT_NEAR(hdistance(mid, s.values[i]), 0.5 * d, 1e-8);
        EXPECT_NEAR(hdistance(mid, s.values[i + 1]), 0.5 * d, 1e-8);
    }
}

TEST(SplineProperty, MobiusEquivariance) {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 10; ++trial) {
        const SplineProblem p = random_problem(rng, 8, std::exp(standard_normal(rng)));
        const double a = std::exp(0.5 * standard_normal(rng)), b = standard_normal(rng), c = 0.3 * standard_normal(rng);
        const Mobius g{a, b, c, (1.0 + b * c) / a};
        SplineProblem q = p;
        for (auto& x : q.observations) x = g(x);
        const SplineSolution s0 = fit_spline(p), s1 = fit_spline(q);
        ASSERT_EQ(s0.report.status, FitStatus::converged);
        ASSERT_EQ(s1.report.status, FitStatus::converged);
        for (std::size_t i = 0; i < s0.values.size(); ++i) EXPECT_LT(hdistance(s1.values[i], g(s0.values[i])), 1e-5);
    }
}

TEST(Spline, ConcentratedDataIsDegenerate) {
    const SplineProblem p{{0.0, 1.0, 2.0}, {BoundaryPoint::at(0.0), BoundaryPoint::at(0.0), BoundaryPoint::at(0.0)}, 0.1};
    EXPECT_EQ(fit_spline(p).report.status, FitStatus::degenerate_data);
}

TEST(Spline, SingleKnotIsUnivariateFitWhenWellPosed) {
    const SplineProblem p{{1.0, 1.0, 1.0}, {BoundaryPoint::at(0.0), BoundaryPoint::at(1.0), BoundaryPoint::infinity()}, 1.0};
    const SplineSolution s = fit_spline(p);
    ASSERT_EQ(s.report.status, FitStatus::converged);
    EXPECT_NEAR(s.values[0].b(0), 0.5, 1e-8);
    EXPECT_NEAR(s.values[0].a, std::sqrt(3.0) / 2, 1e-8);
}

// Small alpha with one observation per end knot puts the optimum near v = 1e-14,
// where an ulp of u exceeds a percent of v.
TEST(Spline, OptimumBeyondResolutionIsDegenerate) {
    const SplineProblem p{{0.0, 1.0, 2.0, 3.0},
                          {BoundaryPoint::at(0.5), BoundaryPoint::at(0.6), BoundaryPoint::at(0.4), BoundaryPoint::at(0.6)},
                          0.03};
    const SplineSolution s = fit_spline(p);
    EXPECT_EQ(s.report.status, FitStatus::degenerate_data);
}
