#include "hyperfit/spline.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "hyperfit/conformal.hpp"
#include "hyperfit/errors.hpp"

namespace hyperfit {

namespace {

HalfSpacePoint point(double u, double v) { return HalfSpacePoint(v, Eigen::VectorXd::Constant(1, u)); }

void require_values(const SplineKnots& knots, std::span<const HalfSpacePoint> values) {
    if (values.size() != knots.size()) {
        throw DimensionError("spline: expected one value per distinct knot");
    }
    for (const auto& z : values) {
        if (z.n() != 1) {
            throw DimensionError("spline values live in the upper half-plane");
        }
    }
}

// asinh(sqrt(y))^2 and its first two derivatives; d(z, w)^2 = 4 h(q / 2) with
// q = (|b_z - b_w|^2 + (a_z - a_w)^2) / (2 a_z a_w).
struct Squared {
    double d1, d2;
};

Squared asinh_sq_derivs(double y) {
    if (y < 1e-4) {
        return {1.0 - 2.0 * y / 3.0 + 8.0 * y * y / 15.0 - 16.0 * y * y * y / 35.0,
                -2.0 / 3.0 + 16.0 * y / 15.0 - 48.0 * y * y / 35.0};
    }
    const double a = std::asinh(std::sqrt(y));
    const double r = std::sqrt(y * (1.0 + y));
    return {a / r, (r - a * (1.0 + 2.0 * y)) / (2.0 * r * r * r)};
}

// Chart coordinates y = (u_1, l_1, ..., u_k, l_k), l = log v.
struct ChartModel {
    const SplineKnots& knots;

    std::vector<HalfSpacePoint> points(const Eigen::VectorXd& y) const {
        std::vector<HalfSpacePoint> out;
        out.reserve(knots.size());
        for (std::size_t i = 0; i < knots.size(); ++i) {
            out.push_back(point(y(2 * i), std::exp(y(2 * i + 1))));
        }
        return out;
    }

    // Unrepresentable chart points (v over- or underflowing) count as +inf.
    double value(const Eigen::VectorXd& y) const {
        try {
            return objective(knots, points(y));
        } catch (const NumericRangeError&) {
            return std::numeric_limits<double>::infinity();
        }
    }

    // Euclidean gradient and Hessian in the chart.
    void derivatives(const Eigen::VectorXd& y, Eigen::VectorXd& g, Eigen::MatrixXd& h) const {
        const auto k = static_cast<Eigen::Index>(knots.size());
        g = Eigen::VectorXd::Zero(2 * k);
        h = Eigen::MatrixXd::Zero(2 * k, 2 * k);
        for (Eigen::Index i = 0; i < k; ++i) {
            const double u = y(2 * i);
            const double l = y(2 * i + 1);
            const double e2 = std::exp(2.0 * l);
            for (const auto& x : knots.observations[static_cast<std::size_t>(i)]) {
                if (x.is_infinity()) {
                    g(2 * i + 1) -= 1.0;
                    continue;
                }
                const double r = u - x.coords()(0);
                const double q = r * r + e2;
                g(2 * i) += 2.0 * r / q;
                g(2 * i + 1) += 2.0 * e2 / q - 1.0;
                h(2 * i, 2 * i) += 2.0 * (e2 - r * r) / (q * q);
                h(2 * i, 2 * i + 1) -= 4.0 * r * e2 / (q * q);
                h(2 * i + 1, 2 * i) -= 4.0 * r * e2 / (q * q);
                h(2 * i + 1, 2 * i + 1) += 4.0 * e2 * r * r / (q * q);
            }
        }
        for (Eigen::Index i = 0; i + 1 < k; ++i) {
            const double gap = knots.times[static_cast<std::size_t>(i + 1)] - knots.times[static_cast<std::size_t>(i)];
            const double w = 0.5 * knots.alpha / gap;
            const double du = y(2 * i) - y(2 * i + 2);
            const double dl = y(2 * i + 1) - y(2 * i + 3);
            const double e = std::exp(-y(2 * i + 1) - y(2 * i + 3));
            const double sh = std::sinh(0.5 * dl);
            const double q = 0.5 * du * du * e + 2.0 * sh * sh;
            Eigen::Vector4d dq(du * e, -0.5 * du * du * e + std::sinh(dl), -du * e,
                               -0.5 * du * du * e - std::sinh(dl));
            const double c = std::cosh(dl);
            const double p = 0.5 * du * du * e;
            Eigen::Matrix4d hq;
            hq << e, -du * e, -e, -du * e,
                  -du * e, p + c, du * e, p - c,
                  -e, du * e, e, du * e,
                  -du * e, p - c, du * e, p + c;
            const Squared s = asinh_sq_derivs(0.5 * q);
            // d^2 = 4 h(q/2): grad = 2 h' dq, hess = h'' dq dq^T + 2 h' hq.
            const Eigen::Vector4d gd = 2.0 * s.d1 * dq;
            const Eigen::Matrix4d hd = s.d2 * dq * dq.transpose() + 2.0 * s.d1 * hq;
            const Eigen::Index idx[4] = {2 * i, 2 * i + 1, 2 * i + 2, 2 * i + 3};
            for (int a = 0; a < 4; ++a) {
                g(idx[a]) += w * gd(a);
                for (int b = 0; b < 4; ++b) {
                    h(idx[a], idx[b]) += w * hd(a, b);
                }
            }
        }
    }
};

double riemannian_norm(const SplineKnots& knots, std::span<const HalfSpacePoint> values) {
    const auto grads = objective_grad(knots, values);
    double s = 0.0;
    for (std::size_t i = 0; i < grads.size(); ++i) {
        const double ni = norm(values[i], grads[i]);
        s += ni * ni;
    }
    return std::sqrt(s);
}

// Knot coordinates are only known to about eps relative precision, which moves
// a knot by eps (|u| + v) / v in the metric.
double blur(const HalfSpacePoint& z) {
    return std::numeric_limits<double>::epsilon() * (std::abs(z.b(0)) + z.a) / z.a;
}

// The energy gradient amplifies the blur by alpha / gap, so for large
// alpha / gap no representable configuration gets the gradient below this level.
double gradient_floor(const SplineKnots& knots, std::span<const HalfSpacePoint> values) {
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        double stiffness = 0.0;
        if (i > 0) stiffness += knots.alpha / (knots.times[i] - knots.times[i - 1]);
        if (i + 1 < values.size()) stiffness += knots.alpha / (knots.times[i + 1] - knots.times[i]);
        const double e = stiffness * blur(values[i]);
        s += e * e;
    }
    return std::sqrt(s);
}

// A knot whose position is uncertain beyond sqrt(eps) sits on the boundary at
// working precision; a fit stalled there has run off to the boundary.
bool unresolved(std::span<const HalfSpacePoint> values) {
    const double limit = std::sqrt(std::numeric_limits<double>::epsilon());
    return std::any_of(values.begin(), values.end(), [&](const HalfSpacePoint& z) { return blur(z) > limit; });
}

bool diverged(std::span<const HalfSpacePoint> values, const std::vector<HalfSpacePoint>& start, double radius) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(hdistance(values[i], start[i]) <= radius)) return true;
    }
    return false;
}

std::vector<HalfSpacePoint> initial_values(const SplineKnots& knots, const DescentConfig& config) {
    std::vector<BoundaryPoint> pooled;
    for (const auto& group : knots.observations) {
        pooled.insert(pooled.end(), group.begin(), group.end());
    }
    HalfSpacePoint z0 = point(0.0, 1.0);
    if (conformal_well_posed(pooled)) {
        DescentConfig c = config;
        c.standardize = true;
        auto [z, report] = fit_c(pooled, 1, c);
        if (report.status == FitStatus::converged) z0 = z;
    }
    return std::vector<HalfSpacePoint>(knots.size(), z0);
}

SplineSolution fit_newton(const SplineKnots& knots, const DescentConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    const ChartModel model{knots};
    const std::vector<HalfSpacePoint> start = initial_values(knots, config);
    const double radius = std::log(config.condition_cap);
    const auto dim = static_cast<Eigen::Index>(2 * knots.size());

    Eigen::VectorXd y(dim);
    for (std::size_t i = 0; i < knots.size(); ++i) {
        y(static_cast<Eigen::Index>(2 * i)) = start[i].b(0);
        y(static_cast<Eigen::Index>(2 * i + 1)) = std::log(start[i].a);
    }

    SplineSolution sol;
    sol.times = knots.times;
    FitReport& report = sol.report;
    Eigen::VectorXd g;
    Eigen::MatrixXd h;
    for (int it = 0;; ++it) {
        const auto pts = model.points(y);
        const double f = objective(knots, pts);
        const double gn = riemannian_norm(knots, pts);
        report.loss_trace.push_back(f);
        report.grad_norm_trace.push_back(gn);
        if (!std::isfinite(f) || !std::isfinite(gn) || diverged(pts, start, radius)) {
            report.status = FitStatus::degenerate_data;
            break;
        }
        if (gn < std::max(config.tol, gradient_floor(knots, pts))) {
            report.status = FitStatus::converged;
            break;
        }
        if (it == config.max_iters) {
            report.status = classify_unconverged(report.grad_norm_trace);
            break;
        }

        model.derivatives(y, g, h);
        // Levenberg damping until the system is positive definite.
        const double scale = std::max(1.0, h.diagonal().cwiseAbs().maxCoeff());
        Eigen::VectorXd dir;
        for (double mu = 0.0;; mu = (mu == 0.0 ? 1e-10 * scale : 10.0 * mu)) {
            Eigen::LLT<Eigen::MatrixXd> llt(h + mu * Eigen::MatrixXd::Identity(dim, dim));
            if (llt.info() == Eigen::Success) {
                dir = -llt.solve(g);
                if (dir.allFinite() && g.dot(dir) < 0.0) break;
            }
            if (mu > 1e20 * scale) {
                dir = -g;
                break;
            }
        }
        // Armijo backtracking; a failed search means no representable progress.
        // When the predicted decrease is below the rounding of f, the loss can't
        // rank candidates, so the full step is judged by the gradient norm.
        const double slope = g.dot(dir);
        bool moved = false;
        if (-slope < 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(f))) {
            const Eigen::VectorXd cand = y + dir;
            if (std::isfinite(model.value(cand)) && riemannian_norm(knots, model.points(cand)) < gn) {
                y = cand;
                moved = true;
            }
        }
        for (double s = 1.0; !moved && s > 1e-20; s *= 0.5) {
            const Eigen::VectorXd cand = y + s * dir;
            const double fc = model.value(cand);
            if (std::isfinite(fc) && fc <= f + 1e-4 * s * slope) {
                y = cand;
                moved = true;
                break;
            }
        }
        if (!moved) {
            report.status = classify_unconverged(report.grad_norm_trace);
            break;
        }
        report.iterations = it + 1;
    }
    sol.values = model.points(y);
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sol;
}

struct ProductProblem {
    const SplineKnots& knots;
    std::vector<HalfSpacePoint> start;
    double radius;

    using Point = std::vector<HalfSpacePoint>;
    using Tangent = std::vector<HalfSpaceTangent>;

    std::pair<double, Tangent> loss_grad(const Point& z) const {
        return {objective(knots, z), objective_grad(knots, z)};
    }
    double loss(const Point& z) const { return objective(knots, z); }
    double norm(const Point& z, const Tangent& g) const {
        double s = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            const double ni = hyperfit::norm(z[i], g[i]);
            s += ni * ni;
        }
        return std::sqrt(s);
    }
    Point step(const Point& z, const Tangent& g, double s) const {
        Point out;
        out.reserve(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) {
            out.push_back(exp_map(z[i], -g[i], s));
        }
        return out;
    }
    bool diverged(const Point& z) const { return hyperfit::diverged(z, start, radius); }
};

}  // namespace

void SplineProblem::validate() const {
    if (times.empty()) {
        throw InvalidArgument("spline problem has no observations");
    }
    if (times.size() != observations.size()) {
        throw DimensionError("spline problem: times and observations differ in length");
    }
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw InvalidArgument("spline alpha must be positive");
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i])) {
            throw NumericRangeError("spline knot times must be finite");
        }
        if (!observations[i].is_infinity() && observations[i].coords().size() != 1) {
            throw DimensionError("spline observations must be scalars or inf");
        }
    }
}

SplineKnots merge_knots(const SplineProblem& problem) {
    problem.validate();
    std::vector<std::size_t> order(problem.times.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return problem.times[a] < problem.times[b]; });
    SplineKnots k;
    k.alpha = problem.alpha;
    for (std::size_t i : order) {
        if (k.times.empty() || problem.times[i] != k.times.back()) {
            k.times.push_back(problem.times[i]);
            k.observations.emplace_back();
        }
        k.observations.back().push_back(problem.observations[i]);
    }
    return k;
}

double objective(const SplineKnots& knots, std::span<const HalfSpacePoint> values) {
    require_values(knots, values);
    double f = 0.0;
    for (std::size_t i = 0; i < knots.size(); ++i) {
        for (const auto& x : knots.observations[i]) {
            f += busemann(x, values[i]);
        }
        if (i + 1 < knots.size()) {
            const double d = hdistance(values[i], values[i + 1]);
            f += 0.5 * knots.alpha * d * d / (knots.times[i + 1] - knots.times[i]);
        }
    }
    return f;
}

double objective(const SplineProblem& problem, std::span<const HalfSpacePoint> values) {
    return objective(merge_knots(problem), values);
}

std::vector<HalfSpaceTangent> objective_grad(const SplineKnots& knots, std::span<const HalfSpacePoint> values) {
    require_values(knots, values);
    std::vector<HalfSpaceTangent> g;
    g.reserve(knots.size());
    for (std::size_t i = 0; i < knots.size(); ++i) {
        HalfSpaceTangent gi = HalfSpaceTangent::zero(1);
        for (const auto& x : knots.observations[i]) {
            gi += busemann_grad(x, values[i]);
        }
        // The gradient of d(z, w)^2 / 2 in z is -log_z(w).
        if (i + 1 < knots.size()) {
            const double w = knots.alpha / (knots.times[i + 1] - knots.times[i]);
            gi += -w * log_map(values[i], values[i + 1]);
        }
        if (i > 0) {
            const double w = knots.alpha / (knots.times[i] - knots.times[i - 1]);
            gi += -w * log_map(values[i], values[i - 1]);
        }
        g.push_back(std::move(gi));
    }
    return g;
}

std::vector<double> junction_residuals(const SplineKnots& knots, std::span<const HalfSpacePoint> values) {
    require_values(knots, values);
    std::vector<double> out;
    out.reserve(knots.size());
    for (std::size_t i = 0; i < knots.size(); ++i) {
        HalfSpaceTangent outgoing = HalfSpaceTangent::zero(1);
        HalfSpaceTangent incoming = HalfSpaceTangent::zero(1);
        if (i + 1 < knots.size()) {
            outgoing = (1.0 / (knots.times[i + 1] - knots.times[i])) * log_map(values[i], values[i + 1]);
        }
        if (i > 0) {
            incoming = (-1.0 / (knots.times[i] - knots.times[i - 1])) * log_map(values[i], values[i - 1]);
        }
        HalfSpaceTangent force = HalfSpaceTangent::zero(1);
        for (const auto& x : knots.observations[i]) {
            force += -busemann_grad(x, values[i]);
        }
        const HalfSpaceTangent r = knots.alpha * (outgoing + (-incoming)) + force;
        out.push_back(norm(values[i], r));
    }
    return out;
}

namespace {

SplineSolution fit_gradient(const SplineKnots& knots, const DescentConfig& config) {
    double min_gap = INFINITY;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        min_gap = std::min(min_gap, knots.times[i + 1] - knots.times[i]);
    }
    const double safe = std::isfinite(min_gap) ? 1.0 / (1.0 + 2.0 * knots.alpha / min_gap) : 1.0;
    ProductProblem prob{knots, initial_values(knots, config), std::log(config.condition_cap)};
    auto [values, report] = descend(prob.start, prob, StepSizes{safe, 2.0 * safe}, config);
    SplineSolution sol;
    sol.times = knots.times;
    sol.values = std::move(values);
    sol.report = std::move(report);
    return sol;
}

}  // namespace

SplineSolution fit_spline(const SplineProblem& problem, const DescentConfig& config, SplineMethod method) {
    config.validate();
    const SplineKnots knots = merge_knots(problem);
    SplineSolution sol = method == SplineMethod::newton ? fit_newton(knots, config) : fit_gradient(knots, config);
    const FitStatus st = sol.report.status;
    if ((st == FitStatus::ill_conditioned || st == FitStatus::max_iters_exceeded) && unresolved(sol.values)) {
        sol.report.status = FitStatus::degenerate_data;
    }
    return sol;
}

HalfSpacePoint SplineSolution::evaluate(double t) const {
    if (values.empty()) {
        throw InvalidArgument("evaluate on an empty spline");
    }
    if (t <= times.front()) return values.front();
    if (t >= times.back()) return values.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const auto i = static_cast<std::size_t>(it - times.begin()) - 1;
    const double s = (t - times[i]) / (times[i + 1] - times[i]);
    return exp_map(values[i], log_map(values[i], values[i + 1]), s);
}

}  // namespace hyperfit
