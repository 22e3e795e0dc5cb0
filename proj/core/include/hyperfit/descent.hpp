#pragma once

// Shared machinery for the geodesic gradient descents: configuration, the
// fit report, and a descent loop generic over the manifold.

#include <chrono>
#include <cmath>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "hyperfit/errors.hpp"

namespace hyperfit {

enum class StepPolicy {
    safe,          ///< the provably safe step
    improved,      ///< the heuristic larger step, unguarded
    backtracking,  ///< improved step, halved until the loss decreases, floored at safe
};

enum class FitStatus {
    converged,
    ill_conditioned,  ///< iteration cap hit while the gradient decayed only slowly
    degenerate_data,  ///< data not in general position, or the iterate ran off to the boundary
    max_iters_exceeded,
};

std::string_view to_string(StepPolicy p);
std::string_view to_string(FitStatus s);
/// Accepts "safe", "improved", "backtracking". Throws InvalidArgument otherwise.
StepPolicy parse_step_policy(std::string_view s);

struct DescentConfig {
    StepPolicy step_policy = StepPolicy::backtracking;
    double tol = 1e-9;  ///< stop when the Riemannian gradient norm drops below this
    int max_iters = 200;
    bool standardize = false;
    /// Divergence cap: condition number of T for Pos1 fits; for half-space
    /// fits the iterate may not leave the ball of radius log(cap) around the start.
    double condition_cap = 1e14;

    /// Throws InvalidArgument on tol <= 0 or max_iters < 1.
    void validate() const;
};

struct FitReport {
    FitStatus status = FitStatus::max_iters_exceeded;
    int iterations = 0;                 ///< number of steps taken
    std::vector<double> loss_trace;     ///< loss at each visited iterate (iterations + 1 entries)
    std::vector<double> grad_norm_trace;
    double wall_seconds = 0.0;

    double final_grad_norm() const { return grad_norm_trace.empty() ? NAN : grad_norm_trace.back(); }
    double final_loss() const { return loss_trace.empty() ? NAN : loss_trace.back(); }
};

/// Status to report when the iteration cap is reached: ill_conditioned when the
/// gradient norm decayed over the last 20 iterations at a geometric rate above 0.9.
FitStatus classify_unconverged(const std::vector<double>& grad_norms);

/// Step lengths handed to descend(): `safe` is never undercut by backtracking;
/// `trial` is the first attempt of the improved and backtracking policies.
struct StepSizes {
    double safe = 1.0;
    double trial = 1.0;
};

/// Geodesic gradient descent. `Problem` provides
///   std::pair<double, Tangent> loss_grad(const Point&)
///   double loss(const Point&)
///   double norm(const Point&, const Tangent&)
///   Point step(const Point&, const Tangent& grad, double s)  // moves along -grad
///   bool diverged(const Point&)
template <class Point, class Problem>
std::pair<Point, FitReport> descend(Point start, Problem& problem, StepSizes steps,
                                    const DescentConfig& config) {
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();
    FitReport report;
    Point x = std::move(start);

    for (int k = 0;; ++k) {
        auto [f, grad] = problem.loss_grad(x);
        const double g = problem.norm(x, grad);
        report.loss_trace.push_back(f);
        report.grad_norm_trace.push_back(g);
        if (!std::isfinite(f) || !std::isfinite(g)) {
            report.status = FitStatus::degenerate_data;
            break;
        }
        if (g < config.tol) {
            report.status = FitStatus::converged;
            break;
        }
        if (k == config.max_iters) {
            report.status = classify_unconverged(report.grad_norm_trace);
            break;
        }

        std::optional<Point> next;
        try {
            switch (config.step_policy) {
                case StepPolicy::safe:
                    next = problem.step(x, grad, steps.safe);
                    break;
                case StepPolicy::improved:
                    next = problem.step(x, grad, steps.trial);
                    break;
                case StepPolicy::backtracking:
                    for (double s = steps.trial;; s *= 0.5) {
                        if (s <= steps.safe) {
                            next = problem.step(x, grad, steps.safe);
                            break;
                        }
                        Point cand = problem.step(x, grad, s);
                        if (problem.loss(cand) < f) {
                            next = std::move(cand);
                            break;
                        }
                    }
                    break;
            }
        } catch (const NumericRangeError&) {
            report.status = FitStatus::degenerate_data;
            break;
        }
        x = std::move(*next);
        report.iterations = k + 1;
        if (problem.diverged(x)) {
            auto [fx, gx] = problem.loss_grad(x);
            report.loss_trace.push_back(fx);
            report.grad_norm_trace.push_back(problem.norm(x, gx));
            report.status = FitStatus::degenerate_data;
            break;
        }
    }
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(x), std::move(report)};
}

}  // namespace hyperfit
