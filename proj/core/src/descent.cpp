#include "hyperfit/descent.hpp"

#include <string>

namespace hyperfit {

std::string_view to_string(StepPolicy p) {
    switch (p) {
        case StepPolicy::safe: return "safe";
        case StepPolicy::improved: return "improved";
        case StepPolicy::backtracking: return "backtracking";
    }
    return "unknown";
}

std::string_view to_string(FitStatus s) {
    switch (s) {
        case FitStatus::converged: return "converged";
        case FitStatus::ill_conditioned: return "ill_conditioned";
        case FitStatus::degenerate_data: return "degenerate_data";
        case FitStatus::max_iters_exceeded: return "max_iters_exceeded";
    }
    return "unknown";
}

StepPolicy parse_step_policy(std::string_view s) {
    if (s == "safe") return StepPolicy::safe;
    if (s == "improved") return StepPolicy::improved;
    if (s == "backtracking") return StepPolicy::backtracking;
    throw InvalidArgument("unknown step policy '" + std::string(s) + "'");
}

void DescentConfig::validate() const {
    if (!(tol > 0.0)) {
        throw InvalidArgument("tol must be positive");
    }
    if (max_iters < 1) {
        throw InvalidArgument("max_iters must be >= 1");
    }
    if (!(condition_cap > 1.0)) {
        throw InvalidArgument("condition_cap must exceed 1");
    }
}

FitStatus classify_unconverged(const std::vector<double>& grad_norms) {
    constexpr std::size_t window = 20;
    if (grad_norms.size() <= window) {
        return FitStatus::max_iters_exceeded;
    }
    const double last = grad_norms.back();
    const double first = grad_norms[grad_norms.size() - 1 - window];
    if (!(first > 0.0)) {
        return FitStatus::max_iters_exceeded;
    }
    const double rate = std::pow(last / first, 1.0 / static_cast<double>(window));
    return rate > 0.9 ? FitStatus::ill_conditioned : FitStatus::max_iters_exceeded;
}

}  // namespace hyperfit
