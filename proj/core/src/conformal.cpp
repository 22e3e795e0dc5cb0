#include "hyperfit/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "hyperfit/errors.hpp"

namespace hyperfit {

namespace {

void require_data(std::span<const BoundaryPoint> data, Eigen::Index n) {
    if (data.empty()) {
        throw InvalidArgument("empty dataset");
    }
    for (const auto& x : data) {
        if (!x.is_infinity() && x.coords().size() != n) {
            throw DimensionError("observation dimension does not match the parameter");
        }
    }
}

double median(std::vector<double> v) {
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    double m = *mid;
    if (v.size() % 2 == 0) {
        m = 0.5 * (m + *std::max_element(v.begin(), mid));
    }
    return m;
}

struct HalfSpaceProblem {
    std::span<const BoundaryPoint> data;
    HalfSpacePoint origin;
    double radius;

    std::pair<double, HalfSpaceTangent> loss_grad(const HalfSpacePoint& z) const {
        return loss_and_grad_c(z, data);
    }
    double loss(const HalfSpacePoint& z) const { return loss_c(z, data); }
    double norm(const HalfSpacePoint& z, const HalfSpaceTangent& g) const { return hyperfit::norm(z, g); }
    HalfSpacePoint step(const HalfSpacePoint& z, const HalfSpaceTangent& g, double s) const {
        return exp_map(z, -g, s);
    }
    bool diverged(const HalfSpacePoint& z) const { return hdistance(z, origin) > radius; }
};

}  // namespace

std::pair<double, HalfSpaceTangent> loss_and_grad_c(const HalfSpacePoint& z,
                                                    std::span<const BoundaryPoint> data) {
    require_data(data, z.n());
    const auto n = static_cast<double>(z.n());
    double f = 0.0;
    HalfSpaceTangent g = HalfSpaceTangent::zero(z.n());
    for (const auto& x : data) {
        f += busemann(x, z);
        g += busemann_grad(x, z);
    }
    const double w = n / static_cast<double>(data.size());
    return {w * f, w * g};
}

double loss_c(const HalfSpacePoint& z, std::span<const BoundaryPoint> data) {
    require_data(data, z.n());
    double f = 0.0;
    for (const auto& x : data) {
        f += busemann(x, z);
    }
    return static_cast<double>(z.n()) * f / static_cast<double>(data.size());
}

HalfSpaceTangent grad_c(const HalfSpacePoint& z, std::span<const BoundaryPoint> data) {
    return loss_and_grad_c(z, data).second;
}

double step_size_c(int n, StepPolicy policy) {
    if (n < 1) {
        throw InvalidArgument("step_size_c: n must be >= 1");
    }
    const auto dn = static_cast<double>(n);
    return policy == StepPolicy::safe ? 1.0 / dn : (dn + 1.0) / (dn * dn);
}

bool conformal_well_posed(std::span<const BoundaryPoint> data) {
    if (data.size() < 2) {
        return false;
    }
    std::vector<const BoundaryPoint*> pts;
    pts.reserve(data.size());
    for (const auto& x : data) pts.push_back(&x);
    std::sort(pts.begin(), pts.end(), [](const BoundaryPoint* l, const BoundaryPoint* r) {
        if (l->is_infinity() != r->is_infinity()) return r->is_infinity();
        if (l->is_infinity()) return false;
        const auto& a = l->coords();
        const auto& b = r->coords();
        return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
    });
    // Multiplicities of the distinct points, largest first.
    std::vector<std::size_t> runs{1};
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (*pts[i] == *pts[i - 1]) {
            ++runs.back();
        } else {
            runs.push_back(1);
        }
    }
    std::sort(runs.rbegin(), runs.rend());
    const std::size_t n = data.size();
    if (2 * runs[0] < n) return true;
    // Two atoms of equal weight: the minimum is the whole geodesic joining them.
    return runs.size() == 2 && runs[0] == runs[1];
}

std::pair<HalfSpacePoint, FitReport> fit_c(std::span<const BoundaryPoint> data, int n,
                                           const DescentConfig& config) {
    config.validate();
    if (n < 1) {
        throw InvalidArgument("fit_c: n must be >= 1");
    }
    require_data(data, n);
    const HalfSpacePoint start(1.0, Eigen::VectorXd::Zero(n));
    const StepSizes steps{step_size_c(n, StepPolicy::safe), step_size_c(n, config.step_policy)};
    const double radius = std::log(config.condition_cap);

    if (!conformal_well_posed(data)) {
        const auto [f, g] = loss_and_grad_c(start, data);
        FitReport r;
        r.status = FitStatus::degenerate_data;
        r.loss_trace = {f};
        r.grad_norm_trace = {norm(start, g)};
        return {start, r};
    }

    if (!config.standardize) {
        HalfSpaceProblem problem{data, start, radius};
        return descend(start, problem, steps, config);
    }

    // Similarity x -> (x - c) / s with c the coordinate-wise median and s the
    // median distance to c; the optimum maps back by (a, b) -> (s a, s b + c).
    std::vector<Eigen::VectorXd> finite;
    for (const auto& x : data) {
        if (!x.is_infinity()) finite.push_back(x.coords());
    }
    Eigen::VectorXd center = Eigen::VectorXd::Zero(n);
    double scale = 1.0;
    if (!finite.empty()) {
        for (Eigen::Index j = 0; j < n; ++j) {
            std::vector<double> c;
            for (const auto& x : finite) c.push_back(x(j));
            center(j) = median(std::move(c));
        }
        std::vector<double> r;
        for (const auto& x : finite) r.push_back((x - center).norm());
        scale = median(std::move(r));
        if (!(scale > 0.0)) scale = 1.0;
    }
    std::vector<BoundaryPoint> moved;
    moved.reserve(data.size());
    for (const auto& x : data) {
        moved.push_back(x.is_infinity() ? x : BoundaryPoint::at((x.coords() - center) / scale));
    }
    HalfSpaceProblem problem{moved, start, radius};
    auto [z, report] = descend(start, problem, steps, config);
    return {HalfSpacePoint(scale * z.a, scale * z.b + center), std::move(report)};
}

}  // namespace hyperfit
