#include "hyperfit/matrix_family.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <cmath>
#include <string>

#include "hyperfit/errors.hpp"
#include "hyperfit/random.hpp"

namespace hyperfit {

namespace {

void require_data(const SpdPoint& t, std::span<const MatrixDatum> data) {
    if (data.empty()) {
        throw InvalidArgument("empty dataset");
    }
    const Eigen::Index m = data.front().cols();
    for (const auto& x : data) {
        if (x.frame().rows() != t.dim() || x.cols() != m) {
            throw DimensionError("matrix datum shape does not match the parameter");
        }
    }
}

Eigen::LLT<Eigen::MatrixXd> gram(const SpdPoint& t, const MatrixDatum& x) {
    Eigen::LLT<Eigen::MatrixXd> llt(x.frame().transpose() * t.matrix() * x.frame());
    if (llt.info() != Eigen::Success) {
        throw NumericRangeError("X~^T T X~ is not positive definite");
    }
    return llt;
}

double log_det(const Eigen::LLT<Eigen::MatrixXd>& llt) {
    return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

struct MatrixProblem {
    std::span<const MatrixDatum> data;
    double condition_cap;

    std::pair<double, TangentSym> loss_grad(const SpdPoint& t) const { return loss_and_grad_m(t, data); }
    double loss(const SpdPoint& t) const { return loss_m(t, data); }
    double norm(const SpdPoint& t, const TangentSym& g) const { return hyperfit::norm(t, g); }
    SpdPoint step(const SpdPoint& t, const TangentSym& g, double s) const { return geodesic(t, -g, s); }
    bool diverged(const SpdPoint& t) const { return !(t.condition_number() <= condition_cap); }
};

}  // namespace

MatrixDatum MatrixDatum::from_matrix(const Eigen::MatrixXd& x) {
    if (x.rows() < 1 || x.cols() < 1) {
        throw DimensionError("matrix observation must be at least 1 x 1");
    }
    if (!x.allFinite()) {
        throw NumericRangeError("matrix observation has non-finite entries");
    }
    Eigen::MatrixXd f(x.rows() + x.cols(), x.cols());
    f << x, Eigen::MatrixXd::Identity(x.cols(), x.cols());
    return MatrixDatum(std::move(f));
}

MatrixDatum MatrixDatum::from_frame(Eigen::MatrixXd frame) {
    if (frame.cols() < 1 || frame.rows() <= frame.cols()) {
        throw DimensionError("frame must be (m+n) x m with m, n >= 1");
    }
    if (!frame.allFinite()) {
        throw NumericRangeError("frame has non-finite entries");
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(frame);
    if (lu.rank() < frame.cols()) {
        throw NumericRangeError("frame is not of full column rank");
    }
    return MatrixDatum(std::move(frame));
}

std::pair<double, TangentSym> loss_and_grad_m(const SpdPoint& t, std::span<const MatrixDatum> data) {
    require_data(t, data);
    const Eigen::Index p = t.dim();
    const Eigen::Index m = data.front().cols();
    double f = 0.0;
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(p, p);
    for (const auto& x : data) {
        const auto llt = gram(t, x);
        f += log_det(llt);
        acc += x.frame() * llt.solve(x.frame().transpose());
    }
    const double inv_n = 1.0 / static_cast<double>(data.size());
    const Eigen::MatrixXd& tm = t.matrix();
    const Eigen::MatrixXd g = inv_n * (tm * acc * tm) -
                              (static_cast<double>(m) / static_cast<double>(p)) * tm;
    return {inv_n * f, TangentSym(g)};
}

double loss_m(const SpdPoint& t, std::span<const MatrixDatum> data) {
    require_data(t, data);
    double f = 0.0;
    for (const auto& x : data) {
        f += log_det(gram(t, x));
    }
    return f / static_cast<double>(data.size());
}

TangentSym grad_m(const SpdPoint& t, std::span<const MatrixDatum> data) {
    return loss_and_grad_m(t, data).second;
}

TangentSym datum_grad_m(const SpdPoint& t, const MatrixDatum& x) {
    return loss_and_grad_m(t, std::span<const MatrixDatum>(&x, 1)).second;
}

double step_size_m(int m, int n, StepPolicy policy) {
    if (m < 1 || n < 1) {
        throw InvalidArgument("step_size_m: m and n must be >= 1");
    }
    if (policy == StepPolicy::safe) {
        return 1.0;
    }
    const double p = m + n;
    return (p * (p + 1.0) - 2.0) / (2.0 * m * n);
}

std::pair<SpdPoint, FitReport> fit_m(std::span<const MatrixDatum> data, int m, int n,
                                     const DescentConfig& config) {
    config.validate();
    if (m < 1 || n < 1) {
        throw InvalidArgument("fit_m: m and n must be >= 1");
    }
    const SpdPoint start = SpdPoint::identity(m + n);
    require_data(start, data);
    if (data.front().cols() != m) {
        throw DimensionError("fit_m: data have " + std::to_string(data.front().cols()) +
                             " columns, expected " + std::to_string(m));
    }
    const StepSizes steps{step_size_m(m, n, StepPolicy::safe), step_size_m(m, n, config.step_policy)};
    MatrixProblem problem{data, config.condition_cap};
    return descend(start, problem, steps, config);
}

Eigen::MatrixXd sample_standard_matrix(int m, int n, std::mt19937_64& rng) {
    if (m < 1 || n < 1) {
        throw InvalidArgument("sample_standard_matrix: m and n must be >= 1");
    }
    while (true) {
        Eigen::MatrixXd z(m + n, m);
        for (Eigen::Index j = 0; j < z.cols(); ++j) {
            for (Eigen::Index i = 0; i < z.rows(); ++i) {
                z(i, j) = standard_normal(rng);
            }
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(z.bottomRows(m));
        if (lu.isInvertible()) {
            return z.topRows(n) * lu.inverse();
        }
    }
}

MatrixParams to_matrix_params(const SpdPoint& t, int n) {
    const Eigen::MatrixXd& m = t.matrix();
    const Eigen::Index k = m.rows() - n;
    if (n < 1 || k < 1) {
        throw DimensionError("to_matrix_params: need 1 <= n < dim(T)");
    }
    const Eigen::LLT<Eigen::MatrixXd> a(m.topLeftCorner(n, n));
    MatrixParams p;
    p.location = -a.solve(m.topRightCorner(n, k));
    p.row_scatter = a.solve(Eigen::MatrixXd::Identity(n, n));
    p.col_scatter = m.bottomRightCorner(k, k) - p.location.transpose() * m.topLeftCorner(n, n) * p.location;
    return p;
}

}  // namespace hyperfit
