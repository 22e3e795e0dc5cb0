#include "hyperfit/cauchy.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hyperfit/conformal.hpp"
#include "hyperfit/errors.hpp"

namespace hyperfit {

namespace {

void require_nonempty(const LiftedData& data) {
    if (data.empty()) {
        throw InvalidArgument("empty dataset");
    }
}

void require_dim(const SpdPoint& t, const LiftedData& data) {
    if (t.dim() != data.dim()) {
        throw DimensionError("parameter is " + std::to_string(t.dim()) + "x" +
                             std::to_string(t.dim()) + " but data has lifted dimension " +
                             std::to_string(data.dim()));
    }
}

// x~_i^T T x~_i for every column.
Eigen::VectorXd quadratic_forms(const SpdPoint& t, const LiftedData& data) {
    const auto x = data.matrix();
    return (x.array() * (t.matrix() * x).array()).colwise().sum().transpose();
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

// Unit vector with positive first nonzero entry: canonical for a line.
Eigen::VectorXd projective_key(const Eigen::VectorXd& v) {
    Eigen::VectorXd k = v / v.norm();
    for (Eigen::Index i = 0; i < k.size(); ++i) {
        if (k(i) != 0.0) {
            if (k(i) < 0.0) k = -k;
            break;
        }
    }
    return k;
}

bool has_repeated_line(const LiftedData& data) {
    std::vector<Eigen::VectorXd> keys;
    keys.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        keys.push_back(projective_key(data.column(i)));
    }
    std::sort(keys.begin(), keys.end(), [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
    });
    for (std::size_t i = 1; i < keys.size(); ++i) {
        if ((keys[i] - keys[i - 1]).cwiseAbs().maxCoeff() < 1e-12) {
            return true;
        }
    }
    return false;
}

// Visits every k-subset of {0..n-1}; stops early when f returns false.
template <class F>
bool for_each_subset(std::size_t n, std::size_t k, F f) {
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
        if (!f(idx)) return false;
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
        if (i == 0) return true;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

struct Pos1Problem {
    const LiftedData& data;
    double condition_cap;

    std::pair<double, TangentSym> loss_grad(const SpdPoint& t) const { return loss_and_grad(t, data); }
    double loss(const SpdPoint& t) const { return hyperfit::loss(t, data); }
    double norm(const SpdPoint& t, const TangentSym& g) const { return hyperfit::norm(t, g); }
    SpdPoint step(const SpdPoint& t, const TangentSym& g, double s) const { return geodesic(t, -g, s); }
    bool diverged(const SpdPoint& t) const { return !(t.condition_number() <= condition_cap); }
};

FitReport degenerate_report(double f, double g) {
    FitReport r;
    r.status = FitStatus::degenerate_data;
    r.loss_trace = {f};
    r.grad_norm_trace = {g};
    return r;
}

}  // namespace

// ---------------------------------------------------------------- data

LiftedDatum LiftedDatum::from_point(const Eigen::VectorXd& x) {
    if (!x.allFinite()) {
        throw NumericRangeError("observation has non-finite coordinates");
    }
    Eigen::VectorXd v(x.size() + 1);
    v << x, 1.0;
    return LiftedDatum(std::move(v));
}

LiftedDatum LiftedDatum::from_vector(Eigen::VectorXd v) {
    if (v.size() < 2) {
        throw DimensionError("lifted datum needs at least two components");
    }
    if (!v.allFinite() || v.isZero(0.0)) {
        throw InvalidArgument("lifted datum must be finite and nonzero");
    }
    return LiftedDatum(std::move(v));
}

LiftedDatum LiftedDatum::at_infinity(const Eigen::VectorXd& direction) {
    Eigen::VectorXd v(direction.size() + 1);
    v << direction, 0.0;
    return from_vector(std::move(v));
}

LiftedDatum LiftedDatum::from_boundary(const BoundaryPoint& x) {
    if (x.is_infinity()) {
        return from_vector(Eigen::Vector2d(1.0, 0.0));
    }
    return from_point(x.coords());
}

LiftedData::LiftedData(Eigen::Index n) : dim_(n + 1) {
    if (n < 1) {
        throw DimensionError("data dimension must be >= 1");
    }
}

LiftedData LiftedData::from_points(const Eigen::MatrixXd& points) {
    LiftedData d(points.cols());
    if (!points.allFinite()) {
        throw NumericRangeError("observations must be finite");
    }
    d.cols_.resize(d.dim_, points.rows());
    d.cols_.topRows(points.cols()) = points.transpose();
    d.cols_.row(points.cols()).setOnes();
    d.count_ = static_cast<std::size_t>(points.rows());
    return d;
}

LiftedData LiftedData::from_boundary(std::span<const BoundaryPoint> xs) {
    if (xs.empty()) {
        throw InvalidArgument("empty dataset");
    }
    Eigen::Index n = 1;
    for (const auto& x : xs) {
        if (!x.is_infinity()) {
            n = x.coords().size();
            break;
        }
    }
    LiftedData d(n);
    d.reserve(xs.size());
    for (const auto& x : xs) {
        if (x.is_infinity()) {
            if (n != 1) {
                throw InvalidArgument("the point inf is only meaningful for univariate data");
            }
            d.push_back(LiftedDatum::at_infinity(Eigen::VectorXd::Ones(1)));
        } else {
            d.push_back(LiftedDatum::from_point(x.coords()));
        }
    }
    return d;
}

void LiftedData::push_back(const LiftedDatum& x) {
    if (x.vector().size() != dim_) {
        throw DimensionError("datum of lifted dimension " + std::to_string(x.vector().size()) +
                             " added to data of lifted dimension " + std::to_string(dim_));
    }
    const auto need = static_cast<Eigen::Index>(count_ + 1);
    if (cols_.cols() < need) {
        cols_.conservativeResize(dim_, std::max<Eigen::Index>(need, 2 * cols_.cols()));
    }
    cols_.col(static_cast<Eigen::Index>(count_)) = x.vector();
    ++count_;
}

void LiftedData::reserve(std::size_t count) {
    if (static_cast<Eigen::Index>(count) > cols_.cols()) {
        cols_.conservativeResize(dim_, static_cast<Eigen::Index>(count));
    }
}

LiftedData LiftedData::transformed(const Eigen::MatrixXd& a) const {
    if (a.rows() != dim_ || a.cols() != dim_) {
        throw DimensionError("transform size does not match lifted dimension");
    }
    LiftedData out(n());
    out.cols_ = a * matrix();
    out.count_ = count_;
    return out;
}

// ---------------------------------------------------------------- parameters

CauchyParams to_params(const SpdPoint& t) {
    const Eigen::Index n = t.dim() - 1;
    const Eigen::MatrixXd& m = t.matrix();
    const Eigen::MatrixXd a = m.topLeftCorner(n, n);
    const Eigen::VectorXd c = m.topRightCorner(n, 1);
    const double d = m(n, n);
    const Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) {
        throw NumericRangeError("to_params: leading block is not positive definite");
    }
    CauchyParams p;
    p.location = -llt.solve(c);
    const double k = d - p.location.dot(a * p.location);
    if (!(k > 0.0)) {
        throw NumericRangeError("to_params: numerically singular parameter");
    }
    Eigen::MatrixXd s = k * llt.solve(Eigen::MatrixXd::Identity(n, n));
    p.scatter = 0.5 * (s + s.transpose());
    p.convention = ScatterConvention::unit_det_lift;
    return p;
}

SpdPoint from_params(const CauchyParams& p) {
    const Eigen::Index n = p.location.size();
    if (p.scatter.rows() != n || p.scatter.cols() != n || n < 1) {
        throw DimensionError("from_params: scatter must be n x n for an n-vector location");
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(p.scatter);
    if (llt.info() != Eigen::Success) {
        throw NumericRangeError("from_params: scatter is not positive definite");
    }
    const Eigen::MatrixXd a = llt.solve(Eigen::MatrixXd::Identity(n, n));
    const Eigen::VectorXd ab = a * p.location;
    Eigen::MatrixXd t(n + 1, n + 1);
    t.topLeftCorner(n, n) = 0.5 * (a + a.transpose());
    t.topRightCorner(n, 1) = -ab;
    t.bottomLeftCorner(1, n) = -ab.transpose();
    t(n, n) = 1.0 + p.location.dot(ab);
    return SpdPoint::from_matrix(t);
}

CauchyParams rescaled(CauchyParams p, double target_det) {
    if (!(target_det > 0.0)) {
        throw InvalidArgument("target determinant must be positive");
    }
    const auto n = static_cast<double>(p.scatter.rows());
    const Eigen::LLT<Eigen::MatrixXd> llt(p.scatter);
    const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    p.scatter *= std::exp((std::log(target_det) - log_det) / n);
    p.convention = ScatterConvention::rescaled;
    return p;
}

UnivariateEstimate to_univariate(const SpdPoint& t) {
    if (t.dim() != 2) {
        throw DimensionError("to_univariate requires a 2x2 parameter");
    }
    const CauchyParams p = to_params(t);
    return {p.location(0), std::sqrt(p.scatter(0, 0))};
}

SpdPoint from_univariate(const UnivariateEstimate& e) {
    if (!(e.v > 0.0)) {
        throw NumericRangeError("univariate scale must be positive");
    }
    Eigen::Matrix2d t;
    t << 1.0, -e.u, -e.u, e.u * e.u + e.v * e.v;
    return SpdPoint::from_matrix(t / e.v);
}

// ---------------------------------------------------------------- loss

double loss(const SpdPoint& t, const LiftedData& data) {
    require_nonempty(data);
    require_dim(t, data);
    return quadratic_forms(t, data).array().log().mean();
}

std::pair<double, TangentSym> loss_and_grad(const SpdPoint& t, const LiftedData& data) {
    require_nonempty(data);
    require_dim(t, data);
    const Eigen::VectorXd q = quadratic_forms(t, data);
    const auto x = data.matrix();
    const double inv_n = 1.0 / static_cast<double>(data.size());
    const Eigen::MatrixXd s = inv_n * (x * q.cwiseInverse().asDiagonal() * x.transpose());
    const Eigen::MatrixXd& tm = t.matrix();
    const Eigen::MatrixXd g = tm * s * tm - tm / static_cast<double>(t.dim());
    return {q.array().log().mean(), TangentSym(g)};
}

TangentSym loss_grad(const SpdPoint& t, const LiftedData& data) { return loss_and_grad(t, data).second; }

TangentSym datum_grad(const SpdPoint& t, const LiftedDatum& x) {
    if (x.vector().size() != t.dim()) {
        throw DimensionError("datum_grad: dimension mismatch");
    }
    const Eigen::VectorXd tx = t.matrix() * x.vector();
    const double q = x.vector().dot(tx);
    return TangentSym(tx * tx.transpose() / q - t.matrix() / static_cast<double>(t.dim()));
}

double step_size(int n, StepPolicy policy) {
    if (n < 1) {
        throw InvalidArgument("step_size: n must be >= 1");
    }
    return policy == StepPolicy::safe ? 1.0 : (n + 3) / 2.0;
}

// ---------------------------------------------------------------- existence

bool check_general_position(const LiftedData& data, int n, std::size_t exact_cap) {
    if (n < 1 || data.n() != n) {
        throw DimensionError("check_general_position: data dimension does not match n");
    }
    const auto p = static_cast<std::size_t>(n + 1);
    if (data.size() < p + 1) {
        return false;
    }
    if (data.size() <= exact_cap) {
        Eigen::MatrixXd unit = data.matrix();
        unit.colwise().normalize();
        return for_each_subset(data.size(), p, [&](const std::vector<std::size_t>& idx) {
            Eigen::MatrixXd m(p, p);
            for (std::size_t j = 0; j < p; ++j) {
                m.col(static_cast<Eigen::Index>(j)) = unit.col(static_cast<Eigen::Index>(idx[j]));
            }
            return std::abs(m.determinant()) > 1e-12;
        });
    }
    if (has_repeated_line(data)) {
        return false;
    }
    Eigen::MatrixXd unit = data.matrix();
    unit.colwise().normalize();
    const Eigen::MatrixXd gram = unit * unit.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() > 1e-12 * es.eigenvalues().maxCoeff();
}

// ---------------------------------------------------------------- fitting

Eigen::MatrixXd standardizing_transform(const LiftedData& data) {
    const Eigen::Index n = data.n();
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n + 1, n + 1);
    const auto x = data.matrix();
    for (Eigen::Index j = 0; j < n; ++j) {
        std::vector<double> coord;
        coord.reserve(data.size());
        for (Eigen::Index i = 0; i < x.cols(); ++i) {
            if (x(n, i) != 0.0) coord.push_back(x(j, i) / x(n, i));
        }
        if (coord.empty()) continue;
        const double med = median(coord);
        for (double& c : coord) c = std::abs(c - med);
        double mad = median(coord);
        if (!(mad > 0.0)) mad = 1.0;
        a(j, j) = 1.0 / mad;
        a(j, n) = -med / mad;
    }
    return a;
}

std::pair<SpdPoint, FitReport> fit(const LiftedData& data, const DescentConfig& config) {
    config.validate();
    require_nonempty(data);
    const int n = static_cast<int>(data.n());
    const SpdPoint start = SpdPoint::identity(data.dim());

    if (!check_general_position(data, n)) {
        const auto [f, g] = loss_and_grad(start, data);
        return {start, degenerate_report(f, norm(start, g))};
    }

    const StepSizes steps{step_size(n, StepPolicy::safe), step_size(n, config.step_policy)};
    if (config.standardize) {
        // Fit A x~ and pull back: loss(A^T T A, x~) = loss(T, A x~).
        const Eigen::MatrixXd a = standardizing_transform(data);
        const LiftedData moved = data.transformed(a);
        Pos1Problem problem{moved, config.condition_cap};
        auto [t, report] = descend(start, problem, steps, config);
        return {congruence(t, a), std::move(report)};
    }
    Pos1Problem problem{data, config.condition_cap};
    return descend(start, problem, steps, config);
}

std::pair<UnivariateEstimate, FitReport> fit_univariate(std::span<const BoundaryPoint> data,
                                                        const DescentConfig& config) {
    config.validate();
    if (data.empty()) {
        throw InvalidArgument("empty dataset");
    }
    for (const auto& x : data) {
        if (!x.is_infinity() && x.coords().size() != 1) {
            throw DimensionError("fit_univariate expects scalar observations");
        }
    }
    auto [z, report] = fit_c(data, 1, config);
    return {UnivariateEstimate{z.b(0), z.a}, std::move(report)};
}

}  // namespace hyperfit
