#include "hyperfit/spd.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

#include "hyperfit/errors.hpp"

namespace hyperfit {

namespace {

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* where) {
    if (a != b) {
        throw DimensionError(std::string(where) + ": dimension mismatch (" + std::to_string(a) +
                             " vs " + std::to_string(b) + ")");
    }
}

Eigen::LLT<Eigen::MatrixXd> cholesky(const Eigen::MatrixXd& m) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) {
        throw NumericRangeError("matrix is not positive definite");
    }
    return llt;
}

// L^-1 v L^-T for t = L L^T.
Eigen::MatrixXd whiten(const Eigen::LLT<Eigen::MatrixXd>& llt, const Eigen::MatrixXd& v) {
    const auto l = llt.matrixL();
    Eigen::MatrixXd w = l.solve(v);
    w = l.solve(w.transpose()).transpose();
    return 0.5 * (w + w.transpose());
}

// f applied to the eigenvalues of a symmetric matrix.
template <class F>
Eigen::MatrixXd sym_function(const Eigen::MatrixXd& w, F f) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w);
    if (es.info() != Eigen::Success) {
        throw NumericRangeError("symmetric eigendecomposition failed");
    }
    const Eigen::VectorXd fl = es.eigenvalues().unaryExpr(f);
    return es.eigenvectors() * fl.asDiagonal() * es.eigenvectors().transpose();
}

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

// Divides an SPD matrix by det^(1/p); log-det from the Cholesky factor.
Eigen::MatrixXd unit_det(const Eigen::MatrixXd& m) {
    const auto llt = cholesky(m);
    const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    return m * std::exp(-log_det / static_cast<double>(m.rows()));
}

}  // namespace

SpdPoint SpdPoint::identity(Eigen::Index p) {
    if (p < 2) {
        throw InvalidArgument("SpdPoint dimension must be >= 2");
    }
    return SpdPoint(Eigen::MatrixXd::Identity(p, p));
}

SpdPoint SpdPoint::from_matrix(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols() || m.rows() < 2) {
        throw DimensionError("SpdPoint requires a square matrix of size >= 2");
    }
    if (!m.allFinite()) {
        throw NumericRangeError("SpdPoint entries must be finite");
    }
    const double scale = m.cwiseAbs().maxCoeff();
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw NumericRangeError("SpdPoint matrix is not symmetric");
    }
    return SpdPoint(unit_det(symmetrize(m)));
}

Eigen::MatrixXd SpdPoint::inverse() const {
    const auto llt = cholesky(m_);
    return symmetrize(llt.solve(Eigen::MatrixXd::Identity(dim(), dim())));
}

double SpdPoint::condition_number() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m_, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return ev.maxCoeff() / ev.minCoeff();
}

TangentSym::TangentSym(const Eigen::MatrixXd& v) : v_(symmetrize(v)) {
    if (v.rows() != v.cols()) {
        throw DimensionError("TangentSym requires a square matrix");
    }
}

TangentSym operator+(const TangentSym& a, const TangentSym& b) {
    require_same_dim(a.dim(), b.dim(), "TangentSym +");
    return TangentSym(a.v_ + b.v_);
}

TangentSym operator-(const TangentSym& a, const TangentSym& b) {
    require_same_dim(a.dim(), b.dim(), "TangentSym -");
    return TangentSym(a.v_ - b.v_);
}

double inner(const SpdPoint& t, const TangentSym& v, const TangentSym& w) {
    require_same_dim(t.dim(), v.dim(), "inner");
    require_same_dim(t.dim(), w.dim(), "inner");
    const auto llt = cholesky(t.matrix());
    return (whiten(llt, v.matrix()).array() * whiten(llt, w.matrix()).array()).sum();
}

double norm(const SpdPoint& t, const TangentSym& v) {
    require_same_dim(t.dim(), v.dim(), "norm");
    const auto llt = cholesky(t.matrix());
    return whiten(llt, v.matrix()).norm();
}

SpdPoint geodesic(const SpdPoint& t, const TangentSym& v, double s) {
    require_same_dim(t.dim(), v.dim(), "geodesic");
    if (s == 0.0) {
        return t;
    }
    const auto llt = cholesky(t.matrix());
    const Eigen::MatrixXd w = whiten(llt, v.matrix());
    const Eigen::MatrixXd e = sym_function(w, [s](double x) { return std::exp(s * x); });
    const Eigen::MatrixXd l = llt.matrixL();
    const Eigen::MatrixXd out = symmetrize(l * e * l.transpose());
    if (!out.allFinite()) {
        throw NumericRangeError("geodesic: result overflowed");
    }
    try {
        return SpdPoint::from_matrix(out);
    } catch (const NumericRangeError&) {
        throw NumericRangeError("geodesic: result left the SPD cone numerically");
    }
}

TangentSym log_map(const SpdPoint& from, const SpdPoint& to) {
    require_same_dim(from.dim(), to.dim(), "log_map");
    const auto llt = cholesky(from.matrix());
    const Eigen::MatrixXd w = whiten(llt, to.matrix());
    const Eigen::MatrixXd lw = sym_function(w, [](double x) { return std::log(x); });
    const Eigen::MatrixXd l = llt.matrixL();
    return project_tangent(from, l * lw * l.transpose());
}

double distance(const SpdPoint& a, const SpdPoint& b) {
    require_same_dim(a.dim(), b.dim(), "distance");
    const auto llt = cholesky(a.matrix());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(whiten(llt, b.matrix()),
                                                      Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw NumericRangeError("distance: eigendecomposition failed");
    }
    return es.eigenvalues().array().log().matrix().norm();
}

TangentSym project_tangent(const SpdPoint& t, const Eigen::MatrixXd& m) {
    require_same_dim(t.dim(), m.rows(), "project_tangent");
    require_same_dim(m.rows(), m.cols(), "project_tangent");
    const Eigen::MatrixXd sm = symmetrize(m);
    const auto llt = cholesky(t.matrix());
    const double tr = llt.solve(sm).trace();
    return TangentSym(sm - (tr / static_cast<double>(t.dim())) * t.matrix());
}

SpdPoint congruence(const SpdPoint& t, const Eigen::MatrixXd& a) {
    require_same_dim(t.dim(), a.rows(), "congruence");
    require_same_dim(a.rows(), a.cols(), "congruence");
    return SpdPoint::from_matrix(symmetrize(a.transpose() * t.matrix() * a));
}

}  // namespace hyperfit
