#include "hyperfit/io/check_grad.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "hyperfit/cauchy.hpp"
#include "hyperfit/conformal.hpp"
#include "hyperfit/errors.hpp"
#include "hyperfit/matrix_family.hpp"
#include "hyperfit/random.hpp"

namespace hyperfit::io {

namespace {

constexpr double kStep = 1e-5;

Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
        for (Eigen::Index i = 0; i < r; ++i) m(i, j) = standard_normal(rng);
    return m;
}

SpdPoint random_spd(Eigen::Index p, std::mt19937_64& rng) {
    const SpdPoint id = SpdPoint::identity(p);
    const TangentSym v = project_tangent(id, random_matrix(p, p, rng));
    return geodesic(id, v, 0.5);
}

double rel_error(double analytic, double numeric) {
    const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-12});
    return std::abs(analytic - numeric) / scale;
}

template <class Loss>
double spd_trial(Eigen::Index p, const TangentSym& grad, const SpdPoint& t, Loss loss, std::mt19937_64& rng) {
    const TangentSym v = project_tangent(t, random_matrix(p, p, rng));
    const double numeric = (loss(geodesic(t, v, kStep)) - loss(geodesic(t, v, -kStep))) / (2.0 * kStep);
    return rel_error(inner(t, grad, v), numeric);
}

}  // namespace

std::string_view to_string(Family f) {
    switch (f) {
        case Family::cauchy: return "cauchy";
        case Family::conformal: return "conformal";
        case Family::matrix: return "matrix";
    }
    return "unknown";
}

Family parse_family(std::string_view s) {
    if (s == "cauchy") return Family::cauchy;
    if (s == "conformal") return Family::conformal;
    if (s == "matrix") return Family::matrix;
    throw InvalidArgument("unknown family '" + std::string(s) + "'");
}

GradCheckResult check_grad(Family family, int n, int m, int trials, std::uint64_t seed) {
    if (n < 1 || m < 1 || trials < 1) {
        throw InvalidArgument("check_grad: n, m and trials must be >= 1");
    }
    GradCheckResult res{family, n, family == Family::matrix ? m : 1, trials, 0.0, 1e-5};
    std::mt19937_64 rng(seed);
    constexpr int kData = 7;

    for (int trial = 0; trial < trials; ++trial) {
        double err = 0.0;
        switch (family) {
            case Family::cauchy: {
                const SpdPoint t = random_spd(n + 1, rng);
                LiftedData data(n);
                for (int i = 0; i < kData; ++i) {
                    data.push_back(LiftedDatum::from_point(2.0 * random_matrix(n, 1, rng).col(0)));
                }
                err = spd_trial(n + 1, loss_grad(t, data), t, [&](const SpdPoint& s) { return loss(s, data); }, rng);
                break;
            }
            case Family::matrix: {
                const SpdPoint t = random_spd(n + m, rng);
                std::vector<MatrixDatum> data;
                for (int i = 0; i < kData; ++i) {
                    data.push_back(MatrixDatum::from_matrix(2.0 * random_matrix(n, m, rng)));
                }
                err = spd_trial(n + m, grad_m(t, data), t, [&](const SpdPoint& s) { return loss_m(s, data); }, rng);
                break;
            }
            case Family::conformal: {
                const HalfSpacePoint z(std::exp(0.5 * standard_normal(rng)), random_matrix(n, 1, rng).col(0));
                std::vector<BoundaryPoint> data;
                for (int i = 0; i < kData; ++i) {
                    data.push_back(BoundaryPoint::at(Eigen::VectorXd(2.0 * random_matrix(n, 1, rng).col(0))));
                }
                const HalfSpaceTangent v{z.a * standard_normal(rng), z.a * random_matrix(n, 1, rng).col(0)};
                const double numeric =
                    (loss_c(exp_map(z, v, kStep), data) - loss_c(exp_map(z, v, -kStep), data)) / (2.0 * kStep);
                err = rel_error(inner(z, grad_c(z, data), v), numeric);
                break;
            }
        }
        res.max_rel_error = std::max(res.max_rel_error, err);
    }
    return res;
}

}  // namespace hyperfit::io
