#pragma once

// Synthetic data generators for experiments and Monte Carlo runs.
//
// Text form accepted by parse_generator():
//   N(mu, var)              univariate normal (variance, not sd)
//   N([mu..], [[cov..]..])  multivariate normal; a scalar cov means cov * I
//   C(u, v)                 univariate Cauchy with location u and scale v
//   C([b..], [[S..]..])     multivariate Cauchy with scatter S
//   M(rows, cols)           standard matrix-variate Cauchy (T = I)
//   w1*D1 + w2*D2 + ...     mixture of N and C terms; weights sum to 1
// e.g. "0.9*N(0,1)+0.1*N(100,10000)".

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hyperfit/io/dataset.hpp"

namespace hyperfit::io {

struct GaussianComponent {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;

    const Eigen::VectorXd& location_or_mean() const { return mean; }
    const Eigen::MatrixXd& shape() const { return cov; }
};

/// location + L z / |w| with L L^T = scatter; univariate: u + v tan(pi (U - 1/2)), v^2 = scatter.
struct CauchyComponent {
    Eigen::VectorXd location;
    Eigen::MatrixXd scatter;

    const Eigen::VectorXd& location_or_mean() const { return location; }
    const Eigen::MatrixXd& shape() const { return scatter; }
};

using Component = std::variant<GaussianComponent, CauchyComponent>;

enum class GeneratorKind { gaussian, cauchy1d, mixture, gaussian_nd, matrix_standard };

struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::gaussian;
    std::vector<double> weights;        ///< one per component
    std::vector<Component> components;  ///< empty for matrix_standard
    int rows = 0;                       ///< matrix_standard: n
    int cols = 0;                       ///< matrix_standard: m
    std::size_t sample_size = 1000;
    std::uint64_t seed = 0;

    /// Dimension of a vector observation (0 for matrix_standard).
    int dim() const;
    /// Throws InvalidArgument: weights must sum to 1, covariances must be SPD.
    void validate() const;
};

GeneratorSpec parse_generator(std::string_view text, std::size_t sample_size, std::uint64_t seed);

using Sample = std::variant<PointData, MatrixData>;

/// Deterministic in (spec, seed). When `labels` is given it receives the
/// mixture component index of every observation.
Sample generate(const GeneratorSpec& spec, std::vector<int>* labels = nullptr);

}  // namespace hyperfit::io
