#pragma once

// Headerless CSV datasets, one observation per row.

#include <Eigen/Core>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "hyperfit/halfspace.hpp"

namespace hyperfit::io {

/// Scalars; the token `inf` (any case, optional sign) is the point at infinity.
struct UnivariateData {
    std::vector<BoundaryPoint> values;
};

/// N x n observations in R^n.
struct PointData {
    Eigen::MatrixXd rows;
};

/// n x m observations, each stored row-major on one CSV line.
struct MatrixData {
    int rows = 0;  ///< n
    int cols = 0;  ///< m
    std::vector<Eigen::MatrixXd> values;
};

/// Two columns: time, observation.
struct RegressionData {
    std::vector<double> times;
    std::vector<double> values;
};

UnivariateData parse_univariate(std::istream& in);
/// Arity taken from the first row unless `n` is given.
PointData parse_points(std::istream& in, std::optional<int> n = std::nullopt);
MatrixData parse_matrices(std::istream& in, int rows, int cols);
RegressionData parse_regression(std::istream& in);

/// Opens `path`, or reads standard input for "-". Throws ParseError if unreadable.
template <class F>
auto with_input(const std::filesystem::path& path, F f);

void write_csv(std::ostream& out, const UnivariateData& d);
void write_csv(std::ostream& out, const PointData& d);
void write_csv(std::ostream& out, const MatrixData& d);
void write_csv(std::ostream& out, const RegressionData& d);

/// Shortest decimal text that parses back to exactly `x`.
std::string format_double(double x);

}  // namespace hyperfit::io

#include <fstream>
#include <iostream>

#include "hyperfit/errors.hpp"

template <class F>
auto hyperfit::io::with_input(const std::filesystem::path& path, F f) {
    if (path == "-") {
        return f(std::cin);
    }
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open '" + path.string() + "'", 0);
    }
    return f(in);
}
