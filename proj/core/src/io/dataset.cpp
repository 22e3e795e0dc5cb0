#include "hyperfit/io/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "hyperfit/errors.hpp"

namespace hyperfit::io {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool is_inf_token(std::string_view s) {
    if (!s.empty() && (s.front() == '+' || s.front() == '-')) s.remove_prefix(1);
    std::string lower(s);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return lower == "inf" || lower == "infinity";
}

double parse_number(std::string_view tok, std::size_t line) {
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty()) {
        throw ParseError("malformed number '" + std::string(tok) + "'", line);
    }
    if (!std::isfinite(v)) {
        throw ParseError("non-finite value '" + std::string(tok) + "' is not allowed here", line);
    }
    return v;
}

// Calls f(fields, line_number) for every non-blank, non-comment line.
template <class F>
void for_each_row(std::istream& in, F f) {
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::string_view> fields;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        fields.clear();
        std::size_t start = 0;
        while (true) {
            const auto comma = body.find(',', start);
            fields.push_back(trim(body.substr(start, comma == std::string_view::npos ? comma : comma - start)));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        f(fields, lineno);
    }
}

void require_arity(const std::vector<std::string_view>& fields, std::size_t want, std::size_t line) {
    if (fields.size() != want) {
        throw ParseError("expected " + std::to_string(want) + " fields, found " + std::to_string(fields.size()), line);
    }
}

std::string join(const double* xs, std::size_t n) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) {
        if (i) s += ',';
        s += format_double(xs[i]);
    }
    return s;
}

}  // namespace

std::string format_double(double x) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

UnivariateData parse_univariate(std::istream& in) {
    UnivariateData d;
    for_each_row(in, [&](const std::vector<std::string_view>& f, std::size_t line) {
        require_arity(f, 1, line);
        if (is_inf_token(f[0])) {
            d.values.push_back(BoundaryPoint::infinity());
        } else {
            d.values.push_back(BoundaryPoint::at(parse_number(f[0], line)));
        }
    });
    return d;
}

PointData parse_points(std::istream& in, std::optional<int> n) {
    std::vector<double> flat;
    std::size_t arity = n ? static_cast<std::size_t>(*n) : 0;
    std::size_t count = 0;
    for_each_row(in, [&](const std::vector<std::string_view>& f, std::size_t line) {
        if (arity == 0) arity = f.size();
        require_arity(f, arity, line);
        for (auto tok : f) {
            if (is_inf_token(tok)) {
                throw ParseError("'inf' is only accepted for univariate data", line);
            }
            flat.push_back(parse_number(tok, line));
        }
        ++count;
    });
    PointData d;
    d.rows.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(arity));
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = 0; j < arity; ++j) {
            d.rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = flat[i * arity + j];
        }
    }
    return d;
}

MatrixData parse_matrices(std::istream& in, int rows, int cols) {
    if (rows < 1 || cols < 1) {
        throw InvalidArgument("matrix rows and cols must be >= 1");
    }
    MatrixData d{rows, cols, {}};
    const auto want = static_cast<std::size_t>(rows * cols);
    for_each_row(in, [&](const std::vector<std::string_view>& f, std::size_t line) {
        require_arity(f, want, line);
        Eigen::MatrixXd x(rows, cols);
        for (int i = 0; i < rows; ++i) {
            for (int j = 0; j < cols; ++j) {
                const auto tok = f[static_cast<std::size_t>(i * cols + j)];
                if (is_inf_token(tok)) {
                    throw ParseError("'inf' is only accepted for univariate data", line);
                }
                x(i, j) = parse_number(tok, line);
            }
        }
        d.values.push_back(std::move(x));
    });
    return d;
}

RegressionData parse_regression(std::istream& in) {
    RegressionData d;
    for_each_row(in, [&](const std::vector<std::string_view>& f, std::size_t line) {
        require_arity(f, 2, line);
        if (is_inf_token(f[0]) || is_inf_token(f[1])) {
            throw ParseError("'inf' is only accepted for univariate data", line);
        }
        d.times.push_back(parse_number(f[0], line));
        d.values.push_back(parse_number(f[1], line));
    });
    return d;
}

void write_csv(std::ostream& out, const UnivariateData& d) {
    for (const auto& x : d.values) {
        out << (x.is_infinity() ? std::string("inf") : format_double(x.coords()(0))) << '\n';
    }
}

void write_csv(std::ostream& out, const PointData& d) {
    for (Eigen::Index i = 0; i < d.rows.rows(); ++i) {
        const Eigen::RowVectorXd r = d.rows.row(i);
        out << join(r.data(), static_cast<std::size_t>(r.size())) << '\n';
    }
}

void write_csv(std::ostream& out, const MatrixData& d) {
    for (const auto& x : d.values) {
        const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> r = x;
        out << join(r.data(), static_cast<std::size_t>(r.size())) << '\n';
    }
}

void write_csv(std::ostream& out, const RegressionData& d) {
    for (std::size_t i = 0; i < d.times.size(); ++i) {
        out << format_double(d.times[i]) << ',' << format_double(d.values[i]) << '\n';
    }
}

}  // namespace hyperfit::io
