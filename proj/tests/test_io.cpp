#include <gtest/gtest.h>

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <random>
#include <nlohmann/json.hpp>
#include <sstream>

#include "hyperfit/cauchy.hpp"
#include "hyperfit/errors.hpp"
#include "hyperfit/io/check_grad.hpp"
#include "hyperfit/io/dataset.hpp"
#include "hyperfit/io/generate.hpp"
#include "hyperfit/io/monte_carlo.hpp"
#include "hyperfit/io/report.hpp"
#include "hyperfit/random.hpp"

using namespace hyperfit;
using namespace hyperfit::io;

namespace {

template <class F>
auto parse(const std::string& text, F f) {
    std::istringstream in(text);
    return f(in);
}

int parse_error_line(const std::string& text, std::optional<int> n = std::nullopt) {
    try {
        parse(text, [&](std::istream& in) { return parse_points(in, n); });
    } catch (const ParseError& e) {
        return e.line();
    }
    return -1;
}

const PointData& points(const Sample& s) { return std::get<PointData>(s); }

}  // namespace

TEST(Dataset, UnivariateWithInfinity) {
    const auto d = parse("0\n1\ninf\n", parse_univariate);
    ASSERT_EQ(d.values.size(), 3u);
    EXPECT_EQ(d.values[0], BoundaryPoint::at(0.0));
    EXPECT_EQ(d.values[1], BoundaryPoint::at(1.0));
    EXPECT_TRUE(d.values[2].is_infinity());
    const auto e = parse("# header comment\n\nINF\n-Infinity\n2.5e1\n", parse_univariate);
    ASSERT_EQ(e.values.size(), 3u);
    EXPECT_TRUE(e.values[1].is_infinity());
    EXPECT_EQ(e.values[2], BoundaryPoint::at(25.0));
}

TEST(Dataset, PointsAndErrors) {
    const auto d = parse("2,-3\n", [](std::istream& in) { return parse_points(in, 2); });
    ASSERT_EQ(d.rows.rows(), 1);
    EXPECT_EQ(d.rows(0, 0), 2.0);
    EXPECT_EQ(d.rows(0, 1), -3.0);
    EXPECT_EQ(parse_error_line("1,2\n3,4\n5\n"), 3);
    EXPECT_EQ(parse_error_line("1,2\nx,4\n"), 2);
    EXPECT_EQ(parse_error_line("1,2\n3,inf\n"), 2);
    EXPECT_EQ(parse_error_line("1,2,3\n", 2), 1);
    EXPECT_EQ(parse_error_line("1,nan\n"), 1);
}

TEST(Dataset, MatricesRowMajor) {
    const auto d = parse("1,0,0,1\n1,2,3,4\n", [](std::istream& in) { return parse_matrices(in, 2, 2); });
    ASSERT_EQ(d.values.size(), 2u);
    EXPECT_EQ(d.values[0], Eigen::MatrixXd::Identity(2, 2));
    EXPECT_EQ(d.values[1](0, 1), 2.0);
    EXPECT_EQ(d.values[1](1, 0), 3.0);
    EXPECT_THROW(parse("1,0,inf,1\n", [](std::istream& in) { return parse_matrices(in, 2, 2); }), ParseError);
    EXPECT_THROW(parse("1,0,0\n", [](std::istream& in) { return parse_matrices(in, 2, 2); }), ParseError);
}

TEST(Dataset, Regression) {
    const auto d = parse("0,1.5\n0.5,-2\n", parse_regression);
    EXPECT_EQ(d.times, (std::vector<double>{0.0, 0.5}));
    EXPECT_EQ(d.values, (std::vector<double>{1.5, -2.0}));
    EXPECT_THROW(parse("0,inf\n", parse_regression), ParseError);
}

TEST(Dataset, FormatDoubleRoundTrips) {
    std::mt19937_64 rng(81);
    for (int i = 0; i < 1000; ++i) {
        const double x = std::ldexp(standard_normal(rng), static_cast<int>(rng() % 200) - 100);
        EXPECT_EQ(std::stod(format_double(x)), x);
    }
}

TEST(Generate, Cauchy1dMedian) {
    Sample s = generate(parse_generator("C(0,1)", 100000, 5));
    std::vector<double> xs(points(s).rows.data(), points(s).rows.data() + points(s).rows.size());
    std::nth_element(xs.begin(), xs.begin() + xs.size() / 2, xs.end());
    EXPECT_NEAR(xs[xs.size() / 2], 0.0, 0.02);
}

TEST(Generate, MixtureFrequencies) {
    std::vector<int> labels;
    generate(parse_generator("0.9*N(0,1)+0.1*N(100,10000)", 100000, 6), &labels);
    const double first = static_cast<double>(std::count(labels.begin(), labels.end(), 0)) / labels.size();
    EXPECT_NEAR(first, 0.9, 0.02);
}

TEST(Generate, GaussianNdMean) {
    const Sample s = generate(parse_generator("N([1,2,3,4],[[1,1,1,1],[1,2,2,2],[1,2,3,3],[1,2,3,4]])", 100000, 7));
    const Eigen::VectorXd mean = points(s).rows.colwise().mean().transpose();
    EXPECT_LT((mean - Eigen::Vector4d(1, 2, 3, 4)).cwiseAbs().maxCoeff(), 0.05);
}

TEST(Generate, DeterministicInSeed) {
    const auto a = points(generate(parse_generator("C(3,2)", 50, 9))).rows;
    const auto b = points(generate(parse_generator("C(3,2)", 50, 9))).rows;
    const auto c = points(generate(parse_generator("C(3,2)", 50, 10))).rows;
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
}

TEST(Generate, SpecValidation) {
    EXPECT_THROW(parse_generator("0.5*N(0,1)+0.4*N(1,1)", 10, 0), InvalidArgument);
    EXPECT_THROW(parse_generator("N([0,0],[[1,2],[2,1]])", 10, 0), InvalidArgument);
    EXPECT_THROW(parse_generator("N(0,-1)", 10, 0), InvalidArgument);
    EXPECT_THROW(parse_generator("Q(1)", 10, 0), InvalidArgument);
    EXPECT_THROW(parse_generator("N(0,1)", 0, 0), InvalidArgument);
    EXPECT_EQ(parse_generator("M(2,3)", 10, 0).kind, GeneratorKind::matrix_standard);
    EXPECT_EQ(parse_generator("C([0,0],[[1,0],[0,1]])", 10, 0).dim(), 2);
}

TEST(Generate, CsvRoundTrip) {
    {
        const auto d = points(generate(parse_generator("N([1,2],3)", 200, 11)));
        std::stringstream ss;
        write_csv(ss, d);
        EXPECT_EQ(parse_points(ss).rows, d.rows);
    }
    {
        const auto d = std::get<MatrixData>(generate(parse_generator("M(2,3)", 100, 12)));
        std::stringstream ss;
        write_csv(ss, d);
        const auto back = parse_matrices(ss, d.rows, d.cols);
        ASSERT_EQ(back.values.size(), d.values.size());
        for (std::size_t i = 0; i < d.values.size(); ++i) EXPECT_EQ(back.values[i], d.values[i]);
    }
    {
        UnivariateData u{{BoundaryPoint::at(0.1), BoundaryPoint::infinity(), BoundaryPoint::at(-1e-300)}};
        std::stringstream ss;
        write_csv(ss, u);
        const auto back = parse_univariate(ss);
        ASSERT_EQ(back.values.size(), 3u);
        for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(back.values[i], u.values[i]);
    }
}

TEST(MonteCarlo, IndependentOfThreadCount) {
    const GeneratorSpec spec = parse_generator("0.8*N(0,1)+0.2*C(5,2)", 300, 0);
    McConfig cfg;
    cfg.runs = 24;
    cfg.master_seed = 1234;
    std::string tables[2];
    std::string summaries[2];
    const unsigned threads[2] = {1, 4};
    for (int k = 0; k < 2; ++k) {
        cfg.threads = threads[k];
        const McSummary s = run_mc(spec, cfg);
        std::ostringstream out;
        write_mc_table(out, s);
        tables[k] = out.str();
        summaries[k] = report_mc(s, cfg.family);
    }
    EXPECT_EQ(tables[0], tables[1]);
    EXPECT_EQ(summaries[0], summaries[1]);
}

TEST(MonteCarlo, NormalScaleNearLimit) {
    McConfig cfg;
    cfg.runs = 100;
    cfg.master_seed = 2;
    const McSummary s = run_mc(parse_generator("N(0,1)", 1000, 0), cfg);
    EXPECT_EQ(s.runs.size(), 100u);
    EXPECT_EQ(s.count(FitStatus::converged), 100);
    EXPECT_LE(std::abs(s.mean[s.index_of("u")]), 0.1);
    EXPECT_GE(s.mean[s.index_of("v")], 0.58);
    EXPECT_LE(s.mean[s.index_of("v")], 0.65);
}

TEST(MonteCarlo, FailuresAreCountedNotThrown) {
    McConfig cfg;
    cfg.runs = 5;
    const McSummary s = run_mc(parse_generator("N(0,1)", 2, 0), cfg);
    EXPECT_EQ(s.count(FitStatus::degenerate_data), 5);
    EXPECT_TRUE(std::isnan(s.mean[0]));
    EXPECT_THROW(run_mc(parse_generator("M(2,2)", 10, 0), cfg), InvalidArgument);
    cfg.runs = 0;
    EXPECT_THROW(run_mc(parse_generator("N(0,1)", 10, 0), cfg), InvalidArgument);
}

TEST(MonteCarlo, QuantityNames) {
    McConfig cfg;
    cfg.runs = 2;
    EXPECT_EQ(run_mc(parse_generator("N([0,0],1)", 100, 0), cfg).quantities,
              (std::vector<std::string>{"b1", "b2", "S11", "S12", "S22"}));
    cfg.family = Family::conformal;
    EXPECT_EQ(run_mc(parse_generator("N([0,0],1)", 100, 0), cfg).quantities, (std::vector<std::string>{"b1", "b2", "scale"}));
    cfg.family = Family::matrix;
    EXPECT_EQ(run_mc(parse_generator("M(1,2)", 100, 0), cfg).quantities, (std::vector<std::string>{"B11", "B12"}));
}

TEST(Report, ConvergedUnivariate) {
    const std::vector<BoundaryPoint> xs{BoundaryPoint::at(0.0), BoundaryPoint::at(1.0), BoundaryPoint::infinity()};
    const auto [e, r] = fit_univariate(xs);
    const auto j = nlohmann::json::parse(report_univariate(e.u, e.v, r));
    EXPECT_EQ(j["family"], "cauchy");
    EXPECT_EQ(j["status"], "converged");
    ASSERT_EQ(j["location"].size(), 1u);
    EXPECT_NEAR(j["location"][0].get<double>(), 0.5, 1e-6);
    EXPECT_NEAR(j["scale"].get<double>(), 0.8660254, 1e-6);
    EXPECT_EQ(j["loss_trace"].size(), static_cast<std::size_t>(r.iterations + 1));
    EXPECT_EQ(exit_code(r.status), 0);
}

TEST(Report, IllConditionedExitCode) {
    const GeneratorSpec spec = parse_generator("0.5*N(0,100)+0.5*N(300,1)", 1000, 3);
    const auto d = points(generate(spec));
    const auto [t, r] = fit(LiftedData::from_points(d.rows));
    ASSERT_EQ(r.status, FitStatus::ill_conditioned);
    const auto j = nlohmann::json::parse(report_cauchy(t, r));
    EXPECT_EQ(j["status"], "ill_conditioned");
    EXPECT_EQ(exit_code(r.status), 2);
    EXPECT_EQ(exit_code(FitStatus::degenerate_data), 2);
    EXPECT_EQ(exit_code(FitStatus::max_iters_exceeded), 2);
}

TEST(Report, FourDimensionalScatterShape) {
    const auto d = points(generate(parse_generator("N([1,2,3,4],[[1,1,1,1],[1,2,2,2],[1,2,3,3],[1,2,3,4]])", 2000, 4)));
    const auto [t, r] = fit(LiftedData::from_points(d.rows));
    const auto j = nlohmann::json::parse(report_cauchy(t, r, {1.0, false}));
    ASSERT_EQ(j["scatter"].size(), 4u);
    for (const auto& row : j["scatter"]) EXPECT_EQ(row.size(), 4u);
    ASSERT_EQ(j["scatter_rescaled"].size(), 4u);
    EXPECT_EQ(j["location"].size(), 4u);
    EXPECT_FALSE(j.contains("loss_trace"));
    Eigen::Matrix4d s;
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) s(i, k) = j["scatter_rescaled"][i][k].get<double>();
    EXPECT_NEAR(s.determinant(), 1.0, 1e-9);
}

TEST(CheckGrad, Examples) {
    EXPECT_LT(check_grad(Family::cauchy, 3, 1, 100).max_rel_error, 1e-6);
    EXPECT_LT(check_grad(Family::matrix, 2, 2, 100).max_rel_error, 1e-6);
    EXPECT_LT(check_grad(Family::conformal, 2, 1, 100).max_rel_error, 1e-6);
    EXPECT_TRUE(check_grad(Family::cauchy, 1, 1, 10).passed());
    EXPECT_THROW(check_grad(Family::cauchy, 0, 1, 10), InvalidArgument);
    EXPECT_EQ(parse_family("matrix"), Family::matrix);
    EXPECT_THROW(parse_family("gauss"), InvalidArgument);
}
