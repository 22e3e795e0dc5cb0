#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "hyperfit/cauchy.hpp"
#include "hyperfit/conformal.hpp"
#include "hyperfit/errors.hpp"
#include "hyperfit/io/check_grad.hpp"
#include "hyperfit/io/dataset.hpp"
#include "hyperfit/io/generate.hpp"
#include "hyperfit/io/monte_carlo.hpp"
#include "hyperfit/io/report.hpp"
#include "hyperfit/matrix_family.hpp"
#include "hyperfit/spline.hpp"

namespace hf = hyperfit;
namespace io = hyperfit::io;

namespace {

struct FitFlags {
    std::string step = "backtracking";
    double tol = 1e-9;
    int max_iters = 200;
    bool standardize = false;
    std::optional<double> det;
    bool no_trace = false;

    void add(CLI::App* app) {
        app->add_option("--step", step, "Step policy")
            ->check(CLI::IsMember({"safe", "improved", "backtracking"}))
            ->capture_default_str();
        app->add_option("--tol", tol, "Gradient norm tolerance")->check(CLI::PositiveNumber)->capture_default_str();
        app->add_option("--max-iters", max_iters, "Iteration cap")->check(CLI::PositiveNumber)->capture_default_str();
        app->add_flag("--standardize", standardize, "Fit on median/MAD standardized data and map back");
        app->add_option("--det", det, "Also report the scatter rescaled to this determinant")
            ->check(CLI::PositiveNumber);
        app->add_flag("--no-trace", no_trace, "Omit loss and gradient traces");
    }

    hf::DescentConfig descent() const {
        hf::DescentConfig c;
        c.step_policy = hf::parse_step_policy(step);
        c.tol = tol;
        c.max_iters = max_iters;
        c.standardize = standardize;
        return c;
    }

    io::ReportOptions report() const { return {det, !no_trace}; }
};

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw hf::InvalidArgument("cannot write '" + path + "'");
    out << text;
}

template <class Writer>
void emit_with(const std::string& path, Writer w) {
    if (path.empty() || path == "-") {
        w(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw hf::InvalidArgument("cannot write '" + path + "'");
    w(out);
}

std::vector<hf::BoundaryPoint> boundary_points(const Eigen::MatrixXd& rows) {
    std::vector<hf::BoundaryPoint> out;
    out.reserve(static_cast<std::size_t>(rows.rows()));
    for (Eigen::Index i = 0; i < rows.rows(); ++i) out.push_back(hf::BoundaryPoint::at(Eigen::VectorXd(rows.row(i).transpose())));
    return out;
}

int run_fit(const std::string& family, int rows, int cols, const FitFlags& flags, const std::string& input,
            const std::string& output) {
    const hf::DescentConfig cfg = flags.descent();
    switch (io::parse_family(family)) {
        case io::Family::cauchy: {
            const io::PointData d = io::with_input(input, [](std::istream& in) { return io::parse_points(in); });
            const auto [t, r] = hf::fit(hf::LiftedData::from_points(d.rows), cfg);
            emit(output, io::report_cauchy(t, r, flags.report()));
            return io::exit_code(r.status);
        }
        case io::Family::conformal: {
            const io::PointData d = io::with_input(input, [](std::istream& in) { return io::parse_points(in); });
            const auto [z, r] = hf::fit_c(boundary_points(d.rows), static_cast<int>(d.rows.cols()), cfg);
            emit(output, io::report_conformal(z, r, flags.report()));
            return io::exit_code(r.status);
        }
        case io::Family::matrix: {
            if (rows < 1 || cols < 1) throw hf::InvalidArgument("--family matrix needs --rows and --cols");
            const io::MatrixData d =
                io::with_input(input, [&](std::istream& in) { return io::parse_matrices(in, rows, cols); });
            std::vector<hf::MatrixDatum> data;
            data.reserve(d.values.size());
            for (const auto& x : d.values) data.push_back(hf::MatrixDatum::from_matrix(x));
            const auto [t, r] = hf::fit_m(data, cols, rows, cfg);
            emit(output, io::report_matrix(t, cols, rows, r, flags.report()));
            return io::exit_code(r.status);
        }
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cauchy-family maximum likelihood by geodesic gradient descent"};
    app.require_subcommand(1);

    FitFlags flags;
    std::string input = "-";
    std::string output;
    std::string family = "cauchy";
    int rows = 0;
    int cols = 0;

    auto* fit = app.add_subcommand("fit", "Fit a multivariate, conformal or matrix Cauchy model to CSV data");
    fit->add_option("--family", family, "cauchy, conformal or matrix")
        ->check(CLI::IsMember({"cauchy", "conformal", "matrix"}))
        ->capture_default_str();
    fit->add_option("--rows", rows, "Matrix observation rows (n)");
    fit->add_option("--cols", cols, "Matrix observation columns (m)");
    fit->add_option("--input,-i", input, "CSV file, - for stdin")->capture_default_str();
    fit->add_option("--output,-o", output, "Report file (default stdout)");
    flags.add(fit);

    auto* fit1d = app.add_subcommand("fit1d", "Fit a univariate Cauchy (u, v); the token inf is allowed");
    fit1d->add_option("--input,-i", input, "CSV file, - for stdin")->capture_default_str();
    fit1d->add_option("--output,-o", output, "Report file (default stdout)");
    flags.add(fit1d);

    double alpha = 1.0;
    std::string method = "newton";
    auto* regress = app.add_subcommand("regress", "Hyperbolic spline regression on t,x pairs");
    regress->add_option("--alpha", alpha, "Smoothing weight")->check(CLI::PositiveNumber)->capture_default_str();
    regress->add_option("--method", method, "newton or gradient")
        ->check(CLI::IsMember({"newton", "gradient"}))
        ->capture_default_str();
    regress->add_option("--input,-i", input, "CSV file, - for stdin")->capture_default_str();
    regress->add_option("--output,-o", output, "Report file (default stdout)");
    flags.add(regress);

    std::string dist;
    std::size_t sample_size = 1000;
    std::uint64_t seed = 0;
    auto* simulate = app.add_subcommand("simulate", "Draw a synthetic dataset as CSV");
    simulate->add_option("--dist", dist, "Generator, e.g. \"0.9*N(0,1)+0.1*N(100,10000)\"")->required();
    simulate->add_option("--n", sample_size, "Sample size")->check(CLI::PositiveNumber)->capture_default_str();
    simulate->add_option("--seed", seed, "RNG seed")->capture_default_str();
    simulate->add_option("--out,-o", output, "CSV file (default stdout)");

    int runs = 100;
    unsigned threads = 0;
    std::string table;
    auto* mc = app.add_subcommand("mc", "Monte Carlo: repeated fits on fresh samples");
    mc->add_option("--runs", runs, "Number of runs")->check(CLI::PositiveNumber)->capture_default_str();
    mc->add_option("--dist", dist, "Generator")->required();
    mc->add_option("--sample-size", sample_size, "Observations per run")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    mc->add_option("--seed", seed, "Master seed")->capture_default_str();
    mc->add_option("--family", family, "cauchy, conformal or matrix")
        ->check(CLI::IsMember({"cauchy", "conformal", "matrix"}))
        ->capture_default_str();
    mc->add_option("--threads", threads, "Worker threads (0: all cores)")->capture_default_str();
    mc->add_option("--table", table, "Per-run CSV table");
    mc->add_option("--output,-o", output, "Summary file (default stdout)");
    flags.add(mc);

    int n = 1;
    int m = 1;
    int trials = 100;
    auto* check = app.add_subcommand("check-grad", "Compare analytic gradients with finite differences");
    check->add_option("--family", family, "cauchy, conformal or matrix")
        ->check(CLI::IsMember({"cauchy", "conformal", "matrix"}))
        ->capture_default_str();
    check->add_option("--n", n, "Dimension n")->check(CLI::PositiveNumber)->capture_default_str();
    check->add_option("--m", m, "Matrix columns m")->check(CLI::PositiveNumber)->capture_default_str();
    check->add_option("--trials", trials, "Random instances")->check(CLI::PositiveNumber)->capture_default_str();
    check->add_option("--seed", seed, "RNG seed")->capture_default_str();
    check->add_option("--output,-o", output, "Report file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*fit) {
            return run_fit(family, rows, cols, flags, input, output);
        }
        if (*fit1d) {
            const io::UnivariateData d = io::with_input(input, [](std::istream& in) { return io::parse_univariate(in); });
            const auto [e, r] = hf::fit_univariate(d.values, flags.descent());
            emit(output, io::report_univariate(e.u, e.v, r, flags.report()));
            return io::exit_code(r.status);
        }
        if (*regress) {
            const io::RegressionData d = io::with_input(input, [](std::istream& in) { return io::parse_regression(in); });
            hf::SplineProblem p;
            p.times = d.times;
            p.alpha = alpha;
            for (double x : d.values) p.observations.push_back(hf::BoundaryPoint::at(x));
            const hf::SplineSolution s = hf::fit_spline(
                p, flags.descent(), method == "gradient" ? hf::SplineMethod::gradient : hf::SplineMethod::newton);
            emit(output, io::report_spline(s, hf::merge_knots(p), flags.report()));
            return io::exit_code(s.report.status);
        }
        if (*simulate) {
            const io::Sample s = io::generate(io::parse_generator(dist, sample_size, seed));
            emit_with(output, [&](std::ostream& out) { std::visit([&](const auto& d) { io::write_csv(out, d); }, s); });
            return 0;
        }
        if (*mc) {
            io::McConfig cfg;
            cfg.runs = runs;
            cfg.master_seed = seed;
            cfg.descent = flags.descent();
            cfg.family = io::parse_family(family);
            cfg.scatter_det = flags.det;
            cfg.threads = threads;
            const io::McSummary s = io::run_mc(io::parse_generator(dist, sample_size, seed), cfg);
            if (!table.empty()) emit_with(table, [&](std::ostream& out) { io::write_mc_table(out, s); });
            emit(output, io::report_mc(s, cfg.family));
            return 0;
        }
        if (*check) {
            const io::GradCheckResult g = io::check_grad(io::parse_family(family), n, m, trials, seed);
            emit(output, io::report_check_grad(g));
            return g.passed() ? 0 : 2;
        }
    } catch (const hf::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
