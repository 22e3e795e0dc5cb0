#include "hyperfit/io/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <span>
#include <thread>

#include "hyperfit/cauchy.hpp"
#include "hyperfit/conformal.hpp"
#include "hyperfit/errors.hpp"
#include "hyperfit/matrix_family.hpp"
#include "hyperfit/random.hpp"

namespace hyperfit::io {

namespace {

std::vector<std::string> quantity_names(const GeneratorSpec& spec, Family family) {
    std::vector<std::string> q;
    if (spec.kind == GeneratorKind::matrix_standard) {
        for (int i = 1; i <= spec.rows; ++i)
            for (int j = 1; j <= spec.cols; ++j) q.push_back("B" + std::to_string(i) + std::to_string(j));
        return q;
    }
    const int n = spec.dim();
    if (n == 1) {
        return {"u", "v"};
    }
    for (int i = 1; i <= n; ++i) q.push_back("b" + std::to_string(i));
    if (family == Family::conformal) {
        q.push_back("scale");
        return q;
    }
    for (int i = 1; i <= n; ++i)
        for (int j = i; j <= n; ++j) q.push_back("S" + std::to_string(i) + std::to_string(j));
    return q;
}

void fill_run(McRun& run, const FitReport& r) {
    run.status = r.status;
    run.iterations = r.iterations;
    run.final_grad_norm = r.final_grad_norm();
}

McRun one_run(const GeneratorSpec& base, const McConfig& cfg, int index) {
    McRun run;
    run.index = index;
    run.seed = run_seed(cfg.master_seed, static_cast<std::uint64_t>(index));
    GeneratorSpec spec = base;
    spec.seed = run.seed;
    try {
        const Sample sample = generate(spec);
        if (const auto* md = std::get_if<MatrixData>(&sample)) {
            std::vector<MatrixDatum> data;
            data.reserve(md->values.size());
            for (const auto& x : md->values) data.push_back(MatrixDatum::from_matrix(x));
            const auto [t, rep] = fit_m(data, md->cols, md->rows, cfg.descent);
            fill_run(run, rep);
            const MatrixParams p = to_matrix_params(t, md->rows);
            for (Eigen::Index i = 0; i < p.location.rows(); ++i)
                for (Eigen::Index j = 0; j < p.location.cols(); ++j) run.estimates.push_back(p.location(i, j));
            return run;
        }
        const Eigen::MatrixXd& rows = std::get<PointData>(sample).rows;
        const auto n = rows.cols();
        if (cfg.family == Family::conformal) {
            std::vector<BoundaryPoint> data;
            data.reserve(static_cast<std::size_t>(rows.rows()));
            for (Eigen::Index i = 0; i < rows.rows(); ++i) data.push_back(BoundaryPoint::at(Eigen::VectorXd(rows.row(i).transpose())));
            const auto [z, rep] = fit_c(data, static_cast<int>(n), cfg.descent);
            fill_run(run, rep);
            for (Eigen::Index i = 0; i < n; ++i) run.estimates.push_back(z.b(i));
            run.estimates.push_back(z.a);
            return run;
        }
        const auto [t, rep] = fit(LiftedData::from_points(rows), cfg.descent);
        fill_run(run, rep);
        if (n == 1) {
            const UnivariateEstimate e = to_univariate(t);
            run.estimates = {e.u, e.v};
            return run;
        }
        CauchyParams p = to_params(t);
        if (cfg.scatter_det) p = rescaled(std::move(p), *cfg.scatter_det);
        for (Eigen::Index i = 0; i < n; ++i) run.estimates.push_back(p.location(i));
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i; j < n; ++j) run.estimates.push_back(p.scatter(i, j));
    } catch (const Error& e) {
        run.status = FitStatus::degenerate_data;
        run.error = e.what();
        run.estimates.clear();
    }
    return run;
}

}  // namespace

std::size_t McSummary::index_of(const std::string& name) const {
    const auto it = std::find(quantities.begin(), quantities.end(), name);
    if (it == quantities.end()) throw InvalidArgument("no quantity named '" + name + "'");
    return static_cast<std::size_t>(it - quantities.begin());
}

McSummary run_mc(const GeneratorSpec& spec, const McConfig& config) {
    if (config.runs < 1) throw InvalidArgument("mc: runs must be >= 1");
    spec.validate();
    config.descent.validate();
    if (spec.kind == GeneratorKind::matrix_standard && config.family != Family::matrix) {
        throw InvalidArgument("mc: matrix samples need --family matrix");
    }
    if (spec.kind != GeneratorKind::matrix_standard && config.family == Family::matrix) {
        throw InvalidArgument("mc: --family matrix needs a matrix generator");
    }

    McSummary out;
    out.quantities = quantity_names(spec, config.family);
    out.runs.resize(static_cast<std::size_t>(config.runs));

    unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(config.runs));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i; (i = next.fetch_add(1)) < config.runs;) {
            out.runs[static_cast<std::size_t>(i)] = one_run(spec, config, i);
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
    }

    const std::size_t q = out.quantities.size();
    std::vector<double> sum(q, 0.0), sq(q, 0.0);
    int used = 0;
    for (const McRun& r : out.runs) {
        ++out.status_counts[static_cast<std::size_t>(r.status)];
        if (!r.error.empty()) ++out.errors;
        if (r.status != FitStatus::converged || r.estimates.size() != q) continue;
        ++used;
        for (std::size_t j = 0; j < q; ++j) sum[j] += r.estimates[j];
    }
    out.mean.assign(q, NAN);
    out.stddev.assign(q, NAN);
    if (used == 0) return out;
    for (std::size_t j = 0; j < q; ++j) out.mean[j] = sum[j] / used;
    for (const McRun& r : out.runs) {
        if (r.status != FitStatus::converged || r.estimates.size() != q) continue;
        for (std::size_t j = 0; j < q; ++j) sq[j] += (r.estimates[j] - out.mean[j]) * (r.estimates[j] - out.mean[j]);
    }
    for (std::size_t j = 0; j < q; ++j) out.stddev[j] = used > 1 ? std::sqrt(sq[j] / (used - 1)) : 0.0;
    return out;
}

void write_mc_table(std::ostream& out, const McSummary& s) {
    out << "run,seed,status,iterations,final_grad_norm";
    for (const auto& name : s.quantities) out << ',' << name;
    out << '\n';
    for (const McRun& r : s.runs) {
        out << r.index << ',' << r.seed << ',' << to_string(r.status) << ',' << r.iterations << ','
            << format_double(r.final_grad_norm);
        for (std::size_t j = 0; j < s.quantities.size(); ++j) {
            out << ',' << (j < r.estimates.size() ? format_double(r.estimates[j]) : std::string("nan"));
        }
        out << '\n';
    }
}

}  // namespace hyperfit::io
