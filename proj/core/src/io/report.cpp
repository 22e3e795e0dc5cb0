#include "hyperfit/io/report.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

#include "hyperfit/cauchy.hpp"
#include "hyperfit/matrix_family.hpp"

namespace hyperfit::io {

namespace {

using json = nlohmann::ordered_json;

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json vec(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
    return a;
}

json mat(const Eigen::MatrixXd& m) {
    json a = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vec(m.row(i).transpose()));
    return a;
}

json seq(const std::vector<double>& xs) {
    json a = json::array();
    for (double x : xs) a.push_back(num(x));
    return a;
}

json header(std::string_view family, int n, std::optional<int> m, const FitReport& r) {
    json j;
    j["family"] = family;
    j["n"] = n;
    if (m) j["m"] = *m;
    j["status"] = to_string(r.status);
    j["iterations"] = r.iterations;
    j["final_grad_norm"] = num(r.final_grad_norm());
    j["final_loss"] = num(r.final_loss());
    return j;
}

void trace(json& j, const FitReport& r, const ReportOptions& opt) {
    if (opt.include_trace) {
        j["loss_trace"] = seq(r.loss_trace);
        j["grad_norm_trace"] = seq(r.grad_norm_trace);
    }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string report_cauchy(const SpdPoint& t, const FitReport& r, const ReportOptions& opt) {
    const int n = static_cast<int>(t.dim()) - 1;
    json j = header("cauchy", n, std::nullopt, r);
    const CauchyParams p = to_params(t);
    j["location"] = vec(p.location);
    j["scatter"] = mat(p.scatter);
    if (opt.scatter_det) j["scatter_rescaled"] = mat(rescaled(p, *opt.scatter_det).scatter);
    if (n == 1) j["scale"] = num(std::sqrt(p.scatter(0, 0)));
    j["T"] = mat(t.matrix());
    trace(j, r, opt);
    return dump(j);
}

std::string report_univariate(double u, double v, const FitReport& r, const ReportOptions& opt) {
    json j = header("cauchy", 1, std::nullopt, r);
    j["location"] = json::array({num(u)});
    j["scale"] = num(v);
    trace(j, r, opt);
    return dump(j);
}

std::string report_matrix(const SpdPoint& t, int m, int n, const FitReport& r, const ReportOptions& opt) {
    json j = header("matrix", n, m, r);
    const MatrixParams p = to_matrix_params(t, n);
    j["location"] = mat(p.location);
    j["row_scatter"] = mat(p.row_scatter);
    j["col_scatter"] = mat(p.col_scatter);
    j["T"] = mat(t.matrix());
    trace(j, r, opt);
    return dump(j);
}

std::string report_conformal(const HalfSpacePoint& z, const FitReport& r, const ReportOptions& opt) {
    json j = header("conformal", static_cast<int>(z.b.size()), std::nullopt, r);
    j["location"] = vec(z.b);
    j["scale"] = num(z.a);
    trace(j, r, opt);
    return dump(j);
}

std::string report_spline(const SplineSolution& s, const SplineKnots& knots, const ReportOptions& opt) {
    json j = header("spline", 1, std::nullopt, s.report);
    j["alpha"] = num(knots.alpha);
    json ks = json::array();
    const std::vector<double> res = junction_residuals(knots, s.values);
    for (std::size_t i = 0; i < s.times.size(); ++i) {
        json k;
        k["t"] = num(s.times[i]);
        k["u"] = num(s.values[i].b(0));
        k["v"] = num(s.values[i].a);
        k["residual"] = num(res[i]);
        ks.push_back(std::move(k));
    }
    j["knots"] = std::move(ks);
    trace(j, s.report, opt);
    return dump(j);
}

std::string report_check_grad(const GradCheckResult& g) {
    json j;
    j["family"] = to_string(g.family);
    j["n"] = g.n;
    if (g.family == Family::matrix) j["m"] = g.m;
    j["trials"] = g.trials;
    j["max_rel_error"] = num(g.max_rel_error);
    j["threshold"] = g.threshold;
    j["passed"] = g.passed();
    return dump(j);
}

std::string report_mc(const McSummary& s, Family family) {
    json j;
    j["family"] = to_string(family);
    j["runs"] = s.runs.size();
    json counts;
    for (FitStatus st : {FitStatus::converged, FitStatus::ill_conditioned, FitStatus::degenerate_data,
                         FitStatus::max_iters_exceeded}) {
        counts[std::string(to_string(st))] = s.count(st);
    }
    j["status_counts"] = std::move(counts);
    j["errors"] = s.errors;
    json q;
    for (std::size_t i = 0; i < s.quantities.size(); ++i) {
        q[s.quantities[i]] = json{{"mean", num(s.mean[i])}, {"stddev", num(s.stddev[i])}};
    }
    j["estimates"] = std::move(q);
    return dump(j);
}

int exit_code(FitStatus s) { return s == FitStatus::converged ? 0 : 2; }

}  // namespace hyperfit::io
