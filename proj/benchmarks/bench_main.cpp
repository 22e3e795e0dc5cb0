#include <benchmark/benchmark.h>

#include <random>

#include "hyperfit/cauchy.hpp"
#include "hyperfit/conformal.hpp"
#include "hyperfit/matrix_family.hpp"
#include "hyperfit/random.hpp"
#include "hyperfit/spline.hpp"

using namespace hyperfit;

namespace {

Eigen::MatrixXd normal_rows(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = standard_normal(rng);
    return m;
}

void BM_Geodesic(benchmark::State& state) {
    const auto p = state.range(0);
    const SpdPoint t = SpdPoint::identity(p);
    const TangentSym v = project_tangent(t, normal_rows(p, p, 1));
    for (auto _ : state) benchmark::DoNotOptimize(geodesic(t, v, 0.3));
}
BENCHMARK(BM_Geodesic)->Arg(2)->Arg(5)->Arg(10);

void BM_CauchyLossGrad(benchmark::State& state) {
    const LiftedData data = LiftedData::from_points(normal_rows(state.range(0), 4, 2));
    const SpdPoint t = SpdPoint::identity(5);
    for (auto _ : state) benchmark::DoNotOptimize(loss_and_grad(t, data));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CauchyLossGrad)->Arg(1000)->Arg(100000);

void BM_FitUnivariateNormal(benchmark::State& state) {
    const LiftedData data = LiftedData::from_points(normal_rows(state.range(0), 1, 3));
    for (auto _ : state) benchmark::DoNotOptimize(fit(data));
}
BENCHMARK(BM_FitUnivariateNormal)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_FitFourDimensional(benchmark::State& state) {
    Eigen::MatrixXd l = Eigen::MatrixXd::Ones(4, 4).triangularView<Eigen::Lower>();
    const Eigen::MatrixXd x = normal_rows(state.range(0), 4, 4) * l.transpose();
    const LiftedData data = LiftedData::from_points(x);
    for (auto _ : state) benchmark::DoNotOptimize(fit(data));
}
BENCHMARK(BM_FitFourDimensional)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_FitMatrix(benchmark::State& state) {
    std::mt19937_64 rng(5);
    std::vector<MatrixDatum> data;
    for (int i = 0; i < state.range(0); ++i) data.push_back(MatrixDatum::from_matrix(sample_standard_matrix(2, 2, rng)));
    for (auto _ : state) benchmark::DoNotOptimize(fit_m(data, 2, 2));
}
BENCHMARK(BM_FitMatrix)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_FitConformal(benchmark::State& state) {
    const Eigen::MatrixXd x = normal_rows(state.range(0), 3, 6);
    std::vector<BoundaryPoint> data;
    for (Eigen::Index i = 0; i < x.rows(); ++i) data.push_back(BoundaryPoint::at(Eigen::VectorXd(x.row(i).transpose())));
    for (auto _ : state) benchmark::DoNotOptimize(fit_c(data, 3));
}
BENCHMARK(BM_FitConformal)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_FitSpline(benchmark::State& state) {
    std::mt19937_64 rng(7);
    SplineProblem p;
    p.alpha = 1.0;
    for (int i = 0; i < state.range(0); ++i) {
        p.times.push_back(0.1 * i);
        p.observations.push_back(BoundaryPoint::at(0.05 * i + standard_normal(rng)));
    }
    for (auto _ : state) benchmark::DoNotOptimize(fit_spline(p));
}
BENCHMARK(BM_FitSpline)->Arg(20)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
