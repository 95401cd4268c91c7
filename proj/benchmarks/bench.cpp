#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "scalelaw/estimator.hpp"
#include "scalelaw/interp.hpp"
#include "scalelaw/lawfit.hpp"
#include "scalelaw/signal.hpp"

using namespace scalelaw;

namespace {

std::vector<double> knot_xs(int n) {
  std::vector<double> xs;
  for (int i = 0; i < n; ++i) xs.push_back(1e6 * std::pow(2.0, i));
  return xs;
}

std::vector<double> knot_ys(const std::vector<double>& xs, double vertex) {
  std::vector<double> ys;
  for (double x : xs) {
    double t = std::log(x) - std::log(vertex);
    ys.push_back(3.0 + 0.4 * t * t);
  }
  return ys;
}

IsoFlopCurve bench_curve(int n_points) {
  IsoFlopCurve curve;
  curve.flops = 1e18;
  for (int i = 0; i < n_points; ++i) {
    double ln_n = std::log(3e7) + (i - n_points / 2) * 0.4;
    curve.points.push_back({std::exp(ln_n), 1e18,
                            3.0 + 0.4 * (ln_n - std::log(3e7)) *
                                      (ln_n - std::log(3e7)),
                            0.01});
  }
  return curve;
}

}  // namespace

static void BM_AkimaConstruct(benchmark::State& state) {
  auto xs = knot_xs(int(state.range(0)));
  auto ys = knot_ys(xs, xs[xs.size() / 2]);
  for (auto _ : state) {
    AkimaSpline f(xs, ys, InterpMode::LogXLogY);
    benchmark::DoNotOptimize(f);
  }
}
BENCHMARK(BM_AkimaConstruct)->Arg(7)->Arg(16)->Arg(64);

static void BM_AkimaEval(benchmark::State& state) {
  auto xs = knot_xs(16);
  auto ys = knot_ys(xs, xs[8]);
  AkimaSpline f(xs, ys, InterpMode::LogXLogY);
  double x = xs.front();
  for (auto _ : state) {
    benchmark::DoNotOptimize(f(x));
    x *= 1.37;
    if (x > xs.back()) x = xs.front();
  }
}
BENCHMARK(BM_AkimaEval);

static void BM_MinimizeInterpolant(benchmark::State& state) {
  auto xs = knot_xs(9);
  auto ys = knot_ys(xs, xs[4]);
  AkimaSpline f(xs, ys, InterpMode::LogXLogY);
  for (auto _ : state) {
    benchmark::DoNotOptimize(minimize_interpolant(f, 513));
  }
}
BENCHMARK(BM_MinimizeInterpolant);

static void BM_EstimateNStar(benchmark::State& state) {
  IsoFlopCurve curve = bench_curve(9);
  const int bootstrap = int(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_nstar(curve, bootstrap, 1));
  }
  state.SetItemsProcessed(state.iterations() * bootstrap);
}
BENCHMARK(BM_EstimateNStar)->Arg(100)->Arg(500);

static void BM_SmoothLoss(benchmark::State& state) {
  LossSeries raw;
  const int n = int(state.range(0));
  for (int i = 1; i <= n; ++i) {
    raw.entries.push_back({20.0 * i, 20.0 * i * 262144.0,
                           4.0 - 1e-4 * i + 0.05 * ((i % 3) - 1)});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(smooth_loss(raw, 0.05, 20, 262144.0));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_SmoothLoss)->Arg(1000)->Arg(10000);

static void BM_FitPowerLawCI(benchmark::State& state) {
  std::vector<NStarEstimate> estimates;
  for (int k = 0; k < 12; ++k) {
    NStarEstimate e;
    e.flops = 1.25e16 * std::pow(2.0, k);
    e.n_star = 2e6 * std::sqrt(e.flops / 1.25e16);
    e.log_std = 0.2;
    e.valid = true;
    e.samples.assign(500, e.n_star);
    e.at_edge.assign(500, 0);
    estimates.push_back(std::move(e));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_power_law_ci(estimates));
  }
}
BENCHMARK(BM_FitPowerLawCI);

BENCHMARK_MAIN();
