#include "qsd/campaign.hpp"
#include "qsd/measurement.hpp"
#include "qsd/optics.hpp"
#include "qsd/qudit.hpp"

#include <benchmark/benchmark.h>

#include <numbers>

using namespace qsd;

namespace {
constexpr double kPi = std::numbers::pi;

SymmetricSetSpec spec_for(int d, int n) { return {d, n, random_coeffs(d, 1234)}; }
}  // namespace

static void BM_OutcomeTable(benchmark::State& state) {
    const auto spec = spec_for(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(outcome_table(spec));
}
BENCHMARK(BM_OutcomeTable)->Args({3, 5})->Args({9, 13})->Args({21, 23});

static void BM_PCorrect(benchmark::State& state) {
    const auto spec = spec_for(21, 23);
    for (auto _ : state) benchmark::DoNotOptimize(p_correct(spec));
}
BENCHMARK(BM_PCorrect);

static void BM_OptimalityCertificate(benchmark::State& state) {
    const auto spec = spec_for(9, 13);
    for (auto _ : state) benchmark::DoNotOptimize(optimality_certificate(spec));
}
BENCHMARK(BM_OptimalityCertificate);

static void BM_FocalAmplitude(benchmark::State& state) {
    OpticalGeometry g;
    const auto spec = spec_for(9, 9);
    const StateVector t = transmission_coefficients(spec.coeffs, RealVec::Zero(9));
    double x = -2e-3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(focal_plane_amplitude(t, g, x));
        x += 1e-7;
    }
}
BENCHMARK(BM_FocalAmplitude);

static void BM_FresnelAmplitude(benchmark::State& state) {
    OpticalGeometry g;
    const auto spec = spec_for(3, 3);
    const StateVector t = transmission_coefficients(spec.coeffs, RealVec::Zero(3));
    for (auto _ : state) benchmark::DoNotOptimize(fresnel_amplitude(t, g, 0.4e-3, 1.5 * g.f));
}
BENCHMARK(BM_FresnelAmplitude);

static void BM_CapturePixel(benchmark::State& state) {
    OpticalGeometry g;
    const auto spec = spec_for(5, 7);
    RealVec phases(5);
    for (int m = 0; m < 5; ++m) phases[m] = 2.0 * kPi * 2 * m / 7;
    const StateVector t = transmission_coefficients(spec.coeffs, phases);
    const NoiseModel noise = NoiseModel::camera_defaults(7);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            capture_pattern(t, g, noise, PlaneSpec::focal(), SamplingMode::Pixel));
}
BENCHMARK(BM_CapturePixel);

static void BM_RunSetOpticalPoint(benchmark::State& state) {
    const auto spec = spec_for(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    OpticalGeometry g;
    for (auto _ : state)
        benchmark::DoNotOptimize(run_set(spec, RunMode::OpticalPoint, g, NoiseModel::none(), 1));
}
BENCHMARK(BM_RunSetOpticalPoint)->Args({3, 5})->Args({9, 13})->Unit(benchmark::kMillisecond);

static void BM_IdealReplicaCampaign(benchmark::State& state) {
    const CampaignConfig config = reference_campaign_config(RunMode::Ideal, 42);
    for (auto _ : state) benchmark::DoNotOptimize(run_campaign(config));
}
BENCHMARK(BM_IdealReplicaCampaign)->Unit(benchmark::kMillisecond)->Iterations(3);

BENCHMARK_MAIN();
