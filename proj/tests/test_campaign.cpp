#include "qsd/campaign.hpp"

#include "oracles.hpp"
#include "qsd/rng.hpp"
#include "qsd/serialize.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace qsd;
namespace {
constexpr double kPi = std::numbers::pi;
namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    TempDir(const char* tag) : path(fs::temp_directory_path() / tag) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};
}  // namespace

TEST_CASE("reference campaign enumerates the full survey counts") {
    const CampaignConfig config = reference_campaign_config(RunMode::Ideal, 42);
    const auto sets = enumerate_sets(config);
    CHECK(sets.size() == 1851);

    int qubit_sets = 0;
    long qubit_states = 0;
    long low_dim_states = 0;
    for (const auto& s : sets) {
        if (s.spec.dim == 2) {
            ++qubit_sets;
            qubit_states += s.spec.num_states;
        }
        if (s.spec.dim <= 9) low_dim_states += s.spec.num_states;
    }
    CHECK(qubit_sets == 45);
    CHECK(qubit_states == 180);
    CHECK(low_dim_states == 13320);

    // Indices are consecutive and labels carry the grid point.
    CHECK(sets.front().set_index == 0);
    CHECK(sets.back().set_index == 1850);
    CHECK(sets.front().parametrization == "hyperspherical");
    CHECK(sets.front().params.count("theta") == 1);
}

TEST_CASE("config validation rejects malformed grids") {
    CampaignConfig config;
    CampaignEntry entry;
    entry.dim = 5;
    entry.num_states = 5;
    entry.parametrization.kind = Parametrization::Kind::CascadeGrid;
    entry.parametrization.alpha_points = 0;
    config.entries.push_back(entry);
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);

    config.entries[0].parametrization.alpha_points = 5;
    config.entries[0].num_states = 3;  // N < D
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}

TEST_CASE("campaign config JSON round-trips") {
    const CampaignConfig config = reference_campaign_config(RunMode::OpticalPixel, 99);
    const CampaignConfig back = campaign_config_from_json(campaign_config_to_json(config));
    CHECK(back.master_seed == config.master_seed);
    REQUIRE(back.entries.size() == config.entries.size());
    for (std::size_t i = 0; i < config.entries.size(); ++i) {
        CHECK(back.entries[i].dim == config.entries[i].dim);
        CHECK(back.entries[i].num_states == config.entries[i].num_states);
        CHECK(back.entries[i].mode == config.entries[i].mode);
        CHECK(back.entries[i].parametrization.kind == config.entries[i].parametrization.kind);
        CHECK(back.entries[i].noise.readout_sigma == config.entries[i].noise.readout_sigma);
    }

    CHECK_THROWS(campaign_config_from_json("{\"entries\": [{\"D\": 2}]}"));
}

TEST_CASE("ideal runs have zero deviation; noiseless point runs are exact") {
    SymmetricSetSpec spec{3, 5, random_coeffs(3, 31)};
    const DiscriminationReport ideal =
        run_set(spec, RunMode::Ideal, OpticalGeometry{}, NoiseModel::none(), 1);
    CHECK(ideal.rmsd == 0.0);
    CHECK(ideal.p_corr_expt == doctest::Approx(ideal.p_corr_theory).epsilon(1e-12));

    const DiscriminationReport optical =
        run_set(spec, RunMode::OpticalPoint, OpticalGeometry{}, NoiseModel::none(), 1);
    CHECK(optical.rmsd < 1e-6);
    CHECK(optical.fidelities.size() == 5);
    for (double f : optical.fidelities) CHECK(f == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("reports are self-consistent") {
    SymmetricSetSpec spec{2, 3, random_coeffs(2, 67)};
    const DiscriminationReport r = run_set(spec, RunMode::OpticalPixel, OpticalGeometry{},
                                           NoiseModel::camera_defaults(5), 99);
    const int n = spec.num_states;
    CHECK(std::abs(r.rmsd - std::sqrt(r.residuals.squaredNorm() / (n * n))) < 1e-12);
    CHECK(std::abs(r.p_corr_expt - r.experiment.entries.diagonal().mean()) < 1e-12);
    for (int j = 0; j < n; ++j)
        CHECK(r.experiment.column_sum(j) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK((r.residuals - (r.theory.entries - r.experiment.entries)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("campaign runs are reproducible set by set") {
    CampaignConfig config;
    CampaignEntry entry;
    entry.dim = 3;
    entry.num_states = 4;
    entry.parametrization.kind = Parametrization::Kind::Random;
    entry.parametrization.count = 4;
    entry.parametrization.seed = 5;
    entry.mode = RunMode::OpticalPixel;
    entry.noise = NoiseModel::camera_defaults(0);
    config.entries.push_back(entry);
    config.master_seed = 2023;

    const auto a = run_campaign(config);
    const auto b = run_campaign(config);
    REQUIRE(a.size() == 4);
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(report_to_json(a[i]) == report_to_json(b[i]));

    CampaignConfig other = config;
    other.master_seed = 2024;
    const auto c = run_campaign(other);
    CHECK(report_to_json(a[0]) != report_to_json(c[0]));
}

TEST_CASE("report JSON round-trips and recomputes") {
    SymmetricSetSpec spec{2, 2, random_coeffs(2, 4)};
    DiscriminationReport r = run_set(spec, RunMode::OpticalPixel, OpticalGeometry{},
                                     NoiseModel::camera_defaults(1), 17);
    r.parametrization = "random";
    r.params = {{"index", 0.0}};
    r.set_index = 3;

    const DiscriminationReport back = report_from_json(report_to_json(r));
    CHECK(back.rmsd == r.rmsd);
    CHECK(back.p_corr_expt == r.p_corr_expt);
    CHECK(back.seed == r.seed);
    CHECK((back.residuals - r.residuals).cwiseAbs().maxCoeff() == 0.0);
    CHECK(std::abs(back.rmsd - std::sqrt(back.residuals.squaredNorm() / 4.0)) < 1e-12);
}

TEST_CASE("aggregation: single ideal report lands in the first histogram bin") {
    SymmetricSetSpec spec{2, 2, random_coeffs(2, 12)};
    std::vector<DiscriminationReport> reports{
        run_set(spec, RunMode::Ideal, OpticalGeometry{}, NoiseModel::none(), 0)};
    const CampaignSummary summary = aggregate(std::move(reports));
    CHECK(summary.total_sets == 1);
    CHECK(summary.total_states == 2);
    REQUIRE(summary.rmsd_histogram.size() == 1);
    CHECK(summary.rmsd_histogram[0] == 1);
}

TEST_CASE("cascade surface corner values") {
    // alpha = 0 gives maximally distinguishable states; alpha = 1 at j0 = 1
    // matches the closed form evaluated on the cascade coefficients.
    CampaignConfig config;
    CampaignEntry entry;
    entry.dim = 5;
    entry.num_states = 5;
    entry.parametrization.kind = Parametrization::Kind::CascadeGrid;
    entry.parametrization.alpha_points = 2;  // alpha in {0, 1}
    entry.mode = RunMode::Ideal;
    config.entries.push_back(entry);

    const auto reports = run_campaign(config);
    REQUIRE(reports.size() == 8);  // 4 j0 values x 2 alphas
    for (const auto& r : reports) {
        if (r.params.at("alpha") == 0.0)
            CHECK(r.p_corr_theory == doctest::Approx(1.0).epsilon(1e-12));
        if (r.params.at("alpha") == 1.0 && r.params.at("j0") == 1.0) {
            const RealVec c = cascade_coeffs(5, {1, 1.0});
            const double expected = c.sum() * c.sum() / 5.0;
            CHECK(r.p_corr_theory == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("emitted files: curve data matches the two-state bound") {
    TempDir dir("qsd_emit_test");
    CampaignConfig config;
    CampaignEntry entry;
    entry.dim = 2;
    entry.num_states = 2;
    entry.parametrization.kind = Parametrization::Kind::HypersphericalGrid;
    entry.parametrization.points_per_angle = 181;
    entry.mode = RunMode::Ideal;
    config.entries.push_back(entry);

    const CampaignSummary summary = aggregate(run_campaign(config));
    emit_reports(summary, dir.path);

    CHECK(fs::exists(dir.path / "campaign_summary.json"));
    CHECK(fs::exists(dir.path / "rmsd_histogram.dat"));
    CHECK(fs::exists(dir.path / "set_0000_D2_N2_hyperspherical.json"));
    CHECK(fs::exists(dir.path / "set_0000_D2_N2_hyperspherical_theory.csv"));

    std::ifstream curve(dir.path / "pcorr_curve_D2_N2_hyperspherical.dat");
    REQUIRE(curve.good());
    std::string line;
    int rows = 0;
    while (std::getline(curve, line)) {
        std::istringstream cells(line);
        double theta = 0, theory = 0, expt = 0;
        cells >> theta >> theory >> expt;
        CHECK(std::abs(theory - 0.5 * (1.0 + std::sin(theta))) < 1e-12);
        CHECK(expt == theory);
        ++rows;
    }
    CHECK(rows == 181);
}

TEST_CASE("emitted files are byte-identical across reruns") {
    TempDir dir_a("qsd_emit_a");
    TempDir dir_b("qsd_emit_b");
    CampaignConfig config;
    CampaignEntry entry;
    entry.dim = 2;
    entry.num_states = 3;
    entry.parametrization.kind = Parametrization::Kind::Random;
    entry.parametrization.count = 2;
    entry.parametrization.seed = 8;
    entry.mode = RunMode::OpticalPixel;
    entry.noise = NoiseModel::camera_defaults(0);
    config.entries.push_back(entry);
    config.master_seed = 555;

    emit_reports(aggregate(run_campaign(config)), dir_a.path);
    emit_reports(aggregate(run_campaign(config)), dir_b.path);

    int compared = 0;
    for (const auto& file : fs::directory_iterator(dir_a.path)) {
        const auto other = dir_b.path / file.path().filename();
        REQUIRE(fs::exists(other));
        CHECK(read_text_file(file.path()) == read_text_file(other));
        ++compared;
    }
    CHECK(compared > 4);
}

TEST_CASE("empty campaign aggregates to an empty summary") {
    TempDir dir("qsd_emit_empty");
    const CampaignSummary summary = aggregate({});
    CHECK(summary.total_sets == 0);
    CHECK(summary.total_states == 0);
    emit_reports(summary, dir.path);
    CHECK(fs::exists(dir.path / "campaign_summary.json"));
    int set_files = 0;
    for (const auto& file : fs::directory_iterator(dir.path))
        if (file.path().filename().string().rfind("set_", 0) == 0) ++set_files;
    CHECK(set_files == 0);
}

TEST_CASE("higher preparation noise lowers fidelity and raises deviation") {
    Rng rng(31415);
    double low_noise_rmsd = 0, high_noise_rmsd = 0;
    double low_noise_fid = 0, high_noise_fid = 0;
    const int trials = 12;
    for (int i = 0; i < trials; ++i) {
        const auto spec = oracle::random_spec(rng, 6, 9);
        NoiseModel gentle = NoiseModel::camera_defaults(0);
        NoiseModel harsh = gentle;
        harsh.prep_amp_sigma *= 4;
        harsh.prep_phase_sigma *= 4;
        const auto a =
            run_set(spec, RunMode::OpticalPixel, OpticalGeometry{}, gentle, derive_seed(1, i));
        const auto b =
            run_set(spec, RunMode::OpticalPixel, OpticalGeometry{}, harsh, derive_seed(1, i));
        low_noise_rmsd += a.rmsd;
        high_noise_rmsd += b.rmsd;
        low_noise_fid += mean_fidelity(a);
        high_noise_fid += mean_fidelity(b);
    }
    CHECK(high_noise_rmsd > low_noise_rmsd);
    CHECK(high_noise_fid < low_noise_fid);
}
