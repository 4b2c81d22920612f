#pragma once

#include "qsd/measurement.hpp"
#include "qsd/optics.hpp"
#include "qsd/qudit.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace qsd {

enum class RunMode { Ideal, OpticalPoint, OpticalPixel };

RunMode run_mode_from_string(const std::string& name);
std::string to_string(RunMode mode);

/// How the coefficient vectors of one campaign entry are generated.
struct Parametrization {
    enum class Kind { HypersphericalGrid, CascadeGrid, Random, Explicit };
    Kind kind = Kind::Random;

    int points_per_angle = 37;  // hyperspherical: inclusive grid on [0, pi] per angle
    int j0_min = 1;             // cascade: j0 range; j0_max = -1 means D-1
    int j0_max = -1;
    int alpha_points = 21;      // cascade: inclusive grid on [0, 1]
    int count = 1;              // random
    std::uint64_t seed = 0;     // random
    std::vector<RealVec> coefficients;  // explicit

    std::string kind_name() const;
};

struct CampaignEntry {
    int dim = 2;
    int num_states = 2;
    Parametrization parametrization;
    OpticalGeometry optics;
    NoiseModel noise;
    RunMode mode = RunMode::Ideal;
};

struct CampaignConfig {
    std::vector<CampaignEntry> entries;
    std::uint64_t master_seed = 0;
    std::string output_dir;

    void validate() const;  // throws std::invalid_argument on malformed grids
};

CampaignConfig campaign_config_from_json(const std::string& json_text);
std::string campaign_config_to_json(const CampaignConfig& config);

/// Built-in 1851-set survey campaign: qubit angle grids of 15 points for
/// N in {2, 3, 7}, qutrit 15x15 grids for N in {3, 5}, cascade grids over
/// all j0 with 20 alpha points for D = 4..9 paired with N in {(4,6),(5,7),
/// (6,7),(7,11),(8,12),(9,13)}, and three random sets for each D = 10..21
/// (N = D except 11 -> 15 and 17 -> 23); random-entry seeds derive from
/// the master seed.
CampaignConfig reference_campaign_config(RunMode mode, std::uint64_t master_seed);

struct LabeledSpec {
    SymmetricSetSpec spec;
    std::string parametrization;
    std::map<std::string, double> params;
    int entry_index = 0;
    int set_index = 0;
};

/// Deterministic enumeration of every set in the campaign, in entry order.
std::vector<LabeledSpec> enumerate_sets(const CampaignConfig& config);

struct DiscriminationReport {
    SymmetricSetSpec spec;
    std::string parametrization;
    std::map<std::string, double> params;
    RunMode mode = RunMode::Ideal;
    std::uint64_t seed = 0;
    int set_index = 0;

    double p_corr_theory = 0.0;  // closed form
    double p_corr_expt = 0.0;    // diagonal mean of the estimated table
    double p_err_theory = 0.0;
    ProbabilityTable theory;
    ProbabilityTable experiment;
    RealMatrix residuals;  // theory - experiment, entry (k, j)
    double rmsd = 0.0;     // sqrt(sum residuals^2 / N^2)
    std::vector<double> fidelities;  // per-state preparation fidelity (optical modes)
    std::vector<int> degenerate_columns;
};

/// Runs one set. Ideal mode copies the theory table into the experiment
/// slot; optical modes simulate every state through the camera pipeline and
/// estimate the table from the recorded patterns. Per-state captures use
/// seeds derived from `seed`.
DiscriminationReport run_set(const SymmetricSetSpec& spec, RunMode mode,
                             const OpticalGeometry& optics, const NoiseModel& noise,
                             std::uint64_t seed);

/// Runs every enumerated set with per-set seeds derived from the master
/// seed by set index, so results are schedule-independent.
std::vector<DiscriminationReport> run_campaign(const CampaignConfig& config);

/// 1.0 when the report carries no per-state fidelities (ideal mode).
double mean_fidelity(const DiscriminationReport& report);

struct CampaignSummary {
    int total_sets = 0;
    long total_states = 0;
    double bin_width = 0.0025;
    std::vector<int> rmsd_histogram;  // bin i counts rmsd in [i*w, (i+1)*w)
    std::vector<DiscriminationReport> reports;
};

CampaignSummary aggregate(std::vector<DiscriminationReport> reports, double bin_width = 0.0025);

std::string report_to_json(const DiscriminationReport& report);
DiscriminationReport report_from_json(const std::string& json_text);

/// Writes per-set JSON reports and probability-table CSVs, the campaign
/// summary JSON, and whitespace-separated plot data (curves, surfaces,
/// histogram, fidelity-vs-RMSD pairing). File names embed set index, D, N
/// and the parametrization. Reruns with the same config and master seed
/// produce byte-identical payloads.
void emit_reports(const CampaignSummary& summary, const std::filesystem::path& output_dir);

}  // namespace qsd
