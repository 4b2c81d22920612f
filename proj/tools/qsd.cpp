// qsd: symmetric-state discrimination toolkit.
//
// Subcommands: states, measure, simulate, tomo, campaign, report.
// Numeric payloads are locale-independent; exit status is 0 on success and
// nonzero on configuration or domain errors.

#include "qsd/campaign.hpp"
#include "qsd/measurement.hpp"
#include "qsd/optics.hpp"
#include "qsd/qudit.hpp"
#include "qsd/rng.hpp"
#include "qsd/serialize.hpp"
#include "qsd/tomography.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qsd;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> parse_csv_numbers(const std::string& text) {
    std::vector<double> values;
    std::istringstream in(text);
    std::string cell;
    while (std::getline(in, cell, ',')) {
        if (!cell.empty()) values.push_back(std::stod(cell));
    }
    return values;
}

// State-set selection shared by the single-set subcommands.
struct SetOptions {
    int dim = 2;
    int num_states = 2;
    std::string angles;
    int cascade_j0 = 0;
    double cascade_alpha = -1.0;
    std::optional<std::uint64_t> random_seed;
    std::string coeffs;

    void attach(CLI::App* cmd) {
        cmd->add_option("--dim", dim, "Hilbert-space dimension D")->required();
        cmd->add_option("--num", num_states, "number of states N (>= D)")->required();
        cmd->add_option("--angles", angles, "comma-separated polar angles (D-1 values, rad)");
        cmd->add_option("--cascade-j0", cascade_j0, "staircase start index");
        cmd->add_option("--cascade-alpha", cascade_alpha, "staircase depth in [0, 1]");
        auto* seed_opt = cmd->add_option("--random-seed", "random coefficient seed");
        seed_opt->each([this](const std::string& v) { random_seed = std::stoull(v); });
        cmd->add_option("--coeffs", coeffs, "explicit comma-separated coefficients");
    }

    SymmetricSetSpec resolve() const {
        RealVec c;
        if (!angles.empty()) {
            const auto values = parse_csv_numbers(angles);
            HypersphericalParams p;
            p.angles = Eigen::Map<const RealVec>(values.data(), values.size());
            c = hyperspherical_coeffs(p);
        } else if (cascade_j0 > 0) {
            if (cascade_alpha < 0.0)
                throw std::invalid_argument("--cascade-j0 requires --cascade-alpha");
            c = cascade_coeffs(dim, {cascade_j0, cascade_alpha});
        } else if (random_seed) {
            c = random_coeffs(dim, *random_seed);
        } else if (!coeffs.empty()) {
            const auto values = parse_csv_numbers(coeffs);
            c = Eigen::Map<const RealVec>(values.data(), values.size());
            c /= c.norm();
        } else {
            throw std::invalid_argument(
                "pick a coefficient source: --angles, --cascade-j0/--cascade-alpha, "
                "--random-seed, or --coeffs");
        }
        SymmetricSetSpec spec{dim, num_states, c};
        spec.validate();
        return spec;
    }
};

struct SimOptions {
    std::string config_path;
    std::uint64_t seed = 0;
    std::string mode = "optical-point";

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON with optional optics/noise sections");
        cmd->add_option("--seed", seed, "master seed");
        cmd->add_option("--mode", mode, "ideal | optical-point | optical-pixel");
    }

    std::pair<OpticalGeometry, NoiseModel> resolve() const {
        OpticalGeometry g;
        NoiseModel noise = NoiseModel::none();
        if (!config_path.empty()) {
            const json cfg = json::parse(read_text_file(config_path));
            if (cfg.contains("optics")) g = geometry_from_json(cfg.at("optics").dump());
            if (cfg.contains("noise")) noise = noise_from_json(cfg.at("noise").dump());
        }
        return {g, noise};
    }
};

void deliver(const std::string& content, const std::string& out_path,
             const std::string& default_name) {
    if (out_path.empty()) {
        std::cout << content;
        if (!content.empty() && content.back() != '\n') std::cout << '\n';
        return;
    }
    fs::path target(out_path);
    if (!target.has_extension()) {
        fs::create_directories(target);
        target /= default_name;
    } else if (target.has_parent_path()) {
        fs::create_directories(target.parent_path());
    }
    write_text_file(target, content);
    std::cout << "wrote " << target.string() << '\n';
}

json spec_json(const SymmetricSetSpec& spec) {
    return json{{"D", spec.dim},
                {"N", spec.num_states},
                {"c", json::parse(coefficients_to_json(spec.coeffs))}};
}

int cmd_states(const SetOptions& set, const std::string& out) {
    const SymmetricSetSpec spec = set.resolve();
    json states = json::array();
    for (const StateVector& psi : make_symmetric_set(spec)) {
        json amps = json::array();
        for (int n = 0; n < psi.size(); ++n)
            amps.push_back({psi[n].real(), psi[n].imag()});
        states.push_back(std::move(amps));
    }
    const json out_json{{"spec", spec_json(spec)}, {"states", states}};
    deliver(out_json.dump(2), out, "states.json");
    return 0;
}

int cmd_measure(const SetOptions& set, bool certificate, const std::string& out) {
    const SymmetricSetSpec spec = set.resolve();
    const ProbabilityTable table = outcome_table(spec);
    const CorrectProbability pc = p_correct(spec);

    json result{{"spec", spec_json(spec)},
                {"p_corr", pc.closed_form},
                {"p_corr_trace_form", pc.trace_form},
                {"p_err", pc.error_prob}};
    if (certificate) {
        const OptimalityCertificate cert = optimality_certificate(spec);
        result["certificate"] = {{"min_eigenvalue", cert.min_eigenvalue},
                                 {"tolerance", cert.tolerance},
                                 {"pass", cert.pass}};
    }

    if (out.empty()) {
        std::cout << result.dump(2) << '\n' << table_to_csv(table);
    } else {
        fs::create_directories(out);
        write_text_file(fs::path(out) / "measure.json", result.dump(2));
        write_text_file(fs::path(out) / "table_theory.csv", table_to_csv(table));
        std::cout << "wrote " << out << "/measure.json and table_theory.csv\n";
    }
    return 0;
}

int cmd_simulate(const SetOptions& set, const SimOptions& sim, const std::string& out) {
    const SymmetricSetSpec spec = set.resolve();
    const auto [geometry, noise] = sim.resolve();
    const RunMode mode = run_mode_from_string(sim.mode);
    DiscriminationReport report = run_set(spec, mode, geometry, noise, sim.seed);
    report.parametrization = "explicit";

    if (out.empty()) {
        std::cout << report_to_json(report) << '\n';
    } else {
        fs::create_directories(out);
        write_text_file(fs::path(out) / "report.json", report_to_json(report));
        write_text_file(fs::path(out) / "table_theory.csv", table_to_csv(report.theory));
        write_text_file(fs::path(out) / "table_expt.csv", table_to_csv(report.experiment));
        std::cout << "wrote " << out << "/report.json (rmsd " << format_double(report.rmsd)
                  << ")\n";
    }
    return 0;
}

int cmd_tomo(const SetOptions& set, const SimOptions& sim, int state_index,
             const std::string& out) {
    const SymmetricSetSpec spec = set.resolve();
    auto [geometry, noise] = sim.resolve();
    noise.seed = derive_seed(sim.seed, state_index);
    const StateVector target = symmetric_state(spec, state_index);

    json result{{"spec", spec_json(spec)}, {"state_index", state_index}};
    if (spec.dim == 2) {
        const MubProbabilities probs = mub_probabilities(target, geometry, noise);
        const ComplexMatrix rho_linear = mub_linear_inversion(probs);
        const MleResult refined = mle_refine(probs, rho_linear);
        json p = json::array();
        for (int mu = 0; mu < 3; ++mu) p.push_back({probs(mu, 0), probs(mu, 1)});
        json rho = json::array();
        for (int r = 0; r < 2; ++r) {
            json row = json::array();
            for (int c = 0; c < 2; ++c)
                row.push_back({refined.rho(r, c).real(), refined.rho(r, c).imag()});
            rho.push_back(std::move(row));
        }
        result["method"] = "mub+mle";
        result["probabilities"] = p;
        result["rho"] = rho;
        result["converged"] = refined.converged;
        result["fidelity"] = fidelity(refined.rho, target);
    } else {
        const RealVec moduli = spec.coeffs;
        RealVec phases(spec.dim);
        for (int n = 0; n < spec.dim; ++n)
            phases[n] = 2.0 * kPi * state_index * n / spec.num_states;
        const StateVector t = transmission_coefficients(moduli, phases);

        const CaptureResult focal = capture_pattern_with_prepared(
            t, geometry, noise, PlaneSpec::focal(), SamplingMode::Point);
        NoiseModel image_noise = noise;
        image_noise.prep_amp_sigma = 0.0;
        image_noise.prep_phase_sigma = 0.0;
        image_noise.seed = derive_seed(noise.seed, 1);
        const IntensityPattern image = capture_pattern(focal.prepared, geometry, image_noise,
                                                       PlaneSpec::image(), SamplingMode::Point);

        // Slit intensities from the image plane, one reading per slit center.
        RealVec slit_intensity(spec.dim);
        for (int l = 0; l < spec.dim; ++l) {
            const double center = -(l - 0.5 * (spec.dim - 1)) * geometry.d;
            double value = 0.0;
            for (std::size_t i = 0; i < image.positions.size(); ++i)
                if (std::abs(image.positions[i] - center) <= geometry.a)
                    value = std::max(value, image.intensities[i]);
            slit_intensity[l] = value;
        }

        PhaseRetrievalOptions options;
        options.seed = derive_seed(sim.seed, 17);
        const PhaseRetrievalResult res =
            phase_retrieval(slit_intensity, focal.pattern, geometry, options);
        double fid = fidelity(res.estimate, target);
        if (res.twin) fid = std::max(fid, fidelity(*res.twin, target));

        json estimate = json::array();
        for (int n = 0; n < res.estimate.size(); ++n)
            estimate.push_back({res.estimate[n].real(), res.estimate[n].imag()});
        result["method"] = "phase-retrieval";
        result["estimate"] = estimate;
        result["residual"] = res.residual;
        result["restarts_used"] = res.restarts_used;
        result["underdetermined"] = res.underdetermined;
        result["fidelity"] = fid;
    }
    deliver(result.dump(2), out, "tomo.json");
    return 0;
}

int cmd_campaign(const std::string& config_path, bool reference, const std::string& mode_override,
                 std::optional<std::uint64_t> seed_override, const std::string& out) {
    CampaignConfig config;
    if (reference) {
        const RunMode mode =
            run_mode_from_string(mode_override.empty() ? "ideal" : mode_override);
        config = reference_campaign_config(mode, seed_override.value_or(42));
    } else {
        if (config_path.empty())
            throw std::invalid_argument("campaign needs --config or --reference-campaign");
        config = campaign_config_from_json(read_text_file(config_path));
        if (!mode_override.empty()) {
            const RunMode mode = run_mode_from_string(mode_override);
            for (auto& entry : config.entries) entry.mode = mode;
        }
        if (seed_override) config.master_seed = *seed_override;
    }
    if (!out.empty()) config.output_dir = out;

    const CampaignSummary summary = aggregate(run_campaign(config));
    std::cout << "campaign: " << summary.total_sets << " sets, " << summary.total_states
              << " states\n";
    if (!config.output_dir.empty()) {
        emit_reports(summary, config.output_dir);
        std::cout << "wrote reports to " << config.output_dir << '\n';
    } else {
        double max_rmsd = 0.0;
        for (const auto& r : summary.reports) max_rmsd = std::max(max_rmsd, r.rmsd);
        std::cout << "max rmsd " << format_double(max_rmsd) << '\n';
    }
    return 0;
}

int cmd_report(const std::string& in_dir, const std::string& out_dir, double bin_width) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(in_dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("set_", 0) == 0 && entry.path().extension() == ".json")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<DiscriminationReport> reports;
    reports.reserve(files.size());
    for (const auto& file : files) reports.push_back(report_from_json(read_text_file(file)));

    const CampaignSummary summary = aggregate(std::move(reports), bin_width);
    const fs::path target = out_dir.empty() ? fs::path(in_dir) : fs::path(out_dir);
    emit_reports(summary, target);
    std::cout << "aggregated " << summary.total_sets << " reports into " << target.string()
              << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"minimum-error discrimination of symmetric states: theory, optical simulation, "
                 "tomography, campaigns"};
    app.require_subcommand(1);

    SetOptions states_set, measure_set, simulate_set, tomo_set;
    SimOptions simulate_sim, tomo_sim;
    std::string states_out, measure_out, simulate_out, tomo_out, campaign_out, report_out;
    bool certificate = false;
    int tomo_state_index = 0;

    auto* states = app.add_subcommand("states", "emit coefficients and state vectors");
    states_set.attach(states);
    states->add_option("--out", states_out, "output file or directory");

    auto* measure = app.add_subcommand("measure", "theory tables, success probability, "
                                                  "optimality certificate");
    measure_set.attach(measure);
    measure->add_flag("--certificate", certificate, "also run the optimality check");
    measure->add_option("--out", measure_out, "output directory");

    auto* simulate = app.add_subcommand("simulate", "run the optical pipeline for one set");
    simulate_set.attach(simulate);
    simulate_sim.attach(simulate);
    simulate->add_option("--out", simulate_out, "output directory");

    auto* tomo = app.add_subcommand("tomo", "characterize one prepared state");
    tomo_set.attach(tomo);
    tomo_sim.attach(tomo);
    tomo->add_option("--state-index", tomo_state_index, "which state of the set to prepare");
    tomo->add_option("--out", tomo_out, "output file or directory");

    std::string campaign_config, campaign_mode;
    bool reference = false;
    std::optional<std::uint64_t> campaign_seed;
    auto* campaign = app.add_subcommand("campaign", "run a full campaign from a config");
    campaign->add_option("--config", campaign_config, "campaign JSON config");
    campaign->add_flag("--reference-campaign", reference, "use the built-in 1851-set campaign");
    campaign->add_option("--mode", campaign_mode, "override mode for every entry");
    auto* seed_opt = campaign->add_option("--seed", "override the master seed");
    seed_opt->each([&campaign_seed](const std::string& v) { campaign_seed = std::stoull(v); });
    campaign->add_option("--out", campaign_out, "output directory for reports");

    std::string report_in;
    double report_bin_width = 0.0025;
    auto* report = app.add_subcommand("report", "aggregate per-set reports and emit plot data");
    report->add_option("--in", report_in, "directory of per-set JSON reports")->required();
    report->add_option("--out", report_out, "output directory (default: --in)");
    report->add_option("--bin-width", report_bin_width, "histogram bin width");

    CLI11_PARSE(app, argc, argv);

    try {
        if (states->parsed()) return cmd_states(states_set, states_out);
        if (measure->parsed()) return cmd_measure(measure_set, certificate, measure_out);
        if (simulate->parsed()) return cmd_simulate(simulate_set, simulate_sim, simulate_out);
        if (tomo->parsed()) return cmd_tomo(tomo_set, tomo_sim, tomo_state_index, tomo_out);
        if (campaign->parsed())
            return cmd_campaign(campaign_config, reference, campaign_mode, campaign_seed,
                                campaign_out);
        if (report->parsed()) return cmd_report(report_in, report_out, report_bin_width);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
