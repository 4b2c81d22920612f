#include "qsd/campaign.hpp"

#include "json_io.hpp"
#include "qsd/rng.hpp"
#include "qsd/serialize.hpp"
#include "qsd/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qsd {

namespace {
constexpr double kPi = std::numbers::pi;
using detail::json;
}  // namespace

RunMode run_mode_from_string(const std::string& name) {
    if (name == "ideal") return RunMode::Ideal;
    if (name == "optical-point") return RunMode::OpticalPoint;
    if (name == "optical-pixel") return RunMode::OpticalPixel;
    throw std::invalid_argument("unknown run mode: " + name);
}

std::string to_string(RunMode mode) {
    switch (mode) {
        case RunMode::Ideal: return "ideal";
        case RunMode::OpticalPoint: return "optical-point";
        case RunMode::OpticalPixel: return "optical-pixel";
    }
    return "ideal";
}

std::string Parametrization::kind_name() const {
    switch (kind) {
        case Kind::HypersphericalGrid: return "hyperspherical";
        case Kind::CascadeGrid: return "cascade";
        case Kind::Random: return "random";
        case Kind::Explicit: return "explicit";
    }
    return "unknown";
}

void CampaignConfig::validate() const {
    for (const auto& e : entries) {
        if (e.dim < 2) throw std::invalid_argument("campaign entry: D must be >= 2");
        if (e.num_states < e.dim)
            throw std::invalid_argument("campaign entry: N must be >= D");
        e.optics.validate();
        e.noise.validate();
        const Parametrization& p = e.parametrization;
        switch (p.kind) {
            case Parametrization::Kind::HypersphericalGrid:
                if (p.points_per_angle < 1)
                    throw std::invalid_argument("campaign entry: empty angle grid");
                break;
            case Parametrization::Kind::CascadeGrid: {
                const int jmax = p.j0_max < 0 ? e.dim - 1 : p.j0_max;
                if (p.alpha_points < 1)
                    throw std::invalid_argument("campaign entry: empty alpha grid");
                if (p.j0_min < 1 || jmax > e.dim - 1 || p.j0_min > jmax)
                    throw std::invalid_argument("campaign entry: bad j0 range");
                break;
            }
            case Parametrization::Kind::Random:
                if (p.count < 1)
                    throw std::invalid_argument("campaign entry: random count must be >= 1");
                break;
            case Parametrization::Kind::Explicit:
                if (p.coefficients.empty())
                    throw std::invalid_argument("campaign entry: no explicit coefficients");
                for (const auto& c : p.coefficients)
                    if (c.size() != e.dim)
                        throw std::invalid_argument(
                            "campaign entry: explicit coefficient length mismatch");
                break;
        }
    }
}

CampaignConfig campaign_config_from_json(const std::string& json_text) {
    const json j = json::parse(json_text);
    CampaignConfig config;
    config.master_seed = j.value("master_seed", std::uint64_t{0});
    config.output_dir = j.value("output_dir", std::string{});
    if (j.contains("entries")) {
        for (const json& e : j.at("entries")) {
            CampaignEntry entry;
            entry.dim = e.at("D").get<int>();
            entry.num_states = e.at("N").get<int>();
            const json& p = e.at("parametrization");
            const std::string type = p.at("type").get<std::string>();
            if (type == "hyperspherical_grid") {
                entry.parametrization.kind = Parametrization::Kind::HypersphericalGrid;
                entry.parametrization.points_per_angle =
                    p.value("points_per_angle", entry.parametrization.points_per_angle);
            } else if (type == "cascade_grid") {
                entry.parametrization.kind = Parametrization::Kind::CascadeGrid;
                entry.parametrization.j0_min = p.value("j0_min", 1);
                entry.parametrization.j0_max = p.value("j0_max", -1);
                entry.parametrization.alpha_points =
                    p.value("alpha_points", entry.parametrization.alpha_points);
            } else if (type == "random") {
                entry.parametrization.kind = Parametrization::Kind::Random;
                entry.parametrization.count = p.value("count", 1);
                entry.parametrization.seed = p.value("seed", std::uint64_t{0});
            } else if (type == "explicit") {
                entry.parametrization.kind = Parametrization::Kind::Explicit;
                for (const json& c : p.at("coefficients"))
                    entry.parametrization.coefficients.push_back(detail::coeffs_from(c));
            } else {
                throw std::invalid_argument("unknown parametrization type: " + type);
            }
            if (e.contains("optics")) entry.optics = detail::geometry_from(e.at("optics"));
            if (e.contains("noise")) entry.noise = detail::noise_from(e.at("noise"));
            entry.mode = run_mode_from_string(e.value("mode", std::string{"ideal"}));
            config.entries.push_back(std::move(entry));
        }
    }
    config.validate();
    return config;
}

std::string campaign_config_to_json(const CampaignConfig& config) {
    json entries = json::array();
    for (const auto& e : config.entries) {
        json p;
        switch (e.parametrization.kind) {
            case Parametrization::Kind::HypersphericalGrid:
                p = {{"type", "hyperspherical_grid"},
                     {"points_per_angle", e.parametrization.points_per_angle}};
                break;
            case Parametrization::Kind::CascadeGrid:
                p = {{"type", "cascade_grid"},
                     {"j0_min", e.parametrization.j0_min},
                     {"j0_max", e.parametrization.j0_max},
                     {"alpha_points", e.parametrization.alpha_points}};
                break;
            case Parametrization::Kind::Random:
                p = {{"type", "random"},
                     {"count", e.parametrization.count},
                     {"seed", e.parametrization.seed}};
                break;
            case Parametrization::Kind::Explicit: {
                json coeffs = json::array();
                for (const auto& c : e.parametrization.coefficients)
                    coeffs.push_back(detail::coeffs_json(c));
                p = {{"type", "explicit"}, {"coefficients", coeffs}};
                break;
            }
        }
        entries.push_back(json{{"D", e.dim},
                               {"N", e.num_states},
                               {"parametrization", p},
                               {"optics", detail::geometry_json(e.optics)},
                               {"noise", detail::noise_json(e.noise)},
                               {"mode", to_string(e.mode)}});
    }
    return json{{"master_seed", config.master_seed},
                {"output_dir", config.output_dir},
                {"entries", entries}}
        .dump(2);
}

CampaignConfig reference_campaign_config(RunMode mode, std::uint64_t master_seed) {
    CampaignConfig config;
    config.master_seed = master_seed;
    const NoiseModel noise = mode == RunMode::OpticalPixel
                                 ? NoiseModel::camera_defaults(master_seed)
                                 : NoiseModel::none();
    auto push = [&](int dim, int n, Parametrization p) {
        CampaignEntry e;
        e.dim = dim;
        e.num_states = n;
        e.parametrization = std::move(p);
        e.noise = noise;
        e.mode = mode;
        config.entries.push_back(std::move(e));
    };

    Parametrization hyper;
    hyper.kind = Parametrization::Kind::HypersphericalGrid;
    hyper.points_per_angle = 15;
    for (int n : {2, 3, 7}) push(2, n, hyper);
    for (int n : {3, 5}) push(3, n, hyper);

    const std::pair<int, int> cascade_rows[] = {{4, 6}, {5, 7}, {6, 7},
                                                {7, 11}, {8, 12}, {9, 13}};
    for (const auto& [dim, n2] : cascade_rows) {
        Parametrization cascade;
        cascade.kind = Parametrization::Kind::CascadeGrid;
        cascade.alpha_points = 20;
        push(dim, dim, cascade);
        push(dim, n2, cascade);
    }

    for (int dim = 10; dim <= 21; ++dim) {
        const int n = dim == 11 ? 15 : dim == 17 ? 23 : dim;
        Parametrization random;
        random.kind = Parametrization::Kind::Random;
        random.count = 3;
        random.seed = derive_seed(master_seed, 1000 + dim);
        push(dim, n, random);
    }
    return config;
}

std::vector<LabeledSpec> enumerate_sets(const CampaignConfig& config) {
    config.validate();
    std::vector<LabeledSpec> out;
    int set_index = 0;
    for (int entry_index = 0; entry_index < static_cast<int>(config.entries.size());
         ++entry_index) {
        const CampaignEntry& e = config.entries[entry_index];
        const Parametrization& p = e.parametrization;
        auto push = [&](RealVec coeffs, std::map<std::string, double> params) {
            LabeledSpec ls;
            ls.spec = SymmetricSetSpec{e.dim, e.num_states, std::move(coeffs)};
            ls.spec.validate();
            ls.parametrization = p.kind_name();
            ls.params = std::move(params);
            ls.entry_index = entry_index;
            ls.set_index = set_index++;
            out.push_back(std::move(ls));
        };

        switch (p.kind) {
            case Parametrization::Kind::HypersphericalGrid: {
                const int n_angles = e.dim - 1;
                const int pts = p.points_per_angle;
                std::vector<int> idx(n_angles, 0);
                while (true) {
                    HypersphericalParams hp;
                    hp.angles.resize(n_angles);
                    std::map<std::string, double> params;
                    for (int m = 0; m < n_angles; ++m) {
                        hp.angles[m] = pts == 1 ? 0.0 : idx[m] * kPi / (pts - 1);
                        const std::string name =
                            n_angles == 1 ? "theta" : "theta" + std::to_string(m + 1);
                        params[name] = hp.angles[m];
                    }
                    push(hyperspherical_coeffs(hp), std::move(params));
                    int m = n_angles - 1;
                    while (m >= 0 && ++idx[m] == pts) idx[m--] = 0;
                    if (m < 0) break;
                }
                break;
            }
            case Parametrization::Kind::CascadeGrid: {
                const int jmax = p.j0_max < 0 ? e.dim - 1 : p.j0_max;
                for (int j0 = p.j0_min; j0 <= jmax; ++j0) {
                    for (int ai = 0; ai < p.alpha_points; ++ai) {
                        const double alpha =
                            p.alpha_points == 1 ? 0.0
                                                : ai / static_cast<double>(p.alpha_points - 1);
                        push(cascade_coeffs(e.dim, {j0, alpha}),
                             {{"j0", static_cast<double>(j0)}, {"alpha", alpha}});
                    }
                }
                break;
            }
            case Parametrization::Kind::Random:
                for (int i = 0; i < p.count; ++i)
                    push(random_coeffs(e.dim, derive_seed(p.seed, i)),
                         {{"index", static_cast<double>(i)}});
                break;
            case Parametrization::Kind::Explicit:
                for (std::size_t i = 0; i < p.coefficients.size(); ++i)
                    push(p.coefficients[i], {{"index", static_cast<double>(i)}});
                break;
        }
    }
    return out;
}

DiscriminationReport run_set(const SymmetricSetSpec& spec, RunMode mode,
                             const OpticalGeometry& optics, const NoiseModel& noise,
                             std::uint64_t seed) {
    spec.validate();
    optics.validate();
    noise.validate();

    DiscriminationReport report;
    report.spec = spec;
    report.mode = mode;
    report.seed = seed;
    report.theory = outcome_table(spec);
    const CorrectProbability pc = p_correct(spec);
    report.p_corr_theory = pc.closed_form;
    report.p_err_theory = pc.error_prob;

    const int n = spec.num_states;
    if (mode == RunMode::Ideal) {
        report.experiment = report.theory;
    } else {
        const SamplingMode sampling =
            mode == RunMode::OpticalPoint ? SamplingMode::Point : SamplingMode::Pixel;
        const std::vector<double> detectors = detector_positions(n, optics);
        std::vector<IntensityPattern> patterns;
        patterns.reserve(n);
        for (int j = 0; j < n; ++j) {
            RealVec phases(spec.dim);
            for (int m = 0; m < spec.dim; ++m) phases[m] = 2.0 * kPi * j * m / n;
            const StateVector t = transmission_coefficients(spec.coeffs, phases);
            NoiseModel state_noise = noise;
            state_noise.seed = derive_seed(seed, j);
            CaptureResult cap = capture_pattern_with_prepared(
                t, optics, state_noise, PlaneSpec::focal(), sampling, detectors);
            report.fidelities.push_back(fidelity(cap.prepared, symmetric_state(spec, j)));
            patterns.push_back(std::move(cap.pattern));
        }
        ProbabilityEstimate est = estimate_probabilities(patterns, n, optics, sampling);
        report.experiment = std::move(est.table);
        report.degenerate_columns = std::move(est.degenerate_columns);
    }

    report.p_corr_expt = report.experiment.entries.diagonal().mean();
    report.residuals = report.theory.entries - report.experiment.entries;
    report.rmsd = std::sqrt(report.residuals.squaredNorm() / (static_cast<double>(n) * n));
    return report;
}

std::vector<DiscriminationReport> run_campaign(const CampaignConfig& config) {
    const std::vector<LabeledSpec> sets = enumerate_sets(config);
    std::vector<DiscriminationReport> reports;
    reports.reserve(sets.size());
    for (const LabeledSpec& ls : sets) {
        const CampaignEntry& entry = config.entries[ls.entry_index];
        DiscriminationReport report = run_set(ls.spec, entry.mode, entry.optics, entry.noise,
                                              derive_seed(config.master_seed, ls.set_index));
        report.parametrization = ls.parametrization;
        report.params = ls.params;
        report.set_index = ls.set_index;
        reports.push_back(std::move(report));
    }
    return reports;
}

double mean_fidelity(const DiscriminationReport& report) {
    if (report.fidelities.empty()) return 1.0;
    double sum = 0.0;
    for (double f : report.fidelities) sum += f;
    return sum / report.fidelities.size();
}

CampaignSummary aggregate(std::vector<DiscriminationReport> reports, double bin_width) {
    if (bin_width <= 0.0) throw std::invalid_argument("aggregate: bin width must be positive");
    CampaignSummary summary;
    summary.bin_width = bin_width;
    summary.total_sets = static_cast<int>(reports.size());
    for (const auto& r : reports) summary.total_states += r.spec.num_states;
    if (!reports.empty()) {
        double max_rmsd = 0.0;
        for (const auto& r : reports) max_rmsd = std::max(max_rmsd, r.rmsd);
        summary.rmsd_histogram.assign(static_cast<int>(max_rmsd / bin_width) + 1, 0);
        for (const auto& r : reports)
            ++summary.rmsd_histogram[static_cast<int>(r.rmsd / bin_width)];
    }
    summary.reports = std::move(reports);
    return summary;
}

namespace {

json matrix_rows_by_state(const RealMatrix& entries) {
    // Row j lists the outcome-k values for input state j (matches the CSV layout).
    json rows = json::array();
    for (int j = 0; j < entries.cols(); ++j) {
        json row = json::array();
        for (int k = 0; k < entries.rows(); ++k) row.push_back(entries(k, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

RealMatrix matrix_from_state_rows(const json& rows) {
    const int n = static_cast<int>(rows.size());
    RealMatrix entries(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) entries(k, j) = rows[j][k].get<double>();
    return entries;
}

}  // namespace

std::string report_to_json(const DiscriminationReport& report) {
    json params = json::object();
    for (const auto& [key, value] : report.params) params[key] = value;
    const json j{{"set_index", report.set_index},
                 {"parametrization", report.parametrization},
                 {"params", params},
                 {"mode", to_string(report.mode)},
                 {"seed", report.seed},
                 {"spec",
                  {{"D", report.spec.dim},
                   {"N", report.spec.num_states},
                   {"c", detail::coeffs_json(report.spec.coeffs)}}},
                 {"p_corr_theory", report.p_corr_theory},
                 {"p_corr_expt", report.p_corr_expt},
                 {"p_err_theory", report.p_err_theory},
                 {"rmsd", report.rmsd},
                 {"theory", matrix_rows_by_state(report.theory.entries)},
                 {"experiment", matrix_rows_by_state(report.experiment.entries)},
                 {"residuals", matrix_rows_by_state(report.residuals)},
                 {"fidelities", report.fidelities},
                 {"degenerate_columns", report.degenerate_columns}};
    return j.dump(2);
}

DiscriminationReport report_from_json(const std::string& json_text) {
    const json j = json::parse(json_text);
    DiscriminationReport report;
    report.set_index = j.at("set_index").get<int>();
    report.parametrization = j.at("parametrization").get<std::string>();
    for (const auto& [key, value] : j.at("params").items())
        report.params[key] = value.get<double>();
    report.mode = run_mode_from_string(j.at("mode").get<std::string>());
    report.seed = j.at("seed").get<std::uint64_t>();
    report.spec.dim = j.at("spec").at("D").get<int>();
    report.spec.num_states = j.at("spec").at("N").get<int>();
    report.spec.coeffs = detail::coeffs_from(j.at("spec").at("c"));
    report.p_corr_theory = j.at("p_corr_theory").get<double>();
    report.p_corr_expt = j.at("p_corr_expt").get<double>();
    report.p_err_theory = j.at("p_err_theory").get<double>();
    report.rmsd = j.at("rmsd").get<double>();
    report.theory = ProbabilityTable{report.spec.num_states,
                                     matrix_from_state_rows(j.at("theory"))};
    report.experiment = ProbabilityTable{report.spec.num_states,
                                         matrix_from_state_rows(j.at("experiment"))};
    report.residuals = matrix_from_state_rows(j.at("residuals"));
    report.fidelities = j.at("fidelities").get<std::vector<double>>();
    report.degenerate_columns = j.at("degenerate_columns").get<std::vector<int>>();
    return report;
}

namespace {

std::string set_file_prefix(const DiscriminationReport& r) {
    std::ostringstream name;
    name << "set_" << std::setw(4) << std::setfill('0') << r.set_index << "_D" << r.spec.dim
         << "_N" << r.spec.num_states << "_" << r.parametrization;
    return name.str();
}

}  // namespace

void emit_reports(const CampaignSummary& summary, const std::filesystem::path& output_dir) {
    std::error_code ec;
    std::filesystem::create_directories(output_dir, ec);
    if (ec)
        throw std::runtime_error("emit_reports: cannot create " + output_dir.string() + ": " +
                                 ec.message());

    json set_rows = json::array();
    for (const auto& r : summary.reports) {
        const std::string prefix = set_file_prefix(r);
        write_text_file(output_dir / (prefix + ".json"), report_to_json(r));
        write_text_file(output_dir / (prefix + "_theory.csv"), table_to_csv(r.theory));
        write_text_file(output_dir / (prefix + "_expt.csv"), table_to_csv(r.experiment));

        json params = json::object();
        for (const auto& [key, value] : r.params) params[key] = value;
        set_rows.push_back(json{{"set_index", r.set_index},
                                {"D", r.spec.dim},
                                {"N", r.spec.num_states},
                                {"parametrization", r.parametrization},
                                {"params", params},
                                {"p_corr_theory", r.p_corr_theory},
                                {"p_corr_expt", r.p_corr_expt},
                                {"rmsd", r.rmsd},
                                {"mean_fidelity", mean_fidelity(r)}});
    }

    const json summary_json{{"total_sets", summary.total_sets},
                            {"total_states", summary.total_states},
                            {"bin_width", summary.bin_width},
                            {"rmsd_histogram", summary.rmsd_histogram},
                            {"sets", set_rows}};
    write_text_file(output_dir / "campaign_summary.json", summary_json.dump(2));

    // Histogram plot data: bin lower edge, count.
    {
        std::ostringstream out;
        for (std::size_t i = 0; i < summary.rmsd_histogram.size(); ++i)
            out << format_double(i * summary.bin_width) << ' ' << summary.rmsd_histogram[i]
                << '\n';
        write_text_file(output_dir / "rmsd_histogram.dat", out.str());
    }

    // Per-set pairing of preparation quality and deviation.
    {
        std::ostringstream out;
        for (const auto& r : summary.reports)
            out << r.set_index << ' ' << format_double(mean_fidelity(r)) << ' '
                << format_double(-r.rmsd) << '\n';
        write_text_file(output_dir / "fidelity_vs_rmsd.dat", out.str());
    }

    // Success-probability curves and surfaces grouped by (parametrization, D, N).
    std::map<std::string, std::vector<const DiscriminationReport*>> groups;
    for (const auto& r : summary.reports) {
        std::ostringstream key;
        key << "D" << r.spec.dim << "_N" << r.spec.num_states << "_" << r.parametrization;
        groups[key.str()].push_back(&r);
    }
    for (const auto& [key, rows] : groups) {
        const DiscriminationReport& first = *rows.front();
        std::ostringstream out;
        std::string stem;
        if (first.parametrization == "hyperspherical" && first.params.count("theta")) {
            stem = "pcorr_curve_" + key;
            for (const auto* r : rows)
                out << format_double(r->params.at("theta")) << ' '
                    << format_double(r->p_corr_theory) << ' ' << format_double(r->p_corr_expt)
                    << '\n';
        } else if (first.parametrization == "hyperspherical" && first.params.size() == 2) {
            stem = "pcorr_surface_" + key;
            for (const auto* r : rows)
                out << format_double(r->params.at("theta1")) << ' '
                    << format_double(r->params.at("theta2")) << ' '
                    << format_double(r->p_corr_theory) << ' ' << format_double(r->p_corr_expt)
                    << '\n';
        } else if (first.parametrization == "cascade") {
            stem = "pcorr_surface_" + key;
            for (const auto* r : rows)
                out << format_double(r->params.at("j0")) << ' '
                    << format_double(r->params.at("alpha")) << ' '
                    << format_double(r->p_corr_theory) << ' ' << format_double(r->p_corr_expt)
                    << '\n';
        } else {
            stem = "pcorr_sets_" + key;
            for (const auto* r : rows)
                out << r->set_index << ' ' << format_double(r->p_corr_theory) << ' '
                    << format_double(r->p_corr_expt) << '\n';
        }
        write_text_file(output_dir / (stem + ".dat"), out.str());
    }
}

}  // namespace qsd
