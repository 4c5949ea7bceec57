#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "commands.hpp"
#include "ics/errors.hpp"
#include "ics/io.hpp"
#include "ics/version.hpp"

namespace {

using ics::cli::PipelineConfig;

void emit_error(const std::string& type, const std::string& message) {
    nlohmann::json err;
    err["error"] = {{"type", type}, {"message", message}};
    std::cerr << err.dump() << "\n";
}

std::vector<double> parse_double_list(const std::string& text,
                                      const std::string& flag) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::string tok = comma == std::string::npos
                                    ? text.substr(start)
                                    : text.substr(start, comma - start);
        if (!tok.empty()) {
            try {
                out.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw ics::ValidationError("bad value '" + tok + "' in " + flag);
            }
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"inter-core-skew measurement toolkit"};
    app.set_version_flag("--version", ics::tool_version);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed_override;

    auto* simulate = app.add_subcommand(
        "simulate", "generate synthetic coincidence scans");
    simulate->add_option("--config", config_path, "pipeline config JSON")
        ->required();
    simulate->add_option("--out", out_path, "output directory")->required();
    simulate->add_option("--seed", seed_override, "override the config seed");

    auto* fit = app.add_subcommand("fit", "fit dip/peak parameters to scans");
    std::vector<std::string> scan_files;
    std::string fit_config_path;
    fit->add_option("scans", scan_files, "scan CSV files")->required();
    fit->add_option("--config", fit_config_path,
                    "pipeline config JSON (beat-fit options)");
    fit->add_option("--out", out_path, "fit report JSON path")->required();

    auto* skew = app.add_subcommand(
        "skew", "pairwise skew magnitudes from dip positions");
    std::string fits_path, dip_table_path, convention_name = "half-difference";
    double sigma_cal = 0.15;
    bool allow_partial = false;
    skew->add_option("--fits", fits_path, "fit report JSON from the fit verb");
    skew->add_option("--dip-table", dip_table_path,
                     "dip-table CSV (positions and sigmas used as given)");
    skew->add_option("--sigma-cal", sigma_cal,
                     "calibration uncertainty folded into fit-report sigmas")
        ->check(CLI::NonNegativeNumber);
    skew->add_option("--convention", convention_name,
                     "half-difference or full-difference");
    skew->add_flag("--allow-partial", allow_partial,
                   "tolerate missing orderings");
    skew->add_option("--out", out_path, "output directory")->required();

    auto* scaling = app.add_subcommand(
        "scaling", "sqrt-law and power-law fits with bootstrap CI");
    std::string points_path;
    int bootstrap_n = 5000;
    std::uint64_t scaling_seed = 0;
    scaling->add_option("--input", points_path, "length-points CSV")->required();
    scaling->add_option("--bootstrap-n", bootstrap_n, "bootstrap resamples");
    scaling->add_option("--seed", scaling_seed, "bootstrap seed");
    scaling->add_option("--out", out_path, "output directory")->required();

    auto* crb = app.add_subcommand(
        "crb", "Cramer-Rao bound for dip-center estimation");
    double visibility = 0.92, coherence_time = 0.25, p_dist = 0.125;
    double counts = 3.5e5, range = 1.8;
    std::optional<double> detection_p;
    std::string sweep_spec, sweep_out;
    crb->add_option("--visibility", visibility, "dip visibility in [0,1]");
    crb->add_option("--coherence-time", coherence_time, "envelope width, ps");
    crb->add_option("--p-dist", p_dist, "baseline coincidence probability");
    crb->add_option("--counts", counts, "total scan counts");
    crb->add_option("--range", range, "scan range, ps");
    crb->add_option("--detection-p", detection_p,
                    "per-trial detection probability (default: p-dist)");
    crb->add_option("--sweep-visibility", sweep_spec,
                    "lo:hi:n visibility sweep to CSV");
    crb->add_option("--sweep-out", sweep_out, "sweep CSV path");
    crb->add_option("--out", out_path, "report JSON path (default: stdout)");

    auto* walk = app.add_subcommand(
        "walk", "random-walk skew ensembles over fiber length");
    std::string lengths_spec = "100,178,316,562,1000", connector_spec;
    double step_std = 0.05, step_length = 0.1, connector_std = 0.0;
    int n_trials = 10000, n_cores = 4;
    std::uint64_t walk_seed = 0;
    std::string walk_config_path;
    walk->add_option("--config", walk_config_path,
                     "pipeline config JSON (walk section)");
    walk->add_option("--lengths", lengths_spec, "comma-separated lengths, m");
    walk->add_option("--step-std", step_std, "per-step delay std, ps");
    walk->add_option("--step-length", step_length, "step length, m");
    walk->add_option("--connector-positions", connector_spec,
                     "comma-separated connector positions, m");
    walk->add_option("--connector-std", connector_std,
                     "per-connector offset std, ps");
    walk->add_option("--n-trials", n_trials, "ensemble size");
    walk->add_option("--n-cores", n_cores, "number of cores");
    walk->add_option("--seed", walk_seed, "ensemble seed");
    walk->add_option("--out", out_path, "length-points CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        emit_error("validation", e.what());
        return ics::ValidationError::exit_code;
    }

    if (simulate->parsed()) {
        PipelineConfig config = ics::cli::load_config(config_path);
        if (seed_override) {
            config.seed = *seed_override;
            config.walk.seed = *seed_override;
        }
        const auto written = ics::cli::run_simulate(config, out_path);
        std::cout << "wrote " << written.size() << " scans to " << out_path
                  << "\n";
        return 0;
    }

    if (fit->parsed()) {
        PipelineConfig config;
        if (!fit_config_path.empty()) {
            config = ics::cli::load_config(fit_config_path);
        }
        std::vector<std::filesystem::path> paths(scan_files.begin(),
                                                 scan_files.end());
        const nlohmann::json report = ics::cli::run_fit(paths, config);
        ics::write_json(out_path, report);
        const auto& failures = report["failures"];
        if (!failures.empty()) {
            emit_error("numerical",
                       std::to_string(failures.size()) +
                           " scans failed to fit; see " + out_path);
            return ics::NumericalError::exit_code;
        }
        std::cout << "wrote " << out_path << "\n";
        return 0;
    }

    if (skew->parsed()) {
        if (fits_path.empty() == dip_table_path.empty()) {
            throw ics::ValidationError(
                "give exactly one of --fits or --dip-table");
        }
        ics::SkewConvention convention;
        if (convention_name == "half-difference" ||
            convention_name == "half_difference") {
            convention = ics::SkewConvention::half_difference;
        } else if (convention_name == "full-difference" ||
                   convention_name == "full_difference") {
            convention = ics::SkewConvention::full_difference;
        } else {
            throw ics::ValidationError(
                "--convention must be half-difference or full-difference");
        }
        ics::DipTable dips;
        if (!fits_path.empty()) {
            dips = ics::cli::dip_table_from_fit_report(ics::read_json(fits_path),
                                                       sigma_cal);
        } else {
            dips = ics::read_dip_table(dip_table_path);
        }
        const auto outputs = ics::cli::run_skew(dips, convention, allow_partial);
        const std::filesystem::path dir = out_path;
        ics::write_dip_table(dir / "dip_table.csv", outputs.dips);
        ics::write_ics_table(dir / "ics_table.csv", outputs.ics);
        ics::write_json(dir / "skew_report.json", outputs.report);
        std::cout << "wrote skew tables to " << dir.string() << "\n";
        return 0;
    }

    if (scaling->parsed()) {
        const auto outputs =
            ics::cli::run_scaling(points_path, bootstrap_n, scaling_seed);
        const std::filesystem::path dir = out_path;
        ics::write_json(dir / "scaling_report.json", outputs.report);
        {
            std::error_code ec;
            std::filesystem::create_directories(dir, ec);
            std::ofstream out(dir / "plot_data.csv", std::ios::binary);
            if (!out) throw ics::IoError("cannot write plot_data.csv");
            out << outputs.plot_csv;
        }
        std::cout << "wrote scaling reports to " << dir.string() << "\n";
        return 0;
    }

    if (crb->parsed()) {
        if (!sweep_spec.empty()) {
            if (sweep_out.empty()) {
                throw ics::ValidationError("--sweep-visibility needs --sweep-out");
            }
            const auto c1 = sweep_spec.find(':');
            const auto c2 = sweep_spec.find(':', c1 + 1);
            if (c1 == std::string::npos || c2 == std::string::npos) {
                throw ics::ValidationError(
                    "--sweep-visibility must be lo:hi:n");
            }
            const double lo = std::stod(sweep_spec.substr(0, c1));
            const double hi = std::stod(sweep_spec.substr(c1 + 1, c2 - c1 - 1));
            const int n = std::stoi(sweep_spec.substr(c2 + 1));
            const std::string csv = ics::cli::run_crb_sweep(
                lo, hi, n, coherence_time, p_dist, counts, range, detection_p);
            std::ofstream out(sweep_out, std::ios::binary);
            if (!out) throw ics::IoError("cannot write " + sweep_out);
            out << csv;
            std::cout << "wrote " << sweep_out << "\n";
            return 0;
        }
        const nlohmann::json report = ics::cli::run_crb(
            visibility, coherence_time, p_dist, counts, range, detection_p);
        if (out_path.empty()) {
            std::cout << report.dump(2) << "\n";
        } else {
            ics::write_json(out_path, report);
            std::cout << "wrote " << out_path << "\n";
        }
        return 0;
    }

    if (walk->parsed()) {
        ics::RandomWalkParams params;
        std::vector<double> lengths;
        if (!walk_config_path.empty()) {
            const PipelineConfig config = ics::cli::load_config(walk_config_path);
            params = config.walk;
            lengths = config.walk_lengths_m;
            n_trials = config.walk_n_trials;
            n_cores = config.walk_n_cores;
        } else {
            params.step_length_m = step_length;
            params.step_std_ps = step_std;
            params.connector_positions_m =
                parse_double_list(connector_spec, "--connector-positions");
            params.connector_offset_std_ps = connector_std;
            params.seed = walk_seed;
            lengths = parse_double_list(lengths_spec, "--lengths");
        }
        const auto points =
            ics::cli::run_walk(params, lengths, n_cores, n_trials);
        ics::write_length_points(out_path, points);
        std::cout << "wrote " << out_path << "\n";
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ics::ValidationError& e) {
        emit_error("validation", e.what());
        return ics::ValidationError::exit_code;
    } catch (const ics::NumericalError& e) {
        emit_error("numerical", e.what());
        return ics::NumericalError::exit_code;
    } catch (const ics::IoError& e) {
        emit_error("io", e.what());
        return ics::IoError::exit_code;
    } catch (const std::exception& e) {
        emit_error("validation", e.what());
        return ics::ValidationError::exit_code;
    }
}
