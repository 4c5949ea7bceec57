#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "ics/errors.hpp"
#include "ics/fisher.hpp"
#include "ics/fitting.hpp"
#include "ics/io.hpp"
#include "ics/rng.hpp"
#include "ics/version.hpp"

namespace ics::cli {

namespace {

void check_keys(const nlohmann::json& obj, const std::set<std::string>& allowed,
                const std::string& context) {
    if (!obj.is_object()) {
        throw ValidationError("config section '" + context + "' must be an object");
    }
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) {
            throw ValidationError("unknown key '" + key + "' in " + context);
        }
    }
}

double get_number(const nlohmann::json& obj, const std::string& key,
                  double fallback, const std::string& context) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) {
        throw ValidationError("'" + key + "' in " + context + " must be a number");
    }
    return obj[key].get<double>();
}

std::string pair_name(const OrderedPair& p) {
    return std::to_string(p.first) + "-" + std::to_string(p.second);
}

std::vector<OrderedPair> all_ordered_pairs() {
    std::vector<OrderedPair> out;
    for (int j = 1; j <= 4; ++j) {
        for (int k = 1; k <= 4; ++k) {
            if (j != k) out.push_back({j, k});
        }
    }
    return out;
}

}  // namespace

PipelineConfig parse_config(const nlohmann::json& doc) {
    PipelineConfig cfg;
    check_keys(doc, {"seed", "source", "fiber", "scan", "multiport", "fit",
                     "skew", "walk", "scaling"},
               "config root");

    if (doc.contains("seed")) {
        const auto& s = doc["seed"];
        const bool non_negative_integer =
            s.is_number_unsigned() ||
            (s.is_number_integer() && s.get<std::int64_t>() >= 0);
        if (!non_negative_integer) {
            throw ValidationError("'seed' must be a non-negative integer");
        }
        cfg.seed = doc["seed"].get<std::uint64_t>();
    }

    if (doc.contains("source")) {
        const auto& src = doc["source"];
        check_keys(src, {"kind", "spdc", "laser"}, "source");
        const std::string kind = src.value("kind", "spdc");
        if (kind == "spdc") {
            cfg.source_kind = SourceKind::spdc;
        } else if (kind == "laser") {
            cfg.source_kind = SourceKind::laser;
        } else {
            throw ValidationError("source.kind must be 'spdc' or 'laser'");
        }
        if (src.contains("spdc")) {
            const auto& s = src["spdc"];
            check_keys(s, {"coherence_time_ps", "pair_rate_cps",
                           "singles_rates_cps", "rep_rate_hz"},
                       "source.spdc");
            cfg.spdc.coherence_time_ps = get_number(
                s, "coherence_time_ps", cfg.spdc.coherence_time_ps, "source.spdc");
            cfg.spdc.pair_rate_cps =
                get_number(s, "pair_rate_cps", cfg.spdc.pair_rate_cps, "source.spdc");
            cfg.spdc.rep_rate_hz =
                get_number(s, "rep_rate_hz", cfg.spdc.rep_rate_hz, "source.spdc");
            if (s.contains("singles_rates_cps")) {
                const auto& r = s["singles_rates_cps"];
                if (!r.is_array() || r.size() != 2) {
                    throw ValidationError(
                        "source.spdc.singles_rates_cps must be an array of 2");
                }
                cfg.spdc.singles_rates_cps = {r[0].get<double>(), r[1].get<double>()};
            }
            validate(cfg.spdc);
        }
        if (src.contains("laser")) {
            const auto& l = src["laser"];
            check_keys(l, {"beat_period_ps", "pulse_width_ps",
                           "mean_photons_per_pulse", "rep_rate_hz",
                           "asymptotic_coinc_rate_cps"},
                       "source.laser");
            cfg.laser.beat_period_ps =
                get_number(l, "beat_period_ps", cfg.laser.beat_period_ps, "source.laser");
            cfg.laser.pulse_width_ps =
                get_number(l, "pulse_width_ps", cfg.laser.pulse_width_ps, "source.laser");
            cfg.laser.mean_photons_per_pulse =
                get_number(l, "mean_photons_per_pulse",
                           cfg.laser.mean_photons_per_pulse, "source.laser");
            cfg.laser.rep_rate_hz =
                get_number(l, "rep_rate_hz", cfg.laser.rep_rate_hz, "source.laser");
            cfg.laser.asymptotic_coinc_rate_cps =
                get_number(l, "asymptotic_coinc_rate_cps",
                           cfg.laser.asymptotic_coinc_rate_cps, "source.laser");
            validate(cfg.laser);
        }
    }

    if (doc.contains("fiber")) {
        const auto& f = doc["fiber"];
        check_keys(f, {"core_delays_ps", "arm_delta_ps"}, "fiber");
        if (f.contains("core_delays_ps")) {
            const auto& d = f["core_delays_ps"];
            if (!d.is_array() || d.size() != 4) {
                throw ValidationError("fiber.core_delays_ps must be an array of 4");
            }
            cfg.core_delays_ps = d.get<std::vector<double>>();
        }
        cfg.arm_delta_ps = get_number(f, "arm_delta_ps", cfg.arm_delta_ps, "fiber");
    }

    if (doc.contains("scan")) {
        const auto& s = doc["scan"];
        check_keys(s, {"range_ps", "step_ps", "integration_s", "visibility_scale",
                       "subtract_accidentals", "input_pairs"},
                   "scan");
        cfg.scan_range_ps = get_number(s, "range_ps", cfg.scan_range_ps, "scan");
        cfg.scan_step_ps = get_number(s, "step_ps", cfg.scan_step_ps, "scan");
        cfg.integration_s = get_number(s, "integration_s", cfg.integration_s, "scan");
        cfg.visibility_scale =
            get_number(s, "visibility_scale", cfg.visibility_scale, "scan");
        if (s.contains("subtract_accidentals")) {
            if (!s["subtract_accidentals"].is_boolean()) {
                throw ValidationError("scan.subtract_accidentals must be a boolean");
            }
            cfg.subtract_accidentals = s["subtract_accidentals"].get<bool>();
        }
        if (s.contains("input_pairs")) {
            const auto& pairs = s["input_pairs"];
            if (!pairs.is_array() || pairs.empty()) {
                throw ValidationError("scan.input_pairs must be a non-empty array");
            }
            for (const auto& p : pairs) {
                if (!p.is_array() || p.size() != 2) {
                    throw ValidationError(
                        "each scan.input_pairs entry must be a pair [j,k]");
                }
                const int j = p[0].get<int>();
                const int k = p[1].get<int>();
                if (j < 1 || j > 4 || k < 1 || k > 4 || j == k) {
                    throw ValidationError("invalid input pair " + pair_name({j, k}));
                }
                cfg.input_pairs.push_back({j, k});
            }
        }
        if (cfg.scan_range_ps <= 0 || cfg.scan_step_ps <= 0 ||
            cfg.integration_s <= 0) {
            throw ValidationError("scan range, step, and integration must be > 0");
        }
        if (cfg.visibility_scale < 0 || cfg.visibility_scale > 1) {
            throw ValidationError("scan.visibility_scale must be in [0,1]");
        }
    }
    if (cfg.input_pairs.empty()) cfg.input_pairs = all_ordered_pairs();

    if (doc.contains("multiport")) {
        const auto& m = doc["multiport"];
        check_keys(m, {"output_labels"}, "multiport");
        if (m.contains("output_labels")) {
            const std::string labels = m["output_labels"].get<std::string>();
            std::string sorted = labels;
            std::sort(sorted.begin(), sorted.end());
            if (sorted != "ABCD") {
                throw ValidationError(
                    "multiport.output_labels must be a permutation of ABCD");
            }
            for (int i = 0; i < 4; ++i) cfg.output_labels[i] = labels[i];
        }
    }

    if (doc.contains("fit")) {
        const auto& f = doc["fit"];
        check_keys(f, {"pulse_width_ps", "beat_period_guess_ps"}, "fit");
        cfg.fit_pulse_width_ps =
            get_number(f, "pulse_width_ps", cfg.fit_pulse_width_ps, "fit");
        cfg.fit_beat_period_guess_ps = get_number(
            f, "beat_period_guess_ps", cfg.fit_beat_period_guess_ps, "fit");
        if (cfg.fit_pulse_width_ps <= 0 || cfg.fit_beat_period_guess_ps <= 0) {
            throw ValidationError("fit widths must be > 0");
        }
    }

    if (doc.contains("skew")) {
        const auto& s = doc["skew"];
        check_keys(s, {"convention", "sigma_cal_ps"}, "skew");
        if (s.contains("convention")) {
            const std::string c = s["convention"].get<std::string>();
            if (c == "half_difference") {
                cfg.convention = SkewConvention::half_difference;
            } else if (c == "full_difference") {
                cfg.convention = SkewConvention::full_difference;
            } else {
                throw ValidationError(
                    "skew.convention must be 'half_difference' or 'full_difference'");
            }
        }
        cfg.sigma_cal_ps = get_number(s, "sigma_cal_ps", cfg.sigma_cal_ps, "skew");
        if (cfg.sigma_cal_ps < 0) {
            throw ValidationError("skew.sigma_cal_ps must be >= 0");
        }
    }

    if (doc.contains("walk")) {
        const auto& w = doc["walk"];
        check_keys(w, {"step_length_m", "step_std_ps", "connector_positions_m",
                       "connector_offset_std_ps", "lengths_m", "n_trials",
                       "n_cores"},
                   "walk");
        cfg.walk.step_length_m =
            get_number(w, "step_length_m", cfg.walk.step_length_m, "walk");
        cfg.walk.step_std_ps =
            get_number(w, "step_std_ps", cfg.walk.step_std_ps, "walk");
        cfg.walk.connector_offset_std_ps =
            get_number(w, "connector_offset_std_ps",
                       cfg.walk.connector_offset_std_ps, "walk");
        if (w.contains("connector_positions_m")) {
            cfg.walk.connector_positions_m =
                w["connector_positions_m"].get<std::vector<double>>();
        }
        if (w.contains("lengths_m")) {
            cfg.walk_lengths_m = w["lengths_m"].get<std::vector<double>>();
        }
        if (w.contains("n_trials")) cfg.walk_n_trials = w["n_trials"].get<int>();
        if (w.contains("n_cores")) cfg.walk_n_cores = w["n_cores"].get<int>();
        cfg.walk.seed = cfg.seed;
    }

    if (doc.contains("scaling")) {
        const auto& s = doc["scaling"];
        check_keys(s, {"bootstrap_n"}, "scaling");
        if (s.contains("bootstrap_n")) cfg.bootstrap_n = s["bootstrap_n"].get<int>();
        if (cfg.bootstrap_n < 2) {
            throw ValidationError("scaling.bootstrap_n must be >= 2");
        }
    }

    cfg.walk.seed = cfg.seed;
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    return parse_config(read_json(path));
}

namespace {

nlohmann::json source_params_json(const PipelineConfig& cfg) {
    nlohmann::json j;
    if (cfg.source_kind == SourceKind::spdc) {
        j["coherence_time_ps"] = cfg.spdc.coherence_time_ps;
        j["pair_rate_cps"] = cfg.spdc.pair_rate_cps;
        j["singles_rates_cps"] = cfg.spdc.singles_rates_cps;
        j["rep_rate_hz"] = cfg.spdc.rep_rate_hz;
        j["visibility_scale"] = cfg.visibility_scale;
    } else {
        j["beat_period_ps"] = cfg.laser.beat_period_ps;
        j["pulse_width_ps"] = cfg.laser.pulse_width_ps;
        j["mean_photons_per_pulse"] = cfg.laser.mean_photons_per_pulse;
        j["rep_rate_hz"] = cfg.laser.rep_rate_hz;
        j["asymptotic_coinc_rate_cps"] = cfg.laser.asymptotic_coinc_rate_cps;
    }
    return j;
}

}  // namespace

std::vector<std::filesystem::path> run_simulate(
    const PipelineConfig& config, const std::filesystem::path& out_dir) {
    std::vector<std::filesystem::path> written;
    nlohmann::json manifest;
    manifest["tool_version"] = tool_version;
    manifest["seed"] = config.seed;
    manifest["source_kind"] =
        config.source_kind == SourceKind::spdc ? "spdc" : "laser";
    nlohmann::json files = nlohmann::json::array();

    const MultiportUnitary u = hadamard_unitary();
    std::uint64_t scan_index = 0;

    for (const auto& [j, k] : config.input_pairs) {
        const double tau_true =
            config.core_delays_ps[j - 1] - config.core_delays_ps[k - 1];
        const double center = config.arm_delta_ps + tau_true;

        if (config.source_kind == SourceKind::spdc) {
            const auto predictions =
                classify_output_pairs(u, j, k, config.output_labels);
            const double accidental =
                accidental_rate(config.spdc.singles_rates_cps[0],
                                config.spdc.singles_rates_cps[1],
                                config.spdc.rep_rate_hz);
            for (const auto& pred : predictions) {
                const auto grid = spdc_grid(center, config.scan_range_ps,
                                            config.scan_step_ps);
                const std::uint64_t seed = derive_seed(config.seed, scan_index++);
                const auto rate = [&](double tau) {
                    double r = expected_spdc_rate(pred, tau, config.spdc, center,
                                                  config.visibility_scale);
                    if (config.subtract_accidentals) r += accidental;
                    return r;
                };
                ScanRecord rec =
                    sample_scan(rate, grid, config.integration_s, seed);
                if (config.subtract_accidentals) {
                    rec = subtract_accidentals(rec, accidental);
                }
                rec.channel = pred.output_pair;
                rec.source_kind = SourceKind::spdc;
                rec.skew_offset_ps = center;

                nlohmann::json side = source_params_json(config);
                side["input_pair"] = pair_name({j, k});
                side["kind"] =
                    pred.kind == FeatureKind::dip ? "dip" : "peak";
                side["ideal_visibility"] = pred.ideal_visibility;
                side["p_dist"] = pred.p_dist;

                const auto path = out_dir / ("scan_" + std::to_string(j) +
                                             std::to_string(k) + "_" +
                                             pred.output_pair + ".csv");
                write_scan(path, rec, side);
                written.push_back(path);
                files.push_back(path.filename().string());
            }
        } else {
            const auto coarse = laser_coarse_grid(center, config.laser.beat_period_ps,
                                                  config.laser.pulse_width_ps);
            const auto fine = laser_fine_grid(center, config.laser.beat_period_ps);
            const auto rate = [&](double tau) {
                return expected_laser_rate(tau, config.laser, center);
            };
            for (const auto& [stage, grid] :
                 {std::pair{std::string("coarse"), coarse},
                  std::pair{std::string("fine"), fine}}) {
                const std::uint64_t seed = derive_seed(config.seed, scan_index++);
                ScanRecord rec =
                    sample_scan(rate, grid, config.integration_s, seed);
                rec.channel = "AB";
                rec.source_kind = SourceKind::laser;
                rec.skew_offset_ps = center;

                nlohmann::json side = source_params_json(config);
                side["input_pair"] = pair_name({j, k});
                side["stage"] = stage;

                const auto path = out_dir / ("scan_" + std::to_string(j) +
                                             std::to_string(k) + "_" + stage +
                                             ".csv");
                write_scan(path, rec, side);
                written.push_back(path);
                files.push_back(path.filename().string());
            }
        }
    }
    manifest["files"] = files;
    write_json(out_dir / "manifest.json", manifest);
    return written;
}

nlohmann::json run_fit(const std::vector<std::filesystem::path>& scan_paths,
                       const PipelineConfig& config) {
    if (scan_paths.empty()) {
        throw ValidationError("no scan files given");
    }
    nlohmann::json report;
    report["tool_version"] = tool_version;
    nlohmann::json scans = nlohmann::json::array();
    nlohmann::json failures = nlohmann::json::array();

    struct Aggregate {
        std::vector<double> centers;
        std::vector<double> sigmas;
    };
    std::map<std::string, Aggregate> by_pair;

    for (const auto& path : scan_paths) {
        nlohmann::json entry;
        entry["file"] = path.filename().string();
        try {
            const LoadedScan loaded = read_scan(path);
            const nlohmann::json source =
                loaded.sidecar.value("source", nlohmann::json::object());
            const std::string input_pair =
                source.value("input_pair", std::string{});
            entry["channel"] = loaded.record.channel;
            entry["input_pair"] = input_pair;

            if (loaded.record.source_kind == SourceKind::laser) {
                const std::string stage = source.value("stage", "fine");
                if (stage == "coarse") {
                    entry["stage"] = "coarse";
                    entry["note"] =
                        "coarse stage locates the envelope; no parameters fitted";
                    scans.push_back(entry);
                    continue;
                }
                BeatFitOptions opts;
                opts.pulse_width_ps = config.fit_pulse_width_ps;
                opts.beat_period_guess_ps = config.fit_beat_period_guess_ps;
                const BeatFit fit = fit_beat_envelope(loaded.record, opts);
                entry["model"] = "beat_envelope";
                entry["baseline"] = fit.baseline;
                entry["amplitude"] = fit.amplitude;
                entry["center_ps"] = fit.center_ps;
                entry["center_sigma_ps"] = fit.center_sigma_ps();
                entry["beat_period_ps"] = fit.beat_period_ps;
                entry["effective_precision_ps"] = fit.effective_precision_ps;
                entry["reduced_chi2"] = fit.reduced_chi2;
                entry["iterations"] = fit.iterations;
                nlohmann::json cov = nlohmann::json::array();
                for (int r = 0; r < 4; ++r) {
                    nlohmann::json row = nlohmann::json::array();
                    for (int c = 0; c < 4; ++c) row.push_back(fit.covariance(r, c));
                    cov.push_back(row);
                }
                entry["covariance"] = cov;
                if (!input_pair.empty()) {
                    by_pair[input_pair].centers.push_back(fit.center_ps);
                    by_pair[input_pair].sigmas.push_back(fit.center_sigma_ps());
                }
            } else {
                const GaussianFit fit = fit_gaussian(loaded.record);
                entry["model"] = "gaussian";
                entry["kind"] = fit.amplitude < 0 ? "dip" : "peak";
                entry["baseline"] = fit.baseline;
                entry["amplitude"] = fit.amplitude;
                entry["center_ps"] = fit.center_ps;
                entry["center_sigma_ps"] = fit.center_sigma_ps();
                entry["width_ps"] = fit.width_ps;
                entry["width_sigma_ps"] = std::sqrt(fit.covariance(3, 3));
                entry["visibility"] = fit.visibility;
                entry["visibility_sigma"] = [&] {
                    // |b|/a variance by linear propagation.
                    const double a = fit.baseline, b = fit.amplitude;
                    const double da = -std::abs(b) / (a * a);
                    const double db = (b < 0 ? -1.0 : 1.0) / a;
                    return std::sqrt(da * da * fit.covariance(0, 0) +
                                     db * db * fit.covariance(1, 1) +
                                     2 * da * db * fit.covariance(0, 1));
                }();
                entry["reduced_chi2"] = fit.reduced_chi2;
                entry["iterations"] = fit.iterations;
                nlohmann::json cov = nlohmann::json::array();
                for (int r = 0; r < 4; ++r) {
                    nlohmann::json row = nlohmann::json::array();
                    for (int c = 0; c < 4; ++c) row.push_back(fit.covariance(r, c));
                    cov.push_back(row);
                }
                entry["covariance"] = cov;
                if (!input_pair.empty()) {
                    by_pair[input_pair].centers.push_back(fit.center_ps);
                    by_pair[input_pair].sigmas.push_back(fit.center_sigma_ps());
                }
            }
            scans.push_back(entry);
        } catch (const std::exception& e) {
            entry["error"] = e.what();
            failures.push_back(entry);
        }
    }

    nlohmann::json aggregated = nlohmann::json::array();
    for (const auto& [pair, agg] : by_pair) {
        double sw = 0, swc = 0, mean_sigma = 0;
        double lo = agg.centers.front(), hi = agg.centers.front();
        for (std::size_t i = 0; i < agg.centers.size(); ++i) {
            const double w = 1.0 / (agg.sigmas[i] * agg.sigmas[i]);
            sw += w;
            swc += w * agg.centers[i];
            mean_sigma += agg.sigmas[i];
            lo = std::min(lo, agg.centers[i]);
            hi = std::max(hi, agg.centers[i]);
        }
        mean_sigma /= static_cast<double>(agg.centers.size());
        const double spread = hi - lo;
        nlohmann::json a;
        a["input_pair"] = pair;
        a["n_channels"] = agg.centers.size();
        a["center_ps"] = swc / sw;
        a["center_sigma_ps"] = 1.0 / std::sqrt(sw);
        a["spread_ps"] = spread;
        a["spread_flagged"] = spread > 3.0 * mean_sigma;
        aggregated.push_back(a);
    }

    report["scans"] = scans;
    report["aggregated"] = aggregated;
    report["failures"] = failures;
    return report;
}

DipTable dip_table_from_fit_report(const nlohmann::json& fit_report,
                                   double sigma_cal_ps) {
    if (!fit_report.contains("aggregated")) {
        throw ValidationError("fit report has no 'aggregated' section");
    }
    DipTable dips;
    for (const auto& a : fit_report["aggregated"]) {
        const std::string name = a["input_pair"].get<std::string>();
        const std::size_t dash = name.find('-');
        if (dash == std::string::npos) {
            throw ValidationError("malformed input_pair '" + name +
                                  "' in fit report");
        }
        const int j = std::stoi(name.substr(0, dash));
        const int k = std::stoi(name.substr(dash + 1));
        const double sigma_fit = a["center_sigma_ps"].get<double>();
        dips.entries[{j, k}] =
            DipEntry{a["center_ps"].get<double>(),
                     combine_uncertainty(sigma_fit, sigma_cal_ps)};
    }
    return dips;
}

SkewOutputs run_skew(const DipTable& dips, SkewConvention convention,
                     bool allow_partial) {
    SkewOutputs out;
    out.dips = dips;
    out.ics = skew_table(dips, convention, allow_partial);
    out.imbalance = arm_imbalance(dips);

    nlohmann::json report;
    report["tool_version"] = tool_version;
    report["convention"] = convention == SkewConvention::half_difference
                               ? "half_difference"
                               : "full_difference";
    const int n_pairs = static_cast<int>(out.ics.entries.size());
    report["n_pairs"] = n_pairs;

    nlohmann::json missing = nlohmann::json::array();
    for (const auto& p : all_core_pairs()) {
        if (!out.ics.entries.count(p)) missing.push_back(pair_name(p));
    }
    report["missing_pairs"] = missing;

    if (n_pairs == 6) {
        const auto [rms, sigma_rms] = rms_skew(out.ics);
        report["rms_ps"] = rms;
        report["rms_sigma_ps"] = sigma_rms;
    } else {
        // Partial table: RMS over the observed pairs, flagged as partial.
        double ms = 0, mean_sigma = 0;
        for (const auto& [pair, entry] : out.ics.entries) {
            ms += entry.magnitude_ps * entry.magnitude_ps;
            mean_sigma += entry.sigma_ps;
        }
        report["rms_ps"] = std::sqrt(ms / n_pairs);
        report["rms_sigma_ps"] = (mean_sigma / n_pairs) / std::sqrt(n_pairs);
        report["rms_partial"] = true;
    }

    nlohmann::json imbalance;
    nlohmann::json deltas;
    for (const auto& [pair, delta] : out.imbalance.delta_ps) {
        deltas[pair_name(pair)] = delta;
    }
    imbalance["delta_ps"] = deltas;
    imbalance["spread_ps"] = out.imbalance.spread_ps;
    imbalance["tolerance_ps"] = out.imbalance.tolerance_ps;
    imbalance["consistent"] = out.imbalance.consistent;
    report["arm_imbalance"] = imbalance;

    out.report = report;
    return out;
}

ScalingOutputs run_scaling(const std::filesystem::path& points_csv,
                           int bootstrap_n, std::uint64_t seed) {
    const auto points = read_length_points(points_csv);
    const SqrtFit sf = fit_sqrt_model(points);
    const PowerLawFit pf = fit_power_law(points);
    const BootstrapResult boot = bootstrap_ci(points, bootstrap_n, seed);

    nlohmann::json report;
    report["tool_version"] = tool_version;
    report["seed"] = seed;
    report["n_points"] = points.size();
    report["sqrt_model"] = {
        {"kappa_ps_per_sqrt_m", sf.kappa},
        {"kappa_sigma", std::sqrt(sf.covariance(0, 0))},
        {"offset_c_ps", sf.offset_c},
        {"offset_c_sigma", std::sqrt(sf.covariance(1, 1))},
        {"r_squared", sf.r_squared},
    };
    report["power_law"] = {
        {"amplitude_A", pf.amplitude_A},
        {"exponent_alpha", pf.exponent_alpha},
        {"alpha_sigma", std::sqrt(pf.covariance(0, 0))},
        {"r_squared", pf.r_squared},
    };
    report["bootstrap"] = {
        {"point_estimate", boot.point_estimate},
        {"ci_low", boot.ci_low},
        {"ci_high", boot.ci_high},
        {"n_resamples", boot.n_resamples},
        {"seed", boot.seed},
    };

    // Plot data: measured points, both fitted curves, the power-law 1-sigma
    // band propagated in log space, and unit-slope reference lines anchored
    // at the first point.
    std::string csv = "# tool_version=";
    csv += tool_version;
    csv += "\nlength_m,rms_ps,sigma_ps,sqrt_model_ps,power_model_ps,power_band_lo_ps,power_band_hi_ps,ref_sqrt_ps,ref_linear_ps\n";
    const double l0 = points.front().length_m;
    const double y0 = points.front().rms_ps;
    for (const auto& p : points) {
        const double sqrt_model = sf.kappa * std::sqrt(p.length_m) + sf.offset_c;
        const double x = std::log10(p.length_m);
        const double logy = pf.exponent_alpha * x + std::log10(pf.amplitude_A);
        const double var_log = pf.covariance(0, 0) * x * x +
                               2.0 * pf.covariance(0, 1) * x +
                               pf.covariance(1, 1);
        const double band = std::sqrt(std::max(0.0, var_log));
        csv += format_double(p.length_m);
        csv += ',';
        csv += format_double(p.rms_ps);
        csv += ',';
        csv += format_double(p.sigma_rms_ps);
        csv += ',';
        csv += format_double(sqrt_model);
        csv += ',';
        csv += format_double(std::pow(10.0, logy));
        csv += ',';
        csv += format_double(std::pow(10.0, logy - band));
        csv += ',';
        csv += format_double(std::pow(10.0, logy + band));
        csv += ',';
        csv += format_double(y0 * std::sqrt(p.length_m / l0));
        csv += ',';
        csv += format_double(y0 * (p.length_m / l0));
        csv += '\n';
    }
    return ScalingOutputs{report, csv};
}

nlohmann::json run_crb(double visibility, double coherence_time_ps,
                       double p_dist, double total_counts, double range_ps,
                       std::optional<double> detection_probability) {
    const DipShape shape{p_dist, visibility, coherence_time_ps};
    const CrbReport r = crb(shape, total_counts, range_ps, detection_probability);
    nlohmann::json report;
    report["tool_version"] = tool_version;
    report["visibility"] = visibility;
    report["coherence_time_ps"] = coherence_time_ps;
    report["p_dist"] = p_dist;
    report["total_counts"] = total_counts;
    report["range_ps"] = range_ps;
    report["integrated_info_per_ps"] = r.integrated_info_per_ps;
    report["shape_factor"] = r.shape_factor;
    report["n_eff"] = r.n_eff;
    if (std::isfinite(r.crb_ps)) {
        report["crb_ps"] = r.crb_ps;
        report["crb_fs"] = r.crb_ps * 1000.0;
    } else {
        report["crb_ps"] = nullptr;
        report["note"] =
            "visibility 0 carries no timing information; the bound diverges";
    }
    if (r.range_warning) {
        report["range_warning"] =
            "scan range is below 4 coherence times; the density approximation "
            "degrades";
    }
    return report;
}

std::string run_crb_sweep(double v_lo, double v_hi, int n_points,
                          double coherence_time_ps, double p_dist,
                          double total_counts, double range_ps,
                          std::optional<double> detection_probability) {
    if (n_points < 2) throw ValidationError("sweep needs at least 2 points");
    if (!(v_lo >= 0 && v_hi <= 1 && v_lo < v_hi)) {
        throw ValidationError("sweep bounds must satisfy 0 <= lo < hi <= 1");
    }
    std::string csv = "# tool_version=";
    csv += tool_version;
    csv += "\nvisibility,integrated_info_per_ps,shape_factor,n_eff,crb_ps\n";
    for (int i = 0; i < n_points; ++i) {
        const double v = v_lo + (v_hi - v_lo) * i / (n_points - 1);
        const DipShape shape{p_dist, v, coherence_time_ps};
        const CrbReport r =
            crb(shape, total_counts, range_ps, detection_probability);
        csv += format_double(v);
        csv += ',';
        csv += format_double(r.integrated_info_per_ps);
        csv += ',';
        csv += format_double(r.shape_factor);
        csv += ',';
        csv += format_double(r.n_eff);
        csv += ',';
        csv += std::isfinite(r.crb_ps) ? format_double(r.crb_ps) : "inf";
        csv += '\n';
    }
    return csv;
}

std::vector<LengthPoint> run_walk(const RandomWalkParams& params,
                                  const std::vector<double>& lengths_m,
                                  int n_cores, int n_trials) {
    const auto ensemble =
        simulate_walk_ensemble(params, lengths_m, n_cores, n_trials);
    std::vector<LengthPoint> points;
    points.reserve(ensemble.size());
    const int n_pairs = std::min(6, n_cores * (n_cores - 1) / 2);
    for (const auto& e : ensemble) {
        points.push_back(LengthPoint{e.length_m, e.rms_ps, e.sigma_rms_ps, n_pairs});
    }
    return points;
}

}  // namespace ics::cli
