#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ics/fibermodel.hpp"
#include "ics/multiport.hpp"
#include "ics/scaling.hpp"
#include "ics/scanmodel.hpp"
#include "ics/skew.hpp"

namespace ics::cli {

// Schema-validated pipeline configuration; unknown keys anywhere in the
// document are rejected.
struct PipelineConfig {
    std::uint64_t seed = 0;
    SourceKind source_kind = SourceKind::spdc;
    SpdcSourceParams spdc;
    LaserSourceParams laser;

    std::vector<double> core_delays_ps = {0.0, 0.0, 0.0, 0.0};
    double arm_delta_ps = 0.0;

    double scan_range_ps = 1.8;
    double scan_step_ps = 0.05;
    double integration_s = 3.0;
    double visibility_scale = 1.0;
    bool subtract_accidentals = false;
    std::vector<OrderedPair> input_pairs;  // default: all 12 ordered pairs

    OutputLabels output_labels = default_output_labels;

    double fit_pulse_width_ps = 127.0;
    double fit_beat_period_guess_ps = 10.0;

    SkewConvention convention = SkewConvention::half_difference;
    double sigma_cal_ps = 0.15;

    RandomWalkParams walk;
    std::vector<double> walk_lengths_m;
    int walk_n_trials = 10000;
    int walk_n_cores = 4;

    int bootstrap_n = 5000;
};

PipelineConfig parse_config(const nlohmann::json& doc);
PipelineConfig load_config(const std::filesystem::path& path);

// simulate: one scan file set per (ordered input pair x output pair) for the
// SPDC source, or coarse+fine per ordered input pair for the laser source.
// Returns the written CSV paths (manifest.json is written alongside).
std::vector<std::filesystem::path> run_simulate(
    const PipelineConfig& config, const std::filesystem::path& out_dir);

// fit: Gaussian or beat-envelope fits per scan plus per-input-pair
// aggregation (weighted mean center; spread flagged beyond 3 mean sigma).
nlohmann::json run_fit(const std::vector<std::filesystem::path>& scan_paths,
                       const PipelineConfig& config);

// skew: dip table -> ICS table + arm-imbalance report + summary. The dip
// table comes either from a fit report (positions get sigma_cal folded in)
// or directly from a dip-table CSV (sigmas used as given).
struct SkewOutputs {
    DipTable dips;
    IcsTable ics;
    ArmImbalanceReport imbalance;
    nlohmann::json report;
};
SkewOutputs run_skew(const DipTable& dips, SkewConvention convention,
                     bool allow_partial);
DipTable dip_table_from_fit_report(const nlohmann::json& fit_report,
                                   double sigma_cal_ps);

// scaling: sqrt-law fit, power-law fit, bootstrap CI, plot-data table.
struct ScalingOutputs {
    nlohmann::json report;
    std::string plot_csv;  // documented header, one row per input point
};
ScalingOutputs run_scaling(const std::filesystem::path& points_csv,
                           int bootstrap_n, std::uint64_t seed);

// crb: single report, or a visibility sweep as CSV.
nlohmann::json run_crb(double visibility, double coherence_time_ps,
                       double p_dist, double total_counts, double range_ps,
                       std::optional<double> detection_probability);
std::string run_crb_sweep(double v_lo, double v_hi, int n_points,
                          double coherence_time_ps, double p_dist,
                          double total_counts, double range_ps,
                          std::optional<double> detection_probability);

// walk: random-walk ensemble -> length-points CSV content (cmd_scaling input).
std::vector<LengthPoint> run_walk(const RandomWalkParams& params,
                                  const std::vector<double>& lengths_m,
                                  int n_cores, int n_trials);

}  // namespace ics::cli
