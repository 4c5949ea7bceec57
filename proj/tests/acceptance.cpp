// Acceptance gate: ten pinned pass/fail checks covering the full toolkit.
// Every tolerance is a named constant below; nothing is tuned at runtime.
// Prints one line per criterion and exits nonzero if any of them fail.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "commands.hpp"
#include "ics/fibermodel.hpp"
#include "ics/fisher.hpp"
#include "ics/fitting.hpp"
#include "ics/io.hpp"
#include "ics/multiport.hpp"
#include "ics/rng.hpp"
#include "ics/scaling.hpp"
#include "ics/scanmodel.hpp"
#include "ics/skew.hpp"

using namespace ics;

namespace {

// --- pinned tolerances and budgets -----------------------------------------

// Published tables quote 2 decimals, so a reproduced value may differ from
// the rounded print by up to 0.01 inclusive (plus float slack).
constexpr double table_tol_ps = 0.01 + 1e-9;
constexpr double exact_tol = 1e-12;
constexpr double rounding_half_step = 0.005;  // "rounds to x.xx"
constexpr double seconds_criterion_1 = 1.0;
constexpr double seconds_criterion_5 = 120.0;
constexpr double seconds_criterion_7 = 300.0;

// Criterion 5: synthetic-vs-reported error agreement and visibility bias.
constexpr int c5_n_scans = 200;
constexpr std::uint64_t c5_seed = 501;
constexpr double c5_ratio_lo = 0.8, c5_ratio_hi = 1.2;
constexpr double c5_visibility_tol = 0.01;

// Criterion 6: classical ceiling and beat-fringe recovery. The coarse stage
// can lock onto a neighbouring fringe (adjacent envelope maxima differ by
// ~0.3%), so center recovery is asserted modulo the fitted beat period with
// the coarse minimum as the absolute anchor.
constexpr double c6_ceiling_slack = 1e-12;
constexpr int c6_n_fits = 10;
constexpr std::uint64_t c6_seed = 601;
constexpr double c6_true_center_ps = 1.3;
constexpr double c6_center_nsigma = 3.0;
constexpr double c6_anchor_fraction = 0.75;   // |d - coarse_min| <= 0.75 T
constexpr double c6_sigma_eff_lo = 0.8;       // T/(2 pi) = 1.6 ps within x2
constexpr double c6_sigma_eff_hi = 3.2;

// Criterion 7: random-walk scaling. kappa_gen = step_std * sqrt(2/step_len).
constexpr int c7_n_trials = 40000;
constexpr std::uint64_t c7_seed_plain = 701;
constexpr std::uint64_t c7_seed_connector = 702;
constexpr double c7_step_std_ps = 0.05;
constexpr double c7_step_length_m = 0.1;
constexpr double c7_kappa_gen = 0.22360679774997896;
constexpr double c7_table_sigma_ps = 0.045;   // published RMS uncertainty scale
constexpr double c7_alpha_tol = 0.02;
constexpr double c7_alpha_biased_max = 0.45;

// Criterion 8: bootstrap determinism and coverage.
constexpr std::uint64_t c8_seed_repro = 881;
constexpr int c8_n_datasets = 200;
constexpr int c8_n_resamples = 1000;
constexpr std::uint64_t c8_seed_noise = 801;
constexpr std::uint64_t c8_seed_boot = 802;
constexpr int c8_min_covered = 170;           // >= 85% of 200

// Criterion 9: CRB band and invariances.
constexpr double c9_crb_fs_lo = 0.5, c9_crb_fs_hi = 2.0;
constexpr double c9_halving_rel_tol = 2e-12;
constexpr double c9_shape_factor = 0.2599777283;  // V=0.92 frozen oracle
constexpr double c9_shape_tol = 1e-6;
constexpr double c9_fd_rel_tol = 1e-6;

// Criterion 10: end-to-end recovery at 3 propagated sigma.
constexpr std::uint64_t c10_seed = 1001;
constexpr double c10_recovery_nsigma = 3.0;

// --- reporting --------------------------------------------------------------

struct Criterion {
    int id;
    std::string label;
    std::vector<std::string> failures;
    double seconds = 0.0;

    Criterion(int id_, std::string label_) : id(id_), label(std::move(label_)) {}

    void require(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
};

int finish(Criterion& c) {
    std::ostringstream line;
    line << (c.failures.empty() ? "PASS" : "FAIL") << " criterion " << c.id
         << ": " << c.label;
    line.setf(std::ios::fixed);
    line.precision(1);
    line << " (" << c.seconds << " s)";
    if (!c.failures.empty()) {
        line << " [" << c.failures.front();
        if (c.failures.size() > 1) {
            line << "; +" << c.failures.size() - 1 << " more";
        }
        line << "]";
    }
    std::cout << line.str() << "\n";
    return c.failures.empty() ? 0 : 1;
}

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(10);
    ss << v;
    return ss.str();
}

double mean_of(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v) {
    const double m = mean_of(v);
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

// --- published dip tables ---------------------------------------------------

struct PinnedTable {
    const char* name;
    double positions[4][4];                       // [j-1][k-1], 0 on diagonal
    std::map<UnorderedPair, double> magnitudes;   // full-difference values
    double rms;
};

PinnedTable table_short() {
    PinnedTable t;
    t.name = "12.7 m";
    const double p[4][4] = {{0, 13.73, 16.22, 23.88},
                            {23.98, 0, 21.40, 29.06},
                            {21.62, 16.49, 0, 26.53},
                            {14.15, 8.88, 11.30, 0}};
    std::copy(&p[0][0], &p[0][0] + 16, &t.positions[0][0]);
    t.magnitudes = {{{1, 2}, 10.25}, {{1, 3}, 5.41},  {{1, 4}, 9.73},
                    {{2, 3}, 4.91},  {{2, 4}, 20.18}, {{3, 4}, 15.24}};
    t.rms = 12.20;
    return t;
}

PinnedTable table_long() {
    PinnedTable t;
    t.name = "49.7 m";
    const double p[4][4] = {{0, 31.57, 12.67, 6.62},
                            {7.31, 0, 32.67, 60.51},
                            {27.42, 38.63, 0, 17.15},
                            {31.07, 41.51, 22.64, 0}};
    std::copy(&p[0][0], &p[0][0] + 16, &t.positions[0][0]);
    t.magnitudes = {{{1, 2}, 24.26}, {{1, 3}, 14.75}, {{1, 4}, 24.45},
                    {{2, 3}, 5.97},  {{2, 4}, 18.99}, {{3, 4}, 5.49}};
    t.rms = 17.47;
    return t;
}

DipTable to_dip_table(const PinnedTable& t) {
    DipTable dips;
    for (int j = 1; j <= 4; ++j) {
        for (int k = 1; k <= 4; ++k) {
            if (j != k) dips.entries[{j, k}] = DipEntry{t.positions[j - 1][k - 1], 0.15};
        }
    }
    return dips;
}

// --- criteria ---------------------------------------------------------------

int criterion_1() {
    Criterion c{1, "dip tables reproduce published skew magnitudes and RMS"};
    const auto t0 = std::chrono::steady_clock::now();
    for (const PinnedTable& table : {table_short(), table_long()}) {
        const auto out = cli::run_skew(to_dip_table(table),
                                       SkewConvention::full_difference, false);
        for (const auto& [pair, expected] : table.magnitudes) {
            const double got = out.ics.entries.at(pair).magnitude_ps;
            c.require(std::abs(got - expected) <= table_tol_ps,
                      std::string(table.name) + " pair " +
                          std::to_string(pair.first) + "-" +
                          std::to_string(pair.second) + ": " + fmt(got) +
                          " vs " + fmt(expected));
        }
        const double rms = out.report["rms_ps"].get<double>();
        c.require(std::abs(rms - table.rms) <= table_tol_ps,
                  std::string(table.name) + " RMS " + fmt(rms) + " vs " +
                      fmt(table.rms));
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.require(c.seconds < seconds_criterion_1,
              "runtime " + fmt(c.seconds) + " s exceeds 1 s");
    return finish(c);
}

int criterion_2() {
    Criterion c{2, "uncertainty budget matches the published rounding"};
    const auto t0 = std::chrono::steady_clock::now();
    const double combined = combine_uncertainty(0.002, 0.15);
    c.require(std::abs(combined - 0.15) < rounding_half_step,
              "combined sigma " + fmt(combined) + " does not round to 0.15");
    c.require(std::abs(combined - 0.1500133327407934) <= 1e-6,
              "combined sigma " + fmt(combined) + " off the frozen value");
    const IcsEntry e =
        pairwise_skew(13.73, 23.98, 0.15, SkewConvention::half_difference);
    c.require(std::abs(e.magnitude_ps - 5.125) <= exact_tol,
              "half-difference magnitude " + fmt(e.magnitude_ps));
    c.require(std::abs(e.sigma_ps - 0.15 / std::sqrt(2.0)) <= exact_tol,
              "per-pair sigma " + fmt(e.sigma_ps) + " != 0.15/sqrt(2)");
    c.require(std::abs(e.sigma_ps - 0.11) < rounding_half_step,
              "per-pair sigma " + fmt(e.sigma_ps) + " does not round to 0.11");
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return finish(c);
}

int criterion_3() {
    Criterion c{3, "arm-imbalance estimates agree across core pairs"};
    const auto t0 = std::chrono::steady_clock::now();
    const ArmImbalanceReport rep = arm_imbalance(to_dip_table(table_short()));
    c.require(rep.delta_ps.size() == 6, "expected 6 delta estimates");
    c.require(std::abs(rep.delta_ps.at({1, 2}) - 18.855) <= 1e-9,
              "delta(1,2) " + fmt(rep.delta_ps.at({1, 2})) + " != 18.855");
    c.require(rep.spread_ps <= 0.5,
              "spread " + fmt(rep.spread_ps) + " exceeds 0.5 ps");
    c.require(std::abs(rep.spread_ps - 0.32) <= 1e-9,
              "spread " + fmt(rep.spread_ps) + " != 0.32");
    c.require(std::abs(rep.tolerance_ps - 0.45) <= exact_tol,
              "default tolerance " + fmt(rep.tolerance_ps) + " != 3 sigma_d");
    c.require(rep.consistent, "flagged inconsistent at 3 sigma_d");
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return finish(c);
}

int criterion_4() {
    Criterion c{4, "multiport predictions match a brute-force amplitude oracle"};
    const auto t0 = std::chrono::steady_clock::now();
    const MultiportUnitary u = hadamard_unitary();
    const auto& m = u.entries;

    for (int j = 1; j <= 4; ++j) {
        for (int k = 1; k <= 4; ++k) {
            if (j == k) continue;
            const int i0 = j - 1, i1 = k - 1;

            // Brute-force two-photon output distribution.
            std::map<std::string, double> oracle_pq, oracle_pd, oracle_v;
            double quantum_total = 0, dist_total = 0;
            for (int r = 0; r < 4; ++r) {
                for (int s = r; s < 4; ++s) {
                    if (r == s) {
                        const double amp = std::sqrt(2.0) * m(r, i0) * m(r, i1);
                        quantum_total += amp * amp;
                        dist_total += m(r, i0) * m(r, i0) * m(r, i1) * m(r, i1);
                        continue;
                    }
                    const double a = m(r, i0) * m(s, i1) + m(s, i0) * m(r, i1);
                    const double pq = a * a;
                    const double pd = m(r, i0) * m(r, i0) * m(s, i1) * m(s, i1) +
                                      m(s, i0) * m(s, i0) * m(r, i1) * m(r, i1);
                    quantum_total += pq;
                    dist_total += pd;
                    const std::string name{default_output_labels[r],
                                           default_output_labels[s]};
                    oracle_pq[name] = pq;
                    oracle_pd[name] = pd;
                    oracle_v[name] = 1.0 - pq / pd;
                }
            }
            const std::string pair_tag =
                std::to_string(j) + "-" + std::to_string(k);
            c.require(std::abs(quantum_total - 1.0) <= exact_tol,
                      pair_tag + " quantum normalization " + fmt(quantum_total));
            c.require(std::abs(dist_total - 1.0) <= exact_tol,
                      pair_tag + " distinguishable normalization " + fmt(dist_total));

            const auto preds = classify_output_pairs(u, j, k);
            c.require(preds.size() == 6, pair_tag + " expected 6 predictions");
            int dips = 0, peaks = 0;
            for (const auto& pred : preds) {
                dips += pred.kind == FeatureKind::dip;
                peaks += pred.kind == FeatureKind::peak;
                c.require(std::abs(std::abs(pred.ideal_visibility) - 1.0) <= exact_tol,
                          pair_tag + " " + pred.output_pair + " |V| != 1");
                c.require(std::abs(pred.ideal_visibility - oracle_v[pred.output_pair]) <= exact_tol,
                          pair_tag + " " + pred.output_pair + " visibility vs oracle");
                c.require(std::abs(pred.p_dist - oracle_pd[pred.output_pair]) <= exact_tol,
                          pair_tag + " " + pred.output_pair + " p_dist vs oracle");
            }
            c.require(dips == 4 && peaks == 2,
                      pair_tag + " expected 4 dips and 2 peaks, got " +
                          std::to_string(dips) + "/" + std::to_string(peaks));
        }
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return finish(c);
}

int criterion_5() {
    Criterion c{5, "fit errors calibrated on Poisson synthetics, visibility unbiased"};
    const auto t0 = std::chrono::steady_clock::now();
    const MultiportUnitary u = hadamard_unitary();
    const auto preds = classify_output_pairs(u, 1, 2);
    const ChannelPrediction* dip = nullptr;
    for (const auto& p : preds) {
        if (p.kind == FeatureKind::dip) dip = &p;
    }
    SpdcSourceParams src;  // 0.25 ps coherence time, 2600 cps plateau
    const auto grid = spdc_grid(0.0, 1.8, 0.05);
    const auto rate = [&](double tau) {
        return expected_spdc_rate(*dip, tau, src, 0.0, 0.92);
    };

    std::vector<double> centers, sigmas, visibilities;
    for (int i = 0; i < c5_n_scans; ++i) {
        ScanRecord rec = sample_scan(rate, grid, 3.0, derive_seed(c5_seed, i));
        rec.channel = dip->output_pair;
        const GaussianFit fit = fit_gaussian(rec);
        centers.push_back(fit.center_ps);
        sigmas.push_back(fit.center_sigma_ps());
        visibilities.push_back(fit.visibility);
    }
    const double ratio = sample_sd(centers) / mean_of(sigmas);
    c.require(ratio >= c5_ratio_lo && ratio <= c5_ratio_hi,
              "spread/reported-error ratio " + fmt(ratio));
    const double mean_v = mean_of(visibilities);
    c.require(std::abs(mean_v - 0.92) <= c5_visibility_tol,
              "mean recovered visibility " + fmt(mean_v));
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.require(c.seconds < seconds_criterion_5,
              "runtime " + fmt(c.seconds) + " s exceeds 2 min");
    return finish(c);
}

int criterion_6() {
    Criterion c{6, "classical ceiling holds and beat fits recover fringe centers"};
    const auto t0 = std::chrono::steady_clock::now();

    // (a) The expected curve never drops below half the asymptote.
    for (double beat : {5.0, 10.0, 20.0}) {
        for (double pulse : {50.0, 127.0, 300.0}) {
            for (double offset : {0.0, 3.7}) {
                LaserSourceParams params;
                params.beat_period_ps = beat;
                params.pulse_width_ps = pulse;
                double min_ratio = 1.0;
                for (double tau = -400.0; tau <= 400.0; tau += 0.01) {
                    min_ratio = std::min(
                        min_ratio, expected_laser_rate(tau, params, offset) /
                                       params.asymptotic_coinc_rate_cps);
                }
                c.require(min_ratio >= 0.5 - c6_ceiling_slack,
                          "visibility ceiling violated: min ratio " +
                              fmt(min_ratio) + " at T=" + fmt(beat) +
                              " pulse=" + fmt(pulse));
            }
        }
    }

    // (b) Two-stage Poisson fits: coarse envelope localization, fine fringe
    // fit, center recovery modulo the beat period.
    LaserSourceParams laser;  // T = 10 ps, 127 ps pulse, 2600 cps
    const auto rate = [&](double tau) {
        return expected_laser_rate(tau, laser, c6_true_center_ps);
    };
    for (int i = 0; i < c6_n_fits; ++i) {
        const auto coarse_grid =
            laser_coarse_grid(0.0, laser.beat_period_ps, laser.pulse_width_ps);
        const ScanRecord coarse =
            sample_scan(rate, coarse_grid, 30.0, derive_seed(c6_seed, 2 * i));
        // 5-point boxcar; argmin locates a fringe minimum inside the envelope.
        std::size_t best = 2;
        double best_val = std::numeric_limits<double>::infinity();
        for (std::size_t p = 2; p + 2 < coarse.counts.size(); ++p) {
            double s = 0;
            for (std::size_t q = p - 2; q <= p + 2; ++q) s += coarse.counts[q];
            if (s < best_val) {
                best_val = s;
                best = p;
            }
        }
        const double c0 = coarse.delay_grid_ps[best];

        const auto fine_grid = laser_fine_grid(c0, laser.beat_period_ps);
        ScanRecord fine =
            sample_scan(rate, fine_grid, 30.0, derive_seed(c6_seed, 2 * i + 1));
        fine.source_kind = SourceKind::laser;
        BeatFitOptions opts;
        opts.pulse_width_ps = laser.pulse_width_ps;
        opts.beat_period_guess_ps = laser.beat_period_ps;
        const BeatFit fit = fit_beat_envelope(fine, opts);

        // The fit may lock onto a neighbouring fringe; compare against the
        // nearest point of the true fringe lattice (spacing: the generator's
        // beat period, known exactly here).
        const std::string tag = "fit " + std::to_string(i);
        double residual = std::numeric_limits<double>::infinity();
        for (int fringe = -3; fringe <= 3; ++fringe) {
            residual = std::min(residual,
                                std::abs(fit.center_ps - c6_true_center_ps -
                                         fringe * laser.beat_period_ps));
        }
        c.require(residual <= c6_center_nsigma * fit.center_sigma_ps(),
                  tag + ": center residual " + fmt(residual) + " vs 3 sigma " +
                      fmt(c6_center_nsigma * fit.center_sigma_ps()));
        c.require(std::abs(fit.center_ps - c0) <=
                      c6_anchor_fraction * laser.beat_period_ps,
                  tag + ": fitted center drifted from the coarse anchor");
        c.require(fit.effective_precision_ps >= c6_sigma_eff_lo &&
                      fit.effective_precision_ps <= c6_sigma_eff_hi,
                  tag + ": effective precision " +
                      fmt(fit.effective_precision_ps) + " outside [0.8, 3.2]");
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return finish(c);
}

int criterion_7() {
    Criterion c{7, "random-walk RMS scales as sqrt(L); offsets bias the exponent"};
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<double> lengths = {100.0, 178.0, 316.0, 562.0, 1000.0};

    // (a) RMS/sqrt(L) constant across the decade.
    RandomWalkParams plain;
    plain.step_std_ps = c7_step_std_ps;
    plain.step_length_m = c7_step_length_m;
    plain.seed = c7_seed_plain;
    const auto ensemble = simulate_walk_ensemble(plain, lengths, 4, c7_n_trials);
    std::vector<double> ratio(ensemble.size()), se(ensemble.size());
    double sw = 0, swr = 0;
    for (std::size_t i = 0; i < ensemble.size(); ++i) {
        ratio[i] = ensemble[i].rms_ps / std::sqrt(ensemble[i].length_m);
        se[i] = ensemble[i].sigma_rms_ps / std::sqrt(ensemble[i].length_m);
        sw += 1.0 / (se[i] * se[i]);
        swr += ratio[i] / (se[i] * se[i]);
    }
    const double pooled = swr / sw;
    for (std::size_t i = 0; i < ensemble.size(); ++i) {
        c.require(std::abs(ratio[i] - pooled) <= 3.0 * se[i],
                  "rms/sqrt(L) at " + fmt(ensemble[i].length_m) + " m: " +
                      fmt(ratio[i]) + " vs pooled " + fmt(pooled));
    }

    // (b) Connector offsets: positive intercept, kappa recovered within 3 sigma.
    RandomWalkParams with_conn = plain;
    with_conn.seed = c7_seed_connector;
    with_conn.connector_positions_m = {0.5, 1.0};
    with_conn.connector_offset_std_ps = 0.4;
    const auto conn_ens = simulate_walk_ensemble(with_conn, lengths, 4, c7_n_trials);
    std::vector<LengthPoint> conn_points;
    for (const auto& e : conn_ens) {
        conn_points.push_back({e.length_m, e.rms_ps, c7_table_sigma_ps, 6});
    }
    const SqrtFit sf = fit_sqrt_model(conn_points);
    const double kappa_sigma = std::sqrt(sf.covariance(0, 0));
    const double offset_sigma = std::sqrt(sf.covariance(1, 1));
    c.require(sf.offset_c > 0, "intercept " + fmt(sf.offset_c) + " not positive");
    c.require(sf.offset_c >= 2.0 * offset_sigma,
              "intercept " + fmt(sf.offset_c) + " below 2 sigma " +
                  fmt(2.0 * offset_sigma));
    c.require(std::abs(sf.kappa - c7_kappa_gen) <= 3.0 * kappa_sigma,
              "kappa " + fmt(sf.kappa) + " vs generator " + fmt(c7_kappa_gen) +
                  " (3 sigma " + fmt(3.0 * kappa_sigma) + ")");

    // (c) Offset-free power law: alpha = 0.5 within 0.02.
    std::vector<LengthPoint> plain_points;
    for (const auto& e : ensemble) {
        plain_points.push_back({e.length_m, e.rms_ps, c7_table_sigma_ps, 6});
    }
    const PowerLawFit pf = fit_power_law(plain_points);
    c.require(std::abs(pf.exponent_alpha - 0.5) <= c7_alpha_tol,
              "offset-free alpha " + fmt(pf.exponent_alpha));

    // (d) A constant offset at c = 0.4 kappa sqrt(L_max) drags alpha below 0.45.
    const double offset_c = 0.4 * c7_kappa_gen * std::sqrt(1000.0);
    std::vector<LengthPoint> biased_points;
    for (double length : lengths) {
        biased_points.push_back(
            {length, c7_kappa_gen * std::sqrt(length) + offset_c,
             c7_table_sigma_ps, 6});
    }
    const PowerLawFit biased = fit_power_law(biased_points);
    c.require(biased.exponent_alpha < c7_alpha_biased_max,
              "offset-biased alpha " + fmt(biased.exponent_alpha) +
                  " not below 0.45");

    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.require(c.seconds < seconds_criterion_7,
              "runtime " + fmt(c.seconds) + " s exceeds 5 min");
    return finish(c);
}

int criterion_8() {
    Criterion c{8, "bootstrap is seed-reproducible and covers the true exponent"};
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<double> lengths = {7.7,   12.7,  49.7, 72.7,
                                         114.7, 187.7, 1300.0};

    const auto make_dataset = [&](std::uint64_t noise_seed) {
        std::mt19937_64 eng = make_engine(noise_seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<LengthPoint> pts;
        for (double length : lengths) {
            const double y =
                0.35 * std::sqrt(length) * (1.0 + 0.08 * gauss(eng));
            pts.push_back({length, y, 0.08 * y, 6});
        }
        return pts;
    };

    const auto fixed = make_dataset(derive_seed(c8_seed_noise, 9999));
    const BootstrapResult b1 = bootstrap_ci(fixed, 500, c8_seed_repro);
    const BootstrapResult b2 = bootstrap_ci(fixed, 500, c8_seed_repro);
    const BootstrapResult b3 = bootstrap_ci(fixed, 500, c8_seed_repro + 1);
    c.require(b1.point_estimate == b2.point_estimate &&
                  b1.ci_low == b2.ci_low && b1.ci_high == b2.ci_high,
              "same seed produced different intervals");
    c.require(b1.ci_low != b3.ci_low || b1.ci_high != b3.ci_high,
              "different seeds produced identical intervals");

    int covered = 0;
    for (int i = 0; i < c8_n_datasets; ++i) {
        const auto pts = make_dataset(derive_seed(c8_seed_noise, i));
        const BootstrapResult b =
            bootstrap_ci(pts, c8_n_resamples, derive_seed(c8_seed_boot, i));
        covered += (b.ci_low <= 0.5 && 0.5 <= b.ci_high);
    }
    c.require(covered >= c8_min_covered,
              "coverage " + std::to_string(covered) + "/200 below 170");
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return finish(c);
}

int criterion_9() {
    Criterion c{9, "timing bound in the published band with exact count scaling"};
    const auto t0 = std::chrono::steady_clock::now();
    const DipShape shape{0.125, 0.92, 0.25};

    for (double counts : {1.5e5, 3.5e5}) {
        const CrbReport r = crb(shape, counts, 1.8);
        const double fs = r.crb_ps * 1000.0;
        c.require(fs >= c9_crb_fs_lo && fs <= c9_crb_fs_hi,
                  "bound " + fmt(fs) + " fs at N=" + fmt(counts) +
                      " outside [0.5, 2.0]");
        c.require(!r.range_warning, "unexpected range warning at 1.8 ps");
    }
    const double r1 = crb(shape, 2e5, 1.8).crb_ps;
    const double r4 = crb(shape, 8e5, 1.8).crb_ps;
    c.require(std::abs(r1 / r4 - 2.0) <= c9_halving_rel_tol,
              "quadrupling counts did not halve the bound: ratio " +
                  fmt(r1 / r4));

    for (double sigma : {0.025, 0.25, 2.5}) {
        const IntegratedInfo info = integrated_info({0.125, 0.92, sigma});
        c.require(std::abs(info.shape_factor - c9_shape_factor) <= c9_shape_tol,
                  "shape factor " + fmt(info.shape_factor) + " at sigma " +
                      fmt(sigma) + " not invariant");
    }

    // Analytic Fisher derivative vs central finite differences.
    const auto probability = [&](double tau) {
        return shape.p_dist *
               (1.0 - shape.visibility *
                          std::exp(-tau * tau /
                                   (2.0 * shape.coherence_time_ps *
                                    shape.coherence_time_ps)));
    };
    const double h = 1e-5 * shape.coherence_time_ps;
    for (double tau : {0.025, 0.1, 0.25, 0.5}) {
        const double dp = (probability(tau + h) - probability(tau - h)) / (2 * h);
        const double p = probability(tau);
        const double fd_info = dp * dp / (p * (1.0 - p));
        const double analytic = fisher_info_at(shape, tau);
        c.require(std::abs(fd_info / analytic - 1.0) <= c9_fd_rel_tol,
                  "analytic vs finite-difference information at tau " +
                      fmt(tau) + ": rel err " +
                      fmt(std::abs(fd_info / analytic - 1.0)));
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return finish(c);
}

int criterion_10() {
    Criterion c{10, "end-to-end pipeline recovers injected skews, byte-reproducibly"};
    const auto t0 = std::chrono::steady_clock::now();
    const std::filesystem::path root =
        std::filesystem::temp_directory_path() /
        ("icskit_acceptance_" + std::to_string(::getpid()));
    std::filesystem::create_directories(root);

    nlohmann::json doc;
    doc["seed"] = c10_seed;
    doc["fiber"] = {{"core_delays_ps", {0.0, 1.8, -1.1, 0.7}},
                    {"arm_delta_ps", 20.0}};
    doc["scan"] = {{"visibility_scale", 0.92}, {"integration_s", 3.0}};
    const cli::PipelineConfig cfg = cli::parse_config(doc);

    const auto files_a = cli::run_simulate(cfg, root / "a");
    const auto files_b = cli::run_simulate(cfg, root / "b");
    c.require(files_a.size() == 72, "expected 72 scan files, got " +
                                        std::to_string(files_a.size()));

    // Byte-identical synthesis across two runs of the same seed.
    const auto read_bytes = [](const std::filesystem::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    std::vector<std::string> names;
    for (const auto& entry : std::filesystem::directory_iterator(root / "a")) {
        names.push_back(entry.path().filename().string());
    }
    std::sort(names.begin(), names.end());
    c.require(names.size() == 145,
              "expected 145 files (72 scans + sidecars + manifest), got " +
                  std::to_string(names.size()));
    for (const auto& name : names) {
        if (!std::filesystem::exists(root / "b" / name)) {
            c.require(false, "second run missing " + name);
            continue;
        }
        c.require(read_bytes(root / "a" / name) == read_bytes(root / "b" / name),
                  "file " + name + " differs between identical runs");
    }

    // Fit twice; reports must be identical, then feed the skew extraction.
    const nlohmann::json report_1 = cli::run_fit(files_a, cfg);
    const nlohmann::json report_2 = cli::run_fit(files_a, cfg);
    c.require(report_1.dump() == report_2.dump(),
              "fit reports differ between identical runs");
    c.require(report_1["failures"].empty(), "some scans failed to fit");

    const DipTable dips = cli::dip_table_from_fit_report(report_1, 0.0);
    const auto skew =
        cli::run_skew(dips, SkewConvention::half_difference, false);
    const std::vector<double> delays = {0.0, 1.8, -1.1, 0.7};
    for (const auto& pair : all_core_pairs()) {
        const double truth =
            std::abs(delays[pair.first - 1] - delays[pair.second - 1]);
        const auto& entry = skew.ics.entries.at(pair);
        c.require(std::abs(entry.magnitude_ps - truth) <=
                      c10_recovery_nsigma * entry.sigma_ps,
                  "pair " + std::to_string(pair.first) + "-" +
                      std::to_string(pair.second) + ": " +
                      fmt(entry.magnitude_ps) + " vs true " + fmt(truth) +
                      " (3 sigma " + fmt(c10_recovery_nsigma * entry.sigma_ps) +
                      ")");
    }

    std::filesystem::remove_all(root);
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return finish(c);
}

}  // namespace

int main() {
    int failed = 0;
    failed += criterion_1();
    failed += criterion_2();
    failed += criterion_3();
    failed += criterion_4();
    failed += criterion_5();
    failed += criterion_6();
    failed += criterion_7();
    failed += criterion_8();
    failed += criterion_9();
    failed += criterion_10();
    if (failed != 0) {
        std::cout << failed << " criteria failed\n";
        return 1;
    }
    std::cout << "all criteria passed\n";
    return 0;
}
