#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ics/scaling.hpp"
#include "ics/scanmodel.hpp"
#include "ics/skew.hpp"

namespace ics {

// Shortest decimal form that round-trips the exact binary value.
std::string format_double(double value);
double parse_double(std::string_view text);

// Scan persistence: CSV `delay_ps,counts,integration_s` plus a JSON sidecar
// (same basename, .json) carrying channel, source parameters, seed,
// skew_offset_ps, and, for corrected records, the per-point variance. The
// caller provides the source-parameter block of the sidecar; read_scan
// returns it untouched. Round-trips are bit-exact.
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);
void write_scan(const std::filesystem::path& csv_path, const ScanRecord& record,
                const nlohmann::json& source_params);
struct LoadedScan {
    ScanRecord record;
    nlohmann::json sidecar;
};
LoadedScan read_scan(const std::filesystem::path& csv_path);

// Dip and ICS tables: CSV `pair,position_ps,sigma_ps` (ordered pair "j-k")
// and `pair,magnitude_ps,sigma_ps` (unordered pair). Lines starting with '#'
// are provenance comments and are skipped on read.
void write_dip_table(const std::filesystem::path& path, const DipTable& table);
DipTable read_dip_table(const std::filesystem::path& path);
void write_ics_table(const std::filesystem::path& path, const IcsTable& table);
IcsTable read_ics_table(const std::filesystem::path& path);

// Scaling input: CSV `length_m,rms_ps,sigma_ps,n_pairs`.
void write_length_points(const std::filesystem::path& path,
                         const std::vector<LengthPoint>& points);
std::vector<LengthPoint> read_length_points(const std::filesystem::path& path);

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& value);

}  // namespace ics
