#include "ics/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "ics/errors.hpp"
#include "ics/version.hpp"

namespace ics {

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw IoError("malformed number: '" + std::string(text) + "'");
    }
    return value;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    if (!out) throw IoError("write failed for " + path.string());
}

OrderedPair parse_pair(const std::string& text, const std::string& context) {
    const std::size_t dash = text.find('-');
    if (dash == std::string::npos || dash == 0 || dash + 1 >= text.size()) {
        throw IoError("malformed pair '" + text + "' in " + context);
    }
    try {
        return {std::stoi(text.substr(0, dash)), std::stoi(text.substr(dash + 1))};
    } catch (const std::exception&) {
        throw IoError("malformed pair '" + text + "' in " + context);
    }
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
    std::filesystem::path p = csv_path;
    p.replace_extension(".json");
    return p;
}

void write_scan(const std::filesystem::path& csv_path, const ScanRecord& record,
                const nlohmann::json& source_params) {
    if (record.delay_grid_ps.size() != record.counts.size()) {
        throw ValidationError("grid and counts lengths differ");
    }
    std::string csv = "delay_ps,counts,integration_s\n";
    const std::string integration = format_double(record.integration_time_s);
    for (std::size_t i = 0; i < record.delay_grid_ps.size(); ++i) {
        csv += format_double(record.delay_grid_ps[i]);
        csv += ',';
        csv += format_double(record.counts[i]);
        csv += ',';
        csv += integration;
        csv += '\n';
    }
    write_file(csv_path, csv);

    nlohmann::json sidecar;
    sidecar["tool_version"] = tool_version;
    sidecar["channel"] = record.channel;
    sidecar["source_kind"] =
        record.source_kind == SourceKind::spdc ? "spdc" : "laser";
    sidecar["source"] = source_params;
    sidecar["seed"] = record.seed;
    sidecar["skew_offset_ps"] = record.skew_offset_ps;
    if (record.variance) {
        sidecar["variance"] = *record.variance;
    }
    write_json(sidecar_path(csv_path), sidecar);
}

LoadedScan read_scan(const std::filesystem::path& csv_path) {
    const auto lines = read_lines(csv_path);
    if (lines.empty() || lines[0] != "delay_ps,counts,integration_s") {
        throw IoError("bad scan header in " + csv_path.string());
    }
    LoadedScan out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto fields = split_csv_line(lines[i]);
        if (fields.size() != 3) {
            throw IoError("expected 3 columns at line " + std::to_string(i + 1) +
                          " of " + csv_path.string());
        }
        out.record.delay_grid_ps.push_back(parse_double(fields[0]));
        out.record.counts.push_back(parse_double(fields[1]));
        out.record.integration_time_s = parse_double(fields[2]);
    }
    if (out.record.delay_grid_ps.empty()) {
        throw IoError("scan " + csv_path.string() + " has no data rows");
    }

    out.sidecar = read_json(sidecar_path(csv_path));
    const auto& sc = out.sidecar;
    out.record.channel = sc.value("channel", std::string{});
    const std::string kind = sc.value("source_kind", "spdc");
    out.record.source_kind = kind == "laser" ? SourceKind::laser : SourceKind::spdc;
    out.record.seed = sc.value("seed", std::uint64_t{0});
    out.record.skew_offset_ps = sc.value("skew_offset_ps", 0.0);
    if (sc.contains("variance")) {
        out.record.variance = sc["variance"].get<std::vector<double>>();
        if (out.record.variance->size() != out.record.counts.size()) {
            throw IoError("variance length mismatch in sidecar of " +
                          csv_path.string());
        }
    }
    return out;
}

namespace {

std::string provenance_comment() {
    return std::string("# tool_version=") + tool_version + "\n";
}

}  // namespace

void write_dip_table(const std::filesystem::path& path, const DipTable& table) {
    std::string csv = provenance_comment();
    csv += "pair,position_ps,sigma_ps\n";
    for (const auto& [pair, entry] : table.entries) {
        csv += std::to_string(pair.first) + "-" + std::to_string(pair.second);
        csv += ',';
        csv += format_double(entry.position_ps);
        csv += ',';
        csv += format_double(entry.sigma_ps);
        csv += '\n';
    }
    write_file(path, csv);
}

DipTable read_dip_table(const std::filesystem::path& path) {
    DipTable table;
    const auto lines = read_lines(path);
    bool header_seen = false;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != "pair,position_ps,sigma_ps") {
                throw IoError("bad dip-table header in " + path.string());
            }
            header_seen = true;
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != 3) {
            throw IoError("expected 3 columns at line " + std::to_string(i + 1) +
                          " of " + path.string());
        }
        const OrderedPair pair = parse_pair(fields[0], path.string());
        table.entries[pair] =
            DipEntry{parse_double(fields[1]), parse_double(fields[2])};
    }
    if (!header_seen || table.entries.empty()) {
        throw IoError("dip table " + path.string() + " has no data rows");
    }
    return table;
}

void write_ics_table(const std::filesystem::path& path, const IcsTable& table) {
    std::string csv = provenance_comment();
    csv += std::string("# convention=") +
           (table.convention == SkewConvention::half_difference
                ? "half_difference"
                : "full_difference") +
           "\n";
    csv += "pair,magnitude_ps,sigma_ps\n";
    for (const auto& [pair, entry] : table.entries) {
        csv += std::to_string(pair.first) + "-" + std::to_string(pair.second);
        csv += ',';
        csv += format_double(entry.magnitude_ps);
        csv += ',';
        csv += format_double(entry.sigma_ps);
        csv += '\n';
    }
    write_file(path, csv);
}

IcsTable read_ics_table(const std::filesystem::path& path) {
    IcsTable table;
    const auto lines = read_lines(path);
    bool header_seen = false;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        if (line.rfind("# convention=", 0) == 0) {
            table.convention = line == "# convention=full_difference"
                                   ? SkewConvention::full_difference
                                   : SkewConvention::half_difference;
            continue;
        }
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != "pair,magnitude_ps,sigma_ps") {
                throw IoError("bad ICS-table header in " + path.string());
            }
            header_seen = true;
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != 3) {
            throw IoError("expected 3 columns at line " + std::to_string(i + 1) +
                          " of " + path.string());
        }
        OrderedPair pair = parse_pair(fields[0], path.string());
        if (pair.first > pair.second) std::swap(pair.first, pair.second);
        table.entries[pair] =
            IcsEntry{parse_double(fields[1]), parse_double(fields[2])};
    }
    if (!header_seen || table.entries.empty()) {
        throw IoError("ICS table " + path.string() + " has no data rows");
    }
    return table;
}

void write_length_points(const std::filesystem::path& path,
                         const std::vector<LengthPoint>& points) {
    std::string csv = provenance_comment();
    csv += "length_m,rms_ps,sigma_ps,n_pairs\n";
    for (const auto& p : points) {
        csv += format_double(p.length_m);
        csv += ',';
        csv += format_double(p.rms_ps);
        csv += ',';
        csv += format_double(p.sigma_rms_ps);
        csv += ',';
        csv += std::to_string(p.n_pairs);
        csv += '\n';
    }
    write_file(path, csv);
}

std::vector<LengthPoint> read_length_points(const std::filesystem::path& path) {
    std::vector<LengthPoint> points;
    const auto lines = read_lines(path);
    bool header_seen = false;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != "length_m,rms_ps,sigma_ps,n_pairs") {
                throw IoError("bad length-points header in " + path.string());
            }
            header_seen = true;
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != 4) {
            throw IoError("expected 4 columns at line " + std::to_string(i + 1) +
                          " of " + path.string());
        }
        LengthPoint p;
        p.length_m = parse_double(fields[0]);
        p.rms_ps = parse_double(fields[1]);
        p.sigma_rms_ps = parse_double(fields[2]);
        p.n_pairs = static_cast<int>(parse_double(fields[3]));
        points.push_back(p);
    }
    if (points.empty()) {
        throw IoError("length-points file " + path.string() + " has no data rows");
    }
    return points;
}

nlohmann::json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError("malformed JSON in " + path.string() + ": " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& value) {
    write_file(path, value.dump(2) + "\n");
}

}  // namespace ics
