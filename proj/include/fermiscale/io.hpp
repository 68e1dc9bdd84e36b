#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fermiscale/structfact.hpp"

namespace fermiscale {

using nlohmann::json;

/// Shortest exact decimal form of a double, stable across runs and thread
/// counts (CSV numeric fields are part of the reproducibility contract).
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hash_hex(const std::string& data) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(data)));
    return buf;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline json region_spec_to_json(const RegionSpec& spec) {
    json j;
    j["kind"] = spec.kind;
    if (spec.kind == "box") {
        j["lengths"] = spec.lengths;
        j["offset"] = spec.offset;
    } else {
        j["sites"] = spec.sites;
    }
    return j;
}

inline RegionSpec region_spec_from_json(const json& j) {
    RegionSpec spec;
    spec.kind = j.at("kind").get<std::string>();
    if (spec.kind == "box") {
        spec.lengths = j.at("lengths").get<std::vector<int>>();
        spec.offset = j.at("offset").get<std::vector<int>>();
    } else {
        spec.sites = j.at("sites").get<std::vector<std::vector<int>>>();
    }
    return spec;
}

inline json metadata_to_json(const SeriesMetadata& meta) {
    json j;
    j["model"] = meta.model;
    j["params"] = meta.params;
    j["dims"] = meta.dims;
    j["region"] = region_spec_to_json(meta.region);
    j["delta_omega"] = meta.delta_omega;
    j["temperature"] = meta.temperature;
    j["wall_time_s"] = meta.wall_time_s;
    return j;
}

inline SeriesMetadata metadata_from_json(const json& j) {
    SeriesMetadata meta;
    meta.model = j.at("model").get<std::string>();
    meta.params = j.at("params").get<std::map<std::string, double>>();
    meta.dims = j.at("dims").get<std::vector<int>>();
    meta.region = region_spec_from_json(j.at("region"));
    meta.delta_omega = j.at("delta_omega").get<double>();
    meta.temperature = j.at("temperature").get<double>();
    meta.wall_time_s = j.value("wall_time_s", 0.0);
    return meta;
}

/// CSV with one header line; every cell printed with format_double.
inline void write_csv(const std::filesystem::path& path, const std::string& header,
                      const std::vector<std::vector<double>>& rows) {
    std::string out = header + "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_double(row[i]);
        }
        out += '\n';
    }
    write_text_file(path, out);
}

inline void write_spectrum_csv(const std::filesystem::path& path, const SpectrumSeries& series) {
    std::vector<std::vector<double>> rows;
    rows.reserve(series.omega0.size());
    for (std::size_t i = 0; i < series.omega0.size(); ++i)
        rows.push_back({series.omega0[i], series.value[i]});
    write_csv(path, "omega0,sbar", rows);
}

inline void write_spectrum_sidecar(const std::filesystem::path& path,
                                   const SpectrumSeries& series) {
    write_text_file(path, metadata_to_json(series.meta).dump(2) + "\n");
}

/// (distance, correlator) table feeding the decay fits.
inline void write_correlator_csv(const std::filesystem::path& path,
                                 std::span<const std::pair<double, double>> samples) {
    std::vector<std::vector<double>> rows;
    for (const auto& [r, c] : samples) rows.push_back({r, c});
    write_csv(path, "distance,correlator", rows);
}

} // namespace fermiscale
