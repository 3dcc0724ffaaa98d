#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "silosim/config.hpp"
#include "silosim/errors.hpp"
#include "silosim/types.hpp"

namespace silosim {

/// Per-tick record of the system: every agent's label, the silo occupancy,
/// and the alignment metrics. Stability is absent at t = 0 (no previous
/// tick to compare against).
struct SystemSnapshot {
    std::uint32_t t = 0;
    std::vector<std::int32_t> labels;
    std::map<std::int32_t, std::size_t> silo_counts;
    std::size_t silo_count = 0;
    std::size_t unknown_count = 0; ///< agents answering with the unknown sentinel
    std::optional<double> stability;
    double entropy = 0.0;
    std::optional<std::vector<Embedding>> embeddings; ///< opt-in dump only
};

/// One system run: the configuration and the snapshots for t = 0..T.
struct Trajectory {
    SystemConfig config;
    std::vector<SystemSnapshot> snapshots;
};

/// One JSON Lines record:
/// {"t":..,"labels":[..],"silo_counts":{"label":count,..},"silo_count":..,
///  "stability":..|null,"entropy":..}
/// plus "unknown_count" when nonzero and "embeddings" when dumped.
inline std::string snapshot_to_jsonl_line(const SystemSnapshot& snap) {
    json line;
    line["t"] = snap.t;
    line["labels"] = snap.labels;
    json counts = json::object();
    for (const auto& [id, c] : snap.silo_counts) counts[std::to_string(id)] = c;
    line["silo_counts"] = counts;
    line["silo_count"] = snap.silo_count;
    if (snap.stability)
        line["stability"] = *snap.stability;
    else
        line["stability"] = nullptr;
    line["entropy"] = snap.entropy;
    if (snap.unknown_count > 0) line["unknown_count"] = snap.unknown_count;
    if (snap.embeddings) line["embeddings"] = *snap.embeddings;
    return line.dump();
}

inline std::string trajectory_to_jsonl(const Trajectory& traj) {
    std::string out;
    for (const auto& snap : traj.snapshots) {
        out += snapshot_to_jsonl_line(snap);
        out += '\n';
    }
    return out;
}

/// Parses snapshots back from JSON Lines; validates contiguous tick indices
/// and the per-snapshot count invariants.
inline std::vector<SystemSnapshot> parse_trajectory_jsonl(const std::string& text) {
    std::vector<SystemSnapshot> snaps;
    std::istringstream in(text);
    std::string linebuf;
    std::size_t lineno = 0;
    while (std::getline(in, linebuf)) {
        ++lineno;
        if (linebuf.empty()) continue;
        json line;
        try {
            line = json::parse(linebuf);
        } catch (const json::parse_error& e) {
            throw Error("trajectory line " + std::to_string(lineno) + ": " + e.what());
        }
        SystemSnapshot snap;
        try {
            snap.t = line.at("t").get<std::uint32_t>();
            snap.labels = line.at("labels").get<std::vector<std::int32_t>>();
            for (const auto& [key, v] : line.at("silo_counts").items())
                snap.silo_counts[static_cast<std::int32_t>(std::stol(key))] =
                    v.get<std::size_t>();
            snap.silo_count = line.at("silo_count").get<std::size_t>();
            if (!line.at("stability").is_null())
                snap.stability = line.at("stability").get<double>();
            snap.entropy = line.at("entropy").get<double>();
            if (line.contains("unknown_count"))
                snap.unknown_count = line.at("unknown_count").get<std::size_t>();
            if (line.contains("embeddings"))
                snap.embeddings = line.at("embeddings").get<std::vector<Embedding>>();
        } catch (const json::exception& e) {
            throw Error("trajectory line " + std::to_string(lineno) + ": " + e.what());
        }
        if (snap.t != snaps.size())
            throw Error("trajectory line " + std::to_string(lineno) +
                        ": non-contiguous tick " + std::to_string(snap.t));
        if (snap.silo_count != snap.silo_counts.size())
            throw Error("trajectory line " + std::to_string(lineno) +
                        ": silo_count disagrees with silo_counts");
        snaps.push_back(std::move(snap));
    }
    if (snaps.empty())
        throw Error("trajectory file contains no snapshots");
    return snaps;
}

} // namespace silosim
