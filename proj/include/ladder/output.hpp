#pragma once

// On-disk result formats: CSV tables in shortest round-trip decimal and a
// JSON sidecar next to each main table.

#include <json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ladder/config.hpp"
#include "ladder/errors.hpp"
#include "ladder/experiments.hpp"

namespace ladder {

using json = nlohmann::ordered_json;

inline constexpr const char* kArtifactVersion = "1.0.0";

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path.string(), "cannot open for writing");
    out << content;
    out.close();
    if (!out) throw IoError(path.string(), "write failed");
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string(), "cannot open for reading");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline std::filesystem::path sidecar_path(std::filesystem::path csv) { return csv.replace_extension(".json"); }

inline void write_json(const std::filesystem::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

inline json read_json(const std::filesystem::path& path) {
    try {
        return json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw IoError(path.string(), std::string("invalid JSON: ") + e.what());
    }
}

// Config echo plus provenance fields shared by every sidecar.
inline json sidecar_header(const ExperimentConfig& c) {
    json cfg = json::object();
    for (const auto& [k, v] : config_entries(c)) cfg[k] = v;
    return json{{"artifact_version", kArtifactVersion},
                {"experiment", std::string(to_string(c.experiment))},
                {"seed", c.seed},
                {"config", cfg},
                {"thresholds", {{"mediating_cutoff", c.mediating_cutoff}, {"peak_prominence", c.peak_prominence}}}};
}

// ---------------------------------------------------------------------------
// CSV

class CsvWriter {
public:
    explicit CsvWriter(const std::vector<std::string>& header) { row(header); }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ += ',';
            out_ += cells[i];
        }
        out_ += '\n';
    }

    void row(const std::vector<double>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ += ',';
            out_ += format_double(cells[i]);
        }
        out_ += '\n';
    }

    const std::string& str() const { return out_; }
    void save(const std::filesystem::path& path) const { write_text_file(path, out_); }

private:
    std::string out_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw std::out_of_range("no column '" + name + "'");
    }

    double number(std::size_t row, std::size_t col) const {
        const std::string& s = rows.at(row).at(col);
        double v = 0.0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size())
            throw std::invalid_argument("not a number: '" + s + "'");
        return v;
    }
};

inline CsvTable parse_csv(const std::string& text) {
    CsvTable t;
    std::istringstream in(text);
    bool first = true;
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            cells.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (first)
            t.header = std::move(cells);
        else
            t.rows.push_back(std::move(cells));
        first = false;
    }
    return t;
}

inline CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(read_text_file(path)); }

// ---------------------------------------------------------------------------
// Trajectories

inline std::string trajectory_csv(const Trajectory& traj) {
    std::vector<std::string> header{"t"};
    for (const auto& c : traj.concurrence) header.push_back("C" + c.label);
    header.push_back("F");
    for (const auto& c : traj.mutual_info) header.push_back(c.label);
    CsvWriter w(header);
    std::vector<double> row;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        row.clear();
        row.push_back(traj.times[k]);
        for (const auto& c : traj.concurrence) row.push_back(c.values[k]);
        row.push_back(traj.fidelity[k]);
        for (const auto& c : traj.mutual_info) row.push_back(c.values[k]);
        w.row(row);
    }
    return w.str();
}

inline json summary_json(const TrajectorySummary& s) {
    json j{{"F_max", s.f_max}, {"t_at_F_max", s.t_at_f_max}, {"F_min", s.f_min}};
    json pairs = json::object();
    for (const auto& m : s.max_concurrence) pairs["C" + m.label] = m.value;
    j["max_concurrence"] = pairs;
    j["omega_fast"] = s.omega_fast ? json(*s.omega_fast) : json(nullptr);
    j["T_slow"] = s.t_slow ? json(*s.t_slow) : json(nullptr);
    return j;
}

// CSV at `csv_path`, sidecar next to it. `meta` is merged into the sidecar.
inline void write_trajectory(const Trajectory& traj, const TrajectorySummary& summary,
                             const std::filesystem::path& csv_path, const json& meta = json::object()) {
    write_text_file(csv_path, trajectory_csv(traj));
    json side = meta;
    side["summary"] = summary_json(summary);
    write_json(sidecar_path(csv_path), side);
}

// ---------------------------------------------------------------------------
// Tables

inline void write_sweep(const FieldSweep& sweep, const std::filesystem::path& csv_path,
                        const json& meta = json::object()) {
    CsvWriter w({"h", "T_slow", "F_max", "t_at_F_max", "max_C_terminal", "t_end", "n_points", "flag"});
    json notes = json::array();
    for (const auto& r : sweep.rows) {
        w.row({format_double(r.h), r.t_slow ? format_double(*r.t_slow) : std::string("nan"), format_double(r.f_max),
               format_double(r.t_at_f_max), format_double(r.max_terminal), format_double(r.t_end),
               std::to_string(r.n_points), r.t_slow ? "ok" : "insufficient_data"});
        notes.push_back(json{{"h", r.h}, {"note", r.note}});
    }
    w.save(csv_path);
    json side = meta;
    if (sweep.fit) {
        side["fit"] = {{"slope", sweep.fit->slope},
                       {"intercept", sweep.fit->intercept},
                       {"r_squared", sweep.fit->r_squared},
                       {"prefactor_at_unit_h", std::exp(sweep.fit->intercept)}};
    } else {
        side["fit"] = nullptr;
    }
    side["rows"] = notes;
    write_json(sidecar_path(csv_path), side);
}

// First line: "g\d" then the d axis. Each further line: g value, then F_max.
inline void write_heatmap(const HeatmapGrid& grid, const std::filesystem::path& csv_path,
                          const json& meta = json::object()) {
    std::vector<std::string> header{"g\\d"};
    for (double d : grid.d_values) header.push_back(format_double(d));
    CsvWriter w(header);
    double lo = 1.0, hi = 0.0;
    for (std::size_t i = 0; i < grid.g_values.size(); ++i) {
        std::vector<double> row{grid.g_values[i]};
        row.insert(row.end(), grid.f_max[i].begin(), grid.f_max[i].end());
        for (double f : grid.f_max[i]) lo = std::min(lo, f), hi = std::max(hi, f);
        w.row(row);
    }
    w.save(csv_path);
    json side = meta;
    side["g_values"] = grid.g_values;
    side["d_values"] = grid.d_values;
    side["min_F_max"] = lo;
    side["max_F_max"] = hi;
    write_json(sidecar_path(csv_path), side);
}

// `<stem>_curves.csv` (mean/std of F per delta vs t), `<stem>_realizations.csv`
// (per-realization F_max) and `<stem>.json`.
inline void write_ensemble(const std::vector<EnsembleStats>& runs, const std::filesystem::path& dir,
                           const std::string& stem, const json& meta = json::object()) {
    if (runs.empty()) throw std::invalid_argument("write_ensemble: nothing to write");
    std::vector<std::string> header{"t"};
    for (const auto& r : runs) {
        header.push_back("mean_F_" + format_double(r.delta));
        header.push_back("std_F_" + format_double(r.delta));
    }
    CsvWriter curves(header);
    for (std::size_t k = 0; k < runs.front().times.size(); ++k) {
        std::vector<double> row{runs.front().times[k]};
        for (const auto& r : runs) {
            row.push_back(r.mean_fidelity[k]);
            row.push_back(r.std_fidelity[k]);
        }
        curves.row(row);
    }
    curves.save(dir / (stem + "_curves.csv"));

    CsvWriter peaks({"delta", "realization", "seed", "F_max"});
    json stats = json::array();
    for (const auto& r : runs) {
        for (std::size_t k = 0; k < r.n_samples; ++k)
            peaks.row({format_double(r.delta), std::to_string(k), std::to_string(r.seeds[k]),
                       format_double(r.peak_fidelity[k])});
        stats.push_back({{"delta", r.delta},
                         {"n_samples", r.n_samples},
                         {"mean_peak_fidelity", r.mean_peak_fidelity},
                         {"std_peak_fidelity", r.std_peak_fidelity},
                         {"min_mean_fidelity", *std::min_element(r.mean_fidelity.begin(), r.mean_fidelity.end())}});
    }
    peaks.save(dir / (stem + "_realizations.csv"));
    json side = meta;
    side["ensembles"] = stats;
    write_json(dir / (stem + ".json"), side);
}

inline void write_frequency_table(const std::vector<FrequencyRow>& rows, const std::vector<FrequencyRow>& control,
                                  const std::filesystem::path& csv_path, const json& meta = json::object()) {
    CsvWriter w({"d", "legs", "omega_predicted", "omega_measured", "ratio", "flag"});
    json notes = json::array();
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("nan"); };
    for (const auto* list : {&rows, &control})
        for (const auto& r : *list) {
            const std::string legs = list == &rows ? "both" : "even_sites_only";
            w.row({format_double(r.d), legs, format_double(r.predicted), opt(r.measured), opt(r.ratio),
                   r.measured ? "ok" : "insufficient_data"});
            if (!r.note.empty()) notes.push_back(json{{"d", r.d}, {"legs", legs}, {"note", r.note}});
        }
    w.save(csv_path);
    json side = meta;
    side["notes"] = notes;
    write_json(sidecar_path(csv_path), side);
}

inline void write_scaling(const std::vector<ScalingRow>& rows, const std::filesystem::path& csv_path,
                          const json& meta = json::object()) {
    CsvWriter w({"n_rungs", "first_peak_time", "max_C_terminal", "max_C_mediating"});
    for (const auto& r : rows)
        w.row({std::to_string(r.n_rungs), r.first_peak_time ? format_double(*r.first_peak_time) : "nan",
               format_double(r.max_terminal), format_double(r.max_mediating)});
    w.save(csv_path);
    write_json(sidecar_path(csv_path), meta);
}

inline void write_effective_checks(const AlphaMeasurement& alpha, const std::vector<EffectiveCheck>& checks,
                                   const std::filesystem::path& csv_path, const json& meta = json::object()) {
    CsvWriter w({"h", "alpha", "J_eff", "T_slow_full", "T_slow_effective", "relative_error"});
    for (const auto& c : checks)
        w.row(std::vector<double>{c.h, c.alpha, c.j_eff, c.t_slow_full, c.t_slow_effective, c.relative_error});
    w.save(csv_path);
    json side = meta;
    side["alpha_measurement"] = {
        {"h", alpha.h}, {"T_slow", alpha.t_slow}, {"kappa", alpha.kappa}, {"alpha", alpha.alpha}};
    write_json(sidecar_path(csv_path), side);
}

}  // namespace ladder
