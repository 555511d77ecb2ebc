#pragma once

// Experiment configuration: a flat `key = value` format with `#` comments.
// Command-line flags use the same keys and override file values.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <utility>
#include <vector>

#include "ladder/core.hpp"
#include "ladder/errors.hpp"

namespace ladder {

enum class Experiment { reference, field_sweep, heatmap, disorder, scaling, freq_table, effective_check };

inline std::string_view to_string(Experiment e) {
    switch (e) {
        case Experiment::reference: return "reference";
        case Experiment::field_sweep: return "field-sweep";
        case Experiment::heatmap: return "heatmap";
        case Experiment::disorder: return "disorder";
        case Experiment::scaling: return "scaling";
        case Experiment::freq_table: return "freq-table";
        case Experiment::effective_check: return "effective-check";
    }
    return "unknown";
}

inline const std::vector<Experiment>& all_experiments() {
    static const std::vector<Experiment> all{Experiment::reference, Experiment::field_sweep,
                                             Experiment::heatmap,   Experiment::disorder,
                                             Experiment::scaling,   Experiment::freq_table,
                                             Experiment::effective_check};
    return all;
}

inline Experiment parse_experiment(std::string_view name) {
    for (auto e : all_experiments())
        if (to_string(e) == name) return e;
    throw ConfigError("experiment", 0, "unknown experiment '" + std::string(name) + "'");
}

struct ExperimentConfig {
    Experiment experiment = Experiment::reference;
    LadderParams params;
    InitialState state = InitialState::phi_plus;

    double t_start = 0.0;
    double t_end = 10.0;
    std::size_t n_points = 4001;
    std::uint64_t seed = 42;
    unsigned threads = 0;  // 0: one per hardware thread

    double mediating_cutoff = 0.1;
    double peak_prominence = 0.05;
    int envelope_smoothing = 5;
    bool mutual_info = false;

    // field-sweep and effective-check
    std::vector<double> h_values;  // empty: experiment default
    double window_factor = 1.2;
    double slow_prefactor = 2.37;
    double min_window = 10.0;
    int points_per_carrier = 200;
    double alpha_h = 100.0;  // field at which alpha is measured

    // heatmap
    double g_start = 0.0, g_step = 0.2;
    std::size_t g_count = 10;
    double d_start = 0.0, d_step = 0.1;
    std::size_t d_count = 10;

    // disorder
    std::vector<double> deltas{0.05, 0.1, 0.2};
    std::size_t n_samples = 200;

    // scaling
    std::vector<int> n_values{3, 4, 5};

    // freq-table
    std::vector<double> d_values{0.0, 0.1, 0.5, 1.0};
    double freq_t_end = 100.0;
    std::size_t freq_points = 20001;
    bool freq_control = true;  // also run the even-legs-only variant

    std::vector<double> resolved_h_values() const {
        if (!h_values.empty()) return h_values;
        if (experiment == Experiment::effective_check) return {100.0, 200.0, 400.0};
        return {50.0, 100.0, 200.0, 400.0};
    }
};

// ---------------------------------------------------------------------------
// Value formatting and parsing

// Shortest decimal that reads back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string_view text, const std::string& key, int line) {
    text = trim(text);
    T v{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty())
        throw ConfigError(key, line, "expected a number, got '" + std::string(text) + "'");
    if constexpr (std::is_floating_point_v<T>)
        if (!std::isfinite(v)) throw ConfigError(key, line, "value must be finite");
    return v;
}

template <class T>
std::vector<T> parse_list(std::string_view text, const std::string& key, int line) {
    std::vector<T> out;
    text = trim(text);
    if (text.empty()) throw ConfigError(key, line, "empty list");
    while (true) {
        const auto comma = text.find(',');
        out.push_back(parse_number<T>(text.substr(0, comma), key, line));
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return out;
}

template <class T>
std::string format_list(const std::vector<T>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s += ',';
        if constexpr (std::is_floating_point_v<T>)
            s += format_double(xs[i]);
        else
            s += std::to_string(xs[i]);
    }
    return s;
}

inline bool parse_bool(std::string_view text, const std::string& key, int line) {
    text = trim(text);
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError(key, line, "expected true or false, got '" + std::string(text) + "'");
}

struct KeySpec {
    std::string name;
    std::function<void(ExperimentConfig&, std::string_view, int)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

template <class T>
KeySpec number_key(std::string name, T ExperimentConfig::*member) {
    return {name,
            [name, member](ExperimentConfig& c, std::string_view v, int line) {
                c.*member = parse_number<T>(v, name, line);
            },
            [member](const ExperimentConfig& c) {
                if constexpr (std::is_floating_point_v<T>)
                    return format_double(c.*member);
                else
                    return std::to_string(c.*member);
            }};
}

template <class T>
KeySpec param_key(std::string name, T LadderParams::*member) {
    return {name,
            [name, member](ExperimentConfig& c, std::string_view v, int line) {
                c.params.*member = parse_number<T>(v, name, line);
            },
            [member](const ExperimentConfig& c) {
                if constexpr (std::is_floating_point_v<T>)
                    return format_double(c.params.*member);
                else
                    return std::to_string(c.params.*member);
            }};
}

template <class T>
KeySpec list_key(std::string name, std::vector<T> ExperimentConfig::*member) {
    return {name,
            [name, member](ExperimentConfig& c, std::string_view v, int line) {
                c.*member = parse_list<T>(v, name, line);
            },
            [member](const ExperimentConfig& c) { return format_list(c.*member); }};
}

inline KeySpec bool_key(std::string name, bool ExperimentConfig::*member) {
    return {name,
            [name, member](ExperimentConfig& c, std::string_view v, int line) {
                c.*member = parse_bool(v, name, line);
            },
            [member](const ExperimentConfig& c) { return std::string(c.*member ? "true" : "false"); }};
}

inline std::string_view field_mode_name(FieldMode m) {
    switch (m) {
        case FieldMode::selective: return "selective";
        case FieldMode::uniform: return "uniform";
        case FieldMode::custom: return "custom";
    }
    return "unknown";
}

inline std::string_view leg_mode_name(LegMode m) { return m == LegMode::both ? "both" : "even_sites_only"; }

inline const std::vector<KeySpec>& key_table() {
    using C = ExperimentConfig;
    using P = LadderParams;
    static const std::vector<KeySpec> table = [] {
        std::vector<KeySpec> t{
            param_key("n_rungs", &P::n_rungs),
            param_key("j_perp", &P::j_perp),
            param_key("j_parallel", &P::j_parallel),
            param_key("g", &P::g),
            param_key("d", &P::d),
            param_key("h", &P::h),
            {"field_mode",
             [](C& c, std::string_view v, int line) {
                 v = trim(v);
                 for (auto m : {FieldMode::selective, FieldMode::uniform, FieldMode::custom})
                     if (field_mode_name(m) == v) {
                         c.params.field_mode = m;
                         return;
                     }
                 throw ConfigError("field_mode", line, "expected selective, uniform or custom");
             },
             [](const C& c) { return std::string(field_mode_name(c.params.field_mode)); }},
            {"field_rungs",
             [](C& c, std::string_view v, int line) {
                 c.params.custom_field_rungs = parse_list<int>(v, "field_rungs", line);
             },
             [](const C& c) { return format_list(c.params.custom_field_rungs); }},
            {"legs",
             [](C& c, std::string_view v, int line) {
                 v = trim(v);
                 if (v == "both")
                     c.params.legs = LegMode::both;
                 else if (v == "even_sites_only")
                     c.params.legs = LegMode::even_sites_only;
                 else
                     throw ConfigError("legs", line, "expected both or even_sites_only");
             },
             [](const C& c) { return std::string(leg_mode_name(c.params.legs)); }},
            {"state",
             [](C& c, std::string_view v, int line) {
                 try {
                     c.state = parse_initial_state(trim(v));
                 } catch (const std::invalid_argument& e) {
                     throw ConfigError("state", line, e.what());
                 }
             },
             [](const C& c) { return std::string(to_string(c.state)); }},
            number_key("t_start", &C::t_start),
            number_key("t_end", &C::t_end),
            number_key("n_points", &C::n_points),
            number_key("seed", &C::seed),
            number_key("threads", &C::threads),
            number_key("mediating_cutoff", &C::mediating_cutoff),
            number_key("peak_prominence", &C::peak_prominence),
            number_key("envelope_smoothing", &C::envelope_smoothing),
            bool_key("mutual_info", &C::mutual_info),
            list_key("h_values", &C::h_values),
            number_key("window_factor", &C::window_factor),
            number_key("slow_prefactor", &C::slow_prefactor),
            number_key("min_window", &C::min_window),
            number_key("points_per_carrier", &C::points_per_carrier),
            number_key("alpha_h", &C::alpha_h),
            number_key("g_start", &C::g_start),
            number_key("g_step", &C::g_step),
            number_key("g_count", &C::g_count),
            number_key("d_start", &C::d_start),
            number_key("d_step", &C::d_step),
            number_key("d_count", &C::d_count),
            list_key("deltas", &C::deltas),
            number_key("n_samples", &C::n_samples),
            list_key("n_values", &C::n_values),
            list_key("d_values", &C::d_values),
            number_key("freq_t_end", &C::freq_t_end),
            number_key("freq_points", &C::freq_points),
            bool_key("freq_control", &C::freq_control),
        };
        return t;
    }();
    return table;
}

inline const KeySpec* find_key(std::string_view name) {
    for (const auto& k : key_table())
        if (k.name == name) return &k;
    return nullptr;
}

}  // namespace detail

inline std::vector<std::string> config_keys() {
    std::vector<std::string> names;
    for (const auto& k : detail::key_table()) names.push_back(k.name);
    return names;
}

// A key/value assignment and where it came from (line 0: command line).
struct ConfigEntry {
    std::string key;
    std::string value;
    int line = 0;
};

inline std::vector<ConfigEntry> parse_config_text(std::string_view text) {
    std::vector<ConfigEntry> out;
    int line_no = 0;
    std::istringstream in{std::string(text)};
    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError("", line_no, "expected 'key = value'");
        const std::string key(detail::trim(line.substr(0, eq)));
        if (key.empty()) throw ConfigError("", line_no, "missing key");
        out.push_back({key, std::string(detail::trim(line.substr(eq + 1))), line_no});
    }
    return out;
}

// Checks ranges. `line_of` gives the line that set a key (0 if defaulted or
// set by a flag).
inline void validate(const ExperimentConfig& c, const std::function<int(const std::string&)>& line_of) {
    auto fail = [&](const std::string& key, const std::string& what) { throw ConfigError(key, line_of(key), what); };
    const auto& p = c.params;
    if (p.n_rungs > kMaxRungs) fail("n_rungs", "at most " + std::to_string(kMaxRungs) + " rungs are supported");
    if (p.n_rungs < 2) fail("n_rungs", "at least 2 rungs are needed");
    if (p.field_mode == FieldMode::custom) {
        for (int r : p.custom_field_rungs)
            if (r < 1 || r > p.n_rungs) fail("field_rungs", "rung " + std::to_string(r) + " out of range");
    }
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        fail("field_rungs", e.what());
    }
    if (c.t_start < 0.0) fail("t_start", "must be >= 0");
    if (!(c.t_end > c.t_start)) fail("t_end", "must exceed t_start");
    if (c.n_points < 2) fail("n_points", "must be >= 2");
    if (!(c.mediating_cutoff > 0.0)) fail("mediating_cutoff", "must be positive");
    if (!(c.peak_prominence > 0.0)) fail("peak_prominence", "must be positive");
    if (c.envelope_smoothing < 1) fail("envelope_smoothing", "must be >= 1");
    for (double h : c.h_values)
        if (h < 0.0) fail("h_values", "fields must be >= 0");
    if (!(c.window_factor > 0.0)) fail("window_factor", "must be positive");
    if (!(c.slow_prefactor > 0.0)) fail("slow_prefactor", "must be positive");
    if (!(c.min_window > 0.0)) fail("min_window", "must be positive");
    if (c.points_per_carrier < 4) fail("points_per_carrier", "must be >= 4");
    if (!(c.alpha_h > 0.0)) fail("alpha_h", "must be positive");
    if (c.g_count < 1) fail("g_count", "must be >= 1");
    if (c.d_count < 1) fail("d_count", "must be >= 1");
    if (c.deltas.empty()) fail("deltas", "at least one value is needed");
    for (double d : c.deltas)
        if (d < 0.0) fail("deltas", "disorder strengths must be >= 0");
    if (c.n_samples < 1) fail("n_samples", "must be >= 1");
    for (int n : c.n_values) {
        if (n > kMaxRungs) fail("n_values", "at most " + std::to_string(kMaxRungs) + " rungs are supported");
        if (n < 3) fail("n_values", "the scaling study starts at 3 rungs");
    }
    if (c.d_values.empty()) fail("d_values", "at least one value is needed");
    if (!(c.freq_t_end > 0.0)) fail("freq_t_end", "must be positive");
    if (c.freq_points < 16) fail("freq_points", "must be >= 16");
    if (c.experiment == Experiment::effective_check)
        for (double h : c.resolved_h_values())
            if (!(h > 0.0)) fail("h_values", "the effective model needs h > 0");
}

// File entries first, then flag entries; later assignments win.
inline ExperimentConfig build_config(Experiment experiment, const std::vector<ConfigEntry>& file_entries,
                                     const std::vector<ConfigEntry>& flag_entries = {}) {
    ExperimentConfig c;
    c.experiment = experiment;
    std::map<std::string, int> lines;
    for (const auto* list : {&file_entries, &flag_entries}) {
        for (const auto& e : *list) {
            const auto* spec = detail::find_key(e.key);
            if (!spec) throw ConfigError(e.key, e.line, "unknown key");
            spec->set(c, e.value, e.line);
            lines[e.key] = e.line;
        }
    }
    validate(c, [&](const std::string& key) {
        const auto it = lines.find(key);
        return it == lines.end() ? 0 : it->second;
    });
    return c;
}

inline ExperimentConfig parse_config(Experiment experiment, std::string_view text,
                                     const std::vector<ConfigEntry>& flag_entries = {}) {
    return build_config(experiment, parse_config_text(text), flag_entries);
}

// Every key with a non-empty value, in table order. Feeding the result back
// through build_config reproduces the configuration exactly.
inline std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& c) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& k : detail::key_table())
        if (auto v = k.get(c); !v.empty()) out.emplace_back(k.name, std::move(v));
    return out;
}

inline std::string to_config_text(const ExperimentConfig& c) {
    std::string s = "# experiment: " + std::string(to_string(c.experiment)) + "\n";
    for (const auto& [k, v] : config_entries(c))
        s += k + " = " + v + "\n";
    return s;
}

}  // namespace ladder
