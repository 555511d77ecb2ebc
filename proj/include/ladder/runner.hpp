#pragma once

// Runs a configured experiment and writes its tables into a directory.

#include <filesystem>
#include <string>
#include <vector>

#include "ladder/config.hpp"
#include "ladder/experiments.hpp"
#include "ladder/output.hpp"

namespace ladder {

inline unsigned resolved_threads(const ExperimentConfig& c) { return c.threads ? c.threads : default_threads(); }

inline SweepOptions sweep_options(const ExperimentConfig& c) {
    SweepOptions o;
    o.state = c.state;
    o.window_factor = c.window_factor;
    o.slow_prefactor = c.slow_prefactor;
    o.min_window = c.min_window;
    o.points_per_carrier = c.points_per_carrier;
    o.envelope.carrier_prominence = c.peak_prominence;
    o.envelope.smoothing = c.envelope_smoothing;
    o.threads = resolved_threads(c);
    return o;
}

inline TimeGrid config_grid(const ExperimentConfig& c) { return TimeGrid(c.t_start, c.t_end, c.n_points); }

// Returns the paths written, main table first.
inline std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& c,
                                                         const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError(out_dir.string(), "cannot create output directory (" + ec.message() + ")");

    const json meta = sidecar_header(c);
    const unsigned threads = resolved_threads(c);
    std::vector<std::filesystem::path> written;
    auto main_table = [&](const std::string& name) {
        const auto p = out_dir / name;
        written.push_back(p);
        written.push_back(sidecar_path(p));
        return p;
    };

    switch (c.experiment) {
        case Experiment::reference: {
            TrajectoryOptions topt;
            topt.state = c.state;
            topt.mutual_info = c.mutual_info;
            const auto traj = run_reference(c.params, config_grid(c), topt);
            auto summary = summarize(traj);
            const auto term = traj.series(traj.terminal().values);
            try {
                summary.omega_fast = fast_frequency_from_spectrum(dominant_frequency(term));
            } catch (const InsufficientData&) {
            }
            try {
                EnvelopeOptions eo;
                eo.carrier_prominence = c.peak_prominence;
                eo.smoothing = c.envelope_smoothing;
                summary.t_slow = envelope_period(term, eo);
            } catch (const InsufficientData&) {
            }
            json side = meta;
            const double med = max_mediating_concurrence(traj);
            side["max_mediating_concurrence"] = med;
            side["mediating_below_cutoff"] = med <= c.mediating_cutoff;
            write_trajectory(traj, summary, main_table("reference.csv"), side);
            break;
        }
        case Experiment::field_sweep: {
            const auto sweep = sweep_field(c.resolved_h_values(), c.params, sweep_options(c));
            write_sweep(sweep, main_table("field_sweep.csv"), meta);
            break;
        }
        case Experiment::heatmap: {
            const auto grid = anisotropy_heatmap(axis_values(c.g_start, c.g_step, c.g_count),
                                                 axis_values(c.d_start, c.d_step, c.d_count), c.params,
                                                 config_grid(c), c.state, threads);
            write_heatmap(grid, main_table("heatmap.csv"), meta);
            break;
        }
        case Experiment::disorder: {
            std::vector<EnsembleStats> runs;
            for (double delta : c.deltas)
                runs.push_back(disorder_ensemble(delta, c.n_samples, c.seed, c.params, config_grid(c), c.state,
                                                 threads));
            write_ensemble(runs, out_dir, "disorder", meta);
            written = {out_dir / "disorder_curves.csv", out_dir / "disorder_realizations.csv",
                       out_dir / "disorder.json"};
            break;
        }
        case Experiment::scaling: {
            std::vector<ScalingRow> rows;
            std::vector<std::filesystem::path> per_n;
            for (int n : c.n_values) {
                const auto traj = scaling_run(n, c.params, config_grid(c), c.state);
                rows.push_back(scaling_summary(n, traj, c.peak_prominence));
                const auto p = out_dir / ("scaling_N" + std::to_string(n) + ".csv");
                json side = meta;
                side["n_rungs"] = n;
                side["max_mediating_concurrence"] = rows.back().max_mediating;
                write_trajectory(traj, summarize(traj), p, side);
                per_n.push_back(p);
                per_n.push_back(sidecar_path(p));
            }
            write_scaling(rows, main_table("scaling.csv"), meta);
            written.insert(written.end(), per_n.begin(), per_n.end());
            break;
        }
        case Experiment::freq_table: {
            FrequencyOptions fo;
            fo.state = c.state;
            fo.t_end = c.freq_t_end;
            fo.n_points = c.freq_points;
            fo.threads = threads;
            const auto rows = frequency_table(c.d_values, c.params, fo);
            std::vector<FrequencyRow> control;
            if (c.freq_control) {
                LadderParams even = c.params;
                even.legs = LegMode::even_sites_only;
                control = frequency_table(c.d_values, even, fo);
            }
            write_frequency_table(rows, control, main_table("freq_table.csv"), meta);
            break;
        }
        case Experiment::effective_check: {
            const auto opt = sweep_options(c);
            LadderParams at = c.params;
            at.h = c.alpha_h;
            const auto alpha = measure_alpha(at, opt);
            const auto hs = c.resolved_h_values();
            std::vector<EffectiveCheck> checks(hs.size());
            SweepOptions inner = opt;
            inner.threads = 1;
            parallel_for(hs.size(), threads, [&](std::size_t i) {
                LadderParams p = c.params;
                p.h = hs[i];
                checks[i] = effective_model_check(p, alpha.alpha, inner);
            });
            write_effective_checks(alpha, checks, main_table("effective_check.csv"), meta);
            break;
        }
    }
    return written;
}

}  // namespace ladder
