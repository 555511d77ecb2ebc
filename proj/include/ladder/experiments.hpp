#pragma once

// The studies run on the ladder: reference trajectory, field sweep,
// anisotropy heatmap, disorder ensemble, scaling in N, frequency table and
// the effective-model comparison. Every study is deterministic for a given
// configuration; parallel work is aggregated by index.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ladder/core.hpp"
#include "ladder/effective.hpp"
#include "ladder/errors.hpp"
#include "ladder/metrics.hpp"
#include "ladder/parallel.hpp"
#include "ladder/propagator.hpp"
#include "ladder/random.hpp"
#include "ladder/signal.hpp"

namespace ladder {

inline constexpr double kMediatingCutoff = 0.1;

// "12", "34", ..., "9_10": site indices are joined directly while both are
// single digits.
inline std::string pair_label(int a, int b) {
    const std::string sa = std::to_string(a), sb = std::to_string(b);
    return (a < 10 && b < 10) ? sa + sb : sa + "_" + sb;
}
inline std::string rung_label(int rung) { return pair_label(rung_top_site(rung), rung_bottom_site(rung)); }

struct Channel {
    std::string label;
    std::vector<double> values;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Channel> concurrence;  // rung order; the last entry is the terminal pair
    std::vector<double> fidelity;      // terminal pair against Phi+
    std::vector<Channel> mutual_info;  // empty unless requested

    const Channel& terminal() const { return concurrence.back(); }

    const Channel& channel(const std::string& label) const {
        for (const auto* list : {&concurrence, &mutual_info})
            for (const auto& c : *list)
                if (c.label == label) return c;
        throw std::out_of_range("no channel '" + label + "'");
    }

    TimeSeries series(const std::vector<double>& values) const { return TimeSeries(times, values); }
    TimeSeries series(const std::string& label) const { return series(channel(label).values); }
};

struct TrajectoryOptions {
    InitialState state = InitialState::phi_plus;
    bool mutual_info = false;
    bool terminal_only = false;  // skip the non-terminal concurrence channels
};

inline Trajectory simulate(const LadderParams& p, const CouplingProfile& couplings, const TimeGrid& grid,
                           const TrajectoryOptions& opt = {}) {
    p.validate();
    if (p.n_rungs < 2) throw std::invalid_argument("a transfer run needs at least two rungs");
    const int n = p.n_sites();
    const auto decomp = diagonalize(build_hamiltonian(p, couplings));

    std::vector<int> rungs;
    for (int r = opt.terminal_only ? p.n_rungs : 1; r <= p.n_rungs; ++r) rungs.push_back(r);
    std::vector<PartialTrace> pair_traces;
    Trajectory traj;
    traj.times = grid.times();
    for (int r : rungs) {
        pair_traces.emplace_back(n, std::vector<int>{rung_top_site(r), rung_bottom_site(r)});
        traj.concurrence.push_back({rung_label(r), std::vector<double>(grid.size())});
    }
    traj.fidelity.resize(grid.size());

    // Mutual information I(1:2), I(a:b) for the terminal pair and I(12:ab).
    const int ta = rung_top_site(p.n_rungs), tb = rung_bottom_site(p.n_rungs);
    std::vector<PartialTrace> mi_traces;
    if (opt.mutual_info) {
        for (auto keep : std::vector<std::vector<int>>{{1}, {2}, {ta}, {tb}, {1, 2}, {ta, tb}, {1, 2, ta, tb}})
            mi_traces.emplace_back(n, keep);
        const std::string term = rung_label(p.n_rungs);
        for (const auto& label : {std::string("I12"), "I" + term, "I12_" + term})
            traj.mutual_info.push_back({label, std::vector<double>(grid.size())});
    }

    for_each_state(decomp, build_initial_state(opt.state, n), grid, [&](std::size_t k, const Vector& psi) {
        for (std::size_t i = 0; i < pair_traces.size(); ++i) {
            const DensityMatrix rho = pair_traces[i](psi);
            traj.concurrence[i].values[k] = concurrence(rho);
            if (i + 1 == pair_traces.size()) traj.fidelity[k] = bell_fidelity(rho);
        }
        if (opt.mutual_info) {
            double e[7];
            for (std::size_t i = 0; i < 7; ++i) e[i] = von_neumann_entropy(mi_traces[i](psi));
            traj.mutual_info[0].values[k] = e[0] + e[1] - e[4];
            traj.mutual_info[1].values[k] = e[2] + e[3] - e[5];
            traj.mutual_info[2].values[k] = e[4] + e[5] - e[6];
        }
    });
    return traj;
}

inline Trajectory run_reference(const LadderParams& p, const TimeGrid& grid, const TrajectoryOptions& opt = {}) {
    return simulate(p, CouplingProfile::uniform(p), grid, opt);
}

struct PairMaximum {
    std::string label;
    double value;
};

struct TrajectorySummary {
    double f_max = 0.0;
    double t_at_f_max = 0.0;
    double f_min = 0.0;
    std::vector<PairMaximum> max_concurrence;
    std::optional<double> omega_fast;
    std::optional<double> t_slow;
};

inline TrajectorySummary summarize(const Trajectory& traj) {
    if (traj.fidelity.empty()) throw std::invalid_argument("empty trajectory");
    TrajectorySummary s;
    const auto top = std::max_element(traj.fidelity.begin(), traj.fidelity.end());
    s.f_max = *top;
    s.t_at_f_max = traj.times[static_cast<std::size_t>(top - traj.fidelity.begin())];
    s.f_min = *std::min_element(traj.fidelity.begin(), traj.fidelity.end());
    for (const auto& c : traj.concurrence)
        s.max_concurrence.push_back({c.label, *std::max_element(c.values.begin(), c.values.end())});
    return s;
}

// Largest concurrence over the mediating rungs 2..N-1 (0 when there are none).
inline double max_mediating_concurrence(const Trajectory& traj) {
    double m = 0.0;
    for (std::size_t i = 1; i + 1 < traj.concurrence.size(); ++i)
        m = std::max(m, *std::max_element(traj.concurrence[i].values.begin(), traj.concurrence[i].values.end()));
    return m;
}

inline std::optional<Peak> first_peak(const TimeSeries& series, double min_prominence) {
    const auto peaks = find_peaks(series, min_prominence);
    if (peaks.empty()) return std::nullopt;
    return peaks.front();
}

// ---------------------------------------------------------------------------
// Field sweep

struct SweepOptions {
    InitialState state = InitialState::phi_plus;
    // Window t in [0, max(min_window, window_factor * slow_prefactor * h / J^2)].
    double window_factor = 1.2;
    double slow_prefactor = 2.37;
    double min_window = 10.0;
    int points_per_carrier = 200;
    EnvelopeOptions envelope;
    unsigned threads = default_threads();
};

inline TimeGrid sweep_grid(const LadderParams& p, const SweepOptions& opt) {
    if (opt.points_per_carrier < 4) throw std::invalid_argument("points_per_carrier must be >= 4");
    const double j2 = p.j_parallel * p.j_parallel;
    const double slow = j2 > 0.0 ? opt.slow_prefactor * std::abs(p.h) / j2 : 0.0;
    const double window = std::max(opt.min_window, opt.window_factor * slow);
    return TimeGrid::with_max_step(0.0, window, carrier_period(p) / opt.points_per_carrier);
}

struct SweepRow {
    double h = 0.0;
    std::optional<double> t_slow;
    double f_max = 0.0;
    double t_at_f_max = 0.0;
    double max_terminal = 0.0;
    double t_end = 0.0;
    std::size_t n_points = 0;
    std::string note;  // why t_slow is missing, empty otherwise
};

struct FieldSweep {
    std::vector<SweepRow> rows;
    std::optional<FitResult> fit;  // log T_slow vs log h over rows with h > 0 and a T_slow
};

inline SweepRow sweep_point(const LadderParams& p, const SweepOptions& opt) {
    const auto grid = sweep_grid(p, opt);
    TrajectoryOptions topt;
    topt.state = opt.state;
    topt.terminal_only = true;
    const auto traj = run_reference(p, grid, topt);
    const auto s = summarize(traj);
    SweepRow row;
    row.h = p.h;
    row.f_max = s.f_max;
    row.t_at_f_max = s.t_at_f_max;
    row.max_terminal = s.max_concurrence.back().value;
    row.t_end = grid.t_end();
    row.n_points = grid.size();
    try {
        row.t_slow = envelope_period(traj.series(traj.terminal().values), opt.envelope);
    } catch (const InsufficientData& e) {
        row.note = e.what();
    }
    return row;
}

inline FieldSweep sweep_field(const std::vector<double>& h_values, const LadderParams& base,
                              const SweepOptions& opt = {}) {
    if (h_values.empty()) throw std::invalid_argument("field sweep needs at least one h value");
    base.validate();
    FieldSweep out;
    out.rows.resize(h_values.size());
    parallel_for(h_values.size(), opt.threads, [&](std::size_t i) {
        LadderParams p = base;
        p.h = h_values[i];
        out.rows[i] = sweep_point(p, opt);
    });
    std::vector<double> xs, ys;
    for (const auto& r : out.rows)
        if (r.h > 0.0 && r.t_slow) {
            xs.push_back(r.h);
            ys.push_back(*r.t_slow);
        }
    if (xs.size() >= 3) out.fit = loglog_fit(xs, ys);
    return out;
}

// ---------------------------------------------------------------------------
// Anisotropy heatmap

// Evenly spaced axis start, start + step, ..., start + (count-1) step.
inline std::vector<double> axis_values(double start, double step, std::size_t count) {
    if (count == 0) throw std::invalid_argument("axis needs at least one value");
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i) v[i] = start + static_cast<double>(i) * step;
    return v;
}

struct HeatmapGrid {
    std::vector<double> g_values;
    std::vector<double> d_values;
    std::vector<std::vector<double>> f_max;  // f_max[i][j] at (g_i, d_j)
};

inline HeatmapGrid anisotropy_heatmap(const std::vector<double>& g_values, const std::vector<double>& d_values,
                                      const LadderParams& base, const TimeGrid& grid,
                                      InitialState state = InitialState::phi_plus,
                                      unsigned threads = default_threads()) {
    if (g_values.empty() || d_values.empty()) throw std::invalid_argument("heatmap axes must be non-empty");
    base.validate();
    HeatmapGrid out{g_values, d_values, std::vector<std::vector<double>>(g_values.size(),
                                                                       std::vector<double>(d_values.size()))};
    TrajectoryOptions topt;
    topt.state = state;
    topt.terminal_only = true;
    const std::size_t nd = d_values.size();
    parallel_for(g_values.size() * nd, threads, [&](std::size_t cell) {
        LadderParams p = base;
        p.g = g_values[cell / nd];
        p.d = d_values[cell % nd];
        out.f_max[cell / nd][cell % nd] = summarize(run_reference(p, grid, topt)).f_max;
    });
    return out;
}

// ---------------------------------------------------------------------------
// Disorder ensemble

struct DisorderRealization {
    std::uint64_t seed = 0;
    std::vector<double> rung_deltas;  // N
    std::vector<double> leg_deltas;   // 2(N-1), ordered as CouplingProfile::leg

    // Rung deltas are drawn first, then leg deltas, each uniform on [-delta, delta].
    static DisorderRealization draw(double delta, std::uint64_t seed, int n_rungs) {
        if (!(delta >= 0.0)) throw std::invalid_argument("disorder strength must be >= 0");
        DisorderRealization r;
        r.seed = seed;
        UniformSource rng(seed);
        r.rung_deltas.resize(static_cast<std::size_t>(n_rungs));
        r.leg_deltas.resize(static_cast<std::size_t>(2 * std::max(n_rungs - 1, 0)));
        for (double& x : r.rung_deltas) x = rng.uniform(-delta, delta);
        for (double& x : r.leg_deltas) x = rng.uniform(-delta, delta);
        return r;
    }

    // J -> J (1 + delta_k) on every bond.
    CouplingProfile apply(const LadderParams& p) const {
        CouplingProfile c = CouplingProfile::uniform(p);
        if (c.rung.size() != rung_deltas.size() || c.leg.size() != leg_deltas.size())
            throw std::invalid_argument("disorder realization does not match the ladder size");
        for (std::size_t i = 0; i < c.rung.size(); ++i) c.rung[i] *= 1.0 + rung_deltas[i];
        for (std::size_t i = 0; i < c.leg.size(); ++i) c.leg[i] *= 1.0 + leg_deltas[i];
        return c;
    }
};

struct EnsembleStats {
    double delta = 0.0;
    std::size_t n_samples = 0;
    std::uint64_t base_seed = 0;
    std::vector<double> times;
    std::vector<double> mean_fidelity;
    std::vector<double> std_fidelity;
    std::vector<std::uint64_t> seeds;
    std::vector<double> peak_fidelity;  // per realization
    double mean_peak_fidelity = 0.0;
    double std_peak_fidelity = 0.0;
};

namespace detail {

// Mean and population standard deviation, shifted by the first sample so
// identical samples give exactly that value and exactly zero spread.
inline std::pair<double, double> mean_std(const std::vector<double>& xs) {
    const double x0 = xs.front();
    double s = 0.0, s2 = 0.0;
    for (double x : xs) {
        s += x - x0;
        s2 += (x - x0) * (x - x0);
    }
    const auto n = static_cast<double>(xs.size());
    const double shift = s / n;
    return {x0 + shift, std::sqrt(std::max(0.0, s2 / n - shift * shift))};
}

}  // namespace detail

inline EnsembleStats disorder_ensemble(double delta, std::size_t n_samples, std::uint64_t base_seed,
                                       const LadderParams& base, const TimeGrid& grid,
                                       InitialState state = InitialState::phi_plus,
                                       unsigned threads = default_threads()) {
    if (!(delta >= 0.0)) throw std::invalid_argument("disorder strength must be >= 0");
    if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
    base.validate();

    std::vector<std::vector<double>> curves(n_samples);
    EnsembleStats out;
    out.delta = delta;
    out.n_samples = n_samples;
    out.base_seed = base_seed;
    out.times = grid.times();
    out.seeds.resize(n_samples);
    out.peak_fidelity.resize(n_samples);

    TrajectoryOptions topt;
    topt.state = state;
    topt.terminal_only = true;
    parallel_for(n_samples, threads, [&](std::size_t k) {
        const auto seed = child_seed(base_seed, k);
        const auto real = DisorderRealization::draw(delta, seed, base.n_rungs);
        auto traj = simulate(base, real.apply(base), grid, topt);
        out.seeds[k] = seed;
        out.peak_fidelity[k] = *std::max_element(traj.fidelity.begin(), traj.fidelity.end());
        curves[k] = std::move(traj.fidelity);
    });

    out.mean_fidelity.resize(grid.size());
    out.std_fidelity.resize(grid.size());
    std::vector<double> column(n_samples);
    for (std::size_t t = 0; t < grid.size(); ++t) {
        for (std::size_t k = 0; k < n_samples; ++k) column[k] = curves[k][t];
        std::tie(out.mean_fidelity[t], out.std_fidelity[t]) = detail::mean_std(column);
    }
    std::tie(out.mean_peak_fidelity, out.std_peak_fidelity) = detail::mean_std(out.peak_fidelity);
    return out;
}

// ---------------------------------------------------------------------------
// Scaling with the number of rungs

inline Trajectory scaling_run(int n_rungs, const LadderParams& base, const TimeGrid& grid,
                              InitialState state = InitialState::phi_plus) {
    if (n_rungs > kMaxRungs)
        throw UnsupportedSize("n_rungs = " + std::to_string(n_rungs) + " exceeds the dense limit of " +
                              std::to_string(kMaxRungs));
    if (n_rungs < 3) throw std::invalid_argument("the scaling study starts at 3 rungs");
    LadderParams p = base;
    p.n_rungs = n_rungs;
    TrajectoryOptions topt;
    topt.state = state;
    return run_reference(p, grid, topt);
}

struct ScalingRow {
    int n_rungs = 0;
    std::optional<double> first_peak_time;  // terminal pair
    double max_terminal = 0.0;
    double max_mediating = 0.0;
};

inline ScalingRow scaling_summary(int n_rungs, const Trajectory& traj, double carrier_prominence = 0.05) {
    ScalingRow row;
    row.n_rungs = n_rungs;
    const auto& term = traj.terminal().values;
    row.max_terminal = *std::max_element(term.begin(), term.end());
    row.max_mediating = max_mediating_concurrence(traj);
    if (auto pk = first_peak(traj.series(term), carrier_prominence)) row.first_peak_time = pk->time;
    return row;
}

// ---------------------------------------------------------------------------
// Fast-frequency table

struct FrequencyOptions {
    InitialState state = InitialState::phi_plus;
    double t_end = 100.0;
    std::size_t n_points = 20001;
    unsigned threads = default_threads();
};

struct FrequencyRow {
    double d = 0.0;
    double predicted = 0.0;  // 2 sqrt(1 + 4 d^2) J_perp
    std::optional<double> measured;
    std::optional<double> ratio;
    std::string note;  // why measured is missing, empty otherwise
};

inline std::vector<FrequencyRow> frequency_table(const std::vector<double>& d_values, const LadderParams& base,
                                                 const FrequencyOptions& opt = {}) {
    base.validate();
    const TimeGrid grid(0.0, opt.t_end, opt.n_points);
    TrajectoryOptions topt;
    topt.state = opt.state;
    topt.terminal_only = true;
    std::vector<FrequencyRow> rows(d_values.size());
    parallel_for(d_values.size(), opt.threads, [&](std::size_t i) {
        LadderParams p = base;
        p.d = d_values[i];
        const auto traj = run_reference(p, grid, topt);
        FrequencyRow& r = rows[i];
        r.d = p.d;
        r.predicted = dressed_rung_frequency(p);
        try {
            r.measured = fast_frequency_from_spectrum(dominant_frequency(traj.series(traj.terminal().values)));
            r.ratio = *r.measured / r.predicted;
        } catch (const InsufficientData& e) {
            r.note = e.what();
        }
    });
    return rows;
}

// ---------------------------------------------------------------------------
// Effective-model comparison

struct AlphaMeasurement {
    double h = 0.0;
    double t_slow = 0.0;  // full ladder
    double kappa = 0.0;   // T_slow J_eff of the effective model
    double alpha = 0.0;
};

// alpha from the full-ladder envelope period at base.h.
inline AlphaMeasurement measure_alpha(const LadderParams& base, const SweepOptions& opt = {}) {
    if (!(base.h > 0.0)) throw std::invalid_argument("alpha is measured at h > 0");
    const auto row = sweep_point(base, opt);
    if (!row.t_slow) throw InsufficientData("alpha: " + row.note);
    EffectiveModelOptions eopt;
    eopt.state = opt.state;
    eopt.points_per_carrier = opt.points_per_carrier;
    eopt.envelope = opt.envelope;
    AlphaMeasurement m;
    m.h = base.h;
    m.t_slow = *row.t_slow;
    m.kappa = effective_period_constant(base, eopt);
    m.alpha = extract_alpha(m.t_slow, base, m.kappa);
    return m;
}

struct EffectiveCheck {
    double h = 0.0;
    double alpha = 0.0;
    double j_eff = 0.0;
    double t_slow_full = 0.0;
    double t_slow_effective = 0.0;
    double relative_error = 0.0;
};

// Envelope period of the full ladder at base.h against the four-spin model
// with J_eff = alpha J^2 / h.
inline EffectiveCheck effective_model_check(const LadderParams& base, double alpha, const SweepOptions& opt = {}) {
    if (!(base.h > 0.0)) throw std::invalid_argument("the effective model needs h > 0");
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    const auto row = sweep_point(base, opt);
    if (!row.t_slow) throw InsufficientData("full model: " + row.note);
    EffectiveModelOptions eopt;
    eopt.state = opt.state;
    eopt.points_per_carrier = opt.points_per_carrier;
    eopt.envelope = opt.envelope;
    EffectiveCheck c;
    c.h = base.h;
    c.alpha = alpha;
    c.j_eff = alpha * base.j_parallel * base.j_parallel / base.h;
    c.t_slow_full = *row.t_slow;
    c.t_slow_effective = effective_model_period(base, c.j_eff, eopt);
    c.relative_error = std::abs(c.t_slow_effective - c.t_slow_full) / c.t_slow_full;
    return c;
}

}  // namespace ladder
