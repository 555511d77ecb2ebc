#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "ladder/experiments.hpp"

using namespace ladder;

namespace {

const TimeGrid kShort(0.0, 10.0, 4001);

const Trajectory& reference_run() {
    static const Trajectory traj = [] {
        TrajectoryOptions o;
        o.mutual_info = true;
        return run_reference(LadderParams::reference(), kShort, o);
    }();
    return traj;
}

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }
double min_of(const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); }

}  // namespace

TEST(Labels, PairLabels) {
    EXPECT_EQ(rung_label(1), "12");
    EXPECT_EQ(rung_label(3), "56");
    EXPECT_EQ(rung_label(5), "9_10");
}

TEST(RunReference, FidelityAndMediatingPair) {
    const auto& traj = reference_run();
    const auto s = summarize(traj);
    EXPECT_GE(s.f_max, 0.999);
    EXPECT_LE(max_of(traj.channel("34").values), kMediatingCutoff);
    std::cout << "F_max " << s.f_max << " at t = " << s.t_at_f_max << ", max C34 " << max_of(traj.channel("34").values)
              << "\n";
}

TEST(RunReference, TrajectoryInvariants) {
    const auto& traj = reference_run();
    ASSERT_EQ(traj.concurrence.size(), 3u);
    EXPECT_EQ(traj.concurrence[0].label, "12");
    EXPECT_EQ(traj.terminal().label, "56");
    for (const auto& c : traj.concurrence) {
        ASSERT_EQ(c.values.size(), traj.times.size());
        EXPECT_GE(min_of(c.values), 0.0);
        EXPECT_LE(max_of(c.values), 1.0 + 1e-9);
    }
    ASSERT_EQ(traj.fidelity.size(), traj.times.size());
    EXPECT_GE(min_of(traj.fidelity), 0.0);
    EXPECT_LE(max_of(traj.fidelity), 1.0 + 1e-9);
    ASSERT_EQ(traj.mutual_info.size(), 3u);
    EXPECT_EQ(traj.mutual_info[0].label, "I12");
    EXPECT_EQ(traj.mutual_info[1].label, "I56");
    EXPECT_EQ(traj.mutual_info[2].label, "I12_56");
    for (const auto& c : traj.mutual_info) EXPECT_GE(min_of(c.values), -1e-9);
    // The initial state is the rung-1 Bell pair.
    EXPECT_NEAR(traj.channel("12").values[0], 1.0, 1e-12);
    EXPECT_NEAR(traj.terminal().values[0], 0.0, 1e-12);
    EXPECT_NEAR(traj.fidelity[0], 0.5, 1e-12);
}

TEST(RunReference, Antiphase) {
    const auto& traj = reference_run();
    const auto& c12 = traj.channel("12").values;
    const auto& c56 = traj.channel("56").values;
    int checked = 0;
    for (const auto& [peaks_of, other] : {std::pair{&c56, &c12}, std::pair{&c12, &c56}}) {
        for (const auto& pk : find_peaks(traj.series(*peaks_of), 0.05)) {
            if (pk.value <= 0.9) continue;
            EXPECT_LE((*other)[pk.index], 0.1) << "t = " << pk.time;
            ++checked;
        }
    }
    EXPECT_GE(checked, 6);
}

TEST(RunReference, ConcurrenceBoundsFidelity) {
    const auto& traj = reference_run();
    for (std::size_t k = 0; k < traj.times.size(); ++k)
        EXPECT_GE(traj.terminal().values[k], 2 * traj.fidelity[k] - 1 - 1e-9) << traj.times[k];
}

TEST(RunReference, MutualInformationAtTerminalPeak) {
    const auto& traj = reference_run();
    const auto& c56 = traj.channel("56").values;
    const auto k = static_cast<std::size_t>(std::max_element(c56.begin(), c56.end()) - c56.begin());
    const double i56 = traj.channel("I56").values[k];
    EXPECT_NEAR(i56 / 2, c56[k], 0.01 * c56[k]);
}

TEST(RunReference, FrozenDynamicsWithoutXYAnisotropy) {
    auto p = LadderParams::reference();
    p.g = 0.0;
    const auto traj = run_reference(p, kShort);
    const auto& c12 = traj.channel("12").values;
    const double dev = 1.0 - min_of(c12);
    std::cout << "g = 0: 1 - min C12 = " << dev << "\n";
    EXPECT_LE(dev, 1e-6);
}

TEST(RunReference, InitialStateVariantsKeepMediatingPairQuiet) {
    for (auto state : {InitialState::psi_plus, InitialState::psi_minus_plus_phi_plus}) {
        TrajectoryOptions o;
        o.state = state;
        const auto traj = run_reference(LadderParams::reference(), kShort, o);
        EXPECT_LE(max_of(traj.channel("34").values), kMediatingCutoff) << to_string(state);
    }
}

TEST(RunReference, SeparableInputIsMirrorSymmetricWithoutField) {
    auto p = LadderParams::reference();
    p.h = 0.0;
    TrajectoryOptions o;
    o.state = InitialState::separable_00;
    const auto traj = run_reference(p, kShort, o);
    const auto& c12 = traj.channel("12").values;
    const auto& c56 = traj.channel("56").values;
    for (std::size_t k = 0; k < c12.size(); ++k) EXPECT_NEAR(c12[k], c56[k], 1e-6);
}

TEST(RunReference, Deterministic) {
    const auto a = run_reference(LadderParams::reference(), TimeGrid(0, 5, 501));
    const auto b = run_reference(LadderParams::reference(), TimeGrid(0, 5, 501));
    EXPECT_EQ(a.fidelity, b.fidelity);
    EXPECT_EQ(a.terminal().values, b.terminal().values);
}

TEST(FieldSweep, GridCoversSlowPeriod) {
    SweepOptions o;
    auto p = LadderParams::reference();
    const auto g = sweep_grid(p, o);
    EXPECT_GE(g.t_end(), 1.2 * 2.37 * p.h - 1e-9);
    EXPECT_LE(g.step(), carrier_period(p) / 200 + 1e-15);
    p.h = 0.0;
    EXPECT_DOUBLE_EQ(sweep_grid(p, o).t_end(), 10.0);
}

TEST(FieldSweep, SlopeAndWeakField) {
    const auto sweep = sweep_field({10, 50, 100, 200, 400}, LadderParams::reference());
    ASSERT_EQ(sweep.rows.size(), 5u);
    for (const auto& r : sweep.rows) {
        ASSERT_TRUE(r.t_slow.has_value()) << r.h << ": " << r.note;
        std::cout << "h " << r.h << "  T_slow " << *r.t_slow << "  T_slow/h " << *r.t_slow / r.h << "  F_max "
                  << r.f_max << "\n";
    }
    const auto fit = loglog_fit(std::vector<double>{50, 100, 200, 400},
                                std::vector<double>{*sweep.rows[1].t_slow, *sweep.rows[2].t_slow,
                                                    *sweep.rows[3].t_slow, *sweep.rows[4].t_slow});
    EXPECT_NEAR(fit.slope, 1.10, 0.15);
    EXPECT_LT(sweep.rows[0].f_max, sweep.rows[2].f_max);
}

TEST(FieldSweep, UniformFieldSuppressesTransfer) {
    auto p = LadderParams::reference();
    p.field_mode = FieldMode::uniform;
    const auto row = sweep_point(p, SweepOptions{});
    std::cout << "uniform field: max C56 " << row.max_terminal << "\n";
    EXPECT_LE(row.max_terminal, 0.85);
}

TEST(FieldSweep, ZeroFieldRowIsReportedNotFatal) {
    const auto sweep = sweep_field({0.0, 10.0, 20.0, 40.0}, LadderParams::reference());
    EXPECT_EQ(sweep.rows.size(), 4u);
    // The zero-field row is excluded from the power-law fit.
    ASSERT_TRUE(sweep.fit.has_value());
}

TEST(Heatmap, Structure) {
    const auto grid = anisotropy_heatmap({0.0, 1.0}, {0.0, 0.5}, LadderParams::reference(), kShort);
    ASSERT_EQ(grid.f_max.size(), 2u);
    EXPECT_GE(grid.f_max[1][1], 0.999);
    EXPECT_LE(grid.f_max[0][0], 0.55);
    EXPECT_LE(grid.f_max[0][1], 0.55);
    for (const auto& row : grid.f_max)
        for (double f : row) {
            EXPECT_GE(f, 0.0);
            EXPECT_LE(f, 1.0);
        }
}

TEST(Heatmap, NoXYAnisotropyIsFlatWithOrWithoutIsing) {
    auto p = LadderParams::reference();
    p.g = 0.0;
    for (double d : {0.0, 0.5}) {
        p.d = d;
        const auto traj = run_reference(p, kShort);
        EXPECT_LE(max_of(traj.channel("56").values), 0.01) << d;
        EXPECT_LE(max_of(traj.channel("34").values), 0.01) << d;
        EXPECT_GE(min_of(traj.channel("12").values), 0.99) << d;
    }
}

TEST(Heatmap, ScheduleIndependent) {
    const auto g = axis_values(0.6, 0.4, 3), d = axis_values(0.1, 0.2, 3);
    const TimeGrid grid(0, 4, 801);
    const auto serial = anisotropy_heatmap(g, d, LadderParams::reference(), grid, InitialState::phi_plus, 1);
    const auto parallel = anisotropy_heatmap(g, d, LadderParams::reference(), grid, InitialState::phi_plus, 4);
    EXPECT_EQ(serial.f_max, parallel.f_max);
}

TEST(Heatmap, Axis) {
    const auto a = axis_values(0.0, 0.1, 30);
    EXPECT_EQ(a.size(), 30u);
    EXPECT_DOUBLE_EQ(a.back(), 2.9);
    EXPECT_THROW(axis_values(0, 1, 0), std::invalid_argument);
}

TEST(Disorder, RealizationDraws) {
    std::set<std::uint64_t> seeds;
    for (std::uint64_t k = 0; k < 1000; ++k) seeds.insert(child_seed(42, k));
    EXPECT_EQ(seeds.size(), 1000u);
    EXPECT_NE(child_seed(42, 0), child_seed(43, 0));

    const auto r = DisorderRealization::draw(0.2, child_seed(42, 7), 3);
    EXPECT_EQ(r.rung_deltas.size(), 3u);
    EXPECT_EQ(r.leg_deltas.size(), 4u);
    for (double x : r.rung_deltas) EXPECT_LE(std::abs(x), 0.2);
    for (double x : r.leg_deltas) EXPECT_LE(std::abs(x), 0.2);
    const auto again = DisorderRealization::draw(0.2, child_seed(42, 7), 3);
    EXPECT_EQ(r.rung_deltas, again.rung_deltas);
    EXPECT_EQ(r.leg_deltas, again.leg_deltas);

    const auto c = r.apply(LadderParams::reference());
    EXPECT_DOUBLE_EQ(c.rung[1], 1.0 + r.rung_deltas[1]);
    EXPECT_DOUBLE_EQ(c.leg[3], 1.0 + r.leg_deltas[3]);
    EXPECT_THROW(DisorderRealization::draw(-0.1, 1, 3), std::invalid_argument);
}

TEST(Disorder, UniformSourceIsUniform) {
    UniformSource u(123);
    double sum = 0, lo = 1, hi = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = u.unit();
        sum += x;
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    EXPECT_NEAR(sum / n, 0.5, 0.005);
    EXPECT_GE(lo, 0.0);
    EXPECT_LT(hi, 1.0);
}

TEST(Disorder, ZeroDisorderReproducesCleanRun) {
    const auto p = LadderParams::reference();
    const auto e = disorder_ensemble(0.0, 7, 42, p, kShort);
    const auto clean = summarize(run_reference(p, kShort));
    EXPECT_EQ(e.mean_peak_fidelity, clean.f_max);
    EXPECT_EQ(e.std_peak_fidelity, 0.0);
    for (double s : e.std_fidelity) EXPECT_EQ(s, 0.0);
}

TEST(Disorder, WeakDisorderBand) {
    const auto e = disorder_ensemble(0.05, 200, 42, LadderParams::reference(), kShort);
    std::cout << "delta 0.05: <F_max> " << e.mean_peak_fidelity << " +- " << e.std_peak_fidelity << "\n";
    EXPECT_GE(e.mean_peak_fidelity, 0.998);
    EXPECT_EQ(e.n_samples, 200u);
    EXPECT_GE(min_of(e.std_fidelity), 0.0);
}

TEST(Disorder, StrongDisorderBand) {
    const auto e = disorder_ensemble(0.2, 200, 42, LadderParams::reference(), kShort);
    std::cout << "delta 0.2: <F_max> " << e.mean_peak_fidelity << " +- " << e.std_peak_fidelity << "\n";
    EXPECT_GE(e.mean_peak_fidelity, 0.985);
    EXPECT_GE(min_of(e.mean_fidelity), 0.49);
}

TEST(Disorder, ScheduleIndependentAndDeterministic) {
    const TimeGrid grid(0, 4, 801);
    const auto a = disorder_ensemble(0.1, 12, 99, LadderParams::reference(), grid, InitialState::phi_plus, 1);
    const auto b = disorder_ensemble(0.1, 12, 99, LadderParams::reference(), grid, InitialState::phi_plus, 4);
    EXPECT_EQ(a.peak_fidelity, b.peak_fidelity);
    EXPECT_EQ(a.mean_fidelity, b.mean_fidelity);
    EXPECT_EQ(a.std_fidelity, b.std_fidelity);
    EXPECT_EQ(a.mean_peak_fidelity, b.mean_peak_fidelity);
    const auto c = disorder_ensemble(0.1, 12, 100, LadderParams::reference(), grid, InitialState::phi_plus, 1);
    EXPECT_NE(a.peak_fidelity, c.peak_fidelity);
}

TEST(Disorder, MeanStd) {
    const auto [m, s] = detail::mean_std({1.0, 2.0, 3.0, 4.0});
    EXPECT_DOUBLE_EQ(m, 2.5);
    EXPECT_NEAR(s, std::sqrt(1.25), 1e-15);
}

TEST(Scaling, SizeLimit) {
    EXPECT_THROW(scaling_run(6, LadderParams::reference(), kShort), UnsupportedSize);
    EXPECT_THROW(scaling_run(2, LadderParams::reference(), kShort), std::invalid_argument);
}

class ScalingStudy : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        for (int n : {3, 4, 5}) {
            const auto traj = scaling_run(n, LadderParams::reference(), kShort);
            rows_.push_back(scaling_summary(n, traj));
            labels_.push_back(traj.terminal().label);
            channels_.push_back(traj.concurrence.size());
        }
        for (const auto& r : rows_)
            std::cout << "N " << r.n_rungs << "  first peak " << r.first_peak_time.value_or(-1) << "  max terminal "
                      << r.max_terminal << "  max mediating " << r.max_mediating << "\n";
    }
    static inline std::vector<ScalingRow> rows_;
    static inline std::vector<std::string> labels_;
    static inline std::vector<std::size_t> channels_;
};

TEST_F(ScalingStudy, ChannelsAndTerminalPair) {
    EXPECT_EQ(labels_, (std::vector<std::string>{"56", "78", "9_10"}));
    EXPECT_EQ(channels_, (std::vector<std::size_t>{3, 4, 5}));
}

TEST_F(ScalingStudy, MediatingPairsStayQuiet) {
    for (const auto& r : rows_) EXPECT_LE(r.max_mediating, kMediatingCutoff) << r.n_rungs;
}

TEST_F(ScalingStudy, FirstPeakLaterForFiveRungs) {
    ASSERT_TRUE(rows_[1].first_peak_time && rows_[2].first_peak_time);
    EXPECT_GT(*rows_[2].first_peak_time, *rows_[1].first_peak_time);
}

TEST_F(ScalingStudy, TerminalPeakNonIncreasing) {
    EXPECT_LE(rows_[1].max_terminal, rows_[0].max_terminal);
    EXPECT_LE(rows_[2].max_terminal, rows_[1].max_terminal);
}

TEST(FrequencyTable, Rows) {
    const auto rows = frequency_table({0.0, 0.5, 1.0}, LadderParams::reference());
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_NEAR(rows[1].predicted, 2.8284, 1e-4);
    EXPECT_NEAR(rows[2].predicted, 4.4721, 1e-4);
    for (const auto& r : rows)
        std::cout << "d " << r.d << "  predicted " << r.predicted << "  measured " << r.measured.value_or(NAN)
                  << "  " << r.note << "\n";
    ASSERT_TRUE(rows[1].ratio && rows[2].ratio);
    EXPECT_GE(*rows[1].ratio, 0.995);
    EXPECT_LE(*rows[1].ratio, 1.005);
    EXPECT_GE(*rows[2].ratio, 0.995);
    EXPECT_LE(*rows[2].ratio, 1.005);
}

TEST(FrequencyTable, NoIsingAnisotropy) {
    const auto rows = frequency_table({0.0}, LadderParams::reference());
    ASSERT_TRUE(rows[0].ratio.has_value()) << rows[0].note;
    EXPECT_GE(*rows[0].ratio, 0.99);
    EXPECT_LE(*rows[0].ratio, 1.02);
}

class EffectiveModel : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        alpha_ = measure_alpha(LadderParams::reference());
        for (double h : {100.0, 200.0, 400.0}) {
            auto p = LadderParams::reference();
            p.h = h;
            checks_.push_back(effective_model_check(p, alpha_.alpha));
            std::cout << "h " << h << "  full " << checks_.back().t_slow_full << "  effective "
                      << checks_.back().t_slow_effective << "  error " << checks_.back().relative_error << "\n";
        }
    }
    static inline AlphaMeasurement alpha_;
    static inline std::vector<EffectiveCheck> checks_;
};

TEST_F(EffectiveModel, StrongFieldAgreement) { EXPECT_LE(checks_[2].relative_error, 0.10); }

TEST_F(EffectiveModel, CalibrationPointIsConsistent) {
    // At the field where alpha is measured the two periods coincide up to the
    // drift of kappa between J_eff = alpha J^2/h and the bare coupling.
    EXPECT_LE(checks_[0].relative_error, 0.01);
    EXPECT_NEAR(checks_[0].t_slow_full, alpha_.t_slow, 1e-9 * alpha_.t_slow);
}

TEST_F(EffectiveModel, ErrorShrinksWithField) {
    EXPECT_GT(checks_[0].relative_error, checks_[2].relative_error);
}

TEST(EffectiveModelCheck, Preconditions) {
    auto p = LadderParams::reference();
    EXPECT_THROW(effective_model_check(p, 0.0), std::invalid_argument);
    p.h = 0;
    EXPECT_THROW(effective_model_check(p, 1.0), std::invalid_argument);
}
