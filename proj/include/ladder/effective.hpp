#pragma once

// Four-spin terminal-pair model and the prefactor alpha in J_eff = alpha J^2 / h.
// T_slow J_eff = kappa, with kappa read off the effective model at the bare
// coupling J^2 / h using the same envelope rule as the full ladder.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "ladder/core.hpp"
#include "ladder/metrics.hpp"
#include "ladder/propagator.hpp"
#include "ladder/signal.hpp"

namespace ladder {

// Angular frequency of the terminal rung oscillation, 2 sqrt(1 + 4 d^2) J_perp.
inline double dressed_rung_frequency(const LadderParams& p) {
    return 2.0 * std::sqrt(1.0 + 4.0 * p.d * p.d) * std::abs(p.j_perp);
}

// Carrier period pi / omega of a concurrence curve, used to size time steps.
inline double carrier_period(const LadderParams& p) {
    const double omega = std::max(dressed_rung_frequency(p), std::abs(p.j_parallel));
    return omega > 0.0 ? std::numbers::pi / omega : 1.0;
}

struct EffectiveModelOptions {
    InitialState state = InitialState::phi_plus;
    int points_per_carrier = 200;
    // Simulated window in units of pi / J_eff.
    double window_factor = 1.2;
    EnvelopeOptions envelope;
};

// Terminal-pair concurrence of the four-spin model.
inline TimeSeries effective_model_series(const LadderParams& p, double j_eff, const TimeGrid& grid,
                                         InitialState state = InitialState::phi_plus) {
    const auto decomp = diagonalize(build_effective_hamiltonian(p, j_eff));
    const PartialTrace terminal(4, {3, 4});
    std::vector<double> c(grid.size());
    for_each_state(decomp, build_initial_state(state, 4), grid,
                   [&](std::size_t k, const Vector& psi) { c[k] = concurrence(terminal(psi)); });
    return TimeSeries(grid.times(), std::move(c));
}

inline double effective_model_period(const LadderParams& p, double j_eff, const EffectiveModelOptions& opt = {}) {
    if (!(j_eff > 0.0)) throw std::invalid_argument("J_eff must be positive");
    if (opt.points_per_carrier < 4) throw std::invalid_argument("points_per_carrier must be >= 4");
    const double window = opt.window_factor * std::numbers::pi / j_eff;
    const auto grid = TimeGrid::with_max_step(0.0, window, carrier_period(p) / opt.points_per_carrier);
    return envelope_period(effective_model_series(p, j_eff, grid, opt.state), opt.envelope);
}

// J_eff = alpha J_par^2 / h  =>  alpha = J_eff h / J_par^2.
inline double alpha_from_coupling(double j_eff, const LadderParams& p) {
    if (p.h == 0.0) throw std::invalid_argument("alpha is undefined at h = 0");
    if (p.j_parallel == 0.0) throw std::invalid_argument("alpha is undefined at J_parallel = 0");
    return j_eff * p.h / (p.j_parallel * p.j_parallel);
}

// kappa = T_slow J_eff of the effective model at the bare coupling J^2/h.
inline double effective_period_constant(const LadderParams& p, const EffectiveModelOptions& opt = {}) {
    if (!(p.h > 0.0)) throw std::invalid_argument("the effective model needs h > 0");
    const double bare = p.j_parallel * p.j_parallel / p.h;
    return effective_model_period(p, bare, opt) * bare;
}

inline double extract_alpha(double t_slow, const LadderParams& p, double kappa) {
    if (!(t_slow > 0.0)) throw std::invalid_argument("t_slow must be positive");
    return alpha_from_coupling(kappa / t_slow, p);
}

inline double extract_alpha(double t_slow, const LadderParams& p, const EffectiveModelOptions& opt = {}) {
    if (p.h == 0.0) throw std::invalid_argument("alpha is undefined at h = 0");
    if (!(t_slow > 0.0)) throw std::invalid_argument("t_slow must be positive");
    return extract_alpha(t_slow, p, effective_period_constant(p, opt));
}

}  // namespace ladder
