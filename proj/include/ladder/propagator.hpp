#pragma once

// Exact time evolution through a one-time eigendecomposition:
//   psi(t) = V exp(-i Lambda t) V^dagger psi0   (hbar = 1).

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "ladder/core.hpp"
#include "ladder/errors.hpp"

namespace ladder {

struct SpectralDecomposition {
    Eigen::VectorXd eigenvalues;  // ascending
    Matrix eigenvectors;          // columns

    Eigen::Index dim() const { return eigenvalues.size(); }
};

inline SpectralDecomposition diagonalize(const HermitianOperator& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
    if (solver.info() != Eigen::Success) throw NumericFailure("Hermitian eigensolver did not converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

// Throws std::invalid_argument for a non-Hermitian matrix.
inline SpectralDecomposition diagonalize(const Matrix& m) { return diagonalize(HermitianOperator(m)); }

class TimeGrid {
public:
    TimeGrid(double t_start, double t_end, std::size_t n_points)
        : t_start_(t_start), t_end_(t_end), n_(n_points) {
        if (!(t_start >= 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("invalid time range");
        if (!(t_end > t_start)) throw std::invalid_argument("t_end must exceed t_start");
        if (n_points < 2) throw std::invalid_argument("a time grid needs at least two points");
    }

    double t_start() const { return t_start_; }
    double t_end() const { return t_end_; }
    std::size_t size() const { return n_; }
    double step() const { return (t_end_ - t_start_) / static_cast<double>(n_ - 1); }

    double at(std::size_t k) const {
        if (k + 1 == n_) return t_end_;
        return t_start_ + static_cast<double>(k) * step();
    }

    std::vector<double> times() const {
        std::vector<double> t(n_);
        for (std::size_t k = 0; k < n_; ++k) t[k] = at(k);
        return t;
    }

    // Uniform grid on [t_start, t_end] with spacing no larger than max_step.
    static TimeGrid with_max_step(double t_start, double t_end, double max_step) {
        if (!(max_step > 0.0)) throw std::invalid_argument("max_step must be positive");
        const auto intervals = static_cast<std::size_t>(std::ceil((t_end - t_start) / max_step));
        return TimeGrid(t_start, t_end, std::max<std::size_t>(intervals, 1) + 1);
    }

private:
    double t_start_;
    double t_end_;
    std::size_t n_;
};

inline StateVector evolve_state(const SpectralDecomposition& decomp, const StateVector& psi0, double t) {
    if (psi0.dim() != decomp.dim()) throw std::invalid_argument("state and Hamiltonian dimensions differ");
    Vector c = decomp.eigenvectors.adjoint() * psi0.amplitudes();
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) *= std::polar(1.0, -decomp.eigenvalues(i) * t);
    return StateVector(decomp.eigenvectors * c);
}

// Streams psi(t_k) for every grid point into `visit(k, psi)`, evaluating
// blocks of time points with one matrix product each.
inline void for_each_state(const SpectralDecomposition& decomp, const StateVector& psi0, const TimeGrid& grid,
                           const std::function<void(std::size_t, const Vector&)>& visit,
                           Eigen::Index block = 64) {
    if (psi0.dim() != decomp.dim()) throw std::invalid_argument("state and Hamiltonian dimensions differ");
    const Vector c = decomp.eigenvectors.adjoint() * psi0.amplitudes();
    const Eigen::Index dim = decomp.dim();
    Matrix phases(dim, block);
    Matrix states(dim, block);
    Vector column(dim);
    for (std::size_t k0 = 0; k0 < grid.size(); k0 += static_cast<std::size_t>(block)) {
        const auto width = static_cast<Eigen::Index>(std::min<std::size_t>(block, grid.size() - k0));
        for (Eigen::Index j = 0; j < width; ++j) {
            const double t = grid.at(k0 + static_cast<std::size_t>(j));
            for (Eigen::Index i = 0; i < dim; ++i) phases(i, j) = c(i) * std::polar(1.0, -decomp.eigenvalues(i) * t);
        }
        states.leftCols(width).noalias() = decomp.eigenvectors * phases.leftCols(width);
        for (Eigen::Index j = 0; j < width; ++j) {
            column = states.col(j);
            visit(k0 + static_cast<std::size_t>(j), column);
        }
    }
}

inline std::vector<StateVector> evolve_series(const SpectralDecomposition& decomp, const StateVector& psi0,
                                              const TimeGrid& grid) {
    std::vector<StateVector> out;
    out.reserve(grid.size());
    for_each_state(decomp, psi0, grid, [&](std::size_t, const Vector& psi) { out.emplace_back(psi); });
    return out;
}

inline double expectation(const HermitianOperator& op, const Vector& psi) {
    return psi.dot(op.matrix() * psi).real();
}

}  // namespace ladder
