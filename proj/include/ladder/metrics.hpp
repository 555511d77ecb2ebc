#pragma once

// Reduced density matrices and the pairwise entanglement measures:
// concurrence, Bell-state fidelity, von Neumann entropy (bits) and quantum
// mutual information.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ladder/core.hpp"

namespace ladder {

class DensityMatrix {
public:
    // Validates Hermiticity (1e-10), unit trace (1e-10) and eigenvalues >= -1e-9.
    explicit DensityMatrix(Matrix m) : m_(std::move(m)) {
        check_shape_and_trace();
        Eigen::SelfAdjointEigenSolver<Matrix> solver(m_, Eigen::EigenvaluesOnly);
        if (solver.eigenvalues().minCoeff() < -1e-9)
            throw std::invalid_argument("density matrix has a negative eigenvalue");
    }

    const Matrix& matrix() const { return m_; }
    Eigen::Index dim() const { return m_.rows(); }
    double purity() const { return (m_ * m_).trace().real(); }

    // Eigenvalues in ascending order with round-off negatives set to zero.
    Eigen::VectorXd clamped_eigenvalues() const {
        Eigen::SelfAdjointEigenSolver<Matrix> solver(m_, Eigen::EigenvaluesOnly);
        return solver.eigenvalues().cwiseMax(0.0);
    }

private:
    friend class PartialTrace;
    struct Trusted {};
    // Partial traces of normalized states are positive by construction.
    DensityMatrix(Matrix m, Trusted) : m_(std::move(m)) { check_shape_and_trace(); }

    void check_shape_and_trace() const {
        if (m_.rows() == 0 || m_.rows() != m_.cols()) throw std::invalid_argument("density matrix must be square");
        if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
            throw std::invalid_argument("density matrix is not Hermitian");
        if (std::abs(m_.trace() - Complex(1.0)) > 1e-10) throw std::invalid_argument("density matrix trace != 1");
    }

    Matrix m_;
};

// Reduction of an n-site pure state onto an ordered list of kept sites. The
// first kept site is the most significant factor of the reduced basis.
// Reusable across many states of the same size.
class PartialTrace {
public:
    PartialTrace(int n_sites, std::vector<int> keep) : n_sites_(n_sites), keep_(std::move(keep)) {
        if (keep_.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
        std::set<int> seen;
        for (int s : keep_) {
            if (s < 1 || s > n_sites)
                throw std::invalid_argument("partial_trace: site " + std::to_string(s) + " out of range");
            if (!seen.insert(s).second)
                throw std::invalid_argument("partial_trace: site " + std::to_string(s) + " repeated");
        }
        std::vector<int> rest;
        for (int s = 1; s <= n_sites; ++s)
            if (!seen.count(s)) rest.push_back(s);

        kept_dim_ = Eigen::Index{1} << keep_.size();
        rest_dim_ = Eigen::Index{1} << rest.size();
        gather_.resize(static_cast<std::size_t>(kept_dim_ * rest_dim_));
        for (Eigen::Index r = 0; r < kept_dim_; ++r) {
            for (Eigen::Index c = 0; c < rest_dim_; ++c) {
                std::uint32_t b = 0;
                compose(b, keep_, r);
                compose(b, rest, c);
                gather_[static_cast<std::size_t>(c * kept_dim_ + r)] = b;
            }
        }
    }

    const std::vector<int>& kept_sites() const { return keep_; }

    Matrix reduce_matrix(const Vector& psi) const {
        if (psi.size() != (Eigen::Index{1} << n_sites_))
            throw std::invalid_argument("partial_trace: state dimension does not match");
        Matrix amps(kept_dim_, rest_dim_);
        for (Eigen::Index c = 0; c < rest_dim_; ++c)
            for (Eigen::Index r = 0; r < kept_dim_; ++r)
                amps(r, c) = psi(gather_[static_cast<std::size_t>(c * kept_dim_ + r)]);
        Matrix rho = amps * amps.adjoint();
        // Exact Hermitian symmetry for downstream eigensolvers.
        return (rho + rho.adjoint()) * 0.5;
    }

    DensityMatrix operator()(const Vector& psi) const {
        return DensityMatrix(reduce_matrix(psi), DensityMatrix::Trusted{});
    }
    DensityMatrix operator()(const StateVector& psi) const { return (*this)(psi.amplitudes()); }

private:
    // Writes the bits of `value` (MSB first) onto the given sites of `b`.
    void compose(std::uint32_t& b, const std::vector<int>& sites, Eigen::Index value) const {
        const auto k = static_cast<int>(sites.size());
        for (int i = 0; i < k; ++i)
            if ((value >> (k - 1 - i)) & 1) b |= std::uint32_t{1} << site_bit(sites[static_cast<std::size_t>(i)], n_sites_);
    }

    int n_sites_;
    std::vector<int> keep_;
    Eigen::Index kept_dim_ = 0;
    Eigen::Index rest_dim_ = 0;
    std::vector<std::uint32_t> gather_;
};

inline DensityMatrix partial_trace(const StateVector& psi, const std::vector<int>& keep) {
    return PartialTrace(psi.n_sites(), keep)(psi);
}

// ---------------------------------------------------------------------------

namespace detail {

inline Matrix psd_sqrt(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
    const Eigen::VectorXd root = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return solver.eigenvectors() * root.asDiagonal() * solver.eigenvectors().adjoint();
}

inline const Matrix& sigma_yy() {
    static const Matrix yy = [] {
        Matrix m = Matrix::Zero(4, 4);
        m(0, 3) = -1.0;
        m(1, 2) = 1.0;
        m(2, 1) = 1.0;
        m(3, 0) = -1.0;
        return m;
    }();
    return yy;
}

}  // namespace detail

// Wootters concurrence max(0, s1 - s2 - s3 - s4). The s_i are the square
// roots of the eigenvalues of R = rho Y rho* Y (Y = sigma_y x sigma_y). They
// are obtained as the singular values of sqrt(rho) Y sqrt(rho)*, which avoids
// the non-Hermitian eigenproblem.
inline double concurrence(const DensityMatrix& rho) {
    if (rho.dim() != 4) throw std::invalid_argument("concurrence needs a two-qubit density matrix");
    const Matrix root = detail::psd_sqrt(rho.matrix());
    const Matrix a = root * detail::sigma_yy() * root.conjugate();
    const Eigen::VectorXd s = Eigen::JacobiSVD<Matrix>(a).singularValues();  // descending
    return std::clamp(s(0) - s(1) - s(2) - s(3), 0.0, 1.0);
}

enum class BellState { phi_plus, phi_minus, psi_plus, psi_minus };

inline Eigen::Vector4cd bell_vector(BellState b) {
    const double s = 1.0 / std::sqrt(2.0);
    switch (b) {
        case BellState::phi_plus: return {s, 0, 0, s};
        case BellState::phi_minus: return {s, 0, 0, -s};
        case BellState::psi_plus: return {0, s, s, 0};
        case BellState::psi_minus: return {0, s, -s, 0};
    }
    throw std::invalid_argument("unknown Bell state");
}

inline double bell_fidelity(const DensityMatrix& rho, BellState bell = BellState::phi_plus) {
    if (rho.dim() != 4) throw std::invalid_argument("bell_fidelity needs a two-qubit density matrix");
    const Eigen::Vector4cd v = bell_vector(bell);
    return std::clamp(v.dot(rho.matrix() * v).real(), 0.0, 1.0);
}

inline double von_neumann_entropy(const DensityMatrix& rho) {
    double s = 0.0;
    for (double p : rho.clamped_eigenvalues())
        if (p > 0.0) s -= p * std::log2(p);
    return std::max(s, 0.0);
}

// I(A:B) = S(A) + S(B) - S(AB), in bits.
inline double mutual_information(const StateVector& psi, const std::vector<int>& part_a,
                                 const std::vector<int>& part_b) {
    if (part_a.empty() || part_b.empty()) throw std::invalid_argument("mutual_information: empty part");
    for (int s : part_a)
        if (std::find(part_b.begin(), part_b.end(), s) != part_b.end())
            throw std::invalid_argument("mutual_information: parts overlap at site " + std::to_string(s));
    std::vector<int> joint = part_a;
    joint.insert(joint.end(), part_b.begin(), part_b.end());
    const int n = psi.n_sites();
    return von_neumann_entropy(PartialTrace(n, part_a)(psi)) + von_neumann_entropy(PartialTrace(n, part_b)(psi)) -
           von_neumann_entropy(PartialTrace(n, joint)(psi));
}

}  // namespace ladder
