#pragma once

// Two-leg spin-1/2 XXZ ladder: physical parameters, Pauli strings, the
// Hamiltonian and the initial states.
//
// Conventions used everywhere in the library:
//   * sites are numbered 1..2N; rung n holds sites (2n-1, 2n), odd sites form
//     the top leg and even sites the bottom leg;
//   * site 1 is the most significant factor of the tensor product, i.e. site
//     s lives on bit (2N - s) of a basis index;
//   * |0> is spin down and |1> spin up, so sigma_z|0> = -|0>. With this
//     ordering of the local basis sigma_y = [[0, i], [-i, 0]].

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ladder/errors.hpp"

namespace ladder {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr int kMaxRungs = 5;

enum class Pauli { x, y, z };

// Which rungs receive the magnetic field.
enum class FieldMode {
    selective,  // mediating rungs 2..N-1 only
    uniform,    // every rung
    custom,     // LadderParams::custom_field_rungs
};

// Which legs carry the J_parallel bonds. `even_sites_only` keeps only the
// bottom-leg bonds (2n, 2n+2); it exists as a control variant.
enum class LegMode { both, even_sites_only };

struct LadderParams {
    int n_rungs = 3;
    double j_perp = 1.0;
    double j_parallel = 1.0;
    double g = 1.0;  // XY anisotropy
    double d = 0.5;  // Ising (ZZ) anisotropy
    double h = 100.0;
    FieldMode field_mode = FieldMode::selective;
    std::vector<int> custom_field_rungs;
    LegMode legs = LegMode::both;

    int n_sites() const { return 2 * n_rungs; }
    std::size_t dim() const { return std::size_t{1} << n_sites(); }

    std::vector<int> field_rungs() const {
        std::vector<int> rungs;
        switch (field_mode) {
            case FieldMode::selective:
                for (int n = 2; n <= n_rungs - 1; ++n) rungs.push_back(n);
                break;
            case FieldMode::uniform:
                for (int n = 1; n <= n_rungs; ++n) rungs.push_back(n);
                break;
            case FieldMode::custom:
                rungs = custom_field_rungs;
                std::sort(rungs.begin(), rungs.end());
                break;
        }
        return rungs;
    }

    void validate() const {
        if (n_rungs < 1) throw std::invalid_argument("n_rungs must be >= 1");
        if (n_rungs > kMaxRungs)
            throw UnsupportedSize("n_rungs = " + std::to_string(n_rungs) +
                                  " exceeds the dense limit of " + std::to_string(kMaxRungs));
        for (double v : {j_perp, j_parallel, g, d, h})
            if (!std::isfinite(v)) throw std::invalid_argument("coupling parameters must be finite");
        if (field_mode == FieldMode::custom) {
            std::set<int> seen;
            for (int r : custom_field_rungs) {
                if (r < 1 || r > n_rungs)
                    throw std::invalid_argument("field rung " + std::to_string(r) + " out of range");
                if (!seen.insert(r).second)
                    throw std::invalid_argument("field rung " + std::to_string(r) + " repeated");
            }
        }
    }

    // J_perp = J_parallel = 1, g = 1, d = 0.5, h = 100, N = 3.
    static LadderParams reference() { return {}; }
};

inline int rung_top_site(int rung) { return 2 * rung - 1; }
inline int rung_bottom_site(int rung) { return 2 * rung; }

// Bit position of a 1-based site in a basis index.
inline int site_bit(int site, int n_sites) { return n_sites - site; }

// Per-bond coupling constants. Leg bonds are ordered rung by rung: entry
// 2(n-1) is the top bond (2n-1, 2n+1) and 2(n-1)+1 the bottom bond (2n, 2n+2).
struct CouplingProfile {
    std::vector<double> rung;
    std::vector<double> leg;

    static CouplingProfile uniform(const LadderParams& p) {
        CouplingProfile c;
        c.rung.assign(static_cast<std::size_t>(p.n_rungs), p.j_perp);
        c.leg.assign(static_cast<std::size_t>(2 * std::max(p.n_rungs - 1, 0)), p.j_parallel);
        return c;
    }
};

// ---------------------------------------------------------------------------
// Operators and states

class HermitianOperator {
public:
    // Throws std::invalid_argument unless max|M - M^dagger| <= 1e-12 max|M|.
    explicit HermitianOperator(Matrix m) : m_(std::move(m)) {
        if (m_.rows() != m_.cols()) throw std::invalid_argument("operator must be square");
        const double scale = m_.size() ? m_.cwiseAbs().maxCoeff() : 0.0;
        const double asym = m_.size() ? (m_ - m_.adjoint()).cwiseAbs().maxCoeff() : 0.0;
        if (asym > 1e-12 * scale) throw std::invalid_argument("operator is not Hermitian");
    }

    const Matrix& matrix() const { return m_; }
    Eigen::Index dim() const { return m_.rows(); }

private:
    Matrix m_;
};

class StateVector {
public:
    // Throws std::invalid_argument unless | ||psi|| - 1 | <= 1e-12 and the
    // dimension is a power of two.
    explicit StateVector(Vector amps) : a_(std::move(amps)) {
        if (a_.size() == 0 || (a_.size() & (a_.size() - 1)) != 0)
            throw std::invalid_argument("state dimension must be a power of two");
        if (std::abs(a_.norm() - 1.0) > 1e-12) throw std::invalid_argument("state is not normalized");
    }

    const Vector& amplitudes() const { return a_; }
    Eigen::Index dim() const { return a_.size(); }
    int n_sites() const {
        int n = 0;
        while ((Eigen::Index{1} << n) < a_.size()) ++n;
        return n;
    }

private:
    Vector a_;
};

// A tensor product of single-site Paulis. Acting on basis state |b> it gives
// phase(b) |b ^ flip_mask>, which is how operators are assembled without
// forming Kronecker products.
class PauliString {
public:
    PauliString(std::vector<Pauli> axes, std::vector<int> sites, int n_sites) : n_sites_(n_sites) {
        if (axes.size() != sites.size())
            throw std::invalid_argument("pauli_string: axes and sites differ in length");
        if (n_sites < 1 || n_sites > 2 * kMaxRungs)
            throw std::invalid_argument("pauli_string: unsupported number of sites");
        std::set<int> seen;
        for (std::size_t k = 0; k < sites.size(); ++k) {
            const int s = sites[k];
            if (s < 1 || s > n_sites)
                throw std::invalid_argument("pauli_string: site " + std::to_string(s) + " out of range");
            if (!seen.insert(s).second)
                throw std::invalid_argument("pauli_string: site " + std::to_string(s) + " repeated");
            const std::uint32_t bit = std::uint32_t{1} << site_bit(s, n_sites);
            switch (axes[k]) {
                case Pauli::x: flip_ |= bit; break;
                case Pauli::y: flip_ |= bit; y_mask_ |= bit; break;
                case Pauli::z: z_mask_ |= bit; break;
            }
        }
    }

    int n_sites() const { return n_sites_; }
    std::uint32_t flip_mask() const { return flip_; }

    // Phase acquired by basis state `b`.
    Complex phase(std::uint32_t b) const {
        // sigma_z: -1 on |0>, +1 on |1>.
        const int z_down = std::popcount(z_mask_ & ~b);
        // sigma_y: -i on |0>, +i on |1>.
        const int y_up = std::popcount(y_mask_ & b);
        const int y_down = std::popcount(y_mask_ & ~b);
        static constexpr Complex kPowI[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        const int quarter_turns = ((y_up - y_down) % 4 + 4) % 4;
        const double sign = (z_down % 2) ? -1.0 : 1.0;
        return sign * kPowI[quarter_turns];
    }

    // target += coeff * P
    void accumulate(Matrix& target, Complex coeff) const {
        const auto dim = static_cast<std::uint32_t>(target.cols());
        for (std::uint32_t b = 0; b < dim; ++b) target(b ^ flip_, b) += coeff * phase(b);
    }

    HermitianOperator to_operator() const {
        Matrix m = Matrix::Zero(Eigen::Index{1} << n_sites_, Eigen::Index{1} << n_sites_);
        accumulate(m, 1.0);
        return HermitianOperator(std::move(m));
    }

private:
    int n_sites_;
    std::uint32_t flip_ = 0;
    std::uint32_t y_mask_ = 0;
    std::uint32_t z_mask_ = 0;
};

inline HermitianOperator pauli_string(std::vector<Pauli> axes, std::vector<int> sites, int n_sites) {
    return PauliString(std::move(axes), std::move(sites), n_sites).to_operator();
}

namespace detail {

// J [ (1+g)/2 XX + (1-g)/2 YY + d ZZ ] on sites (a, b).
inline void add_bond(Matrix& m, int a, int b, int n_sites, double j, double g, double d) {
    if (j == 0.0) return;
    PauliString({Pauli::x, Pauli::x}, {a, b}, n_sites).accumulate(m, j * (1.0 + g) / 2.0);
    PauliString({Pauli::y, Pauli::y}, {a, b}, n_sites).accumulate(m, j * (1.0 - g) / 2.0);
    PauliString({Pauli::z, Pauli::z}, {a, b}, n_sites).accumulate(m, j * d);
}

}  // namespace detail

// H = H_rung + H_leg + H_field with per-bond couplings taken from `couplings`.
inline HermitianOperator build_hamiltonian(const LadderParams& p, const CouplingProfile& couplings) {
    p.validate();
    const int n = p.n_sites();
    if (couplings.rung.size() != static_cast<std::size_t>(p.n_rungs) ||
        couplings.leg.size() != static_cast<std::size_t>(2 * (p.n_rungs - 1)))
        throw std::invalid_argument("coupling profile does not match the ladder size");

    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(p.dim()), static_cast<Eigen::Index>(p.dim()));
    for (int r = 1; r <= p.n_rungs; ++r)
        detail::add_bond(m, rung_top_site(r), rung_bottom_site(r), n, couplings.rung[r - 1], p.g, p.d);
    for (int r = 1; r < p.n_rungs; ++r) {
        if (p.legs == LegMode::both)
            detail::add_bond(m, rung_top_site(r), rung_top_site(r + 1), n, couplings.leg[2 * (r - 1)], p.g,
                             p.d);
        detail::add_bond(m, rung_bottom_site(r), rung_bottom_site(r + 1), n,
                         couplings.leg[2 * (r - 1) + 1], p.g, p.d);
    }
    if (p.h != 0.0) {
        for (int r : p.field_rungs()) {
            PauliString({Pauli::z}, {rung_top_site(r)}, n).accumulate(m, p.h);
            PauliString({Pauli::z}, {rung_bottom_site(r)}, n).accumulate(m, p.h);
        }
    }
    return HermitianOperator(std::move(m));
}

inline HermitianOperator build_hamiltonian(const LadderParams& p) {
    p.validate();
    return build_hamiltonian(p, CouplingProfile::uniform(p));
}

// ---------------------------------------------------------------------------
// Initial states

enum class InitialState {
    phi_plus,                 // (|00> + |11>)/sqrt2 on rung 1
    psi_plus,                 // (|01> + |10>)/sqrt2 on rung 1
    psi_minus_plus_phi_plus,  // (|Psi-> + |Phi+>)/sqrt2 on rung 1
    separable_00,             // |00> on rung 1
};

inline std::string_view to_string(InitialState k) {
    switch (k) {
        case InitialState::phi_plus: return "phi_plus";
        case InitialState::psi_plus: return "psi_plus";
        case InitialState::psi_minus_plus_phi_plus: return "psi_minus_plus_phi_plus";
        case InitialState::separable_00: return "separable_00";
    }
    return "unknown";
}

inline InitialState parse_initial_state(std::string_view name) {
    for (auto k : {InitialState::phi_plus, InitialState::psi_plus, InitialState::psi_minus_plus_phi_plus,
                   InitialState::separable_00})
        if (to_string(k) == name) return k;
    throw std::invalid_argument("unknown initial state '" + std::string(name) + "'");
}

// Amplitudes of the rung-1 state in the order |00>, |01>, |10>, |11>.
inline Eigen::Vector4cd rung_state(InitialState k) {
    const double s = 1.0 / std::sqrt(2.0);
    switch (k) {
        case InitialState::phi_plus: return {s, 0, 0, s};
        case InitialState::psi_plus: return {0, s, s, 0};
        case InitialState::psi_minus_plus_phi_plus: return {0.5, 0.5, -0.5, 0.5};
        case InitialState::separable_00: return {1, 0, 0, 0};
    }
    throw std::invalid_argument("unknown initial state");
}

// Rung-1 state on sites (1, 2), every other site in |0>.
inline StateVector build_initial_state(InitialState kind, int n_sites) {
    if (n_sites < 2 || n_sites > 2 * kMaxRungs) throw std::invalid_argument("unsupported number of sites");
    const Eigen::Vector4cd pair = rung_state(kind);
    Vector psi = Vector::Zero(Eigen::Index{1} << n_sites);
    for (int a = 0; a < 4; ++a) psi(Eigen::Index{a} << (n_sites - 2)) = pair(a);
    return StateVector(std::move(psi));
}

inline StateVector build_initial_state(InitialState kind, const LadderParams& p) {
    p.validate();
    return build_initial_state(kind, p.n_sites());
}

// ---------------------------------------------------------------------------
// Effective terminal-pair model
//
// Four spins: sites (1, 2) of the first rung and the two sites of the last
// rung, relabelled (3, 4). The mediating rungs are frozen in |00>, which
// leaves
//   * the two terminal rung bonds,
//   * the static ZZ leg field -d J_par sigma_z on each terminal site, and
//   * the virtual inter-rung coupling -J_eff (X1 X3 + X2 X4).

inline HermitianOperator build_effective_hamiltonian(const LadderParams& p, double j_eff) {
    p.validate();
    if (p.n_rungs < 3) throw std::invalid_argument("the effective model needs a mediating rung");
    constexpr int n = 4;
    Matrix m = Matrix::Zero(16, 16);
    detail::add_bond(m, 1, 2, n, p.j_perp, p.g, p.d);
    detail::add_bond(m, 3, 4, n, p.j_perp, p.g, p.d);
    for (int s = 1; s <= 4; ++s) PauliString({Pauli::z}, {s}, n).accumulate(m, -p.d * p.j_parallel);
    PauliString({Pauli::x, Pauli::x}, {1, 3}, n).accumulate(m, -j_eff);
    PauliString({Pauli::x, Pauli::x}, {2, 4}, n).accumulate(m, -j_eff);
    return HermitianOperator(std::move(m));
}

}  // namespace ladder
