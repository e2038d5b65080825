#include "v2rdo/fock.hpp"

#include <stdexcept>

namespace v2rdo {

std::pair<int, std::uint64_t> monomial_action(std::uint64_t mask, std::uint64_t n) {
    // Generators act right to left, so walk the slots from high to low.
    // p_i flips occupation i with the parity phase of lower orbitals;
    // m_i additionally carries -1 when creating (m_i = a_i - a_i^dag).
    int phase = 1;
    std::uint64_t m = mask;
    while (m != 0) {
        const int slot = 63 - std::countl_zero(m);
        m &= ~(std::uint64_t{1} << slot);
        const int orb = slot >> 1;
        const std::uint64_t bit = std::uint64_t{1} << orb;
        if (std::popcount(n & (bit - 1)) % 2 != 0) phase = -phase;
        if ((slot & 1) != 0 && (n & bit) == 0) phase = -phase;
        n ^= bit;
    }
    return {phase, n};
}

namespace {

int checked_orbitals(int rank, int orbital_cap, const char* what) {
    if (rank <= 0 || rank % 2 != 0) {
        throw std::invalid_argument(std::string(what) + ": rank must be a positive even generator count");
    }
    const int r = rank / 2;
    if (r > orbital_cap) {
        throw std::invalid_argument(std::string(what) + ": " + std::to_string(r) +
                                    " orbitals exceed the dense cap of " + std::to_string(orbital_cap));
    }
    return r;
}

}  // namespace

FockMatrix operator_matrix(const OperatorPoly& a, int orbital_cap) {
    const int r = checked_orbitals(a.rank, orbital_cap, "operator_matrix");
    const std::int64_t dim = std::int64_t{1} << r;
    FockMatrix out;
    out.rank = a.rank;
    out.mat = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& [mask, c] : a.terms) {
        for (std::int64_t n = 0; n < dim; ++n) {
            const auto [phase, img] = monomial_action(mask, static_cast<std::uint64_t>(n));
            out.mat(static_cast<Eigen::Index>(img), n) += c * static_cast<double>(phase);
        }
    }
    return out;
}

FciResult fci_ground(const OperatorPoly& a, double hermiticity_tol, int orbital_cap) {
    const FockMatrix fm = operator_matrix(a, orbital_cap);
    const double herm_dev = (fm.mat - fm.mat.adjoint()).cwiseAbs().maxCoeff();
    if (herm_dev > hermiticity_tol) {
        throw std::invalid_argument("fci_ground: operator is not Hermitian (deviation " +
                                    std::to_string(herm_dev) + ")");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(fm.mat);
    if (es.info() != Eigen::Success) throw std::runtime_error("fci_ground: eigensolver failed");

    FciResult res;
    res.energy = es.eigenvalues()(0);
    res.state = es.eigenvectors().col(0);
    const double deg_tol = 1e-8 * (1.0 + std::abs(res.energy));
    res.multiplicity = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        if (es.eigenvalues()(i) <= res.energy + deg_tol) ++res.multiplicity;
    }
    const StateMoments mom = state_moments(res.state, 0.0);
    res.n_expectation = mom.n_expectation;
    res.parity = mom.parity;
    const StateMoments centered = state_moments(res.state, mom.n_expectation);
    res.n_variance = centered.n_variance;
    return res;
}

StateMoments state_moments(const Eigen::VectorXcd& state, double n0) {
    const double norm = state.norm();
    if (std::abs(norm - 1.0) > 1e-10) {
        throw std::invalid_argument("state_moments: state is not normalized (norm " +
                                    std::to_string(norm) + ")");
    }
    StateMoments mom;
    for (Eigen::Index n = 0; n < state.size(); ++n) {
        const double w = std::norm(state(n));
        if (w == 0.0) continue;
        const int occ = std::popcount(static_cast<std::uint64_t>(n));
        mom.n_expectation += w * occ;
        mom.n_variance += w * (occ - n0) * (occ - n0);
        mom.parity += (occ % 2 == 0) ? w : -w;
    }
    return mom;
}

std::vector<cplx> rdm_expectations(const Eigen::VectorXcd& state,
                                   const std::vector<MajoranaMonomial>& monomials) {
    std::vector<cplx> out;
    out.reserve(monomials.size());
    for (const MajoranaMonomial& mono : monomials) {
        if (mono.degree() > 4) {
            throw std::invalid_argument("rdm_expectations: monomial degree " +
                                        std::to_string(mono.degree()) + " exceeds two-body order");
        }
        if (mono.rank <= 0 || mono.rank % 2 != 0 || (mono.rank < 64 && mono.mask >> mono.rank)) {
            throw std::invalid_argument("rdm_expectations: monomial mask exceeds its rank");
        }
        if (state.size() != Eigen::Index{1} << (mono.rank / 2)) {
            throw std::invalid_argument("rdm_expectations: state dimension does not match the rank");
        }
        cplx acc{0.0, 0.0};
        for (Eigen::Index n = 0; n < state.size(); ++n) {
            if (state(n) == cplx{0.0, 0.0}) continue;
            const auto [phase, img] = monomial_action(mono.mask, static_cast<std::uint64_t>(n));
            acc += std::conj(state(static_cast<Eigen::Index>(img))) *
                   static_cast<double>(phase) * state(n);
        }
        out.push_back(acc);
    }
    return out;
}

}  // namespace v2rdo
