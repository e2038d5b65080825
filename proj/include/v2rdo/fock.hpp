#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "v2rdo/majorana.hpp"

/// Dense full-Fock-space realization of the generator algebra over r
/// orbitals (dimension 2^r).  Basis state n has orbital i occupied when bit
/// i-1 of n is set; creation/annihilation operators carry the usual parity
/// factor over lower-indexed orbitals, which makes distinct-orbital
/// generators anticommute.
namespace v2rdo {

/// Orbital counts above this are refused; the dense matrix would not fit.
inline constexpr int kFockOrbitalCap = 14;

struct FockMatrix {
    int rank = 0;  // generator count 2r
    Eigen::MatrixXcd mat;
};

/// Full ground-level data of a Hermitian polynomial.
struct FciResult {
    double energy = 0.0;
    Eigen::VectorXcd state;       // one ground eigenvector
    int multiplicity = 1;         // eigenvalues within 1e-8 * (1 + |E0|) of E0
    double n_expectation = 0.0;   // <N>
    double n_variance = 0.0;      // <(N - <N>)^2>
    double parity = 0.0;          // <(-1)^N>
};

struct StateMoments {
    double n_expectation = 0.0;
    double n_variance = 0.0;  // <(N - n0)^2> about the requested n0
    double parity = 0.0;
};

/// Phase and image index of a canonical monomial applied to basis state n.
std::pair<int, std::uint64_t> monomial_action(std::uint64_t mask, std::uint64_t n);

/// Dense matrix of a polynomial.  Errors when rank is odd or rank/2 exceeds
/// orbital_cap.
FockMatrix operator_matrix(const OperatorPoly& a, int orbital_cap = kFockOrbitalCap);

/// Ground eigenpair of a Hermitian polynomial via dense diagonalization.
/// Errors when the realized matrix deviates from Hermitian by more than
/// hermiticity_tol in max norm.
FciResult fci_ground(const OperatorPoly& a, double hermiticity_tol = 1e-10,
                     int orbital_cap = kFockOrbitalCap);

/// Particle-number moments and parity of a normalized Fock vector; the
/// variance is taken about the supplied n0.  Errors when the norm deviates
/// from 1 by more than 1e-10.
StateMoments state_moments(const Eigen::VectorXcd& state, double n0);

/// Expectations <state| m |state> for each monomial (degree <= 4 enforced).
std::vector<cplx> rdm_expectations(const Eigen::VectorXcd& state,
                                   const std::vector<MajoranaMonomial>& monomials);

}  // namespace v2rdo
