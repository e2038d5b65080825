#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <vector>

#include "v2rdo/majorana.hpp"

/// Target Hamiltonians: the generator-quartic ring model and molecular
/// Hamiltonians assembled from FCIDUMP electron integrals.
namespace v2rdo {

/// Ring of r sites with periodic indexing:
///
///   H = (mu/2) (r + sum_i p_i m_i)
///     + sum_i [ (tau+delta)/2 p_i m_{i+1} + (tau-delta)/2 p_{i+1} m_i ]
///     + kappa sum_i [ p_i p_{i+1} m_{i+2} m_{i+3} + p_i m_{i+1} p_{i+2} m_{i+3} ]
///
/// The mu term is mu * N up to a constant; tau hops, delta pairs, kappa
/// couples quartically.  Number symmetry is broken at delta != 0, parity is
/// conserved throughout.
struct RingParams {
    int sites = 6;
    double mu = -0.2;
    double tau = 0.5;
    double delta = 0.5;
    double kappa = 0.0;
};

OperatorPoly ring_hamiltonian(const RingParams& params);

/// N = sum_i (1 + p_i m_i) / 2 over r orbitals.
OperatorPoly number_operator(int orbitals);

/// Spin-free electron integrals in chemists' notation: h1(p,q) one-body,
/// (pq|rs) two-body with 8-fold permutational symmetry, and the scalar core
/// (nuclear repulsion) energy.  Indices are 1-based spatial orbitals; only
/// canonical index quadruples are stored.
struct MolecularSystem {
    int n_orbitals = 0;
    int n_electrons = 0;
    int ms2 = 0;
    double core_energy = 0.0;
    std::map<std::array<int, 2>, double> one_body;       // canonical p >= q
    std::map<std::array<int, 4>, double> two_body;       // canonical (pq|rs)

    double h1(int p, int q) const;
    double eri(int p, int q, int r, int s) const;        // (pq|rs)
    void set_h1(int p, int q, double value);
    void set_eri(int p, int q, int r, int s, double value);
};

/// Parses an FCIDUMP stream: a &FCI ... &END (or /) namelist carrying NORB
/// and NELEC, then one record per line, "value i j k l".  Fortran D
/// exponents are accepted.  Records with k = l = 0 are one-body, with only
/// i nonzero are orbital energies (ignored), and with all indices zero the
/// core energy.  Errors carry the 1-based line number; inconsistent
/// duplicate entries (beyond 1e-10) are rejected.
MolecularSystem parse_fcidump(std::istream& in);
MolecularSystem parse_fcidump_file(const std::string& path);

/// Writes a parseable FCIDUMP with full-precision values; parse(emit(x))
/// reproduces x exactly.
void emit_fcidump(std::ostream& out, const MolecularSystem& mol);

/// Assembles the Fock-space Hamiltonian over 2 * n_orbitals spin orbitals
/// (spatial k maps to modes 2k-1 alpha and 2k beta):
///
///   H = E_core + sum_pq h1(p,q) sum_u a+_pu a_qu
///     + 1/2 sum_pqrs (pq|rs) sum_uv a+_pu a+_rv a_sv a_qu
///
/// with u, v spin labels and (pq|rs) in chemists' order.  The result is
/// Hermitian with real coefficients.
OperatorPoly molecular_hamiltonian(const MolecularSystem& mol);

}  // namespace v2rdo
