#pragma once

#include <Eigen/Dense>
#include <vector>

#include "v2rdo/constraints.hpp"
#include "v2rdo/majorana.hpp"

/// Dual semidefinite solver.  Maximizes the ground-energy bound E over
///
///   A(X)_m + E delta_{m,1} - lambda v_m = h_m   for every monomial row m,
///   X >= 0 (block diagonal over the Gram basis),  lambda >= 0,
///
/// where A collects the Gram-pair weights of build_map, h is the target
/// Hamiltonian and v the particle-number variance operator, so the cone
/// certificate is H - E + lambda (N - n0)^2.  Raising lambda penalizes every
/// particle-number sector except n0, and the maximized bound converges to
/// the fixed-number ground energy once lambda clears the sector gaps; the
/// multipliers then satisfy sum_m v_m y_m = 0 by complementarity.  The
/// method is
/// an augmented-Lagrangian boundary-point iteration: closed-form scalar
/// updates, one spectral projection per sweep, multiplier ascent, and
/// penalty rebalancing.  The multiplier vector y converges to the 2-RDO
/// coefficients with y = 1 at the identity row.
namespace v2rdo {

enum class VarianceMode {
    off,       // lambda fixed at 0: number-nonconserving bound
    variable,  // lambda >= 0 optimized: selects the fixed-N sector
};

struct SolverOptions {
    double tol = 1e-7;          // stopping threshold on max(residuals, gap)
    long max_iter = 200000;
    double rho = 1.0;           // initial penalty
    double rho_min = 1e-8;
    double rho_max = 1e8;
    int check_every = 10;       // residual evaluation cadence
    int adapt_every = 50;       // penalty rebalancing cadence
    double balance_ratio = 10.0;
    double balance_scale = 2.0;
    bool force_complex = false; // disable the real-symmetric fast path
    int verbose = 0;            // print every `verbose` checks when > 0
};

struct DualProblem {
    const ConstraintSystem* system = nullptr;
    VarianceMode variance = VarianceMode::off;
    double n0 = 0.0;  // target particle number, informational
    SolverOptions options;
};

struct DualSolution {
    double energy = 0.0;
    double lambda = 0.0;
    std::vector<Eigen::MatrixXcd> gram;  // one PSD factor per basis block
    Eigen::VectorXcd y;                  // multipliers per constraint row
    long iterations = 0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double gap = 0.0;
    double min_gram_eig = 0.0;
    double wall_seconds = 0.0;
    bool converged = false;
    bool real_path = false;
};

/// Nearest positive semidefinite matrix in Frobenius norm: eigenvalues
/// clamped at zero.  Errors when the input deviates from Hermitian by more
/// than hermiticity_tol in max norm.
Eigen::MatrixXcd psd_project(const Eigen::MatrixXcd& m, double hermiticity_tol = 1e-10);

/// Runs the iteration.  Errors when the target is unset, the variance
/// vector is missing in variable mode, or the iteration diverges (an
/// infeasibility symptom).  Exhausting max_iter returns the best iterate
/// with converged = false.
DualSolution solve_dual(const DualProblem& problem);

/// The two-body reduced-density-operator estimate: kept-row multipliers
/// conjugated into the expectation convention (coefficient of m estimates
/// <m>) and normalized to 1 at the identity.  Errors on a non-converged
/// solution.
OperatorPoly extract_rdo(const DualSolution& sol, const ConstraintSystem& sys);

/// <gamma> under the RDO, for a fermion string whose expansion stays within
/// degree <= 4.  Errors otherwise.
cplx rdm_element(const OperatorPoly& rdo, const FermionString& gamma);

}  // namespace v2rdo
