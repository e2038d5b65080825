#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "v2rdo/constraints.hpp"
#include "v2rdo/fock.hpp"
#include "v2rdo/hamiltonians.hpp"
#include "v2rdo/solver.hpp"

/// Batch runs: parameter sweeps over positivity conditions with an exact
/// reference per point, streamed to CSV rows in sweep order.
namespace v2rdo {

enum class Condition {
    c2_2,
    c2_3_partial,
    c2_3_full,
    fci,
};

std::string condition_name(Condition c);
Condition condition_from_name(const std::string& name);

struct SweepConfig {
    SolverOptions solver;
    bool exact_p = false;           // ablation: Gram basis of exactly degree p
    bool parity_blocking = false;   // block-diagonal Gram over monomial parity
    std::optional<double> number_constraint;  // n0: variance mode engaged when set
    int threads = 1;
    unsigned long seed = 0;         // reserved for randomized utilities
};

/// One CSV row.  Empty optionals render as empty cells: the error fields
/// are only defined when the solve converged and an exact reference exists.
struct RunRecord {
    std::string system;
    std::string condition;
    double coordinate = 0.0;
    double energy = 0.0;
    std::optional<double> fci_energy;
    std::optional<double> error;            // energy - fci_energy, signed
    std::optional<double> log10_abs_error;
    std::optional<double> n_variance;
    std::optional<double> lambda;
    std::optional<long> iterations;
    std::optional<double> gap;
    std::optional<double> primal_residual;
    std::optional<double> dual_residual;
    double wall_s = 0.0;
    bool converged = false;
};

/// Particle-number variance of an RDO by coefficient contraction with N and
/// N^2 (all monomials degree <= 4, so both live in the kept span).
double rdo_number_variance(const OperatorPoly& rdo, int orbitals);

/// Solves one condition for one Hamiltonian; fci reference passed in when
/// available.  The fci pseudo-condition reports the reference itself.
RunRecord run_condition(const OperatorPoly& hamiltonian, Condition condition,
                        const SweepConfig& config, const std::string& system,
                        double coordinate, const FciResult* reference);

/// Sweeps kappa/tau over `grid` at fixed mu, tau, delta.  The exact
/// reference is diagonalized once per grid point and shared by every
/// condition.  Grid points are dispatched to `config.threads` workers;
/// rows stream to `csv` (when given) in sweep order: grid-major,
/// condition-minor.  Errors when sites exceed the dense cap.
std::vector<RunRecord> run_ring_sweep(const RingParams& base, const std::vector<double>& grid,
                                      const std::vector<Condition>& conditions,
                                      const SweepConfig& config, std::ostream* csv = nullptr);

/// One molecular job from an FCIDUMP file.  The exact reference is computed
/// when the spin-orbital count stays within the dense cap and each record
/// then carries error columns.  n0 defaults to NELEC when the number
/// constraint is engaged without a value.
std::vector<RunRecord> run_fcidump_job(const std::string& path,
                                       const std::vector<Condition>& conditions,
                                       const SweepConfig& config, std::ostream* csv = nullptr);

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const RunRecord& rec);
void write_csv(std::ostream& out, const std::vector<RunRecord>& records);

/// Writes a gnuplot script next to csv_path (same stem, .gp) with energy
/// and log-error panels, one trace per condition name.
void write_plot_script(const std::string& csv_path, const std::vector<std::string>& conditions);

/// Writes the CSV to `csv_path` and, when `plot` is set, a sibling gnuplot
/// script (same stem, .gp extension) rendering energy and log-error panels.
/// The script is plain text and is never executed here.
void emit_outputs(const std::vector<RunRecord>& records, const std::string& csv_path, bool plot);

}  // namespace v2rdo
