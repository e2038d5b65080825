#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "v2rdo/driver.hpp"

namespace {

struct CommonArgs {
    std::vector<std::string> conditions;
    std::string p_mode = "up-to";
    double number_constraint = -1.0;
    bool number_constraint_set = false;
    double tol = 1e-7;
    long max_iter = 200000;
    int threads = 1;
    unsigned long seed = 0;
    int verbose = 0;
    std::string out;
    bool plot = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--condition", args.conditions,
                    "Condition to run, repeatable: 2_2, 2_3_partial, 2_3_full, fci "
                    "(default: fci 2_2 2_3_partial 2_3_full)")
        ->check(CLI::IsMember({"2_2", "2_3_partial", "2_3_full", "fci"}));
    cmd->add_option("--p-mode", args.p_mode, "Gram basis span: up-to (degrees 0..p) or exact (degree p only)")
        ->check(CLI::IsMember({"up-to", "exact"}))
        ->capture_default_str();
    cmd->add_option("--number-constraint", args.number_constraint,
                    "Engage the particle-number variance constraint at N0; "
                    "a negative value means the FCIDUMP NELEC");
    cmd->add_option("--tol", args.tol, "Solver stopping tolerance")->capture_default_str();
    cmd->add_option("--max-iter", args.max_iter, "Solver iteration cap")->capture_default_str();
    cmd->add_option("--threads", args.threads, "Worker pool size for grid points")
        ->capture_default_str();
    cmd->add_option("--seed", args.seed, "Reserved: seed for randomized utilities")
        ->capture_default_str();
    cmd->add_option("--verbose", args.verbose, "Print solver progress every N residual checks")
        ->capture_default_str();
    cmd->add_option("--out", args.out, "CSV output path (default: stdout)");
    cmd->add_flag("--plot", args.plot, "Also write a gnuplot script next to the CSV");
}

v2rdo::SweepConfig build_config(const CommonArgs& args, bool nc_given) {
    v2rdo::SweepConfig config;
    config.solver.tol = args.tol;
    config.solver.max_iter = args.max_iter;
    config.solver.verbose = args.verbose;
    config.exact_p = args.p_mode == "exact";
    config.threads = args.threads;
    config.seed = args.seed;
    if (nc_given) config.number_constraint = args.number_constraint;
    return config;
}

std::vector<v2rdo::Condition> build_conditions(const std::vector<std::string>& names) {
    std::vector<std::string> use = names;
    if (use.empty()) use = {"fci", "2_2", "2_3_partial", "2_3_full"};
    std::vector<v2rdo::Condition> out;
    out.reserve(use.size());
    for (const std::string& n : use) out.push_back(v2rdo::condition_from_name(n));
    return out;
}

std::vector<double> parse_grid(const std::string& spec) {
    const auto fail = [&spec]() {
        throw CLI::ValidationError("--kappa-grid", "expected start:stop:step, got '" + spec + "'");
    };
    std::vector<double> parts;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ':')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(tok, &used));
            if (used != tok.size()) fail();
        } catch (const CLI::ValidationError&) {
            throw;
        } catch (const std::exception&) {
            fail();
        }
    }
    if (parts.size() == 1) return {parts[0]};
    if (parts.size() != 3) fail();
    const double start = parts[0], stop = parts[1], step = parts[2];
    if (step <= 0.0) {
        if (start == stop) return {start};
        fail();
    }
    std::vector<double> grid;
    for (double x = start; x <= stop + 1e-9 * step; x += step) grid.push_back(x);
    if (grid.empty()) fail();
    return grid;
}

/// Streams rows to the chosen sink and finishes plot/summary output.
int finish_run(const std::function<std::vector<v2rdo::RunRecord>(std::ostream*)>& run,
               const CommonArgs& args) {
    std::vector<v2rdo::RunRecord> records;
    if (args.out.empty()) {
        records = run(&std::cout);
    } else {
        std::ofstream out(args.out);
        if (!out) {
            std::cerr << "error: cannot write " << args.out << "\n";
            return 1;
        }
        records = run(&out);
        std::cerr << "wrote " << records.size() << " rows to " << args.out << "\n";
    }
    if (args.plot) {
        if (args.out.empty()) {
            std::cerr << "warning: --plot needs --out, skipped\n";
        } else {
            std::vector<std::string> names;
            for (const auto& rec : records) {
                if (std::find(names.begin(), names.end(), rec.condition) == names.end()) {
                    names.push_back(rec.condition);
                }
            }
            v2rdo::write_plot_script(args.out, names);
            std::cerr << "wrote plot script next to " << args.out << "\n";
        }
    }
    const long failed = std::count_if(records.begin(), records.end(),
                                      [](const auto& r) { return !r.converged; });
    if (failed > 0) {
        std::cerr << "warning: " << failed << " of " << records.size()
                  << " rows did not converge\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Variational lower bounds on fermionic ground energies from "
                 "(2,p)-positivity conditions, with a dense exact reference"};
    app.require_subcommand(1);

    // ring: sweep the quartic ring model over kappa/tau.
    CommonArgs ring_args;
    v2rdo::RingParams ring_params;
    std::string grid_spec = "0:2:0.25";
    CLI::App* ring = app.add_subcommand("ring", "Sweep the quartic ring model over kappa/tau");
    ring->add_option("--r", ring_params.sites, "Ring sites")->capture_default_str();
    ring->add_option("--mu", ring_params.mu, "Chemical potential mu")->capture_default_str();
    ring->add_option("--tau", ring_params.tau, "Hopping tau")->capture_default_str();
    ring->add_option("--delta", ring_params.delta, "Pairing delta")->capture_default_str();
    ring->add_option("--kappa-grid", grid_spec, "kappa/tau grid as start:stop:step or a single value")
        ->capture_default_str();
    add_common(ring, ring_args);

    // fcidump: one molecular job.
    CommonArgs mol_args;
    std::string fcidump_path;
    CLI::App* mol = app.add_subcommand("fcidump", "Bound a molecular Hamiltonian from an FCIDUMP file");
    mol->add_option("path", fcidump_path, "FCIDUMP file")->required()->check(CLI::ExistingFile);
    add_common(mol, mol_args);

    // fci: exact diagonalization only.
    CommonArgs fci_args;
    v2rdo::RingParams fci_ring;
    std::string fci_fcidump;
    std::string fci_grid_spec = "0";
    CLI::App* fci = app.add_subcommand("fci", "Exact diagonalization without any bound");
    fci->add_option("--fcidump", fci_fcidump, "FCIDUMP file (otherwise the ring model is used)")
        ->check(CLI::ExistingFile);
    fci->add_option("--r", fci_ring.sites, "Ring sites")->capture_default_str();
    fci->add_option("--mu", fci_ring.mu, "Chemical potential mu")->capture_default_str();
    fci->add_option("--tau", fci_ring.tau, "Hopping tau")->capture_default_str();
    fci->add_option("--delta", fci_ring.delta, "Pairing delta")->capture_default_str();
    fci->add_option("--kappa-grid", fci_grid_spec, "kappa/tau grid as start:stop:step or a single value")
        ->capture_default_str();
    add_common(fci, fci_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (ring->parsed()) {
            const bool nc = ring->count("--number-constraint") > 0;
            const v2rdo::SweepConfig config = build_config(ring_args, nc);
            if (nc && ring_args.number_constraint < 0.0) {
                std::cerr << "error: the ring model has no NELEC default; give --number-constraint N0 >= 0\n";
                return 1;
            }
            const std::vector<double> grid = parse_grid(grid_spec);
            const auto conditions = build_conditions(ring_args.conditions);
            return finish_run(
                [&](std::ostream* os) {
                    return v2rdo::run_ring_sweep(ring_params, grid, conditions, config, os);
                },
                ring_args);
        }
        if (mol->parsed()) {
            const bool nc = mol->count("--number-constraint") > 0;
            const v2rdo::SweepConfig config = build_config(mol_args, nc);
            const auto conditions = build_conditions(mol_args.conditions);
            return finish_run(
                [&](std::ostream* os) {
                    return v2rdo::run_fcidump_job(fcidump_path, conditions, config, os);
                },
                mol_args);
        }
        // fci subcommand
        v2rdo::SweepConfig config = build_config(fci_args, false);
        const std::vector<v2rdo::Condition> only_fci{v2rdo::Condition::fci};
        if (!fci_fcidump.empty()) {
            return finish_run(
                [&](std::ostream* os) {
                    return v2rdo::run_fcidump_job(fci_fcidump, only_fci, config, os);
                },
                fci_args);
        }
        const std::vector<double> grid = parse_grid(fci_grid_spec);
        return finish_run(
            [&](std::ostream* os) {
                return v2rdo::run_ring_sweep(fci_ring, grid, only_fci, config, os);
            },
            fci_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
