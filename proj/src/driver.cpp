#include "v2rdo/driver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace v2rdo {

std::string condition_name(Condition c) {
    switch (c) {
        case Condition::c2_2: return "2_2";
        case Condition::c2_3_partial: return "2_3_partial";
        case Condition::c2_3_full: return "2_3_full";
        case Condition::fci: return "fci";
    }
    throw std::logic_error("condition_name: bad enum value");
}

Condition condition_from_name(const std::string& name) {
    if (name == "2_2") return Condition::c2_2;
    if (name == "2_3_partial") return Condition::c2_3_partial;
    if (name == "2_3_full") return Condition::c2_3_full;
    if (name == "fci") return Condition::fci;
    throw std::invalid_argument("unknown condition '" + name +
                                "' (expected 2_2, 2_3_partial, 2_3_full, or fci)");
}

double rdo_number_variance(const OperatorPoly& rdo, int orbitals) {
    const OperatorPoly n = number_operator(orbitals);
    const OperatorPoly n2 = n * n;
    cplx en{0.0, 0.0}, en2{0.0, 0.0};
    for (const auto& [mask, c] : n.terms) en += c * rdo.coeff(mask);
    for (const auto& [mask, c] : n2.terms) en2 += c * rdo.coeff(mask);
    return en2.real() - en.real() * en.real();
}

namespace {

GramBasis basis_for(Condition c, int rank, bool exact_p, bool parity_blocking) {
    switch (c) {
        case Condition::c2_2:
            return gram_basis(rank, 2, exact_p ? BasisMode::exact_p : BasisMode::up_to_p,
                              parity_blocking);
        case Condition::c2_3_partial:
            return gram_basis(rank, 3, BasisMode::partial_23, parity_blocking);
        case Condition::c2_3_full:
            return gram_basis(rank, 3, exact_p ? BasisMode::exact_p : BasisMode::up_to_p,
                              parity_blocking);
        case Condition::fci:
            break;
    }
    throw std::logic_error("basis_for: fci has no Gram basis");
}

}  // namespace

RunRecord run_condition(const OperatorPoly& hamiltonian, Condition condition,
                        const SweepConfig& config, const std::string& system,
                        double coordinate, const FciResult* reference) {
    RunRecord rec;
    rec.system = system;
    rec.condition = condition_name(condition);
    rec.coordinate = coordinate;
    if (reference != nullptr) rec.fci_energy = reference->energy;

    if (condition == Condition::fci) {
        if (reference == nullptr) {
            throw std::invalid_argument("run_condition: fci requested without a reference");
        }
        rec.energy = reference->energy;
        rec.error = 0.0;
        rec.n_variance = reference->n_variance;
        rec.converged = true;
        return rec;
    }

    ConstraintSystem sys =
        build_map(basis_for(condition, hamiltonian.rank, config.exact_p, config.parity_blocking));
    set_target(sys, hamiltonian);

    DualProblem prob;
    prob.system = &sys;
    prob.options = config.solver;
    if (config.number_constraint.has_value()) {
        prob.variance = VarianceMode::variable;
        prob.n0 = *config.number_constraint;
        set_variance(sys, prob.n0);
    }

    const DualSolution sol = solve_dual(prob);
    rec.energy = sol.energy;
    rec.lambda = sol.lambda;
    rec.iterations = sol.iterations;
    rec.gap = sol.gap;
    rec.primal_residual = sol.primal_residual;
    rec.dual_residual = sol.dual_residual;
    rec.wall_s = sol.wall_seconds;
    rec.converged = sol.converged;
    if (sol.converged) {
        const OperatorPoly rdo = extract_rdo(sol, sys);
        rec.n_variance = rdo_number_variance(rdo, hamiltonian.rank / 2);
        if (reference != nullptr) {
            rec.error = sol.energy - reference->energy;
            if (*rec.error != 0.0) rec.log10_abs_error = std::log10(std::abs(*rec.error));
        }
    }
    return rec;
}

namespace {

/// Runs `jobs` point closures on `threads` workers and flushes each point's
/// rows to `csv` in point order as soon as the prefix is complete.
std::vector<RunRecord> pooled_sweep(int npoints,
                                    const std::function<std::vector<RunRecord>(int)>& point_job,
                                    int threads, std::ostream* csv) {
    std::vector<std::vector<RunRecord>> per_point(npoints);
    std::vector<char> done(npoints, 0);
    std::vector<std::exception_ptr> errors(npoints);
    std::mutex mtx;
    std::condition_variable cv;
    std::atomic<int> next{0};

    const int nworkers = std::max(1, std::min(threads, npoints));
    const auto work = [&]() {
        while (true) {
            const int k = next.fetch_add(1);
            if (k >= npoints) break;
            std::vector<RunRecord> rows;
            std::exception_ptr err;
            try {
                rows = point_job(k);
            } catch (...) {
                err = std::current_exception();
            }
            {
                std::lock_guard<std::mutex> lock(mtx);
                per_point[k] = std::move(rows);
                errors[k] = err;
                done[k] = 1;
            }
            cv.notify_all();
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(nworkers);
    for (int t = 0; t < nworkers; ++t) pool.emplace_back(work);

    if (csv != nullptr) write_csv_header(*csv);
    std::vector<RunRecord> all;
    {
        std::unique_lock<std::mutex> lock(mtx);
        for (int k = 0; k < npoints; ++k) {
            cv.wait(lock, [&] { return done[k] == 1; });
            if (errors[k]) {
                lock.unlock();
                for (std::thread& t : pool) t.join();
                std::rethrow_exception(errors[k]);
            }
            for (const RunRecord& rec : per_point[k]) {
                if (csv != nullptr) {
                    write_csv_row(*csv, rec);
                    csv->flush();
                }
                all.push_back(rec);
            }
        }
    }
    for (std::thread& t : pool) t.join();
    return all;
}

}  // namespace

std::vector<RunRecord> run_ring_sweep(const RingParams& base, const std::vector<double>& grid,
                                      const std::vector<Condition>& conditions,
                                      const SweepConfig& config, std::ostream* csv) {
    if (conditions.empty()) throw std::invalid_argument("run_ring_sweep: no conditions");
    if (base.sites > kFockOrbitalCap) {
        throw std::invalid_argument("run_ring_sweep: " + std::to_string(base.sites) +
                                    " sites exceed the exact-reference cap");
    }
    const std::string system = "ring_r" + std::to_string(base.sites);

    const auto point_job = [&](int k) {
        RingParams params = base;
        params.kappa = grid[k] * base.tau;
        const OperatorPoly h = ring_hamiltonian(params);
        const auto t0 = std::chrono::steady_clock::now();
        const FciResult reference = fci_ground(h);
        const double ref_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::vector<RunRecord> rows;
        rows.reserve(conditions.size());
        for (Condition c : conditions) {
            rows.push_back(run_condition(h, c, config, system, grid[k], &reference));
            if (c == Condition::fci) rows.back().wall_s = ref_seconds;
        }
        return rows;
    };
    return pooled_sweep(static_cast<int>(grid.size()), point_job, config.threads, csv);
}

std::vector<RunRecord> run_fcidump_job(const std::string& path,
                                       const std::vector<Condition>& conditions,
                                       const SweepConfig& config, std::ostream* csv) {
    if (conditions.empty()) throw std::invalid_argument("run_fcidump_job: no conditions");
    const MolecularSystem mol = parse_fcidump_file(path);
    const OperatorPoly h = molecular_hamiltonian(mol);
    const int spin_orbitals = h.rank / 2;

    FciResult reference;
    bool have_reference = false;
    double ref_seconds = 0.0;
    if (spin_orbitals <= kFockOrbitalCap) {
        const auto t0 = std::chrono::steady_clock::now();
        reference = fci_ground(h);
        ref_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        have_reference = true;
    } else {
        std::fprintf(stderr,
                     "warning: %d spin orbitals exceed the dense cap of %d; no exact reference\n",
                     spin_orbitals, kFockOrbitalCap);
    }

    SweepConfig cfg = config;
    if (cfg.number_constraint.has_value() && *cfg.number_constraint < 0.0) {
        cfg.number_constraint = static_cast<double>(mol.n_electrons);
    }
    const std::string system = std::filesystem::path(path).stem().string();

    const auto point_job = [&](int) {
        std::vector<RunRecord> rows;
        rows.reserve(conditions.size());
        for (Condition c : conditions) {
            if (c == Condition::fci && !have_reference) {
                throw std::invalid_argument("fci condition requested but the system exceeds the dense cap");
            }
            rows.push_back(run_condition(h, c, cfg, system, 0.0,
                                         have_reference ? &reference : nullptr));
            if (c == Condition::fci) rows.back().wall_s = ref_seconds;
        }
        return rows;
    };
    return pooled_sweep(1, point_job, 1, csv);
}

namespace {

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void put_opt(std::ostream& out, const std::optional<double>& v) {
    if (v.has_value()) out << format_g17(*v);
}

}  // namespace

void write_csv_header(std::ostream& out) {
    out << "system,condition,coordinate,energy,fci_energy,error,log10_abs_error,"
           "n_variance,lambda,iterations,gap,primal_residual,dual_residual,wall_s,converged\n";
}

void write_csv_row(std::ostream& out, const RunRecord& rec) {
    out << rec.system << ',' << rec.condition << ',' << format_g17(rec.coordinate) << ','
        << format_g17(rec.energy) << ',';
    put_opt(out, rec.fci_energy);
    out << ',';
    put_opt(out, rec.error);
    out << ',';
    put_opt(out, rec.log10_abs_error);
    out << ',';
    put_opt(out, rec.n_variance);
    out << ',';
    put_opt(out, rec.lambda);
    out << ',';
    if (rec.iterations.has_value()) out << *rec.iterations;
    out << ',';
    put_opt(out, rec.gap);
    out << ',';
    put_opt(out, rec.primal_residual);
    out << ',';
    put_opt(out, rec.dual_residual);
    out << ',' << format_g17(rec.wall_s) << ',' << (rec.converged ? 1 : 0) << '\n';
}

void write_csv(std::ostream& out, const std::vector<RunRecord>& records) {
    write_csv_header(out);
    for (const RunRecord& rec : records) write_csv_row(out, rec);
}

void write_plot_script(const std::string& csv_path, const std::vector<std::string>& conditions) {
    std::filesystem::path p(csv_path);
    const std::string gp_path = p.replace_extension(".gp").string();
    const std::string png_path = p.replace_extension(".png").filename().string();
    const std::string csv_name = std::filesystem::path(csv_path).filename().string();
    std::ofstream gp(gp_path);
    if (!gp) throw std::runtime_error("cannot write gnuplot script: " + gp_path);
    gp << "# Render with: gnuplot " << std::filesystem::path(gp_path).filename().string() << "\n"
       << "set datafile separator ','\n"
       << "set terminal pngcairo size 1000,800\n"
       << "set output '" << png_path << "'\n"
       << "set multiplot layout 2,1\n"
       << "set key outside right\n"
       << "set xlabel 'coordinate'\n"
       << "set ylabel 'energy'\n"
       << "plot \\\n";
    for (std::size_t i = 0; i < conditions.size(); ++i) {
        gp << "  '" << csv_name << "' skip 1 using 3:(strcol(2) eq '" << conditions[i]
           << "' ? column(4) : NaN) with linespoints title '" << conditions[i] << "'"
           << (i + 1 < conditions.size() ? ", \\\n" : "\n");
    }
    gp << "set ylabel 'log10 |energy - fci|'\n"
       << "plot \\\n";
    bool first = true;
    for (const std::string& c : conditions) {
        if (c == "fci") continue;
        gp << (first ? "" : ", \\\n") << "  '" << csv_name << "' skip 1 using 3:(strcol(2) eq '"
           << c << "' ? column(7) : NaN) with linespoints title '" << c << "'";
        first = false;
    }
    gp << "\nunset multiplot\n";
}

void emit_outputs(const std::vector<RunRecord>& records, const std::string& csv_path, bool plot) {
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("cannot write CSV file: " + csv_path);
    write_csv(out, records);

    if (plot) {
        std::vector<std::string> conditions;
        for (const RunRecord& rec : records) {
            if (std::find(conditions.begin(), conditions.end(), rec.condition) == conditions.end()) {
                conditions.push_back(rec.condition);
            }
        }
        write_plot_script(csv_path, conditions);
    }
}

}  // namespace v2rdo
