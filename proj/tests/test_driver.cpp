#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "v2rdo/driver.hpp"
#include "v2rdo/fock.hpp"
#include "v2rdo/hamiltonians.hpp"
#include "v2rdo/majorana.hpp"

using namespace v2rdo;

namespace {

constexpr const char* kHeader =
    "system,condition,coordinate,energy,fci_energy,error,log10_abs_error,"
    "n_variance,lambda,iterations,gap,primal_residual,dual_residual,wall_s,converged";

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) rows.push_back(split_csv_line(line));
    return rows;
}

std::optional<double> cell_value(const std::string& cell) {
    if (cell.empty()) return std::nullopt;
    return std::stod(cell);
}

/// The ring benchmark at four sites: cheap enough for unit tests while
/// still exercising complex structure and a nontrivial bound.
OperatorPoly small_ring(double ratio) {
    RingParams rp;
    rp.sites = 4;
    rp.kappa = ratio * rp.tau;
    return ring_hamiltonian(rp);
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_SUITE("driver") {

TEST_CASE("condition names round-trip") {
    for (Condition c : {Condition::c2_2, Condition::c2_3_partial, Condition::c2_3_full,
                        Condition::fci}) {
        CHECK(condition_from_name(condition_name(c)) == c);
    }
    CHECK(condition_name(Condition::c2_3_partial) == "2_3_partial");
    CHECK_THROWS_WITH_AS(condition_from_name("2_4"), doctest::Contains("2_3_full"),
                         std::invalid_argument);
}

TEST_CASE("rdo number variance matches the pure-state moments") {
    const OperatorPoly h = small_ring(1.0);
    const FciResult g = fci_ground(h);

    // Populate a reduced operator with the exact state's expectations on
    // every monomial the variance contraction consults.
    const int orbitals = h.rank / 2;
    const OperatorPoly n = number_operator(orbitals);
    const OperatorPoly n2 = n * n;
    std::set<std::uint64_t> masks;
    for (const auto& [mask, c] : n.terms) masks.insert(mask);
    for (const auto& [mask, c] : n2.terms) masks.insert(mask);
    std::vector<MajoranaMonomial> monomials;
    for (std::uint64_t mask : masks) monomials.push_back({mask, h.rank});
    const std::vector<cplx> values = rdm_expectations(g.state, monomials);

    OperatorPoly rdo;
    rdo.rank = h.rank;
    for (std::size_t i = 0; i < monomials.size(); ++i) rdo.add_term(monomials[i].mask, values[i]);

    CHECK(std::abs(rdo_number_variance(rdo, orbitals) - g.n_variance) < 1e-10);
    CHECK(g.n_variance > 0.1);  // quartic regime: number-nonconserving ground state
}

TEST_CASE("run_condition reports the exact reference as its own row") {
    const OperatorPoly h = small_ring(0.5);
    const FciResult ref = fci_ground(h);
    SweepConfig config;

    RunRecord rec = run_condition(h, Condition::fci, config, "ring_r4", 0.5, &ref);
    CHECK(rec.system == "ring_r4");
    CHECK(rec.condition == "fci");
    CHECK(rec.coordinate == 0.5);
    CHECK(rec.energy == ref.energy);
    CHECK(rec.fci_energy.has_value());
    CHECK(*rec.fci_energy == ref.energy);
    CHECK(rec.error.has_value());
    CHECK(*rec.error == 0.0);
    CHECK_FALSE(rec.log10_abs_error.has_value());  // zero error has no log
    CHECK(rec.n_variance.has_value());
    CHECK(*rec.n_variance == ref.n_variance);
    CHECK_FALSE(rec.lambda.has_value());
    CHECK_FALSE(rec.iterations.has_value());
    CHECK_FALSE(rec.gap.has_value());
    CHECK(rec.converged);

    CHECK_THROWS_AS(run_condition(h, Condition::fci, config, "x", 0.0, nullptr),
                    std::invalid_argument);
}

TEST_CASE("run_condition solves a bound and fills the diagnostics") {
    const OperatorPoly h = small_ring(0.25);
    const FciResult ref = fci_ground(h);
    SweepConfig config;

    RunRecord rec = run_condition(h, Condition::c2_2, config, "ring_r4", 0.25, &ref);
    CHECK(rec.converged);
    CHECK(rec.energy <= ref.energy + 1e-6);  // lower bound
    REQUIRE(rec.error.has_value());
    CHECK(*rec.error == rec.energy - ref.energy);
    if (*rec.error != 0.0) {
        REQUIRE(rec.log10_abs_error.has_value());
        CHECK(*rec.log10_abs_error == std::log10(std::abs(*rec.error)));
    }
    REQUIRE(rec.n_variance.has_value());
    REQUIRE(rec.iterations.has_value());
    CHECK(*rec.iterations > 0);
    REQUIRE(rec.gap.has_value());
    REQUIRE(rec.primal_residual.has_value());
    REQUIRE(rec.dual_residual.has_value());
    CHECK(std::max({*rec.gap, *rec.primal_residual, *rec.dual_residual}) < config.solver.tol);
    CHECK_FALSE((rec.lambda.has_value() && config.number_constraint.has_value()));
    CHECK(rec.wall_s > 0.0);
}

TEST_CASE("ring sweep streams rows in grid-major, condition-minor order") {
    RingParams base;
    base.sites = 4;
    const std::vector<double> grid{0.0, 1.0};
    const std::vector<Condition> conditions{Condition::fci, Condition::c2_2};
    SweepConfig config;

    std::ostringstream csv;
    const std::vector<RunRecord> records = run_ring_sweep(base, grid, conditions, config, &csv);

    REQUIRE(records.size() == 4);
    CHECK(records[0].condition == "fci");
    CHECK(records[0].coordinate == 0.0);
    CHECK(records[1].condition == "2_2");
    CHECK(records[1].coordinate == 0.0);
    CHECK(records[2].condition == "fci");
    CHECK(records[2].coordinate == 1.0);
    CHECK(records[3].condition == "2_2");
    CHECK(records[3].coordinate == 1.0);
    for (const RunRecord& rec : records) {
        CHECK(rec.system == "ring_r4");
        CHECK(rec.converged);
        CHECK(rec.wall_s > 0.0);  // exact rows carry the diagonalization time
    }

    const auto rows = parse_csv(csv.str());
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] == split_csv_line(kHeader));
    for (std::size_t i = 0; i < records.size(); ++i) {
        REQUIRE(rows[i + 1].size() == 15);
        CHECK(rows[i + 1][0] == records[i].system);
        CHECK(rows[i + 1][1] == records[i].condition);
    }

    SUBCASE("numeric fields survive the 17-digit round trip exactly") {
        for (std::size_t i = 0; i < records.size(); ++i) {
            const auto& cells = rows[i + 1];
            CHECK(std::stod(cells[2]) == records[i].coordinate);
            CHECK(std::stod(cells[3]) == records[i].energy);
            CHECK(cell_value(cells[4]) == records[i].fci_energy);
            CHECK(cell_value(cells[5]) == records[i].error);
            CHECK(cell_value(cells[6]) == records[i].log10_abs_error);
            CHECK(cell_value(cells[7]) == records[i].n_variance);
            CHECK(cell_value(cells[8]) == records[i].lambda);
            if (records[i].iterations.has_value()) {
                CHECK(std::stol(cells[9]) == *records[i].iterations);
            } else {
                CHECK(cells[9].empty());
            }
            CHECK(cell_value(cells[10]) == records[i].gap);
            CHECK(cell_value(cells[11]) == records[i].primal_residual);
            CHECK(cell_value(cells[12]) == records[i].dual_residual);
            CHECK(std::stod(cells[13]) == records[i].wall_s);
            CHECK(cells[14] == (records[i].converged ? "1" : "0"));
        }
    }

    SUBCASE("single-threaded reruns are byte-identical apart from wall times") {
        std::ostringstream again;
        const std::vector<RunRecord> rerun = run_ring_sweep(base, grid, conditions, config, &again);
        REQUIRE(rerun.size() == records.size());
        for (std::size_t i = 0; i < records.size(); ++i) {
            CHECK(rerun[i].energy == records[i].energy);
            CHECK(rerun[i].iterations == records[i].iterations);
            CHECK(rerun[i].gap == records[i].gap);
            CHECK(rerun[i].n_variance == records[i].n_variance);
        }
    }

    SUBCASE("a worker pool changes wall times only") {
        SweepConfig pooled = config;
        pooled.threads = 2;
        const std::vector<RunRecord> par = run_ring_sweep(base, grid, conditions, pooled, nullptr);
        REQUIRE(par.size() == records.size());
        for (std::size_t i = 0; i < records.size(); ++i) {
            CHECK(par[i].condition == records[i].condition);
            CHECK(par[i].coordinate == records[i].coordinate);
            CHECK(par[i].energy == records[i].energy);
            CHECK(par[i].iterations == records[i].iterations);
            CHECK(par[i].n_variance == records[i].n_variance);
        }
    }
}

TEST_CASE("an empty grid produces empty output, not an error") {
    RingParams base;
    base.sites = 4;
    std::ostringstream csv;
    const std::vector<RunRecord> records =
        run_ring_sweep(base, {}, {Condition::fci}, SweepConfig{}, &csv);
    CHECK(records.empty());
    CHECK(csv.str() == std::string(kHeader) + "\n");  // header-only CSV
}

TEST_CASE("sweep guards") {
    RingParams big;
    big.sites = 15;  // beyond the dense exact-reference cap
    CHECK_THROWS_AS(run_ring_sweep(big, {0.0}, {Condition::fci}, SweepConfig{}, nullptr),
                    std::invalid_argument);
    RingParams base;
    base.sites = 4;
    CHECK_THROWS_AS(run_ring_sweep(base, {0.0}, {}, SweepConfig{}, nullptr),
                    std::invalid_argument);
}

TEST_CASE("non-converged rows keep the schema with empty error fields") {
    RunRecord rec;
    rec.system = "x";
    rec.condition = "2_2";
    rec.coordinate = 0.25;
    rec.energy = -1.25;
    rec.converged = false;
    std::ostringstream out;
    write_csv_row(out, rec);
    CHECK(out.str() == "x,2_2,0.25,-1.25,,,,,,,,,,0,0\n");

    std::ostringstream full;
    write_csv(full, {rec});
    CHECK(full.str() == std::string(kHeader) + "\n" + out.str());
}

TEST_CASE("plot script references the CSV by name with one trace per condition") {
    const std::string csv_path = temp_path("v2rdo_driver_test.csv");
    const std::string gp_path = temp_path("v2rdo_driver_test.gp");

    RunRecord a;
    a.system = "ring_r4";
    a.condition = "fci";
    a.energy = -1.0;
    a.converged = true;
    RunRecord b = a;
    b.condition = "2_2";
    emit_outputs({a, b}, csv_path, true);

    REQUIRE(std::filesystem::exists(csv_path));
    REQUIRE(std::filesystem::exists(gp_path));

    std::ifstream csv_in(csv_path);
    std::string header;
    std::getline(csv_in, header);
    CHECK(header == kHeader);

    std::ifstream gp_in(gp_path);
    std::stringstream gp;
    gp << gp_in.rdbuf();
    const std::string script = gp.str();
    CHECK(script.find("set datafile separator ','") != std::string::npos);
    CHECK(script.find("v2rdo_driver_test.csv") != std::string::npos);
    CHECK(script.find("title 'fci'") != std::string::npos);
    CHECK(script.find("title '2_2'") != std::string::npos);
    // The log-error panel plots bound conditions only; with one bound
    // condition there is exactly one column(7) trace.
    std::size_t log_traces = 0;
    for (std::size_t pos = script.find("column(7)"); pos != std::string::npos;
         pos = script.find("column(7)", pos + 1)) {
        ++log_traces;
    }
    CHECK(log_traces == 1);

    std::filesystem::remove(csv_path);
    std::filesystem::remove(gp_path);
}

TEST_CASE("fcidump job honors the electron-count default for the number constraint") {
    // A single-orbital atom with positive on-site energy: the global ground
    // state is the vacuum, so the two-electron answer is reachable only
    // through the number constraint.
    const std::string path = temp_path("v2rdo_atom_test.fcidump");
    {
        std::ofstream out(path);
        out << "&FCI NORB=1,NELEC=2,MS2=0,\n"
               " /\n"
               " 1.0 1 1 1 1\n"
               " 0.3 1 1 0 0\n";
    }
    const double e_global = 0.0;
    const double e_two = 2 * 0.3 + 1.0;

    SweepConfig config;
    const std::vector<RunRecord> plain =
        run_fcidump_job(path, {Condition::fci, Condition::c2_2}, config, nullptr);
    REQUIRE(plain.size() == 2);
    CHECK(plain[0].system == "v2rdo_atom_test");
    CHECK(std::abs(plain[0].energy - e_global) < 1e-9);
    CHECK(plain[0].wall_s > 0.0);
    CHECK(plain[1].converged);
    CHECK(plain[1].energy <= e_global + 1e-6);
    CHECK_FALSE((plain[1].lambda.has_value() && *plain[1].lambda != 0.0));

    SweepConfig constrained = config;
    constrained.number_constraint = -1.0;  // sentinel: use NELEC from the file
    const std::vector<RunRecord> sel =
        run_fcidump_job(path, {Condition::c2_2}, constrained, nullptr);
    REQUIRE(sel.size() == 1);
    CHECK(sel[0].converged);
    REQUIRE(sel[0].lambda.has_value());
    CHECK(*sel[0].lambda >= 0.0);
    CHECK(std::abs(sel[0].energy - e_two) < 1e-6);     // selected-sector energy, exactly
    CHECK(sel[0].energy >= plain[1].energy - 1e-6);    // constraint only tightens
    CHECK(sel[0].energy > e_global + 0.05);            // and it genuinely selects the sector
    REQUIRE(sel[0].n_variance.has_value());
    CHECK(std::abs(*sel[0].n_variance) < 1e-6);        // complementarity at convergence

    CHECK_THROWS_AS(run_fcidump_job(path, {}, config, nullptr), std::invalid_argument);
    std::filesystem::remove(path);
}

}  // TEST_SUITE
