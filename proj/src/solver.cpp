#include "v2rdo/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace v2rdo {

namespace {

template <class Mat>
void psd_core(Mat& m, Eigen::SelfAdjointEigenSolver<Mat>& es) {
    es.compute(m);
    // The tridiagonal QL sweep can stall on tightly clustered spectra; a
    // diagonal nudge below working precision separates the cluster without
    // moving the projection measurably.
    for (int attempt = 0; es.info() != Eigen::Success && attempt < 3; ++attempt) {
        const double eps = std::max(m.cwiseAbs().maxCoeff(), 1.0) * 1e-14 * (1 << attempt);
        Mat jittered = m;
        jittered.diagonal().array() += eps;
        es.compute(jittered);
    }
    if (es.info() != Eigen::Success) throw std::runtime_error("psd projection: eigensolver failed");
    m.noalias() = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).asDiagonal() *
                  es.eigenvectors().adjoint();
}

template <class S>
struct ScalarOps;

template <>
struct ScalarOps<double> {
    using Mat = Eigen::MatrixXd;
    using Vec = Eigen::VectorXd;
    static double re(double x) { return x; }
    static cplx to_cplx(double x) { return {x, 0.0}; }
    static double from_cplx(cplx x) { return x.real(); }
};

template <>
struct ScalarOps<cplx> {
    using Mat = Eigen::MatrixXcd;
    using Vec = Eigen::VectorXcd;
    static double re(cplx x) { return x.real(); }
    static cplx to_cplx(cplx x) { return x; }
    static cplx from_cplx(cplx x) { return x; }
};

/// The scaled active constraint set: rows normalized to unit coefficient
/// norm (which makes the map an isometry row-wise and bounds the projected
/// gradient step at 1/rho), entries in CSR with weights folded by the row
/// scale.  Rows that are identically satisfied are left out; in the real
/// path that covers every anti-Hermitian-signed row of a real target.
template <class S>
struct Active {
    using Vec = typename ScalarOps<S>::Vec;

    std::vector<int> dims;
    int n = 0;
    std::vector<int> sys_row;
    Eigen::VectorXd scale;
    Vec h;
    Vec v;
    double v_id = 0.0;      // scaled variance coefficient at the identity row
    double v_sq = 0.0;      // squared norm of the scaled variance vector
    double h_norm = 0.0;
    int id_row = -1;
    bool variance = false;

    std::vector<std::int64_t> rptr;
    std::vector<int> eblk;
    std::vector<std::int64_t> epos;
    std::vector<double> ew;
};

template <class S>
Active<S> compile_active(const ConstraintSystem& sys, bool variance, bool real_path) {
    Active<S> act;
    act.variance = variance;
    for (const GramBlock& b : sys.basis.blocks) act.dims.push_back(b.dim());

    std::vector<int> picked;
    std::vector<double> scales;
    for (int r = 0; r < static_cast<int>(sys.rows.size()); ++r) {
        const ConstraintRow& row = sys.rows[r];
        if (real_path && row.adj_sign == -1) continue;
        const double habs = std::abs(sys.h(r));
        const double vval = variance ? sys.v(r) : 0.0;
        if (row.entries.empty()) {
            if (habs == 0.0 && vval == 0.0) continue;
            if (vval == 0.0) {
                throw std::invalid_argument("solve_dual: target monomial " +
                                            monomial_label(row.mask) +
                                            " is unreachable under this condition");
            }
            picked.push_back(r);
            scales.push_back(1.0);
            continue;
        }
        double norm_sq = 0.0;
        for (const ConstraintEntry& e : row.entries) norm_sq += e.weight * e.weight;
        picked.push_back(r);
        scales.push_back(1.0 / std::sqrt(norm_sq));
    }

    act.n = static_cast<int>(picked.size());
    act.sys_row = picked;
    act.scale = Eigen::Map<const Eigen::VectorXd>(scales.data(), act.n);
    act.h.resize(act.n);
    act.v.resize(act.n);
    act.rptr.assign(1, 0);

    std::vector<std::int64_t> block_base(act.dims.size(), 0);
    for (int i = 0; i < act.n; ++i) {
        const ConstraintRow& row = sys.rows[picked[i]];
        const double c = scales[i];
        act.h(i) = ScalarOps<S>::from_cplx(c * sys.h(picked[i]));
        // The certificate is H - E + lambda (N - n0)^2: the variance column
        // enters negated, so lambda >= 0 penalizes the off-sector spectrum
        // and maximizing E drives the primal variance to zero.
        act.v(i) = ScalarOps<S>::from_cplx(cplx{-c * (variance ? sys.v(picked[i]) : 0.0), 0.0});
        for (const ConstraintEntry& e : row.entries) {
            act.eblk.push_back(e.block);
            act.epos.push_back(static_cast<std::int64_t>(e.i) +
                               static_cast<std::int64_t>(e.j) * act.dims[e.block]);
            act.ew.push_back(c * e.weight);
        }
        act.rptr.push_back(static_cast<std::int64_t>(act.ew.size()));
        if (picked[i] == sys.identity_row) act.id_row = i;
    }
    if (act.id_row < 0) throw std::logic_error("solve_dual: identity row missing from active set");

    act.v_id = ScalarOps<S>::re(act.v(act.id_row));
    act.v_sq = act.v.squaredNorm();
    act.h_norm = act.h.norm();
    return act;
}

template <class S>
DualSolution run_iteration(const ConstraintSystem& sys, const Active<S>& act,
                           const SolverOptions& o, bool real_path) {
    using Ops = ScalarOps<S>;
    using Mat = typename Ops::Mat;
    using Vec = typename Ops::Vec;

    const int nb = static_cast<int>(act.dims.size());
    std::vector<Mat> X(nb), G(nb);
    std::vector<Eigen::SelfAdjointEigenSolver<Mat>> es;
    es.reserve(nb);
    for (int b = 0; b < nb; ++b) {
        X[b] = Mat::Zero(act.dims[b], act.dims[b]);
        G[b] = X[b];
        es.emplace_back(std::max(act.dims[b], 1));
    }

    Vec u = Vec::Zero(act.n), u_old = u, y = Vec::Zero(act.n), w(act.n), d(act.n), g(act.n);
    double energy = 0.0, lambda = 0.0, rho = o.rho;
    const double s_id = act.scale(act.id_row);
    const double a11 = s_id * s_id;

    struct Snapshot {
        std::vector<Mat> X;
        Vec y;
        double energy = 0.0, lambda = 0.0;
        double rp = 0.0, rd = 0.0, gap = 0.0;
        double score = std::numeric_limits<double>::infinity();
        long it = 0;
    } best;

    double rp = 0.0, rd = 0.0, gap = 0.0;
    bool converged = false;
    long it = 0;

    const auto apply_map = [&](Vec& out) {
        for (int r = 0; r < act.n; ++r) {
            S acc{};
            for (std::int64_t e = act.rptr[r]; e < act.rptr[r + 1]; ++e) {
                acc += act.ew[e] * X[act.eblk[e]].data()[act.epos[e]];
            }
            out(r) = acc;
        }
    };

    while (it < o.max_iter) {
        ++it;
        u_old = u;
        w = u - act.h + y / rho;

        // Scalar block: stationarity of the augmented Lagrangian in (E, lambda),
        // with lambda clamped at zero.
        const double b1 = 1.0 / rho - s_id * Ops::re(w(act.id_row));
        if (act.variance) {
            const double a12 = s_id * act.v_id;
            const double a22 = act.v_sq;
            const double b2 = -Ops::re(act.v.dot(w));
            const double det = a11 * a22 - a12 * a12;
            if (det > 1e-14 * (a11 * a22 + 1e-300)) {
                energy = (b1 * a22 - a12 * b2) / det;
                lambda = (a11 * b2 - a12 * b1) / det;
                if (lambda < 0.0) {
                    lambda = 0.0;
                    energy = b1 / a11;
                }
            } else {
                lambda = 0.0;
                energy = b1 / a11;
            }
        } else {
            energy = b1 / a11;
        }

        // Gram block: projected gradient step.  The scatter of the shifted
        // residual is the adjoint map, Hermitian by the pairing symmetry of
        // the entry table, so the spectral projection may consume it directly.
        d = w;
        d(act.id_row) += energy * s_id;
        if (act.variance) d += lambda * act.v;
        for (int b = 0; b < nb; ++b) G[b].setZero();
        for (int r = 0; r < act.n; ++r) {
            const S t = d(r);
            for (std::int64_t e = act.rptr[r]; e < act.rptr[r + 1]; ++e) {
                G[act.eblk[e]].data()[act.epos[e]] += act.ew[e] * t;
            }
        }
        for (int b = 0; b < nb; ++b) {
            if (act.dims[b] == 0) continue;
            X[b] -= G[b];
            psd_core(X[b], es[b]);
        }

        // Multiplier ascent on the fresh residual.
        apply_map(u);
        g = u - act.h;
        g(act.id_row) += energy * s_id;
        if (act.variance) g += lambda * act.v;
        y += rho * g;

        if (it % o.check_every == 0 || it == o.max_iter) {
            rp = g.norm() / (1.0 + act.h_norm);
            rd = rho * (u - u_old).norm() / (1.0 + y.norm());
            // Dual pairing of the row data with the multipliers; rows carrying
            // imaginary data (adjoint sign -1) pair through the conjugate.
            const double pobj = Ops::re(act.h.dot(y)) - lambda * Ops::re(act.v.dot(y));
            gap = std::abs(pobj - energy) / (1.0 + std::abs(energy));
            const double score = std::max({rp, rd, gap});

            if (o.verbose > 0 && (it / o.check_every) % o.verbose == 0) {
                std::fprintf(stderr,
                             "  it %8ld  E % .12f  lam % .3e  rp %.3e  rd %.3e  gap %.3e  rho %.2e\n",
                             it, energy, lambda, rp, rd, gap, rho);
            }
            if (score < best.score) {
                best.X = X;
                best.y = y;
                best.energy = energy;
                best.lambda = lambda;
                best.rp = rp;
                best.rd = rd;
                best.gap = gap;
                best.score = score;
                best.it = it;
            }
            if (score < o.tol) {
                converged = true;
                break;
            }
            if (it > 10000 && score > 1e4 && score > 1e6 * best.score) {
                throw std::runtime_error(
                    "solve_dual: iteration diverged (primal residual " + std::to_string(rp) +
                    "); the condition is likely infeasible for this target");
            }
            // Rebalance only while the residuals are informative; at noise
            // level the ratio is meaningless and would ratchet the penalty.
            if (it % o.adapt_every == 0 && std::max(rp, rd) > o.tol) {
                if (rp > o.balance_ratio * rd) {
                    rho = std::min(rho * o.balance_scale, o.rho_max);
                } else if (rd > o.balance_ratio * rp) {
                    rho = std::max(rho / o.balance_scale, o.rho_min);
                }
            }
        }
    }

    if (!converged && best.score < std::numeric_limits<double>::infinity()) {
        X = best.X;
        y = best.y;
        energy = best.energy;
        lambda = best.lambda;
        rp = best.rp;
        rd = best.rd;
        gap = best.gap;
    }

    DualSolution sol;
    sol.energy = energy;
    sol.lambda = lambda;
    sol.iterations = it;
    sol.primal_residual = rp;
    sol.dual_residual = rd;
    sol.gap = gap;
    sol.converged = converged;
    sol.real_path = real_path;
    sol.gram.reserve(nb);
    sol.min_gram_eig = 0.0;
    for (int b = 0; b < nb; ++b) {
        if constexpr (std::is_same_v<S, double>) {
            sol.gram.push_back(X[b].template cast<cplx>());
        } else {
            sol.gram.push_back(X[b]);
        }
        if (act.dims[b] > 0) {
            es[b].compute(X[b], Eigen::EigenvaluesOnly);
            sol.min_gram_eig = std::min(sol.min_gram_eig, es[b].eigenvalues().minCoeff());
        }
    }
    sol.y = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(sys.rows.size()));
    for (int r = 0; r < act.n; ++r) {
        sol.y(act.sys_row[r]) = act.scale(r) * Ops::to_cplx(y(r));
    }
    return sol;
}

}  // namespace

Eigen::MatrixXcd psd_project(const Eigen::MatrixXcd& m, double hermiticity_tol) {
    if (m.rows() != m.cols()) throw std::invalid_argument("psd_project: matrix is not square");
    if (m.size() == 0) return m;
    const double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (dev > hermiticity_tol) {
        throw std::invalid_argument("psd_project: input deviates from Hermitian by " +
                                    std::to_string(dev));
    }
    Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es;
    psd_core(h, es);
    return h;
}

DualSolution solve_dual(const DualProblem& problem) {
    if (problem.system == nullptr) throw std::invalid_argument("solve_dual: no constraint system");
    const ConstraintSystem& sys = *problem.system;
    if (!sys.has_target) throw std::invalid_argument("solve_dual: target Hamiltonian is unset");
    const bool variance = problem.variance == VarianceMode::variable;
    if (variance && !sys.has_variance) {
        throw std::invalid_argument("solve_dual: variance vector is unset in variable mode");
    }

    // A real-coefficient Hermitian target touches only Hermitian-signed rows,
    // and a real symmetric Gram factor then suffices: the anti-Hermitian rows
    // vanish identically on symmetric matrices.
    bool real_ok = !problem.options.force_complex;
    const double href = 1.0 + sys.h.cwiseAbs().maxCoeff();
    for (int r = 0; real_ok && r < static_cast<int>(sys.rows.size()); ++r) {
        if (sys.rows[r].adj_sign == 1) {
            if (std::abs(sys.h(r).imag()) > 1e-13 * href) real_ok = false;
        } else {
            if (std::abs(sys.h(r)) > 1e-13 * href) real_ok = false;
        }
    }

    const auto t0 = std::chrono::steady_clock::now();
    DualSolution sol;
    if (real_ok) {
        const Active<double> act = compile_active<double>(sys, variance, true);
        sol = run_iteration<double>(sys, act, problem.options, true);
    } else {
        const Active<cplx> act = compile_active<cplx>(sys, variance, false);
        sol = run_iteration<cplx>(sys, act, problem.options, false);
    }
    sol.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sol;
}

OperatorPoly extract_rdo(const DualSolution& sol, const ConstraintSystem& sys) {
    if (!sol.converged) {
        throw std::invalid_argument("extract_rdo: solution did not converge; multipliers are not a 2-RDO");
    }
    const cplx y_id = sol.y(sys.identity_row);
    if (std::abs(y_id) < 0.5) {
        throw std::invalid_argument("extract_rdo: identity multiplier " + std::to_string(std::abs(y_id)) +
                                 " is far from 1; stationarity violated");
    }
    OperatorPoly rdo;
    rdo.rank = sys.rank;
    for (int r = 0; r < sys.n_kept; ++r) {
        // The multiplier pairs with the row data through the conjugate, so it
        // converges to <m^dag>; conjugating reports expectations of m itself.
        rdo.add_term(sys.rows[r].mask, std::conj(sol.y(r) / y_id));
    }
    return rdo;
}

cplx rdm_element(const OperatorPoly& rdo, const FermionString& gamma) {
    const OperatorPoly expanded = from_fermion_string(gamma, rdo.rank);
    cplx acc{0.0, 0.0};
    for (const auto& [mask, c] : expanded.terms) {
        if (std::popcount(mask) > 4) {
            throw std::invalid_argument("rdm_element: string expands beyond two-body order");
        }
        acc += c * rdo.coeff(mask);
    }
    return acc;
}

}  // namespace v2rdo
