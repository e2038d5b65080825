#include "v2rdo/constraints.hpp"

#include <algorithm>
#include <stdexcept>

namespace v2rdo {

int GramBasis::total_monomials() const {
    int n = 0;
    for (const GramBlock& b : blocks) n += b.dim();
    return n;
}

namespace {

/// All masks over `bits` generators with the given popcount, ascending.
std::vector<std::uint64_t> masks_of_degree(int bits, int degree) {
    std::vector<std::uint64_t> out;
    if (degree == 0) {
        out.push_back(0);
        return out;
    }
    if (degree > bits) return out;
    // Gosper's hack walks fixed-popcount masks in increasing order.
    std::uint64_t m = (std::uint64_t{1} << degree) - 1;
    const std::uint64_t limit = std::uint64_t{1} << bits;
    while (m < limit) {
        out.push_back(m);
        const std::uint64_t c = m & (~m + 1);
        const std::uint64_t r = m + c;
        m = (((r ^ m) >> 2) / c) | r;
    }
    return out;
}

std::vector<MajoranaMonomial> monomials_up_to(int rank, int lo, int hi) {
    std::vector<MajoranaMonomial> out;
    for (int d = lo; d <= hi; ++d) {
        for (std::uint64_t mask : masks_of_degree(rank, d)) out.push_back({mask, rank});
    }
    return out;
}

void split_by_parity(const GramBlock& block, std::vector<GramBlock>& out) {
    GramBlock even{block.kind, {}};
    GramBlock odd{block.kind, {}};
    for (const MajoranaMonomial& m : block.monomials) {
        (m.degree() % 2 == 0 ? even : odd).monomials.push_back(m);
    }
    if (!even.monomials.empty()) out.push_back(std::move(even));
    if (!odd.monomials.empty()) out.push_back(std::move(odd));
}

}  // namespace

GramBasis gram_basis(int rank, int p, BasisMode mode, bool parity_blocking,
                     std::size_t basis_cap) {
    if (rank <= 0 || rank % 2 != 0 || rank > 64) {
        throw std::invalid_argument("gram_basis: rank must be a positive even generator count <= 64");
    }
    if (p < 1) throw std::invalid_argument("gram_basis: p must be at least 1");
    if (mode == BasisMode::partial_23 && p != 3) {
        throw std::invalid_argument("gram_basis: partial_23 is defined for p == 3");
    }

    GramBasis basis;
    basis.rank = rank;
    basis.p = p;
    basis.mode = mode;
    basis.parity_blocking = parity_blocking;

    std::vector<GramBlock> raw;
    switch (mode) {
        case BasisMode::up_to_p:
            raw.push_back({BlockKind::gram, monomials_up_to(rank, 0, p)});
            break;
        case BasisMode::exact_p:
            raw.push_back({BlockKind::gram, monomials_up_to(rank, p, p)});
            break;
        case BasisMode::partial_23:
            raw.push_back({BlockKind::gram, monomials_up_to(rank, 0, 2)});
            raw.push_back({BlockKind::anticommutator, monomials_up_to(rank, 3, 3)});
            break;
    }

    for (const GramBlock& b : raw) {
        if (parity_blocking) {
            split_by_parity(b, basis.blocks);
        } else if (!b.monomials.empty()) {
            basis.blocks.push_back(b);
        }
    }

    const int total = basis.total_monomials();
    if (static_cast<std::size_t>(total) > basis_cap) {
        throw std::runtime_error("gram_basis: basis size " + std::to_string(total) +
                                 " exceeds cap " + std::to_string(basis_cap));
    }
    return basis;
}

ConstraintSystem build_map(const GramBasis& basis) {
    ConstraintSystem sys;
    sys.rank = basis.rank;
    sys.basis = basis;

    // Kept rows span the whole two-body space regardless of reachability:
    // unreachable kept monomials become explicit zero rows against the target.
    struct RowAccum {
        bool kept = false;
        std::vector<ConstraintEntry> entries;
    };
    std::unordered_map<std::uint64_t, RowAccum> accum;
    for (const MajoranaMonomial& m : monomials_up_to(basis.rank, 0, std::min(4, basis.rank))) {
        accum[m.mask].kept = true;
    }

    for (int b = 0; b < static_cast<int>(basis.blocks.size()); ++b) {
        const GramBlock& block = basis.blocks[b];
        const int n = block.dim();
        for (int i = 0; i < n; ++i) {
            const MajoranaMonomial& ma = block.monomials[i];
            for (int j = 0; j < n; ++j) {
                const MajoranaMonomial& mb = block.monomials[j];
                const auto prod = monomial_product(ma, mb);
                // m_a m_b^dag = s(m_b) * sign(m_a m_b) * monomial(a XOR b).
                double w = static_cast<double>(adjoint_sign(mb.mask) * prod.sign);
                if (block.kind == BlockKind::anticommutator) {
                    // Adding m_b^dag m_a contributes s(m_b) sign(m_b m_a) on
                    // the same mask; entries cancel unless the generator
                    // overlap keeps both terms aligned.
                    const auto rev = monomial_product(mb, ma);
                    w += static_cast<double>(adjoint_sign(mb.mask) * rev.sign);
                    if (w == 0.0) continue;
                }
                RowAccum& row = accum[prod.monomial.mask];
                row.entries.push_back({b, i, j, w});
            }
        }
    }

    std::vector<std::uint64_t> kept_masks;
    std::vector<std::uint64_t> forbidden_masks;
    for (const auto& [mask, row] : accum) {
        (row.kept ? kept_masks : forbidden_masks).push_back(mask);
    }
    const auto order = [](std::uint64_t a, std::uint64_t b) {
        const int da = std::popcount(a), db = std::popcount(b);
        return da != db ? da < db : a < b;
    };
    std::sort(kept_masks.begin(), kept_masks.end(), order);
    std::sort(forbidden_masks.begin(), forbidden_masks.end(), order);

    sys.n_kept = static_cast<int>(kept_masks.size());
    sys.rows.reserve(accum.size());
    const auto emit = [&](std::uint64_t mask) {
        ConstraintRow row;
        row.mask = mask;
        row.degree = std::popcount(mask);
        row.kept = accum[mask].kept;
        row.adj_sign = adjoint_sign(mask);
        row.entries = std::move(accum[mask].entries);
        sys.row_index.emplace(mask, static_cast<int>(sys.rows.size()));
        sys.rows.push_back(std::move(row));
    };
    for (std::uint64_t mask : kept_masks) emit(mask);
    for (std::uint64_t mask : forbidden_masks) emit(mask);

    sys.identity_row = sys.row_index.at(0);
    sys.h = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(sys.rows.size()));
    sys.v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sys.rows.size()));
    return sys;
}

OperatorPoly variance_operator(int rank, double n0) {
    if (rank <= 0 || rank % 2 != 0) {
        throw std::invalid_argument("variance_operator: rank must be a positive even generator count");
    }
    const int r = rank / 2;
    OperatorPoly n_op = identity_op(rank);
    n_op.terms[0] = cplx{r / 2.0 - n0, 0.0};
    for (int i = 1; i <= r; ++i) {
        const std::uint64_t mask = std::uint64_t{0b11} << (2 * (i - 1));
        n_op.add_term(mask, cplx{0.5, 0.0});
    }
    return op_product(n_op, n_op);
}

Eigen::VectorXcd coefficient_vector(const OperatorPoly& a, const ConstraintSystem& sys) {
    if (a.rank != sys.rank) {
        throw std::invalid_argument("coefficient_vector: rank mismatch");
    }
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(sys.rows.size()));
    for (const auto& [mask, c] : a.terms) {
        const auto it = sys.row_index.find(mask);
        if (it == sys.row_index.end() || !sys.rows[it->second].kept) {
            throw std::invalid_argument("coefficient_vector: " + monomial_label(mask) +
                                        " (degree " + std::to_string(std::popcount(mask)) +
                                        ") is not a two-body monomial of this system");
        }
        out(it->second) = c;
    }
    return out;
}

void set_target(ConstraintSystem& sys, const OperatorPoly& hamiltonian) {
    if (!is_hermitian(hamiltonian)) {
        throw std::invalid_argument("set_target: Hamiltonian is not Hermitian");
    }
    sys.h = coefficient_vector(hamiltonian, sys);
    sys.has_target = true;
}

void set_variance(ConstraintSystem& sys, double n0) {
    const Eigen::VectorXcd vc = coefficient_vector(variance_operator(sys.rank, n0), sys);
    if (vc.imag().cwiseAbs().maxCoeff() > 1e-14) {
        throw std::logic_error("set_variance: variance operator has complex coefficients");
    }
    sys.v = vc.real();
    sys.has_variance = true;
}

}  // namespace v2rdo
