#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "v2rdo/majorana.hpp"

/// Linear structure of the (2,p) positivity conditions.  A Gram certificate
///
///   B(X) = sum_{ab} X_ab m_a m_b^dag,   X >= 0
///
/// over a monomial basis {m_a} expands into monomials m = mask_a XOR mask_b
/// with integer weights, giving one linear functional per monomial.  Rows on
/// monomials of degree <= 4 ("kept") are matched against the target
/// Hamiltonian; higher-degree rows ("forbidden") are forced to vanish.
namespace v2rdo {

enum class BasisMode {
    up_to_p,     // all monomials of degree 0..p
    exact_p,     // only degree p (ablation)
    partial_23,  // degree <= 2 Gram block plus a degree-3 anticommutator block
};

enum class BlockKind {
    gram,           // entries weight m_a m_b^dag
    anticommutator, // entries weight m_a m_b^dag + m_b^dag m_a
};

struct GramBlock {
    BlockKind kind = BlockKind::gram;
    std::vector<MajoranaMonomial> monomials;
    int dim() const { return static_cast<int>(monomials.size()); }
};

struct GramBasis {
    int rank = 0;
    int p = 2;
    BasisMode mode = BasisMode::up_to_p;
    bool parity_blocking = false;
    std::vector<GramBlock> blocks;
    int total_monomials() const;
};

/// Enumerates the monomial basis for the requested condition.  Monomials are
/// ordered by (degree, mask).  parity_blocking splits each block into its
/// even-degree and odd-degree halves, which is valid for parity-preserving
/// targets.  Errors when the total basis size exceeds basis_cap, when rank
/// is not a positive even count, or when p < 1 (partial_23 requires p == 3).
GramBasis gram_basis(int rank, int p, BasisMode mode, bool parity_blocking = false,
                     std::size_t basis_cap = 5000);

/// One Gram entry contributing to a monomial row: X_blocks[block](i, j)
/// enters with the given integer weight.  Weights are real because the
/// structure constants of the generator basis are +-1.
struct ConstraintEntry {
    int block = 0;
    int i = 0;
    int j = 0;
    double weight = 0.0;
};

struct ConstraintRow {
    std::uint64_t mask = 0;
    int degree = 0;
    bool kept = false;    // degree <= 4: matched against the target
    int adj_sign = 1;     // s(m); rows with s = -1 carry imaginary data for Hermitian targets
    std::vector<ConstraintEntry> entries;
};

/// The full constraint map of one basis: rows kept-first (degree, mask)
/// ordered, so rows[0] is the identity, then forbidden rows in the same
/// order.  Every kept monomial of the two-body space appears as a row even
/// when no Gram entry reaches it (its row is then an explicit zero-equality
/// against the target).
struct ConstraintSystem {
    int rank = 0;
    GramBasis basis;
    std::vector<ConstraintRow> rows;
    int n_kept = 0;
    int identity_row = 0;
    std::unordered_map<std::uint64_t, int> row_index;

    Eigen::VectorXcd h;  // target coefficients per row, zero on forbidden rows
    Eigen::VectorXd v;   // variance-operator coefficients per row
    bool has_target = false;
    bool has_variance = false;
};

ConstraintSystem build_map(const GramBasis& basis);

/// (N - n0)^2 over rank generators, N = sum_i (1 + p_i m_i)/2.
OperatorPoly variance_operator(int rank, double n0);

/// Row-indexed coefficient vector of a polynomial.  Errors when the
/// polynomial carries a monomial of degree > 4 ("not a two-body operator")
/// or of odd rank.
Eigen::VectorXcd coefficient_vector(const OperatorPoly& a, const ConstraintSystem& sys);

/// Stores the target Hamiltonian into sys.h.  Errors when H is not
/// Hermitian or not two-body.
void set_target(ConstraintSystem& sys, const OperatorPoly& hamiltonian);

/// Stores (N - n0)^2 into sys.v.
void set_variance(ConstraintSystem& sys, double n0);

}  // namespace v2rdo
