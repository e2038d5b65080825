#pragma once

#include <bit>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

/// Exact arithmetic in the real Clifford algebra generated by the operators
///
///   p_i = a_i + a_i^dag   (p_i^2 = +1)
///   m_i = a_i - a_i^dag   (m_i^2 = -1)
///
/// for orbitals i = 1..r.  All 2r generators pairwise anticommute, so a
/// monomial is determined by its generator set and the algebra closes with
/// integer signs.  Generator slots are numbered 0..2r-1: slot 2(i-1) is p_i
/// and slot 2(i-1)+1 is m_i, and a monomial is the product of its generators
/// in ascending slot order, stored as a 64-bit mask (rank cap r <= 32).
namespace v2rdo {

using cplx = std::complex<double>;

/// Coefficients with magnitude below this are dropped from polynomials.
inline constexpr double kCoeffDropTol = 1e-14;

/// Bits at odd positions select the m-type generators of a mask.
inline constexpr std::uint64_t kMTypeBits = 0xaaaaaaaaaaaaaaaaULL;

/// A signed product of distinct anticommuting generators in canonical order.
/// rank is the generator count 2r of the algebra the monomial lives in.
struct MajoranaMonomial {
    std::uint64_t mask = 0;
    int rank = 0;

    int degree() const { return std::popcount(mask); }
    /// Body order: the smallest q such that the monomial appears in a
    /// q-body fermionic operator, ceil(degree / 2).
    int body() const { return (degree() + 1) / 2; }
    bool is_identity() const { return mask == 0; }

    friend bool operator==(const MajoranaMonomial&, const MajoranaMonomial&) = default;
};

struct MonomialProduct {
    int sign = 1;
    MajoranaMonomial monomial;
};

/// Product of two canonical monomials over the same algebra: the result mask
/// is the XOR of the inputs and the sign collects one -1 per transposition
/// needed to merge the generator lists plus one -1 per repeated m-type
/// generator (m_i^2 = -1).  Errors on rank mismatch.
MonomialProduct monomial_product(const MajoranaMonomial& a, const MajoranaMonomial& b);

/// Sign s(m) with m^dag = s(m) m: reversing d distinct generators costs
/// (-1)^(d(d-1)/2) and each of the k m-type generators conjugates to -itself,
/// so s(m) = (-1)^(d(d-1)/2 + k).
int adjoint_sign(std::uint64_t mask);

/// Finite linear combination of canonical monomials with complex
/// coefficients.  The map is keyed by mask; coefficients below kCoeffDropTol
/// are pruned by every operation.
struct OperatorPoly {
    int rank = 0;
    std::map<std::uint64_t, cplx> terms;

    cplx coeff(std::uint64_t mask) const {
        auto it = terms.find(mask);
        return it == terms.end() ? cplx{0.0, 0.0} : it->second;
    }
    /// Largest monomial degree present (0 for the zero polynomial).
    int degree() const;
    /// Largest coefficient magnitude.
    double max_abs_coeff() const;
    std::size_t size() const { return terms.size(); }

    /// Inserts c * monomial(mask), pruning if the sum falls below tolerance.
    void add_term(std::uint64_t mask, cplx c);
};

OperatorPoly identity_op(int rank);
/// Generator polynomials, 1-based orbital index.
OperatorPoly p_op(int orbital, int rank);
OperatorPoly m_op(int orbital, int rank);

/// A^dag: conjugate coefficients and apply the per-monomial adjoint sign.
OperatorPoly adjoint(const OperatorPoly& a);

/// Algebra product, expanded term by term.  Errors on rank mismatch.
OperatorPoly op_product(const OperatorPoly& a, const OperatorPoly& b);

/// Sum of scaled polynomials over a common rank.  Errors on rank mismatch
/// or an empty list.
OperatorPoly linear_combine(const std::vector<std::pair<cplx, const OperatorPoly*>>& parts);

/// Terms of a whose body order equals p (p >= 1), plus the identity when
/// p == 0 is requested.
OperatorPoly body_component(const OperatorPoly& a, int p);

/// True when A^dag = A within tol, i.e. conj(c_m) s(m) = c_m for every term.
bool is_hermitian(const OperatorPoly& a, double tol = 1e-12);

OperatorPoly operator+(const OperatorPoly& a, const OperatorPoly& b);
OperatorPoly operator-(const OperatorPoly& a, const OperatorPoly& b);
OperatorPoly operator*(const OperatorPoly& a, const OperatorPoly& b);
OperatorPoly operator*(cplx c, const OperatorPoly& a);

/// One creation or annihilation operator on a 1-based orbital.
struct FermionOp {
    int orbital = 1;
    bool creation = false;
};

/// Ordered product of fermion operators scaled by a prefactor.  The order of
/// ops is the operator order: ops[0] acts last.
struct FermionString {
    cplx prefactor{1.0, 0.0};
    std::vector<FermionOp> ops;
};

/// Expands a fermion string over rank generators via a_i = (p_i + m_i)/2 and
/// a_i^dag = (p_i - m_i)/2.  Errors when an orbital index falls outside
/// 1..rank/2 or rank is odd.
OperatorPoly from_fermion_string(const FermionString& s, int rank);

/// Human-readable rendering, e.g. "(0.5+0i) p1m2".  Debug aid.
std::string to_string(const OperatorPoly& a);
std::string monomial_label(std::uint64_t mask);

}  // namespace v2rdo
