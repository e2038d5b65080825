#include "v2rdo/majorana.hpp"

#include <sstream>
#include <stdexcept>

namespace v2rdo {

namespace {

void check_same_rank(int ra, int rb, const char* what) {
    if (ra != rb) {
        throw std::invalid_argument(std::string(what) + ": rank mismatch (" +
                                    std::to_string(ra) + " vs " + std::to_string(rb) + ")");
    }
}

}  // namespace

MonomialProduct monomial_product(const MajoranaMonomial& a, const MajoranaMonomial& b) {
    check_same_rank(a.rank, b.rank, "monomial_product");
    // Merging the sorted generator lists of a and b costs one transposition
    // for every pair (g in a, g' in b) with g > g'; equal generators end up
    // adjacent and cancel with p^2 = +1, m^2 = -1.
    int swaps = 0;
    std::uint64_t bm = b.mask;
    while (bm != 0) {
        const int slot = std::countr_zero(bm);
        bm &= bm - 1;
        swaps += std::popcount(a.mask >> (slot + 1));
    }
    const int m_squares = std::popcount(a.mask & b.mask & kMTypeBits);
    const int sign = ((swaps + m_squares) % 2 == 0) ? 1 : -1;
    return {sign, MajoranaMonomial{a.mask ^ b.mask, a.rank}};
}

int adjoint_sign(std::uint64_t mask) {
    const int d = std::popcount(mask);
    const int k = std::popcount(mask & kMTypeBits);
    return ((d * (d - 1) / 2 + k) % 2 == 0) ? 1 : -1;
}

int OperatorPoly::degree() const {
    int d = 0;
    for (const auto& [mask, c] : terms) d = std::max(d, std::popcount(mask));
    return d;
}

double OperatorPoly::max_abs_coeff() const {
    double m = 0.0;
    for (const auto& [mask, c] : terms) m = std::max(m, std::abs(c));
    return m;
}

void OperatorPoly::add_term(std::uint64_t mask, cplx c) {
    auto [it, inserted] = terms.try_emplace(mask, c);
    if (!inserted) it->second += c;
    if (std::abs(it->second) < kCoeffDropTol) terms.erase(it);
}

OperatorPoly identity_op(int rank) {
    OperatorPoly a;
    a.rank = rank;
    a.terms[0] = cplx{1.0, 0.0};
    return a;
}

namespace {

OperatorPoly generator_op(int orbital, int rank, int type) {
    if (rank <= 0 || rank % 2 != 0) {
        throw std::invalid_argument("generator: rank must be a positive even generator count");
    }
    if (orbital < 1 || orbital > rank / 2) {
        throw std::invalid_argument("generator: orbital index " + std::to_string(orbital) +
                                    " outside 1.." + std::to_string(rank / 2));
    }
    OperatorPoly a;
    a.rank = rank;
    a.terms[std::uint64_t{1} << (2 * (orbital - 1) + type)] = cplx{1.0, 0.0};
    return a;
}

}  // namespace

OperatorPoly p_op(int orbital, int rank) { return generator_op(orbital, rank, 0); }
OperatorPoly m_op(int orbital, int rank) { return generator_op(orbital, rank, 1); }

OperatorPoly adjoint(const OperatorPoly& a) {
    OperatorPoly out;
    out.rank = a.rank;
    for (const auto& [mask, c] : a.terms) {
        out.terms[mask] = std::conj(c) * static_cast<double>(adjoint_sign(mask));
    }
    return out;
}

OperatorPoly op_product(const OperatorPoly& a, const OperatorPoly& b) {
    check_same_rank(a.rank, b.rank, "op_product");
    OperatorPoly out;
    out.rank = a.rank;
    for (const auto& [ma, ca] : a.terms) {
        const MajoranaMonomial mono_a{ma, a.rank};
        for (const auto& [mb, cb] : b.terms) {
            const auto prod = monomial_product(mono_a, MajoranaMonomial{mb, b.rank});
            out.add_term(prod.monomial.mask, ca * cb * static_cast<double>(prod.sign));
        }
    }
    return out;
}

OperatorPoly linear_combine(const std::vector<std::pair<cplx, const OperatorPoly*>>& parts) {
    if (parts.empty()) throw std::invalid_argument("linear_combine: empty part list");
    OperatorPoly out;
    out.rank = parts.front().second->rank;
    for (const auto& [c, poly] : parts) {
        check_same_rank(out.rank, poly->rank, "linear_combine");
        for (const auto& [mask, pc] : poly->terms) out.add_term(mask, c * pc);
    }
    return out;
}

OperatorPoly body_component(const OperatorPoly& a, int p) {
    OperatorPoly out;
    out.rank = a.rank;
    for (const auto& [mask, c] : a.terms) {
        const int body = (std::popcount(mask) + 1) / 2;
        if (body == p) out.terms[mask] = c;
    }
    return out;
}

bool is_hermitian(const OperatorPoly& a, double tol) {
    for (const auto& [mask, c] : a.terms) {
        if (std::abs(std::conj(c) * static_cast<double>(adjoint_sign(mask)) - c) > tol) return false;
    }
    return true;
}

OperatorPoly operator+(const OperatorPoly& a, const OperatorPoly& b) {
    return linear_combine({{cplx{1.0, 0.0}, &a}, {cplx{1.0, 0.0}, &b}});
}

OperatorPoly operator-(const OperatorPoly& a, const OperatorPoly& b) {
    return linear_combine({{cplx{1.0, 0.0}, &a}, {cplx{-1.0, 0.0}, &b}});
}

OperatorPoly operator*(const OperatorPoly& a, const OperatorPoly& b) { return op_product(a, b); }

OperatorPoly operator*(cplx c, const OperatorPoly& a) { return linear_combine({{c, &a}}); }

OperatorPoly from_fermion_string(const FermionString& s, int rank) {
    if (rank <= 0 || rank % 2 != 0) {
        throw std::invalid_argument("from_fermion_string: rank must be a positive even generator count");
    }
    OperatorPoly out = identity_op(rank);
    out.terms[0] = s.prefactor;
    for (const FermionOp& op : s.ops) {
        if (op.orbital < 1 || op.orbital > rank / 2) {
            throw std::invalid_argument("from_fermion_string: orbital index " +
                                        std::to_string(op.orbital) + " outside 1.." +
                                        std::to_string(rank / 2));
        }
        const OperatorPoly p = p_op(op.orbital, rank);
        const OperatorPoly m = m_op(op.orbital, rank);
        const cplx half{0.5, 0.0};
        const cplx msign = op.creation ? cplx{-0.5, 0.0} : cplx{0.5, 0.0};
        const OperatorPoly factor = linear_combine({{half, &p}, {msign, &m}});
        out = op_product(out, factor);
    }
    return out;
}

std::string monomial_label(std::uint64_t mask) {
    if (mask == 0) return "1";
    std::string s;
    std::uint64_t m = mask;
    while (m != 0) {
        const int slot = std::countr_zero(m);
        m &= m - 1;
        s += (slot % 2 == 0) ? 'p' : 'm';
        s += std::to_string(slot / 2 + 1);
    }
    return s;
}

std::string to_string(const OperatorPoly& a) {
    if (a.terms.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [mask, c] : a.terms) {
        if (!first) os << " + ";
        first = false;
        os << "(" << c.real() << (c.imag() < 0 ? "" : "+") << c.imag() << "i) "
           << monomial_label(mask);
    }
    return os.str();
}

}  // namespace v2rdo
