#pragma once

#include <cstdint>
#include <random>

#include "v2rdo/majorana.hpp"

namespace v2rdo::test {

inline std::uint64_t random_mask(std::mt19937_64& rng, int rank) {
    std::uniform_int_distribution<std::uint64_t> bits(0, (std::uint64_t{1} << rank) - 1);
    return bits(rng);
}

inline MajoranaMonomial random_monomial(std::mt19937_64& rng, int rank) {
    return {random_mask(rng, rank), rank};
}

/// Random polynomial with nterms complex-coefficient monomials.
inline OperatorPoly random_poly(std::mt19937_64& rng, int rank, int nterms) {
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    OperatorPoly a;
    a.rank = rank;
    for (int t = 0; t < nterms; ++t) {
        a.add_term(random_mask(rng, rank), cplx{coeff(rng), coeff(rng)});
    }
    return a;
}

/// Random Hermitian polynomial: A + A^dag of a random polynomial.
inline OperatorPoly random_hermitian(std::mt19937_64& rng, int rank, int nterms) {
    const OperatorPoly a = random_poly(rng, rank, nterms);
    const OperatorPoly ad = adjoint(a);
    return a + ad;
}

}  // namespace v2rdo::test
