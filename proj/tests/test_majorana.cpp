#include <doctest.h>

#include <random>

#include "test_helpers.hpp"
#include "v2rdo/majorana.hpp"

using namespace v2rdo;

namespace {

MajoranaMonomial mono(std::uint64_t mask, int rank) { return {mask, rank}; }

// Slot masks for 1-based orbitals.
std::uint64_t P(int i) { return std::uint64_t{1} << (2 * (i - 1)); }
std::uint64_t M(int i) { return std::uint64_t{1} << (2 * (i - 1) + 1); }

bool poly_close(const OperatorPoly& a, const OperatorPoly& b, double tol = 1e-12) {
    const OperatorPoly d = a - b;
    return d.max_abs_coeff() <= tol;
}

}  // namespace

TEST_SUITE("majorana") {

TEST_CASE("generator squares") {
    const int rank = 4;
    auto pp = monomial_product(mono(P(1), rank), mono(P(1), rank));
    CHECK(pp.sign == 1);
    CHECK(pp.monomial.mask == 0);

    auto mm = monomial_product(mono(M(1), rank), mono(M(1), rank));
    CHECK(mm.sign == -1);
    CHECK(mm.monomial.mask == 0);
}

TEST_CASE("ordered product with shared generator") {
    // p1p2 * p2m3 = p1 m3 with no residual sign.
    const int rank = 6;
    auto prod = monomial_product(mono(P(1) | P(2), rank), mono(P(2) | M(3), rank));
    CHECK(prod.sign == 1);
    CHECK(prod.monomial.mask == (P(1) | M(3)));
}

TEST_CASE("reordering sign") {
    // p2 * p1 = -p1p2.
    const int rank = 4;
    auto prod = monomial_product(mono(P(2), rank), mono(P(1), rank));
    CHECK(prod.sign == -1);
    CHECK(prod.monomial.mask == (P(1) | P(2)));
}

TEST_CASE("rank mismatch is an error") {
    CHECK_THROWS_AS(monomial_product(mono(P(1), 4), mono(P(1), 6)), std::invalid_argument);
    OperatorPoly a = identity_op(4), b = identity_op(6);
    CHECK_THROWS_AS(op_product(a, b), std::invalid_argument);
    CHECK_THROWS_AS(linear_combine({{cplx{1, 0}, &a}, {cplx{1, 0}, &b}}), std::invalid_argument);
}

TEST_CASE("adjoint signs") {
    // s(p1m2) = +1, s(p1p2) = -1, s(1) = +1.
    CHECK(adjoint_sign(P(1) | M(2)) == 1);
    CHECK(adjoint_sign(P(1) | P(2)) == -1);
    CHECK(adjoint_sign(0) == 1);
    CHECK(adjoint_sign(P(1) | M(1)) == 1);
}

TEST_CASE("adjoint of polynomials") {
    const int rank = 6;
    OperatorPoly a;
    a.rank = rank;
    a.add_term(P(1) | M(2), cplx{2.0, 1.0});
    a.add_term(P(1) | P(2), cplx{0.0, 3.0});
    const OperatorPoly ad = adjoint(a);
    CHECK(ad.coeff(P(1) | M(2)) == cplx{2.0, -1.0});
    CHECK(ad.coeff(P(1) | P(2)) == cplx{0.0, 3.0});  // conj then sign flip
    CHECK(is_hermitian(a) == false);
    CHECK(is_hermitian(a + ad) == true);
}

TEST_CASE("number bilinear from fermion operators") {
    // a1^dag a1 = (1 + p1 m1)/2.
    const int rank = 4;
    FermionString s;
    s.ops = {{1, true}, {1, false}};
    const OperatorPoly n1 = from_fermion_string(s, rank);
    CHECK(n1.coeff(0) == cplx{0.5, 0.0});
    CHECK(n1.coeff(P(1) | M(1)) == cplx{0.5, 0.0});
    CHECK(n1.size() == 2);
}

TEST_CASE("canonical anticommutation from the expansion") {
    // a_i a_j^dag + a_j^dag a_i = delta_ij, a_i^2 = 0.
    const int rank = 8;
    for (int i = 1; i <= 4; ++i) {
        for (int j = 1; j <= 4; ++j) {
            FermionString ij, ji;
            ij.ops = {{i, false}, {j, true}};
            ji.ops = {{j, true}, {i, false}};
            const OperatorPoly acomm =
                from_fermion_string(ij, rank) + from_fermion_string(ji, rank);
            OperatorPoly expect;
            expect.rank = rank;
            if (i == j) expect.add_term(0, cplx{1.0, 0.0});
            CHECK(poly_close(acomm, expect));
        }
        FermionString sq;
        sq.ops = {{i, false}, {i, false}};
        CHECK(from_fermion_string(sq, rank).size() == 0);
    }
}

TEST_CASE("adjoint is an involution and an anti-homomorphism") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const int rank = 2 * (1 + static_cast<int>(rng() % 4));
        const OperatorPoly a = test::random_poly(rng, rank, 5);
        const OperatorPoly b = test::random_poly(rng, rank, 5);
        CHECK(poly_close(adjoint(adjoint(a)), a));
        CHECK(poly_close(adjoint(a * b), adjoint(b) * adjoint(a)));
    }
}

TEST_CASE("monomial product is associative and respects grading") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const int rank = 8;
        const MajoranaMonomial a = test::random_monomial(rng, rank);
        const MajoranaMonomial b = test::random_monomial(rng, rank);
        const MajoranaMonomial c = test::random_monomial(rng, rank);

        const auto ab = monomial_product(a, b);
        const auto ab_c = monomial_product(ab.monomial, c);
        const auto bc = monomial_product(b, c);
        const auto a_bc = monomial_product(a, bc.monomial);
        CHECK(ab_c.monomial.mask == a_bc.monomial.mask);
        CHECK(ab.sign * ab_c.sign == bc.sign * a_bc.sign);

        const int overlap = std::popcount(a.mask & b.mask);
        CHECK(ab.monomial.degree() == a.degree() + b.degree() - 2 * overlap);
    }
}

TEST_CASE("distinct generators anticommute") {
    const int rank = 8;
    for (int s1 = 0; s1 < rank; ++s1) {
        for (int s2 = 0; s2 < rank; ++s2) {
            if (s1 == s2) continue;
            const MajoranaMonomial a{std::uint64_t{1} << s1, rank};
            const MajoranaMonomial b{std::uint64_t{1} << s2, rank};
            const auto ab = monomial_product(a, b);
            const auto ba = monomial_product(b, a);
            CHECK(ab.monomial.mask == ba.monomial.mask);
            CHECK(ab.sign == -ba.sign);
        }
    }
}

TEST_CASE("body grading splits operators") {
    const int rank = 8;
    OperatorPoly a;
    a.rank = rank;
    a.add_term(0, cplx{1.0, 0.0});                          // body 0
    a.add_term(P(1), cplx{2.0, 0.0});                       // body 1
    a.add_term(P(1) | M(1), cplx{3.0, 0.0});                // body 1
    a.add_term(P(1) | M(2) | P(3), cplx{4.0, 0.0});         // body 2
    a.add_term(P(1) | M(1) | P(2) | M(2), cplx{5.0, 0.0});  // body 2

    CHECK(body_component(a, 0).size() == 1);
    CHECK(body_component(a, 1).size() == 2);
    CHECK(body_component(a, 2).size() == 2);
    CHECK(body_component(a, 3).size() == 0);
    const OperatorPoly sum = body_component(a, 0) + body_component(a, 1) + body_component(a, 2);
    CHECK(poly_close(sum, a));
}

TEST_CASE("coefficients below tolerance are pruned") {
    OperatorPoly a;
    a.rank = 4;
    a.add_term(P(1), cplx{1.0, 0.0});
    a.add_term(P(1), cplx{-1.0 + 1e-16, 0.0});
    CHECK(a.size() == 0);
}

TEST_CASE("fermion string orbital range is checked") {
    FermionString s;
    s.ops = {{3, true}};
    CHECK_THROWS_AS(from_fermion_string(s, 4), std::invalid_argument);
    CHECK_NOTHROW(from_fermion_string(s, 6));
}

}  // TEST_SUITE
