#pragma once

#include <array>

/// Frozen exact-diagonalization data for the benchmark ring (6 sites,
/// mu = -0.2, tau = 0.5, delta = 0.5) across the quartic-coupling grid
/// kappa/tau in {0, 0.25, ..., 2}.  Captured from the dense Fock oracle; the
/// kappa = 0 point is independently confirmed by the quadratic pairing
/// formula in the hamiltonians suite.
namespace v2rdo::test {

struct RingFixture {
    double ratio = 0.0;       // kappa / tau
    double energy = 0.0;      // ground energy
    double n_variance = 0.0;  // <(N - <N>)^2> of the ground state
    double parity = 0.0;      // <(-1)^N>, +-1
    int multiplicity = 1;
};

inline constexpr std::array<RingFixture, 9> kRingGrid{{
    {0.00, -3.6300680115571815, 1.4976958525345645, -1, 1},
    {0.25, -2.9566475154281462, 1.1092533614001798, -1, 1},
    {0.50, -2.9480475438559619, 0.94925410196040672, +1, 1},
    {0.75, -3.5026861807875083, 1.8605081276396853, +1, 1},
    {1.00, -4.2886859109723909, 2.5089609247964821, +1, 1},
    {1.25, -5.1194928051612179, 2.7271153586072376, +1, 1},
    {1.50, -5.9645341500353659, 2.8202928927302233, +1, 1},
    {1.75, -6.816212172684609, 2.8669578237760032, +1, 1},
    {2.00, -7.6716555520348448, 2.8926345712378967, +1, 1},
}};

}  // namespace v2rdo::test
