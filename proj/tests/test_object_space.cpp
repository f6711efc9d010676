#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "chronon/object_space.hpp"

using namespace chronon;

namespace {

CMatrix pauli_z() {
    CMatrix m(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return m;
}

CMatrix pauli_x() {
    CMatrix m(2, 2);
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
    return m;
}

CMatrix hermitian2(double a, double d, cplx b) {
    CMatrix m(2, 2);
    m(0, 0) = a;
    m(1, 1) = d;
    m(0, 1) = b;
    m(1, 0) = std::conj(b);
    return m;
}

HamiltonianSchedule demo_harmonic() {
    return HamiltonianSchedule::harmonic(hermitian2(0.5, -0.3, cplx(0.2, -0.1)),
                                         hermitian2(0.1, 0.2, cplx(0.4, 0.0)), 3.0);
}

}  // namespace

TEST_CASE("generator is -iH and anti-Hermitian for all kinds") {
    std::vector<HamiltonianSchedule> schedules;
    schedules.push_back(HamiltonianSchedule::constant(pauli_z()));
    schedules.push_back(demo_harmonic());
    schedules.push_back(HamiltonianSchedule::separable(
        pauli_x(), IntensityProfile::tabulated({0.0, 0.5, 1.0}, {0.5, 1.5, 1.0})));
    schedules.push_back(HamiltonianSchedule::piecewise_constant(
        {{0.4, pauli_z()}, {1.0, hermitian2(0.2, 0.2, cplx(0.0, 0.0))}}));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const auto& s : schedules) {
        for (int i = 0; i < 100; ++i) {
            const double t = u(rng) * std::min(s.horizon(), 1.0);
            const CMatrix g = s.generator(t);
            // G + G^* = 0 entrywise
            CHECK(max_abs_diff(g, cplx(-1.0, 0.0) * g.adjoint()) < 1e-12);
        }
    }
}

TEST_CASE("generator examples") {
    const HamiltonianSchedule zero = HamiltonianSchedule::constant(CMatrix::zero(2, 2));
    CHECK(zero.generator(0.3).max_abs() == 0.0);

    const HamiltonianSchedule z = HamiltonianSchedule::constant(pauli_z());
    const CMatrix g = z.generator(0.0);
    CHECK(g(0, 0) == cplx(0.0, -1.0));
    CHECK(g(1, 1) == cplx(0.0, 1.0));

    // harmonic schedule at a zero of the cosine reduces to H0
    const HamiltonianSchedule h = demo_harmonic();
    const double t = M_PI / (2.0 * 3.0);
    CHECK(max_abs_diff(h.hamiltonian(t), hermitian2(0.5, -0.3, cplx(0.2, -0.1))) < 1e-12);
}

TEST_CASE("separable generator factorizes exactly") {
    const IntensityProfile nu = IntensityProfile::tabulated({0.0, 0.5, 1.0}, {0.5, 1.5, 1.0});
    const HamiltonianSchedule s = HamiltonianSchedule::separable(pauli_x(), nu);
    for (double t : {0.0, 0.1, 0.25, 0.5, 0.77, 1.0}) {
        const CMatrix expected = nu.value(t) * (cplx(0.0, -1.0) * pauli_x());
        CHECK(max_abs_diff(s.generator(t), expected) == 0.0);
    }
}

TEST_CASE("schedule validation") {
    CMatrix not_hermitian(2, 2);
    not_hermitian(0, 1) = cplx(1.0, 0.0);
    CHECK_THROWS_AS(HamiltonianSchedule::constant(not_hermitian), std::invalid_argument);

    const HamiltonianSchedule pw =
        HamiltonianSchedule::piecewise_constant({{0.5, pauli_z()}, {1.0, pauli_x()}});
    CHECK(pw.horizon() == 1.0);
    CHECK_THROWS_AS(pw.hamiltonian(1.5), std::out_of_range);
    CHECK_THROWS_AS(pw.hamiltonian(-0.1), std::out_of_range);
}

TEST_CASE("reference propagator basics") {
    SUBCASE("zero Hamiltonian gives the identity") {
        const HamiltonianSchedule s = HamiltonianSchedule::constant(CMatrix::zero(3, 3));
        const CMatrix v = reference_propagator(s, 0.0, 0.8, 100).matrix;
        CHECK(max_abs_diff(v, CMatrix::identity(3)) == 0.0);
    }
    SUBCASE("diagonal constant case against the analytic exponential") {
        const HamiltonianSchedule s = HamiltonianSchedule::constant(pauli_z());
        const CMatrix v = reference_propagator(s, 0.0, M_PI / 2.0, 4000).matrix;
        CMatrix expected(2, 2);
        expected(0, 0) = cplx(0.0, -1.0);
        expected(1, 1) = cplx(0.0, 1.0);
        CHECK(max_abs_diff(v, expected) < 1e-12);
    }
    SUBCASE("empty interval") {
        const HamiltonianSchedule s = HamiltonianSchedule::constant(pauli_z());
        CHECK(max_abs_diff(reference_propagator(s, 0.4, 0.4, 10).matrix, CMatrix::identity(2)) ==
              0.0);
    }
    SUBCASE("invalid interval throws") {
        const HamiltonianSchedule s = HamiltonianSchedule::constant(pauli_z());
        CHECK_THROWS_AS(reference_propagator(s, 0.5, 0.2, 10), std::invalid_argument);
        CHECK_THROWS_AS(reference_propagator(s, 0.0, 1.0, 0), std::invalid_argument);
    }
}

TEST_CASE("fourth order self consistency on the harmonic schedule") {
    // Richardson: halving the step must shrink the deviation from a fine
    // solution by about 2^4
    const HamiltonianSchedule s = demo_harmonic();
    const CMatrix fine = reference_propagator(s, 0.0, 1.0, 20000).matrix;
    const double e1 = max_abs_diff(reference_propagator(s, 0.0, 1.0, 50).matrix, fine);
    const double e2 = max_abs_diff(reference_propagator(s, 0.0, 1.0, 100).matrix, fine);
    CHECK(e1 / e2 > 10.0);
    CHECK(e1 / e2 < 26.0);
}

TEST_CASE("unitarity of produced propagators") {
    const HamiltonianSchedule s = demo_harmonic();
    const CMatrix v = reference_propagator(s, 0.0, 1.0, 10000).matrix;
    CHECK(unitarity_defect(v) < 1e-10);
}

TEST_CASE("hemigroup property") {
    SUBCASE("degenerate split") {
        const HamiltonianSchedule s = HamiltonianSchedule::constant(pauli_z());
        CHECK(hemigroup_defect(s, 0.3, 0.3, 0.3, 100) == 0.0);
    }
    SUBCASE("constant schedule") {
        const HamiltonianSchedule s = HamiltonianSchedule::constant(hermitian2(0.7, -0.2, cplx(0.3, 0.4)));
        CHECK(hemigroup_defect(s, 0.0, 0.35, 1.0, 10000) < 1e-10);
    }
    SUBCASE("harmonic schedule split at the midpoint") {
        CHECK(hemigroup_defect(demo_harmonic(), 0.0, 0.5, 1.0, 10000) < 1e-8);
    }
    SUBCASE("piecewise-constant schedule with an off-split breakpoint") {
        const HamiltonianSchedule s =
            HamiltonianSchedule::piecewise_constant({{0.37, pauli_z()}, {1.0, pauli_x()}});
        CHECK(hemigroup_defect(s, 0.0, 0.5, 1.0, 10000) < 1e-10);
    }
    SUBCASE("unordered times throw") {
        CHECK_THROWS_AS(hemigroup_defect(demo_harmonic(), 0.5, 0.2, 1.0, 100),
                        std::invalid_argument);
    }
}

TEST_CASE("norm bound is an upper envelope") {
    const HamiltonianSchedule s = demo_harmonic();
    const double b = s.norm_bound(1024);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 32; ++i) {
        const double t = u(rng);
        CHECK(op_norm_estimate(s.hamiltonian(t)) <= b * 1.05 + 1e-9);
    }
}
