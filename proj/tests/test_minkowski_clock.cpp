#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <limits>
#include <random>

#include "chronon/minkowski_clock.hpp"

using namespace chronon;

namespace {

std::mt19937_64 rng(0x5eed0001);
cplx rand_cplx() {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    return {u(rng), u(rng)};
}

// independent oracle for the dagger: explicit q^-1 m^* q with dense 2x2
// arithmetic, no reuse of dag()
ClockMatrix dag_oracle(const ClockMatrix& m) {
    const ClockMatrix q = ClockMatrix::metric();  // its own inverse
    ClockMatrix mstar;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) mstar(i, j) = std::conj(m(j, i));
    return q * mstar * q;
}

}  // namespace

TEST_CASE("pseudo inner product") {
    // null future state
    CHECK(pseudo_inner(TemporalVector::future(), TemporalVector::future()) == cplx{});
    // past against future
    CHECK(pseudo_inner(TemporalVector::past(), TemporalVector::future()) == cplx(1.0, 0.0));
    // (nu, 1) squares to 2 nu for real nu: conj(1)*nu + conj(nu)*1
    for (double nu : {0.25, 0.7, 1.0, 3.5}) {
        const TemporalVector v{nu, 1.0};
        CHECK(std::real(pseudo_inner(v, v)) == doctest::Approx(2.0 * nu).epsilon(1e-15));
    }
    // always real, and null states are null for any amplitude
    for (int i = 0; i < 50; ++i) {
        const TemporalVector v{rand_cplx(), rand_cplx()};
        CHECK(std::abs(std::imag(pseudo_inner(v, v))) < 1e-15);
        const cplx z = rand_cplx();
        CHECK(is_null({z, 0.0}));
        CHECK(is_null({0.0, z}));
    }
}

TEST_CASE("dual is an involution") {
    for (int i = 0; i < 50; ++i) {
        const TemporalVector v{rand_cplx(), rand_cplx()};
        const TemporalVector back = dual(dual(v));
        CHECK(back.minus == v.minus);
        CHECK(back.plus == v.plus);
    }
}

TEST_CASE("dagger of clock matrices") {
    const ClockMatrix d = ClockMatrix::increment();
    SUBCASE("increment is a fixed point and nilpotent") {
        CHECK(max_abs(dag(d) - d) == 0.0);
        CHECK(max_abs(d * d) == 0.0);
    }
    SUBCASE("identity is a fixed point") {
        CHECK(max_abs(dag(ClockMatrix::identity()) - ClockMatrix::identity()) == 0.0);
    }
    SUBCASE("general formula against the metric-conjugation oracle") {
        for (int i = 0; i < 100; ++i) {
            ClockMatrix m;
            for (auto& v : m.e) v = rand_cplx();
            CHECK(max_abs(dag(m) - dag_oracle(m)) == 0.0);
            CHECK(max_abs(dag(dag(m)) - m) == 0.0);  // involution, exact
        }
    }
    SUBCASE("entry pattern [[conj e, conj b],[conj c, conj a]]") {
        ClockMatrix m{{cplx(1, 2), cplx(3, -4), cplx(-5, 6), cplx(7, 8)}};
        const ClockMatrix r = dag(m);
        CHECK(r(0, 0) == std::conj(m(1, 1)));
        CHECK(r(0, 1) == std::conj(m(0, 1)));
        CHECK(r(1, 0) == std::conj(m(1, 0)));
        CHECK(r(1, 1) == std::conj(m(0, 0)));
    }
}

TEST_CASE("metric properties") {
    const ClockMatrix q = ClockMatrix::metric();
    CHECK(max_abs(q * q - ClockMatrix::identity()) == 0.0);
    ClockMatrix qct;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) qct(i, j) = std::conj(q(j, i));
    CHECK(max_abs(qct - q) == 0.0);
}

TEST_CASE("pseudo unitarity predicate") {
    // upper-triangular with purely imaginary coupling is pseudo-unitary
    ClockMatrix g = ClockMatrix::identity();
    g(0, 1) = cplx(0.0, 0.7);
    CHECK(is_pseudo_unitary(g, 1e-12));
    // a real coupling is not
    g(0, 1) = 1.0;
    CHECK_FALSE(is_pseudo_unitary(g, 1e-12));
    CHECK(is_pseudo_unitary(ClockMatrix::identity(), 1e-12));
    CHECK_THROWS_AS(is_pseudo_unitary(g, 0.0), std::invalid_argument);
}

TEST_CASE("lorentz boost") {
    SUBCASE("unit boost is the identity") {
        CHECK(max_abs(lorentz_boost(1.0) - ClockMatrix::identity()) == 0.0);
    }
    SUBCASE("dagger of the boost at lambda = 4") {
        const ClockMatrix dg = dag(lorentz_boost(4.0));
        CHECK(dg(0, 0) == cplx(2.0, 0.0));
        CHECK(dg(1, 1) == cplx(0.5, 0.0));
        CHECK(dg(0, 1) == cplx{});
        CHECK(dg(1, 0) == cplx{});
    }
    SUBCASE("pseudo-unitary for any positive lambda") {
        std::uniform_real_distribution<double> u(0.05, 20.0);
        for (int i = 0; i < 50; ++i) CHECK(is_pseudo_unitary(lorentz_boost(u(rng)), 1e-12));
    }
    SUBCASE("rejects bad arguments") {
        CHECK_THROWS_AS(lorentz_boost(0.0), std::invalid_argument);
        CHECK_THROWS_AS(lorentz_boost(-1.0), std::invalid_argument);
        CHECK_THROWS_AS(lorentz_boost(std::numeric_limits<double>::infinity()),
                        std::invalid_argument);
    }
}

TEST_CASE("nilpotent and monoidal products") {
    CHECK(nilpotent_algebra_product(cplx(3, 0), cplx(5, 0)) == cplx{});
    CHECK(monoidal_product(cplx(3, 0), cplx(5, 0)) == cplx(8, 0));
    for (int i = 0; i < 20; ++i) {
        const cplx a = rand_cplx();
        CHECK(monoidal_product(a, cplx{}) == a);  // unit 0
        CHECK(nilpotent_algebra_product(a, rand_cplx()) == cplx{});
    }
}

TEST_CASE("representation homomorphism on increments") {
    // dag(alpha d) = conj(alpha) d, and products of increments vanish on
    // both sides of the representation
    for (int i = 0; i < 50; ++i) {
        const cplx alpha = rand_cplx();
        const ClockMatrix rep = alpha * ClockMatrix::increment();
        const ClockMatrix expected = std::conj(alpha) * ClockMatrix::increment();
        CHECK(max_abs(dag(rep) - expected) == 0.0);
        const ClockMatrix prod = rep * (rand_cplx() * ClockMatrix::increment());
        CHECK(max_abs(prod) == 0.0);
    }
}

TEST_CASE("state compression recovers the coefficient") {
    for (double nu : {0.3, 1.0, 2.0}) {
        const TemporalVector xi{nu, 1.0};
        for (int i = 0; i < 20; ++i) {
            const cplx alpha = rand_cplx();
            const cplx got = state_compression(xi, alpha);
            CHECK(std::abs(got - alpha) <= 1e-15 * std::max(1.0, std::abs(alpha)));
        }
    }
}

TEST_CASE("increment maps future to past") {
    const TemporalVector out = apply(ClockMatrix::increment(), TemporalVector::future());
    CHECK(out.minus == cplx(1.0, 0.0));
    CHECK(out.plus == cplx{});
}

TEST_CASE("basic vectors") {
    const BasicVector b{cplx(0.8, 0.0), 0.0};
    const TemporalVector v = b.at(1.7);
    CHECK(v.minus == cplx(0.8, 0.0));
    CHECK(v.plus == cplx(1.0, 0.0));

    const BasicVector with_momentum{cplx(0.5, 0.0), 2.0};
    const TemporalVector w = with_momentum.at(0.3);
    const cplx phase = std::exp(cplx(0.0, -2.0 * 0.3));
    CHECK(std::abs(w.plus - phase) < 1e-15);
    CHECK(std::abs(w.minus - 0.5 * phase) < 1e-15);
    // the phase drops out of the pseudo-square
    CHECK(std::abs(pseudo_inner(w, w) - cplx(1.0, 0.0)) < 1e-15);
}
