#include "qsd/qudit.hpp"

#include "oracles.hpp"
#include "qsd/measurement.hpp"
#include "qsd/rng.hpp"
#include "qsd/serialize.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace qsd;
namespace {
constexpr double kPi = std::numbers::pi;

HypersphericalParams angles(std::initializer_list<double> values) {
    HypersphericalParams p;
    p.angles.resize(static_cast<int>(values.size()));
    int i = 0;
    for (double v : values) p.angles[i++] = v;
    return p;
}
}  // namespace

TEST_CASE("hyperspherical coefficients recover the Bloch forms") {
    const RealVec equal = hyperspherical_coeffs(angles({kPi / 2}));
    CHECK(equal[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(equal[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));

    const RealVec pole = hyperspherical_coeffs(angles({0.0}));
    CHECK(pole[0] == doctest::Approx(1.0));
    CHECK(pole[1] == doctest::Approx(0.0));

    const RealVec qutrit = hyperspherical_coeffs(angles({kPi, kPi / 2}));
    CHECK(qutrit[0] == doctest::Approx(0.70711).epsilon(1e-4));
    CHECK(qutrit[1] == doctest::Approx(0.70711).epsilon(1e-4));
    CHECK(qutrit[2] == doctest::Approx(0.0));
}

TEST_CASE("hyperspherical coefficients are normalized and nonnegative for any angles") {
    Rng rng(314);
    for (int trial = 0; trial < 200; ++trial) {
        const int dim = 2 + static_cast<int>(rng.next_double() * 8);
        HypersphericalParams p;
        p.angles.resize(dim - 1);
        for (int m = 0; m < dim - 1; ++m) p.angles[m] = rng.next_uniform(0.0, kPi);
        const RealVec c = hyperspherical_coeffs(p);
        CHECK(c.size() == dim);
        CHECK(std::abs(c.squaredNorm() - 1.0) < 1e-12);
        CHECK(c.minCoeff() >= 0.0);
    }
}

TEST_CASE("hyperspherical rejects out-of-range angles") {
    CHECK_THROWS_AS((void)hyperspherical_coeffs(angles({-0.1})), std::invalid_argument);
    CHECK_THROWS_AS((void)hyperspherical_coeffs(angles({kPi + 0.1, 1.0})), std::invalid_argument);
}

TEST_CASE("cascade coefficients: flat, clipped, and mid-alpha values") {
    const RealVec flat = cascade_coeffs(5, {2, 0.0});
    for (int j = 0; j < 5; ++j)
        CHECK(flat[j] == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-12));

    const RealVec clipped = cascade_coeffs(4, {3, 1.0});
    CHECK(clipped[0] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
    CHECK(clipped[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
    CHECK(clipped[2] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
    CHECK(clipped[3] == doctest::Approx(0.0));

    // Frozen from a long-double evaluation of the staircase formula.
    const RealVec mid = cascade_coeffs(5, {2, 0.5});
    const double expected[5] = {0.61687, 0.61687, 0.33854, 0.27396, 0.22194};
    for (int j = 0; j < 5; ++j) CHECK(mid[j] == doctest::Approx(expected[j]).epsilon(2e-5));

    // Independent recomputation with a separate code path.
    long double t[5], norm_sq = 0.0L;
    for (int j = 0; j < 5; ++j) {
        if (j < 2) {
            t[j] = 1.0L;
        } else {
            const long double ramp = (j - 2 + 1) / 3.0L * 0.5L;
            t[j] = std::sqrt(1.0L - std::pow(ramp, 1.0L / 5.0L));
        }
        norm_sq += t[j] * t[j];
    }
    for (int j = 0; j < 5; ++j)
        CHECK(mid[j] == doctest::Approx(static_cast<double>(t[j] / std::sqrt(norm_sq)))
                            .epsilon(1e-12));
}

TEST_CASE("cascade coefficients are equal below j0 and nonincreasing above") {
    Rng rng(2718);
    for (int trial = 0; trial < 100; ++trial) {
        const int dim = 2 + static_cast<int>(rng.next_double() * 8);
        const int j0 = 1 + static_cast<int>(rng.next_double() * (dim - 1));
        const double alpha = rng.next_double();
        const RealVec c = cascade_coeffs(dim, {std::min(j0, dim - 1), alpha});
        CHECK(std::abs(c.squaredNorm() - 1.0) < 1e-12);
        for (int j = 1; j < std::min(j0, dim - 1); ++j)
            CHECK(c[j] == doctest::Approx(c[0]).epsilon(1e-12));
        for (int j = std::min(j0, dim - 1); j + 1 < dim; ++j) CHECK(c[j + 1] <= c[j] + 1e-12);
    }
}

TEST_CASE("cascade rejects invalid parameters") {
    CHECK_THROWS_AS((void)cascade_coeffs(5, {0, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS((void)cascade_coeffs(5, {5, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS((void)cascade_coeffs(5, {2, 1.5}), std::invalid_argument);
}

TEST_CASE("success probability is continuous along the cascade alpha axis") {
    // Steps of 1e-3 move P_corr by less than 1e-2 away from the endpoint
    // branch points; the staircase formula has square-root branches at
    // alpha = 0 and alpha = 1 where the worst step reaches ~2.3e-2.
    for (int dim = 2; dim <= 9; ++dim) {
        for (int j0 = 1; j0 <= dim - 1; ++j0) {
            double prev = -1.0;
            for (int i = 0; i <= 1000; ++i) {
                const SymmetricSetSpec spec{dim, dim, cascade_coeffs(dim, {j0, i * 1e-3})};
                const double pc = p_correct(spec).closed_form;
                if (i > 0) {
                    const double step = std::abs(pc - prev);
                    CHECK(step < 0.025);
                    if (i > 1 && i < 1000) CHECK(step < 1e-2);
                }
                prev = pc;
            }
        }
    }
}

TEST_CASE("random coefficients are deterministic, normalized, strictly positive") {
    const RealVec a = random_coeffs(3, 42);
    const RealVec b = random_coeffs(3, 42);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);

    Rng rng(1);
    for (int trial = 0; trial < 50; ++trial) {
        const int dim = 2 + static_cast<int>(rng.next_double() * 20);
        const RealVec c = random_coeffs(dim, rng.next_u64());
        CHECK(std::abs(c.squaredNorm() - 1.0) < 1e-12);
        CHECK(c.minCoeff() >= 0.0);
    }
}

TEST_CASE("random coefficients golden vector (D=21, seed=7)") {
    // Frozen from an independent implementation of the documented generator.
    const char* expected[21] = {
        "3.4719392951656311e-02", "1.9009699280660294e-01", "1.3448157173870376e-01",
        "1.6047428392133186e-02", "2.1639811675002625e-02", "2.2253780650446940e-02",
        "4.2955735118905231e-01", "3.3076648085345445e-01", "1.7848459525552832e-01",
        "2.5165231013997197e-01", "2.8863430108815057e-02", "2.5211644060901223e-01",
        "5.9556929138248428e-02", "5.5331561461759361e-02", "2.6802073510984459e-01",
        "1.0783321205542450e-01", "3.6929911959376455e-01", "7.9488190240180126e-02",
        "2.9443866763633370e-01", "3.2853312900976778e-01", "2.4988771928415998e-01"};
    const RealVec c = random_coeffs(21, 7);
    CHECK(c.minCoeff() > 0.0);
    for (int i = 0; i < 21; ++i) CHECK(format_sig17(c[i]) == expected[i]);
}

TEST_CASE("symmetric set overlaps") {
    SymmetricSetSpec spec{2, 2, RealVec(2)};
    spec.coeffs << std::cos(kPi / 6), std::sin(kPi / 6);
    const auto states = make_symmetric_set(spec);
    CHECK(std::real(states[0].dot(states[1])) == doctest::Approx(0.5).epsilon(1e-12));

    // Uniform D = N gives the orthogonal Fourier family.
    const int d = 4;
    SymmetricSetSpec fourier{d, d, RealVec::Constant(d, 1.0 / std::sqrt(double(d)))};
    const auto basis = make_symmetric_set(fourier);
    const ComplexMatrix g = oracle::gram(basis);
    CHECK((g - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("symmetric set Gram matrix matches brute force and is circulant") {
    SymmetricSetSpec spec{3, 5, RealVec::Constant(3, 1.0 / std::sqrt(3.0))};
    const auto states = make_symmetric_set(spec);
    const ComplexMatrix g = oracle::gram(states);
    for (int j = 0; j < 5; ++j) {
        for (int l = 0; l < 5; ++l) {
            Complex direct(0.0, 0.0);
            for (int n = 0; n < 3; ++n) direct += spec.omega(n * (l - j)) / 3.0;
            CHECK(std::abs(g(j, l) - direct) < 1e-12);
        }
    }

    Rng rng(55);
    for (int trial = 0; trial < 25; ++trial) {
        const auto s = oracle::random_spec(rng, 6, 9);
        const ComplexMatrix gm = oracle::gram(make_symmetric_set(s));
        const int n = s.num_states;
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l)
                CHECK(std::abs(gm(j, l) - gm((j + 1) % n, (l + 1) % n)) < 1e-12);
    }
}

TEST_CASE("symmetry shift cycles the set") {
    SymmetricSetSpec spec{3, 5, random_coeffs(3, 77)};
    const auto states = make_symmetric_set(spec);

    const StateVector same = symmetry_shift(states[2], spec, 0);
    CHECK((same - states[2]).cwiseAbs().maxCoeff() == 0.0);

    StateVector cycled = states[0];
    for (int i = 0; i < spec.num_states; ++i) cycled = symmetry_shift(cycled, spec, 1);
    CHECK((cycled - states[0]).cwiseAbs().maxCoeff() < 1e-12);

    for (int j = 0; j + 1 < spec.num_states; ++j) {
        const StateVector shifted = symmetry_shift(states[j], spec, 1);
        CHECK(std::norm(shifted.dot(states[j + 1])) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK((shifted - states[j + 1]).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("cyclic closure: U^j applied to the fiducial state reproduces state j") {
    Rng rng(808);
    for (int trial = 0; trial < 20; ++trial) {
        const auto spec = oracle::random_spec(rng, 7, 11);
        const auto states = make_symmetric_set(spec);
        for (int j = 0; j < spec.num_states; ++j) {
            const StateVector shifted = symmetry_shift(states[0], spec, j);
            CHECK((shifted - states[j]).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("spec validation rejects bad inputs") {
    RealVec c(2);
    c << 1.0, 0.0;
    CHECK_THROWS_AS(make_symmetric_set(SymmetricSetSpec{1, 2, RealVec::Ones(1)}),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_symmetric_set(SymmetricSetSpec{2, 1, c}), std::invalid_argument);
    RealVec bad = c;
    bad[0] = 0.9;
    CHECK_THROWS_AS(make_symmetric_set(SymmetricSetSpec{2, 2, bad}), std::invalid_argument);
    RealVec negative(2);
    negative << -0.6, 0.8;
    CHECK_THROWS_AS(make_symmetric_set(SymmetricSetSpec{2, 2, negative}), std::invalid_argument);
}

TEST_CASE("coefficient JSON round-trips bitwise") {
    const RealVec c = random_coeffs(7, 1234);
    const std::string json = coefficients_to_json(c);
    const RealVec back = coefficients_from_json(json);
    REQUIRE(back.size() == c.size());
    for (int i = 0; i < c.size(); ++i) CHECK(back[i] == c[i]);
    CHECK(json.find("e-") != std::string::npos);  // decimal-string payload
}
