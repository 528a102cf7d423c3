#include "doctest.h"
#include "qpt/states.hpp"
#include "test_util.hpp"

using namespace qpt;

namespace {

CountRecord rec(Basis b, double plus, double minus, double n_in) { return CountRecord{b, plus, minus, n_in}; }

// Noiseless counts for a (possibly loss-scaled) state: the independent oracle
// for the tomography round trips below.
std::array<CountRecord, 3> exact_counts(const Mat2& state, double n_in) {
    std::array<CountRecord, 3> out{};
    const std::array<Basis, 3> bases = {Basis::Z, Basis::X, Basis::Y};
    for (int b = 0; b < 3; ++b) {
        const Basis basis = bases[static_cast<std::size_t>(b)];
        out[static_cast<std::size_t>(b)] =
            rec(basis, n_in * trace(state * basis_projector(basis, +1)).real(),
                n_in * trace(state * basis_projector(basis, -1)).real(), n_in);
    }
    return out;
}

}  // namespace

TEST_CASE("scale_output reference cases") {
    SUBCASE("pure |0> at half flux becomes the lossy diag(1/2, 0)") {
        const DensityMatrix out = scale_output(pure_state(1, 0, "H"), 500, 1000);
        CHECK(out.matrix.at(0, 0).real() == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(std::abs(out.matrix.at(1, 1)) == 0.0);
        CHECK(out.trace() == doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("trace preserving case leaves the state alone") {
        DensityMatrix mixed{Complex(0.5) * Mat2::identity(), "I/2"};
        const DensityMatrix out = scale_output(mixed, 1000, 1000);
        CHECK(frobenius_distance(out.matrix, mixed.matrix) == 0.0);
    }
    SUBCASE("|+><+| at quarter flux") {
        const DensityMatrix out = scale_output(pure_state(1, 1, "D"), 250, 1000);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) CHECK(out.matrix.at(i, j).real() == doctest::Approx(0.125).epsilon(1e-15));
    }
}

TEST_CASE("scale_output rejects gain and zero flux") {
    const DensityMatrix rho = pure_state(1, 0, "H");
    CHECK_THROWS_AS(scale_output(rho, 1001, 1000), validation_error);
    CHECK_THROWS_AS(scale_output(rho, 10, 0), std::invalid_argument);
    // Unnormalized input is refused too.
    DensityMatrix lossy = rho;
    lossy.matrix *= Complex(0.5);
    CHECK_THROWS_AS(scale_output(lossy, 500, 1000), validation_error);
}

TEST_CASE("scale_output is linear in the state") {
    testutil::Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const DensityMatrix rho = testutil::random_state(rng);
        const double f = rng.uniform(0.1, 1.0);
        const DensityMatrix scaled = scale_output(rho, f * 1e6, 1e6);
        Mat2 expect = rho.matrix;
        expect *= Complex(f);
        CHECK(frobenius_distance(scaled.matrix, expect) <= 1e-15);
    }
}

TEST_CASE("stokes_from_counts reference cases") {
    SUBCASE("pure |0>, lossless") {
        const StokesVector s = stokes_from_counts(
            {rec(Basis::Z, 1000, 0, 1000), rec(Basis::X, 500, 500, 1000), rec(Basis::Y, 500, 500, 1000)});
        CHECK(s.s[0] == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(s.s[1] == doctest::Approx(0.0));
        CHECK(s.s[2] == doctest::Approx(0.0));
        CHECK(s.s[3] == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("|0> through a z polarizer at 50% loss") {
        const StokesVector s = stokes_from_counts(
            {rec(Basis::Z, 500, 0, 1000), rec(Basis::X, 250, 250, 1000), rec(Basis::Y, 250, 250, 1000)});
        CHECK(s.s[0] == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(s.s[3] == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(s.s[1] == doctest::Approx(0.0));
    }
    SUBCASE("pure |+> at 50% loss saturates the coherence bound") {
        const StokesVector s = stokes_from_counts(
            {rec(Basis::Z, 250, 250, 1000), rec(Basis::X, 500, 0, 1000), rec(Basis::Y, 250, 250, 1000)});
        CHECK(s.s[0] == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(s.s[1] == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(s.s[2] == doctest::Approx(0.0));
        CHECK(s.s[3] == doctest::Approx(0.0));
    }
}

TEST_CASE("stokes_from_counts validates its records") {
    const CountRecord z = rec(Basis::Z, 500, 0, 1000);
    const CountRecord x = rec(Basis::X, 250, 250, 1000);
    const CountRecord y = rec(Basis::Y, 250, 250, 1000);
    CHECK_THROWS_AS(stokes_from_counts({z, x, x}), validation_error);             // duplicate / missing basis
    CHECK_THROWS_AS(stokes_from_counts({z, x, rec(Basis::Y, 250, 250, 999)}), validation_error);  // n_in mismatch
    CHECK_THROWS_AS(stokes_from_counts({rec(Basis::Z, 800, 300, 1000), x, y}), validation_error); // flux exceeded
    CHECK_THROWS_AS(stokes_from_counts({rec(Basis::Z, -1, 0, 1000), x, y}), validation_error);
}

TEST_CASE("state_from_stokes reference cases") {
    SUBCASE("pure |0>") {
        const DensityMatrix rho = state_from_stokes(StokesVector{{1, 0, 0, 1}});
        CHECK(rho.matrix.at(0, 0).real() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(std::abs(rho.matrix.at(1, 1)) <= 1e-15);
    }
    SUBCASE("maximally mixed") {
        const DensityMatrix rho = state_from_stokes(StokesVector{{1, 0, 0, 0}});
        CHECK(frobenius_distance(rho.matrix, 0.5 * Mat2::identity()) <= 1e-15);
    }
    SUBCASE("lossy diag(1/2, 0)") {
        const DensityMatrix rho = state_from_stokes(StokesVector{{0.5, 0, 0, 0.5}});
        CHECK(rho.matrix.at(0, 0).real() == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(std::abs(rho.matrix.at(1, 1)) <= 1e-15);
        CHECK(rho.trace() == doctest::Approx(0.5).epsilon(1e-13));
    }
}

TEST_CASE("state_from_stokes rejects nonpositive flux") {
    CHECK_THROWS_AS(state_from_stokes(StokesVector{{0, 0, 0, 0}}), validation_error);
    CHECK_THROWS_AS(state_from_stokes(StokesVector{{-0.5, 0, 0, 0}}), validation_error);
}

TEST_CASE("state_from_stokes projects unphysical vectors to the boundary") {
    // |S| > S0: noise pushed the Bloch vector outside the sphere.
    const DensityMatrix rho = state_from_stokes(StokesVector{{1.0, 0, 0, 1.2}});
    rho.validate();
    CHECK(rho.trace() == doctest::Approx(1.0).epsilon(1e-13));
    // Projection lands on the pure state along +z.
    CHECK(rho.matrix.at(0, 0).real() == doctest::Approx(1.0).epsilon(1e-13));
    const HermitianEig2 eig = hermitian_eig2(rho.matrix);
    CHECK(eig.eigenvalues[0] >= -1e-15);
}

TEST_CASE("state_from_stokes is idempotent on physical states and preserves flux") {
    testutil::Rng rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        const DensityMatrix rho = testutil::random_state(rng);
        const double f = rng.uniform(0.05, 1.0);
        Mat2 scaled = rho.matrix;
        scaled *= Complex(f);
        const StokesVector s = stokes_of(DensityMatrix{scaled, ""});

        const DensityMatrix back = state_from_stokes(s);
        CHECK(back.trace() == doctest::Approx(s.s[0]).epsilon(1e-9));
        CHECK(frobenius_distance(back.matrix, scaled) <= 1e-12);

        // Projecting the projection changes nothing.
        const DensityMatrix again = state_from_stokes(stokes_of(back));
        CHECK(frobenius_distance(again.matrix, back.matrix) <= 1e-12);
    }
}

TEST_CASE("noiseless tomography round trip recovers the scaled state exactly") {
    testutil::Rng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const DensityMatrix rho = testutil::random_state(rng);
        const double f = rng.uniform(0.05, 1.0);
        Mat2 scaled = rho.matrix;
        scaled *= Complex(f);

        const StokesVector s = stokes_from_counts(exact_counts(scaled, 1e6));
        const StokesVector truth = stokes_of(DensityMatrix{scaled, ""});
        for (int i = 0; i < 4; ++i)
            CHECK(std::abs(s.s[static_cast<std::size_t>(i)] - truth.s[static_cast<std::size_t>(i)]) <= 1e-12);

        const DensityMatrix back = state_from_stokes(s);
        CHECK(frobenius_distance(back.matrix, scaled) <= 1e-12);
    }
}

TEST_CASE("DensityMatrix::validate enforces the physicality window") {
    DensityMatrix ok = pure_state(1, 2, "ok");
    ok.validate();

    DensityMatrix traceless;
    traceless.matrix = Mat2::zero();
    CHECK_THROWS_AS(traceless.validate(), validation_error);

    DensityMatrix overweight;
    overweight.matrix = Mat2::identity();  // trace 2
    CHECK_THROWS_AS(overweight.validate(), validation_error);

    DensityMatrix negative;
    negative.matrix.at(0, 0) = 1.2;
    negative.matrix.at(1, 1) = -0.3;
    CHECK_THROWS_AS(negative.validate(), validation_error);
}
