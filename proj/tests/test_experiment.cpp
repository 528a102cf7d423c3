#include "doctest.h"
#include "qpt/experiment.hpp"
#include "test_util.hpp"

using namespace qpt;

namespace {

const CountRecord& find_basis(const std::array<CountRecord, 3>& records, Basis b) {
    for (const auto& r : records)
        if (r.basis == b) return r;
    throw std::logic_error("basis missing");
}

}  // namespace

TEST_CASE("make_probes reference cases") {
    SUBCASE("zero noise gives the four ideal projectors") {
        const auto probes = make_probes(NoiseSpec{});
        CHECK(probes[0].label == "H");
        CHECK(probes[1].label == "V");
        CHECK(probes[2].label == "D");
        CHECK(probes[3].label == "R");
        Mat2 h;
        h.at(0, 0) = 1;
        CHECK(frobenius_distance(probes[0].matrix, h) <= 1e-15);
        Mat2 v;
        v.at(1, 1) = 1;
        CHECK(frobenius_distance(probes[1].matrix, v) <= 1e-15);
        CHECK(frobenius_distance(probes[2].matrix, 0.5 * (Mat2::identity() + pauli(2))) <= 1e-15);
        CHECK(frobenius_distance(probes[3].matrix, 0.5 * (Mat2::identity() + pauli(3))) <= 1e-15);
    }
    SUBCASE("full depolarization flattens every probe to I/2") {
        NoiseSpec noise;
        noise.preparation_depolarization = 1.0;
        for (const auto& probe : make_probes(noise))
            CHECK(frobenius_distance(probe.matrix, 0.5 * Mat2::identity()) <= 1e-15);
    }
    SUBCASE("rotation 0.05 keeps H pure and tilts the Bloch vector by 0.1") {
        NoiseSpec noise;
        noise.preparation_rotation = 0.05;
        const auto probes = make_probes(noise);
        const DensityMatrix& h = probes[0];
        const double purity = trace(h.matrix * h.matrix).real();
        CHECK(purity == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(trace(h.matrix * pauli(4)).real() == doctest::Approx(std::cos(0.1)).epsilon(1e-12));
        CHECK(h.trace() == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("parameter validation") {
        NoiseSpec bad;
        bad.preparation_depolarization = 1.5;
        CHECK_THROWS_AS(make_probes(bad), std::invalid_argument);
    }
}

TEST_CASE("simulate_counts reference cases") {
    SUBCASE("identity channel, ideal H probe, noiseless") {
        const ExperimentRecord rec = simulate_counts(identity_channel(), make_probes(NoiseSpec{}), 1000, false, 0);
        const auto& out = rec.probes[0].output_counts;
        CHECK(find_basis(out, Basis::Z).counts_plus == doctest::Approx(1000).epsilon(1e-12));
        CHECK(find_basis(out, Basis::Z).counts_minus == doctest::Approx(0).epsilon(1e-12));
        CHECK(find_basis(out, Basis::X).counts_plus == doctest::Approx(500).epsilon(1e-12));
        CHECK(find_basis(out, Basis::X).counts_minus == doctest::Approx(500).epsilon(1e-12));
        CHECK(find_basis(out, Basis::Y).counts_plus == doctest::Approx(500).epsilon(1e-12));
    }
    SUBCASE("polarizer-z on the ideal D probe transmits half") {
        const ExperimentRecord rec =
            simulate_counts(polarizer_channel(Axis::z), make_probes(NoiseSpec{}), 1000, false, 0);
        const auto& out = rec.probes[2].output_counts;  // D
        CHECK(find_basis(out, Basis::Z).counts_plus == doctest::Approx(500).epsilon(1e-12));
        CHECK(find_basis(out, Basis::Z).counts_minus == doctest::Approx(0).epsilon(1e-12));
        CHECK(find_basis(out, Basis::X).counts_plus == doctest::Approx(250).epsilon(1e-12));
        CHECK(find_basis(out, Basis::X).counts_minus == doctest::Approx(250).epsilon(1e-12));
        CHECK(find_basis(out, Basis::Y).counts_plus == doctest::Approx(250).epsilon(1e-12));
    }
    SUBCASE("shot noise with a fixed seed is bit-identical across runs") {
        NoiseSpec noise;
        noise.shot_noise = true;
        const ExperimentRecord a = simulate_experiment(hadamard_channel(), noise, 1e5, 42);
        const ExperimentRecord b = simulate_experiment(hadamard_channel(), noise, 1e5, 42);
        for (int j = 0; j < 4; ++j)
            for (int s = 0; s < 3; ++s) {
                CHECK(a.probes[static_cast<std::size_t>(j)].output_counts[static_cast<std::size_t>(s)].counts_plus ==
                      b.probes[static_cast<std::size_t>(j)].output_counts[static_cast<std::size_t>(s)].counts_plus);
                CHECK(a.probes[static_cast<std::size_t>(j)].input_counts[static_cast<std::size_t>(s)].counts_minus ==
                      b.probes[static_cast<std::size_t>(j)].input_counts[static_cast<std::size_t>(s)].counts_minus);
            }
    }
    SUBCASE("different seeds give different counts") {
        NoiseSpec noise;
        noise.shot_noise = true;
        const ExperimentRecord a = simulate_experiment(hadamard_channel(), noise, 1e5, 1);
        const ExperimentRecord b = simulate_experiment(hadamard_channel(), noise, 1e5, 2);
        int differing = 0;
        for (int j = 0; j < 4; ++j)
            for (int s = 0; s < 3; ++s)
                if (a.probes[static_cast<std::size_t>(j)].output_counts[static_cast<std::size_t>(s)].counts_plus !=
                    b.probes[static_cast<std::size_t>(j)].output_counts[static_cast<std::size_t>(s)].counts_plus)
                    ++differing;
        CHECK(differing > 6);
    }
    SUBCASE("nonphysical channel is rejected") {
        ProcessMatrix bad = identity_channel();
        bad.chi *= Complex(1.5);
        CHECK_THROWS_AS(simulate_counts(bad, make_probes(NoiseSpec{}), 1000, false, 0), validation_error);
    }
    SUBCASE("flux below one shot is rejected") {
        CHECK_THROWS_AS(simulate_counts(identity_channel(), make_probes(NoiseSpec{}), 0, false, 0),
                        std::invalid_argument);
    }
    SUBCASE("counts respect the flux bound under noise") {
        NoiseSpec noise;
        noise.shot_noise = true;
        const ExperimentRecord rec = simulate_experiment(identity_channel(), noise, 1e4, 9);
        for (const auto& probe : rec.probes)
            for (const auto& counts : {probe.input_counts, probe.output_counts})
                for (const auto& r : counts) CHECK(r.counts_plus + r.counts_minus <= rec.n_in);
    }
}

TEST_CASE("independent per-setting streams: one setting's draw does not depend on the others") {
    // Same seed, two different channels sharing the truth on probe H: the H
    // input-tap counts must coincide even though every output differs.
    NoiseSpec noise;
    noise.shot_noise = true;
    const auto probes = make_probes(noise);
    const ExperimentRecord a = simulate_counts(identity_channel(), probes, 1e5, true, 7);
    const ExperimentRecord b = simulate_counts(hadamard_channel(), probes, 1e5, true, 7);
    for (int j = 0; j < 4; ++j)
        for (int s = 0; s < 3; ++s) {
            CHECK(a.probes[static_cast<std::size_t>(j)].input_counts[static_cast<std::size_t>(s)].counts_plus ==
                  b.probes[static_cast<std::size_t>(j)].input_counts[static_cast<std::size_t>(s)].counts_plus);
            CHECK(a.probes[static_cast<std::size_t>(j)].input_counts[static_cast<std::size_t>(s)].counts_minus ==
                  b.probes[static_cast<std::size_t>(j)].input_counts[static_cast<std::size_t>(s)].counts_minus);
        }
}

TEST_CASE("poisson sampler moments") {
    detail::SplitMix64 rng(12345);
    for (double mean : {0.5, 7.0, 200.0, 50000.0}) {
        const int n = 20000;
        double sum = 0, sum2 = 0;
        for (int i = 0; i < n; ++i) {
            const double k = detail::poisson_sample(mean, rng);
            sum += k;
            sum2 += k * k;
        }
        const double m = sum / n;
        const double var = sum2 / n - m * m;
        CHECK(std::abs(m - mean) <= 5.0 * std::sqrt(mean / n));
        CHECK(std::abs(var - mean) <= 0.1 * mean + 1.0);
    }
    CHECK(detail::poisson_sample(0.0, rng) == 0.0);
}

TEST_CASE("transmission bookkeeping") {
    SUBCASE("noiseless transmission equals tr(rho P) exactly") {
        for (const char* name : {"identity", "polarizer-z", "amplitude-damping:0.36", "attenuator:0.7"}) {
            const ProcessMatrix chi = canonical_channel(name);
            const auto probes = make_probes(NoiseSpec{});
            const ExperimentRecord rec = simulate_counts(chi, probes, 1e6, false, 0);
            const ReconstructionResult rr = reconstruct_raw(rec, false);
            for (int j = 0; j < 4; ++j) {
                const double expect = trace(probes[static_cast<std::size_t>(j)].matrix * p_matrix(chi).matrix).real();
                CHECK(std::abs(rr.transmission[static_cast<std::size_t>(j)] - std::min(expect, 1.0)) <= 1e-12);
            }
        }
    }
    SUBCASE("noisy transmission stays within 3 sigma of tr(rho P)") {
        const double n_in = 1e5;
        NoiseSpec noise;
        noise.shot_noise = true;
        const ProcessMatrix chi = amplitude_damping_channel(0.36);
        const auto probes = make_probes(noise);
        for (std::uint64_t seed : {11ull, 12ull, 13ull, 14ull, 15ull}) {
            const ExperimentRecord rec = simulate_counts(chi, probes, n_in, true, seed);
            const ReconstructionResult rr = reconstruct_raw(rec, false);
            for (int j = 0; j < 4; ++j) {
                const double expect = trace(probes[static_cast<std::size_t>(j)].matrix * p_matrix(chi).matrix).real();
                // Var(S0) ~ expect/(3 n_in) for three independent settings.
                const double sigma = std::sqrt(std::max(expect, 1e-6) / (3.0 * n_in));
                CHECK(std::abs(rr.transmission[static_cast<std::size_t>(j)] - expect) <= 3.0 * sigma + 1e-6);
            }
        }
    }
}

TEST_CASE("run_pipeline noiseless reference cases") {
    SUBCASE("identity channel: raw and fitted chi coincide with the truth") {
        const ExperimentRecord rec = simulate_experiment(identity_channel(), NoiseSpec{}, 1e6, 0);
        const PipelineResult res = run_pipeline(rec, false);
        CHECK(frobenius_distance(res.raw_chi.chi, identity_channel().chi) <= 1e-10);
        CHECK(frobenius_distance(res.fit.chi.chi, identity_channel().chi) <= 1e-10);
        CHECK(res.report.tp_consistent);
    }
    SUBCASE("polarizer: trace 1/2 and the bound saturated at 1") {
        const ExperimentRecord rec = simulate_experiment(polarizer_channel(Axis::z), NoiseSpec{}, 1e6, 0);
        const PipelineResult res = run_pipeline(rec, false);
        CHECK(frobenius_distance(res.fit.chi.chi, polarizer_channel(Axis::z).chi) <= 1e-9);
        CHECK(res.report.trace_chi == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(res.report.p_eig_plus == doctest::Approx(1.0).epsilon(1e-10));
        CHECK_FALSE(res.report.tp_consistent);
        // Probe V is fully absorbed: measured transmission 0.
        CHECK(res.transmission[1] == doctest::Approx(0.0));
    }
    SUBCASE("rotated probes: measured inputs recover the truth, assumed ideals do not") {
        NoiseSpec noise;
        noise.preparation_rotation = 0.05;
        const ProcessMatrix truth = amplitude_damping_channel(0.36);
        const ExperimentRecord rec = simulate_experiment(truth, noise, 1e6, 0);
        const PipelineResult measured = run_pipeline(rec, false);
        const PipelineResult assumed = run_pipeline(rec, true);
        CHECK(frobenius_distance(measured.fit.chi.chi, truth.chi) <= 1e-9);
        CHECK(frobenius_distance(assumed.fit.chi.chi, truth.chi) > 0.01);
    }
}

TEST_CASE("run_pipeline propagates tomographic incompleteness") {
    NoiseSpec mush;
    mush.preparation_depolarization = 1.0;
    const ExperimentRecord rec = simulate_experiment(identity_channel(), mush, 1e5, 0);
    CHECK_THROWS_AS(run_pipeline(rec, false), tomography_error);
}

TEST_CASE("noisy pipeline error shrinks with flux (quick scaling probe)") {
    // Full statistical check lives in the acceptance suite; here a smoke test
    // with a handful of seeds.
    NoiseSpec noise;
    noise.shot_noise = true;
    const ProcessMatrix truth = hadamard_channel();
    auto median_err = [&](double n_in) {
        std::vector<double> errs;
        for (std::uint64_t seed = 100; seed < 110; ++seed) {
            const ExperimentRecord rec = simulate_experiment(truth, noise, n_in, seed);
            errs.push_back(frobenius_distance(run_pipeline(rec, false).fit.chi.chi, truth.chi));
        }
        std::sort(errs.begin(), errs.end());
        return 0.5 * (errs[4] + errs[5]);
    };
    CHECK(median_err(1e6) < median_err(1e4));
}
