#include "qpt/experiment.hpp"

#include <cmath>

namespace qpt {

namespace detail {

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double SplitMix64::uniform() {
    // (0, 1]: never zero, safe under log().
    return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
}

std::uint64_t stream_seed(std::uint64_t record_seed, int probe, int basis, int detector, int side) {
    SplitMix64 mix(record_seed);
    std::uint64_t s = mix.next();
    for (int field : {probe, basis, detector, side}) {
        SplitMix64 fold(s ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(field + 0x101)));
        s = fold.next();
    }
    return s;
}

double poisson_sample(double mean, SplitMix64& rng) {
    if (!(mean > 0)) return 0;
    if (mean < 50.0) {
        // Knuth inversion by product of uniforms.
        const double limit = std::exp(-mean);
        double p = 1.0;
        double k = -1.0;
        do {
            k += 1.0;
            p *= rng.uniform();
        } while (p > limit);
        return k;
    }
    // Gaussian approximation; skew ~ mean^{-1/2} is negligible at these fluxes.
    const double u1 = rng.uniform();
    const double u2 = rng.uniform();
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    return std::max(0.0, std::round(mean + std::sqrt(mean) * z));
}

}  // namespace detail

void NoiseSpec::validate() const {
    if (!std::isfinite(preparation_rotation))
        throw std::invalid_argument("NoiseSpec: preparation_rotation must be finite");
    if (!(preparation_depolarization >= 0.0 && preparation_depolarization <= 1.0))
        throw std::invalid_argument("NoiseSpec: preparation_depolarization must be in [0, 1]");
}

namespace {

Mat2 rotation_unitary(Axis axis, double theta) {
    // exp(-i theta sigma_axis): rotates the Bloch vector by 2*theta.
    const Complex minus_i{0.0, -1.0};
    const int idx = static_cast<int>(axis) + 2;
    return Complex(std::cos(theta)) * Mat2::identity() + minus_i * Complex(std::sin(theta)) * pauli(idx);
}

DensityMatrix prepare_probe(const DensityMatrix& ideal, Axis rotation_axis, const NoiseSpec& noise) {
    const Mat2 u = rotation_unitary(rotation_axis, noise.preparation_rotation);
    Mat2 m = u * ideal.matrix * adjoint(u);
    const double d = noise.preparation_depolarization;
    m = Complex(1.0 - d) * m + Complex(0.5 * d) * Mat2::identity();
    DensityMatrix out;
    out.matrix = hermitian_part(m);
    out.label = ideal.label;
    return out;
}

constexpr std::array<Basis, 3> kBases = {Basis::Z, Basis::X, Basis::Y};

// side: 0 = input tap, 1 = channel output.
std::array<CountRecord, 3> count_settings(const Mat2& state, double n_in, bool shot_noise,
                                          std::uint64_t seed, int probe, int side) {
    std::array<CountRecord, 3> records{};
    for (int b = 0; b < 3; ++b) {
        const Basis basis = kBases[static_cast<std::size_t>(b)];
        double plus = n_in * trace(state * basis_projector(basis, +1)).real();
        double minus = n_in * trace(state * basis_projector(basis, -1)).real();
        plus = std::max(plus, 0.0);
        minus = std::max(minus, 0.0);
        if (shot_noise) {
            detail::SplitMix64 rng_plus(detail::stream_seed(seed, probe, b, 0, side));
            detail::SplitMix64 rng_minus(detail::stream_seed(seed, probe, b, 1, side));
            plus = detail::poisson_sample(plus, rng_plus);
            minus = detail::poisson_sample(minus, rng_minus);
            // Clamp to the flux bound so CountRecord invariants hold.
            plus = std::min(plus, n_in);
            minus = std::min(minus, n_in - plus);
        }
        records[static_cast<std::size_t>(b)] = CountRecord{basis, plus, minus, n_in};
    }
    return records;
}

}  // namespace

std::array<DensityMatrix, 4> make_probes(const NoiseSpec& noise) {
    noise.validate();
    const std::array<DensityMatrix, 4> ideal = {
        pure_state(1, 0, "H"),
        pure_state(0, 1, "V"),
        pure_state(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), "D"),
        pure_state(1.0 / std::sqrt(2.0), Complex(0, 1.0 / std::sqrt(2.0)), "R"),
    };
    const std::array<Axis, 4> axes = {Axis::y, Axis::y, Axis::z, Axis::z};
    std::array<DensityMatrix, 4> probes;
    for (int j = 0; j < 4; ++j)
        probes[static_cast<std::size_t>(j)] =
            prepare_probe(ideal[static_cast<std::size_t>(j)], axes[static_cast<std::size_t>(j)], noise);
    return probes;
}

ExperimentRecord simulate_counts(const ProcessMatrix& channel, const std::array<DensityMatrix, 4>& probes,
                                 double n_in, bool shot_noise, std::uint64_t seed) {
    if (!(n_in >= 1)) throw std::invalid_argument("simulate_counts: n_in must be at least 1");
    validate_physical(channel);
    for (const auto& probe : probes) probe.validate();

    ExperimentRecord record;
    record.n_in = n_in;
    record.seed = seed;
    record.shot_noise = shot_noise;
    record.channel_truth = channel;

    for (int j = 0; j < 4; ++j) {
        const DensityMatrix& probe = probes[static_cast<std::size_t>(j)];
        ProbeSpec& spec = record.probes[static_cast<std::size_t>(j)];
        spec.label = probe.label;
        spec.state = probe;
        spec.input_counts = count_settings(probe.matrix, n_in, shot_noise, seed, j, 0);
        const DensityMatrix out = apply_channel(channel, probe);
        spec.output_counts = count_settings(out.matrix, n_in, shot_noise, seed, j, 1);
    }
    return record;
}

ExperimentRecord simulate_experiment(const ProcessMatrix& channel, const NoiseSpec& noise, double n_in,
                                     std::uint64_t seed) {
    ExperimentRecord record = simulate_counts(channel, make_probes(noise), n_in, noise.shot_noise, seed);
    for (auto& spec : record.probes) {
        spec.rotation = noise.preparation_rotation;
        spec.depolarization = noise.preparation_depolarization;
    }
    return record;
}

ReconstructionResult reconstruct_raw(const ExperimentRecord& record, bool assume_ideal_inputs) {
    if (record.schema_version != 1)
        throw validation_error("reconstruct_raw: unsupported schema_version " +
                               std::to_string(record.schema_version));
    if (!(record.n_in > 0)) throw validation_error("reconstruct_raw: n_in must be positive");

    std::array<DensityMatrix, 4> inputs;
    std::array<DensityMatrix, 4> outputs;
    ReconstructionResult result{};

    for (int j = 0; j < 4; ++j) {
        const ProbeSpec& spec = record.probes[static_cast<std::size_t>(j)];

        // Input tomography yields a normalized state: the probe tap sees the
        // full input flux, so only the polarization content is informative.
        if (!assume_ideal_inputs) {
            const StokesVector s = stokes_from_counts(spec.input_counts);
            if (!(s.s[0] > 0))
                throw validation_error("reconstruct_raw: probe '" + spec.label + "' has no input flux");
            const StokesVector normalized{{1.0, s.s[1] / s.s[0], s.s[2] / s.s[0], s.s[3] / s.s[0]}};
            inputs[static_cast<std::size_t>(j)] = state_from_stokes(normalized, spec.label);
        }

        // Output tomography, then the loss scaling by measured transmission.
        // Roundoff can push the measured fraction marginally past 1; clamp to
        // the physical range before scaling.
        const StokesVector s_out = stokes_from_counts(spec.output_counts);
        const double transmitted = std::min(s_out.s[0], 1.0);
        result.transmission[static_cast<std::size_t>(j)] = transmitted;
        if (transmitted <= 0) {
            // Fully absorbed probe: the output ensemble is empty.
            outputs[static_cast<std::size_t>(j)] = DensityMatrix{Mat2::zero(), spec.label + "'"};
        } else {
            const StokesVector normalized{
                {1.0, s_out.s[1] / transmitted, s_out.s[2] / transmitted, s_out.s[3] / transmitted}};
            const DensityMatrix fitted = state_from_stokes(normalized, spec.label + "'");
            outputs[static_cast<std::size_t>(j)] =
                scale_output(fitted, transmitted * record.n_in, record.n_in);
        }
    }

    if (assume_ideal_inputs) inputs = make_probes(NoiseSpec{});

    result.probes = probe_coefficients(inputs);
    const BetaTensor beta = build_beta(result.probes);
    result.beta_condition_number = beta.condition_number;
    result.lambda = lambda_from_outputs(outputs);
    result.raw_chi = invert_chi(beta, result.lambda);
    return result;
}

PipelineResult run_pipeline(const ExperimentRecord& record, bool assume_ideal_inputs, const FitConfig& config) {
    const ReconstructionResult rec = reconstruct_raw(record, assume_ideal_inputs);
    PipelineResult out{};
    out.raw_chi = rec.raw_chi;
    out.beta_condition_number = rec.beta_condition_number;
    out.transmission = rec.transmission;
    out.fit = fit_physical(rec.raw_chi, config);
    out.report = constraint_report(out.fit.chi, kFeasibilityTol);
    return out;
}

}  // namespace qpt
