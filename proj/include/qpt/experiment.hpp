#pragma once

// Synthetic experiments: probe preparation with optional coherent rotation
// and depolarization errors, photon counting through a channel with optional
// Poisson shot noise, and the full reconstruction pipeline (state tomography
// on inputs and outputs, loss scaling, beta inversion, physical fit).
//
// All randomness derives from the single record seed through per-setting
// counter-based streams, so results are independent of evaluation order.

#include <cstdint>
#include <optional>

#include "qpt/fitting.hpp"
#include "qpt/inversion.hpp"

namespace qpt {

struct NoiseSpec {
    bool shot_noise = false;
    double preparation_rotation = 0.0;       // radians; Bloch vector tilts by twice this
    double preparation_depolarization = 0.0; // fraction mixed with I/2, in [0, 1]

    void validate() const;
};

struct ProbeSpec {
    std::string label;
    double rotation = 0.0;
    double depolarization = 0.0;
    DensityMatrix state;  // prepared state (ground truth for synthetic records)
    std::array<CountRecord, 3> input_counts{};
    std::array<CountRecord, 3> output_counts{};
};

struct ExperimentRecord {
    int schema_version = 1;
    double n_in = 0;  // shots per analyzer setting
    std::uint64_t seed = 0;
    bool shot_noise = false;
    std::optional<ProcessMatrix> channel_truth;  // absent for real lab data
    std::array<ProbeSpec, 4> probes;
};

// Ideal H, V, D, R projectors with the preparation errors applied: H/V are
// rotated about the y axis, D/R about the z axis, then mixed with I/2.
std::array<DensityMatrix, 4> make_probes(const NoiseSpec& noise);

// Counts for input-side tomography (tapping the probe itself) and for the
// channel output, three two-outcome analyzer settings each.  Requires a
// physical channel.  With shot_noise the counts are Poisson draws clamped to
// the flux bound; without it they are exact real-valued expectations.
ExperimentRecord simulate_counts(const ProcessMatrix& channel, const std::array<DensityMatrix, 4>& probes,
                                 double n_in, bool shot_noise, std::uint64_t seed);

// make_probes + simulate_counts, with the noise parameters stamped into the record.
ExperimentRecord simulate_experiment(const ProcessMatrix& channel, const NoiseSpec& noise, double n_in,
                                     std::uint64_t seed);

struct ReconstructionResult {
    ProcessMatrix raw_chi;
    ProbeSet probes;
    LambdaVector lambda;
    double beta_condition_number = 0;
    std::array<double, 4> transmission{};  // measured per-probe transmitted fraction
};

// QST on inputs (skipped when assume_ideal_inputs substitutes the ideal
// probe coefficients) and outputs, loss scaling by the measured transmitted
// fraction, beta assembly and linear inversion to a raw chi.
ReconstructionResult reconstruct_raw(const ExperimentRecord& record, bool assume_ideal_inputs);

struct PipelineResult {
    ProcessMatrix raw_chi;
    FitResult fit;
    ConstraintReport report;  // on the fitted chi, tolerance kFeasibilityTol
    double beta_condition_number = 0;
    std::array<double, 4> transmission{};
};

PipelineResult run_pipeline(const ExperimentRecord& record, bool assume_ideal_inputs,
                            const FitConfig& config = {});

namespace detail {

// splitmix64: tiny counter-style generator, one independent stream per
// (seed, probe, basis, detector, side) tuple.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();
    double uniform();  // in (0, 1]

private:
    std::uint64_t state_;
};

std::uint64_t stream_seed(std::uint64_t record_seed, int probe, int basis, int detector, int side);

// Exact inversion sampling below mean 50, Gaussian approximation above;
// deterministic given the stream.
double poisson_sample(double mean, SplitMix64& rng);

}  // namespace detail

}  // namespace qpt
