// qpt: command-line driver for single-qubit process tomography.
//
// Subcommands: simulate, reconstruct, check, fit, kraus.  Data travels in
// versioned JSON files; human-readable summaries go to the standard streams.
// Exit codes: 0 ok, 2 usage/parse, 3 I/O, 4 singular beta, 5 constraint
// violation, 6 fit failure.

#include <chrono>
#include <ctime>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qpt/io.hpp"

namespace {

using nlohmann::json;

std::string format_double(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

std::string timestamp_utc() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

bool looks_like_file(const std::string& spec) {
    return spec.find('/') != std::string::npos ||
           (spec.size() > 5 && spec.substr(spec.size() - 5) == ".json");
}

// Channel from a canonical name or a chi JSON file; must be physical.
qpt::ProcessMatrix load_channel(const std::string& spec) {
    qpt::ProcessMatrix chi;
    if (looks_like_file(spec)) {
        chi = qpt::chi_file_from_json(qpt::read_json_file(spec)).chi;
    } else {
        chi = qpt::canonical_channel(spec);
    }
    qpt::validate_physical(chi);
    return chi;
}

struct SimulateArgs {
    std::string channel;
    std::string out;
    std::int64_t shots = 0;
    std::uint64_t seed = 0;
    bool shot_noise = false;
    double prep_rotation = 0.0;
    double prep_depol = 0.0;
};

int cmd_simulate(const SimulateArgs& args) {
    const qpt::ProcessMatrix channel = load_channel(args.channel);
    if (args.shots < 1) throw std::invalid_argument("--shots must be at least 1");

    qpt::NoiseSpec noise;
    noise.shot_noise = args.shot_noise;
    noise.preparation_rotation = args.prep_rotation;
    noise.preparation_depolarization = args.prep_depol;

    qpt::ExperimentFile file;
    file.record = qpt::simulate_experiment(channel, noise, static_cast<double>(args.shots), args.seed);
    file.provenance = {
        {"command", "simulate"},
        {"channel", args.channel},
        {"shots", std::to_string(args.shots)},
        {"seed", std::to_string(args.seed)},
        {"shot_noise", args.shot_noise ? "true" : "false"},
        {"prep_rotation", format_double(args.prep_rotation)},
        {"prep_depolarization", format_double(args.prep_depol)},
        {"timestamp", timestamp_utc()},
    };
    qpt::write_json_file(args.out, qpt::to_json(file));
    std::cerr << "wrote experiment record to " << args.out << "\n";
    return 0;
}

struct ReconstructArgs {
    std::string experiment;
    std::string out;
    bool assume_ideal_inputs = false;
};

int cmd_reconstruct(const ReconstructArgs& args) {
    const qpt::ExperimentFile file = qpt::experiment_file_from_json(qpt::read_json_file(args.experiment));
    const qpt::ReconstructionResult rec = qpt::reconstruct_raw(file.record, args.assume_ideal_inputs);

    qpt::ChiFile out;
    out.chi = rec.raw_chi;
    out.provenance = {
        {"command", "reconstruct"},
        {"experiment", args.experiment},
        {"assume_ideal_inputs", args.assume_ideal_inputs ? "true" : "false"},
        {"beta_condition_number", format_double(rec.beta_condition_number)},
        {"probe_condition_number", format_double(rec.probes.condition_number)},
        {"timestamp", timestamp_utc()},
    };
    for (int j = 0; j < 4; ++j)
        out.provenance["transmission_" + file.record.probes[static_cast<std::size_t>(j)].label] =
            format_double(rec.transmission[static_cast<std::size_t>(j)]);
    qpt::write_json_file(args.out, qpt::to_json(out));
    std::cerr << "wrote raw chi to " << args.out << " (beta condition number "
              << rec.beta_condition_number << ")\n";
    return 0;
}

struct CheckArgs {
    std::string chi;
    std::string out;
    double tolerance = qpt::kFeasibilityTol;  // matches what `fit` guarantees
};

int cmd_check(const CheckArgs& args) {
    const qpt::ChiFile file = qpt::chi_file_from_json(qpt::read_json_file(args.chi));
    qpt::ReportFile report;
    report.report = qpt::constraint_report(file.chi, args.tolerance);
    report.verdicts = qpt::verdict_lines(report.report);
    if (!args.out.empty()) qpt::write_json_file(args.out, qpt::to_json(report));
    for (const auto& line : report.verdicts) std::cout << line << "\n";
    return report.report.eq10_satisfied ? 0 : 5;
}

struct FitArgs {
    std::string raw;
    std::string out;
    std::string mode = "general";
    int max_iterations = 5000;
    int penalty_stages = 6;
};

int cmd_fit(const FitArgs& args) {
    const qpt::ChiFile file = qpt::chi_file_from_json(qpt::read_json_file(args.raw));

    qpt::FitConfig config;
    if (args.mode == "general") {
        config.mode = qpt::FitMode::general;
    } else if (args.mode == "tp") {
        config.mode = qpt::FitMode::trace_preserving;
    } else {
        throw std::invalid_argument("--mode must be 'general' or 'tp'");
    }
    config.max_iterations = args.max_iterations;
    config.penalty_stages = args.penalty_stages;

    auto provenance_for = [&](const qpt::FitResult& fit) {
        qpt::Provenance p = {
            {"command", "fit"},
            {"input", args.raw},
            {"mode", args.mode},
            {"fit_objective", format_double(fit.objective)},
            {"fit_iterations", std::to_string(fit.iterations)},
            {"fit_constraint_violation", format_double(fit.constraint_violation)},
            {"fit_converged", fit.converged ? "true" : "false"},
            {"timestamp", timestamp_utc()},
        };
        return p;
    };

    try {
        const qpt::FitResult fit = qpt::fit_physical(file.chi, config);
        qpt::ChiFile out{fit.chi, provenance_for(fit)};
        qpt::write_json_file(args.out, qpt::to_json(out));
        std::cerr << "wrote physical chi to " << args.out << " (objective " << fit.objective
                  << ", violation " << fit.constraint_violation << ")\n";
        return 0;
    } catch (const qpt::fit_error& err) {
        // Keep the best iterate for inspection next to the requested output.
        qpt::ChiFile best{err.best().chi, provenance_for(err.best())};
        qpt::write_json_file(args.out + ".failed", qpt::to_json(best));
        std::cerr << "fit failed: " << err.what() << "\nbest iterate written to " << args.out
                  << ".failed\n";
        return 6;
    }
}

struct KrausArgs {
    std::string chi;
    std::string out;
};

int cmd_kraus(const KrausArgs& args) {
    const qpt::ChiFile file = qpt::chi_file_from_json(qpt::read_json_file(args.chi));

    qpt::KrausSet set;
    try {
        set = qpt::kraus_from_chi(file.chi);
    } catch (const qpt::validation_error& err) {
        std::cerr << "chi is not physical: " << err.what() << "\n";
        return 5;
    }

    // Completeness check: sum E^dag E must reproduce the P matrix.
    qpt::Mat2 sum;
    for (const auto& op : set.operators) sum += qpt::adjoint(op) * op;
    const double residual = qpt::frobenius_distance(sum, qpt::p_matrix(file.chi).matrix);

    std::cout.precision(12);
    std::cout << set.operators.size() << " Kraus operator(s)\n";
    for (std::size_t i = 0; i < set.operators.size(); ++i) {
        std::cout << "E" << i << " (weight " << set.weights[i] << "):\n";
        for (int r = 0; r < 2; ++r) {
            std::cout << "  [";
            for (int c = 0; c < 2; ++c) {
                const qpt::Complex v = set.operators[i].at(r, c);
                std::cout << " " << v.real() << (v.imag() >= 0 ? "+" : "-") << std::abs(v.imag()) << "i";
            }
            std::cout << " ]\n";
        }
    }
    std::cout << "||sum E^dag E - P||_F = " << residual << "\n";

    if (!args.out.empty()) qpt::write_json_file(args.out, qpt::to_json(set, residual));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"single-qubit quantum process tomography toolkit"};
    app.require_subcommand(1);

    SimulateArgs sim;
    CLI::App* simulate = app.add_subcommand("simulate", "generate a synthetic experiment record");
    simulate->add_option("--channel", sim.channel, "canonical channel name or chi JSON file")->required();
    simulate->add_option("--shots", sim.shots, "photons per analyzer setting")->required();
    simulate->add_option("--seed", sim.seed, "RNG seed for shot noise");
    simulate->add_flag("--shot-noise", sim.shot_noise, "draw Poisson counts instead of exact expectations");
    simulate->add_option("--prep-rotation", sim.prep_rotation, "coherent preparation error (radians)");
    simulate->add_option("--prep-depol", sim.prep_depol, "preparation depolarization fraction in [0,1]");
    simulate->add_option("--out", sim.out, "output experiment JSON path")->required();

    ReconstructArgs rec;
    CLI::App* reconstruct = app.add_subcommand("reconstruct", "linear inversion to a raw chi");
    reconstruct->add_option("--experiment", rec.experiment, "experiment JSON path")->required();
    reconstruct->add_flag("--assume-ideal-inputs", rec.assume_ideal_inputs,
                          "use ideal probe coefficients instead of measured input states");
    reconstruct->add_option("--out", rec.out, "output chi JSON path")->required();

    CheckArgs chk;
    CLI::App* check = app.add_subcommand("check", "constraint diagnostics for a chi file");
    check->add_option("chi", chk.chi, "chi JSON path")->required();
    check->add_option("--tolerance", chk.tolerance, "tolerance for the constraint verdicts");
    check->add_option("--out", chk.out, "optional report JSON path");

    FitArgs fit;
    CLI::App* fitcmd = app.add_subcommand("fit", "project a raw chi onto the physical set");
    fitcmd->add_option("--raw", fit.raw, "input chi JSON path")->required();
    fitcmd->add_option("--mode", fit.mode, "'general' or 'tp' (enforce trace preservation)");
    fitcmd->add_option("--max-iterations", fit.max_iterations, "gradient steps per penalty stage");
    fitcmd->add_option("--penalty-stages", fit.penalty_stages, "number of penalty weight stages");
    fitcmd->add_option("--out", fit.out, "output chi JSON path")->required();

    KrausArgs kra;
    CLI::App* kraus = app.add_subcommand("kraus", "extract Kraus operators from a physical chi");
    kraus->add_option("chi", kra.chi, "chi JSON path")->required();
    kraus->add_option("--out", kra.out, "optional Kraus JSON path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(sim);
        if (reconstruct->parsed()) return cmd_reconstruct(rec);
        if (check->parsed()) return cmd_check(chk);
        if (fitcmd->parsed()) return cmd_fit(fit);
        if (kraus->parsed()) return cmd_kraus(kra);
    } catch (const qpt::io_error& err) {
        std::cerr << "I/O error: " << err.what() << "\n";
        return 3;
    } catch (const qpt::tomography_error& err) {
        std::cerr << "tomographically incomplete: " << err.what() << "\n";
        return 4;
    } catch (const nlohmann::json::exception& err) {
        std::cerr << "parse error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    }
    return 2;
}
