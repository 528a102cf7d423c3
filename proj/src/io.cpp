#include "qpt/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace qpt {

using nlohmann::json;

namespace {

json complex_to_json(const Complex& c) { return json::array({c.real(), c.imag()}); }

Complex complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2)
        throw validation_error("expected a [re, im] pair, got " + j.dump());
    return Complex(j[0].get<double>(), j[1].get<double>());
}

void require_version(const json& j, const char* what) {
    const int version = j.at("schema_version").get<int>();
    if (version != kSchemaVersion)
        throw validation_error(std::string(what) + ": unsupported schema_version " +
                               std::to_string(version));
}

json provenance_to_json(const Provenance& p) {
    json j = json::object();
    for (const auto& [k, v] : p) j[k] = v;
    return j;
}

Provenance provenance_from_json(const json& j) {
    Provenance p;
    if (j.is_null()) return p;
    for (auto it = j.begin(); it != j.end(); ++it) p[it.key()] = it.value().get<std::string>();
    return p;
}

json count_record_to_json(const CountRecord& r) {
    return json{{"basis", basis_name(r.basis)},
                {"plus", r.counts_plus},
                {"minus", r.counts_minus},
                {"n_in", r.n_in}};
}

CountRecord count_record_from_json(const json& j) {
    CountRecord r;
    r.basis = basis_from_name(j.at("basis").get<std::string>());
    r.counts_plus = j.at("plus").get<double>();
    r.counts_minus = j.at("minus").get<double>();
    r.n_in = j.at("n_in").get<double>();
    return r;
}

}  // namespace

json to_json(const Mat2& m) {
    json rows = json::array();
    for (int r = 0; r < 2; ++r) {
        json row = json::array();
        for (int c = 0; c < 2; ++c) row.push_back(complex_to_json(m.at(r, c)));
        rows.push_back(row);
    }
    return rows;
}

Mat2 mat2_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) throw validation_error("expected a 2x2 matrix");
    Mat2 m;
    for (int r = 0; r < 2; ++r) {
        if (!j[static_cast<std::size_t>(r)].is_array() || j[static_cast<std::size_t>(r)].size() != 2)
            throw validation_error("expected a 2x2 matrix row");
        for (int c = 0; c < 2; ++c)
            m.at(r, c) = complex_from_json(j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
    }
    return m;
}

json to_json(const Mat4& m) {
    json rows = json::array();
    for (int r = 0; r < 4; ++r) {
        json row = json::array();
        for (int c = 0; c < 4; ++c) row.push_back(complex_to_json(m.at(r, c)));
        rows.push_back(row);
    }
    return rows;
}

Mat4 mat4_from_json(const json& j) {
    if (!j.is_array() || j.size() != 4) throw validation_error("expected a 4x4 matrix");
    Mat4 m;
    for (int r = 0; r < 4; ++r) {
        if (!j[static_cast<std::size_t>(r)].is_array() || j[static_cast<std::size_t>(r)].size() != 4)
            throw validation_error("expected a 4x4 matrix row");
        for (int c = 0; c < 4; ++c)
            m.at(r, c) = complex_from_json(j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
    }
    return m;
}

json to_json(const ChiFile& file) {
    return json{{"schema_version", kSchemaVersion},
                {"status", file.chi.status == ChiStatus::physical ? "physical" : "raw"},
                {"basis", "I,X,Y,Z"},
                {"chi", to_json(file.chi.chi)},
                {"provenance", provenance_to_json(file.provenance)}};
}

ChiFile chi_file_from_json(const json& j) {
    require_version(j, "chi file");
    const std::string basis = j.at("basis").get<std::string>();
    if (basis != "I,X,Y,Z") throw validation_error("chi file: unsupported basis '" + basis + "'");
    const std::string status = j.at("status").get<std::string>();
    if (status != "raw" && status != "physical")
        throw validation_error("chi file: unknown status '" + status + "'");
    ChiFile file;
    file.chi.chi = mat4_from_json(j.at("chi"));
    file.chi.status = status == "physical" ? ChiStatus::physical : ChiStatus::raw;
    if (j.contains("provenance")) file.provenance = provenance_from_json(j.at("provenance"));
    return file;
}

std::vector<std::string> verdict_lines(const ConstraintReport& r) {
    std::vector<std::string> lines;
    std::ostringstream line;
    line.precision(12);

    line << "trace(chi) = " << r.trace_chi << " (identity residual vs tr(P)/2: " << r.trace_identity_residual << ")";
    lines.push_back(line.str());
    line.str({});

    line << "P eigenvalues (closed form): " << r.p_eig_minus << ", " << r.p_eig_plus
         << "  [radical = " << r.radical << "]";
    lines.push_back(line.str());
    line.str({});

    line << "eigenvalue bound tr + 2*radical <= 1: " << (r.eq10_satisfied ? "SATISFIED" : "VIOLATED")
         << " (" << r.p_eig_plus << " vs 1 + " << r.tolerance << ")";
    lines.push_back(line.str());
    line.str({});

    line << "trace-preserving residuals: [" << r.tp_residuals[0] << ", " << r.tp_residuals[1] << ", "
         << r.tp_residuals[2] << "] -> " << (r.tp_consistent ? "trace-preserving" : "NOT trace-preserving");
    lines.push_back(line.str());
    line.str({});

    line << "min chi eigenvalue = " << r.min_chi_eigenvalue;
    lines.push_back(line.str());
    return lines;
}

json to_json(const ReportFile& file) {
    const ConstraintReport& r = file.report;
    return json{{"schema_version", kSchemaVersion},
                {"trace_chi", r.trace_chi},
                {"radical", r.radical},
                {"p_eig_plus", r.p_eig_plus},
                {"p_eig_minus", r.p_eig_minus},
                {"tp_residuals", json::array({r.tp_residuals[0], r.tp_residuals[1], r.tp_residuals[2]})},
                {"trace_identity_residual", r.trace_identity_residual},
                {"min_chi_eigenvalue", r.min_chi_eigenvalue},
                {"eq10_satisfied", r.eq10_satisfied},
                {"tp_consistent", r.tp_consistent},
                {"tolerance", r.tolerance},
                {"verdicts", file.verdicts}};
}

ReportFile report_file_from_json(const json& j) {
    require_version(j, "report file");
    ReportFile file;
    ConstraintReport& r = file.report;
    r.trace_chi = j.at("trace_chi").get<double>();
    r.radical = j.at("radical").get<double>();
    r.p_eig_plus = j.at("p_eig_plus").get<double>();
    r.p_eig_minus = j.at("p_eig_minus").get<double>();
    const auto& res = j.at("tp_residuals");
    for (int i = 0; i < 3; ++i) r.tp_residuals[static_cast<std::size_t>(i)] = res.at(static_cast<std::size_t>(i)).get<double>();
    r.trace_identity_residual = j.at("trace_identity_residual").get<double>();
    r.min_chi_eigenvalue = j.at("min_chi_eigenvalue").get<double>();
    r.eq10_satisfied = j.at("eq10_satisfied").get<bool>();
    r.tp_consistent = j.at("tp_consistent").get<bool>();
    r.tolerance = j.at("tolerance").get<double>();
    // The verdict lines carry no independent state.
    file.verdicts = verdict_lines(r);
    return file;
}

json to_json(const ExperimentFile& file) {
    const ExperimentRecord& rec = file.record;
    json probes = json::array();
    for (const ProbeSpec& p : rec.probes) {
        json input = json::array();
        json output = json::array();
        for (const auto& c : p.input_counts) input.push_back(count_record_to_json(c));
        for (const auto& c : p.output_counts) output.push_back(count_record_to_json(c));
        probes.push_back(json{{"label", p.label},
                              {"rotation", p.rotation},
                              {"depolarization", p.depolarization},
                              {"state", to_json(p.state.matrix)},
                              {"input_counts", input},
                              {"output_counts", output}});
    }
    json truth;
    if (rec.channel_truth) {
        truth = json{{"status", rec.channel_truth->status == ChiStatus::physical ? "physical" : "raw"},
                     {"chi", to_json(rec.channel_truth->chi)}};
    }
    return json{{"schema_version", kSchemaVersion},
                {"n_in", rec.n_in},
                {"seed", rec.seed},
                {"shot_noise", rec.shot_noise},
                {"channel_truth", truth},
                {"probes", probes},
                {"provenance", provenance_to_json(file.provenance)}};
}

ExperimentFile experiment_file_from_json(const json& j) {
    require_version(j, "experiment file");
    ExperimentFile file;
    ExperimentRecord& rec = file.record;
    rec.schema_version = j.at("schema_version").get<int>();
    rec.n_in = j.at("n_in").get<double>();
    rec.seed = j.at("seed").get<std::uint64_t>();
    rec.shot_noise = j.at("shot_noise").get<bool>();
    if (j.contains("channel_truth") && !j.at("channel_truth").is_null()) {
        const json& truth = j.at("channel_truth");
        ProcessMatrix chi;
        chi.chi = mat4_from_json(truth.at("chi"));
        chi.status = truth.at("status").get<std::string>() == "physical" ? ChiStatus::physical : ChiStatus::raw;
        rec.channel_truth = chi;
    }
    const json& probes = j.at("probes");
    if (!probes.is_array() || probes.size() != 4)
        throw validation_error("experiment file: expected exactly 4 probes");
    for (int p = 0; p < 4; ++p) {
        const json& jp = probes[static_cast<std::size_t>(p)];
        ProbeSpec& spec = rec.probes[static_cast<std::size_t>(p)];
        spec.label = jp.at("label").get<std::string>();
        spec.rotation = jp.at("rotation").get<double>();
        spec.depolarization = jp.at("depolarization").get<double>();
        spec.state.matrix = mat2_from_json(jp.at("state"));
        spec.state.label = spec.label;
        const json& input = jp.at("input_counts");
        const json& output = jp.at("output_counts");
        if (input.size() != 3 || output.size() != 3)
            throw validation_error("experiment file: expected 3 input and 3 output settings per probe");
        for (int b = 0; b < 3; ++b) {
            spec.input_counts[static_cast<std::size_t>(b)] = count_record_from_json(input[static_cast<std::size_t>(b)]);
            spec.output_counts[static_cast<std::size_t>(b)] = count_record_from_json(output[static_cast<std::size_t>(b)]);
        }
    }
    if (j.contains("provenance")) file.provenance = provenance_from_json(j.at("provenance"));
    return file;
}

json to_json(const KrausSet& set, double completeness_residual) {
    json ops = json::array();
    for (std::size_t i = 0; i < set.operators.size(); ++i)
        ops.push_back(json{{"weight", set.weights[i]}, {"matrix", to_json(set.operators[i])}});
    return json{{"schema_version", kSchemaVersion},
                {"operators", ops},
                {"completeness_residual", completeness_residual}};
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path + "' for reading");
    json j;
    in >> j;  // throws json::parse_error on malformed input
    return j;
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
    if (!out) throw io_error("failed writing '" + path + "'");
}

}  // namespace qpt
