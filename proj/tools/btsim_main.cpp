// btsim command-line interface.
//
// Subcommands: run, ideal, sweep, constrain, analyze, scaling, manifest.
// Exit codes: 0 success, 2 validation/schema error, 3 undefined conditional
// (visibility with no P=1 shots), 4 I/O error.

#include "btsim/artifact.hpp"
#include "btsim/circuit.hpp"
#include "btsim/constraint.hpp"
#include "btsim/metrics.hpp"
#include "btsim/noise.hpp"
#include "btsim/sampling.hpp"
#include "btsim/sha256.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace btsim;

namespace {

struct RunOptions {
    std::string mode;
    int k = 1;
    double mu = 1.0;
    std::int64_t shots = 20000;
    std::uint64_t seed = kDefaultSeed;
    std::string noise_file;
    bool has_dephase = false;
    double dephase = 0.0;
    std::string at;
    std::string on;
    std::string out;
};

struct SweepOptions {
    std::string family = "phase-flip";
    std::string at;
    std::string on;
    std::string lambdas;
    std::string noise_file;
    int k = 1;
    double mu = 1.0;
    std::string out;
};

int resolve_register(const RegisterLayout& layout, const std::string& label) {
    if (label == "q") return layout.q;
    if (label == "r") return layout.r;
    if (label == "f") return layout.f.front();
    if (label == "p") return layout.p;
    throw validation_error("unknown register label '" + label + "' (expected q|r|f|p)");
}

std::vector<double> parse_lambda_grid(const std::string& text) {
    double start = 0.0, stop = 0.0, step = 0.0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &start, &stop, &step) != 3)
        throw validation_error("--lambdas expects START:STOP:STEP, got '" + text + "'");
    if (step <= 0.0) throw validation_error("--lambdas step must be > 0");
    std::vector<double> grid;
    for (int i = 0;; ++i) {
        const double v = start + i * step;
        if (v > stop + step * 1e-9) break;
        grid.push_back(std::min(v, stop));
    }
    if (grid.empty()) throw validation_error("--lambdas grid is empty");
    return grid;
}

std::string sibling_csv_path(const std::string& out) {
    fs::path p(out);
    p.replace_extension(".csv");
    return p.string();
}

void write_text(const std::string& path, const std::string& text) {
    const fs::path p(path);
    std::error_code ec;
    if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw io_error("cannot open for writing: " + path);
    f << text;
    if (!f) throw io_error("write failed: " + path);
}

std::optional<NoiseSpec> load_noise(const std::string& file, Provenance& prov) {
    if (file.empty()) return std::nullopt;
    const NoiseSpec spec = noise_from_snapshot(load_calibration_snapshot(file));
    prov.noise_spec_hash = noise_spec_hash(spec);
    return spec;
}

MetricEntry entry_from(const WitnessResult& r) { return {r.value, r.error, r.shots_used}; }

int cmd_run(const RunOptions& opt) {
    const auto [base, layout] = build_branch_transfer(opt.k, opt.mu);
    Provenance prov;
    prov.timestamp_utc = utc_timestamp();
    const std::optional<NoiseSpec> noise = load_noise(opt.noise_file, prov);

    RunMode mode;
    Circuit circuit = base;
    std::vector<int> measured;
    if (opt.mode == "coherence-x") {
        mode = RunMode::COHERENCE_X;
        measured = layout.witness_qubits();
        circuit = append_basis_rotation(base, MeasBasis::X, measured);
    } else if (opt.mode == "coherence-y") {
        mode = RunMode::COHERENCE_Y;
        measured = layout.witness_qubits();
        circuit = append_basis_rotation(base, MeasBasis::Y, measured);
    } else if (opt.mode == "rp-z") {
        mode = RunMode::RP_Z;
        measured = {layout.r, layout.p};
        circuit = with_measured(base, measured);
    } else {
        throw validation_error("unknown mode '" + opt.mode + "'");
    }

    if (opt.has_dephase) {
        if (opt.at.empty() || opt.on.empty())
            throw validation_error("--dephase requires --at and --on");
        const InsertionPoint point{parse_insert_location(opt.at),
                                   resolve_register(layout, opt.on)};
        circuit = insert_channel(circuit, phase_flip(opt.dephase), point);
    }
    prov.circuit_hash = circuit_hash(circuit);

    std::vector<double> probs;
    if (circuit.has_channel_markers() || noise)
        probs = probabilities(run_density(circuit, noise));
    else
        probs = probabilities(run_statevector(circuit));
    std::vector<double> marginal = marginalize_probs(probs, circuit.n_qubits, measured);
    if (noise) marginal = apply_readout_confusion(marginal, noise->readout, measured);

    SeededSampler sampler(opt.seed);
    const Counts counts = sample_counts(marginal, measured, opt.shots, sampler);
    const WitnessResult metric = metrics_from_run(mode, counts);

    ResultArtifact artifact;
    artifact.mode = opt.mode;
    artifact.k = opt.k;
    artifact.mu = opt.mu;
    artifact.shots = opt.shots;
    artifact.seed = opt.seed;
    artifact.counts = counts;
    artifact.metrics[metric_name(metric.kind)] = entry_from(metric);
    artifact.provenance = prov;
    write_result_artifact(artifact, opt.out);

    std::printf("%s = %.4f +/- %.4f  (%lld shots)  -> %s\n", metric_name(metric.kind),
                metric.value, metric.error, static_cast<long long>(metric.shots_used),
                opt.out.c_str());
    return 0;
}

int cmd_ideal(int k, double mu, const std::string& out) {
    const MetricSet table = ideal_witness_table(k, mu);
    const auto [circuit, layout] = build_branch_transfer(k, mu);

    ResultArtifact artifact;
    artifact.mode = "ideal";
    artifact.k = k;
    artifact.mu = mu;
    artifact.shots = 0;
    artifact.seed = 0;
    artifact.metrics["v"] = {table.v, 0.0, 0};
    artifact.metrics["w_x"] = {table.w_x, 0.0, 0};
    artifact.metrics["w_y"] = {table.w_y, 0.0, 0};
    artifact.metrics["c_mag"] = {table.c_mag, 0.0, 0};
    artifact.provenance.timestamp_utc = utc_timestamp();
    artifact.provenance.circuit_hash = circuit_hash(circuit);
    write_result_artifact(artifact, out);

    std::printf("V     = %.4f\nW_X   = %.4f\nW_Y   = %.4f\nC_mag = %.4f\n-> %s\n", table.v,
                table.w_x, table.w_y, table.c_mag, out.c_str());
    return 0;
}

int cmd_sweep(const SweepOptions& opt) {
    if (opt.family != "phase-flip")
        throw validation_error("unknown channel family '" + opt.family + "'");
    const auto [base, layout] = build_branch_transfer(opt.k, opt.mu);
    Provenance prov;
    prov.timestamp_utc = utc_timestamp();
    prov.circuit_hash = circuit_hash(base);
    const std::optional<NoiseSpec> noise = load_noise(opt.noise_file, prov);

    const InsertionPoint point{parse_insert_location(opt.at), resolve_register(layout, opt.on)};
    const std::vector<double> grid = parse_lambda_grid(opt.lambdas);
    const SweepResult sweep =
        deviation_curves(opt.k, opt.mu, ChannelFamily::PHASE_FLIP, point, grid, noise);

    write_canonical_json(sweep_to_json(sweep, prov), opt.out);

    std::string csv = "lambda,v,w_x,w_y,c_mag\n";
    for (const auto& pt : sweep.points) {
        csv += format_float17(pt.lambda) + "," + format_float17(pt.predicted.v) + "," +
               format_float17(pt.predicted.w_x) + "," + format_float17(pt.predicted.w_y) + "," +
               format_float17(pt.predicted.c_mag) + "\n";
    }
    const std::string csv_path = sibling_csv_path(opt.out);
    write_text(csv_path, csv);

    std::printf("swept %zu points (%s at %s on qubit %d) -> %s, %s\n", sweep.points.size(),
                sweep.channel_family_id.c_str(), insert_location_name(point.location),
                point.target_qubit, opt.out.c_str(), csv_path.c_str());
    return 0;
}

std::map<std::string, MetricEntry> load_metrics_any(const std::string& path) {
    const json doc = read_json_file(path);
    if (doc.is_object() && doc.contains("kind") && doc.at("kind") == "summary")
        return summary_from_json(doc).metrics;
    if (doc.is_object() && doc.contains("mode")) return result_artifact_from_json(doc).metrics;
    throw parse_error(path + ": expected a metrics summary or a result artifact");
}

int cmd_constrain(const std::string& sweep_file, const std::string& hardware_file,
                  const std::string& noisy_sim_file, double k_sigma, const std::string& out) {
    if (k_sigma < 0.0) throw validation_error("--k-sigma must be >= 0");
    SweepResult sweep = sweep_from_json(read_json_file(sweep_file));
    sweep.k_sigma = k_sigma;
    const auto hardware = load_metrics_any(hardware_file);
    std::map<std::string, MetricEntry> noisy_sim;
    if (!noisy_sim_file.empty())
        noisy_sim = load_metrics_any(noisy_sim_file);
    else
        std::fprintf(stderr,
                     "warning: no --noisy-sim artifact; device-noise deltas default to 0\n");

    struct MetricRef {
        const char* name;
        double MetricSet::* value;
        double UncertaintyBand::* band;
    };
    static constexpr MetricRef kMetrics[] = {
        {"v", &MetricSet::v, &UncertaintyBand::v},
        {"w_x", &MetricSet::w_x, &UncertaintyBand::w_x},
        {"w_y", &MetricSet::w_y, &UncertaintyBand::w_y},
        {"c_mag", &MetricSet::c_mag, &UncertaintyBand::c_mag},
    };

    UncertaintyBand bands;
    json bands_json = json::object();
    json lambda_est_json = json::object();
    for (const auto& metric : kMetrics) {
        const auto hw = hardware.find(metric.name);
        if (hw == hardware.end()) {
            // Metric absent from the hardware artifact: never detectable on it.
            bands.*metric.band = std::numeric_limits<double>::infinity();
            bands_json[metric.name] = nullptr;
            continue;
        }
        const double shot_sigma = hw->second.error;
        double device_delta = 0.0;
        if (const auto ns = noisy_sim.find(metric.name); ns != noisy_sim.end())
            device_delta = std::abs(hw->second.value - ns->second.value);
        const double band = combined_band(shot_sigma, device_delta);
        bands.*metric.band = band;
        bands_json[metric.name] = {
            {"shot_sigma", shot_sigma}, {"device_delta", device_delta}, {"band", band}};

        const double baseline = sweep.baseline.*metric.value;
        if (baseline != 0.0)
            lambda_est_json[metric.name] = lambda_est(hw->second.value, baseline);
        else
            lambda_est_json[metric.name] = nullptr;
    }

    const DetectabilityResult det = detectability_threshold(sweep, bands);

    Provenance prov;
    prov.timestamp_utc = utc_timestamp();
    prov.circuit_hash = sha256_hex(canonical_json(sweep_to_json(sweep, Provenance{
                                                                           kToolVersion,
                                                                           "",
                                                                           std::string(64, '0'),
                                                                           std::nullopt,
                                                                       })));
    json doc = sweep_to_json(sweep, prov);
    doc["kind"] = "constraint";
    doc["bands"] = std::move(bands_json);
    doc["lambda_max"] = std::isinf(det.lambda_max) ? json(nullptr) : json(det.lambda_max);
    doc["deciding_metric"] = det.deciding_metric;
    doc["lambda_est"] = std::move(lambda_est_json);
    json hw_json = json::object();
    for (const auto& [name, entry] : hardware)
        hw_json[name] = {{"value", entry.value}, {"error", entry.error}, {"shots", entry.shots}};
    doc["hardware"] = std::move(hw_json);
    write_canonical_json(doc, out);

    if (std::isinf(det.lambda_max))
        std::printf("lambda_max = none detectable on the supplied grid\n");
    else
        std::printf("lambda_max = %.6g  (deciding metric: %s)\n", det.lambda_max,
                    det.deciding_metric.c_str());
    for (const auto& [name, value] : doc.at("lambda_est").items())
        if (!value.is_null()) std::printf("lambda_est[%s] = %.4f\n", name.c_str(),
                                          value.get<double>());
    std::printf("-> %s\n", out.c_str());
    return 0;
}

int cmd_analyze(const std::vector<std::string>& inputs, const std::string& out) {
    if (inputs.empty()) throw validation_error("analyze: no inputs");
    MetricsSummary summary;
    std::vector<std::string> circuit_hashes;
    std::optional<int> k;
    std::optional<double> mu;
    for (const auto& path : inputs) {
        const ResultArtifact artifact = read_result_artifact(path);
        if (k && (*k != artifact.k || *mu != artifact.mu))
            throw validation_error("analyze: inputs disagree on k/mu");
        k = artifact.k;
        mu = artifact.mu;
        for (const auto& [name, entry] : artifact.metrics) {
            if (summary.metrics.count(name))
                throw validation_error("analyze: duplicate metric '" + name + "' across inputs");
            summary.metrics[name] = entry;
        }
        summary.inputs.push_back(fs::path(path).filename().string());
        circuit_hashes.push_back(artifact.provenance.circuit_hash);
    }
    std::sort(summary.inputs.begin(), summary.inputs.end());
    std::sort(circuit_hashes.begin(), circuit_hashes.end());

    if (summary.metrics.count("w_x") && summary.metrics.count("w_y") &&
        !summary.metrics.count("c_mag")) {
        const MetricEntry& ex = summary.metrics.at("w_x");
        const MetricEntry& ey = summary.metrics.at("w_y");
        const WitnessResult wx{ex.value, ex.error, ex.shots, MetricKind::W_X};
        const WitnessResult wy{ey.value, ey.error, ey.shots, MetricKind::W_Y};
        summary.metrics["c_mag"] = entry_from(coherence_magnitude(wx, wy));
    }

    summary.provenance.timestamp_utc = utc_timestamp();
    std::string joined;
    for (const auto& h : circuit_hashes) joined += h;
    summary.provenance.circuit_hash = sha256_hex(joined);
    write_metrics_summary(summary, out);

    for (const auto& [name, entry] : summary.metrics)
        std::printf("%-5s = %.4f +/- %.4f\n", name.c_str(), entry.value, entry.error);
    std::printf("-> %s\n", out.c_str());
    return 0;
}

int cmd_scaling(int k_max, const std::string& out) {
    if (k_max < 1) throw validation_error("scaling: --k-max must be >= 1");
    json rows = json::array();
    std::string csv = "k,depth,two_qubit_count,total_gate_count,v,w_x,w_y,c_mag\n";
    std::string canonical_texts;
    for (int k = 1; k <= k_max; ++k) {
        const auto [circuit, layout] = build_branch_transfer(k, 1.0);
        const CircuitStats stats = circuit_stats(circuit);
        const MetricSet table = ideal_witness_table(k, 1.0);
        rows.push_back({{"k", k},
                        {"depth", stats.depth},
                        {"two_qubit_count", stats.two_qubit_count},
                        {"total_gate_count", stats.total_gate_count},
                        {"v", table.v},
                        {"w_x", table.w_x},
                        {"w_y", table.w_y},
                        {"c_mag", table.c_mag}});
        csv += std::to_string(k) + "," + std::to_string(stats.depth) + "," +
               std::to_string(stats.two_qubit_count) + "," +
               std::to_string(stats.total_gate_count) + "," + format_float17(table.v) + "," +
               format_float17(table.w_x) + "," + format_float17(table.w_y) + "," +
               format_float17(table.c_mag) + "\n";
        canonical_texts += circuit_canonical_text(circuit);
        std::printf("k=%d: depth=%d two_qubit=%d total=%d W_X=%.4f\n", k, stats.depth,
                    stats.two_qubit_count, stats.total_gate_count, table.w_x);
    }
    const json doc = {{"schema", kSchemaVersion},
                      {"kind", "scaling"},
                      {"mu", 1.0},
                      {"k_max", k_max},
                      {"rows", rows},
                      {"provenance",
                       {{"tool_version", kToolVersion},
                        {"timestamp_utc", utc_timestamp()},
                        {"circuit_hash", sha256_hex(canonical_texts)}}}};
    write_canonical_json(doc, out);
    const std::string csv_path = sibling_csv_path(out);
    write_text(csv_path, csv);
    std::printf("-> %s, %s\n", out.c_str(), csv_path.c_str());
    return 0;
}

std::string default_manifest_path(const std::string& dir, const std::string& manifest) {
    return manifest.empty() ? (fs::path(dir) / "MANIFEST.json").string() : manifest;
}

// The manifest file is excluded from its own entry set when it lives inside
// the directory being hashed.
std::vector<std::string> manifest_excludes(const std::string& dir, const std::string& manifest) {
    std::error_code ec;
    const fs::path rel = fs::relative(fs::absolute(manifest), fs::absolute(dir), ec);
    if (ec) return {};
    const std::string s = rel.generic_string();
    if (s.empty() || s == "." || s.rfind("..", 0) == 0) return {};
    return {s};
}

int cmd_manifest_build(const std::string& dir, const std::string& manifest_file) {
    const std::string path = default_manifest_path(dir, manifest_file);
    const Manifest manifest = build_manifest(dir, manifest_excludes(dir, path));
    write_manifest(manifest, path);
    std::printf("wrote %zu entries -> %s\n", manifest.entries.size(), path.c_str());
    return 0;
}

int cmd_manifest_verify(const std::string& dir, const std::string& manifest_file) {
    const std::string path = default_manifest_path(dir, manifest_file);
    const Manifest manifest = read_manifest(path);
    const VerifyReport report = verify_manifest(dir, manifest, manifest_excludes(dir, path));
    if (report.ok) {
        std::printf("ok: %zu files verified\n", manifest.entries.size());
        return 0;
    }
    for (const auto& p : report.mismatches) std::printf("mismatch: %s\n", p.c_str());
    for (const auto& p : report.missing) std::printf("missing: %s\n", p.c_str());
    for (const auto& p : report.extra) std::printf("extra: %s\n", p.c_str());
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"branch-transfer circuit simulator and analysis toolkit"};
    app.require_subcommand(1);

    RunOptions run_opt;
    auto* run = app.add_subcommand("run", "simulate, sample shots and estimate one metric");
    run->add_option("--mode", run_opt.mode, "coherence-x | coherence-y | rp-z")->required();
    run->add_option("--k", run_opt.k, "friend register width");
    run->add_option("--mu", run_opt.mu, "transfer strength in [0,1]");
    run->add_option("--shots", run_opt.shots, "shots to sample");
    run->add_option("--seed", run_opt.seed, "sampler seed");
    run->add_option("--noise", run_opt.noise_file, "calibration snapshot JSON");
    run->add_option("--dephase", run_opt.dephase, "phase-flip strength to insert");
    run->add_option("--at", run_opt.at, "post-branch | post-transfer | pre-measure");
    run->add_option("--on", run_opt.on, "q | r | f | p");
    run->add_option("--out", run_opt.out, "output artifact path")->required();

    int ideal_k = 1;
    double ideal_mu = 1.0;
    std::string ideal_out;
    auto* ideal = app.add_subcommand("ideal", "exact witness table, no sampling");
    ideal->add_option("--k", ideal_k, "friend register width");
    ideal->add_option("--mu", ideal_mu, "transfer strength in [0,1]");
    ideal->add_option("--out", ideal_out, "output artifact path")->required();

    SweepOptions sweep_opt;
    auto* sweep = app.add_subcommand("sweep", "predicted deviation curves over a lambda grid");
    sweep->add_option("--family", sweep_opt.family, "channel family (phase-flip)");
    sweep->add_option("--at", sweep_opt.at, "insertion location")->required();
    sweep->add_option("--on", sweep_opt.on, "target register q|r|f|p")->required();
    sweep->add_option("--lambdas", sweep_opt.lambdas, "START:STOP:STEP")->required();
    sweep->add_option("--noise", sweep_opt.noise_file, "calibration snapshot JSON");
    sweep->add_option("--k", sweep_opt.k, "friend register width");
    sweep->add_option("--mu", sweep_opt.mu, "transfer strength in [0,1]");
    sweep->add_option("--out", sweep_opt.out, "output artifact path")->required();

    std::string con_sweep, con_hw, con_ns, con_out;
    double con_k_sigma = 2.0;
    auto* constrain = app.add_subcommand("constrain", "bands, lambda_max and lambda_est");
    constrain->add_option("--sweep", con_sweep, "sweep artifact")->required();
    constrain->add_option("--hardware", con_hw, "hardware metrics artifact")->required();
    constrain->add_option("--noisy-sim", con_ns, "noisy-simulation metrics artifact");
    constrain->add_option("--k-sigma", con_k_sigma, "band multiplier");
    constrain->add_option("--out", con_out, "output path")->required();

    std::vector<std::string> analyze_inputs;
    std::string analyze_out;
    auto* analyze = app.add_subcommand("analyze", "merge run artifacts into a metrics summary");
    analyze->add_option("--inputs", analyze_inputs, "result artifacts")->required()
        ->expected(-1);
    analyze->add_option("--out", analyze_out, "output path")->required();

    int scaling_k_max = 6;
    std::string scaling_out;
    auto* scaling = app.add_subcommand("scaling", "per-k circuit stats and ideal witnesses");
    scaling->add_option("--k-max", scaling_k_max, "largest friend register width");
    scaling->add_option("--out", scaling_out, "output path")->required();

    auto* manifest = app.add_subcommand("manifest", "build or verify a SHA256 manifest");
    std::string man_dir, man_file;
    auto* man_build = manifest->add_subcommand("build", "hash a directory");
    auto* man_verify = manifest->add_subcommand("verify", "check a directory against a manifest");
    for (auto* sub : {man_build, man_verify}) {
        sub->add_option("--dir", man_dir, "directory")->required();
        sub->add_option("--manifest", man_file, "manifest path (default DIR/MANIFEST.json)");
    }
    manifest->require_subcommand(1);

    try {
        app.parse(argc, argv);
        run_opt.has_dephase = run->count("--dephase") > 0;
        if (*run) return cmd_run(run_opt);
        if (*ideal) return cmd_ideal(ideal_k, ideal_mu, ideal_out);
        if (*sweep) return cmd_sweep(sweep_opt);
        if (*constrain) return cmd_constrain(con_sweep, con_hw, con_ns, con_k_sigma, con_out);
        if (*analyze) return cmd_analyze(analyze_inputs, analyze_out);
        if (*scaling) return cmd_scaling(scaling_k_max, scaling_out);
        if (*man_build) return cmd_manifest_build(man_dir, man_file);
        if (*man_verify) return cmd_manifest_verify(man_dir, man_file);
        return 0;
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const undefined_conditional_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const btsim::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
