#include "btsim/artifact.hpp"

#include "btsim/sha256.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace btsim {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_float17(double value) {
    if (!std::isfinite(value))
        throw validation_error("canonical_json: non-finite number in document");
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace {

void emit(const json& node, std::string& out, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string pad_in(static_cast<std::size_t>(indent + 1) * 2, ' ');
    switch (node.type()) {
    case json::value_t::object: {
        if (node.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (const auto& [key, value] : node.items()) {
            if (!first) out += ",\n";
            first = false;
            out += pad_in;
            out += json(key).dump();
            out += ": ";
            emit(value, out, indent + 1);
        }
        out += "\n" + pad + "}";
        return;
    }
    case json::value_t::array: {
        if (node.empty()) {
            out += "[]";
            return;
        }
        const bool scalars = std::all_of(node.begin(), node.end(), [](const json& v) {
            return !v.is_object() && !v.is_array();
        });
        if (scalars) {
            out += "[";
            for (std::size_t i = 0; i < node.size(); ++i) {
                if (i > 0) out += ", ";
                emit(node[i], out, indent);
            }
            out += "]";
            return;
        }
        out += "[\n";
        for (std::size_t i = 0; i < node.size(); ++i) {
            if (i > 0) out += ",\n";
            out += pad_in;
            emit(node[i], out, indent + 1);
        }
        out += "\n" + pad + "]";
        return;
    }
    case json::value_t::number_float: out += format_float17(node.get<double>()); return;
    default: out += node.dump(); return;
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    const fs::path p(path);
    std::error_code ec;
    if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open for writing: " + path);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw io_error("write failed: " + path);
}

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::set<std::string>& required, const std::string& where) {
    if (!obj.is_object()) throw parse_error(where + " must be an object");
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key)) throw parse_error("unknown key '" + key + "' in " + where);
    for (const auto& key : required)
        if (!obj.contains(key)) throw parse_error("missing key '" + key + "' in " + where);
}

json counts_to_json(const Counts& counts) {
    json table = json::object();
    for (const auto& [key, n] : counts.table) table[key] = n;
    return json{{"bit_order", counts.bit_order},
                {"table", std::move(table)},
                {"total_shots", counts.total_shots}};
}

Counts counts_from_json(const json& doc) {
    require_keys(doc, {"bit_order", "table", "total_shots"},
                 {"bit_order", "table", "total_shots"}, "counts");
    Counts counts;
    counts.bit_order = doc.at("bit_order").get<std::vector<int>>();
    counts.total_shots = doc.at("total_shots").get<std::int64_t>();
    std::int64_t sum = 0;
    for (const auto& [key, value] : doc.at("table").items()) {
        if (key.size() != counts.bit_order.size() ||
            key.find_first_not_of("01") != std::string::npos)
            throw parse_error("counts.table: malformed bitstring key '" + key + "'");
        const std::int64_t n = value.get<std::int64_t>();
        if (n < 0) throw parse_error("counts.table: negative count for '" + key + "'");
        counts.table[key] = n;
        sum += n;
    }
    if (sum != counts.total_shots)
        throw parse_error("counts.total_shots does not equal the table sum");
    return counts;
}

json metric_entry_to_json(const MetricEntry& entry) {
    return json{{"value", entry.value}, {"error", entry.error}, {"shots", entry.shots}};
}

MetricEntry metric_entry_from_json(const json& doc, const std::string& where) {
    require_keys(doc, {"value", "error", "shots"}, {"value", "error", "shots"}, where);
    MetricEntry entry;
    entry.value = doc.at("value").get<double>();
    entry.error = doc.at("error").get<double>();
    entry.shots = doc.at("shots").get<std::int64_t>();
    if (!(entry.error >= 0.0)) throw parse_error(where + ".error must be >= 0");
    return entry;
}

json metrics_map_to_json(const std::map<std::string, MetricEntry>& metrics) {
    json out = json::object();
    for (const auto& [name, entry] : metrics) out[name] = metric_entry_to_json(entry);
    return out;
}

std::map<std::string, MetricEntry> metrics_map_from_json(const json& doc,
                                                         const std::string& where) {
    if (!doc.is_object()) throw parse_error(where + " must be an object");
    std::map<std::string, MetricEntry> metrics;
    for (const auto& [name, entry] : doc.items())
        metrics[name] = metric_entry_from_json(entry, where + "." + name);
    return metrics;
}

json provenance_to_json(const Provenance& prov) {
    json out{{"tool_version", prov.tool_version},
             {"timestamp_utc", prov.timestamp_utc},
             {"circuit_hash", prov.circuit_hash}};
    if (prov.noise_spec_hash) out["noise_spec_hash"] = *prov.noise_spec_hash;
    return out;
}

Provenance provenance_from_json(const json& doc) {
    require_keys(doc, {"tool_version", "timestamp_utc", "circuit_hash", "noise_spec_hash"},
                 {"tool_version", "timestamp_utc", "circuit_hash"}, "provenance");
    Provenance prov;
    prov.tool_version = doc.at("tool_version").get<std::string>();
    prov.timestamp_utc = doc.at("timestamp_utc").get<std::string>();
    prov.circuit_hash = doc.at("circuit_hash").get<std::string>();
    if (doc.contains("noise_spec_hash"))
        prov.noise_spec_hash = doc.at("noise_spec_hash").get<std::string>();
    return prov;
}

json metric_set_to_json(const MetricSet& m) {
    return json{{"v", m.v}, {"w_x", m.w_x}, {"w_y", m.w_y}, {"c_mag", m.c_mag}};
}

MetricSet metric_set_from_json(const json& doc, const std::string& where) {
    require_keys(doc, {"v", "w_x", "w_y", "c_mag"}, {"v", "w_x", "w_y", "c_mag"}, where);
    MetricSet m;
    m.v = doc.at("v").get<double>();
    m.w_x = doc.at("w_x").get<double>();
    m.w_y = doc.at("w_y").get<double>();
    m.c_mag = doc.at("c_mag").get<double>();
    return m;
}

} // namespace

std::string canonical_json(const json& doc) {
    std::string out;
    emit(doc, out, 0);
    out += "\n";
    return out;
}

void write_canonical_json(const json& doc, const std::string& path) {
    write_text_file(path, canonical_json(doc));
}

json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return json::parse(buf.str());
    } catch (const json::exception& e) {
        throw parse_error(path + ": invalid JSON: " + e.what());
    }
}

std::string utc_timestamp() {
    std::time_t now = std::time(nullptr);
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
        char* end = nullptr;
        const long long pinned = std::strtoll(epoch, &end, 10);
        if (end && *end == '\0') now = static_cast<std::time_t>(pinned);
    }
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

std::string circuit_canonical_text(const Circuit& circuit) {
    std::ostringstream out;
    out << "btsim-circuit-v1\n";
    out << "n_qubits=" << circuit.n_qubits << "\n";
    out << "measured=";
    for (std::size_t i = 0; i < circuit.measured_qubits.size(); ++i)
        out << (i ? "," : "") << circuit.measured_qubits[i];
    out << "\n";
    for (const auto& op : circuit.ops) {
        switch (op.kind) {
        case OpKind::H: out << "H"; break;
        case OpKind::X: out << "X"; break;
        case OpKind::SDG: out << "SDG"; break;
        case OpKind::CX: out << "CX"; break;
        case OpKind::CXPOW: out << "CXPOW(" << format_float17(op.param) << ")"; break;
        case OpKind::CHANNEL: out << "CHANNEL(" << op.channel_id << ")"; break;
        }
        for (int t : op.targets) out << " " << t;
        out << "\n";
    }
    for (const auto& [id, channel] : circuit.channels) {
        out << "channel " << id << " arity=" << channel.arity;
        for (const auto& k : channel.kraus_ops) {
            out << " [";
            for (std::size_t i = 0; i < k.a.size(); ++i)
                out << (i ? ";" : "") << format_float17(k.a[i].real()) << ","
                    << format_float17(k.a[i].imag());
            out << "]";
        }
        out << "\n";
    }
    return out.str();
}

std::string circuit_hash(const Circuit& circuit) {
    return sha256_hex(circuit_canonical_text(circuit));
}

std::string noise_spec_hash(const NoiseSpec& spec) {
    std::ostringstream out;
    out << "btsim-noise-v1\np1=" << format_float17(spec.p1) << "\np2=" << format_float17(spec.p2)
        << "\n";
    for (const auto& [qubit, ro] : spec.readout)
        out << "readout " << qubit << " " << format_float17(ro.e01) << " "
            << format_float17(ro.e10) << "\n";
    return sha256_hex(out.str());
}

void validate_result_artifact(const ResultArtifact& artifact) {
    static const std::set<std::string> kModes = {"coherence-x", "coherence-y", "rp-z", "ideal"};
    if (!kModes.count(artifact.mode))
        throw validation_error("artifact: unknown mode '" + artifact.mode + "'");
    std::int64_t sum = 0;
    for (const auto& [key, n] : artifact.counts.table) {
        if (key.size() != artifact.counts.bit_order.size())
            throw validation_error("artifact: counts key '" + key + "' has wrong length");
        if (n < 0) throw validation_error("artifact: negative count");
        sum += n;
    }
    if (sum != artifact.counts.total_shots || artifact.counts.total_shots != artifact.shots)
        throw validation_error("artifact: counts total does not match shots");
    for (const auto& [name, entry] : artifact.metrics) {
        if (!std::isfinite(entry.value) || !std::isfinite(entry.error))
            throw validation_error("artifact: metric '" + name + "' is not finite");
        if (entry.error < 0.0)
            throw validation_error("artifact: metric '" + name + "' has negative error");
    }
    if (artifact.provenance.circuit_hash.size() != 64)
        throw validation_error("artifact: provenance.circuit_hash must be a sha256 hex digest");
}

json result_artifact_to_json(const ResultArtifact& artifact) {
    validate_result_artifact(artifact);
    return json{{"schema", kSchemaVersion},
                {"mode", artifact.mode},
                {"k", artifact.k},
                {"mu", artifact.mu},
                {"shots", artifact.shots},
                {"seed", artifact.seed},
                {"counts", counts_to_json(artifact.counts)},
                {"metrics", metrics_map_to_json(artifact.metrics)},
                {"provenance", provenance_to_json(artifact.provenance)}};
}

ResultArtifact result_artifact_from_json(const json& doc) {
    try {
        require_keys(
            doc, {"schema", "mode", "k", "mu", "shots", "seed", "counts", "metrics", "provenance"},
            {"schema", "mode", "k", "mu", "shots", "seed", "counts", "metrics", "provenance"},
            "artifact");
        if (doc.at("schema") != kSchemaVersion)
            throw parse_error("artifact: unsupported schema version");
        ResultArtifact artifact;
        artifact.mode = doc.at("mode").get<std::string>();
        artifact.k = doc.at("k").get<int>();
        artifact.mu = doc.at("mu").get<double>();
        artifact.shots = doc.at("shots").get<std::int64_t>();
        artifact.seed = doc.at("seed").get<std::uint64_t>();
        artifact.counts = counts_from_json(doc.at("counts"));
        artifact.metrics = metrics_map_from_json(doc.at("metrics"), "metrics");
        artifact.provenance = provenance_from_json(doc.at("provenance"));
        try {
            validate_result_artifact(artifact);
        } catch (const validation_error& e) {
            throw parse_error(e.what());
        }
        return artifact;
    } catch (const json::exception& e) {
        throw parse_error(std::string("artifact: ") + e.what());
    }
}

void write_result_artifact(const ResultArtifact& artifact, const std::string& path) {
    write_canonical_json(result_artifact_to_json(artifact), path);
}

ResultArtifact read_result_artifact(const std::string& path) {
    return result_artifact_from_json(read_json_file(path));
}

json summary_to_json(const MetricsSummary& summary) {
    return json{{"schema", kSchemaVersion},
                {"kind", "summary"},
                {"metrics", metrics_map_to_json(summary.metrics)},
                {"inputs", summary.inputs},
                {"provenance", provenance_to_json(summary.provenance)}};
}

MetricsSummary summary_from_json(const json& doc) {
    try {
        require_keys(doc, {"schema", "kind", "metrics", "inputs", "provenance"},
                     {"schema", "kind", "metrics"}, "summary");
        if (doc.at("schema") != kSchemaVersion)
            throw parse_error("summary: unsupported schema version");
        if (doc.at("kind") != "summary") throw parse_error("summary: kind must be 'summary'");
        MetricsSummary summary;
        summary.metrics = metrics_map_from_json(doc.at("metrics"), "metrics");
        if (doc.contains("inputs"))
            summary.inputs = doc.at("inputs").get<std::vector<std::string>>();
        if (doc.contains("provenance"))
            summary.provenance = provenance_from_json(doc.at("provenance"));
        return summary;
    } catch (const json::exception& e) {
        throw parse_error(std::string("summary: ") + e.what());
    }
}

void write_metrics_summary(const MetricsSummary& summary, const std::string& path) {
    write_canonical_json(summary_to_json(summary), path);
}

MetricsSummary read_metrics_summary(const std::string& path) {
    return summary_from_json(read_json_file(path));
}

json sweep_to_json(const SweepResult& sweep, const Provenance& prov) {
    json points = json::array();
    for (const auto& pt : sweep.points) {
        json p = metric_set_to_json(pt.predicted);
        p["lambda"] = pt.lambda;
        points.push_back(std::move(p));
    }
    return json{{"schema", kSchemaVersion},
                {"kind", "sweep"},
                {"family", sweep.channel_family_id},
                {"insertion",
                 {{"location", insert_location_name(sweep.insertion.location)},
                  {"target_qubit", sweep.insertion.target_qubit}}},
                {"k", sweep.k},
                {"mu", sweep.mu},
                {"noisy", sweep.noisy},
                {"k_sigma", sweep.k_sigma},
                {"baseline", metric_set_to_json(sweep.baseline)},
                {"points", std::move(points)},
                {"provenance", provenance_to_json(prov)}};
}

SweepResult sweep_from_json(const json& doc) {
    try {
    require_keys(doc,
                 {"schema", "kind", "family", "insertion", "k", "mu", "noisy", "k_sigma",
                  "baseline", "points", "provenance"},
                 {"schema", "kind", "family", "insertion", "k", "mu", "k_sigma", "baseline",
                  "points"},
                 "sweep");
    if (doc.at("schema") != kSchemaVersion) throw parse_error("sweep: unsupported schema version");
    if (doc.at("kind") != "sweep") throw parse_error("sweep: kind must be 'sweep'");
    SweepResult sweep;
    sweep.channel_family_id = doc.at("family").get<std::string>();
    const json& ins = doc.at("insertion");
    require_keys(ins, {"location", "target_qubit"}, {"location", "target_qubit"},
                 "sweep.insertion");
    sweep.insertion.location = parse_insert_location(ins.at("location").get<std::string>());
    sweep.insertion.target_qubit = ins.at("target_qubit").get<int>();
    sweep.k = doc.at("k").get<int>();
    sweep.mu = doc.at("mu").get<double>();
    if (doc.contains("noisy")) sweep.noisy = doc.at("noisy").get<bool>();
    sweep.k_sigma = doc.at("k_sigma").get<double>();
    sweep.baseline = metric_set_from_json(doc.at("baseline"), "sweep.baseline");
    for (std::size_t i = 0; i < doc.at("points").size(); ++i) {
        const json& p = doc.at("points")[i];
        const std::string where = "sweep.points[" + std::to_string(i) + "]";
        require_keys(p, {"lambda", "v", "w_x", "w_y", "c_mag"},
                     {"lambda", "v", "w_x", "w_y", "c_mag"}, where);
        SweepPoint pt;
        pt.lambda = p.at("lambda").get<double>();
        pt.predicted = metric_set_from_json(json{{"v", p.at("v")},
                                                 {"w_x", p.at("w_x")},
                                                 {"w_y", p.at("w_y")},
                                                 {"c_mag", p.at("c_mag")}},
                                            where);
        sweep.points.push_back(pt);
    }
    return sweep;
    } catch (const json::exception& e) {
        throw parse_error(std::string("sweep: ") + e.what());
    }
}

Manifest build_manifest(const std::string& directory, const std::vector<std::string>& exclude) {
    const fs::path root(directory);
    if (!fs::is_directory(root)) throw io_error("not a directory: " + directory);
    const std::set<std::string> skip(exclude.begin(), exclude.end());
    std::vector<std::string> paths;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        const std::string rel = fs::relative(entry.path(), root).generic_string();
        if (!skip.count(rel)) paths.push_back(rel);
    }
    std::sort(paths.begin(), paths.end());
    Manifest manifest;
    manifest.created_utc = utc_timestamp();
    for (const auto& rel : paths)
        manifest.entries[rel] = sha256_file_hex((root / rel).string());
    return manifest;
}

void write_manifest(const Manifest& manifest, const std::string& path) {
    json entries = json::object();
    for (const auto& [rel, digest] : manifest.entries) entries[rel] = digest;
    write_canonical_json(json{{"schema", kSchemaVersion},
                              {"created_utc", manifest.created_utc},
                              {"entries", std::move(entries)}},
                         path);
}

Manifest read_manifest(const std::string& path) {
    try {
        const json doc = read_json_file(path);
        require_keys(doc, {"schema", "created_utc", "entries"},
                     {"schema", "created_utc", "entries"}, "manifest");
        if (doc.at("schema") != kSchemaVersion)
            throw parse_error("manifest: unsupported schema version");
        Manifest manifest;
        manifest.created_utc = doc.at("created_utc").get<std::string>();
        for (const auto& [rel, digest] : doc.at("entries").items()) {
            const std::string d = digest.get<std::string>();
            if (d.size() != 64 || d.find_first_not_of("0123456789abcdef") != std::string::npos)
                throw parse_error("manifest: entry '" + rel + "' is not a sha256 hex digest");
            manifest.entries[rel] = d;
        }
        return manifest;
    } catch (const json::exception& e) {
        throw parse_error(std::string("manifest: ") + e.what());
    }
}

VerifyReport verify_manifest(const std::string& directory, const Manifest& manifest,
                             const std::vector<std::string>& exclude) {
    const Manifest current = build_manifest(directory, exclude);
    VerifyReport report;
    for (const auto& [rel, digest] : manifest.entries) {
        const auto it = current.entries.find(rel);
        if (it == current.entries.end())
            report.missing.push_back(rel);
        else if (it->second != digest)
            report.mismatches.push_back(rel);
    }
    for (const auto& [rel, _] : current.entries)
        if (!manifest.entries.count(rel)) report.extra.push_back(rel);
    report.ok = report.mismatches.empty() && report.missing.empty() && report.extra.empty();
    return report;
}

} // namespace btsim
