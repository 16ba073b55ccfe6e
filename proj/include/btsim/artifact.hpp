// artifact.hpp
// Result-artifact documents with provenance, canonical JSON serialization
// (sorted keys, 17-significant-digit floats, byte-stable re-serialization)
// and SHA256 manifest generation / verification.

#pragma once

#include "btsim/circuit.hpp"
#include "btsim/constraint.hpp"
#include "btsim/metrics.hpp"
#include "btsim/noise.hpp"
#include "btsim/sampling.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace btsim {

inline constexpr char kToolVersion[] = "0.1.0";
inline constexpr int kSchemaVersion = 1;

// --- canonical JSON ---------------------------------------------------

// Deterministic text form: sorted keys, 2-space indent, floats at 17
// significant digits.  Serializing a parsed document reproduces its bytes.
std::string canonical_json(const nlohmann::json& doc);
// Shortest-of-17-significant-digits float text, locale independent.
std::string format_float17(double value);
void write_canonical_json(const nlohmann::json& doc, const std::string& path);
nlohmann::json read_json_file(const std::string& path);

// "YYYY-MM-DDTHH:MM:SSZ"; honors SOURCE_DATE_EPOCH for reproducible runs.
std::string utc_timestamp();

// --- provenance hashes ------------------------------------------------

std::string circuit_canonical_text(const Circuit& circuit);
std::string circuit_hash(const Circuit& circuit);
std::string noise_spec_hash(const NoiseSpec& spec);

// --- result artifacts ---------------------------------------------------

struct MetricEntry {
    double value = 0.0;
    double error = 0.0;
    std::int64_t shots = 0;
};

struct Provenance {
    std::string tool_version = kToolVersion;
    std::string timestamp_utc;
    std::string circuit_hash;
    std::optional<std::string> noise_spec_hash;
};

struct ResultArtifact {
    std::string mode; // coherence-x | coherence-y | rp-z | ideal
    int k = 1;
    double mu = 1.0;
    std::int64_t shots = 0;
    std::uint64_t seed = 0;
    Counts counts;
    std::map<std::string, MetricEntry> metrics;
    Provenance provenance;
};

void validate_result_artifact(const ResultArtifact& artifact);
nlohmann::json result_artifact_to_json(const ResultArtifact& artifact);
ResultArtifact result_artifact_from_json(const nlohmann::json& doc);
void write_result_artifact(const ResultArtifact& artifact, const std::string& path);
ResultArtifact read_result_artifact(const std::string& path);

// Merged metrics summary (the `analyze` output, and the carrier format for
// hardware reference values fed to `constrain`).
struct MetricsSummary {
    std::map<std::string, MetricEntry> metrics;
    std::vector<std::string> inputs; // basenames, sorted
    Provenance provenance;
};

nlohmann::json summary_to_json(const MetricsSummary& summary);
MetricsSummary summary_from_json(const nlohmann::json& doc);
void write_metrics_summary(const MetricsSummary& summary, const std::string& path);
MetricsSummary read_metrics_summary(const std::string& path);

// Sweep document; `constrain` re-emits it with the analysis block filled.
nlohmann::json sweep_to_json(const SweepResult& sweep, const Provenance& prov);
SweepResult sweep_from_json(const nlohmann::json& doc);

// --- manifests ----------------------------------------------------------

struct Manifest {
    std::map<std::string, std::string> entries; // relative path -> sha256 hex
    std::string created_utc;
};

struct VerifyReport {
    bool ok = false;
    std::vector<std::string> mismatches;
    std::vector<std::string> missing;
    std::vector<std::string> extra;
};

// Hashes every regular file under `directory` (sorted relative paths,
// forward-slash separators).  `exclude` names relative paths to skip,
// typically the manifest file itself when it lives inside the directory.
Manifest build_manifest(const std::string& directory,
                        const std::vector<std::string>& exclude = {});
void write_manifest(const Manifest& manifest, const std::string& path);
Manifest read_manifest(const std::string& path);
VerifyReport verify_manifest(const std::string& directory, const Manifest& manifest,
                             const std::vector<std::string>& exclude = {});

} // namespace btsim
