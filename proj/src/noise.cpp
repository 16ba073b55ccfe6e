#include "btsim/noise.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace btsim {

using nlohmann::json;

const char* insert_location_name(InsertLocation loc) {
    switch (loc) {
    case InsertLocation::POST_BRANCH_SPLIT: return "post-branch";
    case InsertLocation::POST_TRANSFER: return "post-transfer";
    case InsertLocation::PRE_MEASUREMENT: return "pre-measure";
    }
    return "?";
}

InsertLocation parse_insert_location(const std::string& text) {
    if (text == "post-branch") return InsertLocation::POST_BRANCH_SPLIT;
    if (text == "post-transfer") return InsertLocation::POST_TRANSFER;
    if (text == "pre-measure") return InsertLocation::PRE_MEASUREMENT;
    throw validation_error("unknown insertion location '" + text + "'");
}

Circuit insert_channel(const Circuit& circuit, const KrausChannel& ch, const InsertionPoint& at) {
    if (at.target_qubit < 0 || at.target_qubit >= circuit.n_qubits)
        throw index_error("insert_channel: target qubit out of range");
    if (ch.arity != 1)
        throw validation_error("insert_channel: only single-qubit insertions are supported");

    int pos = 0;
    switch (at.location) {
    case InsertLocation::POST_BRANCH_SPLIT:
        pos = circuit.post_branch_split_anchor;
        break;
    case InsertLocation::POST_TRANSFER:
        pos = circuit.post_transfer_anchor;
        break;
    case InsertLocation::PRE_MEASUREMENT:
        pos = circuit.rotation_start >= 0 ? circuit.rotation_start
                                          : static_cast<int>(circuit.ops.size());
        break;
    }
    if (pos < 0)
        throw validation_error("insert_channel: circuit has no anchor for location " +
                               std::string(insert_location_name(at.location)));

    Circuit out = circuit;
    // Earlier insertions at the same point stay ahead (insertion order).
    while (pos < static_cast<int>(out.ops.size()) && out.ops[pos].kind == OpKind::CHANNEL) ++pos;
    const std::string id = "ch" + std::to_string(out.channels.size());
    out.channels.emplace(id, ch);
    CircuitOp marker{OpKind::CHANNEL, {at.target_qubit}};
    marker.channel_id = id;
    out.ops.insert(out.ops.begin() + pos, std::move(marker));
    if (out.post_branch_split_anchor > pos) ++out.post_branch_split_anchor;
    if (out.post_transfer_anchor > pos) ++out.post_transfer_anchor;
    if (out.rotation_start >= pos) ++out.rotation_start;
    return out;
}

DensityMatrix run_density(const Circuit& circuit, const std::optional<NoiseSpec>& noise) {
    if (circuit.n_qubits > 10)
        throw size_error("run_density: density-matrix path limited to 10 qubits");
    DensityMatrix rho = to_density(new_zero_state(circuit.n_qubits));
    for (const auto& op : circuit.ops) {
        if (op.kind == OpKind::CHANNEL) {
            const auto it = circuit.channels.find(op.channel_id);
            if (it == circuit.channels.end())
                throw integrity_error("run_density: marker references unknown channel '" +
                                      op.channel_id + "'");
            rho = apply_channel(rho, it->second, op.targets);
            continue;
        }
        GateMatrix g = [&] {
            switch (op.kind) {
            case OpKind::H: return gate_h();
            case OpKind::X: return gate_x();
            case OpKind::SDG: return gate_sdg();
            case OpKind::CX: return gate_cx();
            case OpKind::CXPOW: return gate_cx_pow(op.param);
            default: throw validation_error("run_density: unexpected op kind");
            }
        }();
        rho = apply_unitary_dm(rho, g, op.targets);
        if (noise) {
            if (op.targets.size() == 1 && noise->p1 > 0.0)
                rho = apply_channel(rho, depolarizing(noise->p1, 1), op.targets);
            else if (op.targets.size() == 2 && noise->p2 > 0.0)
                rho = apply_channel(rho, depolarizing(noise->p2, 2), op.targets);
        }
    }
    return rho;
}

std::vector<double> apply_readout_confusion(const std::vector<double>& probs,
                                            const std::map<int, ReadoutError>& readout,
                                            const std::vector<int>& measured) {
    if (probs.size() != (std::size_t{1} << measured.size()))
        throw shape_error("apply_readout_confusion: array length does not match measured set");
    std::vector<double> out = probs;
    for (std::size_t b = 0; b < measured.size(); ++b) {
        const auto it = readout.find(measured[b]);
        if (it == readout.end())
            throw validation_error("apply_readout_confusion: no readout entry for qubit " +
                                   std::to_string(measured[b]));
        const double e01 = it->second.e01;
        const double e10 = it->second.e10;
        const std::size_t bit = std::size_t{1} << (measured.size() - 1 - b);
        std::vector<double> next(out.size());
        for (std::size_t i = 0; i < out.size(); ++i) {
            const std::size_t i0 = i & ~bit;
            const std::size_t i1 = i | bit;
            if (i & bit)
                next[i] = e01 * out[i0] + (1.0 - e10) * out[i1];
            else
                next[i] = (1.0 - e01) * out[i0] + e10 * out[i1];
        }
        out = std::move(next);
    }
    double sum = 0.0;
    for (double p : out) sum += p;
    if (std::abs(sum - 1.0) > tol.trace)
        throw validation_error("apply_readout_confusion: output not normalized");
    return out;
}

NoiseSpec noise_from_snapshot(const CalibrationSnapshot& snap) {
    NoiseSpec spec;
    spec.p1 = snap.err_1q;
    spec.p2 = snap.err_2q;
    for (std::size_t i = 0; i < snap.qubits.size(); ++i)
        spec.readout[static_cast<int>(i)] = {snap.qubits[i].readout_e01,
                                             snap.qubits[i].readout_e10};
    return spec;
}

namespace {

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::set<std::string>& required, const std::string& where) {
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key))
            throw parse_error("calibration snapshot: unknown key '" + key + "' in " + where);
    for (const auto& key : required)
        if (!obj.contains(key))
            throw parse_error("calibration snapshot: missing key '" + key + "' in " + where);
}

double rate_in_unit(const json& obj, const char* key, const std::string& where) {
    const double v = obj.at(key).get<double>();
    if (!(v >= 0.0 && v <= 1.0))
        throw parse_error("calibration snapshot: " + where + "." + key + " must be in [0, 1]");
    return v;
}

} // namespace

CalibrationSnapshot parse_calibration_snapshot(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw parse_error(std::string("calibration snapshot: invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw parse_error("calibration snapshot: top level must be an object");
    require_keys(doc, {"schema", "qubits", "gates"}, {"qubits", "gates"}, "top level");
    if (doc.contains("schema") && doc["schema"] != 1)
        throw parse_error("calibration snapshot: unsupported schema version");

    CalibrationSnapshot snap;
    const json& qubits = doc.at("qubits");
    if (!qubits.is_array()) throw parse_error("calibration snapshot: 'qubits' must be an array");
    for (std::size_t i = 0; i < qubits.size(); ++i) {
        const std::string where = "qubits[" + std::to_string(i) + "]";
        const json& q = qubits[i];
        if (!q.is_object()) throw parse_error("calibration snapshot: " + where + " must be an object");
        require_keys(q, {"t1_us", "t2_us", "readout_e01", "readout_e10"},
                     {"t1_us", "t2_us", "readout_e01", "readout_e10"}, where);
        QubitCalibration cal;
        cal.t1_us = q.at("t1_us").get<double>();
        cal.t2_us = q.at("t2_us").get<double>();
        if (!(cal.t1_us > 0.0) || !(cal.t2_us > 0.0))
            throw parse_error("calibration snapshot: " + where + " t1_us/t2_us must be > 0");
        cal.readout_e01 = rate_in_unit(q, "readout_e01", where);
        cal.readout_e10 = rate_in_unit(q, "readout_e10", where);
        snap.qubits.push_back(cal);
    }
    const json& gates = doc.at("gates");
    if (!gates.is_object()) throw parse_error("calibration snapshot: 'gates' must be an object");
    require_keys(gates, {"err_1q", "err_2q"}, {"err_1q", "err_2q"}, "gates");
    snap.err_1q = rate_in_unit(gates, "err_1q", "gates");
    snap.err_2q = rate_in_unit(gates, "err_2q", "gates");
    return snap;
}

CalibrationSnapshot load_calibration_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open calibration snapshot: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_calibration_snapshot(buf.str());
}

} // namespace btsim
