// noise.hpp
// Channel insertion into circuits, the parameterized device-noise proxy
// (per-gate depolarizing + terminal readout confusion) and the noisy
// density-matrix execution path.

#pragma once

#include "btsim/circuit.hpp"
#include "btsim/kraus.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>

namespace btsim {

enum class InsertLocation { POST_BRANCH_SPLIT, POST_TRANSFER, PRE_MEASUREMENT };

const char* insert_location_name(InsertLocation loc);
InsertLocation parse_insert_location(const std::string& text);

struct InsertionPoint {
    InsertLocation location = InsertLocation::PRE_MEASUREMENT;
    int target_qubit = 0;
};

struct ReadoutError {
    double e01 = 0.0; // P(read 1 | prepared 0)
    double e10 = 0.0; // P(read 0 | prepared 1)
};

struct NoiseSpec {
    double p1 = 0.0; // depolarizing probability after each 1-qubit gate
    double p2 = 0.0; // 2-qubit depolarizing probability after each 2-qubit gate
    std::map<int, ReadoutError> readout;
};

struct QubitCalibration {
    double t1_us = 0.0;
    double t2_us = 0.0;
    double readout_e01 = 0.0;
    double readout_e10 = 0.0;
};

struct CalibrationSnapshot {
    std::vector<QubitCalibration> qubits;
    double err_1q = 0.0;
    double err_2q = 0.0;
};

// Returns the circuit with a channel marker at the named canonical position.
// PRE_MEASUREMENT places the marker at the end of the gate sequence, before
// any measurement-basis rotations, so that dephasing there attenuates the
// rotated-basis witnesses by the (1 - 2 lambda) law.
Circuit insert_channel(const Circuit& circuit, const KrausChannel& ch, const InsertionPoint& at);

// Sequential density-matrix execution: gates as unitaries, markers resolved
// via apply_channel, optional depolarizing proxy after every gate.  Readout
// confusion is NOT applied here; it acts on probabilities downstream.
DensityMatrix run_density(const Circuit& circuit,
                          const std::optional<NoiseSpec>& noise = std::nullopt);

// Convolves each measured bit with its 2x2 confusion matrix
// [[1-e01, e10], [e01, 1-e10]].  `probs` is indexed over the measured bits.
std::vector<double> apply_readout_confusion(const std::vector<double>& probs,
                                            const std::map<int, ReadoutError>& readout,
                                            const std::vector<int>& measured);

NoiseSpec noise_from_snapshot(const CalibrationSnapshot& snap);

// Strict-schema JSON snapshot file: {"qubits": [...], "gates": {...}}.
CalibrationSnapshot load_calibration_snapshot(const std::string& path);
CalibrationSnapshot parse_calibration_snapshot(const std::string& json_text);

} // namespace btsim
