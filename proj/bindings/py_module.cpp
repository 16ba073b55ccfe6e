// Python bindings for the btsim core operations.

#include "btsim/artifact.hpp"
#include "btsim/circuit.hpp"
#include "btsim/constraint.hpp"
#include "btsim/kraus.hpp"
#include "btsim/metrics.hpp"
#include "btsim/noise.hpp"
#include "btsim/sampling.hpp"
#include "btsim/sha256.hpp"
#include "btsim/state.hpp"

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace btsim;

namespace {

std::vector<std::vector<cplx>> mat_rows(const CMat& m) {
    std::vector<std::vector<cplx>> rows;
    rows.reserve(static_cast<std::size_t>(m.dim));
    for (int r = 0; r < m.dim; ++r) {
        std::vector<cplx> row;
        row.reserve(static_cast<std::size_t>(m.dim));
        for (int c = 0; c < m.dim; ++c) row.push_back(m.at(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

py::dict metric_set_dict(const MetricSet& m) {
    py::dict d;
    d["v"] = m.v;
    d["w_x"] = m.w_x;
    d["w_y"] = m.w_y;
    d["c_mag"] = m.c_mag;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "branch-transfer circuit simulator core";
    m.attr("__version__") = kToolVersion;
    m.attr("DEFAULT_SEED") = kDefaultSeed;
    m.attr("SAMPLER_ALGORITHM") = kSamplerAlgorithm;

    py::register_exception<validation_error>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<undefined_conditional_error>(m, "UndefinedConditionalError",
                                                        PyExc_ArithmeticError);
    py::register_exception<io_error>(m, "IoError", PyExc_IOError);

    py::enum_<Pauli>(m, "Pauli")
        .value("I", Pauli::I)
        .value("X", Pauli::X)
        .value("Y", Pauli::Y)
        .value("Z", Pauli::Z);

    py::enum_<MeasBasis>(m, "MeasBasis").value("X", MeasBasis::X).value("Y", MeasBasis::Y);

    py::enum_<RunMode>(m, "RunMode")
        .value("COHERENCE_X", RunMode::COHERENCE_X)
        .value("COHERENCE_Y", RunMode::COHERENCE_Y)
        .value("RP_Z", RunMode::RP_Z);

    py::enum_<InsertLocation>(m, "InsertLocation")
        .value("POST_BRANCH_SPLIT", InsertLocation::POST_BRANCH_SPLIT)
        .value("POST_TRANSFER", InsertLocation::POST_TRANSFER)
        .value("PRE_MEASUREMENT", InsertLocation::PRE_MEASUREMENT);

    py::enum_<ChannelFamily>(m, "ChannelFamily").value("PHASE_FLIP", ChannelFamily::PHASE_FLIP);

    py::class_<StateVector>(m, "StateVector")
        .def_readonly("n_qubits", &StateVector::n_qubits)
        .def_readonly("amplitudes", &StateVector::amplitudes)
        .def("norm_sq", &StateVector::norm_sq);

    py::class_<DensityMatrix>(m, "DensityMatrix")
        .def_readonly("n_qubits", &DensityMatrix::n_qubits)
        .def_property_readonly("entries",
                               [](const DensityMatrix& dm) { return mat_rows(dm.entries); })
        .def("trace", [](const DensityMatrix& dm) { return dm.trace(); });

    py::class_<PauliString>(m, "PauliString")
        .def_static("parse", &PauliString::parse)
        .def_readonly("n_qubits", &PauliString::n_qubits);

    py::class_<GateMatrix>(m, "GateMatrix")
        .def_readonly("arity", &GateMatrix::arity)
        .def_property_readonly("entries", [](const GateMatrix& g) { return mat_rows(g.m); });

    py::class_<KrausChannel>(m, "KrausChannel")
        .def_readonly("arity", &KrausChannel::arity)
        .def_property_readonly("kraus_ops",
                               [](const KrausChannel& ch) {
                                   std::vector<std::vector<std::vector<cplx>>> ops;
                                   for (const auto& k : ch.kraus_ops) ops.push_back(mat_rows(k));
                                   return ops;
                               })
        .def("completeness_deviation", &KrausChannel::completeness_deviation);

    py::class_<RegisterLayout>(m, "RegisterLayout")
        .def_readonly("q", &RegisterLayout::q)
        .def_readonly("r", &RegisterLayout::r)
        .def_readonly("f", &RegisterLayout::f)
        .def_readonly("p", &RegisterLayout::p)
        .def_readonly("aux", &RegisterLayout::aux)
        .def("witness_qubits", &RegisterLayout::witness_qubits);

    py::class_<Circuit>(m, "Circuit")
        .def_readonly("n_qubits", &Circuit::n_qubits)
        .def_readonly("measured_qubits", &Circuit::measured_qubits)
        .def("has_channel_markers", &Circuit::has_channel_markers)
        .def("__len__", [](const Circuit& c) { return c.ops.size(); });

    py::class_<CircuitStats>(m, "CircuitStats")
        .def_readonly("depth", &CircuitStats::depth)
        .def_readonly("two_qubit_count", &CircuitStats::two_qubit_count)
        .def_readonly("total_gate_count", &CircuitStats::total_gate_count);

    py::class_<InsertionPoint>(m, "InsertionPoint")
        .def(py::init([](InsertLocation loc, int qubit) {
                 return InsertionPoint{loc, qubit};
             }),
             py::arg("location"), py::arg("target_qubit"))
        .def_readwrite("location", &InsertionPoint::location)
        .def_readwrite("target_qubit", &InsertionPoint::target_qubit);

    py::class_<NoiseSpec>(m, "NoiseSpec")
        .def(py::init<>())
        .def_readwrite("p1", &NoiseSpec::p1)
        .def_readwrite("p2", &NoiseSpec::p2)
        .def("set_readout",
             [](NoiseSpec& spec, int qubit, double e01, double e10) {
                 spec.readout[qubit] = {e01, e10};
             });

    py::class_<Counts>(m, "Counts")
        .def_readonly("bit_order", &Counts::bit_order)
        .def_readonly("table", &Counts::table)
        .def_readonly("total_shots", &Counts::total_shots);

    py::class_<SeededSampler>(m, "SeededSampler")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def_property_readonly("seed", &SeededSampler::seed)
        .def_property_readonly("algorithm_id", &SeededSampler::algorithm_id);

    py::class_<WitnessResult>(m, "WitnessResult")
        .def_readonly("value", &WitnessResult::value)
        .def_readonly("error", &WitnessResult::error)
        .def_readonly("shots_used", &WitnessResult::shots_used)
        .def("__repr__", [](const WitnessResult& r) {
            return "WitnessResult(value=" + std::to_string(r.value) +
                   ", error=" + std::to_string(r.error) + ")";
        });

    py::class_<SweepPoint>(m, "SweepPoint")
        .def_readonly("lambda_", &SweepPoint::lambda)
        .def_property_readonly("predicted",
                               [](const SweepPoint& pt) { return metric_set_dict(pt.predicted); });

    py::class_<SweepResult>(m, "SweepResult")
        .def_readonly("channel_family_id", &SweepResult::channel_family_id)
        .def_readonly("k_sigma", &SweepResult::k_sigma)
        .def_readonly("points", &SweepResult::points)
        .def_property_readonly("baseline",
                               [](const SweepResult& s) { return metric_set_dict(s.baseline); });

    // qsim
    m.def("new_zero_state", &new_zero_state, py::arg("n_qubits"));
    m.def("apply_gate",
          [](const StateVector& s, const GateMatrix& g, const std::vector<int>& targets) {
              return apply_gate(s, g, targets);
          });
    m.def("to_density", &to_density);
    m.def("apply_unitary_dm",
          [](const DensityMatrix& dm, const GateMatrix& g, const std::vector<int>& targets) {
              return apply_unitary_dm(dm, g, targets);
          });
    m.def("probabilities",
          [](const StateVector& s) { return probabilities(s); });
    m.def("probabilities_dm",
          [](const DensityMatrix& dm) { return probabilities(dm); });
    m.def("expectation_pauli",
          [](const StateVector& s, const std::string& p) {
              return expectation_pauli(s, PauliString::parse(p));
          });
    m.def("expectation_pauli_dm",
          [](const DensityMatrix& dm, const std::string& p) {
              return expectation_pauli(dm, PauliString::parse(p));
          });

    // gates
    m.def("gate_h", &gate_h);
    m.def("gate_x", &gate_x);
    m.def("gate_sdg", &gate_sdg);
    m.def("gate_cx", &gate_cx);
    m.def("gate_cx_pow", &gate_cx_pow, py::arg("mu"));

    // circuit-ir
    m.def("build_branch_transfer", &build_branch_transfer, py::arg("k"), py::arg("mu"),
          py::arg("mask") = "");
    m.def("append_basis_rotation", &append_basis_rotation);
    m.def("with_measured", &with_measured);
    m.def("run_statevector", &run_statevector);
    m.def("circuit_stats", &circuit_stats);
    m.def("ideal_witness_table",
          [](int k, double mu) { return metric_set_dict(ideal_witness_table(k, mu)); },
          py::arg("k"), py::arg("mu"));

    // noise-channels
    m.def("phase_flip", &phase_flip, py::arg("lambda_"));
    m.def("depolarizing", &depolarizing, py::arg("p"), py::arg("arity"));
    m.def("apply_channel",
          [](const DensityMatrix& dm, const KrausChannel& ch, const std::vector<int>& targets) {
              return apply_channel(dm, ch, targets);
          });
    m.def("insert_channel", &insert_channel);
    m.def("run_density",
          [](const Circuit& c, const std::optional<NoiseSpec>& noise) {
              return run_density(c, noise);
          },
          py::arg("circuit"), py::arg("noise") = std::nullopt);
    m.def("apply_readout_confusion",
          [](const std::vector<double>& probs, const std::map<int, std::pair<double, double>>& ro,
             const std::vector<int>& measured) {
              std::map<int, ReadoutError> readout;
              for (const auto& [q, e] : ro) readout[q] = {e.first, e.second};
              return apply_readout_confusion(probs, readout, measured);
          });
    m.def("load_calibration_snapshot",
          [](const std::string& path) { return noise_from_snapshot(load_calibration_snapshot(path)); });

    // shot-sampler
    m.def("sample_counts",
          [](const std::vector<double>& probs, const std::vector<int>& measured,
             std::int64_t shots, SeededSampler& sampler) {
              return sample_counts(probs, measured, shots, sampler);
          });
    m.def("marginalize", &marginalize);
    m.def("marginalize_probs", &marginalize_probs);
    m.def("derive_seed", &derive_seed);

    // witness-metrics
    m.def("parity_witness", &parity_witness);
    m.def("visibility", &visibility);
    m.def("coherence_magnitude", &coherence_magnitude);
    m.def("metrics_from_run", &metrics_from_run);
    m.def("exact_parity", &exact_parity);
    m.def("exact_visibility", &exact_visibility);

    // constraint-pipeline
    m.def("deviation_curves",
          [](int k, double mu, ChannelFamily family, const InsertionPoint& at,
             const std::vector<double>& lambdas, const std::optional<NoiseSpec>& noise) {
              return deviation_curves(k, mu, family, at, lambdas, noise);
          },
          py::arg("k"), py::arg("mu"), py::arg("family"), py::arg("at"), py::arg("lambdas"),
          py::arg("noise") = std::nullopt);
    m.def("combined_band", &combined_band);
    m.def("detectability_threshold",
          [](const SweepResult& sweep, double v, double w_x, double w_y, double c_mag) {
              const DetectabilityResult res =
                  detectability_threshold(sweep, UncertaintyBand{v, w_x, w_y, c_mag});
              return py::make_tuple(res.lambda_max, res.deciding_metric);
          },
          py::arg("sweep"), py::arg("v"), py::arg("w_x"), py::arg("w_y"), py::arg("c_mag"));
    m.def("lambda_est", &lambda_est, py::arg("w_hw"), py::arg("w_ideal"));
    m.def("first_order_prediction", &first_order_prediction, py::arg("w0"), py::arg("lambda_"));

    // artifact-harness
    m.def("sha256_hex", &sha256_hex);
    m.def("sha256_file_hex", &sha256_file_hex);
    m.def("circuit_hash", &circuit_hash);
    m.def("build_manifest_entries", [](const std::string& dir) {
        return build_manifest(dir).entries;
    });
}
