#include "btsim/circuit.hpp"

#include "btsim/metrics.hpp"
#include "btsim/noise.hpp"
#include "btsim/sampling.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace btsim;

TEST_CASE("canonical branch-transfer circuit, k=1") {
    const auto [circuit, layout] = build_branch_transfer(1, 1.0);
    CHECK(circuit.n_qubits == 5);
    CHECK(layout.q == 0);
    CHECK(layout.r == 1);
    CHECK(layout.f == std::vector<int>{2});
    CHECK(layout.p == 3);
    CHECK(layout.aux == 4);

    const CircuitStats stats = circuit_stats(circuit);
    CHECK(stats.total_gate_count == 7);
    CHECK(stats.two_qubit_count == 5);

    // Output state (|00010> + |11100>)/sqrt(2): amplitude indices 2 and 28.
    const StateVector sv = run_statevector(circuit);
    const auto probs = probabilities(sv);
    CHECK(probs[2] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(probs[28] == doctest::Approx(0.5).epsilon(1e-12));
    for (std::size_t i = 0; i < probs.size(); ++i)
        if (i != 2 && i != 28) CHECK(probs[i] < 1e-15);

    // Projector has exactly four entries of magnitude 1/2.
    const DensityMatrix rho = to_density(sv);
    int nonzero = 0;
    for (const auto& e : rho.entries.a)
        if (std::abs(e) > 1e-12) {
            ++nonzero;
            CHECK(std::abs(e) == doctest::Approx(0.5).epsilon(1e-12));
        }
    CHECK(nonzero == 4);
}

TEST_CASE("canonical circuit, k=3 full mask") {
    const auto [circuit, layout] = build_branch_transfer(3, 1.0, "111");
    const auto probs = probabilities(run_statevector(circuit));
    // Branches (Q,R,F1F2F3,P,A) = 0,0,000,1,0 and 1,1,111,0,0.
    CHECK(probs[0b0000010] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(probs[0b1111100] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("gate_cx_pow endpoints and unitarity") {
    // Construction itself validates unitarity across the mu range.
    for (double mu = 0.0; mu <= 1.0001; mu += 0.1) (void)gate_cx_pow(mu);
    CHECK(gate_cx_pow(1.0).m.max_abs_diff(gate_cx().m) < 1e-15);
    CHECK(gate_cx_pow(0.0).m.max_abs_diff(CMat::identity(4)) < 1e-15);
}

TEST_CASE("build_branch_transfer validation") {
    CHECK_THROWS_AS(build_branch_transfer(0, 1.0), validation_error);
    CHECK_THROWS_AS(build_branch_transfer(13, 1.0), size_error);
    CHECK_THROWS_AS(build_branch_transfer(2, 1.0, "00"), validation_error);
    CHECK_THROWS_AS(build_branch_transfer(2, 1.0, "1"), validation_error);
    CHECK_THROWS_AS(build_branch_transfer(2, 1.0, "1x"), validation_error);
    CHECK_THROWS_AS(build_branch_transfer(1, 1.5), validation_error);
}

TEST_CASE("append_basis_rotation") {
    SUBCASE("X basis maps |+> to a deterministic outcome") {
        Circuit c;
        c.n_qubits = 1;
        c.ops.emplace_back(OpKind::H, std::vector<int>{0});
        const Circuit rotated = append_basis_rotation(c, MeasBasis::X, {0});
        const auto probs = probabilities(run_statevector(rotated));
        CHECK(probs[0] == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("Y basis maps (|0> + i|1>)/sqrt(2) to a deterministic outcome") {
        Circuit c;
        c.n_qubits = 1;
        const Circuit rotated = append_basis_rotation(c, MeasBasis::Y, {0});
        StateVector s = new_zero_state(1);
        s.amplitudes = {1.0 / std::numbers::sqrt2, cplx{0.0, 1.0 / std::numbers::sqrt2}};
        for (const auto& op : rotated.ops)
            s = apply_gate(s, op.kind == OpKind::SDG ? gate_sdg() : gate_h(), op.targets);
        const auto probs = probabilities(s);
        CHECK(probs[0] == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("empty qubit list clears measurement and sampling rejects it") {
        const auto [circuit, layout] = build_branch_transfer(1, 1.0);
        const Circuit rotated = append_basis_rotation(circuit, MeasBasis::X, {});
        CHECK(rotated.measured_qubits.empty());
        CHECK(rotated.ops.size() == circuit.ops.size());
        SeededSampler rng(kDefaultSeed);
        CHECK_THROWS_AS(sample_counts({1.0}, rotated.measured_qubits, 10, rng),
                        validation_error);
    }
    SUBCASE("invalid qubits") {
        const auto [circuit, layout] = build_branch_transfer(1, 1.0);
        CHECK_THROWS_AS(append_basis_rotation(circuit, MeasBasis::X, {9}), index_error);
        CHECK_THROWS_AS(append_basis_rotation(circuit, MeasBasis::X, {1, 1}), index_error);
        CHECK_THROWS_AS(with_measured(circuit, {-1}), index_error);
    }
}

TEST_CASE("basis rotation reproduces Pauli expectations on arbitrary states") {
    SeededSampler rng(31);
    for (int rep = 0; rep < 25; ++rep) {
        const DensityMatrix rho = test::rand_density(1, rng);
        const DensityMatrix rx = apply_unitary_dm(rho, gate_h(), std::vector<int>{0});
        const auto px = probabilities(rx);
        CHECK(px[0] - px[1] ==
              doctest::Approx(expectation_pauli(rho, PauliString::parse("X"))).epsilon(1e-9));

        DensityMatrix ry = apply_unitary_dm(rho, gate_sdg(), std::vector<int>{0});
        ry = apply_unitary_dm(ry, gate_h(), std::vector<int>{0});
        const auto py = probabilities(ry);
        CHECK(py[0] - py[1] ==
              doctest::Approx(expectation_pauli(rho, PauliString::parse("Y"))).epsilon(1e-9));
    }
}

TEST_CASE("run_statevector") {
    SUBCASE("empty circuit is the identity") {
        Circuit c;
        c.n_qubits = 2;
        const StateVector s = run_statevector(c);
        CHECK(s.amplitudes[0] == cplx{1.0, 0.0});
    }
    SUBCASE("channel markers are rejected") {
        const auto [circuit, layout] = build_branch_transfer(1, 1.0);
        const Circuit noisy = insert_channel(
            circuit, phase_flip(0.25), {InsertLocation::POST_BRANCH_SPLIT, layout.f[0]});
        CHECK_THROWS_AS(run_statevector(noisy), unsupported_path_error);
    }
    SUBCASE("rotated canonical circuit has even parity everywhere") {
        const auto [circuit, layout] = build_branch_transfer(1, 1.0);
        const Circuit rotated =
            append_basis_rotation(circuit, MeasBasis::X, layout.witness_qubits());
        const auto probs = probabilities(run_statevector(rotated));
        const auto marginal =
            marginalize_probs(probs, circuit.n_qubits, layout.witness_qubits());
        CHECK(exact_parity(marginal) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("circuit_stats") {
    SUBCASE("empty circuit") {
        Circuit c;
        c.n_qubits = 3;
        const CircuitStats stats = circuit_stats(c);
        CHECK(stats.depth == 0);
        CHECK(stats.two_qubit_count == 0);
        CHECK(stats.total_gate_count == 0);
    }
    SUBCASE("k=5 full mask has 9 two-qubit gates") {
        const auto [circuit, layout] = build_branch_transfer(5, 1.0, "11111");
        CHECK(circuit_stats(circuit).two_qubit_count == 9);
    }
    SUBCASE("channel markers are excluded") {
        const auto [circuit, layout] = build_branch_transfer(1, 1.0);
        const Circuit noisy =
            insert_channel(circuit, phase_flip(0.5), {InsertLocation::POST_TRANSFER, layout.f[0]});
        const CircuitStats a = circuit_stats(circuit);
        const CircuitStats b = circuit_stats(noisy);
        CHECK(a.depth == b.depth);
        CHECK(a.total_gate_count == b.total_gate_count);
    }
    SUBCASE("depth is invariant under qubit relabeling") {
        SeededSampler rng(17);
        for (int rep = 0; rep < 10; ++rep) {
            const int n = 4;
            const Circuit c = test::rand_circuit(n, 20, rng);
            std::vector<int> perm = {0, 1, 2, 3};
            for (int i = n - 1; i > 0; --i)
                std::swap(perm[static_cast<std::size_t>(i)],
                          perm[rng.next_u64() % static_cast<std::uint64_t>(i + 1)]);
            Circuit relabeled = c;
            for (auto& op : relabeled.ops)
                for (auto& t : op.targets) t = perm[static_cast<std::size_t>(t)];
            CHECK(circuit_stats(c).depth == circuit_stats(relabeled).depth);
        }
    }
}

TEST_CASE("ideal_witness_table") {
    SUBCASE("k=1, mu=1 reproduces the ideal headline metrics") {
        const MetricSet m = ideal_witness_table(1, 1.0);
        CHECK(m.v == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(m.w_x == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(m.w_y == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(m.c_mag == doctest::Approx(std::numbers::sqrt2).epsilon(1e-12));
    }
    SUBCASE("mu=0 leaves the friend register untouched") {
        const MetricSet m = ideal_witness_table(1, 0.0);
        CHECK(m.w_x == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(m.w_y == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(m.v == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(m.c_mag == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("W_X and V stay maximal for k up to 6") {
        for (int k = 1; k <= 6; ++k) {
            const MetricSet m = ideal_witness_table(k, 1.0);
            CHECK(m.w_x == doctest::Approx(1.0).epsilon(1e-9));
            CHECK(m.v == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
    SUBCASE("W_Y follows the Y-string phase pattern over k") {
        // The branch bitstrings are complements, so Y...Y maps one onto the
        // other with phase i^n0 (-i)^n1; averaging the two branches gives
        // the period-4 series below in m = k + 3 measured bits.
        const double expected[] = {-1.0, 0.0, 1.0, 0.0, -1.0, 0.0};
        for (int k = 1; k <= 6; ++k)
            CHECK(ideal_witness_table(k, 1.0).w_y ==
                  doctest::Approx(expected[k - 1]).epsilon(1e-9));
    }
    SUBCASE("C_mag is always the quadrature of the witnesses") {
        for (const double mu : {0.0, 0.3, 0.7, 1.0}) {
            for (int k = 1; k <= 3; ++k) {
                const MetricSet m = ideal_witness_table(k, mu);
                CHECK(m.c_mag == doctest::Approx(std::hypot(m.w_x, m.w_y)).epsilon(1e-12));
            }
        }
    }
}
