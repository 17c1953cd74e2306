import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lsmesh.circuit import (
    GATE_SET,
    Circuit,
    CircuitError,
    ClusteredMix,
    cuccaro_ops,
    decompose_to_gateset,
    generate_cuccaro_adder,
    generate_random_circuit,
    mix_profile,
    parse_circuit,
)


def test_parse_line_format():
    c = parse_circuit("qubits 2\ncx 0 1\nh 0")
    assert c.num_qubits == 2
    assert c.ops() == [("cnot", (0, 1)), ("h", (0,))]
    assert [g.seq for g in c.gates] == [0, 1]


def test_parse_tdg_expands():
    c = parse_circuit("qubits 1\ntdg 0")
    assert c.ops() == [("z", (0,)), ("s", (0,)), ("t", (0,))]


def test_parse_comments_and_blank_lines():
    c = parse_circuit("# adder\nqubits 3\n\nccx 0 1 2  # toffoli\n")
    assert len(c) == 21


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("qubits 2\ncx 0 0", "control equals target"),
        ("qubits 2\ncx 0 2", "out of range"),
        ("qubits 2\nrx 0", "unsupported gate 'rx'"),
        ("cx 0 1", "header"),
        ("qubits 2\nh a", "non-integer"),
        ("qubits 2\nh 0 1", "operand"),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(CircuitError, match=fragment):
        parse_circuit(text)


def test_parse_error_carries_line_number():
    with pytest.raises(CircuitError) as info:
        parse_circuit("qubits 2\nh 0\n\ncx 1 1\n")
    assert info.value.line == 4


def test_parse_qasm_subset():
    src = """OPENQASM 2.0;
include "qelib1.inc";
qreg q[3];
h q[0];
cx q[0],q[1]; t q[2];
sdg q[1];
ccx q[0], q[1], q[2];
"""
    c = parse_circuit(src)
    assert c.num_qubits == 3
    assert c.ops()[:5] == [("h", (0,)), ("cnot", (0, 1)), ("t", (2,)), ("z", (1,)), ("s", (1,))]
    assert len(c) == 5 + 21


@pytest.mark.parametrize(
    "body, fragment",
    [
        ("qreg q[2];\ncreg c[2];", "creg"),
        ("qreg q[2];\nmeasure q[0] -> c[0];", "measure"),
        ("qreg q[2];\nqreg r[2];", "single qreg"),
        ("qreg q[2];\nrz(0.1) q[0];", "parse|unsupported"),
        ("qreg q[2];\nh r[0];", "bad operand"),
        ("qreg q[2];\ncx q[1],q[1];", "control equals target"),
    ],
)
def test_qasm_rejections(body, fragment):
    with pytest.raises(CircuitError, match=fragment):
        parse_circuit("OPENQASM 2.0;\n" + body)


def test_text_roundtrip():
    c = generate_random_circuit(10, 200, "60/40", seed=3)
    assert parse_circuit(c.to_text()) == c


def test_circuit_rejects_bad_seq():
    from lsmesh.circuit import Gate
    with pytest.raises(CircuitError):
        Circuit(2, (Gate("h", (0,), 1),))


# ---------------------------------------------------------------- decomposition

@pytest.mark.parametrize(
    "kind, n",
    [("sdg", 1), ("tdg", 1)],
)
def test_adjoint_decompositions_match_matrices(matrix_oracle, kind, n):
    circuit_matrix, same = matrix_oracle
    rewritten = decompose_to_gateset([(kind, (0,))])
    assert all(k in GATE_SET for k, _ in rewritten)
    assert same(circuit_matrix(rewritten, n), circuit_matrix([(kind, (0,))], n))


def test_sdg_and_tdg_rewrites():
    assert decompose_to_gateset([("sdg", (0,))]) == [("z", (0,)), ("s", (0,))]
    assert decompose_to_gateset([("tdg", (0,))]) == [("z", (0,)), ("s", (0,)), ("t", (0,))]
    assert decompose_to_gateset([("cnot", (0, 1))]) == [("cnot", (0, 1))]


@pytest.mark.parametrize("qubits", [(0, 1, 2), (2, 0, 1), (1, 2, 0)])
def test_toffoli_decomposition_matches_8x8(matrix_oracle, qubits):
    circuit_matrix, same = matrix_oracle
    raw = decompose_to_gateset([("toffoli", qubits)], expand_adjoints=False)
    full = decompose_to_gateset([("toffoli", qubits)])
    assert len(raw) == 15 and len(full) == 21
    kinds = [k for k, _ in raw]
    assert kinds.count("h") == 2 and kinds.count("cnot") == 6
    assert kinds.count("t") + kinds.count("tdg") == 7
    target = circuit_matrix([("toffoli", qubits)], 3)
    assert same(circuit_matrix(raw, 3), target)
    assert same(circuit_matrix(full, 3), target)


def test_decompose_rejects_unknown():
    with pytest.raises(CircuitError):
        decompose_to_gateset([("swap", (0, 1))])


# ---------------------------------------------------------------- generators

def test_random_circuit_size_and_determinism():
    a = generate_random_circuit(468, 10000, "60/40", seed=7)
    b = generate_random_circuit(468, 10000, "60/40", seed=7)
    assert len(a) == 10000 and a.num_qubits == 468
    assert a == b and a.to_text() == b.to_text()
    assert generate_random_circuit(468, 100, "60/40", seed=8) != generate_random_circuit(468, 100, "60/40", seed=7)


def test_random_circuit_empty():
    assert len(generate_random_circuit(2, 0, "uniform", seed=1)) == 0


def test_random_circuit_uniform_frequencies():
    c = generate_random_circuit(4, 100_000, "uniform", seed=11)
    freq = np.array(list(c.kind_counts().values())) / len(c)
    assert np.all(np.abs(freq - 1 / 7) < 0.01)
    # chi-square with 6 dof; 99.9% quantile is 22.46
    expected = len(c) / 7
    chi2 = (((freq * len(c)) - expected) ** 2 / expected).sum()
    assert chi2 < 22.46


def test_sixty_forty_profile():
    prof = mix_profile("60/40")
    assert prof["cnot"] == pytest.approx(0.4)
    assert sum(prof.values()) == pytest.approx(1.0)
    c = generate_random_circuit(50, 20000, prof, seed=2)
    assert c.kind_counts()["cnot"] / len(c) == pytest.approx(0.4, abs=0.015)


def test_clustered_profile_splits_pools():
    mix = ClusteredMix(mix_profile("80/20"), mix_profile("20/80"))
    c = generate_random_circuit(100, 20000, mix, seed=5)
    first = [g for g in c.gates if g.qubits[0] < 50]
    second = [g for g in c.gates if g.qubits[0] >= 50]
    frac = lambda gs: sum(g.kind == "cnot" for g in gs) / len(gs)
    assert frac(first) == pytest.approx(0.2, abs=0.02)
    assert frac(second) == pytest.approx(0.8, abs=0.02)


@pytest.mark.parametrize("mix", [{"h": 0.5, "t": 0.4}, {"h": 1.5, "t": -0.5}, {"swap": 1.0}])
def test_invalid_probabilities(mix):
    with pytest.raises(ValueError):
        generate_random_circuit(4, 10, mix, seed=0)


def test_cnot_needs_two_qubits():
    with pytest.raises(ValueError):
        generate_random_circuit(1, 10, "60/40", seed=0)


@given(st.integers(2, 30), st.integers(0, 300), st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_generated_circuits_are_valid(nq, ng, seed):
    c = generate_random_circuit(nq, ng, "uniform", seed)
    for i, g in enumerate(c.gates):
        assert g.seq == i
        assert all(0 <= q < nq for q in g.qubits)
        if g.kind == "cnot":
            assert g.qubits[0] != g.qubits[1]


# ---------------------------------------------------------------- adder

def simulate_reversible(num_qubits, ops, bits):
    bits = list(bits)
    for kind, q in ops:
        if kind == "cnot":
            bits[q[1]] ^= bits[q[0]]
        elif kind == "toffoli":
            bits[q[2]] ^= bits[q[0]] & bits[q[1]]
        else:
            raise AssertionError(kind)
    return bits


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_cuccaro_adds_exhaustively(n):
    num_qubits, ops = cuccaro_ops(n)
    assert num_qubits == 2 * n + 2
    for a in range(2 ** n):
        for b in range(2 ** n):
            state = [0] * num_qubits
            for i in range(n):
                state[1 + 2 * i] = (b >> i) & 1
                state[2 + 2 * i] = (a >> i) & 1
            out = simulate_reversible(num_qubits, ops, state)
            got_b = sum(out[1 + 2 * i] << i for i in range(n))
            got_a = sum(out[2 + 2 * i] << i for i in range(n))
            assert (got_a, got_b, out[0]) == (a, (a + b) % 2 ** n, 0)
            assert out[-1] == (a + b) >> n


def test_cuccaro_two_bit_example():
    num_qubits, ops = cuccaro_ops(2)
    state = [0, 0, 1, 1, 0, 0]  # a = 1 (a0), b = 2 (b1)
    out = simulate_reversible(num_qubits, ops, state)
    assert out[1] + 2 * out[3] == 3


def test_cuccaro_qubit_count():
    assert generate_cuccaro_adder(1).num_qubits == 4


def test_cuccaro_gate_count_regression():
    # 4n + 1 CNOTs and 2n Toffolis, each Toffoli -> 21 gates: 46n + 1
    c = generate_cuccaro_adder(4)
    assert len(c) == 185
    assert set(c.kind_counts()) == set(GATE_SET)


def test_cuccaro_small_unitary(matrix_oracle):
    circuit_matrix, same = matrix_oracle
    num_qubits, ops = cuccaro_ops(1)
    assert same(circuit_matrix(generate_cuccaro_adder(1).ops(), num_qubits), circuit_matrix(ops, num_qubits))
