import math

import pytest

from qteleport.circuits import (
    Circuit,
    CircuitSyntaxError,
    Gate,
    GateKind,
    compose,
    metrics,
    parse_circuit,
    relabel,
    serialize_circuit,
)


def test_gate_arity_enforced():
    with pytest.raises(ValueError):
        Gate(GateKind.H, (0, 1))
    with pytest.raises(ValueError):
        Gate(GateKind.CNOT, (2,))


def test_gate_duplicate_operand_rejected():
    with pytest.raises(ValueError, match="duplicate operand"):
        Gate(GateKind.CNOT, (1, 1))


def test_gate_angle_presence():
    with pytest.raises(ValueError):
        Gate(GateKind.RY, (0,))
    with pytest.raises(ValueError):
        Gate(GateKind.H, (0,), angle=1.0)
    assert Gate(GateKind.RY, (0,), math.pi).angle == math.pi


def test_circuit_rejects_out_of_range_index():
    with pytest.raises(ValueError, match="out of range"):
        Circuit.from_ops(2, [("cnot", 0, 2)])


def test_circuit_rejects_second_prep():
    with pytest.raises(ValueError, match="duplicate prep"):
        Circuit.from_ops(2, [("prep", 0, 1.0), ("prep", 1, 1.0)])


def test_prep_must_come_first_on_its_qubit():
    with pytest.raises(ValueError, match="earliest"):
        Circuit.from_ops(2, [("h", 0), ("prep", 0, 1.0)])
    # fine on an untouched qubit
    Circuit.from_ops(2, [("h", 1), ("prep", 0, 1.0)])


def test_qubit_count_limit():
    with pytest.raises(ValueError):
        Circuit(17, ())
    Circuit(16, ())


def test_metrics_empty_circuit():
    assert metrics(Circuit(3, ())).triple() == (0, 0, 0)


def test_metrics_disjoint_gates_share_layer():
    c = Circuit.from_ops(2, [("h", 0), ("h", 1)])
    assert metrics(c).triple() == (2, 0, 1)


def test_metrics_swap_costs_three():
    c = Circuit.from_ops(2, [("swap", 0, 1)])
    assert metrics(c).triple() == (1, 3, 1)


def test_metrics_cost_counts_two_qubit_gates():
    c = Circuit.from_ops(3, [("h", 0), ("cnot", 0, 1), ("cz", 1, 2), ("x", 2)])
    m = metrics(c)
    assert m.cost == 2
    assert m.gate_count == 4


def test_metrics_serial_chain_depth():
    c = Circuit.from_ops(3, [("cnot", 0, 1), ("cnot", 1, 2), ("cnot", 0, 1)])
    assert metrics(c).depth == 3


def test_prep_block_absorbs_trailing_single_qubit_gate():
    # prep followed by a rotation on the same wire is one preparation block
    c = Circuit.from_ops(2, [("prep", 0, 1.0), ("h", 0), ("cnot", 0, 1)])
    assert metrics(c).triple() == (2, 1, 2)
    # a gate on another wire is not absorbed
    c2 = Circuit.from_ops(2, [("prep", 0, 1.0), ("h", 1), ("cnot", 0, 1)])
    assert metrics(c2).gate_count == 3


def test_metrics_permutation_invariant_example():
    c = Circuit.from_ops(4, [("h", 0), ("cnot", 0, 1), ("cz", 2, 3), ("swap", 1, 2)])
    perm = [2, 0, 3, 1]
    assert metrics(relabel(c, perm)) == metrics(c)


def test_compose_identity_and_associativity():
    a = Circuit.from_ops(2, [("h", 0)])
    b = Circuit.from_ops(2, [("cnot", 0, 1)])
    c = Circuit.from_ops(2, [("x", 1)])
    empty = Circuit(2, ())
    assert compose(empty, a) == a
    assert compose(a, empty) == a
    assert compose(compose(a, b), c) == compose(a, compose(b, c))


def test_compose_qubit_count_mismatch():
    with pytest.raises(ValueError, match="mismatch"):
        compose(Circuit(2, ()), Circuit(3, ()))


def test_compose_depth_subadditive():
    a = Circuit.from_ops(3, [("cnot", 0, 1), ("h", 2)])
    b = Circuit.from_ops(3, [("cnot", 1, 2), ("h", 0)])
    assert metrics(compose(a, b)).depth <= metrics(a).depth + metrics(b).depth


def test_parse_simple():
    c = parse_circuit("qubits 2\nh 0\ncnot 0 1\n")
    assert c == Circuit.from_ops(2, [("h", 0), ("cnot", 0, 1)])


def test_parse_prep_with_angle():
    c = parse_circuit("qubits 1\nprep 0 1.0471975511965976\n")
    g = c.gates[0]
    assert g.kind is GateKind.PREP
    assert g.qubits == (0,)
    assert g.angle == pytest.approx(math.pi / 3, abs=1e-15)


def test_parse_comments_and_blank_lines():
    c = parse_circuit("# header\nqubits 2\n\nh 0  # kick\n")
    assert len(c.gates) == 1


def test_parse_duplicate_operand_error():
    with pytest.raises(CircuitSyntaxError, match="duplicate operand"):
        parse_circuit("qubits 2\ncnot 0 0\n")


def test_parse_unknown_mnemonic():
    with pytest.raises(CircuitSyntaxError, match="unknown mnemonic"):
        parse_circuit("qubits 2\ntoffoli 0 1\n")


def test_parse_reports_line_number():
    with pytest.raises(CircuitSyntaxError) as err:
        parse_circuit("qubits 2\nh 0\nh 5\n")
    assert err.value.line_no == 3


def test_parse_duplicate_prep_error():
    with pytest.raises(CircuitSyntaxError, match="duplicate prep"):
        parse_circuit("qubits 2\nprep 0 0.5\nprep 1 0.5\n")


def test_parse_missing_header():
    with pytest.raises(CircuitSyntaxError):
        parse_circuit("h 0\n")


def test_serialize_field_order():
    c = Circuit.from_ops(3, [("cnot", 2, 0)])
    assert serialize_circuit(c) == "qubits 3\ncnot 2 0\n"
    c = Circuit.from_ops(1, [("ry", 0, math.pi)])
    assert serialize_circuit(c) == "qubits 1\nry 3.1415926535897931 0\n"


def test_roundtrip_canonicalizes():
    messy = "qubits 2  # two wires\n\nH 0\n".lower()
    c = parse_circuit(messy)
    canon = serialize_circuit(c)
    assert parse_circuit(canon) == c
    assert serialize_circuit(parse_circuit(canon)) == canon
