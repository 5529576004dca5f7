"""Circuit IR: gate set, circuits, metrics, and the text serialization format.

Conventions used throughout the package:

- Qubits are 0-based register indices.
- A circuit is an immutable, ordered gate sequence over a fixed register.
- PREP marks message preparation: it prepares cos(theta/2)|0> + sin(theta/2)|1>
  on one qubit and must be the earliest gate touching that qubit.
- Metrics: gate_count counts the message-preparation block as a single gate
  (single-qubit gates immediately following PREP on the same qubit are folded
  into the block); cost weighs CNOT/CZ at 1 and SWAP at 3; depth is greedy
  ASAP layering in program order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


class GateKind(Enum):
    H = "h"
    X = "x"
    Z = "z"
    S = "s"
    SDG = "sdg"
    RY = "ry"
    CNOT = "cnot"
    CZ = "cz"
    SWAP = "swap"
    PREP = "prep"

    @property
    def n_qubits(self) -> int:
        return 2 if self in _TWO_QUBIT else 1

    @property
    def has_angle(self) -> bool:
        return self in (GateKind.RY, GateKind.PREP)


_TWO_QUBIT = frozenset({GateKind.CNOT, GateKind.CZ, GateKind.SWAP})
# CZ and SWAP are symmetric in their operands; CNOT is (control, target).
SYMMETRIC_2Q = frozenset({GateKind.CZ, GateKind.SWAP})


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))
        if not all(isinstance(q, int) for q in self.qubits):
            raise ValueError(f"qubit indices must be integers, got {self.qubits}")
        if len(self.qubits) != self.kind.n_qubits:
            raise ValueError(f"{self.kind.value} takes {self.kind.n_qubits} operand(s), got {len(self.qubits)}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"duplicate operand in {self.kind.value} {self.qubits}")
        if self.kind.has_angle:
            if self.angle is None:
                raise ValueError(f"{self.kind.value} requires an angle")
            angle = float(self.angle)
            if not math.isfinite(angle):
                raise ValueError(f"angle must be finite, got {angle}")
            object.__setattr__(self, "angle", angle)
        elif self.angle is not None:
            raise ValueError(f"{self.kind.value} takes no angle")


def _gate(spec) -> Gate:
    """Build a Gate from a terse tuple spec like ("h", 0) or ("cnot", 2, 0)."""
    if isinstance(spec, Gate):
        return spec
    name, *args = spec
    kind = GateKind(name)
    if kind.has_angle:
        *qs, angle = args
        return Gate(kind, tuple(qs), angle)
    return Gate(kind, tuple(args))


MAX_QUBITS = 16


@dataclass(frozen=True)
class Circuit:
    qubit_count: int
    gates: tuple[Gate, ...]

    def __post_init__(self):
        if not 1 <= self.qubit_count <= MAX_QUBITS:
            raise ValueError(f"qubit_count must be in 1..{MAX_QUBITS}, got {self.qubit_count}")
        object.__setattr__(self, "gates", tuple(self.gates))
        touched: set[int] = set()
        seen_prep = False
        for g in self.gates:
            for q in g.qubits:
                if not 0 <= q < self.qubit_count:
                    raise ValueError(f"qubit index {q} out of range for {self.qubit_count}-qubit circuit")
            if g.kind is GateKind.PREP:
                if seen_prep:
                    raise ValueError("duplicate prep gate")
                if g.qubits[0] in touched:
                    raise ValueError("prep must be the earliest gate on its qubit")
                seen_prep = True
            touched.update(g.qubits)

    @classmethod
    def from_ops(cls, qubit_count: int, ops) -> "Circuit":
        return cls(qubit_count, tuple(_gate(op) for op in ops))

    @property
    def prep_index(self) -> int | None:
        for i, g in enumerate(self.gates):
            if g.kind is GateKind.PREP:
                return i
        return None

    def __len__(self) -> int:
        return len(self.gates)


def compose(a: Circuit, b: Circuit) -> Circuit:
    """Concatenate two circuits over the same register."""
    if a.qubit_count != b.qubit_count:
        raise ValueError(f"qubit_count mismatch: {a.qubit_count} != {b.qubit_count}")
    return Circuit(a.qubit_count, a.gates + b.gates)


@dataclass(frozen=True)
class Metrics:
    gate_count: int
    cost: int
    depth: int

    def as_dict(self) -> dict[str, int]:
        return {"gate_count": self.gate_count, "cost": self.cost, "depth": self.depth}

    def triple(self) -> tuple[int, int, int]:
        return (self.gate_count, self.cost, self.depth)


_COST = {GateKind.CNOT: 1, GateKind.CZ: 1, GateKind.SWAP: 3}


def _prep_block_tail(c: Circuit) -> set[int]:
    """Indices of single-qubit gates folded into the message-preparation block.

    The preparation block is PREP plus the run of single-qubit gates that
    immediately follow it on the same qubit; the whole block counts as one
    gate occupying one layer.
    """
    folded: set[int] = set()
    p = c.prep_index
    if p is None:
        return folded
    q = c.gates[p].qubits[0]
    for i in range(p + 1, len(c.gates)):
        g = c.gates[i]
        if g.kind.n_qubits == 1 and g.qubits == (q,) and g.kind is not GateKind.PREP:
            folded.add(i)
        else:
            break
    return folded


def metrics(c: Circuit) -> Metrics:
    """Gate count, two-qubit cost, and ASAP depth of a circuit."""
    folded = _prep_block_tail(c)
    count = len(c.gates) - len(folded)
    cost = sum(_COST.get(g.kind, 0) for g in c.gates)
    last = [0] * c.qubit_count
    depth = 0
    for i, g in enumerate(c.gates):
        if i in folded:
            continue  # shares PREP's layer
        layer = 1 + max(last[q] for q in g.qubits)
        for q in g.qubits:
            last[q] = layer
        depth = max(depth, layer)
    return Metrics(count, cost, depth)


class CircuitSyntaxError(ValueError):
    """Raised on malformed circuit text; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


_MNEMONICS = {k.value for k in GateKind}


def parse_circuit(text: str) -> Circuit:
    """Parse the line-based circuit text format.

    Format: `qubits <n>` on the first non-empty line, then one gate per line:
    `h <q>`, `x <q>`, `z <q>`, `s <q>`, `sdg <q>`, `ry <angle> <q>`,
    `prep <q> <angle>`, `cnot <control> <target>`, `cz <q1> <q2>`,
    `swap <q1> <q2>`. `#` starts a comment.
    """
    lines = text.splitlines()
    header_seen = False
    qubit_count = 0
    gates: list[Gate] = []
    prep_seen = False
    touched: set[int] = set()
    for idx, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if not header_seen:
            if fields[0] != "qubits" or len(fields) != 2:
                raise CircuitSyntaxError(idx, "expected 'qubits <n>' header")
            try:
                qubit_count = int(fields[1])
            except ValueError:
                raise CircuitSyntaxError(idx, f"bad qubit count {fields[1]!r}") from None
            if not 1 <= qubit_count <= MAX_QUBITS:
                raise CircuitSyntaxError(idx, f"qubit count must be in 1..{MAX_QUBITS}")
            header_seen = True
            continue
        name = fields[0]
        if name not in _MNEMONICS:
            raise CircuitSyntaxError(idx, f"unknown mnemonic {name!r}")
        kind = GateKind(name)
        args = fields[1:]

        def _int(tok: str) -> int:
            try:
                return int(tok)
            except ValueError:
                raise CircuitSyntaxError(idx, f"bad qubit index {tok!r}") from None

        def _float(tok: str) -> float:
            try:
                return float(tok)
            except ValueError:
                raise CircuitSyntaxError(idx, f"bad angle {tok!r}") from None

        try:
            if kind is GateKind.RY:
                if len(args) != 2:
                    raise CircuitSyntaxError(idx, "ry takes '<angle> <q>'")
                gate = Gate(kind, (_int(args[1]),), _float(args[0]))
            elif kind is GateKind.PREP:
                if len(args) != 2:
                    raise CircuitSyntaxError(idx, "prep takes '<q> <angle>'")
                gate = Gate(kind, (_int(args[0]),), _float(args[1]))
            elif kind.n_qubits == 1:
                if len(args) != 1:
                    raise CircuitSyntaxError(idx, f"{name} takes one qubit")
                gate = Gate(kind, (_int(args[0]),))
            else:
                if len(args) != 2:
                    raise CircuitSyntaxError(idx, f"{name} takes two qubits")
                gate = Gate(kind, (_int(args[0]), _int(args[1])))
        except ValueError as e:
            if isinstance(e, CircuitSyntaxError):
                raise
            raise CircuitSyntaxError(idx, str(e)) from None
        for q in gate.qubits:
            if not 0 <= q < qubit_count:
                raise CircuitSyntaxError(idx, f"qubit index {q} out of range")
        if gate.kind is GateKind.PREP:
            if prep_seen:
                raise CircuitSyntaxError(idx, "duplicate prep gate")
            if gate.qubits[0] in touched:
                raise CircuitSyntaxError(idx, "prep must be the earliest gate on its qubit")
            prep_seen = True
        touched.update(gate.qubits)
        gates.append(gate)
    if not header_seen:
        raise CircuitSyntaxError(1, "missing 'qubits <n>' header")
    try:
        return Circuit(qubit_count, tuple(gates))
    except ValueError as e:
        raise CircuitSyntaxError(len(lines), str(e)) from None


def _fmt_angle(angle: float) -> str:
    return f"{angle:.17g}"


def serialize_circuit(c: Circuit) -> str:
    """Canonical lowercase text form; inverse of parse_circuit."""
    out = [f"qubits {c.qubit_count}"]
    for g in c.gates:
        if g.kind is GateKind.RY:
            out.append(f"ry {_fmt_angle(g.angle)} {g.qubits[0]}")
        elif g.kind is GateKind.PREP:
            out.append(f"prep {g.qubits[0]} {_fmt_angle(g.angle)}")
        else:
            out.append(f"{g.kind.value} {' '.join(str(q) for q in g.qubits)}")
    return "\n".join(out) + "\n"


def relabel(c: Circuit, perm: dict[int, int] | list[int]) -> Circuit:
    """Apply a qubit permutation to every gate (used by metric invariance tests)."""
    if isinstance(perm, list):
        perm = {i: p for i, p in enumerate(perm)}
    if sorted(perm) != list(range(c.qubit_count)) or sorted(perm.values()) != list(range(c.qubit_count)):
        raise ValueError("perm must be a permutation of the register")
    gates = tuple(Gate(g.kind, tuple(perm[q] for q in g.qubits), g.angle) for g in c.gates)
    return Circuit(c.qubit_count, gates)


PI = math.pi
