"""Pattern-rewrite engine over qubit role variables.

Rules are short gate-sequence equalities written in program order over role
variables a, b, c. Matching is adjacency-up-to-commutation: gates interleaved
between pattern elements are allowed when they act on qubits disjoint from
every role qubit of the match. The optimizer greedily applies the first site
(catalog order, then ascending position) whose rewrite strictly reduces the
(cost, gate_count, depth) triple lexicographically.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .circuits import SYMMETRIC_2Q, Circuit, Gate, GateKind, metrics
from .sim import circuit_unitary

RULE_TOL = 1e-12

# pattern element: (kind, role names), e.g. (GateKind.CNOT, ("a", "b"))
Pattern = tuple[tuple[GateKind, tuple[str, ...]], ...]


@dataclass(frozen=True)
class RewriteRule:
    id: str
    role_count: int
    lhs: Pattern
    rhs: Pattern
    bidirectional: bool = True
    note: str = ""

    def roles(self) -> tuple[str, ...]:
        names: list[str] = []
        for _, rs in self.lhs + self.rhs:
            for r in rs:
                if r not in names:
                    names.append(r)
        return tuple(names)


@dataclass(frozen=True)
class MatchSite:
    rule_id: str
    roles: dict[str, int]
    positions: tuple[int, ...]
    direction: str = "forward"
    # matched gates (staleness check) and their replacement, fixed at match time
    expected: tuple[Gate, ...] = field(default=(), repr=False)
    replacement: tuple[Gate, ...] = field(default=(), repr=False)


def _p(kind: str, *roles: str):
    return (GateKind(kind), roles)


def builtin_rules() -> tuple[RewriteRule, ...]:
    """The fixed rule catalog, in the optimizer's scan order."""
    return _CATALOG


_CATALOG = (
    RewriteRule(
        "R-T", 3,
        lhs=(_p("cnot", "b", "c"), _p("cnot", "a", "b"), _p("cnot", "b", "c")),
        rhs=(_p("cnot", "a", "c"), _p("cnot", "a", "b")),
        note="spreading a control through a shared intermediate target",
    ),
    RewriteRule(
        "R-C", 3,
        lhs=(_p("cnot", "a", "b"), _p("cnot", "b", "c"), _p("cnot", "a", "b")),
        rhs=(_p("cnot", "a", "c"), _p("cnot", "b", "c")),
        note="spreading a target through a shared intermediate control",
    ),
    RewriteRule(
        "R-CZ", 2,
        lhs=(_p("h", "b"), _p("cnot", "a", "b"), _p("h", "b")),
        rhs=(_p("cz", "a", "b"),),
        note="H-conjugated target turns CNOT into CZ",
    ),
    RewriteRule(
        "R-REV", 2,
        lhs=(_p("h", "a"), _p("h", "b"), _p("cnot", "a", "b"), _p("h", "a"), _p("h", "b")),
        rhs=(_p("cnot", "b", "a"),),
        note="H on both wires reverses CNOT direction",
    ),
    RewriteRule(
        "R-HSYM", 2,
        lhs=(_p("h", "a"), _p("cnot", "a", "b"), _p("h", "a")),
        rhs=(_p("h", "b"), _p("cnot", "b", "a"), _p("h", "b")),
        note="H-conjugated control CNOT is symmetric under swapping the wires",
    ),
    RewriteRule(
        "R-SWAP", 2,
        lhs=(_p("cnot", "a", "b"), _p("cnot", "b", "a"), _p("cnot", "a", "b")),
        rhs=(_p("swap", "a", "b"),),
        note="three alternating CNOTs form a SWAP (both orientations via role binding)",
    ),
    RewriteRule(
        "R-X", 2,
        lhs=(_p("x", "a"), _p("x", "b"), _p("cnot", "a", "b")),
        rhs=(_p("cnot", "a", "b"), _p("x", "a")),
        note="X on both wires before a CNOT equals X on the control after it",
    ),
    RewriteRule(
        "COMM-DISJ", 3,
        lhs=(_p("h", "a"), _p("cnot", "b", "c")),
        rhs=(_p("cnot", "b", "c"), _p("h", "a")),
        note="gates on disjoint qubits commute; matched structurally for any gate kinds",
    ),
    RewriteRule(
        "COMM-CTRL", 3,
        lhs=(_p("cnot", "a", "b"), _p("cnot", "a", "c")),
        rhs=(_p("cnot", "a", "c"), _p("cnot", "a", "b")),
        note="CNOTs sharing only their control commute",
    ),
    RewriteRule(
        "COMM-TGT", 3,
        lhs=(_p("cnot", "a", "c"), _p("cnot", "b", "c")),
        rhs=(_p("cnot", "b", "c"), _p("cnot", "a", "c")),
        note="CNOTs sharing only their target commute",
    ),
)

CATALOG_IDS = tuple(r.id for r in _CATALOG)

# Concrete role assignments (0-based qubits) used by the protocol derivations;
# each is checked as an exact unitary identity in the test suite.
KNOWN_INSTANCES: tuple[tuple[str, dict[str, int], str], ...] = (
    ("R-C", {"a": 2, "b": 1, "c": 0}, "ghz"),
    ("R-T", {"a": 0, "b": 2, "c": 1}, "ghz"),
    ("R-HSYM", {"a": 1, "b": 0}, "ghz"),
    ("R-CZ", {"a": 0, "b": 1}, "cluster2"),
    ("R-T", {"a": 0, "b": 1, "c": 2}, "cluster2"),
    ("R-REV", {"a": 0, "b": 1}, "cluster2"),
    ("R-SWAP", {"a": 0, "b": 1}, "cluster3"),
    ("R-X", {"a": 0, "b": 1}, "brown"),
    ("R-T", {"a": 0, "b": 1, "c": 3}, "brown"),
    ("R-T", {"a": 0, "b": 2, "c": 3}, "brown"),
    ("R-T", {"a": 0, "b": 1, "c": 6}, "borras"),
    ("R-C", {"a": 0, "b": 1, "c": 2}, "entswap"),
    ("R-C", {"a": 1, "b": 4, "c": 0}, "entswap"),
)


def rule_by_id(rule_id: str) -> RewriteRule:
    for r in _CATALOG:
        if r.id == rule_id:
            return r
    raise KeyError(f"unknown rule {rule_id!r}")


def instantiate(pattern: Pattern, roles: dict[str, int]) -> tuple[Gate, ...]:
    return tuple(Gate(kind, tuple(roles[r] for r in rs)) for kind, rs in pattern)


def _pattern_variants(pattern: Pattern) -> tuple[Pattern, ...]:
    """All reorderings of a pattern reachable by swapping disjoint neighbours.

    Gates acting on overlapping role sets keep their relative order; (for the
    tiny patterns here this is a brute-force filter over permutations).
    """
    n = len(pattern)
    if n > 6:
        raise ValueError("pattern too long")
    variants: list[Pattern] = []
    seen: set[Pattern] = set()
    for perm in itertools.permutations(range(n)):
        ok = True
        for i in range(n):
            for j in range(i + 1, n):
                pi, pj = perm[i], perm[j]
                if pi > pj and set(pattern[pi][1]) & set(pattern[pj][1]):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            var = tuple(pattern[k] for k in perm)
            if var not in seen:
                seen.add(var)
                variants.append(var)
    return tuple(variants)


_VARIANT_CACHE: dict[Pattern, tuple[Pattern, ...]] = {}


def _variants(pattern: Pattern) -> tuple[Pattern, ...]:
    if pattern not in _VARIANT_CACHE:
        _VARIANT_CACHE[pattern] = _pattern_variants(pattern)
    return _VARIANT_CACHE[pattern]


def _bind(elem, gate: Gate, roles: dict[str, int]):
    """Yield extended role maps binding one pattern element to a gate."""
    kind, role_names = elem
    if gate.kind is not kind or len(gate.qubits) != len(role_names):
        return
    orientations = [gate.qubits]
    if kind in SYMMETRIC_2Q:
        orientations.append(gate.qubits[::-1])
    for qubits in orientations:
        new = dict(roles)
        ok = True
        for r, q in zip(role_names, qubits):
            if r in new:
                if new[r] != q:
                    ok = False
                    break
            elif q in new.values():
                ok = False  # role assignment must stay injective
                break
            else:
                new[r] = q
        if ok:
            yield new


def _enumerate_sites(gates: tuple[Gate, ...], pattern: Pattern):
    """Yield (positions, roles) for matches of one pattern ordering."""
    n = len(gates)

    def rec(elem_idx: int, start: int, roles: dict[str, int], positions: list[int]):
        if elem_idx == len(pattern):
            role_qubits = set(roles.values())
            lo, hi = positions[0], positions[-1]
            taken = set(positions)
            for p in range(lo, hi + 1):
                if p not in taken and set(gates[p].qubits) & role_qubits:
                    return
            yield tuple(positions), dict(roles)
            return
        for p in range(start, n):
            for new_roles in _bind(pattern[elem_idx], gates[p], roles):
                yield from rec(elem_idx + 1, p + 1, new_roles, positions + [p])

    yield from rec(0, 0, {}, [])


def _comm_disj_sites(c: Circuit, direction: str) -> list[MatchSite]:
    """Adjacent disjoint gate pairs, swappable regardless of gate kind."""
    sites = []
    for p in range(len(c.gates) - 1):
        g1, g2 = c.gates[p], c.gates[p + 1]
        if set(g1.qubits) & set(g2.qubits):
            continue
        names = "abcd"
        roles = {}
        for q in (*g1.qubits, *g2.qubits):
            if q not in roles.values():
                roles[names[len(roles)]] = q
        sites.append(MatchSite("COMM-DISJ", roles, (p, p + 1), direction,
                               expected=(g1, g2), replacement=(g2, g1)))
    return sites


def find_matches(c: Circuit, r: RewriteRule, direction: str = "forward") -> list[MatchSite]:
    """All sites where r's source side matches c, ascending by first position."""
    if direction not in ("forward", "reverse"):
        raise ValueError("direction must be 'forward' or 'reverse'")
    if r.id == "COMM-DISJ":
        return _comm_disj_sites(c, direction)
    src, dst = (r.lhs, r.rhs) if direction == "forward" else (r.rhs, r.lhs)
    found: dict[tuple, MatchSite] = {}
    for variant in _variants(src):
        for positions, roles in _enumerate_sites(c.gates, variant):
            key = (positions, tuple(sorted(roles.items())))
            if key in found:
                continue
            found[key] = MatchSite(
                r.id, roles, positions, direction,
                expected=tuple(c.gates[p] for p in positions),
                replacement=instantiate(dst, roles),
            )
    return [found[k] for k in sorted(found, key=lambda k: (k[0], k[1]))]


class StaleSiteError(ValueError):
    """The circuit changed since the site was produced."""


def apply_at(c: Circuit, site: MatchSite) -> Circuit:
    """Rewrite one matched site; interleaved disjoint gates keep their order."""
    for p, exp in zip(site.positions, site.expected):
        if p >= len(c.gates) or c.gates[p] != exp:
            raise StaleSiteError(f"gate at position {p} no longer matches site for {site.rule_id}")
    role_qubits = set(site.roles.values())
    lo, hi = site.positions[0], site.positions[-1]
    taken = set(site.positions)
    interleaved = []
    for p in range(lo, hi + 1):
        if p not in taken:
            if set(c.gates[p].qubits) & role_qubits:
                raise StaleSiteError(f"interleaved gate at {p} overlaps the match for {site.rule_id}")
            interleaved.append(c.gates[p])
    new_gates = c.gates[:lo] + site.replacement + tuple(interleaved) + c.gates[hi + 1:]
    return Circuit(c.qubit_count, new_gates)


@dataclass(frozen=True)
class ValidationResult:
    rule_id: str
    passed: bool
    max_deviation: float


def _identity_deviation(lhs_gates, rhs_gates, qubit_count: int) -> float:
    ul = circuit_unitary(Circuit(qubit_count, tuple(lhs_gates)))
    ur = circuit_unitary(Circuit(qubit_count, tuple(rhs_gates)))
    return float(np.max(np.abs(ul - ur)))


_DISJ_REPRESENTATIVES = (
    ("h",), ("x",), ("z",), ("s",), ("sdg",), ("ry", 0.9), ("cnot",), ("cz",), ("swap",),
)


def _comm_disj_deviation() -> float:
    """Check disjoint-gate commutation over every pair of gate kinds."""
    worst = 0.0
    for spec1 in _DISJ_REPRESENTATIVES:
        for spec2 in _DISJ_REPRESENTATIVES:
            k1 = GateKind(spec1[0]).n_qubits
            k2 = GateKind(spec2[0]).n_qubits
            n = k1 + k2
            g1 = _rep_gate(spec1, tuple(range(k1)))
            g2 = _rep_gate(spec2, tuple(range(k1, k1 + k2)))
            worst = max(worst, _identity_deviation([g1, g2], [g2, g1], n))
    return worst


def _rep_gate(spec, qubits) -> Gate:
    kind = GateKind(spec[0])
    angle = spec[1] if len(spec) > 1 else None
    return Gate(kind, qubits, angle)


def validate_rule(r: RewriteRule) -> ValidationResult:
    """Numerically prove lhs and rhs act identically (no global-phase slack)."""
    if r.id == "COMM-DISJ":
        dev = _comm_disj_deviation()
        return ValidationResult(r.id, dev < RULE_TOL, dev)
    names = sorted(r.roles())
    roles = {name: i for i, name in enumerate(names)}
    dev = _identity_deviation(instantiate(r.lhs, roles), instantiate(r.rhs, roles), len(names))
    return ValidationResult(r.id, dev < RULE_TOL, dev)


@dataclass(frozen=True)
class TraceStep:
    rule: str
    roles: dict[str, int]
    position: int

    def as_dict(self) -> dict:
        return {"rule": self.rule, "roles": dict(self.roles), "position": self.position}


def optimize(c: Circuit, catalog: tuple[RewriteRule, ...] | None = None,
             max_passes: int = 10_000) -> tuple[Circuit, list[TraceStep]]:
    """Greedy cost reduction; returns the fixpoint circuit and the rewrite trace.

    One pass applies the first site (catalog order, ascending position) whose
    rewrite strictly reduces (cost, gate_count, depth) lexicographically;
    max_passes bounds the number of applied rewrites.
    """
    if max_passes < 1:
        raise ValueError("max_passes must be >= 1")
    if catalog is None:
        catalog = builtin_rules()
    trace: list[TraceStep] = []
    current = c
    current_key = _lex_key(current)
    for _ in range(max_passes):
        improved = False
        for rule in catalog:
            for site in find_matches(current, rule):
                candidate = apply_at(current, site)
                key = _lex_key(candidate)
                if key < current_key:
                    trace.append(TraceStep(rule.id, dict(site.roles), site.positions[0]))
                    current, current_key = candidate, key
                    improved = True
                    break
            if improved:
                break
        if not improved:
            break
    return current, trace


def _lex_key(c: Circuit) -> tuple[int, int, int]:
    m = metrics(c)
    return (m.cost, m.gate_count, m.depth)


def apply_chain_step(c: Circuit, rule_id: str, roles: dict[str, int],
                     position: int, direction: str = "forward") -> Circuit:
    """Apply one recorded rewrite step; used by the protocol expansion chains."""
    rule = rule_by_id(rule_id)
    for site in find_matches(c, rule, direction=direction):
        if site.positions[0] == position and site.roles == roles:
            return apply_at(c, site)
    raise ValueError(
        f"no {direction} match of {rule_id} at position {position} with roles {roles}"
    )
