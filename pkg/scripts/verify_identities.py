#!/usr/bin/env python3
"""Numerically verify every rewrite rule and the recorded role instances."""
import sys

import numpy as np

from qteleport.circuits import Circuit
from qteleport.rewrite import KNOWN_INSTANCES, builtin_rules, instantiate, rule_by_id, validate_rule
from qteleport.sim import circuit_unitary


def run() -> int:
    ok = True
    print("catalog rules:")
    for rule in builtin_rules():
        res = validate_rule(rule)
        ok &= res.passed
        print(f"  {rule.id:10s} {'pass' if res.passed else 'FAIL'}  max dev {res.max_deviation:.3e}  {rule.note}")

    print("\nrecorded role instances:")
    for rule_id, roles, used_by in KNOWN_INSTANCES:
        rule = rule_by_id(rule_id)
        n = max(roles.values()) + 1
        lhs = circuit_unitary(Circuit(n, instantiate(rule.lhs, roles)))
        rhs = circuit_unitary(Circuit(n, instantiate(rule.rhs, roles)))
        dev = float(np.max(np.abs(lhs - rhs)))
        ok &= dev < 1e-12
        print(f"  {rule_id:7s} {str(roles):30s} dev {dev:.3e}  [{used_by}]")
    print(f"\noverall: {'pass' if ok else 'FAIL'}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(run())
