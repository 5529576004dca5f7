#!/usr/bin/env python3
"""Regenerate the full results bundle: conformance, checkpoints, tomography.

Writes results/report.json and results/tomography.csv and prints a summary
table. Equivalent to `qteleport report --out results`.
"""
import json
import math
import sys
from pathlib import Path

from qteleport.cli import main as cli_main
from qteleport.protocols import PROTOCOL_IDS


def run(out_dir: str = "results") -> int:
    code = cli_main(["report", "--out", out_dir])
    if code != 0:
        return code
    bundle = json.loads((Path(out_dir) / "report.json").read_text())

    print("\nconformance (gate_count/cost/depth, achieved vs published):")
    for pid in PROTOCOL_IDS:
        row = bundle["conformance"][pid]
        simp = row["simplified"]
        ref = row["paper_simplified"]
        mark = "==" if row["match"] else "!="
        print(f"  {pid:9s} simplified {simp['gate_count']}/{simp['cost']}/{simp['depth']} "
              f"{mark} {ref['gate_count']}/{ref['cost']}/{ref['depth']}   "
              f"reconstructed {row['original']['gate_count']}/{row['original']['cost']}/"
              f"{row['original']['depth']} vs {row['paper_original']['gate_count']}/"
              f"{row['paper_original']['cost']}/{row['paper_original']['depth']}")

    print("\ntomography fidelities (15360 shots):")
    for row in bundle["tomography"]["rows"]:
        frac = row["theta"] / math.pi
        print(f"  {row['protocol']:9s} theta=pi*{frac:.4g}  F={row['fidelity']:.5f}")

    print("\npublished-matrix cross-check:")
    for row in bundle["tomography"]["published_cross_check"]:
        frac = row["theta"] / math.pi
        if row["trace_flagged"]:
            print(f"  {row['protocol']:9s} theta=pi*{frac:.4g}  FLAGGED trace={row['trace']:.3f}")
        else:
            print(f"  {row['protocol']:9s} theta=pi*{frac:.4g}  F={row['fidelity']:.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(run(*sys.argv[1:]))
