"""Command-line front end.

Subcommands: metrics, optimize, verify-rules, teleport, tomography, report.
Structured output goes to stdout, diagnostics to stderr. Exit codes: 0 on
success, 1 on a domain error, 2 on a usage error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .circuits import Circuit, metrics, parse_circuit, serialize_circuit
from .protocols import (
    PROTOCOL_IDS,
    build_simplified,
    channel_report,
    checkpoint_states,
    conformance_report,
    expand_to_original,
    get_protocol,
    verify_teleportation,
)
from .rewrite import builtin_rules, optimize, validate_rule
from .sim import MessageParams
from .tomography import (
    DEFAULT_SHOTS,
    THETA_A,
    THETA_B,
    PUBLISHED_PROTOCOLS,
    experiment_report,
    report_rows_csv,
    tomograph,
)


def _theta_frac(text: str) -> float:
    try:
        p, q = text.split("/")
        return math.pi * int(p) / int(q)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a fraction like 1/3, got {text!r}")


def _add_theta_options(sub, required: bool):
    group = sub.add_mutually_exclusive_group(required=required)
    group.add_argument("--theta", type=float, help="message polar angle in radians")
    group.add_argument("--theta-frac", type=_theta_frac, metavar="P/Q",
                       help="message polar angle as pi*P/Q")
    sub.add_argument("--phi", type=float, default=0.0, help="message phase in radians")


def _message(args) -> MessageParams:
    theta = args.theta if args.theta is not None else args.theta_frac
    return MessageParams(theta, args.phi)


def _load_circuit(args) -> Circuit:
    if getattr(args, "circuit", None):
        return parse_circuit(Path(args.circuit).read_text(encoding="utf-8"))
    p = get_protocol(args.protocol)
    if args.variant == "original":
        return expand_to_original(p)
    return build_simplified(p)


def _emit(args, payload: dict, text_lines, csv_text: str | None = None):
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    elif args.format == "csv":
        if csv_text is None:
            keys = list(payload)
            print(",".join(keys))
            print(",".join(str(payload[k]) for k in keys))
        else:
            print(csv_text, end="")
    else:
        for line in text_lines:
            print(line)


def cmd_metrics(args) -> int:
    c = _load_circuit(args)
    m = metrics(c)
    _emit(args, m.as_dict(), [f"{k} {v}" for k, v in m.as_dict().items()])
    return 0


def cmd_optimize(args) -> int:
    c = parse_circuit(Path(args.circuit).read_text(encoding="utf-8"))
    before = metrics(c)
    result, trace = optimize(c, max_passes=args.max_passes)
    after = metrics(result)
    if args.trace:
        Path(args.trace).write_text(
            json.dumps([step.as_dict() for step in trace], indent=2) + "\n", encoding="utf-8")
    sys.stdout.write(serialize_circuit(result))
    print(
        f"optimize: {before.triple()} -> {after.triple()} in {len(trace)} rewrite(s)",
        file=sys.stderr,
    )
    return 0


def cmd_verify_rules(args) -> int:
    rows = [validate_rule(r) for r in builtin_rules()]
    payload = [
        {"rule": r.rule_id, "pass": r.passed, "max_deviation": r.max_deviation} for r in rows
    ]
    lines = [f"{r.rule_id:10s} {'pass' if r.passed else 'FAIL'}  max deviation {r.max_deviation:.3e}"
             for r in rows]
    overall = all(r.passed for r in rows)
    lines.append(f"overall {'pass' if overall else 'FAIL'}")
    if args.format == "json":
        print(json.dumps({"rules": payload, "pass": overall}, indent=2))
    elif args.format == "csv":
        print("rule,pass,max_deviation")
        for r in rows:
            print(f"{r.rule_id},{r.passed},{r.max_deviation}")
    else:
        for line in lines:
            print(line)
    return 0 if overall else 1


def cmd_teleport(args) -> int:
    p = get_protocol(args.protocol)
    c = expand_to_original(p) if args.variant == "original" else build_simplified(p)
    m = _message(args)
    fid, deterministic = verify_teleportation(c, p.target_qubit, m)
    payload = {"protocol": p.id, "theta": m.theta, "phi": m.phi,
               "fidelity": fid, "deterministic": deterministic}
    _emit(args, payload,
          [f"fidelity {fid:.9f}, deterministic {'true' if deterministic else 'false'}"])
    return 0


def cmd_tomography(args) -> int:
    p = get_protocol(args.protocol)
    c = build_simplified(p)
    m = _message(args)
    res = tomograph(c, p.target_qubit, m, args.shots, args.seed, protocol_id=p.id)
    payload = {
        "protocol": p.id, "theta": m.theta, "phi": m.phi,
        "shots": res.shots, "seed": res.seed,
        "exp_x": res.exp_x, "exp_y": res.exp_y, "exp_z": res.exp_z,
        "rho": res.rho.to_json(), "fidelity": res.fidelity,
        "counts": res.counts,
    }
    lines = [
        f"protocol {p.id}  theta {m.theta:.10g}  shots {res.shots}  seed {res.seed}",
        f"<X> {res.exp_x:+.6f}  <Y> {res.exp_y:+.6f}  <Z> {res.exp_z:+.6f}",
        f"fidelity {res.fidelity:.6f}",
    ]
    _emit(args, payload, lines)
    return 0


def cmd_report(args) -> int:
    thetas = [THETA_A, THETA_B]
    tomo = experiment_report(list(PUBLISHED_PROTOCOLS), thetas, args.shots, args.seed)
    checkpoints = {}
    for pid in PROTOCOL_IDS:
        p = get_protocol(pid)
        checkpoints[pid] = {
            f"theta={t:.10g}": dict(checkpoint_states(p, MessageParams(t))) for t in thetas
        }
    bundle = {
        "conformance": conformance_report(),
        "channels": channel_report(),
        "checkpoints": checkpoints,
        "tomography": tomo,
    }
    csv_text = report_rows_csv(tomo["rows"])
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(json.dumps(bundle, indent=2) + "\n", encoding="utf-8")
        (out / "tomography.csv").write_text(csv_text, encoding="utf-8")
        print(f"report written to {out}/report.json and {out}/tomography.csv", file=sys.stderr)
    else:
        print(json.dumps(bundle, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qteleport",
                                     description="simplified teleportation circuit toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    fmt = {"choices": ("json", "csv", "text"), "default": "text"}

    s = sub.add_parser("metrics", help="gate-count / cost / depth of a circuit")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--protocol", choices=PROTOCOL_IDS)
    src.add_argument("--circuit", metavar="FILE")
    s.add_argument("--variant", choices=("simplified", "original"), default="simplified")
    s.add_argument("--format", **fmt)
    s.set_defaults(func=cmd_metrics)

    s = sub.add_parser("optimize", help="greedy rewrite optimization of a circuit file")
    s.add_argument("--circuit", required=True, metavar="FILE")
    s.add_argument("--max-passes", type=int, default=10_000)
    s.add_argument("--trace", metavar="FILE", help="write the rewrite trace as JSON")
    s.set_defaults(func=cmd_optimize)

    s = sub.add_parser("verify-rules", help="numerically validate every catalog rule")
    s.add_argument("--format", **fmt)
    s.set_defaults(func=cmd_verify_rules)

    s = sub.add_parser("teleport", help="check deterministic teleportation of a message")
    s.add_argument("--protocol", required=True, choices=PROTOCOL_IDS)
    s.add_argument("--variant", choices=("simplified", "original"), default="simplified")
    _add_theta_options(s, required=True)
    s.add_argument("--format", **fmt)
    s.set_defaults(func=cmd_teleport)

    s = sub.add_parser("tomography", help="shot-based tomography of the teleported qubit")
    s.add_argument("--protocol", required=True, choices=PROTOCOL_IDS)
    _add_theta_options(s, required=True)
    s.add_argument("--shots", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--format", **fmt)
    s.set_defaults(func=cmd_tomography)

    s = sub.add_parser("report", help="full conformance, checkpoint, and tomography bundle")
    s.add_argument("--shots", type=int, default=DEFAULT_SHOTS)
    s.add_argument("--seed", type=int, default=7)
    s.add_argument("--out", metavar="DIR")
    s.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
