import json
import math

import pytest

from qteleport.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_metrics_protocol_json(capsys):
    code, out, _ = run_cli(capsys, "metrics", "--protocol", "ghz", "--variant", "simplified",
                           "--format", "json")
    assert code == 0
    assert json.loads(out) == {"gate_count": 9, "cost": 4, "depth": 6}


def test_metrics_text_format(capsys):
    code, out, _ = run_cli(capsys, "metrics", "--protocol", "cluster2")
    assert code == 0
    assert "gate_count 6" in out
    assert "cost 3" in out
    assert "depth 5" in out


def test_metrics_from_file(tmp_path, capsys):
    f = tmp_path / "c.txt"
    f.write_text("qubits 2\nh 0\ncnot 0 1\n")
    code, out, _ = run_cli(capsys, "metrics", "--circuit", str(f), "--format", "json")
    assert code == 0
    assert json.loads(out)["cost"] == 1


def test_metrics_missing_file_is_domain_error(capsys):
    code, _, err = run_cli(capsys, "metrics", "--circuit", "/nonexistent/file.txt")
    assert code == 1
    assert "error" in err


def test_metrics_bad_circuit_reports_line(tmp_path, capsys):
    f = tmp_path / "bad.txt"
    f.write_text("qubits 2\ncnot 0 0\n")
    code, _, err = run_cli(capsys, "metrics", "--circuit", str(f))
    assert code == 1
    assert "line 2" in err


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["metrics", "--protocol", "nope"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 2


def test_optimize_writes_circuit_and_trace(tmp_path, capsys):
    src = tmp_path / "in.txt"
    src.write_text("qubits 3\ncnot 1 2\ncnot 0 1\ncnot 1 2\n")
    trace_file = tmp_path / "trace.json"
    code, out, err = run_cli(capsys, "optimize", "--circuit", str(src),
                             "--trace", str(trace_file))
    assert code == 0
    assert out == "qubits 3\ncnot 0 2\ncnot 0 1\n"
    trace = json.loads(trace_file.read_text())
    assert trace[0]["rule"] == "R-T"
    assert "optimize:" in err


def test_optimize_respects_max_passes(tmp_path, capsys):
    src = tmp_path / "in.txt"
    src.write_text("qubits 2\nh 1\ncnot 0 1\nh 1\n")
    code, out, _ = run_cli(capsys, "optimize", "--circuit", str(src), "--max-passes", "1")
    assert code == 0
    assert "cz 0 1" in out


def test_verify_rules_text_and_json(capsys):
    code, out, _ = run_cli(capsys, "verify-rules")
    assert code == 0
    assert "overall pass" in out
    code, out, _ = run_cli(capsys, "verify-rules", "--format", "json")
    payload = json.loads(out)
    assert payload["pass"] is True
    assert len(payload["rules"]) == 10
    assert all(r["max_deviation"] < 1e-12 for r in payload["rules"])


def test_teleport_text_output(capsys):
    code, out, _ = run_cli(capsys, "teleport", "--protocol", "borras",
                           "--theta", "0.7853981633974483")
    assert code == 0
    assert out.strip() == "fidelity 1.000000000, deterministic true"


def test_teleport_theta_frac_and_json(capsys):
    code, out, _ = run_cli(capsys, "teleport", "--protocol", "ghz", "--theta-frac", "1/3",
                           "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["theta"] == pytest.approx(math.pi / 3)
    assert payload["deterministic"] is True
    assert payload["fidelity"] >= 1 - 1e-10


def test_teleport_original_variant(capsys):
    code, out, _ = run_cli(capsys, "teleport", "--protocol", "cluster2", "--theta-frac", "1/4",
                           "--variant", "original", "--format", "json")
    assert code == 0
    assert json.loads(out)["deterministic"] is True


def test_tomography_json(capsys):
    code, out, _ = run_cli(capsys, "tomography", "--protocol", "ghz", "--theta-frac", "1/3",
                           "--shots", "2048", "--seed", "9", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["shots"] == 2048
    assert payload["rho"]["dim"] == 2
    assert 0.9 <= payload["fidelity"] <= 1.0
    assert set(payload["counts"]) == {"z", "x", "y"}


def test_tomography_deterministic_across_calls(capsys):
    args = ["tomography", "--protocol", "entswap", "--theta", "0.9",
            "--shots", "1024", "--seed", "4", "--format", "json"]
    _, out1, _ = run_cli(capsys, *args)
    _, out2, _ = run_cli(capsys, *args)
    assert out1 == out2


def test_report_bundle(tmp_path, capsys):
    code, _, err = run_cli(capsys, "report", "--shots", "256", "--seed", "2",
                           "--out", str(tmp_path / "rep"))
    assert code == 0
    bundle = json.loads((tmp_path / "rep" / "report.json").read_text())
    assert set(bundle) == {"conformance", "channels", "checkpoints", "tomography"}
    assert len(bundle["conformance"]) == 6
    assert len(bundle["tomography"]["rows"]) == 8
    assert len(bundle["tomography"]["published_cross_check"]) == 8
    csv_text = (tmp_path / "rep" / "tomography.csv").read_text()
    assert csv_text.startswith("protocol,theta,shots,seed,")
    assert len(csv_text.splitlines()) == 9
    # every checkpoint deviation in the bundle is tiny
    for per_theta in bundle["checkpoints"].values():
        for devs in per_theta.values():
            assert all(d < 1e-10 for d in devs.values())


def test_report_stdout_when_no_out_dir(capsys):
    code, out, _ = run_cli(capsys, "report", "--shots", "64", "--seed", "1")
    assert code == 0
    bundle = json.loads(out)
    assert "conformance" in bundle
