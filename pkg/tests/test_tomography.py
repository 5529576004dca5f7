import math

import numpy as np
import pytest

from qteleport.protocols import build_simplified, get_protocol
from qteleport.sim import MessageParams, fidelity, run
from qteleport.tomography import (
    PUBLISHED_DENSITIES,
    THETA_A,
    THETA_B,
    exact_expectations,
    experiment_report,
    published_cross_check,
    reconstruct_density,
    report_rows_csv,
    theoretical_density,
    tomograph,
)


def test_theoretical_density_values():
    rho = theoretical_density(MessageParams(math.pi / 3)).matrix
    assert rho[0, 0].real == pytest.approx(0.750, abs=5e-5)
    assert rho[0, 1].real == pytest.approx(0.4330, abs=5e-5)
    assert rho[1, 1].real == pytest.approx(0.250, abs=5e-5)

    rho = theoretical_density(MessageParams(math.pi / 4)).matrix
    assert rho[0, 0].real == pytest.approx(0.8536, abs=5e-5)
    assert rho[0, 1].real == pytest.approx(0.3536, abs=5e-5)
    assert rho[1, 1].real == pytest.approx(0.1464, abs=5e-5)

    rho = theoretical_density(MessageParams(0.0)).matrix
    assert np.allclose(rho, [[1, 0], [0, 0]])


def test_exact_expectations_are_bloch_vector():
    theta = 0.9
    p = get_protocol("ghz")
    final = run(build_simplified(p), MessageParams(theta))
    ex, ey, ez = exact_expectations(final, p.target_qubit)
    assert ez == pytest.approx(math.cos(theta), abs=1e-10)
    assert ex == pytest.approx(math.sin(theta), abs=1e-10)
    assert ey == pytest.approx(0.0, abs=1e-10)


@pytest.mark.parametrize("pid", ["ghz", "cluster2", "cluster3", "brown", "borras", "entswap"])
@pytest.mark.parametrize("theta", [THETA_A, THETA_B])
def test_exact_reconstruction_equals_theory(pid, theta):
    # infinite-shot limit: expectations from the exact state reproduce rho
    p = get_protocol(pid)
    final = run(build_simplified(p), MessageParams(theta))
    ex, ey, ez = exact_expectations(final, p.target_qubit)
    rho = reconstruct_density(ex, ey, ez).matrix
    want = theoretical_density(MessageParams(theta)).matrix
    assert np.max(np.abs(rho - want)) < 1e-12


def test_tomograph_fidelity_with_shot_noise():
    # standard error of each Pauli expectation is at most 1/sqrt(shots)
    p = get_protocol("ghz")
    res = tomograph(build_simplified(p), p.target_qubit, MessageParams(math.pi / 3), 15360, 11, "ghz")
    assert res.fidelity >= 0.995
    for counts in res.counts.values():
        assert sum(counts.values()) == 15360


def test_tomograph_deterministic():
    p = get_protocol("cluster2")
    a = tomograph(build_simplified(p), p.target_qubit, MessageParams(0.8), 2048, 5)
    b = tomograph(build_simplified(p), p.target_qubit, MessageParams(0.8), 2048, 5)
    assert a.fidelity == b.fidelity
    assert a.counts == b.counts
    assert np.array_equal(a.rho.matrix, b.rho.matrix)


def test_tomograph_uses_derived_seeds():
    p = get_protocol("cluster2")
    a = tomograph(build_simplified(p), p.target_qubit, MessageParams(0.8), 2048, 5)
    c = tomograph(build_simplified(p), p.target_qubit, MessageParams(0.8), 2048, 6)
    assert a.counts != c.counts


def test_tomograph_rejects_zero_shots():
    p = get_protocol("ghz")
    with pytest.raises(ValueError, match="shots"):
        tomograph(build_simplified(p), p.target_qubit, MessageParams(1.0), 0, 1)


def test_reconstruction_projects_to_psd():
    # noisy expectations outside the Bloch ball are clipped to a valid state
    rho = reconstruct_density(0.8, 0.0, 0.7)
    vals = np.linalg.eigvalsh(rho.matrix)
    assert vals.min() >= -1e-12
    assert np.trace(rho.matrix).real == pytest.approx(1.0, abs=1e-12)


def test_published_cross_check_values():
    rows = published_cross_check()
    assert len(rows) == len(PUBLISHED_DENSITIES) == 8
    by_key = {(r["protocol"], round(r["theta"], 6)): r for r in rows}

    # derived oracle: pure-state overlap computed directly from the entries
    k = MessageParams(THETA_A).ket()
    mat = np.array([[0.742, 0.435], [0.435, 0.258]])
    oracle = float(np.real(k.conj() @ mat @ k))
    row = by_key[("ghz", round(THETA_A, 6))]
    assert not row["trace_flagged"]
    assert row["fidelity"] == pytest.approx(oracle, abs=1e-10)
    assert row["fidelity"] == pytest.approx(0.9977, abs=5e-4)

    flagged = {(r["protocol"], round(r["theta"], 6)) for r in rows if r["trace_flagged"]}
    assert flagged == {("entswap", round(THETA_A, 6)), ("cluster2", round(THETA_B, 6))}
    assert by_key[("entswap", round(THETA_A, 6))]["trace"] == pytest.approx(0.727, abs=1e-9)
    assert by_key[("cluster2", round(THETA_B, 6))]["trace"] == pytest.approx(1.140, abs=1e-9)
    for r in rows:
        if r["trace_flagged"]:
            assert r["fidelity"] is None


def test_cross_check_fidelity_matches_pure_overlap_everywhere():
    for row in published_cross_check():
        if not row["trace_flagged"]:
            assert row["fidelity"] == pytest.approx(row["overlap_pure"], abs=1e-9)


def test_experiment_report_contents():
    rep = experiment_report(["ghz", "cluster2"], [THETA_A], shots=4096, seed=3)
    assert len(rep["rows"]) == 2
    for row in rep["rows"]:
        assert set(row["counts"]) == {"z", "x", "y"}
        assert not row["extrapolation"]
    assert len(rep["published_cross_check"]) == 8
    rep2 = experiment_report(["ghz", "cluster2"], [THETA_A], shots=4096, seed=3)
    assert rep["rows"] == rep2["rows"]


def test_experiment_report_labels_extrapolation():
    rep = experiment_report(["brown", "borras"], [THETA_A], shots=1024, seed=3)
    assert all(r["extrapolation"] for r in rep["rows"])


def test_experiment_report_unknown_protocol():
    with pytest.raises(KeyError, match="unknown protocol"):
        experiment_report(["nope"], [THETA_A], shots=16, seed=0)


def test_report_csv_columns():
    rep = experiment_report(["ghz"], [THETA_A], shots=512, seed=1)
    text = report_rows_csv(rep["rows"])
    header = text.splitlines()[0]
    assert header == "protocol,theta,shots,seed,exp_x,exp_y,exp_z,rho00_re,rho01_re,rho01_im,rho11_re,fidelity"
    assert len(text.splitlines()) == 2


def test_uhlmann_agrees_with_pure_overlap_on_reconstruction():
    p = get_protocol("entswap")
    m = MessageParams(THETA_B)
    res = tomograph(build_simplified(p), p.target_qubit, m, 8192, 21)
    k = m.ket()
    overlap = float(np.real(k.conj() @ res.rho.matrix @ k))
    assert fidelity(theoretical_density(m), res.rho) == pytest.approx(overlap, abs=1e-9)
