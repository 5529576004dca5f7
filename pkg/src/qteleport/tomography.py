"""Shot-based single-qubit tomography of the teleported state.

Reconstruction is linear inversion from Z/X/Y expectation values with a
clip-to-PSD projection, so the infinite-shot limit is exact. The report also
cross-checks the published experimental density matrices against theory,
flagging entries whose printed trace is not 1 instead of scoring them.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .circuits import Circuit
from .protocols import PROTOCOLS, ProtocolSpec, build_simplified, get_protocol
from .sim import (
    BASIS_SKIP,
    DensityMatrix,
    MessageParams,
    StateVector,
    fidelity,
    run,
    sample_measurements,
)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

DEFAULT_SHOTS = 15360


def theoretical_density(m: MessageParams) -> DensityMatrix:
    """The pure message state as a 2x2 density matrix."""
    k = m.ket()
    return DensityMatrix(np.outer(k, k.conj()))


@dataclass(frozen=True)
class TomographyResult:
    protocol_id: str | None
    theta: float
    phi: float
    shots: int
    seed: int
    exp_x: float
    exp_y: float
    exp_z: float
    rho: DensityMatrix
    fidelity: float
    counts: dict[str, dict[str, int]] = field(default_factory=dict, repr=False)


def _expectation(counts: dict[str, int], shots: int) -> float:
    return (counts.get("0", 0) - counts.get("1", 0)) / shots


def _project_psd(rho: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh((rho + rho.conj().T) / 2)
    if vals.min() >= 0:
        return rho
    vals = np.clip(vals, 0.0, None)
    out = (vecs * vals) @ vecs.conj().T
    return out / np.trace(out).real


def reconstruct_density(exp_x: float, exp_y: float, exp_z: float) -> DensityMatrix:
    """Linear inversion from Pauli expectations, clipped to the PSD cone."""
    rho = (np.eye(2, dtype=complex) + exp_x * PAULI_X + exp_y * PAULI_Y + exp_z * PAULI_Z) / 2
    return DensityMatrix(_project_psd(rho))


def tomograph(c: Circuit, target: int, m: MessageParams, shots: int, seed: int,
              protocol_id: str | None = None) -> TomographyResult:
    """Measure the target qubit in Z, X, Y (seeds seed, seed+1, seed+2)."""
    if shots < 1:
        raise ValueError("shots must be positive")
    final = run(c, m)
    counts: dict[str, dict[str, int]] = {}
    exps: dict[str, float] = {}
    for offset, basis in enumerate(("z", "x", "y")):
        selector = [BASIS_SKIP] * c.qubit_count
        selector[target] = basis
        counts[basis] = sample_measurements(final, selector, shots, seed + offset)
        exps[basis] = _expectation(counts[basis], shots)
    rho = reconstruct_density(exps["x"], exps["y"], exps["z"])
    fid = fidelity(theoretical_density(m), rho)
    return TomographyResult(
        protocol_id, m.theta, m.phi, shots, seed,
        exps["x"], exps["y"], exps["z"], rho, fid, counts,
    )


def exact_expectations(final: StateVector, target: int) -> tuple[float, float, float]:
    """Infinite-shot Pauli expectations of one qubit (reference oracle)."""
    from .sim import reduced_density

    rho = reduced_density(final, [target]).matrix
    return tuple(float(np.real(np.trace(rho @ p))) for p in (PAULI_X, PAULI_Y, PAULI_Z))


# --- published experimental matrices (trace-violating entries flagged) -------

THETA_A = math.pi / 3
THETA_B = math.pi / 4

PUBLISHED_DENSITIES: tuple[tuple[str, float, tuple], ...] = (
    ("ghz", THETA_A, ((0.742, 0.435), (0.435, 0.258))),
    ("cluster2", THETA_A, ((0.749, 0.432 + 0.001j), (0.432 - 0.001j, 0.251))),
    ("cluster3", THETA_A, ((0.748, 0.427 - 0.003j), (0.427 + 0.003j, 0.252))),
    ("entswap", THETA_A, ((0.474, 0.436 - 0.002j), (0.436 + 0.002j, 0.253))),
    ("ghz", THETA_B, ((0.857, 0.345 - 0.002j), (0.345 + 0.002j, 0.143))),
    ("cluster2", THETA_B, ((0.856, 0.349 + 0.008j), (0.349 - 0.008j, 0.284))),
    ("cluster3", THETA_B, ((0.85, 0.35 - 0.001j), (0.35 + 0.001j, 0.15))),
    ("entswap", THETA_B, ((0.849, 0.347 - 0.002j), (0.347 + 0.002j, 0.151))),
)

TRACE_TOL = 0.005

# protocols whose hardware tomography is published; the other two appear in
# reports only as clearly-labeled extrapolation
PUBLISHED_PROTOCOLS = ("ghz", "cluster2", "cluster3", "entswap")


def published_cross_check() -> list[dict]:
    """Fidelity of each published matrix against theory.

    The pure-state overlap <M|rho|M> is always reported; the full overlap
    formula is added only for matrices that are valid states. Matrices whose
    trace is off are flagged, not scored.
    """
    rows = []
    for pid, theta, entries in PUBLISHED_DENSITIES:
        mat = np.array(entries, dtype=complex)
        m = MessageParams(theta)
        trace = float(np.trace(mat).real)
        flagged = abs(trace - 1.0) > TRACE_TOL
        k = m.ket()
        overlap = float(np.real(np.vdot(k, mat @ k)))
        row = {
            "protocol": pid,
            "theta": theta,
            "trace": trace,
            "trace_flagged": flagged,
            "overlap_pure": overlap,
            "fidelity": None,
        }
        if not flagged:
            row["fidelity"] = fidelity(theoretical_density(m), DensityMatrix(mat))
        rows.append(row)
    return rows


# --- experiment report -------------------------------------------------------

REPORT_CSV_COLUMNS = (
    "protocol", "theta", "shots", "seed",
    "exp_x", "exp_y", "exp_z",
    "rho00_re", "rho01_re", "rho01_im", "rho11_re", "fidelity",
)


def experiment_report(protocol_ids, thetas, shots: int = DEFAULT_SHOTS, seed: int = 7) -> dict:
    """Tomography table over (protocol, theta) plus the published cross-check.

    Combination k uses seeds seed+3k .. seed+3k+2, so the table is reproducible
    and each combination could run independently.
    """
    specs: list[ProtocolSpec] = [get_protocol(pid) for pid in protocol_ids]
    rows = []
    for k, (p, theta) in enumerate((p, t) for p in specs for t in thetas):
        res = tomograph(build_simplified(p), p.target_qubit, MessageParams(theta),
                        shots, seed + 3 * k, protocol_id=p.id)
        rho = res.rho.matrix
        rows.append({
            "protocol": p.id,
            "theta": theta,
            "shots": shots,
            "seed": res.seed,
            "exp_x": res.exp_x,
            "exp_y": res.exp_y,
            "exp_z": res.exp_z,
            "rho00_re": float(rho[0, 0].real),
            "rho01_re": float(rho[0, 1].real),
            "rho01_im": float(rho[0, 1].imag),
            "rho11_re": float(rho[1, 1].real),
            "fidelity": res.fidelity,
            "extrapolation": p.id not in PUBLISHED_PROTOCOLS,
            "counts": res.counts,
        })
    return {
        "shots": shots,
        "seed": seed,
        "rows": rows,
        "published_cross_check": published_cross_check(),
    }


def report_rows_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=REPORT_CSV_COLUMNS, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()
