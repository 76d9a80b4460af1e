"""Measurement schemes for the trio chirality.

Hadamard test
    Ancilla qubit appended as the last register site, prepared with H, used to
    control U = exp(-i 2pi/3 chi) on the trio, then read out in X or Y. With
    s = +1 for ancilla outcome 0 and -1 for outcome 1:

        <chi>   = -(2/sqrt(3)) <Y>_a
        <chi^2> = (2/3) (1 - <X>_a)

Direct measurement
    The six Pauli strings of the chirality, shots split evenly between them.

Qutrit phase estimation
    Ancilla qutrit appended last: QFT3, controlled U^i, inverse QFT3, readout.
    Outcome 0, 1, 2 signals eigenvalue 0, -1, +1.

Basis rotations applied before a computational-basis readout (single source
of sign conventions): X -> H, Y -> H S^dagger (S^dagger acts first), Z -> none.

Every shot is an independent draw from the freshly prepared circuit output.
By default the circuit is simulated once and the shots are drawn from its
ancilla distribution; ``per_shot=True`` re-runs the whole circuit for every
shot and consumes the random stream identically, so both paths give the same
record for the same generator state.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import ceil
from typing import Sequence

import numpy as np

from . import qstate
from .operators import TWO_PI_THIRDS, chirality_pauli_expansion, exp_chirality
from .qstate import QRegister, apply_controlled, apply_gate, init_basis, tensor_product
from .states import SiteTrio

H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
SDG = np.diag([1, -1j])
ROTATIONS = {"X": H, "Y": H @ SDG, "Z": np.eye(2, dtype=complex), "I": np.eye(2, dtype=complex)}

_W = np.exp(2j * np.pi / 3)
QFT3 = np.array([[1, 1, 1], [1, _W, _W**2], [1, _W**2, _W]]) / np.sqrt(3)
QFT3_INV = QFT3.conj().T

QPE_EIGENVALUE = {0: 0, 1: -1, 2: 1}

U_CYCLE = exp_chirality(TWO_PI_THIRDS)


@dataclass(frozen=True)
class ShotRecord:
    basis: str
    outcomes: np.ndarray
    seed: tuple | None = None

    def __post_init__(self):
        if self.basis not in ("X", "Y", "computational"):
            raise ValueError(f"unknown basis {self.basis!r}")
        out = np.asarray(self.outcomes, dtype=int)
        allowed = (-1, 1) if self.basis in ("X", "Y") else (0, 1, 2)
        if out.size and not np.isin(out, allowed).all():
            raise ValueError(f"outcomes outside alphabet {allowed}")
        object.__setattr__(self, "outcomes", out)

    @property
    def shots(self) -> int:
        return int(self.outcomes.size)

    def histogram(self) -> dict[int, int]:
        vals, counts = np.unique(self.outcomes, return_counts=True)
        return {int(v): int(c) for v, c in zip(vals, counts)}


@dataclass(frozen=True)
class EstimateReport:
    estimate: float
    std_error: float
    shots: int
    method: str
    observable: str = "chi"
    flags: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.std_error < 0:
            raise ValueError("std_error must be nonnegative")
        if self.method not in ("hadamard", "direct", "qpe", "exact"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.method != "exact" and self.shots <= 0:
            raise ValueError("sampled estimates need shots > 0")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["flags"] = list(self.flags)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _rng(stream) -> tuple[np.random.Generator, tuple | None]:
    if isinstance(stream, np.random.Generator):
        return stream, None
    keys = (stream,) if np.isscalar(stream) else tuple(stream)
    return qstate.stream(*keys), tuple(int(k) for k in keys)


def _check_trio(reg: QRegister, trio: SiteTrio) -> tuple[int, int, int]:
    if reg.n_sites < 3 or any(d != 2 for d in reg.dims):
        raise ValueError("chirality protocols need a register of >= 3 qubits")
    return trio.check(reg.n_sites).sites


def _mean_and_error(values: np.ndarray) -> tuple[float, float]:
    n = values.size
    mean = float(values.mean())
    if n < 2:
        return mean, 0.0
    return mean, float(values.std(ddof=1) / np.sqrt(n))


# -- Hadamard test ----------------------------------------------------------

def hadamard_circuit(reg: QRegister, trio: SiteTrio, basis: str) -> QRegister:
    """Pre-measurement state: register sites followed by the rotated ancilla."""
    sites = _check_trio(reg, trio)
    basis = basis.upper()
    if basis not in ("X", "Y"):
        raise ValueError(f"Hadamard test basis must be X or Y, got {basis!r}")
    anc = reg.n_sites
    psi = tensor_product(reg, init_basis([2], [0]))
    psi = apply_gate(psi, H, [anc])
    psi = apply_controlled(psi, U_CYCLE, anc, {0: 0, 1: 1}, sites)
    return apply_gate(psi, ROTATIONS[basis], [anc])


def hadamard_probabilities(reg: QRegister, trio: SiteTrio, basis: str) -> np.ndarray:
    psi = hadamard_circuit(reg, trio, basis)
    return qstate.site_probabilities(psi, psi.n_sites - 1)


def hadamard_expectation(reg: QRegister, trio: SiteTrio, basis: str) -> float:
    """Exact (infinite-shot) ancilla expectation <X>_a or <Y>_a."""
    p = hadamard_probabilities(reg, trio, basis)
    return float(p[0] - p[1])


def hadamard_test(
    reg: QRegister,
    trio: SiteTrio,
    basis: str,
    shots: int,
    stream,
    per_shot: bool = False,
) -> ShotRecord:
    if shots <= 0:
        raise ValueError("shots must be positive")
    rng, seed = _rng(stream)
    basis = basis.upper()
    if per_shot:
        bits = np.empty(shots, dtype=int)
        for s in range(shots):
            psi = hadamard_circuit(reg, trio, basis)
            bits[s], _ = qstate.measure_site(psi, psi.n_sites - 1, rng)
        return ShotRecord(basis, 1 - 2 * bits, seed)
    return sample_hadamard(hadamard_probabilities(reg, trio, basis), basis, shots, rng, seed)


def sample_hadamard(probs: np.ndarray, basis: str, shots: int, rng: np.random.Generator, seed=None) -> ShotRecord:
    """Draw ancilla readouts (+1 for outcome 0, -1 for outcome 1) from exact probabilities."""
    bits = qstate.sample_outcomes(probs, shots, rng)
    return ShotRecord(basis, 1 - 2 * bits, seed)


def chirality_from_hadamard(record: ShotRecord, observable: str | None = None) -> EstimateReport:
    """Post-process ancilla outcomes: Y record -> <chi>, X record -> <chi^2>.

    Out-of-range estimates are kept as is and flagged.
    """
    if record.shots == 0:
        raise ValueError("empty shot record")
    natural = {"Y": "chi", "X": "chi2"}.get(record.basis)
    if natural is None or (observable is not None and observable != natural):
        raise ValueError(f"{record.basis} record cannot estimate {observable or 'chirality'}")
    mean, err = _mean_and_error(record.outcomes.astype(float))
    if natural == "chi":
        scale = 2 / np.sqrt(3)
        est, se = -scale * mean, scale * err
        out_of_range = abs(est) > 1
    else:
        est, se = 2 / 3 * (1 - mean), 2 / 3 * err
        out_of_range = not 0 <= est <= 1
    flags = ("out_of_range",) if out_of_range else ()
    return EstimateReport(float(est), float(se), record.shots, "hadamard", natural, flags)


def hadamard_exact(reg: QRegister, trio: SiteTrio) -> dict[str, float]:
    y = hadamard_expectation(reg, trio, "Y")
    x = hadamard_expectation(reg, trio, "X")
    return {"Y": y, "X": x, "chi": -2 / np.sqrt(3) * y, "chi2": 2 / 3 * (1 - x)}


# -- direct Pauli-string measurement -----------------------------------------

def _string_distribution(reg: QRegister, sites: Sequence[int], letters: str) -> np.ndarray:
    psi = reg
    for site, ch in zip(sites, letters):
        if ch in ("X", "Y"):
            psi = apply_gate(psi, ROTATIONS[ch], [site])
    return np.real(np.diag(qstate.partial_trace(psi, list(sites)).matrix)).clip(min=0)


def _parities(letters: str) -> np.ndarray:
    # outcome index i over trio bits, sites[0] least significant
    out = np.ones(2 ** len(letters), dtype=int)
    for k, ch in enumerate(letters):
        if ch != "I":
            out *= 1 - 2 * ((np.arange(out.size) >> k) & 1)
    return out


def direct_exact(reg: QRegister, trio: SiteTrio) -> float:
    sites = _check_trio(reg, trio)
    total = 0.0
    for ps in chirality_pauli_expansion():
        total += ps.coefficient * float(_string_distribution(reg, sites, ps.letters) @ _parities(ps.letters))
    return total


def direct_distributions(reg: QRegister, trio: SiteTrio) -> list[tuple[float, np.ndarray, np.ndarray]]:
    """Per Pauli string: (coefficient, outcome distribution, outcome parities)."""
    sites = _check_trio(reg, trio)
    return [
        (ps.coefficient, _string_distribution(reg, sites, ps.letters), _parities(ps.letters))
        for ps in chirality_pauli_expansion()
    ]


def direct_from_distributions(dists, shots_total: int, stream) -> EstimateReport:
    if shots_total <= 0:
        raise ValueError("shots must be positive")
    rng, _ = _rng(stream)
    per_string = -(-shots_total // len(dists))
    flags = ["padded"] if per_string * len(dists) != shots_total else []
    est, var = 0.0, 0.0
    for coeff, probs, parities in dists:
        vals = parities[qstate.sample_outcomes(probs, per_string, rng)]
        mean, err = _mean_and_error(vals.astype(float))
        est += coeff * mean
        var += coeff**2 * err**2
    if abs(est) > 1:
        flags.append("out_of_range")
    return EstimateReport(float(est), float(np.sqrt(var)), per_string * len(dists), "direct", "chi", tuple(flags))


def direct_estimator(reg: QRegister, trio: SiteTrio, shots_total: int, stream) -> EstimateReport:
    """Measure each Pauli string of the chirality on shots_total/6 shots.

    Every shot rotates the trio into the string's eigenbasis, reads three
    qubits and multiplies the +-1 outcomes. ``shots_total`` is padded up to a
    multiple of six (flagged).
    """
    return direct_from_distributions(direct_distributions(reg, trio), shots_total, stream)


# -- single-qutrit phase estimation ------------------------------------------

def qpe_circuit(reg: QRegister, trio: SiteTrio) -> QRegister:
    sites = _check_trio(reg, trio)
    anc = reg.n_sites
    psi = tensor_product(reg, init_basis([3], [0]))
    psi = apply_gate(psi, QFT3, [anc])
    psi = apply_controlled(psi, U_CYCLE, anc, {0: 0, 1: 1, 2: 2}, sites)
    return apply_gate(psi, QFT3_INV, [anc])


def qpe_probabilities(reg: QRegister, trio: SiteTrio) -> np.ndarray:
    """Exact ancilla distribution (P0, P1, P2)."""
    psi = qpe_circuit(reg, trio)
    return qstate.site_probabilities(psi, psi.n_sites - 1)


def qutrit_qpe(
    reg: QRegister, trio: SiteTrio, shots: int, stream, per_shot: bool = False
) -> tuple[ShotRecord, np.ndarray]:
    if shots <= 0:
        raise ValueError("shots must be positive")
    rng, seed = _rng(stream)
    probs = qpe_probabilities(reg, trio)
    if per_shot:
        out = np.empty(shots, dtype=int)
        for s in range(shots):
            psi = qpe_circuit(reg, trio)
            out[s], _ = qstate.measure_site(psi, psi.n_sites - 1, rng)
    else:
        out = qstate.sample_outcomes(probs, shots, rng)
    return ShotRecord("computational", out, seed), probs


def chirality_from_qpe(record: ShotRecord) -> EstimateReport:
    """<chi> = P2 - P1 from qutrit readouts."""
    if record.basis != "computational" or record.shots == 0:
        raise ValueError("need a nonempty computational-basis record")
    vals = np.array([QPE_EIGENVALUE[int(o)] for o in range(3)])[record.outcomes].astype(float)
    mean, err = _mean_and_error(vals)
    return EstimateReport(mean, err, record.shots, "qpe", "chi")


def qpe_project(reg: QRegister, trio: SiteTrio, stream) -> tuple[int, QRegister]:
    """One QPE shot; returns the eigenvalue read and the collapsed register."""
    rng, _ = _rng(stream)
    psi = qpe_circuit(reg, trio)
    anc = psi.n_sites - 1
    k, collapsed = qstate.measure_site(psi, anc, rng)
    return QPE_EIGENVALUE[k], qstate.drop_site(collapsed, anc, k)


# -- cost model ---------------------------------------------------------------

@dataclass(frozen=True)
class CostModel:
    epsilon: float
    direct_preps: int
    hadamard_preps: int
    direct_measurements: int
    hadamard_measurements: int
    ratio_preps: Fraction
    ratio_measurements: Fraction

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ratio_preps"] = float(self.ratio_preps)
        d["ratio_measurements"] = float(self.ratio_measurements)
        return d


def cost_model(epsilon: float) -> CostModel:
    """Worst-case trial counts for precision ``epsilon``.

    Direct: Var <= 3/N over six strings with three single-qubit readouts each.
    Hadamard: Var <= 4/(3N) with one ancilla readout per trial.
    """
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    eps = Fraction(str(epsilon))
    direct = ceil(Fraction(3) / eps**2)
    had = ceil(Fraction(4, 3) / eps**2)
    return CostModel(
        epsilon=float(epsilon),
        direct_preps=direct,
        hadamard_preps=had,
        direct_measurements=3 * direct,
        hadamard_measurements=had,
        ratio_preps=Fraction(3) / Fraction(4, 3),
        ratio_measurements=3 * Fraction(3) / Fraction(4, 3),
    )
