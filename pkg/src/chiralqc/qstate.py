"""Dense mixed-radix pure-state register.

Layout conventions used across the package:

* spin-1/2 encoding: up <-> |0>, down <-> |1>;
* site 0 is the fastest-varying (least-significant) index of the amplitude
  array, so basis index = sum_k label_k * prod_{j<k} dims[j];
* an operator acting on ``targets`` uses the same convention internally:
  ``targets[0]`` is the fastest-varying index of the operator matrix;
* at most one site has dimension 3 (the ancilla qutrit), and by convention it
  is the last site.

Registers are treated as immutable values. Every public operation returns a
new register.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

MAX_SITES = 24
NORM_TOL = 1e-12
COLLAPSE_FLOOR = 1e-14


class DimensionError(ValueError):
    """Raised for inconsistent register or operator dimensions."""


def check_dims(dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims:
        raise DimensionError("register needs at least one site")
    if len(dims) > MAX_SITES:
        raise DimensionError(f"at most {MAX_SITES} sites supported, got {len(dims)}")
    if any(d not in (2, 3) for d in dims):
        raise DimensionError(f"site dimensions must be 2 or 3, got {dims}")
    if sum(d == 3 for d in dims) > 1:
        raise DimensionError("at most one qutrit site is allowed")
    return dims


def total_dim(dims: Sequence[int]) -> int:
    return int(np.prod(dims, dtype=np.int64))


def stream(seed: int, *keys: int) -> np.random.Generator:
    """Counter-based generator (Philox) for the substream ``(seed, *keys)``.

    Distinct key tuples give statistically independent streams, so sweeps can
    hand one substream to each task without any shared state.
    """
    ss = np.random.SeedSequence([int(seed), *map(int, keys)])
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class DenseOperator:
    """Complex square matrix acting on ``arity`` sites.

    ``hermitian`` and ``unitary`` are checked against the matrix (tolerance
    1e-10) on first access and cached, never trusted from the caller.
    """

    matrix: np.ndarray
    arity: int

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"operator must be square, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @cached_property
    def hermitian(self) -> bool:
        m = self.matrix
        return bool(np.allclose(m, m.conj().T, atol=1e-10, rtol=0))

    @cached_property
    def unitary(self) -> bool:
        m = self.matrix
        return bool(np.allclose(m @ m.conj().T, np.eye(m.shape[0]), atol=1e-10, rtol=0))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def power(self, k: int) -> np.ndarray:
        if k < 0:
            raise ValueError("negative operator powers are not supported")
        return np.linalg.matrix_power(self.matrix, k)

    def __matmul__(self, other: "DenseOperator") -> "DenseOperator":
        return DenseOperator(self.matrix @ other.matrix, self.arity)


@dataclass(frozen=True)
class QRegister:
    dims: tuple[int, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = check_dims(self.dims)
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != total_dim(dims):
            raise DimensionError(f"expected {total_dim(dims)} amplitudes, got {amps.size}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"register is not normalized (norm={norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_sites(self) -> int:
        return len(self.dims)

    def tensor(self) -> np.ndarray:
        """Amplitudes as an array with tensor axis ``n-1-k`` for site ``k``."""
        return self.amplitudes.reshape(self.dims[::-1])

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def from_amplitudes(dims: Sequence[int], amps, normalize: bool = True) -> QRegister:
    amps = np.asarray(amps, dtype=complex).reshape(-1)
    if normalize:
        nrm = np.linalg.norm(amps)
        if nrm == 0:
            raise ValueError("cannot normalize the zero vector")
        amps = amps / nrm
    return QRegister(tuple(dims), amps)


def basis_index(dims: Sequence[int], labels: Sequence[int]) -> int:
    idx, stride = 0, 1
    for d, lab in zip(dims, labels):
        idx += lab * stride
        stride *= d
    return idx


def init_basis(dims: Sequence[int], labels: Sequence[int]) -> QRegister:
    dims = check_dims(dims)
    if len(labels) != len(dims):
        raise DimensionError("need one label per site")
    for d, lab in zip(dims, labels):
        if not 0 <= lab < d:
            raise DimensionError(f"label {lab} out of range for site of dimension {d}")
    amps = np.zeros(total_dim(dims), dtype=complex)
    amps[basis_index(dims, labels)] = 1.0
    return QRegister(dims, amps)


def tensor_product(*regs: QRegister) -> QRegister:
    """Join registers; sites of ``regs[0]`` come first (fastest-varying)."""
    dims: tuple[int, ...] = ()
    amps = np.ones(1, dtype=complex)
    for r in regs:
        amps = np.kron(r.amplitudes, amps)
        dims = dims + r.dims
    return from_amplitudes(dims, amps)


def _check_targets(dims, targets) -> list[int]:
    targets = [int(t) for t in targets]
    if len(set(targets)) != len(targets):
        raise DimensionError(f"duplicate target sites {targets}")
    for t in targets:
        if not 0 <= t < len(dims):
            raise DimensionError(f"site {t} out of range for {len(dims)} sites")
    return targets


def _apply_tensor(psi: np.ndarray, mat: np.ndarray, axes: list[int]) -> np.ndarray:
    # op index convention: axes[0] fastest, so the op tensor's C-order axes run
    # axes[-1], ..., axes[0]
    m = len(axes)
    tdims = [psi.shape[a] for a in reversed(axes)]
    op = mat.reshape(tdims + tdims)
    out = np.tensordot(op, psi, axes=(list(range(m, 2 * m)), list(reversed(axes))))
    return np.moveaxis(out, list(range(m)), list(reversed(axes)))


def _as_matrix(op) -> np.ndarray:
    return op.matrix if isinstance(op, DenseOperator) else np.asarray(op, dtype=complex)


def apply_gate(reg: QRegister, op, targets: Sequence[int], check_unitary: bool = True) -> QRegister:
    targets = _check_targets(reg.dims, targets)
    mat = _as_matrix(op)
    expected = total_dim([reg.dims[t] for t in targets])
    if mat.shape != (expected, expected):
        raise DimensionError(f"operator of shape {mat.shape} does not fit targets of total dimension {expected}")
    if check_unitary and not np.allclose(mat @ mat.conj().T, np.eye(expected), atol=1e-10, rtol=0):
        raise ValueError("operator is not unitary")
    n = reg.n_sites
    out = _apply_tensor(reg.tensor(), mat, [n - 1 - t for t in targets])
    return QRegister(reg.dims, out.reshape(-1))


def apply_controlled(
    reg: QRegister,
    op,
    control: int,
    level_powers: Mapping[int, int],
    targets: Sequence[int],
) -> QRegister:
    """Apply ``op ** level_powers[i]`` to ``targets`` on the branch where
    ``control`` is in level ``i``. Levels missing from the map get power 0.

    With ``level_powers={0: 0, 1: 1, 2: 2}`` and a qutrit control this is
    |i>|psi> -> |i> U^i |psi>.
    """
    targets = _check_targets(reg.dims, targets)
    (control,) = _check_targets(reg.dims, [control])
    if control in targets:
        raise DimensionError("control site cannot also be a target")
    mat = _as_matrix(op)
    expected = total_dim([reg.dims[t] for t in targets])
    if mat.shape != (expected, expected):
        raise DimensionError(f"operator of shape {mat.shape} does not fit targets of total dimension {expected}")
    n = reg.n_sites
    cax = n - 1 - control
    sub_axes = []
    for t in targets:
        a = n - 1 - t
        sub_axes.append(a if a < cax else a - 1)
    psi = reg.tensor()
    out = psi.copy()
    for level in range(reg.dims[control]):
        k = int(level_powers.get(level, 0))
        if k < 0:
            raise ValueError("level exponents must be nonnegative")
        if k == 0:
            continue
        sl = [slice(None)] * n
        sl[cax] = level
        sl = tuple(sl)
        out[sl] = _apply_tensor(psi[sl], np.linalg.matrix_power(mat, k), sub_axes)
    return QRegister(reg.dims, out.reshape(-1))


def inner(reg_a: QRegister, reg_b: QRegister) -> complex:
    if reg_a.dims != reg_b.dims:
        raise DimensionError(f"dims mismatch: {reg_a.dims} vs {reg_b.dims}")
    return complex(np.vdot(reg_a.amplitudes, reg_b.amplitudes))


def expectation(reg: QRegister, op, targets: Sequence[int]) -> float:
    targets = _check_targets(reg.dims, targets)
    mat = _as_matrix(op)
    if not np.allclose(mat, mat.conj().T, atol=1e-10, rtol=0):
        raise ValueError("expectation requires a Hermitian operator")
    n = reg.n_sites
    phi = _apply_tensor(reg.tensor(), mat, [n - 1 - t for t in targets]).reshape(-1)
    val = np.vdot(reg.amplitudes, phi)
    if abs(val.imag) > 1e-10:
        raise ArithmeticError(f"expectation has imaginary residue {val.imag!r}")
    return float(val.real)


def site_probabilities(reg: QRegister, site: int) -> np.ndarray:
    (site,) = _check_targets(reg.dims, [site])
    n = reg.n_sites
    p = np.abs(reg.tensor()) ** 2
    other = tuple(a for a in range(n) if a != n - 1 - site)
    return p.sum(axis=other)


def _cdf(probs: np.ndarray) -> np.ndarray:
    p = np.where(probs < COLLAPSE_FLOOR, 0.0, probs)
    c = np.cumsum(p)
    return c / c[-1]


def sample_outcomes(probs: np.ndarray, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``shots`` independent outcomes from a Born distribution.

    Consumes exactly one uniform per shot, in the same order as repeated calls
    to :func:`measure_site`, so batch and shot-by-shot sampling agree exactly.
    Outcomes with probability below 1e-14 are never drawn.
    """
    cdf = _cdf(np.asarray(probs, dtype=float))
    u = rng.random(int(shots))
    return np.minimum(np.searchsorted(cdf, u, side="right"), len(cdf) - 1)


def sample_site(reg: QRegister, site: int, shots: int, rng: np.random.Generator) -> np.ndarray:
    return sample_outcomes(site_probabilities(reg, site), shots, rng)


def project_site(reg: QRegister, site: int, outcome: int) -> QRegister:
    n = reg.n_sites
    psi = reg.tensor().copy()
    sl = [slice(None)] * n
    for level in range(reg.dims[site]):
        if level != outcome:
            sl[n - 1 - site] = level
            psi[tuple(sl)] = 0.0
    return from_amplitudes(reg.dims, psi.reshape(-1))


def measure_site(reg: QRegister, site: int, rng: np.random.Generator) -> tuple[int, QRegister]:
    """Projective computational-basis measurement of one site."""
    outcome = int(sample_site(reg, site, 1, rng)[0])
    return outcome, project_site(reg, site, outcome)


def drop_site(reg: QRegister, site: int, level: int) -> QRegister:
    """Remove a site known to be in basis state ``level``.

    Whatever weight lives outside that level is discarded and the rest
    renormalized, so call this only after a collapse onto ``level``.
    """
    n = reg.n_sites
    psi = np.take(reg.tensor(), level, axis=n - 1 - site)
    dims = reg.dims[:site] + reg.dims[site + 1:]
    return from_amplitudes(dims, psi.reshape(-1))


@dataclass(frozen=True)
class DensityMatrix:
    """Reduced state over ``sites`` (``sites[0]`` fastest-varying in ``matrix``)."""

    dims: tuple[int, ...]
    sites: tuple[int, ...]
    matrix: np.ndarray

    def purity(self) -> float:
        return float(np.real(np.einsum("ij,ji->", self.matrix, self.matrix)))

    def expectation(self, op) -> float:
        return float(np.real(np.trace(self.matrix @ _as_matrix(op))))


def partial_trace(reg: QRegister, keep: Sequence[int]) -> DensityMatrix:
    keep = list(keep)
    if not keep:
        raise DimensionError("keep must name at least one site")
    keep = _check_targets(reg.dims, keep)
    n = reg.n_sites
    psi = reg.tensor()
    # put kept axes first in matrix order (keep[-1] slowest ... keep[0] fastest)
    kept_axes = [n - 1 - s for s in reversed(keep)]
    rest = [a for a in range(n) if a not in kept_axes]
    mat = np.transpose(psi, kept_axes + rest).reshape(total_dim([reg.dims[s] for s in keep]), -1)
    rho = mat @ mat.conj().T
    return DensityMatrix(tuple(reg.dims[s] for s in keep), tuple(keep), rho)


def save_state(reg: QRegister, path) -> None:
    payload = {
        "dims": list(reg.dims),
        "amps": [[float(a.real), float(a.imag)] for a in reg.amplitudes],
    }
    Path(path).write_text(json.dumps(payload) + "\n")


def state_from_json(payload: dict) -> QRegister:
    try:
        dims = check_dims(payload["dims"])
        amps = np.array([complex(re, im) for re, im in payload["amps"]], dtype=complex)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed state file: {exc}") from exc
    if amps.size != total_dim(dims):
        raise DimensionError(f"state file has {amps.size} amplitudes for dims {list(dims)}")
    norm = np.linalg.norm(amps)
    if abs(norm - 1.0) > 1e-8:
        raise ValueError(f"state file is not normalized (norm={norm!r})")
    return from_amplitudes(dims, amps)


def load_state(path) -> QRegister:
    try:
        payload = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed state file: {exc}") from exc
    return state_from_json(payload)
