"""Heisenberg + z-axis Dzyaloshinskii-Moriya + Zeeman ring, solved by dense ED.

    H = -J sum_n S_n . S_{n+1} + D sum_n z . (S_n x S_{n+1})
        + B' S^x_1 + B sum_n S^z_n

with periodic closure (site N+1 is site 1). Site 1 of the formula is
register site 0.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache, reduce

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .operators import SPIN, X, Y, Z
from .qstate import DenseOperator, QRegister, from_amplitudes, partial_trace

MAX_ED_SITES = 14


@dataclass(frozen=True)
class HamiltonianParams:
    N: int
    J: float = 1.0
    D: float = 0.0
    B: float = 0.0
    Bprime: float = 0.0

    def __post_init__(self):
        if self.N < 3:
            raise ValueError(f"ring needs N >= 3 sites, got {self.N}")
        if not all(np.isfinite([self.J, self.D, self.B, self.Bprime])):
            raise ValueError("couplings must be finite")

    @classmethod
    def spiral(cls, N: int = 10, J: float = 1.0, B: float = 0.0, Bprime: float = -0.1) -> "HamiltonianParams":
        """DM strength J tan(2 pi / N): one full spiral period around the ring."""
        return cls(N=N, J=J, D=J * np.tan(2 * np.pi / N), B=B, Bprime=Bprime)


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: np.ndarray
    ground_state: QRegister
    gap: float
    degenerate: bool


def _site_op(op, k: int, N: int) -> sp.csr_matrix:
    mats = [sp.identity(2, dtype=complex, format="csr")] * N
    mats = list(mats)
    mats[k] = sp.csr_matrix(op)
    return reduce(lambda a, b: sp.kron(a, b, format="csr"), mats[::-1])


@lru_cache(maxsize=4)
def _spin_ops(N: int) -> tuple:
    return tuple(tuple(_site_op(op, k, N) for op in SPIN) for k in range(N))


def build_hamiltonian(p: HamiltonianParams) -> DenseOperator:
    N = p.N
    if N > MAX_ED_SITES:
        raise ValueError(f"dense ED limited to {MAX_ED_SITES} sites, got {N}")
    s = _spin_ops(N)
    h = sp.csr_matrix((2**N, 2**N), dtype=complex)
    for n in range(N):
        a, b = s[n], s[(n + 1) % N]
        h = h - p.J * (a[0] @ b[0] + a[1] @ b[1] + a[2] @ b[2])
        h = h + p.D * (a[0] @ b[1] - a[1] @ b[0])
        h = h + p.B * a[2]
    h = h + p.Bprime * s[0][0]
    return DenseOperator(h.toarray(), N)


def total_sz(N: int) -> np.ndarray:
    n_down = np.array([bin(i).count("1") for i in range(2**N)])
    return np.diag(N / 2 - n_down).astype(complex)


def fix_gauge(vec: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the largest-magnitude amplitude is real positive."""
    k = int(np.argmax(np.abs(vec)))
    return vec * np.exp(-1j * np.angle(vec[k]))


def ground_state(p: HamiltonianParams, n_levels: int | None = 2) -> SpectrumResult:
    """Lowest eigenpair by dense diagonalization.

    Only the ``n_levels`` lowest eigenvalues are computed (LAPACK MRRR);
    ``n_levels=None`` returns the whole spectrum.
    """
    h = build_hamiltonian(p).matrix
    if n_levels is None:
        evals, evecs = np.linalg.eigh(h)
    else:
        top = min(max(n_levels, 2), h.shape[0]) - 1
        evals, evecs = scipy.linalg.eigh(h, subset_by_index=[0, top], driver="evr")
    gap = float(evals[1] - evals[0])
    gs = from_amplitudes((2,) * p.N, fix_gauge(evecs[:, 0]))
    return SpectrumResult(evals, gs, gap, gap < 1e-10)


def local_spin_texture(reg: QRegister) -> np.ndarray:
    """Array of shape (n_sites, 3) with <S^x>, <S^y>, <S^z> per site."""
    out = np.empty((reg.n_sites, 3))
    for k in range(reg.n_sites):
        rho = partial_trace(reg, [k])
        out[k] = [rho.expectation(P) / 2 for P in (X, Y, Z)]
    return out
