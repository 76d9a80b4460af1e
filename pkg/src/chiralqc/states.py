"""Reference states: chirality eigenstates, product states and one-magnon spin waves."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Sequence

import numpy as np

from .operators import X, BlochVector, kron_sites
from .qstate import QRegister, basis_index, from_amplitudes, init_basis


@dataclass(frozen=True)
class SpinWaveSpec:
    N: int
    m: int

    def __post_init__(self):
        if self.N < 3:
            raise ValueError(f"spin waves need N >= 3, got {self.N}")
        if not 0 <= self.m < self.N:
            raise ValueError(f"mode index m={self.m} outside [0, {self.N})")

    @property
    def q(self) -> float:
        return 2 * np.pi * self.m / self.N


@dataclass(frozen=True)
class SiteTrio:
    n1: int
    n2: int
    n3: int

    def __post_init__(self):
        if len({self.n1, self.n2, self.n3}) != 3:
            raise ValueError(f"trio sites must be distinct, got {self.sites}")
        if min(self.sites) < 0:
            raise ValueError("trio sites must be nonnegative")

    @property
    def sites(self) -> tuple[int, int, int]:
        return (self.n1, self.n2, self.n3)

    def check(self, n_sites: int) -> "SiteTrio":
        if max(self.sites) >= n_sites:
            raise ValueError(f"trio {self.sites} out of range for {n_sites} sites")
        return self

    @classmethod
    def from_one_based(cls, sites: Sequence[int]) -> "SiteTrio":
        a, b, c = (int(s) - 1 for s in sites)
        return cls(a, b, c)

    def one_based(self) -> tuple[int, int, int]:
        return (self.n1 + 1, self.n2 + 1, self.n3 + 1)


def chirality_eigenstate(lam: int, variant: str = "w") -> QRegister:
    """Three-site eigenstate of the chirality with eigenvalue ``lam``.

    ``variant`` is ``"w"`` for (|udd> + w|dud> + w^2|ddu>)/sqrt(3) with
    w = exp(2 pi i lam / 3), ``"flipped"`` for its global spin flip, or
    ``"polarized"`` for |uuu> (lam must be 0).
    """
    if lam not in (-1, 0, 1):
        raise ValueError(f"eigenvalue must be -1, 0 or +1, got {lam}")
    if variant == "polarized":
        if lam != 0:
            raise ValueError("the polarized eigenstate has eigenvalue 0")
        return init_basis([2, 2, 2], [0, 0, 0])
    if variant not in ("w", "flipped"):
        raise ValueError(f"unknown variant {variant!r}")
    w = np.exp(2j * np.pi * lam / 3)
    amps = np.zeros(8, dtype=complex)
    for k in range(3):
        labels = [1, 1, 1]
        labels[k] = 0
        amps[basis_index([2, 2, 2], labels)] = w**k
    if variant == "flipped":
        amps = kron_sites([X, X, X]) @ amps
    return from_amplitudes([2, 2, 2], amps)


def all_chirality_eigenstates() -> list[tuple[int, QRegister]]:
    """The eight-member eigenbasis: W-like and flipped states, |uuu>, |ddd>."""
    out = [(lam, chirality_eigenstate(lam, v)) for v in ("w", "flipped") for lam in (-1, 0, 1)]
    out.append((0, chirality_eigenstate(0, "polarized")))
    out.append((0, init_basis([2, 2, 2], [1, 1, 1])))
    return out


def product_state(bloch: Sequence[BlochVector]) -> QRegister:
    if not bloch:
        raise ValueError("need at least one Bloch vector")
    return from_amplitudes([2] * len(bloch), kron_sites([b.ket() for b in bloch]))


def spin_wave(spec: SpinWaveSpec) -> QRegister:
    """One-magnon state: the basis state with site n down has amplitude e^{iqn}/sqrt(N)."""
    N = spec.N
    amps = np.zeros(2**N, dtype=complex)
    n = np.arange(N)
    amps[1 << n] = np.exp(1j * spec.q * n) / np.sqrt(N)
    return QRegister((2,) * N, amps)


def spin_wave_chirality(spec: SpinWaveSpec, trio: SiteTrio) -> float:
    """Closed-form chirality of a spin wave on a trio (plain site differences)."""
    trio.check(spec.N)
    n1, n2, n3 = trio.sites
    q = spec.q
    s = np.sin(q * (n2 - n1)) + np.sin(q * (n3 - n2)) + np.sin(q * (n1 - n3))
    return float(2 * s / (spec.N * np.sqrt(3)))


def max_spin_wave_chirality(N: int) -> tuple[float, SpinWaveSpec, SiteTrio]:
    """Exhaustive maximum over all modes and ordered trios.

    Ties (within 1e-12) go to the lexicographically smallest (m, n1, n2, n3).
    """
    if not 3 <= N <= 16:
        raise ValueError(f"N must be in [3, 16], got {N}")
    trios = np.array(list(permutations(range(N), 3)))
    d21 = trios[:, 1] - trios[:, 0]
    d32 = trios[:, 2] - trios[:, 1]
    d13 = trios[:, 0] - trios[:, 2]
    q = 2 * np.pi * np.arange(N) / N
    vals = 2 * (np.sin(np.outer(q, d21)) + np.sin(np.outer(q, d32)) + np.sin(np.outer(q, d13))) / (N * np.sqrt(3))
    best = vals.max()
    # row-major flat order is (m, trio) lexicographic since permutations() is sorted
    flat = int(np.flatnonzero(vals.ravel() >= best - 1e-12)[0])
    m, t = divmod(flat, len(trios))
    spec, trio = SpinWaveSpec(N, m), SiteTrio(*map(int, trios[t]))
    return spin_wave_chirality(spec, trio), spec, trio
