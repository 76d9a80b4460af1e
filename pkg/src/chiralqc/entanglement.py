"""Tripartite entanglement diagnostics for pure states."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .qstate import QRegister, partial_trace

WITNESS_THRESHOLD = 1 / np.sqrt(3)
RADICAND_TOL = 1e-12


@dataclass(frozen=True)
class TripartitionSpec:
    blocks: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]

    def __post_init__(self):
        blocks = tuple(tuple(int(s) for s in b) for b in self.blocks)
        if len(blocks) != 3 or any(not b for b in blocks):
            raise ValueError("need exactly three nonempty blocks")
        flat = [s for b in blocks for s in b]
        if len(set(flat)) != len(flat):
            raise ValueError("blocks must be disjoint")
        object.__setattr__(self, "blocks", blocks)

    def check(self, n_sites: int) -> "TripartitionSpec":
        if sorted(s for b in self.blocks for s in b) != list(range(n_sites)):
            raise ValueError(f"blocks {self.blocks} do not cover all {n_sites} sites")
        return self

    @classmethod
    def default(cls, trio: Sequence[int], n_sites: int) -> "TripartitionSpec":
        """{trio[0]}, {trio[1]}, everything else."""
        a, b = int(trio[0]), int(trio[1])
        rest = tuple(s for s in range(n_sites) if s not in (a, b))
        return cls(((a,), (b,), rest)).check(n_sites)


def one_tangle(reg: QRegister, block: Sequence[int]) -> float:
    """2 (1 - Tr rho_A^2) for the reduced state of ``block``."""
    if not len(block):
        raise ValueError("block must be nonempty")
    return 2 * (1 - partial_trace(reg, block).purity())


def concurrence_fill(reg: QRegister, partition: TripartitionSpec) -> float:
    """Heron-type area built from the three one-tangles."""
    partition.check(reg.n_sites)
    c = [one_tangle(reg, b) for b in partition.blocks]
    q = sum(c) / 2
    radicand = 16 / 3 * q * (q - c[0]) * (q - c[1]) * (q - c[2])
    if radicand < 0:
        if radicand < -RADICAND_TOL:
            raise ArithmeticError(f"negative concurrence-fill radicand {radicand!r}")
        radicand = 0.0
    return float(radicand**0.25)


def witness_check(chi_estimate: float) -> bool:
    """True iff |chi| strictly exceeds 1/sqrt(3)."""
    return bool(abs(chi_estimate) > WITNESS_THRESHOLD)
