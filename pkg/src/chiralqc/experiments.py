"""Sweeps behind the spin-wave and spiral-ring chirality figures.

Each row is computed from its own RNG substream ``(seed, row_index)`` so rows
do not depend on evaluation order.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .entanglement import TripartitionSpec, concurrence_fill, witness_check
from .hamiltonian import HamiltonianParams, ground_state, local_spin_texture
from .operators import chirality_matrix
from .protocols import chirality_from_hadamard, hadamard_test
from .qstate import expectation, stream
from .states import SiteTrio, max_spin_wave_chirality, spin_wave

DEFAULT_SHOTS = 10_000


@dataclass(frozen=True)
class Figure2Config:
    n_min: int = 3
    n_max: int = 10
    shots: int = DEFAULT_SHOTS
    seed: int = 0

    def __post_init__(self):
        if not 3 <= self.n_min <= self.n_max <= 12:
            raise ValueError(f"need 3 <= n_min <= n_max <= 12, got {self.n_min}..{self.n_max}")
        if self.shots <= 0:
            raise ValueError("shots must be positive")


@dataclass(frozen=True)
class Figure3Config:
    n: int = 10
    j: float = 1.0
    bprime: float = -0.1
    b_start: float = 0.0
    b_end: float = 1.0
    b_steps: int = 21
    sites: tuple[int, int, int] = (1, 4, 9)  # 1-based
    shots: int = DEFAULT_SHOTS
    seed: int = 0

    def __post_init__(self):
        if not 3 <= self.n <= 12:
            raise ValueError(f"ring size must be in [3, 12], got {self.n}")
        if self.b_steps < 1:
            raise ValueError("b_steps must be >= 1")
        if self.shots <= 0:
            raise ValueError("shots must be positive")
        SiteTrio.from_one_based(self.sites).check(self.n)

    @property
    def b_grid(self) -> np.ndarray:
        return np.linspace(self.b_start, self.b_end, self.b_steps)


FIGURE2_COLUMNS = [
    "N", "m", "n1", "n2", "n3", "analytic_max", "exact", "estimate", "std_error",
    "shots", "concurrence_fill", "witness",
]


def figure2_row(N: int, shots: int, seed: int) -> dict:
    value, spec, trio = max_spin_wave_chirality(N)
    reg = spin_wave(spec)
    exact = expectation(reg, chirality_matrix(), trio.sites)
    rep = chirality_from_hadamard(hadamard_test(reg, trio, "Y", shots, stream(seed, N)))
    fill = concurrence_fill(reg, TripartitionSpec.default(trio.sites, N))
    n1, n2, n3 = trio.one_based()
    return {
        "N": N, "m": spec.m, "n1": n1, "n2": n2, "n3": n3,
        "analytic_max": value, "exact": exact,
        "estimate": rep.estimate, "std_error": rep.std_error, "shots": rep.shots,
        "concurrence_fill": fill, "witness": witness_check(exact),
    }


def figure2(cfg: Figure2Config) -> list[dict]:
    return [figure2_row(N, cfg.shots, cfg.seed) for N in range(cfg.n_min, cfg.n_max + 1)]


def figure3_columns(n: int) -> list[str]:
    cols = ["B", "exact", "estimate", "std_error", "shots", "gap", "degenerate"]
    for k in range(1, n + 1):
        cols += [f"sx_{k}", f"sy_{k}", f"sz_{k}"]
    return cols


def figure3_point(cfg: Figure3Config, index: int, B: float) -> dict:
    p = HamiltonianParams.spiral(N=cfg.n, J=cfg.j, B=float(B), Bprime=cfg.bprime)
    spec = ground_state(p)
    trio = SiteTrio.from_one_based(cfg.sites)
    gs = spec.ground_state
    exact = expectation(gs, chirality_matrix(), trio.sites)
    rep = chirality_from_hadamard(hadamard_test(gs, trio, "Y", cfg.shots, stream(cfg.seed, index)))
    row = {
        "B": float(B), "exact": exact, "estimate": rep.estimate, "std_error": rep.std_error,
        "shots": rep.shots, "gap": spec.gap, "degenerate": spec.degenerate,
    }
    for k, (sx, sy, sz) in enumerate(local_spin_texture(gs), start=1):
        row[f"sx_{k}"], row[f"sy_{k}"], row[f"sz_{k}"] = sx, sy, sz
    return row


def figure3(cfg: Figure3Config) -> list[dict]:
    return [figure3_point(cfg, i, B) for i, B in enumerate(cfg.b_grid)]


def exact_chirality_sweep(bs: Sequence[float], N: int = 10, trio=(0, 3, 8), **kw) -> np.ndarray:
    """Exact ground-state chirality over a field grid (no sampling)."""
    chi = chirality_matrix()
    return np.array([
        expectation(ground_state(HamiltonianParams.spiral(N=N, B=float(B), **kw)).ground_state, chi, trio)
        for B in bs
    ])
