"""Scalar spin chirality on a spin-1/2 trio and its classical counterparts.

The chirality operator is normalized as (4/sqrt(3)) S_1 . (S_2 x S_3) so its
spectrum is {-1, 0, +1}. All 8x8 matrices follow the register convention:
the first trio site is the fastest-varying index.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache, reduce
from itertools import permutations

import numpy as np

from .qstate import DenseOperator

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {"I": I2, "X": X, "Y": Y, "Z": Z}
SPIN = (X / 2, Y / 2, Z / 2)

TWO_PI_THIRDS = 2 * np.pi / 3


def kron_sites(mats) -> np.ndarray:
    """Tensor product with ``mats[0]`` on the fastest-varying site."""
    return reduce(np.kron, list(mats)[::-1])


def _levi_civita(a: int, b: int, c: int) -> int:
    return int(np.sign((b - a) * (c - b) * (c - a)))


@dataclass(frozen=True)
class PauliString:
    coefficient: float
    letters: str
    sites: tuple[int, ...] = (0, 1, 2)

    def __post_init__(self):
        if len(self.letters) != len(self.sites):
            raise ValueError("one Pauli letter per site required")
        if any(ch not in PAULI for ch in self.letters):
            raise ValueError(f"invalid Pauli letters {self.letters!r}")
        if not np.isfinite(self.coefficient):
            raise ValueError("coefficient must be finite")

    def matrix(self) -> np.ndarray:
        """Unweighted tensor product of the letters (no coefficient)."""
        return kron_sites(PAULI[ch] for ch in self.letters)


@lru_cache(maxsize=None)
def _chirality() -> np.ndarray:
    chi = np.zeros((8, 8), dtype=complex)
    for a, b, c in permutations(range(3)):
        chi += _levi_civita(a, b, c) * kron_sites([SPIN[a], SPIN[b], SPIN[c]])
    chi *= 4 / np.sqrt(3)
    chi.setflags(write=False)
    return chi


def chirality_matrix() -> DenseOperator:
    """(4/sqrt(3)) S_1 . (S_2 x S_3) assembled from spin matrices."""
    return DenseOperator(_chirality(), 3)


def chirality_pauli_expansion() -> list[PauliString]:
    c = 1 / (2 * np.sqrt(3))
    return [
        PauliString(c, "XYZ"),
        PauliString(c, "YZX"),
        PauliString(c, "ZXY"),
        PauliString(-c, "XZY"),
        PauliString(-c, "YXZ"),
        PauliString(-c, "ZYX"),
    ]


def exp_chirality(tau: float) -> DenseOperator:
    """exp(-i tau chi) from the closed form valid because chi^3 = chi."""
    if not np.isfinite(tau):
        raise ValueError("tau must be finite")
    chi = _chirality()
    u = np.eye(8) + (np.cos(tau) - 1) * (chi @ chi) - 1j * np.sin(tau) * chi
    return DenseOperator(u, 3)


def cyclic_permutation() -> DenseOperator:
    """Permutation moving the state of trio site k onto site k+1 (mod 3).

    In this direction |up,down,down> -> |down,up,down>, and the matrix equals
    ``exp_chirality(2*pi/3)`` exactly.
    """
    p = np.zeros((8, 8))
    for i in range(8):
        b = [(i >> k) & 1 for k in range(3)]
        moved = [b[2], b[0], b[1]]
        p[sum(bit << k for k, bit in enumerate(moved)), i] = 1
    return DenseOperator(p, 3)


def site_permutation(order) -> np.ndarray:
    """Matrix sending the content of site k to site ``order[k]`` on n qubits."""
    n = len(order)
    p = np.zeros((2**n, 2**n))
    for i in range(2**n):
        j = 0
        for k in range(n):
            j |= ((i >> k) & 1) << order[k]
        p[j, i] = 1
    return p


@dataclass(frozen=True)
class BlochVector:
    nx: float
    ny: float
    nz: float
    spin: float = 0.5

    def __post_init__(self):
        if abs(np.linalg.norm(self.vector) - 1.0) > 1e-12:
            raise ValueError(f"Bloch vector must have unit length, got {self.vector}")

    @classmethod
    def from_angles(cls, theta: float, phi: float, spin: float = 0.5) -> "BlochVector":
        st = np.sin(theta)
        return cls(st * np.cos(phi), st * np.sin(phi), np.cos(theta), spin)

    @classmethod
    def normalized(cls, v, spin: float = 0.5) -> "BlochVector":
        v = np.asarray(v, dtype=float)
        v = v / np.linalg.norm(v)
        return cls(*v, spin=spin)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.nx, self.ny, self.nz])

    def ket(self) -> np.ndarray:
        """Spin-1/2 state (cos(theta/2), e^{i phi} sin(theta/2))."""
        theta = np.arctan2(np.hypot(self.nx, self.ny), self.nz)
        phi = np.arctan2(self.ny, self.nx)
        return np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])


def classical_chirality(a: BlochVector, b: BlochVector, c: BlochVector) -> float:
    """S^3 n_a . (n_b x n_c), with S taken from ``a``."""
    return float(a.spin**3 * np.dot(a.vector, np.cross(b.vector, c.vector)))


def bargmann_invariant(a: BlochVector, b: BlochVector, c: BlochVector) -> complex:
    ka, kb, kc = a.ket(), b.ket(), c.ket()
    return complex(np.vdot(ka, kb) * np.vdot(kb, kc) * np.vdot(kc, ka))


def bargmann_chirality(a: BlochVector, b: BlochVector, c: BlochVector) -> float:
    return float(2 / np.sqrt(3) * bargmann_invariant(a, b, c).imag)
