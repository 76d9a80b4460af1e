import itertools

import numpy as np
import pytest
from hypothesis import strategies as st

from chiralqc.operators import BlochVector
from chiralqc.qstate import from_amplitudes


def decode(index, dims):
    labels = []
    for d in dims:
        labels.append(index % d)
        index //= d
    return labels


def encode(labels, dims):
    idx, stride = 0, 1
    for lab, d in zip(labels, dims):
        idx += lab * stride
        stride *= d
    return idx


def embed_dense(mat, targets, dims):
    """Full-register matrix of an operator on ``targets``, built entry by entry."""
    dims = list(dims)
    tdims = [dims[t] for t in targets]
    D = int(np.prod(dims))
    full = np.zeros((D, D), dtype=complex)
    for col in range(D):
        lab = decode(col, dims)
        sub_in = encode([lab[t] for t in targets], tdims)
        for sub_out in range(int(np.prod(tdims))):
            amp = mat[sub_out, sub_in]
            if amp == 0:
                continue
            out = list(lab)
            for t, v in zip(targets, decode(sub_out, tdims)):
                out[t] = v
            full[encode(out, dims), col] += amp
    return full


def random_state(rng, dims):
    d = int(np.prod(dims))
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return from_amplitudes(dims, v)


def random_unitary(rng, d):
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_bloch(rng):
    v = rng.normal(size=3)
    return BlochVector.normalized(v)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


unit_vectors = (
    st.tuples(*[st.floats(-1, 1, allow_nan=False) for _ in range(3)])
    .filter(lambda v: np.linalg.norm(v) > 1e-3)
    .map(BlochVector.normalized)
)

seeds = st.integers(0, 2**32 - 1)

all_trios = lambda n: list(itertools.permutations(range(n), 3))  # noqa: E731


def pytest_terminal_summary(terminalreporter):
    lines = [
        value
        for key in ("passed", "failed")
        for rep in terminalreporter.stats.get(key, [])
        if rep.when == "call"
        for name, value in rep.user_properties
        if name == "criterion"
    ]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
