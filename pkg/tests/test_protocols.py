import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chiralqc import protocols as pr
from chiralqc.operators import chirality_matrix, exp_chirality
from chiralqc.qstate import expectation, from_amplitudes, init_basis, stream
from chiralqc.states import SiteTrio, SpinWaveSpec, all_chirality_eigenstates, chirality_eigenstate, spin_wave
from conftest import embed_dense, random_state, seeds

CHI = chirality_matrix().matrix
TRIO = SiteTrio(0, 1, 2)
SQ3 = np.sqrt(3)


def spectral_projector(lam, trio, n):
    w, v = np.linalg.eigh(CHI)
    sel = v[:, np.abs(w - lam) < 1e-9]
    return embed_dense(sel @ sel.conj().T, list(trio), [2] * n)


def overlap_u(reg, trio):
    """<psi|U|psi> with U = exp(-i 2pi/3 chi) embedded densely."""
    U = embed_dense(exp_chirality(2 * np.pi / 3).matrix, list(trio), reg.dims)
    return np.vdot(reg.amplitudes, U @ reg.amplitudes)


# -- Hadamard test ------------------------------------------------------------

def test_hadamard_exact_on_positive_eigenstate():
    reg = chirality_eigenstate(1)
    assert pr.hadamard_expectation(reg, TRIO, "Y") == pytest.approx(-SQ3 / 2, abs=1e-12)
    rec = pr.hadamard_test(reg, TRIO, "Y", 20_000, stream(1))
    assert abs(rec.outcomes.mean() + SQ3 / 2) < 5 / np.sqrt(rec.shots)


def test_hadamard_on_polarized_state():
    reg = init_basis([2] * 3, [0] * 3)
    assert pr.hadamard_expectation(reg, TRIO, "Y") == pytest.approx(0, abs=1e-15)
    assert pr.hadamard_expectation(reg, TRIO, "X") == pytest.approx(1, abs=1e-15)
    rec = pr.hadamard_test(reg, TRIO, "X", 1000, stream(2))
    assert np.all(rec.outcomes == 1)


def test_hadamard_spin_wave_n3():
    rep = pr.chirality_from_hadamard(pr.hadamard_test(spin_wave(SpinWaveSpec(3, 1)), TRIO, "Y", 10_000, stream(3)))
    assert rep.estimate == pytest.approx(1.0, abs=3 * rep.std_error)
    assert rep.std_error < 0.02


@settings(max_examples=30, deadline=None)
@given(seed=seeds, n=st.integers(3, 6), data=st.data())
def test_ancilla_expectations_are_re_and_im_of_overlap(seed, n, data):
    rng = np.random.default_rng(seed)
    reg = random_state(rng, [2] * n)
    trio = SiteTrio(*data.draw(st.permutations(range(n)))[:3])
    ov = overlap_u(reg, trio.sites)
    assert pr.hadamard_expectation(reg, trio, "X") == pytest.approx(ov.real, abs=1e-12)
    assert pr.hadamard_expectation(reg, trio, "Y") == pytest.approx(ov.imag, abs=1e-12)
    ex = pr.hadamard_exact(reg, trio)
    chi = embed_dense(CHI, list(trio.sites), [2] * n)
    assert ex["chi"] == pytest.approx(np.vdot(reg.amplitudes, chi @ reg.amplitudes).real, abs=1e-12)
    assert ex["chi2"] == pytest.approx(np.vdot(reg.amplitudes, chi @ chi @ reg.amplitudes).real, abs=1e-12)


def test_hadamard_per_shot_matches_batch(rng):
    reg = random_state(rng, [2] * 4)
    trio = SiteTrio(3, 0, 2)
    a = pr.hadamard_test(reg, trio, "Y", 300, stream(9, 1))
    b = pr.hadamard_test(reg, trio, "Y", 300, stream(9, 1), per_shot=True)
    assert a.outcomes.tolist() == b.outcomes.tolist()


def test_hadamard_rejects_bad_input():
    reg = init_basis([2] * 3, [0] * 3)
    with pytest.raises(ValueError):
        pr.hadamard_test(reg, SiteTrio(0, 1, 3), "Y", 10, stream(0))
    with pytest.raises(ValueError):
        pr.hadamard_test(reg, TRIO, "Z", 10, stream(0))
    with pytest.raises(ValueError):
        pr.hadamard_test(init_basis([2, 2, 3], [0, 0, 0]), TRIO, "Y", 10, stream(0))


def test_chirality_from_extreme_y_record():
    rep = pr.chirality_from_hadamard(pr.ShotRecord("Y", -np.ones(50)))
    assert rep.estimate == pytest.approx(2 / SQ3)
    assert "out_of_range" in rep.flags
    assert rep.std_error == 0


def test_chirality_from_y_mean():
    outcomes = np.array([1] * 25 + [-1] * 75)  # mean -0.5
    rep = pr.chirality_from_hadamard(pr.ShotRecord("Y", outcomes))
    assert rep.estimate == pytest.approx(-2 / SQ3 * -0.5)
    assert rep.std_error == pytest.approx(2 / SQ3 * outcomes.std(ddof=1) / 10)


def test_chirality_squared_from_x_record():
    rep = pr.chirality_from_hadamard(pr.ShotRecord("X", np.ones(10)))
    assert rep.observable == "chi2"
    assert rep.estimate == 0
    with pytest.raises(ValueError):
        pr.chirality_from_hadamard(pr.ShotRecord("X", np.ones(10)), observable="chi")
    with pytest.raises(ValueError):
        pr.chirality_from_hadamard(pr.ShotRecord("computational", [0, 1]))


def test_shot_record_alphabet():
    with pytest.raises(ValueError):
        pr.ShotRecord("Y", [0, 1])
    with pytest.raises(ValueError):
        pr.ShotRecord("computational", [3])


def test_estimate_report_json():
    rep = pr.EstimateReport(0.5, 0.01, 100, "hadamard", flags=("x",))
    d = json.loads(rep.to_json())
    assert d == {"method": "hadamard", "estimate": 0.5, "std_error": 0.01, "shots": 100,
                 "observable": "chi", "flags": ["x"]}
    with pytest.raises(ValueError):
        pr.EstimateReport(0.5, -1, 100, "hadamard")
    with pytest.raises(ValueError):
        pr.EstimateReport(0.5, 0.1, 0, "direct")


def test_hadamard_unbiased():
    rng = np.random.default_rng(17)
    reg = random_state(rng, [2] * 4)
    trio = SiteTrio(0, 2, 3)
    exact = expectation(reg, CHI, trio.sites)
    reps = [pr.chirality_from_hadamard(pr.hadamard_test(reg, trio, "Y", 1000, stream(17, i))) for i in range(200)]
    est = np.array([r.estimate for r in reps])
    pooled = np.sqrt(np.mean([r.std_error**2 for r in reps]) / len(reps))
    assert abs(est.mean() - exact) < 4 * pooled


# -- direct estimator ---------------------------------------------------------

def test_direct_exact_matches_dense(rng):
    for _ in range(20):
        reg = random_state(rng, [2] * 4)
        trio = SiteTrio(*rng.permutation(4)[:3])
        assert pr.direct_exact(reg, trio) == pytest.approx(expectation(reg, CHI, trio.sites), abs=1e-12)


def test_direct_on_positive_eigenstate():
    rep = pr.direct_estimator(chirality_eigenstate(1), TRIO, 60_000, stream(4))
    assert rep.shots == 60_000 and rep.method == "direct"
    assert abs(rep.estimate - 1) < 3 * rep.std_error


def test_direct_on_polarized_state():
    rep = pr.direct_estimator(init_basis([2] * 3, [0] * 3), TRIO, 6000, stream(5))
    assert abs(rep.estimate) < 3 * rep.std_error + 1e-12


def test_direct_pads_shots():
    rep = pr.direct_estimator(chirality_eigenstate(0), TRIO, 100, stream(6))
    assert rep.shots == 102
    assert "padded" in rep.flags


@pytest.mark.parametrize("letters", ["XYZ", "ZYX", "YXZ"])
def test_string_parities_match_dense_pauli(letters, rng):
    from chiralqc.operators import PauliString

    reg = random_state(rng, [2] * 3)
    dist = pr._string_distribution(reg, (0, 1, 2), letters)
    direct = float(dist @ pr._parities(letters))
    P = PauliString(1.0, letters).matrix()
    assert direct == pytest.approx(np.vdot(reg.amplitudes, P @ reg.amplitudes).real, abs=1e-12)


# -- qutrit QPE ---------------------------------------------------------------

def test_qft3_is_unitary_and_maps_levels():
    np.testing.assert_allclose(pr.QFT3 @ pr.QFT3_INV, np.eye(3), atol=1e-15)
    np.testing.assert_allclose(pr.QFT3[:, 0], np.ones(3) / SQ3)


@pytest.mark.parametrize("lam,level", [(1, 2), (-1, 1), (0, 0)])
def test_qpe_readout_on_eigenstates(lam, level):
    for variant in ("w", "flipped"):
        rec, probs = pr.qutrit_qpe(chirality_eigenstate(lam, variant), TRIO, 1000, stream(7))
        assert rec.histogram() == {level: 1000}
        assert probs[level] == pytest.approx(1, abs=1e-12)


def test_qpe_polarized_reads_zero():
    rec, _ = pr.qutrit_qpe(init_basis([2] * 3, [0] * 3), TRIO, 500, stream(8))
    assert rec.histogram() == {0: 500}


def test_qpe_balanced_superposition():
    amps = chirality_eigenstate(1).amplitudes + chirality_eigenstate(-1).amplitudes
    reg = from_amplitudes([2] * 3, amps)
    rec, probs = pr.qutrit_qpe(reg, TRIO, 20_000, stream(9))
    np.testing.assert_allclose(probs, [0, 0.5, 0.5], atol=1e-12)
    rep = pr.chirality_from_qpe(rec)
    assert abs(rep.estimate) < 3 * rep.std_error
    assert probs[2] - probs[1] == pytest.approx(expectation(reg, CHI, [0, 1, 2]), abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=seeds, n=st.integers(3, 6), data=st.data())
def test_qpe_probabilities_are_projector_weights(seed, n, data):
    rng = np.random.default_rng(seed)
    reg = random_state(rng, [2] * n)
    trio = data.draw(st.permutations(range(n)))[:3]
    probs = pr.qpe_probabilities(reg, SiteTrio(*trio))
    assert abs(probs.sum() - 1) < 1e-12
    for level, lam in pr.QPE_EIGENVALUE.items():
        P = spectral_projector(lam, trio, n)
        assert probs[level] == pytest.approx(np.vdot(reg.amplitudes, P @ reg.amplitudes).real, abs=1e-12)
    assert probs[2] - probs[1] == pytest.approx(expectation(reg, CHI, trio), abs=1e-12)


def test_qpe_per_shot_matches_batch(rng):
    reg = random_state(rng, [2] * 4)
    a, _ = pr.qutrit_qpe(reg, SiteTrio(1, 2, 3), 200, stream(10))
    b, _ = pr.qutrit_qpe(reg, SiteTrio(1, 2, 3), 200, stream(10), per_shot=True)
    assert a.outcomes.tolist() == b.outcomes.tolist()


def test_qpe_project_eigenstate_unchanged():
    reg = chirality_eigenstate(1)
    lam, post = pr.qpe_project(reg, TRIO, stream(11))
    assert lam == 1
    assert abs(abs(np.vdot(post.amplitudes, reg.amplitudes)) - 1) < 1e-12
    lam, post = pr.qpe_project(init_basis([2] * 3, [0] * 3), TRIO, stream(11))
    assert lam == 0
    assert abs(post.amplitudes[0]) == pytest.approx(1)


def test_qpe_project_spin_wave_six():
    reg = spin_wave(SpinWaveSpec(6, 1))
    trio = (0, 1, 2)
    weights = {lam: np.vdot(reg.amplitudes, spectral_projector(lam, trio, 6) @ reg.amplitudes).real
               for lam in (-1, 0, 1)}
    counts = {-1: 0, 0: 0, 1: 0}
    M = 3000
    for i in range(M):
        lam, post = pr.qpe_project(reg, SiteTrio(*trio), stream(12, i))
        counts[lam] += 1
        if i < 30:
            target = spectral_projector(lam, trio, 6) @ reg.amplitudes
            target /= np.linalg.norm(target)
            assert abs(np.vdot(post.amplitudes, target)) > 1 - 1e-10
            chi = embed_dense(CHI, list(trio), [2] * 6)
            np.testing.assert_allclose(chi @ post.amplitudes, lam * post.amplitudes, atol=1e-10)
    for lam, w in weights.items():
        assert abs(counts[lam] / M - w) < 5 / np.sqrt(M)


# -- variance bounds and cost model -------------------------------------------

def test_variance_bounds_single_state():
    rng = np.random.default_rng(23)
    reg = random_state(rng, [2] * 4)
    trio = SiteTrio(0, 1, 3)
    R, shots = 3000, 600
    h = [pr.chirality_from_hadamard(pr.hadamard_test(reg, trio, "Y", shots, stream(23, 0, i))).estimate
         for i in range(R)]
    d = [pr.direct_estimator(reg, trio, shots, stream(23, 1, i)).estimate for i in range(R)]
    assert np.var(h, ddof=1) <= 4 / 3 / shots * 1.1
    assert np.var(d, ddof=1) <= 3 / shots * 1.1


def test_cost_model_epsilon_tenth():
    cm = pr.cost_model(0.1)
    assert (cm.direct_preps, cm.hadamard_preps) == (300, 134)
    assert (cm.direct_measurements, cm.hadamard_measurements) == (900, 134)
    assert cm.ratio_preps == Fraction(9, 4)
    assert cm.ratio_measurements == Fraction(27, 4)


def test_cost_model_small_epsilon():
    assert pr.cost_model(0.01).direct_preps == 30_000


@pytest.mark.parametrize("eps", [0, 1, 1.5, -0.1])
def test_cost_model_range(eps):
    with pytest.raises(ValueError):
        pr.cost_model(eps)


def test_all_eigenstates_listed_for_readout():
    assert len(all_chirality_eigenstates()) == 8
