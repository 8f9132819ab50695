import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from semicircle_lab.ensemble import EnsembleSpec, build_profile
from semicircle_lab.laws import EntryLaw
from semicircle_lab.spectra import (
    StepMeasure,
    eigenvalues,
    esd,
    householder_tridiagonal,
    mean_esd,
    reference_eigenvalues,
    trial_eigenvalues,
)

finite = st.floats(-5, 5, allow_nan=False)


@given(hnp.arrays(float, st.tuples(st.integers(1, 9), st.integers(1, 9)).map(lambda t: (t[0], t[0])),
                  elements=finite))
@settings(max_examples=80)
def test_reference_solver_matches_lapack_real(a):
    m = (a + a.T) / 2
    ref = reference_eigenvalues(m)
    scale = max(1.0, np.abs(m).max())
    assert np.allclose(ref, eigenvalues(m), atol=1e-10 * scale * len(m), rtol=0)


@given(st.integers(1, 7), st.integers(0, 10 ** 6))
@settings(max_examples=40)
def test_reference_solver_matches_lapack_complex(n, seed):
    r = np.random.default_rng(seed)
    a = r.normal(size=(n, n)) + 1j * r.normal(size=(n, n))
    m = (a + a.conj().T) / 2
    assert np.allclose(reference_eigenvalues(m), eigenvalues(m), atol=1e-10, rtol=0)


def test_householder_preserves_spectrum_and_shape():
    r = np.random.default_rng(0)
    a = r.normal(size=(12, 12))
    m = a + a.T
    d, e = householder_tridiagonal(m)
    t = np.diag(d) + np.diag(e[1:], 1) + np.diag(e[1:], -1)
    assert np.allclose(np.linalg.eigvalsh(t), np.linalg.eigvalsh(m), atol=1e-10)
    assert e[0] == 0


def test_known_spectra():
    assert np.allclose(eigenvalues(np.diag([3.0, -1.0, 2.0])), [3, 2, -1])
    assert np.allclose(reference_eigenvalues(np.array([[0.0, 1.0], [1.0, 0.0]])), [1, -1])
    # path graph on 5 vertices: 2 cos(k pi / 6)
    p = np.diag(np.ones(4), 1) + np.diag(np.ones(4), -1)
    want = 2 * np.cos(np.arange(1, 6) * np.pi / 6)
    assert np.allclose(reference_eigenvalues(p), want)
    assert np.allclose(eigenvalues(p), want)


def test_non_hermitian_rejected():
    with pytest.raises(ValueError):
        eigenvalues(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        eigenvalues(np.ones((2, 3)))


def test_step_measure_basics(tmp_path):
    m = StepMeasure.from_samples([1.0, -1.0, 1.0, 0.5])
    assert np.array_equal(m.atoms, [-1.0, 0.5, 1.0])
    assert np.allclose(m.weights, [0.25, 0.25, 0.5])
    assert m.cdf(1.0) == 1.0 and m.cdf_left(1.0) == 0.5
    assert m.cdf(-2) == 0.0 and m.cdf(0.5) == 0.5 and m.cdf_left(0.5) == 0.25
    assert StepMeasure.from_json(json.loads(json.dumps(m.to_json()))).to_rows() == m.to_rows()
    m.write_csv(tmp_path / "m.csv")
    assert (tmp_path / "m.csv").read_text().splitlines()[0] == "atom,weight"
    with pytest.raises(ValueError):
        StepMeasure([1.0, 0.0], [0.5, 0.5])
    with pytest.raises(ValueError):
        StepMeasure([0.0, 1.0], [0.5, 0.6])


@given(st.lists(st.floats(-10, 10), min_size=1, max_size=50))
def test_esd_is_probability_measure(vals):
    m = esd(vals)
    assert abs(m.weights.sum() - 1) < 1e-12
    assert m.cdf(m.atoms[-1]) == 1.0
    x = np.linspace(-11, 11, 50)
    assert np.all(np.diff(m.cdf(x)) >= 0)


def test_mean_esd_is_mixture_of_trials():
    spec = EnsembleSpec(build_profile("uniform", 30), EntryLaw("gaussian"), seed=4)
    eigs = trial_eigenvalues(spec, 5)
    mu = mean_esd(spec, 5, eigs=eigs)
    x = np.linspace(-3, 3, 101)
    mixture = np.mean([esd(e).cdf(x) for e in eigs], axis=0)
    assert np.allclose(mu.cdf(x), mixture, atol=1e-14)


def test_trial_eigenvalues_independent_of_workers():
    spec = EnsembleSpec(build_profile("block", 40), EntryLaw("rademacher", field="complex"), seed=9)
    one = trial_eigenvalues(spec, 6, workers=1)
    four = trial_eigenvalues(spec, 6, workers=4)
    assert all(np.array_equal(a, b) for a, b in zip(one, four))


def test_wigner_spectrum_near_semicircle_support():
    spec = EnsembleSpec(build_profile("uniform", 400), EntryLaw("gaussian"), seed=1)
    e = eigenvalues(__import__("semicircle_lab").sample_matrix(spec, 0))
    assert -2.2 < e.min() and e.max() < 2.2
    assert np.mean(e ** 2) == pytest.approx(1.0, abs=0.02)


@pytest.mark.parametrize("seed", range(5))
def test_trace_identities(seed):
    r = np.random.default_rng(seed)
    a = r.normal(size=(5, 5)) + 1j * r.normal(size=(5, 5))
    m = (a + a.conj().T) / 2
    lam = eigenvalues(m)
    assert np.all(np.diff(lam) <= 0)
    assert np.sum(lam ** 2) == pytest.approx(np.sum(np.abs(m) ** 2), rel=1e-10)
    norm = np.abs(lam).max()
    for k in range(1, 9):
        tr = np.trace(np.linalg.matrix_power(m, k)).real
        assert abs(np.sum(lam ** k) - tr) <= 1e-7 * 5 * norm ** k


def test_gershgorin_and_esd_examples():
    spec = EnsembleSpec(build_profile("checkerboard", 50), EntryLaw("rademacher"), seed=6)
    w = __import__("semicircle_lab").sample_matrix(spec, 0)
    lam = eigenvalues(w)
    assert np.abs(lam).max() <= np.abs(w).sum(axis=1).max() + 1e-12
    assert esd([1.0, 1.0]).to_rows() == [(1.0, 1.0)]
    m = esd([2.0, -2.0])
    assert list(m.atoms) == [-2.0, 2.0] and list(m.weights) == [0.5, 0.5]


def test_mean_esd_examples():
    zero = EnsembleSpec(build_profile("uniform", 7), EntryLaw("zero"))
    assert mean_esd(zero, 3).to_rows() == [(0.0, 1.0)]
    spec = EnsembleSpec(build_profile("uniform", 200), EntryLaw("rademacher"), seed=3)
    one = mean_esd(spec, 1)
    assert one.to_rows() == esd(trial_eigenvalues(spec, 1)[0]).to_rows()
    assert abs(mean_esd(spec, 50).cdf(0.0) - 0.5) <= 0.02
