import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semicircle_lab.concentration import (
    BoundCheck,
    PiecewiseLinear,
    bernstein_bound,
    concentration_bound,
    exceedance_probabilities,
    levy_perturbation_check,
    numerical_rank,
    rank_bound_check,
    spectral_concentration_experiment,
    truncation_survival_experiment,
    write_rows_csv,
)
from semicircle_lab.ensemble import EnsembleSpec, build_profile, heavy_tail_profile, upper_row
from semicircle_lab.laws import EntryLaw


def sym(r, n, complex_=False):
    a = r.normal(size=(n, n))
    if complex_:
        a = a + 1j * r.normal(size=(n, n))
    return (a + a.conj().T) / 2


def test_bound_check_slack():
    assert BoundCheck(1.0, 1.0 - 5e-13).satisfied
    assert not BoundCheck(1.0, 1.0 - 5e-12).satisfied


def test_rank_check_examples():
    a = sym(np.random.default_rng(0), 6)
    c = rank_bound_check(a, a)
    assert c.lhs == 0.0 and c.rhs == 0.0 and c.satisfied
    b = np.zeros((10, 10))
    b[0, 0] = 1.0
    c = rank_bound_check(np.zeros((10, 10)), b)
    assert c.lhs == pytest.approx(0.1) and c.rhs == pytest.approx(0.1) and c.satisfied
    with pytest.raises(ValueError):
        rank_bound_check(np.zeros((2, 2)), np.zeros((3, 3)))


@pytest.mark.parametrize("seed", range(100))
def test_rank_two_perturbation(seed):
    r = np.random.default_rng(seed)
    n = int(r.integers(4, 30))
    a = sym(r, n, complex_=bool(seed % 2))
    # orthonormal directions and eigenvalues of size about 1, well above the
    # rounding left by forming (a + p) - a
    u = np.linalg.qr(r.normal(size=(n, 2)))[0]
    p = u @ np.diag(r.choice([-1, 1], 2) * r.uniform(0.5, 2.0, 2)) @ u.T
    assert numerical_rank(p) == 2
    c = rank_bound_check(a, a + p)
    assert c.rhs == 2 / n and c.lhs <= 2 / n + 1e-12


def test_numerical_rank():
    assert numerical_rank(np.zeros((4, 4))) == 0
    assert numerical_rank(np.eye(5)) == 5
    v = np.arange(1.0, 6.0)
    assert numerical_rank(np.outer(v, v)) == 1


def test_levy_check_examples():
    a = sym(np.random.default_rng(1), 5)
    c = levy_perturbation_check(a, a)
    assert c.lhs == 0.0 and c.rhs == 0.0
    n, eps = 10, 0.5
    z = np.zeros((n, n))
    # every eigenvalue moves by eps / sqrt(n)
    c = levy_perturbation_check(z, eps / math.sqrt(n) * np.eye(n))
    assert c.context["levy"] == pytest.approx(eps / math.sqrt(n), abs=1e-9)
    assert c.rhs == pytest.approx(eps ** 2 / n) and c.satisfied
    # the unscaled shift eps * I: Levy distance eps, right side eps^2
    c = levy_perturbation_check(z, eps * np.eye(n))
    assert c.context["levy"] == pytest.approx(eps, abs=1e-9)
    assert c.rhs == pytest.approx(eps ** 2) and c.satisfied


@given(st.integers(1, 12), st.integers(0, 2 ** 32 - 1), st.floats(1e-4, 3.0))
@settings(max_examples=60, deadline=None)
def test_inequalities_hold_on_random_pairs(n, seed, size):
    r = np.random.default_rng(seed)
    a = sym(r, n, complex_=seed % 2 == 1)
    b = a + size * sym(r, n)
    assert rank_bound_check(a, b).satisfied
    assert levy_perturbation_check(a, b).satisfied


def test_bernstein_values():
    assert bernstein_bound(2.0, 1.0) == pytest.approx(math.exp(-4 / 6), rel=1e-15)
    assert bernstein_bound(1e-12, 1.0) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        bernstein_bound(0.0, 1.0)
    with pytest.raises(ValueError):
        bernstein_bound(1.0, -1.0)


@given(st.floats(1e-3, 100), st.floats(1e-3, 100), st.floats(0, 100))
def test_bernstein_decreases_in_x(x, dx, s2):
    assert bernstein_bound(x + dx, s2) <= bernstein_bound(x, s2)


def test_concentration_bound_value():
    assert concentration_bound(200, 0.1) == pytest.approx(2 * math.exp(-1), rel=1e-15)


def test_piecewise_linear():
    f = PiecewiseLinear([(0.1, 1.0), (-0.1, 0.0)])
    assert f.total_variation == 1.0
    assert f(-5) == 0.0 and f(5) == 1.0 and f(0.0) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        PiecewiseLinear([])
    with pytest.raises(ValueError):
        PiecewiseLinear([(0, 0), (0, 1)])


def test_spectral_experiment_constant_and_tv_guard():
    spec = EnsembleSpec(build_profile("uniform", 20), EntryLaw("rademacher"), seed=3)
    res = spectral_concentration_experiment(spec, [(0.0, 0.3)], [1e-9, 0.1], trials=5)
    assert all(r.empirical == 0.0 for r in res.rows)
    with pytest.raises(ValueError):
        spectral_concentration_experiment(spec, [(0, 0), (1, 2)], [0.1], trials=2)


def test_spectral_experiment_small_run():
    spec = EnsembleSpec(build_profile("uniform", 60), EntryLaw("rademacher"), seed=4)
    res = spectral_concentration_experiment(spec, [(-0.1, 0.0), (0.1, 1.0)], [0.02, 0.05, 0.1], trials=40)
    assert res.n == 60 and res.trials == 40
    assert all(r.satisfied for r in res.rows)
    assert 0 < res.single_vs_mean_ks < 0.5
    freqs = [r.empirical for r in res.rows]
    assert freqs == sorted(freqs, reverse=True)


def test_exceedance_pair_counts():
    spec = EnsembleSpec(build_profile("block", 7), EntryLaw("gaussian"))
    off, dia, counts = exceedance_probabilities(spec, 0.1)
    assert counts.sum() == 7 * 6 / 2
    s = np.sqrt(spec.profile.sigma2)
    want = sum(spec.law.tail_probability(0.1, scale=s[i, j]) for i in range(7) for j in range(i + 1, 7))
    assert (off * counts).sum() == pytest.approx(want, rel=1e-12)
    assert dia.shape == (7,)


def test_survival_count_zero_for_small_bounded_entries():
    spec = EnsembleSpec(build_profile("uniform", 50), EntryLaw("rademacher"), seed=1)
    rows = truncation_survival_experiment(spec, eta=0.5, trials=3)
    assert all(r.empirical == 0.0 and r.satisfied for r in rows)
    with pytest.raises(ValueError):
        truncation_survival_experiment(spec, 0.5, trials=0)


def test_survival_matches_direct_count():
    spec = EnsembleSpec(heavy_tail_profile(60), EntryLaw("heavy_tail_cubic"), seed=2)
    eta = 0.2
    rows = truncation_survival_experiment(spec, eta, trials=20, eps_grid=[0.05, 0.1])
    counts = np.array([sum(np.count_nonzero(np.abs(upper_row(spec, t, i)) > eta) for i in range(60))
                       for t in range(20)])
    for r in rows:
        assert r.empirical == np.mean(counts >= r.eps * 60)
        assert r.satisfied
        assert 0 < r.bound <= 1


def test_write_rows_csv(tmp_path):
    spec = EnsembleSpec(build_profile("uniform", 30), EntryLaw("rademacher"))
    rows = truncation_survival_experiment(spec, 0.5, 2, eps_grid=[0.1])
    write_rows_csv(tmp_path / "s.csv", rows)
    head = (tmp_path / "s.csv").read_text().splitlines()[0]
    assert head.startswith("eps,threshold,empirical")
    with pytest.raises(ValueError):
        write_rows_csv(tmp_path / "x.csv", [])
