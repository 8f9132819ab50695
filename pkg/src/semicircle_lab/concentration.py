"""Matrix inequalities and Monte Carlo concentration experiments.

The deterministic checks compare the two sides of an inequality for a given
pair of Hermitian matrices.  The experiments estimate a probability by Monte
Carlo and compare it with the corresponding tail bound, allowing three
standard errors of slack.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .ensemble import upper_row
from .metrics import kolmogorov_distance, levy_distance
from .spectra import _check_hermitian, eigenvalues, esd, mean_esd, trial_eigenvalues

SLACK = 1e-12


@dataclass
class BoundCheck:
    lhs: float
    rhs: float
    context: dict = field(default_factory=dict)

    @property
    def satisfied(self):
        return bool(self.lhs <= self.rhs + SLACK)


def _pair(a, b):
    a, b = _check_hermitian(a), _check_hermitian(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a, b


def numerical_rank(m):
    """Number of singular values above ``n * eps * max singular value``."""
    s = np.linalg.svd(m, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > len(m) * np.finfo(float).eps * s[0]))


def rank_bound_check(a, b):
    """Kolmogorov distance of the two ESDs against ``rank(A - B) / n``."""
    a, b = _pair(a, b)
    n = len(a)
    lhs = kolmogorov_distance(esd(eigenvalues(a)), esd(eigenvalues(b)))
    r = numerical_rank(a - b)
    return BoundCheck(lhs, r / n, {"rank": r, "n": n})


def levy_perturbation_check(a, b, tol=1e-10):
    """Cube of the Levy distance of the ESDs against ``(1/n) tr (A - B)^2``.

    The Levy distance is the bisection's upper end, so the left side is never
    underestimated.
    """
    a, b = _pair(a, b)
    n = len(a)
    L = levy_distance(esd(eigenvalues(a)), esd(eigenvalues(b)), tol=tol)
    d = a - b
    rhs = float(np.sum(np.abs(d) ** 2)) / n
    return BoundCheck(L ** 3, rhs, {"levy": L, "n": n})


def bernstein_bound(x, s2):
    """``exp(-x^2 / (2 (s2 + x)))``, a tail bound for a sum of centered
    variables bounded by 1 with total variance ``s2``."""
    if not x > 0:
        raise ValueError("x must be positive")
    if s2 < 0:
        raise ValueError("s2 must be nonnegative")
    return math.exp(-x * x / (2.0 * (s2 + x)))


def _mc_check(freq, bound, trials, **context):
    se = math.sqrt(freq * (1.0 - freq) / trials)
    return BoundCheck(freq, bound + 3.0 * se, dict(context, se=se, bound=bound))


# -- truncation survival -----------------------------------------------------------

@dataclass
class SurvivalRow:
    eps: float
    threshold: float
    empirical: float
    se: float
    bound: float
    simple_bound: float
    simple_applicable: bool
    satisfied: bool


def exceedance_probabilities(spec, eta):
    """``P(|w_ij| > eta)`` for every entry on or above the diagonal (flattened)."""
    law, diag_law = spec.law, spec.law.real_version()
    prof = spec.profile
    off = law.tail_probability(eta, scale=law.scale * np.sqrt(prof.block))
    dia = diag_law.tail_probability(eta, scale=law.scale * np.sqrt(prof.diag))
    sizes = prof.class_sizes
    # pairs i < j in classes (a, b): sizes[a] * sizes[b] off the diagonal block,
    # sizes[a] choose 2 on it
    pair_counts = np.outer(sizes, sizes).astype(float)
    np.fill_diagonal(pair_counts, sizes * (sizes - 1) / 2.0)
    pair_counts = np.triu(pair_counts)
    return off, dia, pair_counts


def truncation_survival_experiment(spec, eta, trials, eps_grid=(0.01, 0.02, 0.05, 0.1, 0.2)):
    """How often at least ``eps * n`` upper-triangle entries exceed ``eta``.

    Returns
    -------
    list of SurvivalRow
        The empirical frequency over ``trials`` draws, the Bernstein bound for
        the centered count (1 when the threshold does not exceed the mean),
        and the simplified bound ``exp(-eps n / 8)``.  The simplified bound is
        implied by Bernstein whenever the expected count is at most
        ``eps n / 2``, flagged as ``simple_applicable``.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    n = spec.n
    off, dia, pair_counts = exceedance_probabilities(spec, eta)
    mean = float((off * pair_counts).sum() + dia.sum())
    var = float((off * (1 - off) * pair_counts).sum() + (dia * (1 - dia)).sum())
    counts = np.empty(trials, dtype=np.int64)
    for t in range(trials):
        counts[t] = sum(int(np.count_nonzero(np.abs(upper_row(spec, t, i)) > eta)) for i in range(n))
    rows = []
    for eps in eps_grid:
        thr = eps * n
        freq = float(np.mean(counts >= thr))
        x = thr - mean
        bound = bernstein_bound(x, var) if x > 0 else 1.0
        check = _mc_check(freq, bound, trials)
        rows.append(SurvivalRow(
            eps=float(eps), threshold=thr, empirical=freq, se=check.context["se"], bound=bound,
            simple_bound=math.exp(-thr / 8.0), simple_applicable=mean <= thr / 2.0,
            satisfied=check.satisfied,
        ))
    return rows


# -- spectral concentration --------------------------------------------------------

class PiecewiseLinear:
    """Continuous piecewise-linear function, constant outside its breakpoints."""

    def __init__(self, breakpoints):
        pts = sorted((float(x), float(y)) for x, y in breakpoints)
        if not pts:
            raise ValueError("need at least one breakpoint")
        xs = [p[0] for p in pts]
        if len(set(xs)) != len(xs):
            raise ValueError("breakpoint abscissae must be distinct")
        self.x = np.array(xs)
        self.y = np.array([p[1] for p in pts])

    @property
    def total_variation(self):
        return float(np.abs(np.diff(self.y)).sum())

    def __call__(self, v):
        return np.interp(v, self.x, self.y)


@dataclass
class ConcentrationRow:
    t: float
    empirical: float
    se: float
    bound: float
    satisfied: bool


@dataclass
class ConcentrationResult:
    n: int
    trials: int
    rows: list
    single_vs_mean_ks: float


def concentration_bound(n, t):
    return 2.0 * math.exp(-n * t * t / 2.0)


def spectral_concentration_experiment(spec, breakpoints, t_grid, trials, workers=1, eigs=None):
    """Deviations of ``integral f d mu_W`` from their Monte Carlo mean.

    ``f`` has total variation at most 1; the deviation probability at level
    ``t`` is compared with ``2 exp(-n t^2 / 2)``.  The mean over the trials
    stands in for the expectation.  Also reports the Kolmogorov distance of
    the first draw's ESD to the pooled mean ESD.
    """
    f = PiecewiseLinear(breakpoints)
    if f.total_variation > 1.0 + 1e-12:
        raise ValueError(f"total variation {f.total_variation} exceeds 1")
    if eigs is None:
        eigs = trial_eigenvalues(spec, trials, workers)
    n = spec.n
    integrals = np.array([math.fsum(f(e).tolist()) / n for e in eigs])
    dev = np.abs(integrals - math.fsum(integrals.tolist()) / len(integrals))
    rows = []
    for t in t_grid:
        freq = float(np.mean(dev >= t))
        bound = concentration_bound(n, t)
        check = _mc_check(freq, bound, len(eigs))
        rows.append(ConcentrationRow(float(t), freq, check.context["se"], bound, check.satisfied))
    ks = kolmogorov_distance(esd(eigs[0]), mean_esd(spec, len(eigs), eigs=eigs))
    return ConcentrationResult(n, len(eigs), rows, ks)


def write_rows_csv(path, rows):
    """Write a list of flat dataclass rows with a header."""
    if not rows:
        raise ValueError("nothing to write")
    names = list(rows[0].__dataclass_fields__)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        for r in rows:
            w.writerow([getattr(r, k) for k in names])


__all__ = [
    "BoundCheck",
    "bernstein_bound",
    "concentration_bound",
    "levy_perturbation_check",
    "numerical_rank",
    "rank_bound_check",
    "spectral_concentration_experiment",
    "truncation_survival_experiment",
]
