"""Variance profiles, Wigner ensembles and the truncation reduction."""

import csv
import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
from scipy.special import lambertw

from . import rng
from .laws import EntryLaw

PROFILE_KINDS = ("uniform", "checkerboard", "block", "custom")


@dataclass(frozen=True, eq=False)
class VarianceProfile:
    """Symmetric array of entry second moments, stored by index class.

    Index ``i`` belongs to class ``labels[i]``; for ``i != j`` the profile value
    is ``block[labels[i], labels[j]]`` and the diagonal is ``diag``.  Structured
    profiles need only a handful of classes, so nothing of size ``n**2`` is
    allocated unless :attr:`sigma2` is requested.  A custom profile uses one
    class per index.

    For the infinite-variance cubic law the values are squared scale
    parameters rather than variances.
    """

    labels: np.ndarray
    block: np.ndarray
    diag: np.ndarray
    kind: str = "custom"

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.intp)
        block = np.atleast_2d(np.asarray(self.block, dtype=float))
        diag = np.asarray(self.diag, dtype=float)
        if labels.ndim != 1 or len(labels) < 1:
            raise ValueError("profile needs n >= 1")
        if diag.shape != labels.shape:
            raise ValueError("diag must have one entry per index")
        c = block.shape[0]
        if block.shape != (c, c) or labels.min() < 0 or labels.max() >= c:
            raise ValueError("labels do not match the class block")
        for arr in (block, diag):
            if not np.all(np.isfinite(arr)) or np.any(arr < 0):
                raise ValueError("profile values must be finite and nonnegative")
        if not np.array_equal(block, block.T):
            raise ValueError("profile must be symmetric")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "block", block)
        object.__setattr__(self, "diag", diag)

    @classmethod
    def from_matrix(cls, sigma2, kind="custom"):
        sigma2 = np.asarray(sigma2, dtype=float)
        if sigma2.ndim != 2 or sigma2.shape[0] != sigma2.shape[1]:
            raise ValueError("profile must be a square matrix")
        n = sigma2.shape[0]
        return cls(np.arange(n), sigma2.copy(), np.diag(sigma2).copy(), kind)

    @property
    def n(self):
        return len(self.labels)

    @cached_property
    def class_sizes(self):
        return np.bincount(self.labels, minlength=self.block.shape[0])

    def row(self, i):
        r = self.block[self.labels[i], self.labels].copy()
        r[i] = self.diag[i]
        return r

    @cached_property
    def sigma2(self):
        s = self.block[np.ix_(self.labels, self.labels)]
        np.fill_diagonal(s, self.diag)
        return s

    def class_row_totals(self, offdiag_values, diag_values):
        """Per-row sums of an entrywise functional.

        ``offdiag_values`` holds the functional evaluated on ``block`` (shape
        ``(c, c)``), ``diag_values`` on ``diag`` (shape ``(n,)``).
        """
        weights = self.class_sizes[None, :] - np.eye(len(self.class_sizes))
        terms = np.where(weights > 0, offdiag_values * weights, 0.0)
        return terms.sum(axis=1)[self.labels] + diag_values

    def row_sums(self):
        return self.class_row_totals(self.block, self.diag)


def build_profile(kind, n, params=None):
    """Build a structured variance profile.

    ``uniform`` has every entry equal to ``params['value']`` (default ``1/n``).
    ``checkerboard`` puts ``2/n`` where ``i + j`` is even (1-based) and 0
    elsewhere.  ``block`` is ``1/n`` everywhere except the off-diagonal entries
    of the bottom-right ``ceil(n/2)`` block, which are zero.
    """
    params = dict(params or {})
    n = int(n)
    if n < 1:
        raise ValueError("n must be positive")
    if kind == "uniform":
        value = float(params.pop("value", 1.0 / n))
        prof = VarianceProfile(np.zeros(n), [[value]], np.full(n, value), "uniform")
    elif kind == "checkerboard":
        v = 2.0 / n
        # 0-based index i is 1-based i+1, so parity classes agree
        prof = VarianceProfile(np.arange(n) % 2, [[v, 0.0], [0.0, v]], np.full(n, v), "checkerboard")
    elif kind == "block":
        v = 1.0 / n
        top = n // 2
        labels = (np.arange(n) >= top).astype(int)
        block = [[v, v], [v, 0.0]] if top > 0 else [[0.0, 0.0], [0.0, 0.0]]
        if top == 0:
            labels = np.ones(n, dtype=int)
        prof = VarianceProfile(labels, block, np.full(n, v), "block")
    elif kind == "custom":
        if "sigma2" not in params:
            raise ValueError("custom profile needs params['sigma2']")
        prof = VarianceProfile.from_matrix(params.pop("sigma2"))
        if prof.n != n:
            raise ValueError("custom profile size does not match n")
    else:
        raise ValueError(f"unknown profile kind {kind!r}")
    if params:
        raise ValueError(f"unused profile parameters: {sorted(params)}")
    return prof


def load_profile_csv(path):
    """Read a custom profile: ``n`` rows of ``n`` comma-separated values."""
    with open(path, newline="") as fh:
        rows = [[float(x) for x in r] for r in csv.reader(fh) if r and any(x.strip() for x in r)]
    n = len(rows)
    if n == 0 or any(len(r) != n for r in rows):
        raise ValueError(f"{path}: expected a square table of numbers")
    sigma2 = np.array(rows)
    if not np.array_equal(sigma2, sigma2.T):
        raise ValueError(f"{path}: profile is not symmetric")
    return VarianceProfile.from_matrix(sigma2)


def heavy_tail_constant(n):
    """Normalizer ``c_n`` for entries ``c_n x / sqrt(n log n)`` with cubic ``x``.

    Chosen so that every truncated row sum ``sum_j E[|w_ij|^2; |w_ij| <= 1]``
    equals 1; with ``L = log n`` this means ``u (L + log L - log u) = L`` for
    ``u = c_n**2``, solved on the lower Lambert-W branch.
    """
    if n < 3:
        raise ValueError("the heavy-tail normalization needs n >= 3")
    L = math.log(n)
    A = L + math.log(L)
    w = lambertw(-L * math.exp(-A), -1).real
    return math.sqrt(math.exp(A + w))


def heavy_tail_profile(n):
    c = heavy_tail_constant(n)
    return build_profile("uniform", n, {"value": c * c / (n * math.log(n))})


@dataclass(frozen=True, eq=False)
class EnsembleSpec:
    """Profile + unit entry law + seed.

    Entry ``(i, j)`` follows ``law`` with scale ``law.scale * sqrt(sigma2[i, j])``;
    diagonal entries use the real version of the law.
    """

    profile: VarianceProfile
    law: EntryLaw
    seed: int = 0
    name: str = field(default="", compare=False)

    def __post_init__(self):
        rng.check_seed(self.seed)

    @property
    def n(self):
        return self.profile.n

    @property
    def field(self):
        return self.law.field

    def with_law(self, law):
        return replace(self, law=law)

    def row_scales(self, i):
        return self.law.scale * np.sqrt(self.profile.row(i))


def variance_profile(spec):
    """Profile of actual entry variances ``E|w_ij|^2`` of a finite-variance spec."""
    law = spec.law
    if not law.finite_variance:
        raise ValueError("entries have infinite variance")
    prof = spec.profile
    if law.cutoff is None:
        s2 = law.scale ** 2
        return VarianceProfile(prof.labels, s2 * prof.block, s2 * prof.diag, prof.kind)
    block = law.second_moment(scale=law.scale * np.sqrt(prof.block))
    diag = law.real_version().second_moment(scale=law.scale * np.sqrt(prof.diag))
    return VarianceProfile(prof.labels, block, diag, prof.kind)


def upper_row(spec, trial, i):
    """Entries ``w[i, i:]`` of one draw; a pure function of ``(seed, trial, i)``."""
    n = spec.n
    u = rng.uniforms(spec.seed, rng.MATRIX, trial, i, (n - i, 2))
    scales = spec.row_scales(i)[i:]
    law = spec.law
    vals = law.sample(u, scales)
    if law.field == "complex":
        vals = vals.astype(complex)
        vals[0] = law.real_version().sample(u[:1], scales[:1])[0]
    return vals


def sample_matrix(spec, trial):
    """Draw the Hermitian matrix number ``trial`` of the ensemble."""
    n = spec.n
    dtype = complex if spec.field == "complex" else float
    w = np.empty((n, n), dtype=dtype)
    for i in range(n):
        row = upper_row(spec, trial, i)
        w[i, i:] = row
        w[i + 1:, i] = np.conj(row[1:]) if dtype is complex else row[1:]
    return w


def truncate_center(law, eta):
    """Law of ``w * 1{|w| <= eta} - E[w; |w| <= eta]``.

    The result has mean zero and support radius at most ``2 * eta``.  A law
    that truncates to a point mass at zero is returned as the zero law.
    """
    if not eta > 0:
        raise ValueError("eta must be positive")
    if law.family == "zero":
        return law
    cutoff = eta if law.cutoff is None else min(eta, law.cutoff)
    if law.discrete and law.cutoff is not None:
        raise ValueError("repeated truncation of a discrete law is not supported")
    out = replace(law, cutoff=float(cutoff))
    if out.discrete:
        vals, _ = out.atoms()
        if np.all(vals == 0):
            return EntryLaw("zero", scale=law.scale, field=law.field)
    return out


DYADIC_GRID = tuple(2.0 ** -k for k in range(1, 11))


def threshold_sequence(weak_lind_values, n_values, floor_exponent=0.25):
    """Nonincreasing truncation levels ``eta_n <= 1/2`` tending to zero.

    Parameters
    ----------
    weak_lind_values : mapping
        ``eps -> sequence`` of the weak-Lindeberg functional
        ``(1/n) sum_ij P(|w_ij| > eps)`` evaluated at each ``n`` in ``n_values``.
    n_values : sequence of int
        Ascending matrix sizes.

    Returns
    -------
    ndarray
        For each ``n``, the smallest grid ``eps`` whose functional stays at or
        below ``eps`` from ``n`` onward, raised to at least
        ``n**-floor_exponent / 2``, capped at 1/2 and made monotone.
    """
    n_values = np.asarray(n_values, dtype=float)
    m = len(n_values)
    grid = sorted(float(e) for e in weak_lind_values)
    cand = np.full(m, 0.5)
    for eps in reversed(grid):  # largest first, so smaller passing eps overwrite
        vals = np.asarray(weak_lind_values[eps], dtype=float)
        if vals.shape != (m,):
            raise ValueError("each value sequence must match n_values")
        tail_max = np.maximum.accumulate(vals[::-1])[::-1]
        cand = np.where(tail_max <= eps, np.minimum(cand, eps), cand)
    eta = np.maximum(cand, 0.5 * n_values ** -floor_exponent)
    eta = np.minimum(eta, 0.5)
    return np.minimum.accumulate(eta)
