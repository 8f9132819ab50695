"""Eigenvalues of Hermitian samples and empirical spectral measures."""

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .ensemble import sample_matrix


@dataclass(frozen=True, eq=False)
class StepMeasure:
    """Finitely supported probability measure on the real line.

    ``atoms`` is strictly increasing, ``weights`` positive and summing to one.
    """

    atoms: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        atoms = np.asarray(self.atoms, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if atoms.ndim != 1 or atoms.shape != weights.shape or len(atoms) == 0:
            raise ValueError("atoms and weights must be matching nonempty 1-d arrays")
        if np.any(np.diff(atoms) <= 0):
            raise ValueError("atoms must be strictly increasing")
        if np.any(weights <= 0) or abs(weights.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be positive and sum to 1")
        cum = np.cumsum(weights)
        cum /= cum[-1]
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "_cum", cum)

    @classmethod
    def from_samples(cls, values):
        """Uniform weights on ``values``; exact duplicates are merged."""
        values = np.asarray(values, dtype=float).ravel()
        atoms, counts = np.unique(values, return_counts=True)
        return cls(atoms, counts / len(values))

    is_step = True

    def cdf(self, x):
        idx = np.searchsorted(self.atoms, x, side="right")
        return np.where(idx > 0, self._cum[np.maximum(idx - 1, 0)], 0.0)

    def cdf_left(self, x):
        """Left limit ``F(x-)``."""
        idx = np.searchsorted(self.atoms, x, side="left")
        return np.where(idx > 0, self._cum[np.maximum(idx - 1, 0)], 0.0)

    def support(self):
        return float(self.atoms[0]), float(self.atoms[-1])

    def to_rows(self):
        return [(float(a), float(w)) for a, w in zip(self.atoms, self.weights)]

    def to_json(self):
        return {"atoms": self.atoms.tolist(), "weights": self.weights.tolist()}

    @classmethod
    def from_json(cls, obj):
        return cls(np.array(obj["atoms"]), np.array(obj["weights"]))

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["atom", "weight"])
            w.writerows(self.to_rows())

    def write_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh)


def _check_hermitian(m):
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    scale = np.max(np.abs(m)) if m.size else 0.0
    if not np.allclose(m, m.conj().T, rtol=0, atol=1e-12 * max(scale, 1.0)):
        raise ValueError("matrix is not Hermitian")
    return m


def eigenvalues(m):
    """All eigenvalues of a Hermitian matrix, sorted in decreasing order.

    Backed by LAPACK (Householder tridiagonalization followed by a
    tridiagonal eigensolver); :func:`reference_eigenvalues` is a slow
    independent implementation of the same pipeline.
    """
    m = _check_hermitian(m)
    return np.linalg.eigvalsh(m)[::-1]


def esd(eigs):
    """Empirical spectral distribution: weight ``1/n`` on each eigenvalue."""
    return StepMeasure.from_samples(eigs)


def trial_eigenvalues(spec, trials, workers=1):
    """Eigenvalues of trials ``0..trials-1``, returned in trial order."""
    if trials < 1:
        raise ValueError("need at least one trial")

    def one(t):
        return eigenvalues(sample_matrix(spec, t))

    if workers <= 1:
        return [one(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, range(trials)))


def mean_esd(spec, trials, workers=1, eigs=None):
    """Pooled estimate of the mean spectral measure ``E mu_W``.

    All ``trials * n`` eigenvalues get weight ``1/(trials * n)``, which makes
    the estimate the equal-weight mixture of the per-trial ESDs.
    """
    if eigs is None:
        eigs = trial_eigenvalues(spec, trials, workers)
    return StepMeasure.from_samples(np.concatenate(eigs))


# -- reference solver --------------------------------------------------------

def householder_tridiagonal(a):
    """Reduce a real symmetric matrix to tridiagonal form.

    Returns the diagonal ``d`` and off-diagonal ``e`` (``e[0] = 0``,
    ``e[i]`` couples rows ``i-1`` and ``i``).
    """
    a = np.array(a, dtype=float)
    n = len(a)
    for k in range(n - 2):
        x = a[k + 1:, k]
        xmax = np.abs(x).max()
        if xmax == 0:
            continue
        # build the reflector from the scaled column: v and v @ v stay O(1)
        xs = x / xmax
        alpha = -math.copysign(np.linalg.norm(xs), xs[0])
        v = xs.copy()
        v[0] -= alpha
        alpha *= xmax
        vnorm2 = v @ v
        if vnorm2 == 0:
            continue
        sub = a[k + 1:, k + 1:]
        p = sub @ v * (2.0 / vnorm2)
        kk = (v @ p) / vnorm2
        q = p - kk * v
        sub -= np.outer(v, q) + np.outer(q, v)
        a[k + 1:, k] = 0.0
        a[k, k + 1:] = 0.0
        a[k + 1, k] = a[k, k + 1] = alpha
    d = np.diag(a).copy()
    e = np.zeros(n)
    e[1:] = np.diag(a, -1)
    return d, e


_EPS = np.finfo(float).eps
# below this an off-diagonal entry of a unit-scale matrix is negligible
_SAFMIN = np.finfo(float).tiny / _EPS


def tridiagonal_ql(d, e, max_iter=60):
    """Eigenvalues of a symmetric tridiagonal matrix by implicit-shift QL."""
    d = np.array(d, dtype=float)
    n = len(d)
    e = np.append(np.array(e, dtype=float)[1:], 0.0)
    # an off-diagonal below eps^2 * ||T|| perturbs no eigenvalue by more than
    # a tiny fraction of the eps * ||T|| accuracy of the method; dropping it
    # keeps the shifts away from underflow
    floor = max(_EPS * _EPS * (np.abs(d).max(initial=0.0) + 2 * np.abs(e).max(initial=0.0)), _SAFMIN)
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= _EPS * dd or abs(e[m]) <= floor:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > max_iter:
                raise RuntimeError("QL iteration did not converge")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            else:
                d[l] -= p
                e[l] = g
                e[m] = 0.0
                continue
            if r == 0.0 and i >= l:
                continue
    return np.sort(d)[::-1]


def reference_eigenvalues(m):
    """Pure-numpy Householder + QL eigenvalues (small matrices only).

    A complex Hermitian ``A + iB`` is handled through the real symmetric
    embedding ``[[A, -B], [B, A]]``, whose spectrum is that of the original
    with every eigenvalue doubled.
    """
    m = _check_hermitian(m)
    # work at unit scale so the deflation test cannot underflow
    scale = float(np.max(np.abs(m))) if m.size else 0.0
    if scale == 0.0:
        return np.zeros(len(m))
    m = m / scale
    if np.iscomplexobj(m):
        a, b = m.real, m.imag
        big = np.block([[a, -b], [b, a]])
        return scale * tridiagonal_ql(*householder_tridiagonal(big))[::2]
    return scale * tridiagonal_ql(*householder_tridiagonal(m))
