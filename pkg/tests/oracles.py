"""Independent reference computations used by the tests.

Nothing here imports the package's numerical routines: each function is a
brute-force or textbook route to a quantity the package computes another way.
"""

import itertools
import math

import numpy as np
from scipy import integrate, optimize, special

# values computed before the package existed, frozen here
SEMICIRCLE_CDF_AT_1 = 0.8044988905221147
GAUSS_UPPER_SECOND_MOMENT_AT_5 = 1.544049829110137e-05  # E[g^2; |g| > 5]
GAUSS_TWO_SIDED_TAIL_AT_1 = 0.31731050786291415  # 2 (1 - Phi(1))
PHI_196 = 0.9750021048517795
LEVY_POINT_MASS_TO_NORMAL = 0.3595804520520645  # solves Phi(-e) = e
LEVY_HALF_VARIANCE_NORMAL = 0.06558194  # L(N(0, 1/2), N(0, 1)), grid bisection
KS_HALF_VARIANCE_NORMAL = 0.08303203749175647  # attained at x = sqrt(log 2)


def phi(x):
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def levy_point_mass_oracle():
    return optimize.brentq(lambda e: phi(-e) - e, 0.0, 1.0, xtol=1e-15)


def levy_continuous_oracle(F, G, lo=-10.0, hi=10.0, num=400001, tol=1e-9):
    """Band-width bisection for two continuous CDFs on a dense grid."""
    xs = np.linspace(lo, hi, num)

    def ok(e):
        return np.all(F(xs - e) - e <= G(xs)) and np.all(G(xs) <= F(xs + e) + e)

    a, b = 0.0, 1.0
    while b - a > tol:
        m = 0.5 * (a + b)
        a, b = (a, m) if ok(m) else (m, b)
    return b


def levy_half_variance_oracle():
    return levy_continuous_oracle(lambda x: special.ndtr(x * math.sqrt(2.0)), special.ndtr)


def step_cdf(atoms, weights):
    """Right-continuous CDF and its left limit for a finite measure."""
    atoms = np.asarray(atoms, float)
    weights = np.asarray(weights, float)

    def F(x):
        return np.array([weights[atoms <= v].sum() for v in np.atleast_1d(x)])

    def F_left(x):
        return np.array([weights[atoms < v].sum() for v in np.atleast_1d(x)])

    return F, F_left


def kolmogorov_step_oracle(a1, w1, a2, w2):
    """Sup of |F1 - F2|, checking every atom and points between atoms."""
    F1, _ = step_cdf(a1, w1)
    F2, _ = step_cdf(a2, w2)
    pts = np.union1d(a1, a2)
    mids = np.concatenate([pts, (pts[:-1] + pts[1:]) / 2, [pts[0] - 1, pts[-1] + 1]])
    return float(np.max(np.abs(F1(mids) - F2(mids))))


def levy_step_oracle(samples1, samples2, iters=60):
    """Levy distance of two empirical CDFs in exact rational arithmetic.

    Samples are converted through their decimal repr, so band shifts like
    ``a + e - e`` are exact.  With ``F`` right-continuous, the sup of
    ``F1(x - e) - F2(x)`` is attained at a jump of ``F1(. - e)`` or just
    before a jump of ``F2``; symmetrically for the upper side.
    """
    from collections import Counter
    from fractions import Fraction

    def law(samples):
        c = Counter(Fraction(repr(float(v))) for v in samples)
        total = sum(c.values())
        return sorted(c), {a: Fraction(k, total) for a, k in c.items()}

    A1, W1 = law(samples1)
    A2, W2 = law(samples2)
    F = lambda A, W, x: sum(W[a] for a in A if a <= x)
    Fl = lambda A, W, x: sum(W[a] for a in A if a < x)

    def ok(e):
        for x in [a + e for a in A1]:
            if F(A1, W1, x - e) - e > F(A2, W2, x):
                return False
        for x in A2:
            if Fl(A1, W1, x - e) - e > Fl(A2, W2, x):
                return False
        for x in A2:
            if F(A2, W2, x) > F(A1, W1, x + e) + e:
                return False
        for x in [a - e for a in A1]:
            if Fl(A2, W2, x) > Fl(A1, W1, x + e) + e:
                return False
        return True

    lo, hi = Fraction(0), Fraction(1)
    for _ in range(iters):
        mid = (lo + hi) / 2
        lo, hi = (lo, mid) if ok(mid) else (mid, hi)
    return float(hi)


def gauss_truncated_second_moment_quad(s, a):
    f = lambda x: x * x * math.exp(-x * x / (2 * s * s)) / (s * math.sqrt(2 * math.pi))
    return 2 * integrate.quad(f, 0, a, epsabs=1e-15, epsrel=1e-13)[0]


def complex_gauss_truncated_second_moment_quad(s, a):
    # |w| is Rayleigh with E|w|^2 = s^2: density 2r/s^2 exp(-r^2/s^2)
    f = lambda r: r * r * 2 * r / s ** 2 * math.exp(-r * r / s ** 2)
    return integrate.quad(f, 0, a, epsabs=1e-15, epsrel=1e-13)[0]


def heavy_tail_c2_oracle(n):
    """``u`` with ``n * 2 s^2 log(1/s) = 1`` for ``s^2 = u / (n log n)``."""
    L = math.log(n)

    def row_sum(u):
        s2 = u / (n * L)
        return n * s2 * math.log(1.0 / s2) - 1.0

    return optimize.brentq(row_sum, 1e-6, 1.0, xtol=1e-15, rtol=1e-15)


def bell(k):
    row = [1]
    for _ in range(k):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
    return row[0]


def walk_classes_brute(k):
    """Isomorphism classes of closed walks of length ``k`` on ``k`` labels."""
    classes = set()
    for steps in itertools.product(range(k), repeat=k):
        relabel = {}
        for v in steps:
            relabel.setdefault(v, len(relabel) + 1)
        seq = tuple(relabel[v] for v in steps) + (1,)
        classes.add(seq)
    return classes


def injection_sum_brute(edges, sigma2, t):
    n = len(sigma2)
    total = 0.0
    for f in itertools.permutations(range(n), t):
        p = 1.0
        for a, b in edges:
            p *= sigma2[f[a], f[b]]
        total += p
    return total


def trace_moment_brute(scales, atoms, probs, k):
    """``(1/n) E tr W^k`` by enumerating every atom assignment of the
    independent entries on and above the diagonal.

    ``scales`` is the n x n array of entry scales; entry ``(i, j)`` equals
    ``scales[i, j] * atoms[a]`` with probability ``probs[a]``.
    """
    n = len(scales)
    slots = [(i, j) for i in range(n) for j in range(i, n)]
    total = 0.0
    for choice in itertools.product(range(len(atoms)), repeat=len(slots)):
        w = np.zeros((n, n))
        p = 1.0
        for (i, j), a in zip(slots, choice):
            w[i, j] = w[j, i] = scales[i, j] * atoms[a]
            p *= probs[a]
        total += p * np.trace(np.linalg.matrix_power(w, k))
    return total / n


def falling(n, t):
    out = 1
    for i in range(t):
        out *= n - i
    return out
