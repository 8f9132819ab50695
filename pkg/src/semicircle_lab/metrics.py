"""Reference distributions and distances between distribution functions.

Distances accept any mix of :class:`~semicircle_lab.spectra.StepMeasure` and
continuous references (objects with a vectorized ``cdf`` and a ``support``
hint).  When at least one side is a step function, the suprema are exact:
they are taken over the finitely many points where the step functions jump,
with both one-sided limits.
"""

import math

import numpy as np
from scipy import optimize, special


class SemicircleRef:
    """Semicircle law on [-2, 2] with density ``sqrt(4 - x^2) / (2 pi)``."""

    is_step = False

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.sqrt(np.clip(4.0 - x * x, 0.0, None)) / (2.0 * np.pi)

    def cdf(self, x):
        x = np.clip(np.asarray(x, dtype=float), -2.0, 2.0)
        return 0.5 + (x * np.sqrt(4.0 - x * x) + 4.0 * np.arcsin(x / 2.0)) / (4.0 * np.pi)

    def moment(self, k):
        return semicircle_moment(k)

    def support(self):
        return -2.0, 2.0


SEMICIRCLE = SemicircleRef()


class NormalRef:
    """Centered normal law; ``std=1`` is the standard normal."""

    is_step = False

    def __init__(self, std=1.0):
        self.std = float(std)

    def cdf(self, x):
        return special.ndtr(np.asarray(x, dtype=float) / self.std)

    def support(self):
        return -9.0 * self.std, 9.0 * self.std


def semicircle_cdf(x):
    return SEMICIRCLE.cdf(x)


def catalan(m):
    return math.comb(2 * m, m) // (m + 1)


def semicircle_moment(k):
    """``k``-th moment of the semicircle law: Catalan(k/2) or 0."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return float(catalan(k // 2)) if k % 2 == 0 else 0.0


def measure_moment(m, k):
    """``sum_i w_i a_i^k`` with compensated summation."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return math.fsum((m.weights * m.atoms ** k).tolist())


# -- distances ---------------------------------------------------------------

def _left(F, x):
    return F.cdf_left(x) if F.is_step else F.cdf(x)


def kolmogorov_distance(F, G):
    """``sup_x |F(x) - G(x)|``."""
    if F.is_step and G.is_step:
        pts = np.union1d(F.atoms, G.atoms)
        return float(np.max(np.abs(F.cdf(pts) - G.cdf(pts))))
    if G.is_step:
        F, G = G, F
    if F.is_step:
        a = F.atoms
        g = G.cdf(a)
        return float(max(np.max(np.abs(F.cdf(a) - g)), np.max(np.abs(F.cdf_left(a) - g))))
    return _continuous_sup(lambda x: np.abs(F.cdf(x) - G.cdf(x)), F, G)


def kolmogorov_witness(F, G):
    """Distance, location and side (``True`` for the left limit) of the
    largest gap between a step function ``F`` and a continuous ``G``."""
    if not F.is_step or G.is_step:
        raise ValueError("need a step function and a continuous reference")
    a = F.atoms
    g = G.cdf(a)
    right = np.abs(F.cdf(a) - g)
    left = np.abs(F.cdf_left(a) - g)
    ir, il = int(np.argmax(right)), int(np.argmax(left))
    if left[il] > right[ir]:
        return float(left[il]), float(a[il]), True
    return float(right[ir]), float(a[ir]), False


def _grid(F, G, num=20001):
    lo = min(F.support()[0], G.support()[0]) - 1.0
    hi = max(F.support()[1], G.support()[1]) + 1.0
    return np.linspace(lo, hi, num)


def _continuous_sup(fn, F, G):
    xs = _grid(F, G)
    vals = fn(xs)
    k = int(np.argmax(vals))
    h = xs[1] - xs[0]
    res = optimize.minimize_scalar(lambda x: -fn(np.array([x]))[0], bounds=(xs[k] - h, xs[k] + h),
                                   method="bounded", options={"xatol": 1e-12})
    return float(max(vals[k], -res.fun))


def _band_ok(F, G, eps):
    """Whether ``F(x - eps) - eps <= G(x) <= F(x + eps) + eps`` for all x."""
    if not F.is_step and G.is_step:
        F, G = G, F
    if F.is_step:
        # F(. - eps) jumps at atoms + eps, F(. + eps) at atoms - eps
        up = F.atoms + eps
        down = F.atoms - eps
        pts = np.concatenate([up, down] + ([G.atoms] if G.is_step else []))
        # evaluate the shifted steps against their own jump arrays so that
        # x = a + eps lands exactly on a jump despite rounding in a + eps
        i_up = np.searchsorted(up, pts, side="right")
        i_down = np.searchsorted(down, pts, side="left")
        lower = np.where(i_up > 0, F._cum[i_up - 1], 0.0)
        upper_left = np.where(i_down > 0, F._cum[i_down - 1], 0.0)
        g = G.cdf(pts)
        g_left = _left(G, pts)
        return bool(np.all(lower - eps <= g) and np.all(g_left <= upper_left + eps))
    xs = _grid(F, G)
    g = G.cdf(xs)
    return bool(np.all(F.cdf(xs - eps) - eps <= g) and np.all(g <= F.cdf(xs + eps) + eps))


def levy_distance(F, G, tol=1e-6):
    """Levy distance, by bisection on the band half-width.

    The returned value is a feasible half-width within ``tol`` of the
    infimum, and never exceeds the Kolmogorov distance.
    """
    hi = min(1.0, kolmogorov_distance(F, G))
    lo = 0.0
    if hi == 0.0:
        return 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _band_ok(F, G, mid):
            hi = mid
        else:
            lo = mid
    return hi
