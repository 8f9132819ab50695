"""Single-entry distributions with closed-form truncated moments.

An :class:`EntryLaw` describes the distribution of one matrix entry ``w``.
All moment functions accept an optional ``scale`` argument (scalar or array)
that overrides :attr:`EntryLaw.scale`; the ensemble code evaluates a whole
variance profile at once this way.

Families
--------
gaussian
    ``scale * g`` with ``g`` standard normal.  Complex: real and imaginary
    parts i.i.d. normal with variance ``scale**2 / 2``.
rademacher
    ``+-scale`` with equal probability.  Complex: ``scale * (+-1 +- 1j)/sqrt(2)``.
two_point
    ``scale * x`` where ``x`` takes ``sqrt((1-p)/p)`` with probability ``p`` and
    ``-sqrt(p/(1-p))`` otherwise (mean 0, variance 1).  Complex: independent
    real and imaginary parts, each a two-point variable scaled by ``1/sqrt(2)``.
heavy_tail_cubic
    ``scale * y`` where ``|y|`` has density ``2/y**3`` on ``y > 1`` and a
    symmetric sign (complex: uniform phase).  Infinite variance.
zero
    The point mass at 0.

A law may carry a ``cutoff``; it then describes ``w * 1{|w| <= cutoff}``
minus its mean, the output of :func:`semicircle_lab.ensemble.truncate_center`.
"""

from dataclasses import dataclass, replace

import numpy as np
from scipy import special

FAMILIES = ("gaussian", "rademacher", "two_point", "heavy_tail_cubic", "zero")
FIELDS = ("real", "complex")

_SQRT2 = np.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


@dataclass(frozen=True)
class EntryLaw:
    family: str
    scale: float = 1.0
    p: float = 0.5
    field: str = "real"
    cutoff: float | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown entry law family {self.family!r}")
        if self.field not in FIELDS:
            raise ValueError(f"field must be 'real' or 'complex', got {self.field!r}")
        if not (np.isfinite(self.scale) and self.scale >= 0):
            raise ValueError("scale must be finite and nonnegative")
        if self.family == "two_point" and not 0.0 < self.p < 1.0:
            raise ValueError("two_point needs 0 < p < 1")
        if self.cutoff is not None and not self.cutoff > 0:
            raise ValueError("cutoff must be positive")

    # -- structure -----------------------------------------------------------

    @property
    def discrete(self):
        return self.family in ("rademacher", "two_point", "zero")

    @property
    def finite_variance(self):
        return self.family != "heavy_tail_cubic" or self.cutoff is not None

    @property
    def symmetric(self):
        """True when ``w`` and ``-w`` have the same law."""
        return self.family in ("gaussian", "rademacher", "heavy_tail_cubic", "zero") or (
            self.family == "two_point" and self.p == 0.5
        )

    def real_version(self):
        """Law used on the diagonal, which is real for Hermitian matrices."""
        return self if self.field == "real" else replace(self, field="real")

    def with_scale(self, scale):
        return replace(self, scale=float(scale))

    def _scale(self, scale):
        s = self.scale if scale is None else scale
        return np.asarray(s, dtype=float)

    # -- discrete atom tables ------------------------------------------------

    def _unit_atoms(self):
        """Atoms of the unit-scale untruncated law and their probabilities."""
        if self.family == "zero":
            return np.zeros(1), np.ones(1)
        if self.family == "rademacher":
            x, px = np.array([1.0, -1.0]), np.array([0.5, 0.5])
        else:
            p = self.p
            x = np.array([np.sqrt((1 - p) / p), -np.sqrt(p / (1 - p))])
            px = np.array([p, 1 - p])
        if self.field == "real":
            return x, px
        # index 2*im + re, matching the sampler
        vals = (x[None, :] + 1j * x[:, None]).ravel() / _SQRT2
        probs = (px[None, :] * px[:, None]).ravel()
        return vals, probs

    def atoms(self, scale=None):
        """Atom values (shape ``scale.shape + (m,)``) and probabilities ``(m,)``.

        Only for discrete families; truncation and centering are applied.
        """
        if not self.discrete:
            raise ValueError(f"{self.family} is not a discrete law")
        s = self._scale(scale)
        unit, probs = self._unit_atoms()
        vals = s[..., None] * unit
        if self.cutoff is not None:
            keep = self._atom_modulus(s, raw=True) <= self.cutoff
            vals = np.where(keep, vals, 0)
            shift = (vals * probs).sum(axis=-1)
            vals = vals - shift[..., None]
        return vals, probs

    def _atom_modulus(self, s, raw=False):
        unit, _ = self._unit_atoms()
        if self.family == "rademacher":
            umod = np.ones_like(unit, dtype=float)
        else:
            umod = np.abs(unit)
        if raw or self.cutoff is None:
            return s[..., None] * umod
        vals, _ = self.atoms(s)
        return np.abs(vals)

    # -- closed-form functionals ----------------------------------------------

    def truncated_second_moment(self, a, scale=None):
        """``E[|w|^2; |w| <= a]``."""
        if a < 0:
            raise ValueError("truncation level must be nonnegative")
        s = self._scale(scale)
        if self.discrete:
            vals, probs = self.atoms(s)
            mod = self._atom_modulus(s)
            return (probs * np.abs(vals) ** 2 * (mod <= a)).sum(axis=-1)
        if self.cutoff is not None:
            return self._base_tsm(min(a, self.cutoff), s)
        return self._base_tsm(a, s)

    def upper_second_moment(self, eps, scale=None):
        """``E[|w|^2; |w| > eps]`` (``inf`` for the untruncated cubic law)."""
        s = self._scale(scale)
        if self.discrete:
            vals, probs = self.atoms(s)
            mod = self._atom_modulus(s)
            return (probs * np.abs(vals) ** 2 * (mod > eps)).sum(axis=-1)
        if self.cutoff is not None:
            if eps >= self.cutoff:
                return np.zeros_like(s)
            return self._base_tsm(self.cutoff, s) - self._base_tsm(eps, s)
        if self.family == "heavy_tail_cubic":
            return np.where(s > 0, np.inf, 0.0)
        return self._base_upper(eps, s)

    def second_moment(self, scale=None):
        s = self._scale(scale)
        if self.discrete:
            vals, probs = self.atoms(s)
            return (probs * np.abs(vals) ** 2).sum(axis=-1)
        if self.cutoff is not None:
            return self._base_tsm(self.cutoff, s)
        if self.family == "heavy_tail_cubic":
            return np.where(s > 0, np.inf, 0.0)
        return s ** 2

    def truncated_mean(self, a, scale=None):
        """``E[w; |w| <= a]``; exactly 0 for symmetric continuous laws."""
        s = self._scale(scale)
        if self.discrete:
            vals, probs = self.atoms(s)
            mod = self._atom_modulus(s)
            out = (probs * vals * (mod <= a)).sum(axis=-1)
            return out.real if self.field == "real" else out
        return np.zeros_like(s)

    def tail_probability(self, eps, scale=None):
        """``P(|w| > eps)``."""
        if not eps > 0:
            raise ValueError("eps must be positive")
        s = self._scale(scale)
        if self.discrete:
            _, probs = self.atoms(s)
            mod = self._atom_modulus(s)
            return (probs * (mod > eps)).sum(axis=-1)
        if self.cutoff is not None:
            if eps >= self.cutoff:
                return np.zeros_like(s)
            return self._base_tail(eps, s) - self._base_tail(self.cutoff, s)
        return self._base_tail(eps, s)

    def raw_moment(self, m, scale=None):
        """``E[w^m]`` for real discrete laws (used by the exact trace oracle)."""
        if not (self.discrete and self.field == "real"):
            raise ValueError("raw moments are only available for real discrete laws")
        vals, probs = self.atoms(self._scale(scale))
        return (probs * vals ** m).sum(axis=-1)

    def support_radius(self, scale=None):
        s = self._scale(scale)
        if self.discrete:
            return self._atom_modulus(s).max(axis=-1)
        if self.cutoff is not None:
            return np.where(s > 0, self.cutoff, 0.0)
        return np.where(s > 0, np.inf, 0.0)

    # continuous base laws, untruncated
    def _base_tsm(self, a, s):
        pos = s > 0
        ss = np.where(pos, s, 1.0)
        if self.family == "gaussian":
            if self.field == "real":
                x = a / ss
                val = special.erf(x / _SQRT2) - 2 * x * _INV_SQRT_2PI * np.exp(-0.5 * x * x)
            else:
                y = (a / ss) ** 2
                val = -np.expm1(-y) - y * np.exp(-y)
            return np.where(pos, ss ** 2 * val, 0.0)
        # heavy_tail_cubic: 2 s^2 log(a/s) above the support edge
        val = np.where(a >= ss, 2.0 * np.log(np.maximum(a, 1e-300) / ss), 0.0)
        return np.where(pos, ss ** 2 * val, 0.0)

    def _base_upper(self, eps, s):
        pos = s > 0
        ss = np.where(pos, s, 1.0)
        if self.field == "real":
            x = eps / ss
            val = 2 * x * _INV_SQRT_2PI * np.exp(-0.5 * x * x) + special.erfc(x / _SQRT2)
        else:
            y = (eps / ss) ** 2
            val = np.exp(-y) * (1 + y)
        return np.where(pos, ss ** 2 * val, 0.0)

    def _base_tail(self, eps, s):
        pos = s > 0
        ss = np.where(pos, s, 1.0)
        if self.family == "gaussian":
            if self.field == "real":
                val = special.erfc(eps / ss / _SQRT2)
            else:
                val = np.exp(-((eps / ss) ** 2))
        else:
            val = np.minimum(1.0, (ss / eps) ** 2)
        return np.where(pos, val, 0.0)

    # -- sampling --------------------------------------------------------------

    def sample(self, u, scale=None):
        """Map uniforms ``u`` of shape ``(m, 2)`` to ``m`` entries.

        Each entry consumes exactly two uniforms, so an entry's value depends
        only on its own slot in the stream.
        """
        s = np.broadcast_to(self._scale(scale), u.shape[:1])
        if self.family == "zero":
            out = np.zeros(len(u))
            return out if self.field == "real" else out.astype(complex)
        if self.discrete:
            vals, probs = self.atoms(s)
            # per-component probability of the first atom
            thresh = self.p if self.family == "two_point" else 0.5
            idx = (u[:, 0] >= thresh).astype(np.intp)
            if self.field == "complex":
                idx = idx + 2 * (u[:, 1] >= thresh)
            return np.take_along_axis(vals, idx[:, None], axis=1)[:, 0]
        if self.family == "gaussian":
            if self.field == "real":
                w = s * special.ndtri(u[:, 0])
            else:
                w = (s / _SQRT2) * (special.ndtri(u[:, 0]) + 1j * special.ndtri(u[:, 1]))
        else:
            mag = s / np.sqrt(u[:, 0])
            if self.field == "real":
                w = np.where(u[:, 1] < 0.5, mag, -mag)
            else:
                w = mag * np.exp(2j * np.pi * u[:, 1])
        if self.cutoff is not None:
            # symmetric continuous law: the centering shift is zero
            w = np.where(np.abs(w) <= self.cutoff, w, 0)
        return w
