"""Marchenko-Pastur law and its affine images.

``MarchenkoPastur(y)`` is the limiting spectral distribution of the ``n x n``
Gram matrix ``X^T X`` when the ``p x n`` data matrix has i.i.d. isotropic
columns and ``p / n -> y``. Equivalently it is the classical MP law with
ratio ``1 / y``: it has an atom of mass ``(1 - y)^+`` at 0 and density

    y / (2 pi x) * sqrt((y_+ - x)(x - y_-))   on [y_-, y_+],
    y_(+/-) = (1 +/- 1/sqrt(y))^2,

with mean 1 and variance ``1 / y``.

Integrals of the density are taken in the variable ``theta`` defined by
``x = y_- + (y_+ - y_-) sin(theta)^2``, which removes the square-root
singularities at both edges.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigurationError
from .quadrature import adaptive_simpson

QUAD_TOL = 1e-10
QUANTILE_TOL = 1e-10

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)
_PANELS = 256


@dataclass(frozen=True)
class MarchenkoPastur:
    y: float

    def __post_init__(self):
        if not (np.isfinite(self.y) and self.y > 0):
            raise ConfigurationError(f"MP ratio must be a positive real, got {self.y!r}")
        object.__setattr__(self, "y", float(self.y))

    @property
    def lower(self) -> float:
        return (1.0 - 1.0 / np.sqrt(self.y)) ** 2

    @property
    def upper(self) -> float:
        return (1.0 + 1.0 / np.sqrt(self.y)) ** 2

    @property
    def atom_mass(self) -> float:
        return max(1.0 - self.y, 0.0)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    # -- density -----------------------------------------------------------

    def density(self, x):
        """Density of the continuous part (the atom is not included)."""
        x = np.asarray(x, dtype=float)
        lo, hi = self.lower, self.upper
        inside = (x > lo) & (x < hi) & (x > 0)
        xs = np.where(inside, x, 1.0)
        with np.errstate(invalid="ignore"):
            val = self.y / (2.0 * np.pi * xs) * np.sqrt(np.maximum((hi - xs) * (xs - lo), 0.0))
        out = np.where(inside, val, 0.0)
        return float(out) if out.ndim == 0 else out

    def _theta_integrand(self, theta):
        # density(x(theta)) * dx/dtheta, simplified so that it is finite at both ends
        s2 = np.sin(theta) ** 2
        c2 = np.cos(theta) ** 2
        lo, w = self.lower, self.width
        if lo == 0.0:
            ratio = 1.0 / w
        else:
            ratio = s2 / (lo + w * s2)
        return self.y * w * w / np.pi * ratio * c2

    def _theta(self, x):
        x = np.asarray(x, dtype=float)
        t = np.clip((x - self.lower) / self.width, 0.0, 1.0)
        return np.arcsin(np.sqrt(t))

    # -- continuous-part CDF ----------------------------------------------

    @cached_property
    def _table(self):
        # cumulative continuous mass at the panel edges theta_k = k * h
        h = 0.5 * np.pi / _PANELS
        f = self._theta_integrand
        pieces = [adaptive_simpson(f, k * h, (k + 1) * h, tol=QUAD_TOL / _PANELS)
                  for k in range(_PANELS)]
        return h, np.concatenate(([0.0], np.cumsum(pieces)))

    def _continuous_mass_to(self, theta):
        h, cum = self._table
        theta = np.asarray(theta, dtype=float)
        k = np.clip((theta // h).astype(int), 0, _PANELS - 1)
        a = k * h
        half = 0.5 * (theta - a)
        nodes = a[..., None] + half[..., None] * (_GL_NODES + 1.0)
        partial = half * np.sum(_GL_WEIGHTS * self._theta_integrand(nodes), axis=-1)
        return cum[k] + partial

    @property
    def continuous_mass(self) -> float:
        return 1.0 - self.atom_mass

    def continuous_cdf(self, x):
        """``int_{-inf}^{x}`` of the density.

        The tabulated integral is rescaled by its own total so that the value at
        ``y_+`` is exactly ``1 - atom_mass``; :meth:`total_mass` checks the
        unscaled quadrature independently.
        """
        x = np.asarray(x, dtype=float)
        raw = self._continuous_mass_to(self._theta(x)) / self._table[1][-1]
        out = np.where(x >= self.upper, 1.0, np.where(x <= self.lower, 0.0, raw))
        out = self.continuous_mass * out
        return float(out) if out.ndim == 0 else out

    def cdf(self, x):
        """Right-continuous CDF including the atom at 0."""
        x = np.asarray(x, dtype=float)
        out = self.atom_mass * (x >= 0) + self.continuous_cdf(x)
        out = np.where(x >= self.upper, 1.0, np.clip(out, 0.0, 1.0))
        return float(out) if out.ndim == 0 else out

    def cdf_left(self, x):
        """``P(S < x)``."""
        x = np.asarray(x, dtype=float)
        out = self.atom_mass * (x > 0) + self.continuous_cdf(x)
        out = np.where(x > self.upper, 1.0, np.clip(out, 0.0, 1.0))
        return float(out) if out.ndim == 0 else out

    def quantile(self, q):
        """Left-continuous inverse ``inf{x : cdf(x) >= q}`` for ``q`` in (0, 1]."""
        q = np.asarray(q, dtype=float)
        if np.any((q <= 0) | (q > 1)):
            raise ValueError("quantile levels must lie in (0, 1]")
        out = np.where(q <= self.atom_mass, 0.0,
                       self._continuous_quantile(np.clip(q - self.atom_mass, 0.0, None)))
        return float(out) if out.ndim == 0 else out

    def quantile_right(self, q):
        """Right-continuous inverse ``inf{x : cdf(x) > q}`` for ``q`` in [0, 1)."""
        q = np.asarray(q, dtype=float)
        if np.any((q < 0) | (q >= 1)):
            raise ValueError("levels must lie in [0, 1)")
        out = np.where(q < self.atom_mass, 0.0,
                       self._continuous_quantile(np.clip(q - self.atom_mass, 0.0, None)))
        return float(out) if out.ndim == 0 else out

    def _continuous_quantile(self, mass):
        # bisection on [y_-, y_+] until the bracket is narrower than QUANTILE_TOL
        mass = np.asarray(mass, dtype=float)
        lo = np.full(mass.shape, self.lower)
        hi = np.full(mass.shape, self.upper)
        while np.max(hi - lo, initial=0.0) > QUANTILE_TOL:
            mid = 0.5 * (lo + hi)
            below = self.continuous_cdf(mid) < mass
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        mid = np.where(mass <= 0.0, self.lower, 0.5 * (lo + hi))
        return np.where(mass >= self.continuous_mass, self.upper, mid)

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """i.i.d. draws: 0 with probability ``atom_mass``, else inverse-CDF of the continuous part."""
        if count < 1:
            raise ValueError("count must be >= 1")
        u = rng.random(count)
        atom = rng.random(count) < self.atom_mass
        x = self._continuous_quantile(u * self.continuous_mass)
        return np.where(atom, 0.0, x)

    # -- moments -----------------------------------------------------------

    def moment(self, k: int, tol: float = QUAD_TOL) -> float:
        """``E S^k`` by quadrature (the atom contributes only to ``k = 0``)."""
        lo, w = self.lower, self.width

        def g(theta):
            x = lo + w * np.sin(theta) ** 2
            return x ** k * self._theta_integrand(theta)

        value = adaptive_simpson(g, 0.0, 0.5 * np.pi, tol=tol)
        return value + (self.atom_mass if k == 0 else 0.0)

    def total_mass(self) -> float:
        return self.moment(0)

    def mean(self) -> float:
        return self.moment(1)

    def variance(self) -> float:
        m1 = self.moment(1)
        return self.moment(2) - m1 * m1


@dataclass(frozen=True)
class LimitLaw:
    """Law of ``shift + scale * S`` with ``S ~ base``."""

    base: MarchenkoPastur
    shift: float = 0.0
    scale: float = 1.0

    @classmethod
    def for_kernel(cls, kernel, y: float) -> "LimitLaw":
        from .kernels import limit_coefficients

        c = limit_coefficients(kernel)
        return cls(MarchenkoPastur(y), c.shift, c.scale)

    @property
    def is_point_mass(self) -> bool:
        return self.scale == 0.0

    @property
    def atom_mass(self) -> float:
        return 1.0 if self.is_point_mass else self.base.atom_mass

    @property
    def atom_location(self) -> float:
        return float(self.shift)

    def support(self) -> tuple[float, float]:
        """Closed interval carrying the continuous part (a single point for a point mass)."""
        if self.is_point_mass:
            return (self.shift, self.shift)
        a = self.shift + self.scale * self.base.lower
        b = self.shift + self.scale * self.base.upper
        return (min(a, b), max(a, b))

    def _u(self, x):
        return (np.asarray(x, dtype=float) - self.shift) / self.scale

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.is_point_mass:
            out = (x >= self.shift).astype(float)
        elif self.scale > 0:
            out = np.asarray(self.base.cdf(self._u(x)))
        else:
            out = 1.0 - np.asarray(self.base.cdf_left(self._u(x)))
        return float(out) if out.ndim == 0 else out

    def cdf_left(self, x):
        x = np.asarray(x, dtype=float)
        if self.is_point_mass:
            out = (x > self.shift).astype(float)
        elif self.scale > 0:
            out = np.asarray(self.base.cdf_left(self._u(x)))
        else:
            out = 1.0 - np.asarray(self.base.cdf(self._u(x)))
        return float(out) if out.ndim == 0 else out

    def continuous_cdf(self, x):
        """Mass of the absolutely continuous part on ``(-inf, x]``."""
        x = np.asarray(x, dtype=float)
        if self.is_point_mass:
            out = np.zeros_like(x)
        elif self.scale > 0:
            out = np.asarray(self.base.continuous_cdf(self._u(x)))
        else:
            out = self.base.continuous_mass - np.asarray(self.base.continuous_cdf(self._u(x)))
        return float(out) if out.ndim == 0 else out

    def density(self, x):
        """Density of the continuous part."""
        x = np.asarray(x, dtype=float)
        if self.is_point_mass:
            out = np.zeros_like(x)
        else:
            out = np.asarray(self.base.density(self._u(x))) / abs(self.scale)
        return float(out) if out.ndim == 0 else out

    def quantile(self, q):
        """Left-continuous inverse CDF for ``q`` in (0, 1]."""
        q = np.asarray(q, dtype=float)
        if self.is_point_mass:
            out = np.full(q.shape, float(self.shift))
        elif self.scale > 0:
            out = self.shift + self.scale * np.asarray(self.base.quantile(q))
        else:
            # a decreasing map swaps left and right inverses
            out = self.shift + self.scale * np.asarray(self.base.quantile_right(1.0 - q))
        return float(out) if out.ndim == 0 else out

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        return self.shift + self.scale * self.base.sample(rng, count)
