"""Kernels f applied to squared distances.

A kernel only carries what the limit law needs: ``f(0)`` and the value and
first three derivatives at the point 2. Derivatives are stored, never
computed numerically. Built-in kernels additionally provide ``f'`` as a map so
that the first proof-chain matrix (Taylor expansion around
``||X_i||^2 + ||X_j||^2``) can be formed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError, UnsupportedOrderError

ArrayFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class AffineCoefficients:
    shift: float
    scale: float


@dataclass(frozen=True)
class Kernel:
    name: str
    evaluate: ArrayFn = field(repr=False, compare=False)
    f0: float
    f2: float
    df2: float
    d2f2: float = 0.0
    d3f2: float = 0.0
    order: int = 3
    derivative: Optional[ArrayFn] = field(default=None, repr=False, compare=False)
    spec: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.order not in (1, 2, 3):
            raise ConfigurationError(f"smoothness order must be 1, 2 or 3, got {self.order}")

    def __call__(self, x):
        return self.evaluate(np.asarray(x, dtype=float))


def limit_coefficients(kernel: Kernel) -> AffineCoefficients:
    """Shift and scale of the limit law ``shift + scale * S``, S Marchenko-Pastur."""
    return AffineCoefficients(
        shift=kernel.f0 - kernel.f2 + 2.0 * kernel.df2,
        scale=-2.0 * kernel.df2,
    )


def taylor_coefficients(kernel: Kernel) -> dict[tuple[int, int], float]:
    """Coefficients ``c[k, l]`` of ``z_i**k * z_j**l`` in the order-3 expansion of
    ``f(2 + z_i + z_j)`` around 2, for ``1 <= k + l <= 3``.

    Multinomial expansion: ``c[k, l] = f^{(k+l)}(2) / (k! l!)``.
    """
    if kernel.order < 3:
        raise UnsupportedOrderError(
            f"kernel {kernel.name!r} has order {kernel.order}; the expansion needs order 3")
    derivs = {1: kernel.df2, 2: kernel.d2f2, 3: kernel.d3f2}
    return {
        (k, m - k): derivs[m] / (factorial(k) * factorial(m - k))
        for m in (1, 2, 3)
        for k in range(m, -1, -1)
    }


# -- built-ins -------------------------------------------------------------

def identity() -> Kernel:
    return Kernel("identity", lambda x: np.asarray(x, dtype=float) * 1.0,
                  f0=0.0, f2=2.0, df2=1.0, d2f2=0.0, d3f2=0.0,
                  derivative=lambda x: np.ones_like(x, dtype=float),
                  spec={"name": "identity"})


def constant(c: float = 1.0) -> Kernel:
    c = float(c)
    return Kernel("constant", lambda x: np.full(np.shape(x), c),
                  f0=c, f2=c, df2=0.0, d2f2=0.0, d3f2=0.0,
                  derivative=lambda x: np.zeros(np.shape(x)),
                  spec={"name": "constant", "c": c})


def exponential() -> Kernel:
    """``f(x) = exp(-x)``."""
    e2 = np.exp(-2.0)
    return Kernel("exponential", lambda x: np.exp(-np.asarray(x, dtype=float)),
                  f0=1.0, f2=e2, df2=-e2, d2f2=e2, d3f2=-e2,
                  derivative=lambda x: -np.exp(-np.asarray(x, dtype=float)),
                  spec={"name": "exponential"})


def square_root() -> Kernel:
    """``f(x) = sqrt(x)``, i.e. the plain Euclidean distance matrix."""
    r2 = np.sqrt(2.0)

    def derivative(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return 0.5 / np.sqrt(x)

    return Kernel("sqrt", lambda x: np.sqrt(np.asarray(x, dtype=float)),
                  f0=0.0, f2=r2, df2=0.5 / r2,
                  d2f2=-0.25 * 2.0 ** -1.5, d3f2=0.375 * 2.0 ** -2.5,
                  derivative=derivative, spec={"name": "sqrt"})


def polynomial(coeffs) -> Kernel:
    """``f(x) = sum_k coeffs[k] x**k``."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.ndim != 1 or coeffs.size == 0:
        raise ConfigurationError("polynomial kernel needs a non-empty coefficient list")
    P = np.polynomial.Polynomial(coeffs)
    d1, d2, d3 = P.deriv(1), P.deriv(2), P.deriv(3)
    return Kernel("poly", lambda x: P(np.asarray(x, dtype=float)),
                  f0=float(coeffs[0]), f2=float(P(2.0)), df2=float(d1(2.0)),
                  d2f2=float(d2(2.0)), d3f2=float(d3(2.0)),
                  derivative=lambda x: d1(np.asarray(x, dtype=float)),
                  spec={"name": "poly", "coeffs": coeffs.tolist()})


def custom(f0, f2, df2, samples, d2f2=None, d3f2=None) -> Kernel:
    """Kernel given by tabulated values plus explicit derivatives at 2.

    ``evaluate`` interpolates linearly between the sample points (``(0, f0)`` and
    ``(2, f2)`` are added) and returns NaN outside the tabulated range. No
    derivative map is available, so the first proof-chain matrix cannot be built.
    """
    pts = {float(x): float(v) for x, v in samples}
    pts.setdefault(0.0, float(f0))
    pts.setdefault(2.0, float(f2))
    xs = np.array(sorted(pts))
    vs = np.array([pts[x] for x in xs])
    lo, hi = xs[0], xs[-1]

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        out = np.interp(x, xs, vs)
        return np.where((x < lo) | (x > hi), np.nan, out)

    order = 1 if d2f2 is None else (2 if d3f2 is None else 3)
    spec = {"name": "custom", "f0": float(f0), "f2": float(f2), "df2": float(df2),
            "samples": [[float(x), pts[x]] for x in xs]}
    if d2f2 is not None:
        spec["d2f2"] = float(d2f2)
    if d3f2 is not None:
        spec["d3f2"] = float(d3f2)
    return Kernel("custom", evaluate, f0=float(f0), f2=float(f2), df2=float(df2),
                  d2f2=float(d2f2 or 0.0), d3f2=float(d3f2 or 0.0), order=order, spec=spec)


_BUILTINS = {
    "identity": identity,
    "constant": constant,
    "exponential": exponential,
    "exp": exponential,
    "sqrt": square_root,
    "square_root": square_root,
}


def kernel_from_config(cfg) -> Kernel:
    """Build a kernel from ``"name"``, ``{"name": ...}``, ``{"name": "poly", "coeffs": [...]}``
    or ``{"name": "custom", "f0": ..., "f2": ..., "df2": ..., "d2f2": ..., "d3f2": ...,
    "samples": [[x, f(x)], ...]}``.
    """
    if isinstance(cfg, Kernel):
        return cfg
    if isinstance(cfg, str):
        cfg = {"name": cfg}
    if not isinstance(cfg, dict) or "name" not in cfg:
        raise ConfigurationError(f"kernel config must name a kernel, got {cfg!r}")
    name = str(cfg["name"]).lower()
    if name in ("poly", "polynomial"):
        return polynomial(cfg.get("coeffs", ()))
    if name == "custom":
        try:
            return custom(cfg["f0"], cfg["f2"], cfg["df2"], cfg.get("samples", ()),
                          d2f2=cfg.get("d2f2"), d3f2=cfg.get("d3f2"))
        except KeyError as exc:
            raise ConfigurationError(f"custom kernel is missing field {exc.args[0]!r}") from None
    if name == "constant":
        return constant(cfg.get("c", 1.0))
    try:
        return _BUILTINS[name]()
    except KeyError:
        raise ConfigurationError(f"unknown kernel {cfg['name']!r}") from None
