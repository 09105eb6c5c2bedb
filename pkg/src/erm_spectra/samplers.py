"""Isotropic random vectors in R^p.

Every family is scaled so that ``E[Y] = 0`` and ``E[Y Y^T] = I / p``, hence
``E ||Y||^2 = 1``. Samples are returned column-wise: a data matrix has shape
``(p, n)`` with one observation per column.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, ConfigurationError

#: Upper bound on ``p * n`` for a single data matrix (float64 entries).
MAX_DATA_ENTRIES = 200_000_000


class FamilyKind(str, enum.Enum):
    GAUSSIAN = "gaussian"
    UNIFORM_BALL = "uniform_ball"
    UNIFORM_SPHERE = "uniform_sphere"
    UNIFORM_CUBE = "uniform_cube"
    LAPLACE = "laplace"

    @classmethod
    def _missing_(cls, value):
        # accept "UniformBall", "uniform-ball", "UNIFORM_BALL", ...
        if isinstance(value, str):
            key = value.replace("-", "").replace("_", "").lower()
            for member in cls:
                if member.value.replace("_", "") == key:
                    return member
        return None

    @property
    def log_concave(self) -> bool:
        return self is not FamilyKind.UNIFORM_SPHERE


@dataclass(frozen=True)
class VectorFamily:
    kind: FamilyKind
    p: int

    def __post_init__(self):
        object.__setattr__(self, "kind", FamilyKind(self.kind))
        if int(self.p) != self.p or self.p < 1:
            raise ConfigurationError(f"dimension must be a positive integer, got {self.p!r}")
        object.__setattr__(self, "p", int(self.p))


@dataclass(frozen=True)
class IsotropyReport:
    mean_norm: float
    """Euclidean norm of the empirical mean vector."""
    max_offdiag: float
    """max |p * Cov_kl| over k != l."""
    max_diag_dev: float
    """max |p * Cov_kk - 1|."""
    mean_sq_norm: float
    samples: int


def _draw(kind: FamilyKind, p: int, n: int, rng: np.random.Generator) -> np.ndarray:
    if kind is FamilyKind.GAUSSIAN:
        return rng.standard_normal((p, n)) / np.sqrt(p)
    if kind is FamilyKind.UNIFORM_CUBE:
        half_width = np.sqrt(3.0 / p)
        return rng.uniform(-half_width, half_width, size=(p, n))
    if kind is FamilyKind.LAPLACE:
        return rng.laplace(0.0, 1.0 / np.sqrt(2.0 * p), size=(p, n))
    directions = rng.standard_normal((p, n))
    directions /= np.linalg.norm(directions, axis=0)
    if kind is FamilyKind.UNIFORM_SPHERE:
        return _snap_to_unit_norm(directions)
    # uniform on the ball of radius r: E||Y||^2 = r^2 p / (p + 2)
    radius = np.sqrt((p + 2.0) / p)
    return directions * (radius * rng.random(n) ** (1.0 / p))


def squared_norms(X: np.ndarray) -> np.ndarray:
    """Column-wise ``||X_i||^2``, summed strictly in coordinate order.

    The fixed order makes the result a function of the column values alone
    (independent of memory layout or BLAS), which the sphere sampler relies on.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    sq = X * X
    out = sq[0].copy()
    for row in sq[1:]:
        out += row
    return out


def _snap_to_unit_norm(U: np.ndarray, steps: int = 8) -> np.ndarray:
    # Make squared_norms(U) == 1 exactly by re-solving one coordinate; it moves by a
    # few ulps. The last coordinate is tried first (vectorised); columns where its
    # square is too coarse fall back to a bisection on the smallest coordinate.
    p = U.shape[0]
    head = squared_norms(U[:-1]) if p > 1 else np.zeros(U.shape[1])
    sign = np.where(U[-1] < 0, -1.0, 1.0)
    last = sign * np.sqrt(np.maximum(1.0 - head, 0.0))
    for _ in range(steps):
        total = head + last * last
        off = total != 1.0
        if not off.any():
            break
        toward = np.where(total > 1.0, 0.0, sign * 2.0)
        last = np.where(off, np.nextafter(last, toward), last)
    U[-1] = last
    for col in np.flatnonzero(head + last * last != 1.0):
        _bisect_unit(U[:, col])
    return U


def _bisect_unit(u: np.ndarray) -> None:
    k = int(np.argmin(np.abs(u)))
    sign = -1.0 if u[k] < 0 else 1.0
    lo, hi = 0, int(np.float64(1.0).view(np.int64))

    def total(bits):
        u[k] = sign * np.int64(bits).view(np.float64)
        return squared_norms(u)[0]

    original = u[k]
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if total(mid) < 1.0:
            lo = mid
        else:
            hi = mid
    if total(hi) != 1.0:
        u[k] = original


def sample_vector(family: VectorFamily, rng: np.random.Generator) -> np.ndarray:
    """One draw of shape ``(p,)``."""
    return _draw(family.kind, family.p, 1, rng)[:, 0]


def sample_data_matrix(family: VectorFamily, n: int, rng: np.random.Generator,
                       max_entries: int = MAX_DATA_ENTRIES) -> np.ndarray:
    """``(p, n)`` matrix whose columns are i.i.d. draws from ``family``."""
    if int(n) != n or n < 1:
        raise ConfigurationError(f"sample count must be a positive integer, got {n!r}")
    if family.p * n > max_entries:
        raise CapacityError(f"p*n = {family.p * n} exceeds the cap of {max_entries} entries")
    return _draw(family.kind, family.p, int(n), rng)


def check_isotropy(X: np.ndarray) -> IsotropyReport:
    """Empirical isotropy diagnostics for the columns of ``X``. Never thresholds."""
    X = np.asarray(X, dtype=float)
    p, n = X.shape
    if n < 2:
        raise ValueError("isotropy diagnostics need at least two samples")
    mean = X.mean(axis=1)
    cov = np.atleast_2d(np.cov(X))
    scaled = p * cov
    diag = np.diag(scaled).copy()
    off = scaled - np.diag(diag)
    return IsotropyReport(
        mean_norm=float(np.linalg.norm(mean)),
        max_offdiag=float(np.max(np.abs(off))) if p > 1 else 0.0,
        max_diag_dev=float(np.max(np.abs(diag - 1.0))),
        mean_sq_norm=float(np.mean(squared_norms(X))),
        samples=n,
    )


def trial_rng(master_seed: int, *key: int) -> np.random.Generator:
    """Independent stream for trial ``key`` derived only from ``(master_seed, key)``."""
    seq = np.random.SeedSequence(int(master_seed) & (2**64 - 1), spawn_key=tuple(int(k) for k in key))
    return np.random.default_rng(seq)
