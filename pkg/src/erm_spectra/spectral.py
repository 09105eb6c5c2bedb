"""Eigenvalues of real symmetric matrices and empirical spectral distributions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import SolverError

#: eigenvalues with ``|lambda| <= ZERO_ATOM_RTOL * ||m||`` are snapped to 0 by :func:`spectrum`
ZERO_ATOM_RTOL = 1e-8


def _check_symmetric(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ValueError(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def eigenvalues_symmetric(m, return_vectors: bool = False):
    """All eigenvalues of the symmetric matrix ``m`` in ascending order.

    Only the lower triangle is read. With ``return_vectors`` the orthonormal
    eigenvectors are returned as the columns of a second array.
    """
    m = _check_symmetric(m)
    try:
        if return_vectors:
            w, v = scipy.linalg.eigh(m, lower=True, check_finite=False)
            return w, v
        return scipy.linalg.eigh(m, lower=True, eigvals_only=True, check_finite=False)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise SolverError(f"symmetric eigensolver failed: {exc}") from exc


def eigen_residuals(m, w, v) -> np.ndarray:
    """``||m v_k - w_k v_k||`` for each eigenpair."""
    m = np.asarray(m, dtype=float)
    return np.linalg.norm(m @ v - v * w, axis=0)


@dataclass(frozen=True)
class SpectralDistribution:
    """Uniform probability measure on a multiset of reals (sorted ascending)."""

    eigenvalues: np.ndarray

    def __post_init__(self):
        ev = np.sort(np.asarray(self.eigenvalues, dtype=float).ravel())
        if ev.size == 0:
            raise ValueError("a spectral distribution needs at least one value")
        if not np.all(np.isfinite(ev)):
            raise ValueError("spectral distribution values must be finite")
        ev.setflags(write=False)
        object.__setattr__(self, "eigenvalues", ev)

    @property
    def n(self) -> int:
        return self.eigenvalues.size

    def counts(self, x) -> np.ndarray:
        """Number of values ``<= x``."""
        return np.searchsorted(self.eigenvalues, x, side="right")

    def counts_left(self, x) -> np.ndarray:
        """Number of values ``< x``."""
        return np.searchsorted(self.eigenvalues, x, side="left")

    def cdf(self, x):
        out = self.counts(x) / self.n
        return float(out) if np.ndim(out) == 0 else out

    def quantile(self, q):
        """Left-continuous inverse ``inf{x : cdf(x) >= q}`` for ``q`` in (0, 1]."""
        q = np.asarray(q, dtype=float)
        if np.any((q <= 0) | (q > 1)):
            raise ValueError("quantile levels must lie in (0, 1]")
        idx = np.ceil(q * self.n - 1e-12).astype(int) - 1
        out = self.eigenvalues[np.clip(idx, 0, self.n - 1)]
        return float(out) if out.ndim == 0 else out

    def mean(self) -> float:
        return float(np.mean(self.eigenvalues))

    def moment(self, k: int) -> float:
        return float(np.mean(self.eigenvalues ** k))


def esd(eigs) -> SpectralDistribution:
    return SpectralDistribution(np.asarray(eigs, dtype=float))


def spectrum(m, atoms=(0.0,)) -> SpectralDistribution:
    """ESD of a symmetric matrix with atoms cleaned up.

    Eigenvalues within ``ZERO_ATOM_RTOL * ||m||`` of a location in ``atoms``
    (0 by default) are set exactly to it, so that a multiple eigenvalue
    returned as a rounding-level cluster compares correctly with a point mass.
    """
    w = eigenvalues_symmetric(m)
    tol = ZERO_ATOM_RTOL * np.max(np.abs(w))
    for a in atoms:
        w = np.where(np.abs(w - a) <= tol, a, w)
    return SpectralDistribution(w)
