"""Euclidean, Gram and linearised matrices, plus the proof-chain matrices.

All builders take a data matrix ``X`` of shape ``(p, n)`` (columns are the
points) and return dense symmetric ``(n, n)`` float arrays.

The chain ``A -> B -> C -> D -> E -> M`` interpolates between the Euclidean
matrix ``A_ij = f(||X_i - X_j||^2)`` and its linearisation ``M``:

* ``B``: first-order expansion around ``s_ij = ||X_i||^2 + ||X_j||^2``
* ``C``: same, with the slope frozen at ``f'(2)``
* ``D``: order-3 expansion of ``f(s_ij)`` around 2
* ``E``: ``M + sum c_kl z_i^k z_j^l`` on every entry, diagonal included

``B``, ``C`` and ``D`` have ``f(0)`` on the diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import CapacityError, DomainError, KernelEvaluationError
from .kernels import Kernel, taylor_coefficients
from .samplers import squared_norms

MAX_ORDER = 4096


@dataclass(frozen=True)
class EventEResult:
    epsilon: float
    holds: bool
    max_pair_dev: float
    max_norm_dev: float


@dataclass(frozen=True)
class ProofChain:
    B: Optional[np.ndarray]
    C: np.ndarray
    D: np.ndarray
    E: np.ndarray

    def as_dict(self) -> dict:
        return {k: v for k, v in zip("BCDE", (self.B, self.C, self.D, self.E)) if v is not None}


def _as_data(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] < 1:
        raise ValueError(f"data matrix must have shape (p, n) with n >= 1, got {X.shape}")
    if X.shape[1] > MAX_ORDER:
        raise CapacityError(f"n = {X.shape[1]} exceeds the dense-matrix cap of {MAX_ORDER}")
    return X


def squared_distances(X) -> np.ndarray:
    """``||X_i - X_j||^2`` for all column pairs, exact zeros on the diagonal."""
    X = _as_data(X)
    if X.shape[1] == 1:
        return np.zeros((1, 1))
    return squareform(pdist(X.T, "sqeuclidean"))


def _apply(kernel: Kernel, values: np.ndarray, what: str) -> np.ndarray:
    with np.errstate(all="ignore"):
        out = np.asarray(kernel(values), dtype=float)
    bad = ~np.isfinite(out)
    if bad.any():
        loc = tuple(int(i) for i in np.argwhere(bad)[0])
        raise KernelEvaluationError(
            f"kernel {kernel.name!r} is not finite at {values[loc]!r} while building {what} "
            f"(entry {loc})", location=loc)
    return out


def build_euclidean(X, kernel: Kernel) -> np.ndarray:
    """``A_ij = f(||X_i - X_j||^2)`` with the diagonal set to ``f(0)``."""
    sq = squared_distances(X)
    A = _apply(kernel, sq, "A")
    np.fill_diagonal(A, kernel.f0)
    return A


def build_gram(X) -> np.ndarray:
    """``X^T X``; the diagonal is taken from :func:`squared_norms`."""
    X = _as_data(X)
    G = X.T @ X
    # BLAS may round the two triangles differently
    G = np.triu(G, 1) + np.triu(G, 1).T
    G[np.diag_indices_from(G)] = squared_norms(X)
    return G


def build_linearized(X, kernel: Kernel, gram: Optional[np.ndarray] = None) -> np.ndarray:
    """``M = (f(0) - f(2) + 2f'(2)) I + f(2) J - 2 f'(2) X^T X``."""
    G = build_gram(X) if gram is None else gram
    M = kernel.f2 - 2.0 * kernel.df2 * G
    # same value as the displayed sum, written as f(0) - 2 f'(2) z_i
    M[np.diag_indices_from(M)] = kernel.f0 - 2.0 * kernel.df2 * (np.diag(G) - 1.0)
    return M


def norm_deviations(X) -> np.ndarray:
    """``z_i = ||X_i||^2 - 1``."""
    return squared_norms(_as_data(X)) - 1.0


def build_proof_chain(X, kernel: Kernel, gram: Optional[np.ndarray] = None) -> ProofChain:
    """Matrices ``B, C, D, E``. ``B`` is ``None`` when the kernel has no derivative map."""
    coeffs = taylor_coefficients(kernel)
    X = _as_data(X)
    G = build_gram(X) if gram is None else gram
    z = norm_deviations(X)
    n = z.size
    idx = np.diag_indices(n)
    s = (z[:, None] + 1.0) + (z[None, :] + 1.0)

    f_s = _apply(kernel, s, "B/C")
    B = None
    if kernel.derivative is not None:
        with np.errstate(all="ignore"):
            df_s = np.asarray(kernel.derivative(s), dtype=float)
        if not np.all(np.isfinite(df_s)):
            raise DomainError(f"derivative of kernel {kernel.name!r} undefined where B needs it")
        B = f_s - 2.0 * df_s * G
        B[idx] = kernel.f0
    C = f_s - 2.0 * kernel.df2 * G
    C[idx] = kernel.f0

    h = z[:, None] + z[None, :]
    D = (kernel.f2 + kernel.df2 * h + 0.5 * kernel.d2f2 * h ** 2
         + kernel.d3f2 / 6.0 * h ** 3 - 2.0 * kernel.df2 * G)
    D[idx] = kernel.f0

    # off the diagonal E coincides with D; only the diagonal follows its own formula
    M_diag = np.diag(build_linearized(X, kernel, gram=G))
    E = D.copy()
    E[idx] = M_diag + sum(c * z ** (k + l) for (k, l), c in coeffs.items())
    return ProofChain(B, C, D, E)


def expansion_correction(z: np.ndarray, kernel: Kernel) -> np.ndarray:
    """``sum_{1<=k+l<=3} c_kl Z_k Z_l^T`` where ``Z_k = (z_i^k)_i``; equals ``E - M``."""
    out = np.zeros((z.size, z.size))
    for (k, l), c in taylor_coefficients(kernel).items():
        out += c * np.outer(z ** k, z ** l)
    return out


def check_event(X, epsilon: float) -> EventEResult:
    """Whether all ``||X_i||^2`` are within ``epsilon`` of 1 and all ``||X_i - X_j||^2``
    (``i != j``) within ``epsilon`` of 2."""
    if not epsilon >= 0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon!r}")
    X = _as_data(X)
    norm_dev = float(np.max(np.abs(norm_deviations(X))))
    if X.shape[1] > 1:
        pair_dev = float(np.max(np.abs(pdist(X.T, "sqeuclidean") - 2.0)))
    else:
        pair_dev = 0.0
    return EventEResult(float(epsilon), max(pair_dev, norm_dev) <= epsilon, pair_dev, norm_dev)


def numerical_rank(m: np.ndarray) -> int:
    """Singular values at or below ``n * eps * s_max`` count as zero."""
    m = np.asarray(m, dtype=float)
    s = np.linalg.svd(m, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    tol = max(m.shape) * np.finfo(float).eps * s[0]
    return int(np.count_nonzero(s > tol))
