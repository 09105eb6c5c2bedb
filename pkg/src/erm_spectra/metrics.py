"""Distances between spectral distributions and the two perturbation inequalities.

* Kolmogorov-Smirnov: ``sup_x |F_a(x) - F_b(x)|``
* Wasserstein ``W_p``, p in {1, 2}: in one dimension the monotone (quantile)
  coupling is optimal, so ``W_p^p = int_0^1 |Q_a(u) - Q_b(u)|^p du``.
* ``d_upper = min(ks, w1)`` bounds the distance defined as a supremum over test
  functions that are both 1-Lipschitz and of total variation at most 1.

The rank inequality ``ks(mu_B, mu_C) <= rank(B - C) / n`` and the
Hoffman-Wielandt inequality ``W_2(mu_B, mu_C) <= ||B - C||_F / sqrt(n)`` are
checked by :func:`verify_rank_inequality` and :func:`verify_hw_inequality`.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .laws import LimitLaw
from .matrices import numerical_rank
from .spectral import SpectralDistribution, eigenvalues_symmetric, esd

INEQUALITY_SLACK = 1e-8


@dataclass(frozen=True)
class DistanceReport:
    ks: float
    w1: float
    w2: float

    @property
    def d_upper(self) -> float:
        return min(self.ks, self.w1)

    def as_dict(self) -> dict:
        out = asdict(self)
        out["d_upper"] = self.d_upper
        return out


@dataclass(frozen=True)
class InequalityCheck:
    lhs: float
    rhs: float
    holds: bool

    def as_dict(self) -> dict:
        return asdict(self)


def _dist(a) -> SpectralDistribution:
    return a if isinstance(a, SpectralDistribution) else esd(a)


def ks_distance(a, b) -> float:
    a, b = _dist(a), _dist(b)
    pts = np.union1d(a.eigenvalues, b.eigenvalues)
    # integer arithmetic keeps e.g. 1/n exact
    diff = np.abs(a.counts(pts) * b.n - b.counts(pts) * a.n)
    return float(np.max(diff)) / (a.n * b.n)


def ks_vs_law(a, law: LimitLaw) -> float:
    """``sup_x |F_a(x) - F(x)|`` against a limit law.

    Between consecutive jump points of either CDF both are monotone and ``F_a``
    is constant, so the supremum is attained as a one-sided limit at an
    eigenvalue or at the law's atom; both sides are evaluated there.
    """
    a = _dist(a)
    pts = a.eigenvalues
    if law.atom_mass > 0:
        pts = np.union1d(pts, [law.atom_location])
    n = a.n
    right = np.abs(a.counts(pts) - n * np.asarray(law.cdf(pts))) / n
    left = np.abs(a.counts_left(pts) - n * np.asarray(law.cdf_left(pts))) / n
    return float(max(right.max(), left.max()))


def _quantile_coupling(a: SpectralDistribution, b: SpectralDistribution):
    # breakpoints of both quantile functions on (0, 1]
    qa = np.arange(1, a.n + 1) / a.n
    qb = np.arange(1, b.n + 1) / b.n
    levels = np.union1d(qa, qb)
    widths = np.diff(np.concatenate(([0.0], levels)))
    mids = levels - 0.5 * widths
    return widths, a.quantile(mids), b.quantile(mids)


def wasserstein(a, b, order: int = 1) -> float:
    """``W_order`` between two empirical distributions (order 1 or 2)."""
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    a, b = _dist(a), _dist(b)
    if a.n == b.n:
        gaps = np.abs(a.eigenvalues - b.eigenvalues)
        return float(np.mean(gaps ** order) ** (1.0 / order))
    widths, xa, xb = _quantile_coupling(a, b)
    return float(np.sum(widths * np.abs(xa - xb) ** order) ** (1.0 / order))


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


def wasserstein_vs_law(a, law: LimitLaw, order: int = 1) -> float:
    """``W_order`` between an ESD and a limit law.

    ``int_0^1 |Q_a(u) - Q(u)|^p du`` is integrated with 8-point Gauss-Legendre
    on each interval ``((i-1)/n, i/n)`` where ``Q_a`` is constant.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    a = _dist(a)
    n = a.n
    left = np.arange(n) / n
    u = left[:, None] + (0.5 / n) * (_GL_NODES + 1.0)
    q = np.asarray(law.quantile(u.ravel())).reshape(u.shape)
    integrand = np.abs(q - a.eigenvalues[:, None]) ** order
    total = np.sum(integrand * _GL_WEIGHTS) * (0.5 / n)
    return float(total ** (1.0 / order))


def distance_report(a, b) -> DistanceReport:
    """KS, W1 and W2 between an ESD and either another ESD or a :class:`LimitLaw`."""
    if isinstance(b, LimitLaw):
        return DistanceReport(ks_vs_law(a, b), wasserstein_vs_law(a, b, 1), wasserstein_vs_law(a, b, 2))
    return DistanceReport(ks_distance(a, b), wasserstein(a, b, 1), wasserstein(a, b, 2))


def _same_order(B, C):
    B = np.asarray(B, dtype=float)
    C = np.asarray(C, dtype=float)
    if B.shape != C.shape or B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise ValueError(f"matrices must be square and of the same order, got {B.shape} and {C.shape}")
    return B, C


def merge_ties(a, b, tol: float):
    """Replace values of ``a`` and ``b`` that lie within ``tol`` of each other (chained
    over the sorted union) by the smallest member of their cluster."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    allv = np.concatenate([a, b])
    order = np.argsort(allv, kind="stable")
    srt = allv[order]
    starts = np.concatenate(([True], np.diff(srt) > tol))
    rep = srt[starts][np.cumsum(starts) - 1]
    merged = np.empty_like(allv)
    merged[order] = rep
    return merged[: a.size], merged[a.size:]


def verify_rank_inequality(B, C, eig_b=None, eig_c=None) -> InequalityCheck:
    """``ks(mu_B, mu_C) <= rank(B - C) / n``.

    Eigenvalues of the two spectra closer than ``n * eps * max(||B||, ||C||)``
    are treated as equal: a multiple eigenvalue shared by ``B`` and ``C`` comes
    back from the solver as a cluster whose internal order is rounding noise.
    """
    B, C = _same_order(B, C)
    n = B.shape[0]
    eb = eigenvalues_symmetric(B) if eig_b is None else np.asarray(eig_b)
    ec = eigenvalues_symmetric(C) if eig_c is None else np.asarray(eig_c)
    scale = max(np.max(np.abs(eb)), np.max(np.abs(ec)))
    eb, ec = merge_ties(eb, ec, n * np.finfo(float).eps * scale)
    lhs = ks_distance(eb, ec)
    rhs = numerical_rank(B - C) / n
    return InequalityCheck(lhs, rhs, lhs <= rhs + INEQUALITY_SLACK)


def verify_hw_inequality(B, C, eig_b=None, eig_c=None) -> InequalityCheck:
    B, C = _same_order(B, C)
    n = B.shape[0]
    eb = eigenvalues_symmetric(B) if eig_b is None else eig_b
    ec = eigenvalues_symmetric(C) if eig_c is None else eig_c
    lhs = wasserstein(eb, ec, 2)
    rhs = float(np.linalg.norm(B - C, "fro") / np.sqrt(n))
    return InequalityCheck(lhs, rhs, lhs <= rhs + INEQUALITY_SLACK)
