"""Monte Carlo checks of the probabilistic ingredients.

* thin-shell tails ``P(| ||Y|| - 1 | >= t)`` and a fitted decay exponent
  against ``sqrt(p) * min(t, t^3)``
* the inner-product moment ``E (X_1^T X_2)^2 = 1/p``
* the norm moment ``p * E | ||Y|| - 1 |^(2 l)``
* concentration of linear spectral statistics ``int g d mu_A`` against the
  envelope ``exp(-n t^2 / (8 ||g||_BV^2))``

Universal constants are never asserted; only measured quantities are reported.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import stats

from .kernels import Kernel
from .matrices import build_euclidean
from .samplers import VectorFamily, sample_data_matrix, squared_norms, trial_rng
from .spectral import eigenvalues_symmetric

_Z = stats.norm.ppf(0.975)


def wilson_interval(successes, trials, z: float = _Z):
    """Wilson score interval; returns ``(center, halfwidth)`` arrays."""
    k = np.asarray(successes, dtype=float)
    n = float(trials)
    phat = k / n
    denom = 1.0 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = z * np.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    return center, half


@dataclass
class TailEstimate:
    thresholds: np.ndarray
    empirical_prob: np.ndarray
    trials: int
    wilson_halfwidth: np.ndarray
    p: int
    decay_exponent: Optional[float] = None
    """Slope ``c0`` of ``-log P`` against ``sqrt(p) * min(t, t^3)`` (None if unfittable)."""
    log_prefactor: Optional[float] = None

    def rows(self):
        return list(zip(self.thresholds.tolist(), self.empirical_prob.tolist(),
                        self.wilson_halfwidth.tolist()))


@dataclass
class MomentEstimate:
    value: float
    std_error: float
    trials: int


def _norms(family: VectorFamily, trials: int, rng) -> np.ndarray:
    X = sample_data_matrix(family, trials, rng)
    return np.sqrt(squared_norms(X))


def thin_shell_tail(family: VectorFamily, thresholds: Sequence[float], trials: int,
                    rng: np.random.Generator) -> TailEstimate:
    if trials < 100:
        raise ValueError("thin-shell tail estimation needs at least 100 trials")
    t = np.asarray(thresholds, dtype=float)
    dev = np.abs(_norms(family, trials, rng) - 1.0)
    hits = np.array([np.count_nonzero(dev >= ti) for ti in t])
    prob = hits / trials
    _, half = wilson_interval(hits, trials)
    est = TailEstimate(t, prob, trials, half, family.p)

    # fit log P = log c1 - c0 * sqrt(p) * min(t, t^3) on thresholds with 0 < P
    u = np.sqrt(family.p) * np.minimum(t, t ** 3)
    ok = (prob > 0) & (t > 0)
    if np.count_nonzero(ok) >= 2 and np.ptp(u[ok]) > 0:
        slope, intercept = np.polyfit(u[ok], np.log(prob[ok]), 1)
        est.decay_exponent = float(-slope)
        est.log_prefactor = float(intercept)
    return est


def tail_sweep(kind, dims: Sequence[int], threshold: float, trials: int, master_seed: int):
    """Empirical tail at one threshold over a sweep of dimensions."""
    return [thin_shell_tail(VectorFamily(kind, p), [threshold], trials, trial_rng(master_seed, p))
            for p in dims]


def inner_product_moment(family: VectorFamily, trials: int, rng: np.random.Generator) -> MomentEstimate:
    """Mean of ``(X_1^T X_2)^2`` over independent pairs; should be ``1/p``."""
    if trials < 100:
        raise ValueError("moment estimation needs at least 100 trials")
    X1 = sample_data_matrix(family, trials, rng)
    X2 = sample_data_matrix(family, trials, rng)
    vals = np.einsum("ij,ij->j", X1, X2) ** 2
    return MomentEstimate(float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(trials)), trials)


def norm_moment_condition(family: VectorFamily, ell: int, trials: int,
                          rng: np.random.Generator) -> MomentEstimate:
    """Estimate of ``p * E | ||Y|| - 1 |^(2 ell)``."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    if trials < 2:
        raise ValueError("need at least two trials")
    vals = family.p * np.abs(_norms(family, trials, rng) - 1.0) ** (2 * ell)
    return MomentEstimate(float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(trials)), trials)


@dataclass
class ConcentrationResult:
    n: int
    p: int
    bv_norm: float
    statistics: np.ndarray
    thresholds: np.ndarray
    empirical: np.ndarray
    envelope: np.ndarray
    wilson_halfwidth: np.ndarray
    violations: list = field(default_factory=list)

    @property
    def deviations(self) -> np.ndarray:
        return self.statistics - self.statistics.mean()

    @property
    def ok(self) -> bool:
        return not self.violations

    def rows(self):
        return list(zip(self.thresholds.tolist(), self.empirical.tolist(), self.envelope.tolist()))


def azuma_envelope(n: int, t, bv_norm: float):
    """``exp(-n t^2 / (8 ||g||_BV^2))``; a zero BV norm gives the step 1(t == 0)."""
    t = np.asarray(t, dtype=float)
    if bv_norm == 0:
        return np.where(t > 0, 0.0, 1.0)
    return np.exp(-n * t * t / (8.0 * bv_norm ** 2))


def statistic_concentration(family: VectorFamily, kernel: Kernel, n: int,
                            test_function: Callable[[np.ndarray], np.ndarray], bv_norm: float,
                            thresholds: Sequence[float], trials: int, master_seed: int,
                            slack_halfwidths: float = 3.0) -> ConcentrationResult:
    """Upper deviations of ``int g d mu_A`` from their Monte Carlo mean.

    Trial ``k`` draws its data from ``trial_rng(master_seed, k)``. A threshold is
    flagged when the exceedance frequency is above the envelope by more than
    ``slack_halfwidths`` Wilson half-widths.
    """
    if trials < 200:
        raise ValueError("concentration checks need at least 200 trials")
    stat = np.empty(trials)
    for k in range(trials):
        X = sample_data_matrix(family, n, trial_rng(master_seed, k))
        stat[k] = np.mean(test_function(eigenvalues_symmetric(build_euclidean(X, kernel))))
    t = np.asarray(thresholds, dtype=float)
    dev = stat - stat.mean()
    hits = np.array([np.count_nonzero(dev >= ti) for ti in t])
    emp = hits / trials
    _, half = wilson_interval(hits, trials)
    env = azuma_envelope(n, t, bv_norm)
    bad = [float(ti) for ti, e, b, h in zip(t, emp, env, half) if e > b + slack_halfwidths * h]
    return ConcentrationResult(n, family.p, float(bv_norm), stat, t, emp, env, half, bad)


#: test functions with exact total variation on the real line
TEST_FUNCTIONS = {
    "arctan": (np.arctan, np.pi),
    "tanh": (np.tanh, 2.0),
    "constant": (lambda x: np.zeros_like(x), 0.0),
}
