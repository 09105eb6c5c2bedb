"""Convergence experiments and single-dataset analysis.

One *trial* samples ``X`` (``p x n``, ``p = round(y n)``), builds the Euclidean
matrix ``A``, its linearisation ``M`` and the Gram matrix, and compares their
spectra with the predicted limit law. When the kernel has order 3 the
proof-chain matrices are built as well and every adjacent pair is checked
against the rank and Hoffman-Wielandt inequalities.

Outputs (when an output directory is configured):

``report.json``
    configuration, per-trial records and per-n aggregates
``eigenvalues_n{n}.csv``
    one row per trial: trial index followed by the eigenvalues of ``A``
``histogram_n{n}.tsv``
    pooled ESD of ``A`` over the trials against the predicted density
"""

from __future__ import annotations

import csv
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from . import __version__
from .errors import ConfigurationError, DataFormatError, ErmError, InequalityViolation
from .kernels import Kernel, kernel_from_config
from .laws import LimitLaw
from .matrices import (build_euclidean, build_gram, build_linearized, build_proof_chain,
                       check_event)
from .metrics import (INEQUALITY_SLACK, distance_report, verify_hw_inequality,
                      verify_rank_inequality, wasserstein)
from .samplers import FamilyKind, VectorFamily, sample_data_matrix, trial_rng
from .spectral import SpectralDistribution, eigenvalues_symmetric, esd, spectrum

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
FLOAT_FORMAT = "%.17g"


@dataclass
class ExperimentConfig:
    family: str = "gaussian"
    kernel: Union[str, dict] = "exponential"
    n_list: Sequence[int] = (250, 500, 1000)
    y: float = 1.0
    trials: int = 1
    seed: int = 0
    epsilon: Optional[float] = None
    """Tolerance of the concentration event; ``None`` means ``n ** (-1/8)``."""
    out: Optional[str] = None
    threads: int = 1
    bins: int = 60
    proof_chain: bool = True

    def __post_init__(self):
        self.family = FamilyKind(self.family).value
        self.n_list = [int(n) for n in self.n_list]
        if not self.n_list or any(n < 1 for n in self.n_list):
            raise ConfigurationError("n_list must be a non-empty list of positive counts")
        if any(b <= a for a, b in zip(self.n_list, self.n_list[1:])):
            raise ConfigurationError("n_list must be strictly increasing")
        if not (np.isfinite(self.y) and self.y > 0):
            raise ConfigurationError(f"ratio y must be positive, got {self.y!r}")
        if int(self.trials) < 1:
            raise ConfigurationError("trials must be >= 1")
        if self.epsilon is not None and not self.epsilon >= 0:
            raise ConfigurationError("epsilon must be >= 0")
        self.trials = int(self.trials)
        self.seed = int(self.seed)
        self.threads = max(1, int(self.threads))
        kernel_from_config(self.kernel)  # validate early

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        path = Path(path)
        text = path.read_text(encoding="utf-8")
        if path.suffix.lower() in (".yaml", ".yml"):
            import yaml

            data = yaml.safe_load(text)
        else:
            data = json.loads(text)
        if not isinstance(data, dict):
            raise ConfigurationError(f"{path} does not contain a mapping")
        return cls.from_dict(data)

    def dimension(self, n: int) -> int:
        return max(1, int(round(self.y * n)))

    def epsilon_for(self, n: int) -> float:
        return float(self.epsilon) if self.epsilon is not None else n ** (-1.0 / 8.0)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["n_list"] = list(self.n_list)
        d["kernel"] = kernel_from_config(self.kernel).spec
        return d


@dataclass
class ExperimentReport:
    config: dict
    trials: list = field(default_factory=list)
    aggregates: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    violations: list = field(default_factory=list)
    schema_version: int = SCHEMA_VERSION
    package_version: str = __version__

    def as_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True, allow_nan=False) + "\n"

    def trials_for(self, n: int) -> list:
        return [t for t in self.trials if t["n"] == n]


# -- single trial -----------------------------------------------------------

def _check_pair(name, P, Q, eig_p, eig_q, violations):
    rank = verify_rank_inequality(P, Q, eig_p, eig_q)
    hw = verify_hw_inequality(P, Q, eig_p, eig_q)
    for label, chk in (("rank", rank), ("hoffman-wielandt", hw)):
        if not chk.holds:
            violations.append(f"{label} inequality fails for {name}: {chk.lhs!r} > {chk.rhs!r}")
    return {"rank": rank.as_dict(), "hw": hw.as_dict()}


def analyze_matrix_data(X: np.ndarray, kernel: Kernel, law: LimitLaw, epsilon: float,
                        proof_chain: bool = True) -> tuple[dict, SpectralDistribution, SpectralDistribution]:
    """All measurements for one data matrix.

    Returns the trial record plus the ESDs of ``A`` and ``M`` (for pooling).
    Inequality violations are listed under ``"violations"`` in the record.
    """
    p, n = X.shape
    violations: list[str] = []
    A = build_euclidean(X, kernel)
    G = build_gram(X)
    M = build_linearized(X, kernel, gram=G)
    raw = {"A": eigenvalues_symmetric(A), "M": eigenvalues_symmetric(M)}
    atoms = (0.0, law.atom_location) if law.atom_mass > 0 else (0.0,)
    mu_A, mu_M = spectrum(A, atoms), spectrum(M, atoms)
    mu_G = spectrum(G)
    mp = LimitLaw(law.base)

    record = {
        "n": n,
        "p": p,
        "y_effective": p / n,
        "A_vs_law": distance_report(mu_A, law).as_dict(),
        "M_vs_law": distance_report(mu_M, law).as_dict(),
        "A_vs_M": distance_report(mu_A, mu_M).as_dict(),
        "gram_vs_mp": distance_report(mu_G, mp).as_dict(),
        "gram_mean": mu_G.mean(),
        "event": asdict(check_event(X, epsilon)),
        "frobenius_A_M": float(np.linalg.norm(A - M, "fro") / np.sqrt(n)),
    }
    inequalities = {"A-M": _check_pair("A-M", A, M, raw["A"], raw["M"], violations)}

    if proof_chain and kernel.order >= 3:
        chain = build_proof_chain(X, kernel, gram=G)
        mats = {"A": A, **chain.as_dict(), "M": M}
        for key in chain.as_dict():
            raw[key] = eigenvalues_symmetric(mats[key])
        names = list(mats)
        chain_w2 = {}
        for a, b in zip(names, names[1:]):
            pair = f"{a}-{b}"
            chain_w2[pair] = wasserstein(raw[a], raw[b], 2)
            inequalities[pair] = _check_pair(pair, mats[a], mats[b], raw[a], raw[b], violations)
        direct = wasserstein(raw["A"], raw["M"], 2)
        path = sum(chain_w2.values())
        holds = direct <= path + INEQUALITY_SLACK
        if not holds:
            violations.append(f"W2 triangle inequality fails along the chain: {direct!r} > {path!r}")
        record["chain_w2"] = chain_w2
        record["chain_triangle"] = {"lhs": direct, "rhs": path, "holds": holds}
        record["chain_has_B"] = chain.B is not None
    record["inequalities"] = inequalities
    record["violations"] = violations
    return record, mu_A, mu_M


# -- sweeps -----------------------------------------------------------------

_MEDIAN_KEYS = [
    ("A_vs_law", "ks"), ("A_vs_law", "w1"), ("A_vs_law", "w2"),
    ("M_vs_law", "ks"), ("M_vs_law", "w2"),
    ("A_vs_M", "ks"), ("A_vs_M", "w2"),
    ("gram_vs_mp", "ks"), ("gram_vs_mp", "w2"),
]


def _aggregate(records: list, pooled_A: list, pooled_M: list, law: LimitLaw) -> dict:
    ok = [r for r in records if "error" not in r]
    out: dict = {"trials_ok": len(ok), "trials_failed": len(records) - len(ok)}
    if not ok:
        return out
    single = {}
    for group, key in _MEDIAN_KEYS:
        single[f"{group}.{key}"] = float(np.median([r[group][key] for r in ok]))
    single["frobenius_A_M"] = float(np.median([r["frobenius_A_M"] for r in ok]))
    single["event_holds_fraction"] = float(np.mean([r["event"]["holds"] for r in ok]))
    if "chain_w2" in ok[0]:
        for pair in ok[0]["chain_w2"]:
            single[f"chain_w2.{pair}"] = float(np.median([r["chain_w2"][pair] for r in ok]))
    out["median_single"] = single
    # the pooled ESD over trials estimates the expected ESD
    pA = esd(np.concatenate([d.eigenvalues for d in pooled_A]))
    pM = esd(np.concatenate([d.eigenvalues for d in pooled_M]))
    out["averaged"] = {
        "A_vs_law": distance_report(pA, law).as_dict(),
        "A_vs_M": distance_report(pA, pM).as_dict(),
    }
    return out


def _run_one(config: ExperimentConfig, kernel: Kernel, law: LimitLaw, n: int, k: int):
    family = VectorFamily(config.family, config.dimension(n))
    X = sample_data_matrix(family, n, trial_rng(config.seed, n, k))
    try:
        record, mu_A, mu_M = analyze_matrix_data(X, kernel, law, config.epsilon_for(n),
                                                 proof_chain=config.proof_chain)
    except ErmError as exc:
        log.warning("trial n=%d k=%d failed: %s", n, k, exc)
        return {"n": n, "trial": k, "error": f"{type(exc).__name__}: {exc}"}, None, None
    record["trial"] = k
    record["epsilon"] = config.epsilon_for(n)
    return record, mu_A, mu_M


def run_experiment(config: ExperimentConfig, write: bool = True) -> ExperimentReport:
    """Run every (n, trial) pair of ``config``; deterministic given ``config.seed``.

    Raises :class:`InequalityViolation` after the report is written if any trial
    violates one of the exact inequalities.
    """
    kernel = kernel_from_config(config.kernel)
    report = ExperimentReport(config=config.as_dict())
    out = Path(config.out) if (write and config.out) else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)

    for n in config.n_list:
        law = LimitLaw.for_kernel(kernel, config.dimension(n) / n)
        jobs = range(config.trials)
        if config.threads > 1:
            with ThreadPoolExecutor(config.threads) as pool:
                results = list(pool.map(lambda k: _run_one(config, kernel, law, n, k), jobs))
        else:
            results = [_run_one(config, kernel, law, n, k) for k in jobs]
        records = [r for r, _, _ in results]
        pooled_A = [a for _, a, _ in results if a is not None]
        pooled_M = [m for _, _, m in results if m is not None]
        report.trials.extend(records)
        agg = _aggregate(records, pooled_A, pooled_M, law)
        agg["law"] = {"y": law.base.y, "shift": law.shift, "scale": law.scale}
        report.aggregates[str(n)] = agg
        for r in records:
            report.violations.extend(f"n={n} trial={r['trial']}: {v}" for v in r.get("violations", ()))
        if out is not None:
            write_eigenvalues_csv(out / f"eigenvalues_n{n}.csv", [(r["trial"], a) for r, a, _ in results if a is not None])
            if pooled_A:
                pooled = esd(np.concatenate([a.eigenvalues for a in pooled_A]))
                write_histogram_tsv(out / f"histogram_n{n}.tsv", emit_histogram(pooled, law, config.bins))

    if out is not None:
        (out / "report.json").write_text(report.to_json(), encoding="utf-8", newline="\n")
    if report.violations:
        raise InequalityViolation("; ".join(report.violations[:5]))
    return report


# -- external data ------------------------------------------------------------

def read_dataset_csv(path) -> np.ndarray:
    """Numeric CSV, rows = observations. Returns the ``(p, n)`` data matrix."""
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                rows.append([float(c) for c in row])
            except ValueError:
                raise DataFormatError(f"{path}:{lineno}: non-numeric cell in {row!r}") from None
            if len(rows[-1]) != len(rows[0]):
                raise DataFormatError(
                    f"{path}:{lineno}: ragged row ({len(rows[-1])} columns, expected {len(rows[0])})")
    if len(rows) < 2:
        raise DataFormatError(f"{path}: need at least 2 observations, got {len(rows)}")
    data = np.array(rows, dtype=float)
    if not np.all(np.isfinite(data)):
        raise DataFormatError(f"{path}: non-finite values")
    return data.T.copy()


def write_dataset_csv(path, X: np.ndarray) -> None:
    """Write a ``(p, n)`` data matrix as CSV with one observation per row."""
    np.savetxt(path, np.asarray(X).T, delimiter=",", fmt=FLOAT_FORMAT)


def isotropize(X: np.ndarray, center: bool, rescale: bool = True):
    """Optionally centre coordinates and scale each to variance ``1/p``.

    Zero-variance coordinates are left unscaled and reported in the returned warnings.
    """
    X = np.array(X, dtype=float)
    p, n = X.shape
    warnings = []
    if center:
        X -= X.mean(axis=1, keepdims=True)
    if rescale:
        var = X.var(axis=1)
        zero = var == 0
        if zero.any():
            idx = np.flatnonzero(zero).tolist()
            msg = f"zero-variance coordinates left unscaled: {idx}"
            log.warning(msg)
            warnings.append(msg)
        scale = np.where(zero, 1.0, np.sqrt(p * np.where(zero, 1.0, var)))
        X /= scale[:, None]
    return X, warnings


def analyze_dataset(path, kernel="exponential", center: bool = False, rescale: bool = True,
                    epsilon: Optional[float] = None, out=None, bins: int = 60,
                    proof_chain: bool = True) -> ExperimentReport:
    """Compare the Euclidean-matrix spectrum of a dataset with the predicted limit."""
    X = read_dataset_csv(path)
    X, warnings = isotropize(X, center, rescale)
    p, n = X.shape
    k = kernel_from_config(kernel)
    eps = float(epsilon) if epsilon is not None else n ** (-1.0 / 8.0)
    law = LimitLaw.for_kernel(k, p / n)
    record, mu_A, mu_M = analyze_matrix_data(X, k, law, eps, proof_chain=proof_chain)
    record["trial"] = 0
    record["epsilon"] = eps
    config = {"source": str(path), "kernel": k.spec, "center": center, "rescale": rescale,
              "n_list": [n], "y": p / n, "trials": 1, "epsilon": epsilon}
    report = ExperimentReport(config=config, trials=[record], warnings=warnings)
    agg = _aggregate([record], [mu_A], [mu_M], law)
    agg["law"] = {"y": law.base.y, "shift": law.shift, "scale": law.scale}
    report.aggregates[str(n)] = agg
    report.violations = [f"n={n} trial=0: {v}" for v in record["violations"]]
    if out is not None:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        write_eigenvalues_csv(out / f"eigenvalues_n{n}.csv", [(0, mu_A)])
        write_histogram_tsv(out / f"histogram_n{n}.tsv", emit_histogram(mu_A, law, bins))
        (out / "report.json").write_text(report.to_json(), encoding="utf-8", newline="\n")
    return report


# -- histograms and files -------------------------------------------------------

def emit_histogram(dist: SpectralDistribution, law: LimitLaw, bins: int = 60):
    """Rows ``(bin center, empirical density, predicted density)``.

    The bins cover the eigenvalues, the law's support and its atom. The
    predicted column is the law's mass in each bin divided by the bin width, so
    atoms show up as a tall bin and both columns integrate to one.
    """
    if bins < 1:
        raise ValueError("bins must be >= 1")
    lo_s, hi_s = law.support()
    lo = min(dist.eigenvalues[0], lo_s, law.atom_location if law.atom_mass > 0 else lo_s)
    hi = max(dist.eigenvalues[-1], hi_s, law.atom_location if law.atom_mass > 0 else hi_s)
    if hi - lo <= 0:
        lo, hi = lo - 0.5, hi + 0.5
    edges = np.linspace(lo, hi, bins + 1)
    width = np.diff(edges)
    counts, _ = np.histogram(dist.eigenvalues, bins=edges)
    empirical = counts / (dist.n * width)
    # mass on [l, r) for every bin except the last, which is closed
    upper = np.asarray(law.cdf_left(edges[1:]), dtype=float)
    upper[-1] = law.cdf(edges[-1])
    mass = upper - np.asarray(law.cdf_left(edges[:-1]), dtype=float)
    predicted = mass / width
    centers = 0.5 * (edges[:-1] + edges[1:])
    return [tuple(map(float, row)) for row in zip(centers, empirical, predicted)]


def write_histogram_tsv(path, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("bin_center\tempirical_density\tpredicted_density\n")
        for row in rows:
            fh.write("\t".join(FLOAT_FORMAT % v for v in row) + "\n")


def write_eigenvalues_csv(path, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for trial, dist in rows:
            fh.write(",".join([str(trial)] + [FLOAT_FORMAT % v for v in dist.eigenvalues]) + "\n")
