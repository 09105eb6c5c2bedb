# Thin shells and concentration of spectral statistics.

import numpy as np

from erm_spectra import VectorFamily, identity, trial_rng
from erm_spectra.concentration import TEST_FUNCTIONS, statistic_concentration, tail_sweep

# the norm of a log-concave isotropic vector concentrates around 1
for kind in ("gaussian", "uniform_cube", "laplace"):
    sweep = tail_sweep(kind, [25, 100, 400], 0.15, 20_000, 4)
    print(f"{kind:13s} P(| |Y| - 1 | >= 0.15) for p = 25, 100, 400:",
          [f"{e.empirical_prob[0]:.2e}" for e in sweep])

# linear statistics of the spectrum deviate far less than the martingale bound allows
fn, bv = TEST_FUNCTIONS["arctan"]
res = statistic_concentration(VectorFamily("gaussian", 100), identity(), 100, fn, bv,
                              [0.01, 0.05, 0.1], 200, 5)
print("std of mean arctan(eigenvalue):", np.std(res.statistics))
for t, e, b in res.rows():
    print(f"  t = {t:4}: empirical {e:.3f}   envelope {b:.3f}")
