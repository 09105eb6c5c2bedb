# Gram matrix of isotropic data against the Marchenko-Pastur law.
#
# Columns are n points in dimension p = y n. The eigenvalues of X^T X settle
# on a fixed law as n grows; for y < 1 there are n - p exact zeros.

import numpy as np

from erm_spectra import LimitLaw, MarchenkoPastur, VectorFamily, sample_data_matrix, trial_rng
from erm_spectra.matrices import build_gram
from erm_spectra.metrics import distance_report
from erm_spectra.spectral import spectrum

for y in (0.5, 1.0, 2.0):
    mp = MarchenkoPastur(y)
    print(f"y = {y}: support [{mp.lower:.4f}, {mp.upper:.4f}], atom at 0 of mass {mp.atom_mass}")
    for n in (100, 400, 1600):
        p = int(round(y * n))
        X = sample_data_matrix(VectorFamily("uniform_cube", p), n, trial_rng(1, n))
        rep = distance_report(spectrum(build_gram(X)), LimitLaw(mp))
        print(f"   n = {n:5d}  ks = {rep.ks:.4f}  w1 = {rep.w1:.4f}  w2 = {rep.w2:.4f}")

# quantiles of the law, the kind of table the CLI prints with `mp --table quantile`
mp = MarchenkoPastur(2.0)
print("deciles for y = 2:", np.round(mp.quantile(np.arange(1, 10) / 10), 4))
