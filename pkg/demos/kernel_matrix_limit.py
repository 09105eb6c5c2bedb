# Spectrum of A_ij = exp(-||X_i - X_j||^2) against its predicted limit.
#
# The limit is shift + scale * S with S Marchenko-Pastur. With y < 1 the law
# has an atom of mass 1 - y at `shift`; the eigenvalues of A crowd around it
# without sitting on it, so Kolmogorov-Smirnov stays large. The linearised
# matrix M has its eigenvalues exactly on the atom. W1 to the law levels off
# near f(2): the all-ones part of A puts one eigenvalue near n f(2), and that
# single outlier carries mass 1/n a distance of about n f(2).

import numpy as np

from erm_spectra import LimitLaw, VectorFamily, exponential, sample_data_matrix, trial_rng
from erm_spectra.matrices import build_euclidean, build_linearized
from erm_spectra.metrics import distance_report, wasserstein
from erm_spectra.spectral import spectrum

kernel = exponential()
for y in (0.5, 2.0):
    law = LimitLaw.for_kernel(kernel, y)
    print(f"y = {y}: shift {law.shift:.5f}, scale {law.scale:.5f}, atom mass {law.atom_mass}")
    for n in (200, 800):
        X = sample_data_matrix(VectorFamily("gaussian", int(y * n)), n, trial_rng(2, n))
        A, M = build_euclidean(X, kernel), build_linearized(X, kernel)
        atoms = (0.0, law.atom_location)
        muA, muM = spectrum(A, atoms), spectrum(M, atoms)
        a, m = distance_report(muA, law), distance_report(muM, law)
        print(f"   n = {n}: A ks {a.ks:.3f} w1 {a.w1:.3f} | M ks {m.ks:.3f} w1 {m.w1:.3f}"
              f" | W2(A, M) {wasserstein(muA, muM, 2):.4f}")
        if law.atom_mass:
            near = muA.eigenvalues[np.abs(muA.eigenvalues - law.shift) < 0.2]
            print(f"      eigenvalues of A near the atom: {near.size}, spread (IQR) "
                  f"{np.subtract(*np.percentile(near, [75, 25])):.4f}")
