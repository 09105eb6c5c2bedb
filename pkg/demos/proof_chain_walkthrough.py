# Walk from A to its linearisation M through the intermediate matrices.
#
# Each step either changes few entries by a lot (a low-rank change, measured
# by Kolmogorov-Smirnov via the rank inequality) or many entries by a little
# (measured by W2 via Hoffman-Wielandt).

from erm_spectra import VectorFamily, exponential, sample_data_matrix, trial_rng
from erm_spectra.matrices import build_euclidean, build_linearized, build_proof_chain, numerical_rank
from erm_spectra.metrics import verify_hw_inequality, verify_rank_inequality

n = 300
X = sample_data_matrix(VectorFamily("laplace", n), n, trial_rng(3))
kernel = exponential()
mats = {"A": build_euclidean(X, kernel), **build_proof_chain(X, kernel).as_dict(),
        "M": build_linearized(X, kernel)}

names = list(mats)
print("step   ks <= rank/n          W2 <= ||diff||_F / sqrt(n)")
for a, b in zip(names, names[1:]):
    r = verify_rank_inequality(mats[a], mats[b])
    h = verify_hw_inequality(mats[a], mats[b])
    print(f"{a}->{b}   {r.lhs:.4f} <= {r.rhs:.4f}   {h.lhs:.5f} <= {h.rhs:.5f}")

print("rank of E - M:", numerical_rank(mats["E"] - mats["M"]), "(at most 9)")
