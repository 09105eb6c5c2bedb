import numpy as np
import pytest

from erm_spectra import VectorFamily, sample_data_matrix
from erm_spectra.errors import CapacityError, DomainError, KernelEvaluationError
from erm_spectra.kernels import custom, exponential, identity, kernel_from_config, polynomial, square_root
from erm_spectra.matrices import (MAX_ORDER, build_euclidean, build_gram, build_linearized,
                                  build_proof_chain, check_event, expansion_correction,
                                  norm_deviations, numerical_rank, squared_distances)
from erm_spectra.samplers import trial_rng


def test_small_hand_example():
    # three points in the plane
    X = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 2.0]])
    D2 = squared_distances(X)
    assert np.array_equal(D2, [[0, 1, 4], [1, 0, 5], [4, 5, 0]])
    A = build_euclidean(X, exponential())
    assert np.allclose(A, np.exp(-D2), rtol=0, atol=1e-16)
    assert np.all(np.diag(A) == 1.0)
    G = build_gram(X)
    assert np.array_equal(G, [[0, 0, 0], [0, 1, 0], [0, 0, 4]])
    assert np.array_equal(norm_deviations(X), [-1, 0, 3])


def test_identity_kernel_linearization_is_exact(gaussian_data):
    # f(x) = x: A_ij = |X_i|^2 + |X_j|^2 - 2 X_i.X_j, and M drops the norm terms
    X = gaussian_data
    A = build_euclidean(X, identity())
    M = build_linearized(X, identity())
    z = norm_deviations(X)
    corr = z[:, None] + z[None, :]
    np.fill_diagonal(corr, 2 * z)  # M_ii = -2 z_i while A_ii = 0
    assert np.allclose(A - M, corr, atol=1e-13)


def test_linearized_formula(gaussian_data):
    X, k = gaussian_data, exponential()
    n = X.shape[1]
    M = build_linearized(X, k)
    ref = (k.f0 - k.f2 + 2 * k.df2) * np.eye(n) + k.f2 * np.ones((n, n)) - 2 * k.df2 * (X.T @ X)
    assert np.allclose(M, ref, atol=1e-14)
    assert np.array_equal(M, M.T)


@pytest.mark.parametrize("kernel", [exponential(), identity(), square_root(), polynomial([0.3, -1, 0.2, 0.05])],
                         ids=lambda k: k.name)
def test_symmetry(kernel, gaussian_data):
    for m in (build_euclidean(gaussian_data, kernel), build_gram(gaussian_data),
              build_linearized(gaussian_data, kernel), *build_proof_chain(gaussian_data, kernel).as_dict().values()):
        assert np.array_equal(m, m.T)


def test_chain_structure(gaussian_data):
    k = exponential()
    X = gaussian_data
    ch = build_proof_chain(X, k)
    A = build_euclidean(X, k)
    # A and B differ only where the first-order expansion is inexact; diagonals agree
    for m in (ch.B, ch.C, ch.D):
        assert np.all(np.diag(m) == k.f0)
    off = ~np.eye(X.shape[1], dtype=bool)
    assert np.array_equal(ch.D[off], ch.E[off])
    M = build_linearized(X, k)
    z = norm_deviations(X)
    assert np.allclose(ch.E - M, expansion_correction(z, k), atol=1e-14)
    # Taylor remainder: |A - B| <= sup|f''| / 2 * (2 G_ij)^2 on the segment, and f'' = exp(-x) here
    G = build_gram(X)
    lo = np.minimum(squared_distances(X), 2 + norm_deviations(X)[:, None] + norm_deviations(X)[None, :])
    bound = 0.5 * np.exp(-lo) * (2 * G) ** 2
    assert np.all(np.abs(A - ch.B)[off] <= bound[off] * (1 + 1e-9) + 1e-15)


def test_sphere_data_makes_E_equal_M(sphere_data):
    k = exponential()
    ch = build_proof_chain(sphere_data, k)
    assert np.array_equal(ch.E, build_linearized(sphere_data, k))
    assert np.array_equal(ch.C, ch.B)


def test_identity_chain_all_equal_off_diagonal(gaussian_data):
    ch = build_proof_chain(gaussian_data, identity())
    off = ~np.eye(gaussian_data.shape[1], dtype=bool)
    assert np.allclose(ch.B[off], ch.D[off], atol=1e-14)
    assert np.allclose(ch.C[off], ch.D[off], atol=1e-14)


def test_custom_kernel_has_no_B(gaussian_data):
    k = custom(1.0, float(np.exp(-2)), -float(np.exp(-2)), [[0.5, np.exp(-0.5)], [3.5, np.exp(-3.5)]],
               d2f2=float(np.exp(-2)), d3f2=-float(np.exp(-2)))
    ch = build_proof_chain(gaussian_data, k)
    assert ch.B is None and set(ch.as_dict()) == {"C", "D", "E"}


def test_kernel_outside_domain_reports_location():
    X = np.array([[0.0, 10.0, 0.1]])
    k = kernel_from_config({"name": "custom", "f0": 1.0, "f2": 0.5, "df2": -0.2,
                            "samples": [[0.0, 1.0], [3.0, 0.1]]})
    with pytest.raises(KernelEvaluationError) as info:
        build_euclidean(X, k)
    assert info.value.location in ((0, 1), (1, 0), (1, 2), (2, 1))


def test_derivative_domain_error():
    k = square_root()
    X = np.zeros((2, 3))
    with pytest.raises(DomainError):
        build_proof_chain(X, k)


def test_capacity():
    with pytest.raises(CapacityError):
        build_gram(np.zeros((1, MAX_ORDER + 1)))


def test_event_ignores_diagonal():
    X = np.eye(4)  # unit norms, pairwise squared distance exactly 2
    ev = check_event(X, 0.0)
    assert ev.holds and ev.max_pair_dev == 0.0 and ev.max_norm_dev == 0.0
    ev = check_event(1.1 * X, 0.2)
    assert ev.max_norm_dev == pytest.approx(0.21)
    assert not ev.holds
    with pytest.raises(ValueError):
        check_event(X, -1.0)


def test_event_typical_size():
    X = sample_data_matrix(VectorFamily("gaussian", 2000), 50, trial_rng(1))
    ev = check_event(X, 0.5)
    assert ev.holds
    assert 0.01 < ev.max_pair_dev < 0.5


def test_numerical_rank():
    r = np.random.default_rng(0)
    u = r.standard_normal((20, 3))
    assert numerical_rank(u @ u.T) == 3
    assert numerical_rank(np.zeros((5, 5))) == 0
    assert numerical_rank(np.eye(7)) == 7
