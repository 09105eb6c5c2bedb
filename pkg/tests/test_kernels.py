import numpy as np
import pytest

from erm_spectra.errors import ConfigurationError, UnsupportedOrderError
from erm_spectra.kernels import (constant, custom, exponential, identity, kernel_from_config,
                                 limit_coefficients, polynomial, square_root, taylor_coefficients)

BUILTINS = [identity(), constant(2.5), exponential(), square_root(), polynomial([1.0, -0.5, 0.25, 0.1])]


@pytest.mark.parametrize("k", BUILTINS, ids=lambda k: k.name)
def test_stored_values(k):
    assert k(0.0) == pytest.approx(k.f0, abs=1e-12)
    assert k(2.0) == pytest.approx(k.f2, abs=1e-12)


@pytest.mark.parametrize("k", BUILTINS, ids=lambda k: k.name)
def test_stored_derivatives_match_finite_differences(k):
    h = 1e-4
    f = lambda x: float(k(x))  # noqa: E731
    d1 = (f(2 + h) - f(2 - h)) / (2 * h)
    d2 = (f(2 + h) - 2 * f(2) + f(2 - h)) / h ** 2
    d3 = (f(2 + 2 * h) - 2 * f(2 + h) + 2 * f(2 - h) - f(2 - 2 * h)) / (2 * h ** 3)
    assert d1 == pytest.approx(k.df2, abs=1e-5)
    assert d2 == pytest.approx(k.d2f2, abs=1e-5)
    # the third difference loses ~eps/h^3 to cancellation; compare with a wider step
    h3 = 1e-2
    d3w = (f(2 + 2 * h3) - 2 * f(2 + h3) + 2 * f(2 - h3) - f(2 - 2 * h3)) / (2 * h3 ** 3)
    assert d3w == pytest.approx(k.d3f2, abs=1e-3 * max(1, abs(k.d3f2)))
    assert np.isfinite(d3)
    if k.derivative is not None:
        assert float(k.derivative(2.0)) == k.df2


def test_limit_coefficients():
    c = limit_coefficients(identity())
    assert (c.shift, c.scale) == (0.0, -2.0)
    assert limit_coefficients(constant(3.0)) == limit_coefficients(constant(-1.0))
    c = limit_coefficients(constant(3.0))
    assert (c.shift, c.scale) == (0.0, 0.0)
    e2 = np.exp(-2.0)
    c = limit_coefficients(exponential())
    assert c.shift == pytest.approx(1 - 3 * e2, abs=1e-15)
    assert c.scale == pytest.approx(2 * e2, abs=1e-15)


def test_taylor_identity_and_square():
    c = taylor_coefficients(identity())
    assert c[1, 0] == c[0, 1] == 1.0
    assert all(v == 0 for key, v in c.items() if sum(key) > 1)
    # (2 + a + b)^2 = 4 + 4a + 4b + a^2 + 2ab + b^2
    c = taylor_coefficients(polynomial([0, 0, 1]))
    assert (c[1, 0], c[0, 1], c[2, 0], c[0, 2], c[1, 1]) == (4, 4, 1, 1, 2)
    assert c[3, 0] == c[2, 1] == c[1, 2] == c[0, 3] == 0
    assert len(c) == 9


@pytest.mark.parametrize("k", BUILTINS, ids=lambda k: k.name)
def test_taylor_symmetry_and_diagonal_oracle(k):
    c = taylor_coefficients(k)
    for (a, b), v in c.items():
        assert c[b, a] == v
    # at z_i = z_j = z the expansion is the one-variable Taylor polynomial of f(2 + 2z)
    for z in (-0.03, 0.01, 0.2):
        two_var = sum(v * z ** a * z ** b for (a, b), v in c.items())
        one_var = k.df2 * 2 * z + k.d2f2 / 2 * (2 * z) ** 2 + k.d3f2 / 6 * (2 * z) ** 3
        assert two_var == pytest.approx(one_var, rel=1e-13, abs=1e-16)


def test_order_guard():
    k = custom(1.0, 0.5, -0.3, [[1.0, 0.7], [3.0, 0.2]])
    assert k.order == 1
    with pytest.raises(UnsupportedOrderError):
        taylor_coefficients(k)


def test_custom_kernel_from_config():
    k = kernel_from_config({"name": "custom", "f0": 1.0, "f2": 0.5, "df2": -0.25, "d2f2": 0.1,
                            "d3f2": 0.0, "samples": [[1.0, 0.8], [4.0, 0.1]]})
    assert k.order == 3 and k.derivative is None
    assert k(0.0) == 1.0 and k(2.0) == 0.5
    assert np.isnan(k(5.0))


def test_config_forms():
    assert kernel_from_config("identity").name == "identity"
    assert kernel_from_config({"name": "poly", "coeffs": [1, 2]}).df2 == 2.0
    assert kernel_from_config({"name": "constant", "c": 4}).f0 == 4.0
    for bad in ({"name": "nope"}, {"coeffs": [1]}, {"name": "custom", "f0": 1}, 3):
        with pytest.raises(ConfigurationError):
            kernel_from_config(bad)


def test_name_aliases():
    assert kernel_from_config("square_root").name == kernel_from_config("sqrt").name
    assert kernel_from_config("exp").f2 == exponential().f2
    assert kernel_from_config({"name": "polynomial", "coeffs": [0, 1]}).df2 == 1.0
