import numpy as np
import pytest

from erm_spectra import VectorFamily
from erm_spectra.concentration import (TEST_FUNCTIONS, azuma_envelope, inner_product_moment,
                                       norm_moment_condition, statistic_concentration,
                                       tail_sweep, thin_shell_tail, wilson_interval)
from erm_spectra.kernels import identity
from erm_spectra.samplers import trial_rng


def test_wilson_known_values():
    center, half = wilson_interval(0, 100)
    z = 1.959963984540054
    assert center == pytest.approx(z * z / 200 / (1 + z * z / 100))
    assert half == pytest.approx(center, rel=1e-12)  # at 0 successes the lower end is 0
    c, h = wilson_interval(50, 100)
    assert c == pytest.approx(0.5) and 0.09 < h < 0.1


def test_azuma_envelope():
    assert azuma_envelope(100, 0.0, 1.0) == 1.0
    assert azuma_envelope(100, 0.2, 1.0) == pytest.approx(np.exp(-0.5))
    assert np.array_equal(azuma_envelope(10, [0.0, 0.1], 0.0), [1.0, 0.0])


def test_thin_shell_gaussian_oracle():
    # for Gaussian columns p ||Y||^2 ~ chi^2_p
    from scipy import stats

    p, T = 50, 20_000
    est = thin_shell_tail(VectorFamily("gaussian", p), [0.1, 0.2], T, trial_rng(2))
    exact = [stats.chi2.sf(p * 1.1 ** 2, p) + stats.chi2.cdf(p * 0.9 ** 2, p),
             stats.chi2.sf(p * 1.2 ** 2, p) + stats.chi2.cdf(p * 0.8 ** 2, p)]
    assert np.all(np.abs(est.empirical_prob - exact) <= 2 * est.wilson_halfwidth)
    assert est.decay_exponent is not None and est.decay_exponent > 0
    assert len(est.rows()) == 2
    with pytest.raises(ValueError):
        thin_shell_tail(VectorFamily("gaussian", p), [0.1], 10, trial_rng(2))


def test_sphere_has_no_tail():
    est = thin_shell_tail(VectorFamily("uniform_sphere", 20), [1e-12, 0.1], 200, trial_rng(0))
    assert np.all(est.empirical_prob == 0.0) and est.decay_exponent is None


def test_tail_decreases_with_dimension():
    ests = tail_sweep("uniform_cube", [10, 100, 1000], 0.1, 2000, 7)
    probs = [e.empirical_prob[0] for e in ests]
    assert probs[0] > probs[1] > probs[2]


@pytest.mark.parametrize("kind", ["gaussian", "uniform_sphere", "laplace"])
def test_inner_product_moment(kind):
    p = 30
    est = inner_product_moment(VectorFamily(kind, p), 20_000, trial_rng(9))
    assert abs(est.value - 1 / p) <= 5 * est.std_error


def test_norm_moment_gaussian():
    # p E (||Y|| - 1)^2 -> 1/2 for Gaussian columns
    est = norm_moment_condition(VectorFamily("gaussian", 400), 1, 20_000, trial_rng(4))
    assert est.value == pytest.approx(0.5, abs=0.02)
    with pytest.raises(ValueError):
        norm_moment_condition(VectorFamily("gaussian", 4), 0, 10, trial_rng(4))


def test_statistic_concentration_small():
    fn, bv = TEST_FUNCTIONS["arctan"]
    res = statistic_concentration(VectorFamily("gaussian", 20), identity(), 20, fn, bv,
                                  [0.0, 0.05, 0.2], 200, 1)
    assert res.ok and res.empirical[0] > 0 and len(res.rows()) == 3
    assert res.deviations.mean() == pytest.approx(0.0, abs=1e-12)
    again = statistic_concentration(VectorFamily("gaussian", 20), identity(), 20, fn, bv, [0.1], 200, 1)
    assert np.array_equal(res.statistics, again.statistics)
    const = statistic_concentration(VectorFamily("gaussian", 5), identity(), 5, *TEST_FUNCTIONS["constant"],
                                    [0.0, 0.1], 200, 1)
    assert const.empirical.tolist() == [1.0, 0.0]
