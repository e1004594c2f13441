import math

import numpy as np
import pytest

from powertail.errors import DegenerateDataError, InputError
from powertail.fitting import (
    bootstrap_se,
    fit_alpha,
    fit_fixed_xmin,
    fit_xmin,
    ks_statistic,
    with_standard_errors,
)
from powertail.models import PowerLaw

from .oracles import brute_force_alpha, brute_force_ks, brute_force_xmin


def test_alpha_examples():
    e = math.e
    assert fit_alpha([e, e], 1.0) == pytest.approx(2.0, rel=1e-15)
    assert fit_alpha([e**2, e**2], 1.0) == pytest.approx(1.5, rel=1e-15)
    # points below x_min are ignored
    assert fit_alpha([0.1, 0.5, 3 * e, 3 * e], 3.0) == pytest.approx(2.0, rel=1e-14)


def test_alpha_rejects_bad_tails():
    with pytest.raises(InputError):
        fit_alpha([5.0], 1.0)
    with pytest.raises(DegenerateDataError):
        fit_alpha([2.0, 2.0, 2.0], 2.0)
    with pytest.raises(InputError):
        fit_alpha([2.0, 3.0], 0.0)


@pytest.mark.parametrize("scale", [1e-6, 3.0, 1e9])
def test_alpha_is_scale_invariant(scale, rng):
    x = PowerLaw(2.3, 1.0).sample(rng, 500)
    assert fit_alpha(x * scale, scale) == pytest.approx(fit_alpha(x, 1.0), rel=1e-11)


def test_ks_examples():
    assert ks_statistic([1.0, 2.0, 4.0], PowerLaw(2.0, 1.0)) == pytest.approx(1 / 3, rel=1e-14)
    assert ks_statistic([3.0], PowerLaw(2.0, 3.0)) == pytest.approx(1.0)


def test_ks_matches_oracle(rng):
    for _ in range(20):
        x = np.round(PowerLaw(2.0, 1.0).sample(rng, 60), 1)  # rounding forces ties
        alpha = rng.uniform(1.5, 3.0)
        assert ks_statistic(x, PowerLaw(alpha, 1.0)) == pytest.approx(brute_force_ks(x, alpha, 1.0), abs=1e-14)


def test_alpha_matches_oracle(rng):
    x = PowerLaw(2.7, 2.0).sample(rng, 300)
    assert fit_alpha(x, 2.5) == brute_force_alpha(x, 2.5)


@pytest.mark.parametrize("seed", range(10))
def test_scan_matches_brute_force_exactly(seed):
    rng = np.random.default_rng(seed)
    body = rng.uniform(0.5, 2.0, rng.integers(0, 60))
    tail = PowerLaw(rng.uniform(1.8, 3.2), 2.0).sample(rng, rng.integers(15, 120))
    x = np.concatenate([body, tail])
    if seed % 2:
        x = np.round(x, 2)
    fit = fit_xmin(x, 10)
    x_min, alpha, ks = brute_force_xmin(x.tolist(), 10)
    assert (fit.x_min_hat, fit.alpha_hat, fit.ks) == (x_min, alpha, ks)


def test_scan_with_min_tail_equal_to_n():
    x = PowerLaw(2.0, 1.0).sample(np.random.default_rng(4), 12)
    fit = fit_xmin(x, min_tail=12)
    assert fit.x_min_hat == x.min()
    assert fit.n_tail == 12 and fit.tail_fraction == 1.0


def test_scan_input_checks():
    with pytest.raises(InputError):
        fit_xmin([1.0, 2.0, 3.0], 10)
    with pytest.raises(InputError):
        fit_xmin(np.arange(1.0, 30.0), 3)
    with pytest.raises(DegenerateDataError):
        fit_xmin(np.full(20, 7.0), 10)


def test_scan_result_fields(rng):
    x = PowerLaw(2.5, 1.0).sample(rng, 400)
    fit = fit_xmin(x)
    assert fit.n_total == 400
    assert fit.n_tail == int(np.sum(x >= fit.x_min_hat))
    assert fit.params == PowerLaw(fit.alpha_hat, fit.x_min_hat)
    assert not fit.xmin_fixed and fit.se_alpha is None


def test_fixed_xmin_fit(rng):
    x = PowerLaw(2.5, 1.0).sample(rng, 400)
    fit = fit_fixed_xmin(x, 1.0)
    assert fit.xmin_fixed
    assert fit.n_tail == 400
    assert fit.ks == ks_statistic(x, PowerLaw(fit.alpha_hat, 1.0))


def test_bootstrap_se_independent_of_workers(rng):
    x = PowerLaw(2.5, 1.0).sample(rng, 300)
    one = bootstrap_se(x, 400, seed=17, workers=1)
    many = bootstrap_se(x, 400, seed=17, workers=8)
    assert one == many
    assert bootstrap_se(x, 400, seed=18, workers=1) != one


def test_bootstrap_se_matches_asymptotic_error():
    # with x_min held fixed the exponent's sampling sd is (alpha - 1) / sqrt(n)
    x = PowerLaw(2.5, 1.0).sample(np.random.default_rng(8), 2000)
    se = bootstrap_se(x, 2000, seed=3, fixed_xmin=1.0)
    assert se.se_x_min == 0.0
    assert se.dropped == 0 and se.warning is None
    assert se.se_alpha == pytest.approx(1.5 / math.sqrt(2000), rel=0.1)


def test_bootstrap_se_attaches_to_fit(rng):
    x = PowerLaw(2.5, 1.0).sample(rng, 200)
    fit = fit_xmin(x)
    se = bootstrap_se(x, 200, seed=1)
    se_alpha, se_xmin = se
    out = with_standard_errors(fit, se)
    assert (out.se_alpha, out.se_x_min) == (se_alpha, se_xmin)
    assert se_alpha > 0 and se_xmin >= 0


def test_bootstrap_rejects_too_few_reps(rng):
    with pytest.raises(InputError):
        bootstrap_se(PowerLaw(2.5, 1.0).sample(rng, 50), 1, seed=0)
