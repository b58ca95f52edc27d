from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.integrate import quad

from qid_lab.families import Exponential, Gaussian, Laplace, Uniform, family_from_dict, family_to_dict
from qid_lab.parallel import MIN_CHUNK, map_chunks
from qid_lab.quadrature import integrate


def test_integrate_scalar_integrand() -> None:
    result = integrate(np.sin, 0.0, math.pi, epsabs=1e-12)

    assert result.converged
    assert result.scalar == pytest.approx(2.0, abs=1e-12)


def test_integrate_reversed_limits_flip_sign() -> None:
    forward = integrate(np.exp, 0.0, 1.0, epsabs=1e-12)
    backward = integrate(np.exp, 1.0, 0.0, epsabs=1e-12)

    assert backward.scalar == pytest.approx(-forward.scalar, abs=1e-14)
    assert forward.scalar == pytest.approx(math.e - 1.0, abs=1e-12)


def test_integrate_vector_integrand_shares_panels() -> None:
    result = integrate(lambda x: np.vstack([np.cos(x), x * x]), -1.0, 1.0, epsabs=1e-12, panel_width=0.25)

    assert result.value.shape == (2,)
    assert result.value[0] == pytest.approx(2.0 * math.sin(1.0), abs=1e-12)
    assert result.value[1] == pytest.approx(2.0 / 3.0, abs=1e-12)
    assert result.panels >= 8


def test_integrate_oscillatory_with_panel_width() -> None:
    result = integrate(lambda x: np.cos(40.0 * x), 0.0, 10.0, epsabs=1e-10, panel_width=0.05)

    assert result.scalar == pytest.approx(math.sin(400.0) / 40.0, abs=1e-10)


def test_integrate_complex_integrand() -> None:
    result = integrate(lambda x: np.exp(1j * x), 0.0, math.pi, epsabs=1e-12, panel_width=0.5)

    assert result.converged
    assert result.value.shape == (1,)
    assert result.value[0] == pytest.approx(2j, abs=1e-12)
    assert result.panels >= 7


def test_integrate_error_estimate_respects_target() -> None:
    reference, _ = quad(lambda x: math.exp(-x * x) * math.cos(3.0 * x), -6.0, 6.0, epsabs=1e-13, limit=200)

    result = integrate(lambda x: np.exp(-x * x) * np.cos(3.0 * x), -6.0, 6.0, epsabs=1e-10, panel_width=1.0)

    assert result.converged
    assert result.error <= 1e-10
    assert result.scalar == pytest.approx(reference, abs=1e-10)


def test_integrate_rejects_infinite_limits() -> None:
    with pytest.raises(ValueError):
        integrate(np.sin, 0.0, math.inf)


def test_map_chunks_matches_inline_evaluation() -> None:
    values = np.linspace(-50.0, 50.0, 3 * MIN_CHUNK + 17)

    threaded = map_chunks(np.cos, values, threads=4)

    assert threaded.shape == values.shape
    assert np.array_equal(threaded, np.cos(values))
    assert np.array_equal(map_chunks(np.cos, values[:10], threads=4), np.cos(values[:10]))


@pytest.mark.parametrize(
    "family",
    [Gaussian(0.5, 2.0), Uniform(-1.0, 3.0), Exponential(2.0), Laplace(-1.0, 0.5)],
)
def test_family_cf_and_tail_bound(family) -> None:
    t = np.linspace(0.0, 50.0, 5001)
    values = family.cf(t)

    assert values[0] == pytest.approx(1.0)
    assert np.all(np.abs(values) <= 1.0 + 1e-12)
    for T in (1.0, 5.0, 20.0):
        beyond = np.abs(values[t >= T])
        assert beyond.max() <= family.modulus_tail(T) + 1e-12


@pytest.mark.parametrize(
    "family",
    [Gaussian(0.5, 2.0), Uniform(-1.0, 3.0), Exponential(2.0), Laplace(-1.0, 0.5)],
)
def test_family_derivative_bound(family) -> None:
    t = np.linspace(-20.0, 20.0, 40001)
    slopes = np.abs(np.diff(family.cf(t))) / np.diff(t)

    assert slopes.max() <= family.abs_moment() + 1e-9


def test_gaussian_abs_moment_closed_form() -> None:
    assert Gaussian(0.0, 1.0).abs_moment() == pytest.approx(math.sqrt(2.0 / math.pi))
    assert Uniform(-1.0, 1.0).abs_moment() == pytest.approx(0.5)
    assert Laplace(0.0, 2.0).abs_moment() == pytest.approx(2.0)


def test_family_dict_round_trip() -> None:
    family = Laplace(-1.0, 0.5)

    assert family_from_dict({**family_to_dict(family), "weight": 0.3}) == family
