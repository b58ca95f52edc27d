from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import erf, sici

from qid_lab.catalog import catalog_names, catalog_spec
from qid_lab.charfn import (
    Part,
    abscont_modulus_tail,
    cantor_cf,
    cantor_depth,
    eval_grid,
    eval_part,
    lipschitz_const,
    mean_value,
    symmetrized_modulus_sq,
)
from qid_lab.dist_model import SingularPart
from qid_lab.errors import MissingPartError, SpecError


def test_degenerate_atom_is_constant() -> None:
    spec = catalog_spec("degenerate_atom")
    t = np.linspace(-100.0, 100.0, 101)

    assert np.allclose(eval_grid(spec, Part.D, t), 1.0, atol=0.0, rtol=0.0)
    assert eval_part(spec, Part.FULL, 3.0).abs == 1.0


def test_bernoulli_half_vanishes_at_pi() -> None:
    value = eval_part(catalog_spec("bernoulli_050"), Part.D, math.pi)

    assert value.abs < 1e-15


def test_gaussian_value() -> None:
    value = eval_part(catalog_spec("gaussian"), Part.A, 1.0)

    assert value.re == pytest.approx(math.exp(-0.5), abs=1e-15)
    assert value.im == 0.0


@pytest.mark.parametrize("name", catalog_names())
def test_catalog_cf_is_normalized_and_hermitian(name: str) -> None:
    spec = catalog_spec(name)
    t = np.linspace(0.0, 40.0, 801)

    values = eval_grid(spec, Part.FULL, t)
    mirrored = eval_grid(spec, Part.FULL, -t)

    assert values[0] == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.abs(values) <= 1.0 + 1e-9)
    assert np.allclose(mirrored, np.conj(values), rtol=0.0, atol=1e-12)


def test_full_is_weighted_sum_of_parts() -> None:
    spec = catalog_spec("dominated_cantor")
    t = np.linspace(-10.0, 10.0, 201)

    parts = (
        spec.c_d * eval_grid(spec, Part.D, t)
        + spec.c_a * eval_grid(spec, Part.A, t)
        + spec.c_s * eval_grid(spec, Part.S, t)
    )
    continuous = (1.0 - spec.c_d) * eval_grid(spec, Part.C, t) + spec.c_d * eval_grid(spec, Part.D, t)

    assert np.allclose(eval_grid(spec, Part.FULL, t), parts, rtol=0.0, atol=1e-14)
    assert np.allclose(eval_grid(spec, Part.FULL, t), continuous, rtol=0.0, atol=1e-14)


def test_cantor_self_similarity() -> None:
    part = SingularPart()
    t = np.linspace(-20.0, 20.0, 1000)

    lhs = cantor_cf(part, 3.0 * t)
    rhs = np.exp(1j * t) * np.cos(t) * cantor_cf(part, t)

    assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_cantor_zeros_and_depth() -> None:
    part = SingularPart()

    assert abs(cantor_cf(part, np.array([1.5 * math.pi]))[0]) < 1e-15
    assert cantor_depth(1.0, 1.0) == 17
    assert cantor_depth(1.0, 0.0) == 1
    assert cantor_depth(1.0, 1e300) == 64


def test_uniform_matches_sine_integral_oracle() -> None:
    spec = catalog_spec("uniform")
    T = 10.0
    si, _ = sici(2.0 * T)
    expected = (float(si) - math.sin(T) ** 2 / T) / T

    result = mean_value(spec, 0.0, T)

    assert result.value == pytest.approx(expected, abs=1e-9)
    assert result.quadrature_error < 1e-6


def test_gaussian_mean_value_closed_form() -> None:
    result = mean_value(catalog_spec("gaussian"), 0.0, 10.0)

    assert result.value == pytest.approx(math.sqrt(math.pi) * float(erf(10.0)) / 20.0, abs=1e-12)


def test_mean_value_quadrature_matches_reference_integral() -> None:
    spec = catalog_spec("boundary_cantor")
    t, T = 1.5, 7.0

    def integrand(h: float) -> float:
        return float(abs(eval_grid(spec, Part.C, np.array([t + h]))[0]) ** 2)

    reference, _ = quad(integrand, -T, T, epsabs=1e-12, epsrel=1e-12, limit=500)

    result = mean_value(spec, t, T)

    assert result.value == pytest.approx(reference / (2.0 * T), abs=1e-8)


def test_symmetrized_modulus() -> None:
    spec = catalog_spec("mixed_bernoulli_gaussian")

    assert symmetrized_modulus_sq(spec, 0.0) == pytest.approx(1.0)
    assert symmetrized_modulus_sq(spec, 2.0) == pytest.approx(math.exp(-4.0))
    with pytest.raises(SpecError):
        symmetrized_modulus_sq(catalog_spec("bernoulli_025"), 0.0)


def test_lipschitz_constants() -> None:
    assert lipschitz_const(catalog_spec("bernoulli_025"), Part.D) == pytest.approx(0.25)
    assert lipschitz_const(catalog_spec("degenerate_atom"), Part.FULL) == 0.0
    assert lipschitz_const(catalog_spec("cantor"), Part.FULL) == pytest.approx(1.0)
    assert lipschitz_const(catalog_spec("mixed_bernoulli_gaussian"), Part.FULL) == pytest.approx(
        0.6 * 0.25 + 0.4 * math.sqrt(2.0 / math.pi)
    )


def test_lipschitz_bound_holds_on_grid() -> None:
    spec = catalog_spec("dominated_cantor")
    t = np.linspace(-30.0, 30.0, 60001)
    slopes = np.abs(np.diff(np.abs(eval_grid(spec, Part.FULL, t)))) / np.diff(t)

    assert slopes.max() <= lipschitz_const(spec, Part.FULL) + 1e-9


def _present_parts(name: str) -> list[Part]:
    spec = catalog_spec(name)
    parts = [Part.FULL]
    if spec.discrete is not None:
        parts.append(Part.D)
    if spec.abscont is not None:
        parts.append(Part.A)
    if spec.singular is not None:
        parts.append(Part.S)
    if spec.abscont is not None or spec.singular is not None:
        parts.append(Part.C)
    return parts


@pytest.mark.parametrize("name", catalog_names())
def test_modulus_is_bounded_by_one_at_random_points(name: str) -> None:
    spec = catalog_spec(name)
    t = np.random.default_rng(11).uniform(-1e3, 1e3, 10_000)

    for part in _present_parts(name):
        assert np.abs(eval_grid(spec, part, t)).max() <= 1.0 + 1e-9, part


@pytest.mark.parametrize("name", catalog_names())
def test_lipschitz_bound_holds_on_random_pairs(name: str) -> None:
    spec = catalog_spec(name)
    rng = np.random.default_rng(29)
    t1 = rng.uniform(-100.0, 100.0, 10_000)
    offsets = rng.choice([-1.0, 1.0], 10_000) * 10.0 ** rng.uniform(-6.0, 1.0, 10_000)
    t2 = t1 + offsets

    for part in _present_parts(name):
        L = lipschitz_const(spec, part)
        gaps = np.abs(eval_grid(spec, part, t1) - eval_grid(spec, part, t2))
        assert np.all(gaps <= L * np.abs(offsets) + 1e-12), part


def test_abscont_tail() -> None:
    assert abscont_modulus_tail(catalog_spec("exponential"), 1000.0) == pytest.approx(1.0 / math.sqrt(1.0 + 1e6))
    assert abscont_modulus_tail(catalog_spec("bernoulli_025"), 10.0) == 0.0


def test_missing_part_and_bad_input() -> None:
    spec = catalog_spec("gaussian")

    with pytest.raises(MissingPartError):
        eval_grid(spec, Part.S, np.array([0.0]))
    with pytest.raises(MissingPartError):
        eval_grid(spec, Part.D, np.array([0.0]))
    with pytest.raises(ValueError):
        eval_part(spec, Part.FULL, math.nan)
    with pytest.raises(ValueError):
        eval_grid(spec, "z", np.array([0.0]))
