"""Named distribution specs and spectral pairs used by the CLI and the tests."""

from __future__ import annotations

import math
from collections.abc import Callable

import numpy as np

from .dist_model import AbsContPart, DiscretePart, DistributionSpec, SingularPart, validate
from .errors import SpecError
from .families import Exponential, Family, Gaussian, Laplace, Uniform
from .spectral import DensitySegment, SignedMeasure, SpectralPair

POISSON_TAIL = 1e-16


def _discrete(atoms: list[tuple[float, float]], c_d: float = 1.0) -> DistributionSpec:
    return DistributionSpec(c_d=c_d, c_a=0.0, c_s=0.0, discrete=DiscretePart(atoms=tuple(atoms)))


def poisson_atoms(rate: float = 1.0, tail: float = POISSON_TAIL) -> list[tuple[float, float]]:
    """Poisson(rate) truncated once the remaining mass drops below ``tail``, renormalized."""
    atoms: list[tuple[float, float]] = []
    mass, k, total = math.exp(-rate), 0, 0.0
    while 1.0 - total > tail and mass >= 1e-15:
        atoms.append((float(k), mass))
        total += mass
        k += 1
        mass *= rate / k
    return [(x, p / total) for x, p in atoms]


def _mixed_bernoulli_gaussian() -> DistributionSpec:
    return DistributionSpec(
        c_d=0.6,
        c_a=0.4,
        c_s=0.0,
        discrete=DiscretePart(atoms=((0.0, 0.75), (1.0, 0.25))),
        abscont=AbsContPart(components=((Gaussian(0.0, 1.0), 1.0),)),
    )


def _continuous(family: Family, c_s: float = 0.0) -> DistributionSpec:
    return DistributionSpec(
        c_d=0.0,
        c_a=1.0 - c_s,
        c_s=c_s,
        abscont=AbsContPart(components=((family, 1.0),)) if c_s < 1.0 else None,
        singular=SingularPart() if c_s > 0.0 else None,
    )


CATALOG: dict[str, Callable[[], DistributionSpec]] = {
    "degenerate_atom": lambda: _discrete([(0.0, 1.0)]),
    "bernoulli_025": lambda: _discrete([(0.0, 0.75), (1.0, 0.25)]),
    "bernoulli_050": lambda: _discrete([(0.0, 0.5), (1.0, 0.5)]),
    "poisson_1": lambda: _discrete(poisson_atoms(1.0)),
    "three_point_lattice": lambda: _discrete([(-1.0, 0.2), (0.0, 0.5), (1.0, 0.3)]),
    "nonlattice_sqrt2": lambda: _discrete([(0.0, 0.5), (1.0, 0.3), (math.sqrt(2.0), 0.2)]),
    "gaussian": lambda: _continuous(Gaussian(0.0, 1.0)),
    "uniform": lambda: _continuous(Uniform(-1.0, 1.0)),
    "exponential": lambda: _continuous(Exponential(1.0)),
    "laplace": lambda: _continuous(Laplace(0.0, 1.0)),
    "cantor": lambda: DistributionSpec(c_d=0.0, c_a=0.0, c_s=1.0, singular=SingularPart()),
    "cantor_plus_exponential": lambda: _continuous(Exponential(1.0), c_s=0.5),
    "mixed_bernoulli_gaussian": _mixed_bernoulli_gaussian,
    "mass_over_half_gaussian": lambda: DistributionSpec(
        c_d=0.6,
        c_a=0.4,
        c_s=0.0,
        discrete=DiscretePart(atoms=((0.0, 1.0),)),
        abscont=AbsContPart(components=((Gaussian(0.0, 1.0), 1.0),)),
    ),
    # c_s well below c_d * mu_d = 0.3
    "dominated_cantor": lambda: DistributionSpec(
        c_d=0.6,
        c_a=0.3,
        c_s=0.1,
        discrete=DiscretePart(atoms=((0.0, 0.75), (1.0, 0.25))),
        abscont=AbsContPart(components=((Laplace(0.0, 1.0), 1.0),)),
        singular=SingularPart(),
    ),
    # c_s equals c_d * mu_d = 0.25
    "boundary_cantor": lambda: DistributionSpec(
        c_d=0.5,
        c_a=0.25,
        c_s=0.25,
        discrete=DiscretePart(atoms=((0.0, 0.75), (1.0, 0.25))),
        abscont=AbsContPart(components=((Gaussian(0.0, 1.0), 1.0),)),
        singular=SingularPart(),
    ),
}


def catalog_names() -> list[str]:
    return sorted(CATALOG)


def catalog_spec(name: str) -> DistributionSpec:
    try:
        factory = CATALOG[name]
    except KeyError as exc:
        raise SpecError(f"Unknown catalog spec '{name}'. Expected one of: {', '.join(catalog_names())}") from exc
    result = validate(factory())
    if not result.ok or result.spec is None:
        raise SpecError(f"Catalog spec '{name}' does not validate")
    return result.spec


def catalog_specs() -> dict[str, DistributionSpec]:
    return {name: catalog_spec(name) for name in catalog_names()}


def random_signed_pairs(
    seed: int = 0,
    count: int = 20,
    *,
    max_atoms: int = 6,
    segments: bool = True,
) -> list[SpectralPair]:
    """Pairs with 1 to ``max_atoms`` atoms at 0.5 <= |x| <= 3 and weights in [-0.2, 0.4].

    With ``segments``, every odd-numbered pair also carries one density segment
    of length 0.25 to 1 inside [-2, 2.5] with level in [-0.2, 0.3].
    """
    rng = np.random.default_rng(seed)
    pairs: list[SpectralPair] = []
    for i in range(count):
        size = int(rng.integers(1, max_atoms + 1))
        locations = rng.uniform(0.5, 3.0, size) * rng.choice([-1.0, 1.0], size)
        weights = rng.uniform(-0.2, 0.4, size)
        weights[np.abs(weights) < 1e-3] = 0.1
        atoms = {round(float(x), 12): float(w) for x, w in zip(locations, weights)}
        gamma = float(rng.uniform(-1.0, 1.0))
        drawn: tuple[DensitySegment, ...] = ()
        if segments and i % 2 == 1:
            a = float(rng.uniform(-2.0, 1.5))
            level = float(rng.uniform(-0.2, 0.3))
            drawn = (DensitySegment(a, a + float(rng.uniform(0.25, 1.0)), level if abs(level) >= 1e-3 else 0.1),)
        pairs.append(SpectralPair(gamma=gamma, G=SignedMeasure(atoms=tuple(atoms.items()), segments=drawn)))
    return pairs


def catalog_pairs() -> dict[str, SpectralPair]:
    pairs = {
        "zero": SpectralPair(),
        "gaussian": SpectralPair(gamma=0.0, G=SignedMeasure(atoms=((0.0, 1.0),))),
        "poisson_1": SpectralPair(gamma=math.sin(1.0), G=SignedMeasure(atoms=((1.0, 0.5),))),
        "signed": SpectralPair(gamma=0.0, G=SignedMeasure(atoms=((1.0, 0.3), (2.0, -0.1)))),
    }
    for i, pair in enumerate(random_signed_pairs(seed=7, count=4, max_atoms=4, segments=False)):
        pairs[f"random_{i}"] = pair
    return pairs
