from __future__ import annotations

import math
from dataclasses import dataclass
from enum import StrEnum
from typing import Any

import numpy as np
from scipy.special import erf

from .dist_model import AbsContPart, DiscretePart, DistributionSpec, SingularPart, continuous_mix
from .errors import MissingPartError, QuadratureError, SpecError
from .parallel import map_chunks
from .quadrature import integrate

CANTOR_TRUNCATION = 1e-8
CANTOR_MAX_DEPTH = 64
MEAN_VALUE_TARGET = 1e-9
MEAN_VALUE_FAILURE = 1e-6


class Part(StrEnum):
    FULL = "full"
    D = "d"
    A = "a"
    S = "s"
    C = "c"


@dataclass(frozen=True, slots=True)
class CFValue:
    re: float
    im: float

    @classmethod
    def from_complex(cls, value: complex) -> CFValue:
        return cls(re=float(value.real), im=float(value.imag))

    def to_complex(self) -> complex:
        return complex(self.re, self.im)

    @property
    def abs(self) -> float:
        return math.hypot(self.re, self.im)

    def to_dict(self) -> dict[str, float]:
        return {"re": self.re, "im": self.im, "abs": self.abs}


@dataclass(frozen=True, slots=True)
class MeanValue:
    t: float
    T: float
    value: float
    quadrature_error: float

    def to_dict(self) -> dict[str, float]:
        return {"t": self.t, "T": self.T, "value": self.value, "quadrature_error": self.quadrature_error}


def cantor_depth(scale: float, t_max: float) -> int:
    """Number of product factors so that ``scale*|t|/3**K < 1e-8``, capped at 64."""
    reach = scale * abs(t_max)
    if reach <= CANTOR_TRUNCATION:
        return 1
    depth = math.ceil(math.log(reach / CANTOR_TRUNCATION, 3.0))
    while depth < CANTOR_MAX_DEPTH and reach / 3.0**depth >= CANTOR_TRUNCATION:
        depth += 1
    return max(1, min(depth, CANTOR_MAX_DEPTH))


def discrete_cf(part: DiscretePart, t: np.ndarray) -> np.ndarray:
    result = np.zeros(t.shape, dtype=complex)
    for x, p in part.atoms:
        result += p * np.exp(1j * x * t)
    return result


def abscont_cf(part: AbsContPart, t: np.ndarray) -> np.ndarray:
    result = np.zeros(t.shape, dtype=complex)
    for family, weight in part.components:
        result += weight * family.cf(t)
    return result


def cantor_cf(part: SingularPart, t: np.ndarray) -> np.ndarray:
    t_max = float(np.max(np.abs(t))) if t.size else 0.0
    depth = cantor_depth(part.scale, t_max)
    product = np.ones(t.shape, dtype=float)
    u = part.scale * t
    for _ in range(depth):
        u = u / 3.0
        product *= np.cos(u)
    return np.exp(1j * t * (part.offset + 0.5 * part.scale)) * product


def _require(spec: DistributionSpec, part: Part) -> None:
    if part is Part.D and spec.discrete is None:
        raise MissingPartError("Spec has no discrete part (c_d = 0).")
    if part is Part.A and spec.abscont is None:
        raise MissingPartError("Spec has no absolutely continuous part (c_a = 0).")
    if part is Part.S and spec.singular is None:
        raise MissingPartError("Spec has no singular part (c_s = 0).")
    if part is Part.C and spec.abscont is None and spec.singular is None:
        raise MissingPartError("Spec has no continuous part (c_d = 1).")


def _evaluate(spec: DistributionSpec, part: Part, t: np.ndarray) -> np.ndarray:
    if part is Part.D:
        return discrete_cf(spec.discrete, t)
    if part is Part.A:
        return abscont_cf(spec.abscont, t)
    if part is Part.S:
        return cantor_cf(spec.singular, t)
    if part is Part.C:
        mix = continuous_mix(spec)
        result = np.zeros(t.shape, dtype=complex)
        if mix.abscont is not None:
            result += mix.abscont_weight * abscont_cf(mix.abscont, t)
        if mix.singular is not None:
            result += mix.singular_weight * cantor_cf(mix.singular, t)
        return result

    result = np.zeros(t.shape, dtype=complex)
    if spec.discrete is not None:
        result += spec.c_d * discrete_cf(spec.discrete, t)
    if spec.abscont is not None:
        result += spec.c_a * abscont_cf(spec.abscont, t)
    if spec.singular is not None:
        result += spec.c_s * cantor_cf(spec.singular, t)
    return result


def eval_grid(spec: DistributionSpec, part: Part | str, t: Any, threads: int = 1) -> np.ndarray:
    part = Part(part)
    _require(spec, part)
    grid = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(grid)):
        raise ValueError("t must be finite")
    return map_chunks(lambda chunk: _evaluate(spec, part, chunk), grid, threads)


def eval_part(spec: DistributionSpec, part: Part | str, t: float) -> CFValue:
    if not math.isfinite(t):
        raise ValueError("t must be finite")
    return CFValue.from_complex(complex(eval_grid(spec, part, np.array([t]))[0]))


def symmetrized_modulus_sq_grid(spec: DistributionSpec, t: Any) -> np.ndarray:
    if spec.abscont is None and spec.singular is None:
        raise SpecError("Symmetrized continuous part is undefined when c_d = 1.")
    values = eval_grid(spec, Part.C, t)
    return values.real**2 + values.imag**2


def symmetrized_modulus_sq(spec: DistributionSpec, t: float) -> float:
    if not math.isfinite(t):
        raise ValueError("t must be finite")
    return float(symmetrized_modulus_sq_grid(spec, np.array([t]))[0])


def _single_gaussian_variance(spec: DistributionSpec) -> float | None:
    if spec.singular is not None or spec.abscont is None or len(spec.abscont.components) != 1:
        return None
    family, _ = spec.abscont.components[0]
    return getattr(family, "variance", None) if family.kind == "gaussian" else None


def continuous_panel_width(spec: DistributionSpec) -> float:
    return 2.0 / (1.0 + 2.0 * lipschitz_const(spec, Part.C))


def mean_value(spec: DistributionSpec, t: float, T: float, epsabs: float = MEAN_VALUE_TARGET) -> MeanValue:
    if not (math.isfinite(t) and math.isfinite(T)) or T <= 0:
        raise ValueError("mean_value requires finite t and T > 0")
    continuous_mix(spec)

    variance = _single_gaussian_variance(spec)
    if variance is not None:
        sigma = math.sqrt(variance)
        integral = math.sqrt(math.pi) / (2.0 * sigma) * (float(erf(sigma * (t + T))) - float(erf(sigma * (t - T))))
        return MeanValue(t=t, T=T, value=integral / (2.0 * T), quadrature_error=0.0)

    result = integrate(
        lambda h: symmetrized_modulus_sq_grid(spec, t + h),
        -T,
        T,
        epsabs=epsabs * 2.0 * T,
        panel_width=continuous_panel_width(spec),
    )
    value = result.scalar / (2.0 * T)
    error = result.error / (2.0 * T)
    if error > MEAN_VALUE_FAILURE:
        raise QuadratureError(
            f"mean_value quadrature error {error:.3g} exceeds {MEAN_VALUE_FAILURE:g}",
            value=value,
            error=error,
        )
    return MeanValue(t=t, T=T, value=max(value, 0.0), quadrature_error=error)


def lipschitz_const(spec: DistributionSpec, part: Part | str) -> float:
    part = Part(part)
    _require(spec, part)

    def discrete() -> float:
        return float(sum(p * abs(x) for x, p in spec.discrete.atoms))

    def abscont() -> float:
        return float(sum(weight * family.abs_moment() for family, weight in spec.abscont.components))

    def singular() -> float:
        return abs(spec.singular.offset) + spec.singular.scale

    if part is Part.D:
        return discrete()
    if part is Part.A:
        return abscont()
    if part is Part.S:
        return singular()
    if part is Part.C:
        mix = continuous_mix(spec)
        bound = 0.0
        if mix.abscont is not None:
            bound += mix.abscont_weight * abscont()
        if mix.singular is not None:
            bound += mix.singular_weight * singular()
        return bound

    bound = 0.0
    if spec.discrete is not None:
        bound += spec.c_d * discrete()
    if spec.abscont is not None:
        bound += spec.c_a * abscont()
    if spec.singular is not None:
        bound += spec.c_s * singular()
    return bound


def abscont_modulus_tail(spec: DistributionSpec, T: Any) -> Any:
    """Upper bound on ``sup_{|t| >= T} |f_a(t)|`` from the closed forms; ``T`` may be an array."""
    reach = np.asarray(T, dtype=float)
    if spec.abscont is None:
        return np.zeros(reach.shape)[()]
    total = sum(weight * family.modulus_tail(reach) for family, weight in spec.abscont.components)
    return np.minimum(1.0, total)[()]
