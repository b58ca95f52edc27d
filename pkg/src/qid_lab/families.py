"""Closed-form absolutely continuous families.

Every family exposes its characteristic function, the first absolute moment
(a bound on the derivative of the CF) and the supremum of the CF modulus
beyond a threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, ClassVar

import numpy as np
from scipy.special import erf

from .errors import SpecFormatError


@dataclass(frozen=True, slots=True)
class Gaussian:
    mean: float = 0.0
    variance: float = 1.0
    kind: ClassVar[str] = "gaussian"

    def problems(self) -> list[str]:
        return [] if self.variance > 0 else ["variance must be > 0"]

    def cf(self, t: np.ndarray) -> np.ndarray:
        return np.exp(1j * self.mean * t - 0.5 * self.variance * t * t)

    def abs_moment(self) -> float:
        sigma = math.sqrt(self.variance)
        mu = self.mean
        return sigma * math.sqrt(2.0 / math.pi) * math.exp(-mu * mu / (2.0 * self.variance)) + mu * float(
            erf(mu / (sigma * math.sqrt(2.0)))
        )

    def modulus_tail(self, T: Any) -> Any:
        return np.exp(-0.5 * self.variance * np.square(T))

    def params(self) -> dict[str, float]:
        return {"mean": self.mean, "variance": self.variance}


@dataclass(frozen=True, slots=True)
class Uniform:
    a: float = -1.0
    b: float = 1.0
    kind: ClassVar[str] = "uniform"

    def problems(self) -> list[str]:
        return [] if self.a < self.b else ["requires a < b"]

    def cf(self, t: np.ndarray) -> np.ndarray:
        half = 0.5 * (self.b - self.a)
        center = 0.5 * (self.a + self.b)
        # np.sinc is the normalized sinc sin(pi x)/(pi x)
        return np.exp(1j * center * t) * np.sinc(half * t / math.pi)

    def abs_moment(self) -> float:
        a, b = self.a, self.b
        if a >= 0:
            return 0.5 * (a + b)
        if b <= 0:
            return -0.5 * (a + b)
        return (a * a + b * b) / (2.0 * (b - a))

    def modulus_tail(self, T: Any) -> Any:
        T = np.asarray(T, dtype=float)
        safe = np.where(T > 0, T, 1.0)
        return np.where(T > 0, np.minimum(1.0, 2.0 / ((self.b - self.a) * safe)), 1.0)[()]

    def params(self) -> dict[str, float]:
        return {"a": self.a, "b": self.b}


@dataclass(frozen=True, slots=True)
class Exponential:
    rate: float = 1.0
    kind: ClassVar[str] = "exponential"

    def problems(self) -> list[str]:
        return [] if self.rate > 0 else ["rate must be > 0"]

    def cf(self, t: np.ndarray) -> np.ndarray:
        return 1.0 / (1.0 - 1j * t / self.rate)

    def abs_moment(self) -> float:
        return 1.0 / self.rate

    def modulus_tail(self, T: Any) -> Any:
        return 1.0 / np.sqrt(1.0 + np.square(T / self.rate))

    def params(self) -> dict[str, float]:
        return {"rate": self.rate}


@dataclass(frozen=True, slots=True)
class Laplace:
    mean: float = 0.0
    scale: float = 1.0
    kind: ClassVar[str] = "laplace"

    def problems(self) -> list[str]:
        return [] if self.scale > 0 else ["scale must be > 0"]

    def cf(self, t: np.ndarray) -> np.ndarray:
        return np.exp(1j * self.mean * t) / (1.0 + (self.scale * t) ** 2)

    def abs_moment(self) -> float:
        m = abs(self.mean)
        return m + self.scale * math.exp(-m / self.scale)

    def modulus_tail(self, T: Any) -> Any:
        return 1.0 / (1.0 + np.square(self.scale * T))

    def params(self) -> dict[str, float]:
        return {"mean": self.mean, "scale": self.scale}


Family = Gaussian | Uniform | Exponential | Laplace

FAMILIES: dict[str, type[Family]] = {
    Gaussian.kind: Gaussian,
    Uniform.kind: Uniform,
    Exponential.kind: Exponential,
    Laplace.kind: Laplace,
}


def family_from_dict(payload: Any) -> Family:
    if not isinstance(payload, dict):
        raise SpecFormatError("abscont component must be an object.")
    kind = str(payload.get("kind", "")).strip().lower()
    family = FAMILIES.get(kind)
    if family is None:
        raise SpecFormatError(
            f"Unknown abscont kind '{kind}'. Expected one of: {', '.join(sorted(FAMILIES))}"
        )
    params = {key: value for key, value in payload.items() if key not in {"kind", "weight"}}
    try:
        return family(**{key: float(value) for key, value in params.items()})
    except (TypeError, ValueError) as exc:
        raise SpecFormatError(f"Invalid parameters for {kind}: {exc}") from exc


def family_to_dict(family: Family) -> dict[str, Any]:
    return {"kind": family.kind, **family.params()}
