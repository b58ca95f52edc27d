"""Spectral pairs (gamma, G) with a signed spectral measure G.

The characteristic exponent is

    psi(t) = i t gamma + int (e^{itx} - 1 - i t sin x) (1 + x^2) / x^2 dG(x),

with the integrand at x = 0 taken as its continuous extension -t^2/2.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Any, Mapping

import numpy as np

from .charfn import CFValue, discrete_cf
from .dist_model import DiscretePart, infer_lattice_hint
from .errors import (
    AliasingError,
    ExponentOverflowError,
    NumericalError,
    SpecError,
    SpecFormatError,
    UnsupportedError,
    ZeroHitError,
)
from .quadrature import integrate

logger = logging.getLogger(__name__)

SEGMENT_QUAD_TOL = 1e-10
OVERFLOW_EXPONENT = 700.0
ZERO_HIT = 1e-9
ALIASING_TOL = 1e-10
COEFFICIENT_FLOOR = 1e-14
ROUND_TRIP_TOL = 1e-8
MIN_GRID = 256
MAX_GRID = 1 << 16
T_BLOCK = 256


@dataclass(frozen=True, slots=True)
class DensitySegment:
    a: float
    b: float
    level: float

    @property
    def mass(self) -> float:
        return self.level * (self.b - self.a)


@dataclass(frozen=True, slots=True)
class SignedMeasure:
    atoms: tuple[tuple[float, float], ...] = ()
    segments: tuple[DensitySegment, ...] = ()

    def __post_init__(self) -> None:
        atoms = tuple(sorted((float(x), float(w)) for x, w in self.atoms))
        for x, w in atoms:
            if not (math.isfinite(x) and math.isfinite(w)):
                raise SpecError("signed measure atoms must be finite")
            if w == 0.0:
                raise SpecError(f"signed measure atom at {x!r} has zero weight")
        for (x1, _), (x2, _) in zip(atoms, atoms[1:]):
            if x1 == x2:
                raise SpecError(f"signed measure has two atoms at {x1!r}")

        segments = tuple(sorted(self.segments, key=lambda s: (s.a, s.b)))
        for segment in segments:
            if not (math.isfinite(segment.a) and math.isfinite(segment.b) and math.isfinite(segment.level)):
                raise SpecError("density segments must be finite")
            if not segment.a < segment.b:
                raise SpecError(f"density segment [{segment.a!r}, {segment.b!r}) is empty")
        for left, right in zip(segments, segments[1:]):
            if right.a < left.b:
                raise SpecError("density segments must be disjoint")

        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "segments", segments)

    @property
    def is_zero(self) -> bool:
        return not self.atoms and all(segment.level == 0.0 for segment in self.segments)


@dataclass(frozen=True, slots=True)
class SpectralPair:
    gamma: float = 0.0
    G: SignedMeasure = field(default_factory=SignedMeasure)

    def to_dict(self) -> dict[str, Any]:
        return pair_to_dict(self)


class BoundVariant(StrEnum):
    PAPER = "paper"
    CORRECTED = "corrected"


@dataclass(frozen=True, slots=True)
class BoundConstants:
    B: float
    C: float
    variant: BoundVariant

    @property
    def kappa(self) -> int:
        return 1 if self.variant is BoundVariant.PAPER else 2

    def bound(self, h: float) -> float:
        return self.C * math.exp(self.B * h * h)


def total_variation(G: SignedMeasure) -> float:
    return float(sum(abs(w) for _, w in G.atoms) + sum(abs(segment.mass) for segment in G.segments))


def bound_constants(G: SignedMeasure, variant: BoundVariant | str = BoundVariant.CORRECTED) -> BoundConstants:
    variant = BoundVariant(variant)
    tv = total_variation(G)
    if variant is BoundVariant.PAPER:
        return BoundConstants(B=0.5 * tv, C=math.exp(2.0 * tv), variant=variant)
    return BoundConstants(B=tv, C=math.exp(4.0 * tv), variant=variant)


def _sin_defect(u: np.ndarray) -> np.ndarray:
    """(sin u - u) / u^2, accurate near u = 0."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < 1e-2
    safe = np.where(small, 1.0, u)
    direct = (np.sin(safe) - safe) / (safe * safe)
    u2 = u * u
    series = u * (-1.0 / 6.0 + u2 * (1.0 / 120.0 - u2 / 5040.0))
    return np.where(small, series, direct)


def lk_kernel(t: np.ndarray, x: np.ndarray) -> np.ndarray:
    """(e^{itx} - 1 - i t sin x)(1 + x^2)/x^2, equal to -t^2/2 at x = 0."""
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    real = -0.5 * t * t * np.sinc(t * x / (2.0 * math.pi)) ** 2
    imag = t * t * _sin_defect(t * x) - t * _sin_defect(x)
    return (1.0 + x * x) * (real + 1j * imag)


def _segment_integrals(segment: DensitySegment, t: np.ndarray) -> np.ndarray:
    values = np.zeros(t.shape, dtype=complex)
    for start in range(0, t.size, T_BLOCK):
        block = t[start : start + T_BLOCK]
        reach = float(np.max(np.abs(block))) if block.size else 0.0
        result = integrate(
            lambda x: lk_kernel(block[:, None], x[None, :]),
            segment.a,
            segment.b,
            epsabs=SEGMENT_QUAD_TOL,
            panel_width=min(segment.b - segment.a, 2.0 / (1.0 + reach)),
        )
        values[start : start + block.size] = segment.level * result.value
    return values


def lk_exponent_grid(pair: SpectralPair, t: Any) -> np.ndarray:
    grid = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(grid)):
        raise ValueError("t must be finite")
    exponent = 1j * pair.gamma * grid
    for x, w in pair.G.atoms:
        exponent = exponent + w * lk_kernel(grid, np.float64(x))
    flat = grid.reshape(-1)
    for segment in pair.G.segments:
        if segment.level != 0.0:
            exponent = exponent + _segment_integrals(segment, flat).reshape(grid.shape)
    return exponent


def lk_exponent(pair: SpectralPair, t: float) -> complex:
    if not math.isfinite(t):
        raise ValueError("t must be finite")
    return complex(lk_exponent_grid(pair, np.array([t]))[0])


def lk_charfn_grid(pair: SpectralPair, t: Any) -> np.ndarray:
    exponent = lk_exponent_grid(pair, t)
    if exponent.size and float(np.max(exponent.real)) > OVERFLOW_EXPONENT:
        raise ExponentOverflowError(
            f"Re(exponent) = {float(np.max(exponent.real)):.6g} exceeds {OVERFLOW_EXPONENT:g}"
        )
    return np.exp(exponent)


def lk_charfn(pair: SpectralPair, t: float) -> CFValue:
    if not math.isfinite(t):
        raise ValueError("t must be finite")
    return CFValue.from_complex(complex(lk_charfn_grid(pair, np.array([t]))[0]))


def hahn_jordan(pair: SpectralPair) -> tuple[SpectralPair, SpectralPair]:
    plus_atoms = tuple((x, w) for x, w in pair.G.atoms if w > 0)
    minus_atoms = tuple((x, -w) for x, w in pair.G.atoms if w < 0)
    plus_segments = tuple(s for s in pair.G.segments if s.level > 0)
    minus_segments = tuple(DensitySegment(s.a, s.b, -s.level) for s in pair.G.segments if s.level < 0)
    return (
        SpectralPair(gamma=pair.gamma, G=SignedMeasure(atoms=plus_atoms, segments=plus_segments)),
        SpectralPair(gamma=0.0, G=SignedMeasure(atoms=minus_atoms, segments=minus_segments)),
    )


def _periodic_log(ks: np.ndarray, masses: np.ndarray, n: int, span: float) -> tuple[np.ndarray, int, np.ndarray]:
    theta = 2.0 * math.pi * np.arange(n) / n
    values = np.zeros(n, dtype=complex)
    for k, p in zip(ks, masses):
        values += p * np.exp(1j * k * theta)
    modulus = np.abs(values)
    lowest = int(np.argmin(modulus))
    if modulus[lowest] < ZERO_HIT:
        raise ZeroHitError(
            f"|f_d| = {modulus[lowest]:.3g} on the period grid; the characteristic function has (or nearly has) a zero",
            t=float(theta[lowest]) / span,
            modulus=float(modulus[lowest]),
        )
    phase = np.unwrap(np.angle(values))
    closing = float(np.angle(values[0] / values[-1]))
    winding = round((phase[-1] + closing - phase[0]) / (2.0 * math.pi))
    log_values = np.log(modulus) + 1j * (phase - phase[0]) - 1j * winding * theta
    return log_values, winding, theta


def extract_lattice_spectral(d: DiscretePart) -> SpectralPair:
    """Recover (gamma, G) of a zero-free lattice law from its log-characteristic function."""
    locations = [x for x, _ in d.atoms]
    hint = d.lattice_hint or infer_lattice_hint(locations)
    if hint is None:
        raise UnsupportedError("Spectral extraction needs a lattice discrete part (no finite period).")
    r, h = hint.offset, hint.span
    ks = np.rint((np.asarray(locations) - r) / h).astype(np.int64)
    masses = np.array([p for _, p in d.atoms], dtype=float)

    n = max(MIN_GRID, 1 << math.ceil(math.log2(max(1, 8 * len(d.atoms)))))
    while True:
        log_values, winding, _ = _periodic_log(ks - ks.min(), masses, n, h)
        coefficients = np.fft.fft(log_values) / n
        frequencies = np.rint(np.fft.fftfreq(n, d=1.0 / n)).astype(np.int64)
        trailing = float(np.max(np.abs(coefficients[np.abs(frequencies) >= n // 4])))
        if trailing <= ALIASING_TOL:
            break
        if n >= MAX_GRID:
            raise AliasingError(
                f"trailing Fourier coefficients {trailing:.3g} exceed {ALIASING_TOL:g} at grid size {n}"
            )
        logger.debug("extraction grid %d aliased (trailing %.3g); doubling", n, trailing)
        n *= 2

    imaginary = float(np.max(np.abs(coefficients.imag)))
    if imaginary > ALIASING_TOL:
        logger.warning("extracted coefficients carry imaginary parts up to %.3g", imaginary)

    drift = r + h * (int(ks.min()) + winding)
    atoms: list[tuple[float, float]] = []
    gamma = drift
    for k, c in sorted(zip(frequencies.tolist(), coefficients.real.tolist())):
        if k == 0 or abs(c) <= COEFFICIENT_FLOOR:
            continue
        x = h * k
        atoms.append((x, c * x * x / (1.0 + x * x)))
        gamma += c * math.sin(x)
    pair = SpectralPair(gamma=gamma, G=SignedMeasure(atoms=tuple(atoms)))

    t = np.linspace(0.0, 2.0 * math.pi / h, 257)
    residual = float(np.max(np.abs(lk_charfn_grid(pair, t) - discrete_cf(d, t))))
    if residual > ROUND_TRIP_TOL:
        raise NumericalError(f"extracted pair reproduces f_d only to {residual:.3g}")
    logger.debug("extracted %d spectral atoms on grid %d, winding %d", len(atoms), n, winding)
    return pair


def pair_to_dict(pair: SpectralPair) -> dict[str, Any]:
    payload: dict[str, Any] = {"gamma": pair.gamma, "atoms": [[x, w] for x, w in pair.G.atoms]}
    if pair.G.segments:
        payload["segments"] = [[s.a, s.b, s.level] for s in pair.G.segments]
    return payload


def pair_from_dict(payload: Mapping[str, Any]) -> SpectralPair:
    if not isinstance(payload, Mapping) or "gamma" not in payload:
        raise SpecFormatError("Spectral pair must be an object with gamma and atoms.")
    try:
        atoms = tuple((float(x), float(w)) for x, w in payload.get("atoms", []))
        segments = tuple(DensitySegment(float(a), float(b), float(level)) for a, b, level in payload.get("segments", []))
        gamma = float(payload["gamma"])
    except (TypeError, ValueError) as exc:
        raise SpecFormatError(f"Malformed spectral pair: {exc}") from exc
    return SpectralPair(gamma=gamma, G=SignedMeasure(atoms=atoms, segments=segments))
