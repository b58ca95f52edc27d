"""Numerical checks of the quotient bound, the mean-value decay of the
continuous part and the integrals behind the separation-from-zero results."""

from __future__ import annotations

import cmath
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.optimize import minimize_scalar

from .charfn import Part, discrete_cf, eval_grid, lipschitz_const, mean_value
from .dist_model import DiscretePart, DistributionSpec, require_valid
from .errors import FrequencyCollisionError, SpecError, TranslationSearchError, UnsupportedError
from .quadrature import integrate
from .spectral import (
    T_BLOCK,
    BoundVariant,
    SpectralPair,
    bound_constants,
    lk_charfn_grid,
)

logger = logging.getLogger(__name__)

IDENTITY_TOL = 1e-9
INEQUALITY_TOL = 1e-12
QUOTIENT_QUAD_TOL = 1e-11
MODULUS_FLOOR = 1e-12
FREQUENCY_MERGE_TOL = 1e-12
FREQUENCY_COLLISION_TOL = 1e-8
PARSEVAL_LADDER = (1e2, 1e3, 1e4)
SCAN_ROWS = 256
CHAIN_SAMPLES = 16


def quotient_kernel(t: np.ndarray, h: np.ndarray, x: np.ndarray) -> np.ndarray:
    """e^{itx}(1 - cos hx)(1 + x^2)/x^2, equal to h^2/2 at x = 0."""
    return np.exp(1j * t * x) * (1.0 + x * x) * 0.5 * h * h * np.sinc(h * x / (2.0 * math.pi)) ** 2


def _quotient_exponent(pair: SpectralPair, t: np.ndarray, h: np.ndarray) -> np.ndarray:
    """S(t, h) = int e^{itx}(1 - cos hx)(1 + x^2)/x^2 dG(x) for matching arrays t, h."""
    total = np.zeros(t.shape, dtype=complex)
    for x, w in pair.G.atoms:
        total += w * quotient_kernel(t, h, np.float64(x))
    for segment in pair.G.segments:
        for start in range(0, t.size, T_BLOCK):
            tb = t[start : start + T_BLOCK]
            hb = h[start : start + T_BLOCK]
            reach = float(np.max(np.abs(tb)) + np.max(np.abs(hb)))
            result = integrate(
                lambda x: quotient_kernel(tb[:, None], hb[:, None], x[None, :]),
                segment.a,
                segment.b,
                epsabs=QUOTIENT_QUAD_TOL,
                panel_width=min(segment.b - segment.a, 2.0 / (1.0 + reach)),
            )
            total[start : start + tb.size] += segment.level * result.value
    return total


@dataclass(frozen=True, slots=True)
class QuotientCheck:
    t: float
    h: float
    ratio: float
    identity_residual_paper: float
    identity_residual_corrected: float
    bound_margin_paper: float
    bound_margin_corrected: float
    modulus_residual: float

    def to_dict(self) -> dict[str, float]:
        return {
            "t": self.t,
            "h": self.h,
            "ratio": self.ratio,
            "identity_residual_paper": self.identity_residual_paper,
            "identity_residual_corrected": self.identity_residual_corrected,
            "bound_margin_paper": self.bound_margin_paper,
            "bound_margin_corrected": self.bound_margin_corrected,
            "modulus_residual": self.modulus_residual,
        }


def quotient_grid(pair: SpectralPair, t: Any, h: Any) -> dict[str, np.ndarray]:
    """Direct quotient f(t-h)f(t+h)/f(t)^2 against exp(-kappa*S) for kappa = 1, 2.

    Residuals are relative to max(1, |direct quotient|).
    """
    t = np.asarray(t, dtype=float).reshape(-1)
    h = np.asarray(h, dtype=float).reshape(-1)
    if t.shape != h.shape:
        raise ValueError("t and h must have the same length")
    n = t.size
    values = lk_charfn_grid(pair, np.concatenate([t, t - h, t + h]))
    center, before, after = values[:n], values[n : 2 * n], values[2 * n :]
    direct = before * after / (center * center)
    ratio = np.abs(direct)
    S = _quotient_exponent(pair, t, h)
    scale = np.maximum(1.0, ratio)

    paper = bound_constants(pair.G, BoundVariant.PAPER)
    corrected = bound_constants(pair.G, BoundVariant.CORRECTED)
    return {
        "t": t,
        "h": h,
        "ratio": ratio,
        "identity_residual_paper": np.abs(direct - np.exp(-S)) / scale,
        "identity_residual_corrected": np.abs(direct - np.exp(-2.0 * S)) / scale,
        "bound_margin_paper": paper.C * np.exp(paper.B * h * h) - ratio,
        "bound_margin_corrected": corrected.C * np.exp(corrected.B * h * h) - ratio,
        "modulus_residual": np.abs(ratio - np.exp(-2.0 * S.real)) / scale,
    }


def quotient_check(pair: SpectralPair, t: float, h: float) -> QuotientCheck:
    if not (math.isfinite(t) and math.isfinite(h)):
        raise ValueError("t and h must be finite")
    grid = quotient_grid(pair, [t], [h])
    return QuotientCheck(**{key: float(value[0]) for key, value in grid.items()})


@dataclass(slots=True)
class IdentityAdjudication:
    points: int
    max_residual_paper: float
    max_residual_corrected: float
    exact_kappa: int | None
    violations_paper: int
    violations_corrected: int
    max_modulus_residual: float
    rows: list[QuotientCheck] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict[str, Any]:
        return {
            "points": self.points,
            "max_residual_paper": self.max_residual_paper,
            "max_residual_corrected": self.max_residual_corrected,
            "exact_kappa": self.exact_kappa,
            "violations_paper": self.violations_paper,
            "violations_corrected": self.violations_corrected,
            "max_modulus_residual": self.max_modulus_residual,
        }


def adjudicate_identity(
    pairs: Sequence[SpectralPair],
    t_grid: Any = None,
    h_grid: Any = None,
) -> IdentityAdjudication:
    """Decide which exponent factor reproduces the quotient over every pair and grid point."""
    t_grid = np.linspace(-5.0, 5.0, 32) if t_grid is None else np.asarray(t_grid, dtype=float)
    h_grid = np.linspace(0.0, 3.0, 32) if h_grid is None else np.asarray(h_grid, dtype=float)
    tt, hh = np.meshgrid(t_grid, h_grid, indexing="ij")

    rows: list[QuotientCheck] = []
    paper_max = corrected_max = modulus_max = 0.0
    paper_violations = corrected_violations = 0
    for pair in pairs:
        grid = quotient_grid(pair, tt, hh)
        paper_max = max(paper_max, float(grid["identity_residual_paper"].max()))
        corrected_max = max(corrected_max, float(grid["identity_residual_corrected"].max()))
        modulus_max = max(modulus_max, float(grid["modulus_residual"].max()))
        slack = INEQUALITY_TOL * np.maximum(1.0, grid["ratio"])
        paper_violations += int(np.count_nonzero(grid["bound_margin_paper"] < -slack))
        corrected_violations += int(np.count_nonzero(grid["bound_margin_corrected"] < -slack))
        columns = list(grid)
        rows.extend(
            QuotientCheck(**{key: float(grid[key][i]) for key in columns}) for i in range(grid["t"].size)
        )

    exact = [kappa for kappa, worst in ((1, paper_max), (2, corrected_max)) if worst < IDENTITY_TOL]
    result = IdentityAdjudication(
        points=len(rows),
        max_residual_paper=paper_max,
        max_residual_corrected=corrected_max,
        exact_kappa=exact[0] if len(exact) == 1 else None,
        violations_paper=paper_violations,
        violations_corrected=corrected_violations,
        max_modulus_residual=modulus_max,
        rows=rows,
    )
    logger.info(
        "quotient identity: kappa=1 residual %.3g, kappa=2 residual %.3g over %d points",
        paper_max,
        corrected_max,
        result.points,
    )
    return result


@dataclass(frozen=True, slots=True)
class InequalityScan:
    max_violation: float
    argmax_h: float
    argmax_x: float
    points: int

    def to_dict(self) -> dict[str, float | int]:
        return {
            "max_violation": self.max_violation,
            "argmax_h": self.argmax_h,
            "argmax_x": self.argmax_x,
            "points": self.points,
        }


def elem_inequality_scan(h_grid: Any, x_grid: Any) -> InequalityScan:
    """max of (1 - cos hx)(1 + x^2)/x^2 - (h^2/2 + 2) over the product grid."""
    h_grid = np.asarray(h_grid, dtype=float).reshape(-1)
    x_grid = np.asarray(x_grid, dtype=float).reshape(-1)
    if not (np.all(np.isfinite(h_grid)) and np.all(np.isfinite(x_grid))):
        raise ValueError("grids must be finite")
    scale = 1.0 + x_grid * x_grid
    best, best_h, best_x = -math.inf, math.nan, math.nan
    for start in range(0, h_grid.size, SCAN_ROWS):
        h = h_grid[start : start + SCAN_ROWS, None]
        lhs = scale[None, :] * 0.5 * h * h * np.sinc(h * x_grid[None, :] / (2.0 * math.pi)) ** 2
        excess = lhs - (0.5 * h * h + 2.0)
        i, j = np.unravel_index(int(np.argmax(excess)), excess.shape)
        if excess[i, j] > best:
            best, best_h, best_x = float(excess[i, j]), float(h[i, 0]), float(x_grid[j])
    return InequalityScan(max_violation=best, argmax_h=best_h, argmax_x=best_x, points=h_grid.size * x_grid.size)


@dataclass(frozen=True, slots=True)
class DecayReport:
    T_ladder: tuple[float, ...]
    max_means: tuple[float, ...]
    argmax_t: tuple[float, ...]

    @property
    def strictly_decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.max_means, self.max_means[1:]))

    def to_dict(self) -> dict[str, Any]:
        return {
            "T_ladder": list(self.T_ladder),
            "max_means": list(self.max_means),
            "argmax_t": list(self.argmax_t),
            "strictly_decreasing": self.strictly_decreasing,
        }


def mean_value_decay(
    spec: DistributionSpec,
    t_grid: Any,
    T_ladder: Sequence[float] = (10.0, 100.0, 1000.0),
    epsabs: float = 1e-9,
) -> DecayReport:
    """sup over a t-grid of M(t, T), the mean of |f_c|^2 over [t - T, t + T], per T."""
    spec = require_valid(spec)
    ts = np.asarray(t_grid, dtype=float).reshape(-1)
    means: list[float] = []
    where: list[float] = []
    for T in T_ladder:
        values = [mean_value(spec, float(t), float(T), epsabs).value for t in ts]
        i = int(np.argmax(values))
        means.append(float(values[i]))
        where.append(float(ts[i]))
        logger.info("mean value ladder T=%g: max M = %.9g at t = %g", T, values[i], ts[i])
    return DecayReport(T_ladder=tuple(float(T) for T in T_ladder), max_means=tuple(means), argmax_t=tuple(where))


@dataclass(frozen=True, slots=True)
class TrigPolynomial:
    frequencies: tuple[float, ...]
    coefficients: tuple[complex, ...]

    def __post_init__(self) -> None:
        if len(self.frequencies) != len(self.coefficients):
            raise SpecError("frequencies and coefficients must have the same length")

    @classmethod
    def from_discrete(cls, part: DiscretePart) -> TrigPolynomial:
        return cls(
            frequencies=tuple(float(x) for x, _ in part.atoms),
            coefficients=tuple(complex(p) for _, p in part.atoms),
        )

    def translate(self, t: float) -> TrigPolynomial:
        """h -> phi(t + h)."""
        return TrigPolynomial(
            frequencies=self.frequencies,
            coefficients=tuple(c * cmath.exp(1j * w * t) for w, c in zip(self.frequencies, self.coefficients)),
        )

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coefficients)

    def __call__(self, h: np.ndarray) -> np.ndarray:
        h = np.asarray(h, dtype=float)
        result = np.zeros(h.shape, dtype=complex)
        for w, c in zip(self.frequencies, self.coefficients):
            result += c * np.exp(1j * w * h)
        return result


def reflected_product(phi: TrigPolynomial) -> TrigPolynomial:
    """Fourier series of h -> phi(h) phi(-h), frequencies merged within 1e-12."""
    terms = sorted(
        (
            (wj - wk, cj * ck)
            for wj, cj in zip(phi.frequencies, phi.coefficients)
            for wk, ck in zip(phi.frequencies, phi.coefficients)
        ),
        key=lambda term: term[0],
    )
    frequencies: list[float] = []
    coefficients: list[complex] = []
    for w, c in terms:
        if frequencies and w - frequencies[-1] <= FREQUENCY_MERGE_TOL:
            coefficients[-1] += c
            continue
        if frequencies and w - frequencies[-1] < FREQUENCY_COLLISION_TOL:
            raise FrequencyCollisionError(
                f"frequencies {frequencies[-1]!r} and {w!r} are closer than {FREQUENCY_COLLISION_TOL:g} "
                "but not mergeable"
            )
        frequencies.append(w)
        coefficients.append(c)
    return TrigPolynomial(frequencies=tuple(frequencies), coefficients=tuple(coefficients))


@dataclass(frozen=True, slots=True)
class ParsevalResult:
    A_exact: float
    T_ladder: tuple[float, ...]
    A_means: tuple[float, ...]

    @property
    def errors(self) -> tuple[float, ...]:
        return tuple(abs(m - self.A_exact) for m in self.A_means)

    def to_dict(self) -> dict[str, Any]:
        return {
            "A_exact": self.A_exact,
            "T_ladder": list(self.T_ladder),
            "A_means": list(self.A_means),
            "errors": list(self.errors),
        }


def parseval_A(
    phi: TrigPolynomial,
    T_ladder: Sequence[float] = PARSEVAL_LADDER,
    epsabs: float = 1e-10,
) -> ParsevalResult:
    psi = reflected_product(phi)
    A_exact = float(sum(abs(c) ** 2 for c in psi.coefficients))
    reach = max((abs(w) for w in psi.frequencies), default=0.0)

    def integrand(h: np.ndarray) -> np.ndarray:
        values = psi(h)
        return values.real**2 + values.imag**2

    means: list[float] = []
    for T in T_ladder:
        result = integrate(integrand, -T, T, epsabs=epsabs * 2.0 * T, panel_width=2.0 / (1.0 + 2.0 * reach))
        means.append(result.scalar / (2.0 * T))
    return ParsevalResult(A_exact=A_exact, T_ladder=tuple(float(T) for T in T_ladder), A_means=tuple(means))


@dataclass(slots=True)
class ProofIntegrals:
    t: float
    tau: float
    I: float | None
    J: float
    J_d: float
    J_c: float
    c_d: float
    modulus_sq: float
    A: float | None = None
    quadrature_error: float = 0.0
    notes: list[str] = field(default_factory=list)

    @property
    def chain_lower(self) -> float:
        return self.c_d**2 * self.J_d - self.J_c

    @property
    def sharp_lower(self) -> float:
        return self.c_d**2 * self.J_d - (1.0 - self.c_d**2) * self.J_c

    @property
    def margin(self) -> float:
        return self.J - self.chain_lower

    @property
    def identity_residual(self) -> float | None:
        """|J - I |f(t)|^2|."""
        if self.I is None:
            return None
        return abs(self.J - self.I * self.modulus_sq)

    def to_dict(self) -> dict[str, Any]:
        return {
            "t": self.t,
            "tau": self.tau,
            "I": self.I,
            "J": self.J,
            "J_d": self.J_d,
            "J_c": self.J_c,
            "c_d": self.c_d,
            "modulus_sq": self.modulus_sq,
            "A": self.A,
            "identity_residual": self.identity_residual,
            "chain_lower": self.chain_lower,
            "sharp_lower": self.sharp_lower,
            "margin": self.margin,
            "quadrature_error": self.quadrature_error,
            "notes": list(self.notes),
        }


def proof_integrals(spec: DistributionSpec, t: float, tau: float, quad_tol: float = 1e-9) -> ProofIntegrals:
    """Means over h in [-tau, tau] of |f(t-h)f(t+h)| (J), of the same over |f(t)|^2 (I),
    of |f_d(t-h)f_d(t+h)| (J_d) and of |f_c(t+h)| (J_c).

    All four share one set of quadrature panels.
    """
    if not (math.isfinite(t) and math.isfinite(tau)) or tau <= 0:
        raise ValueError("proof_integrals requires finite t and tau > 0")
    spec = require_valid(spec)
    has_d = spec.discrete is not None
    has_c = spec.abscont is not None or spec.singular is not None
    center = abs(complex(eval_grid(spec, Part.FULL, np.array([t]))[0])) ** 2
    notes: list[str] = []
    if center < MODULUS_FLOOR**2:
        notes.append(f"|f(t)| = {math.sqrt(center):.3g} is below 1e-12; I is ill-conditioned and not reported")

    def integrand(h: np.ndarray) -> np.ndarray:
        full = np.abs(eval_grid(spec, Part.FULL, t - h) * eval_grid(spec, Part.FULL, t + h))
        rows = [full, full / max(center, MODULUS_FLOOR**2)]
        zeros = np.zeros(h.shape)
        rows.append(np.abs(discrete_cf(spec.discrete, t - h) * discrete_cf(spec.discrete, t + h)) if has_d else zeros)
        rows.append(np.abs(eval_grid(spec, Part.C, t + h)) if has_c else zeros)
        return np.vstack(rows)

    width = 2.0 / (1.0 + 2.0 * lipschitz_const(spec, Part.FULL))
    result = integrate(integrand, -tau, tau, epsabs=quad_tol * 2.0 * tau, panel_width=width)
    J, I, J_d, J_c = (float(v) / (2.0 * tau) for v in np.real(result.value))

    A: float | None = None
    if has_d:
        A = parseval_A(TrigPolynomial.from_discrete(spec.discrete).translate(t), T_ladder=()).A_exact
    return ProofIntegrals(
        t=t,
        tau=tau,
        I=I if center >= MODULUS_FLOOR**2 else None,
        J=J,
        J_d=J_d,
        J_c=J_c,
        c_d=spec.c_d,
        modulus_sq=center,
        A=A,
        quadrature_error=result.error / (2.0 * tau),
        notes=notes,
    )


def translated_parseval_bound(c_d: float, A: float, eps: float) -> float:
    """c_d^2 (1 - 3 eps) A, the lower bound on J along a subsequence with |f| -> 0."""
    if not 0.0 < eps < 0.25:
        raise ValueError("eps must lie in (0, 1/4)")
    if not 0.0 <= c_d <= 1.0 or A < 0:
        raise ValueError("requires c_d in [0, 1] and A >= 0")
    return c_d * c_d * (1.0 - 3.0 * eps) * A


@dataclass(slots=True)
class TranslationStructure:
    epsilon: float
    mu: float
    ell: float
    taus: list[float]
    delta: float
    grid_step: float
    sup_differences: list[float]
    disjoint: bool
    t_eps: float | None = None
    chain_max: float | None = None

    @property
    def chain_holds(self) -> bool | None:
        if self.chain_max is None:
            return None
        return self.chain_max < 3.0 * self.epsilon * self.mu

    def to_dict(self) -> dict[str, Any]:
        return {
            "epsilon": self.epsilon,
            "mu": self.mu,
            "ell": self.ell,
            "taus": list(self.taus),
            "delta": self.delta,
            "grid_step": self.grid_step,
            "sup_differences": list(self.sup_differences),
            "disjoint": self.disjoint,
            "t_eps": self.t_eps,
            "chain_max": self.chain_max,
            "chain_holds": self.chain_holds,
        }


def shift_defect(part: DiscretePart, tau: np.ndarray) -> np.ndarray:
    """sum_j p_j |e^{i tau x_j} - 1|, an upper bound on sup_t |f_d(t + tau) - f_d(t)|."""
    tau = np.asarray(tau, dtype=float)
    total = np.zeros(tau.shape)
    for x, p in part.atoms:
        total += p * 2.0 * np.abs(np.sin(0.5 * tau * x))
    return total


def translation_numbers(
    d: DiscretePart,
    epsilon: float,
    mu: float,
    search_window: float,
    t_eps: float | None = None,
) -> TranslationStructure:
    if not 0.0 < epsilon < 0.25:
        raise ValueError("epsilon must lie in (0, 1/4)")
    if not mu > 0:
        raise ValueError("mu must be > 0")
    if not search_window > 0:
        raise ValueError("search_window must be > 0")
    L = float(sum(p * abs(x) for x, p in d.atoms))
    if L == 0.0:
        raise UnsupportedError("f_d is constant; every shift is a translation number")
    target = epsilon * mu
    step = target / (10.0 * L)

    grid = np.arange(0.0, search_window + step, step)
    below = shift_defect(d, grid) < target
    edges = np.flatnonzero(np.diff(below.astype(np.int8)))
    starts = [0] if below[0] else []
    stops: list[int] = []
    for edge in edges:
        if below[edge + 1]:
            starts.append(edge + 1)
        else:
            stops.append(edge)
    if len(stops) < len(starts):
        stops.append(grid.size - 1)

    found: list[float] = []
    for start, stop in zip(starts, stops):
        if start == 0:
            found.append(0.0)
            continue
        lo, hi = grid[start] - step, min(grid[stop] + step, search_window)
        best = minimize_scalar(
            lambda s: float(shift_defect(d, np.array(s))),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-12},
        )
        if best.fun < target:
            found.append(float(best.x))
        else:
            run = grid[start : stop + 1]
            found.append(float(run[int(np.argmin(shift_defect(d, run)))]))
    if len(found) < 2:
        raise TranslationSearchError(
            f"no non-zero translation number below {target:.3g} in [0, {search_window:g}]; widen the window"
        )

    ell = float(np.max(np.diff(found)))
    taus = [0.0]
    k = 1
    while (2 * k + 0.5) * ell <= search_window:
        lo, hi = (2 * k - 0.5) * ell, (2 * k + 0.5) * ell
        inside = [tau for tau in found if lo <= tau <= hi]
        if not inside:
            break
        taus.append(min(inside, key=lambda tau: abs(tau - 2 * k * ell)))
        k += 1
    delta = 0.999 * min(target / L, 0.5 * ell)
    disjoint = all(a + delta < b - delta for a, b in zip(taus, taus[1:]))

    samples = np.arange(0.0, search_window, step)
    base = discrete_cf(d, samples)
    sups = [float(np.max(np.abs(discrete_cf(d, samples + tau) - base))) for tau in taus]

    chain_max: float | None = None
    if t_eps is not None:
        offsets = np.linspace(0.0, delta, CHAIN_SAMPLES, endpoint=False)
        points = (t_eps + np.asarray(taus)[:, None] + offsets[None, :]).reshape(-1)
        chain_max = float(np.max(np.abs(discrete_cf(d, points))))

    logger.info("found %d translation numbers, inclusion length %.6g", len(found), ell)
    return TranslationStructure(
        epsilon=epsilon,
        mu=mu,
        ell=ell,
        taus=taus,
        delta=delta,
        grid_step=step,
        sup_differences=sups,
        disjoint=disjoint,
        t_eps=t_eps,
        chain_max=chain_max,
    )


@dataclass(frozen=True, slots=True)
class WindowMeans:
    T: tuple[float, ...]
    means: tuple[float, ...]
    floor: float
    first_below: int | None

    def to_dict(self) -> dict[str, Any]:
        return {"T": list(self.T), "means": list(self.means), "floor": self.floor, "first_below": self.first_below}


def translation_window_means(
    spec: DistributionSpec,
    structure: TranslationStructure,
    t_eps: float,
    mu: float,
    n_max: int = 8,
    epsabs: float = 1e-9,
) -> WindowMeans:
    """Means of |f_c(t_eps + h)|^2 over [-T_n, T_n], T_n = (2n + 1) ell.

    If inf|f_d| were zero these would stay above delta (1 - 3 eps)^2 mu^2 / ell;
    ``first_below`` is the first n where they do not.
    """
    spec = require_valid(spec)
    floor = structure.delta * (1.0 - 3.0 * structure.epsilon) ** 2 * mu * mu / structure.ell
    windows: list[float] = []
    means: list[float] = []
    first_below: int | None = None
    for n in range(n_max + 1):
        T = (2 * n + 1) * structure.ell
        value = mean_value(spec, t_eps, T, epsabs).value
        windows.append(T)
        means.append(value)
        if first_below is None and value < floor:
            first_below = n
    return WindowMeans(T=tuple(windows), means=tuple(means), floor=floor, first_below=first_below)

