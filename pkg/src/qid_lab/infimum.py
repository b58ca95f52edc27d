"""Certified infima of characteristic-function moduli and membership conditions."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import asdict, dataclass, field
from enum import StrEnum
from typing import Any, Mapping

import numpy as np

from .charfn import Part, abscont_modulus_tail, discrete_cf, eval_grid, lipschitz_const
from .config import LabConfig
from .dist_model import DistributionSpec, require_valid
from .errors import BudgetExhaustedError, SpecError, SpecFormatError
from .parallel import map_chunks

logger = logging.getLogger(__name__)

ZERO_HIT = 1e-9
INITIAL_PANELS = 1024
MU_LADDER = (10.0, 100.0, 1000.0)
MU_D_LADDER = (100.0, 1000.0, 10000.0)

Modulus = Callable[[np.ndarray], np.ndarray]


class Target(StrEnum):
    FULL = "full"
    D = "d"


class Mode(StrEnum):
    EXACT_PERIOD = "exact_period"
    WINDOW = "window"


class Verdict(StrEnum):
    MEMBER_BY_CRITERION = "member_by_criterion"
    NECESSARY_CONDITIONS_FAIL = "necessary_conditions_fail"
    NECESSARY_HOLD_SUFFICIENCY_UNKNOWN = "necessary_hold_sufficiency_unknown"


@dataclass(frozen=True, slots=True)
class PeriodDomain:
    period: float


@dataclass(frozen=True, slots=True)
class WindowDomain:
    T: float
    symmetric: bool = True


Domain = PeriodDomain | WindowDomain


@dataclass(slots=True)
class InfCertificate:
    target: Target
    mode: Mode
    lower_bound: float
    upper_bound: float
    argmin_t: float
    lipschitz_L: float
    gap: float
    window_T: float | None = None
    period: float | None = None
    tol: float = 1e-6
    nodes: int = 0
    status: str = "ok"
    lattice: bool | None = None
    ladder: list[dict[str, float]] = field(default_factory=list)
    asymptotic_lower: float | None = None
    asymptotic_status: str | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def certified_positive(self) -> bool:
        return self.lower_bound > ZERO_HIT

    @property
    def zero_hit(self) -> bool:
        return self.upper_bound < ZERO_HIT

    @property
    def global_lower_bound(self) -> float | None:
        """Lower bound on the infimum over all of R, when one is certified."""
        if self.mode is Mode.EXACT_PERIOD:
            return self.lower_bound
        if self.asymptotic_status == "valid_beyond_T" and self.asymptotic_lower is not None:
            return max(0.0, min(self.lower_bound, self.asymptotic_lower))
        return None

    def to_dict(self) -> dict[str, Any]:
        payload = asdict(self)
        payload["target"] = str(self.target)
        payload["mode"] = str(self.mode)
        payload["zero_hit"] = self.zero_hit
        payload["global_lower_bound"] = self.global_lower_bound
        return payload

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> InfCertificate:
        try:
            known = {name: payload[name] for name in cls.__dataclass_fields__ if name in payload}
            known["target"] = Target(known["target"])
            known["mode"] = Mode(known["mode"])
            return cls(**known)
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecFormatError(f"Malformed certificate: {exc}") from exc

    def summary(self) -> str:
        where = (
            f"over one period {self.period:.6g} (valid on R)"
            if self.mode is Mode.EXACT_PERIOD
            else f"on the window [-{self.window_T:.6g}, {self.window_T:.6g}] only"
        )
        name = "mu_d = inf|f_d|" if self.target is Target.D else "mu = inf|f|"
        text = f"{name} in [{self.lower_bound:.9g}, {self.upper_bound:.9g}] {where}, argmin t = {self.argmin_t:.9g}"
        if self.zero_hit:
            text += "; zero hit (minimum below threshold 1e-9)"
        elif not self.certified_positive:
            text += "; inconclusive (not separated from zero at threshold 1e-9)"
        if self.global_lower_bound is not None and self.mode is Mode.WINDOW:
            text += f"; global lower bound {self.global_lower_bound:.9g}"
        if self.status != "ok":
            text += f"; status {self.status}"
        return text


def _domain_bounds(domain: Domain) -> tuple[float, float]:
    if isinstance(domain, PeriodDomain):
        return 0.0, domain.period
    return (0.0 if domain.symmetric else -domain.T), domain.T


def certify_inf(
    modulus: Modulus,
    L: float,
    domain: Domain,
    tol: float,
    *,
    node_cap: int = 10_000_000,
    threads: int = 1,
    target: Target = Target.FULL,
    incumbent: tuple[float, float] | None = None,
    floor: Modulus | None = None,
) -> InfCertificate:
    """Lipschitz branch-and-bound for the minimum of ``modulus`` over ``domain``.

    An interval with midpoint m and half-width r is bounded below by
    max(0, modulus(m) - L r); it is discarded once that bound is within
    ``tol`` of the incumbent. ``floor(a)``, when given, bounds the modulus
    from below for every |t| >= a and tightens the interval bounds. A
    symmetric window is searched on [0, T].
    """
    if not (math.isfinite(L) and L >= 0):
        raise ValueError("Lipschitz constant must be finite and >= 0")
    if not tol > 0:
        raise ValueError("tol must be > 0")
    lo, hi = _domain_bounds(domain)
    mode = Mode.EXACT_PERIOD if isinstance(domain, PeriodDomain) else Mode.WINDOW
    meta = {
        "target": target,
        "mode": mode,
        "lipschitz_L": L,
        "tol": tol,
        "window_T": domain.T if isinstance(domain, WindowDomain) else None,
        "period": domain.period if isinstance(domain, PeriodDomain) else None,
    }

    def evaluate(ts: np.ndarray) -> np.ndarray:
        return map_chunks(lambda chunk: np.abs(modulus(chunk)), ts, threads)

    start = 0.0 if lo <= 0.0 <= hi else lo
    if L == 0.0:
        value = float(evaluate(np.array([start]))[0])
        return InfCertificate(lower_bound=value, upper_bound=value, argmin_t=start, gap=0.0, nodes=1, **meta)

    best_value, best_t = math.inf, start
    if incumbent is not None:
        best_value, best_t = incumbent

    count = INITIAL_PANELS
    radius = 0.5 * (hi - lo) / count
    mids = lo + radius * (2.0 * np.arange(count) + 1.0)
    pruned_floor = math.inf
    nodes = 0
    while True:
        values = evaluate(mids)
        nodes += mids.size
        index = int(np.argmin(values))
        if values[index] < best_value or (values[index] == best_value and mids[index] < best_t):
            best_value, best_t = float(values[index]), float(mids[index])

        lower = np.maximum(values - L * radius, 0.0)
        if floor is not None:
            lower = np.maximum(lower, floor(np.maximum(np.abs(mids) - radius, 0.0)))
        keep = lower < best_value - tol
        if (~keep).any():
            pruned_floor = min(pruned_floor, float(lower[~keep].min()))
        if not keep.any():
            break
        if nodes + 2 * int(keep.sum()) > node_cap:
            bound = min(pruned_floor, float(lower[keep].min()))
            certificate = InfCertificate(
                lower_bound=max(0.0, min(bound, best_value)),
                upper_bound=best_value,
                argmin_t=best_t,
                gap=best_value - max(0.0, min(bound, best_value)),
                nodes=nodes,
                status="budget_exhausted",
                **meta,
            )
            raise BudgetExhaustedError(
                f"branch-and-bound node cap {node_cap} reached with gap {certificate.gap:.3g}",
                certificate=certificate,
            )
        mids = mids[keep]
        radius *= 0.5
        mids = np.concatenate([mids - radius, mids + radius])
        mids.sort(kind="stable")

    lower_bound = max(0.0, min(pruned_floor, best_value))
    logger.debug("branch-and-bound on [%g, %g] finished after %d nodes", lo, hi, nodes)
    certificate = InfCertificate(
        lower_bound=lower_bound,
        upper_bound=best_value,
        argmin_t=best_t,
        gap=best_value - lower_bound,
        nodes=nodes,
        **meta,
    )
    # A minimum between the zero threshold and tol is neither separated from
    # zero nor a zero hit; tighten tol until one of the two is certified.
    sharper = max(0.1 * ZERO_HIT, 0.5 * (best_value - ZERO_HIT))
    if lower_bound <= ZERO_HIT < best_value and sharper < tol:
        logger.debug("tightening tol from %g to %g near t=%g", tol, sharper, best_t)
        try:
            refined = certify_inf(
                modulus,
                L,
                domain,
                sharper,
                node_cap=node_cap - nodes,
                threads=threads,
                target=target,
                incumbent=(best_value, best_t),
                floor=floor,
            )
        except BudgetExhaustedError:
            certificate.notes.append(f"tolerance refinement below {tol:g} stopped at the node cap")
            return certificate
        refined.nodes += nodes
        return refined
    return certificate


def _window_ladder(
    modulus: Modulus,
    L: float,
    ladder: Sequence[float],
    tol: float,
    config: LabConfig,
    target: Target,
    floor: Modulus | None = None,
) -> InfCertificate:
    certificate: InfCertificate | None = None
    steps: list[dict[str, float]] = []
    for T in ladder:
        incumbent = None
        if certificate is not None:
            incumbent = (certificate.upper_bound, certificate.argmin_t)
        certificate = certify_inf(
            modulus,
            L,
            WindowDomain(T),
            tol,
            node_cap=config.node_cap,
            threads=config.threads,
            target=target,
            incumbent=incumbent,
            floor=floor,
        )
        steps.append({"T": T, "lower_bound": certificate.lower_bound, "upper_bound": certificate.upper_bound})
        logger.info("window T=%g: inf in [%.9g, %.9g]", T, certificate.lower_bound, certificate.upper_bound)
    assert certificate is not None
    certificate.ladder = steps
    return certificate


def estimate_mu_d(
    spec: DistributionSpec,
    tol: float | None = None,
    config: LabConfig | None = None,
    ladder: Sequence[float] = MU_D_LADDER,
) -> InfCertificate:
    config = config or LabConfig()
    tol = config.tol if tol is None else tol
    if spec.c_d <= 0 or spec.discrete is None:
        raise SpecError("mu_d is undefined when c_d = 0.")
    spec = require_valid(spec)
    part = spec.discrete
    L = lipschitz_const(spec, Part.D)

    def modulus(t: np.ndarray) -> np.ndarray:
        return np.abs(discrete_cf(part, t))

    if part.lattice_hint is not None:
        certificate = certify_inf(
            modulus,
            L,
            PeriodDomain(part.lattice_hint.period),
            tol,
            node_cap=config.node_cap,
            threads=config.threads,
            target=Target.D,
        )
        certificate.lattice = True
        return certificate

    certificate = _window_ladder(modulus, L, ladder, tol, config, Target.D)
    certificate.lattice = False
    certificate.notes.append("non-lattice discrete part: certificate is valid on the window only")
    return certificate


def estimate_mu(
    spec: DistributionSpec,
    tol: float | None = None,
    config: LabConfig | None = None,
    ladder: Sequence[float] = MU_LADDER,
) -> InfCertificate:
    config = config or LabConfig()
    tol = config.tol if tol is None else tol
    spec = require_valid(spec)
    L = lipschitz_const(spec, Part.FULL)

    def modulus(t: np.ndarray) -> np.ndarray:
        return np.abs(eval_grid(spec, Part.FULL, t))

    lattice = spec.c_d > 0 and spec.is_lattice
    mu_d = estimate_mu_d(spec, tol, config) if lattice else None
    floor: Modulus | None = None
    if mu_d is not None:
        base = spec.c_d * mu_d.lower_bound - spec.c_s

        def tail_floor(a: np.ndarray) -> np.ndarray:
            return base - spec.c_a * abscont_modulus_tail(spec, a)

        floor = tail_floor

    certificate = _window_ladder(modulus, L, ladder, tol, config, Target.FULL, floor)
    T = certificate.window_T
    assert T is not None

    if mu_d is None:
        certificate.asymptotic_status = "inconclusive"
        certificate.notes.append("asymptotic tier needs a lattice discrete part")
        return certificate

    if spec.c_s > 0 and not spec.c_s < spec.c_d * mu_d.lower_bound:
        certificate.asymptotic_status = "inconclusive"
        certificate.notes.append("singular part is not dominated: c_s >= c_d * mu_d")
        return certificate

    tail = float(abscont_modulus_tail(spec, T))
    certificate.asymptotic_lower = spec.c_d * mu_d.lower_bound - spec.c_a * tail - spec.c_s
    certificate.asymptotic_status = "valid_beyond_T"
    certificate.notes.append(
        f"for |t| > {T:g}: |f| >= c_d*mu_d - c_a*sup|f_a| - c_s = {certificate.asymptotic_lower:.9g}"
    )
    return certificate


@dataclass(slots=True)
class ConditionReport:
    cond1_zero_free: dict[str, Any]
    cond2_mu_d_positive: bool | None
    cond3_mu_positive: bool | None
    dominated_singular: bool
    mass_over_half: bool
    verdict: Verdict
    tier: str | None = None
    cond2_certificate: InfCertificate | None = None
    cond3_certificate: InfCertificate | None = None
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "cond1_zero_free": dict(self.cond1_zero_free),
            "cond2_mu_d_positive": self.cond2_mu_d_positive,
            "cond3_mu_positive": self.cond3_mu_positive,
            "dominated_singular": self.dominated_singular,
            "mass_over_half": self.mass_over_half,
            "verdict": str(self.verdict),
            "tier": self.tier,
            "cond2_certificate": self.cond2_certificate.to_dict() if self.cond2_certificate else None,
            "cond3_certificate": self.cond3_certificate.to_dict() if self.cond3_certificate else None,
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> ConditionReport:
        try:
            return cls(
                cond1_zero_free=dict(payload["cond1_zero_free"]),
                cond2_mu_d_positive=payload["cond2_mu_d_positive"],
                cond3_mu_positive=payload["cond3_mu_positive"],
                dominated_singular=bool(payload["dominated_singular"]),
                mass_over_half=bool(payload["mass_over_half"]),
                verdict=Verdict(payload["verdict"]),
                tier=payload.get("tier"),
                cond2_certificate=(
                    InfCertificate.from_dict(payload["cond2_certificate"]) if payload.get("cond2_certificate") else None
                ),
                cond3_certificate=(
                    InfCertificate.from_dict(payload["cond3_certificate"]) if payload.get("cond3_certificate") else None
                ),
                notes=list(payload.get("notes", [])),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecFormatError(f"Malformed condition report: {exc}") from exc

    def summary(self) -> str:
        lines = [f"verdict: {self.verdict}" + (f" ({self.tier})" if self.tier else "")]
        lines.append(f"cond1 f(t) != 0: {self.cond1_zero_free['status']}")
        lines.append(f"cond2 inf|f_d| > 0: {_tristate(self.cond2_mu_d_positive)}")
        lines.append(f"cond3 inf|f| > 0: {_tristate(self.cond3_mu_positive)}")
        lines.append(f"dominated singular part: {self.dominated_singular}")
        lines.append(f"mass > 1/2 at a point: {self.mass_over_half}")
        lines.extend(f"note: {note}" for note in self.notes)
        return "\n".join(lines)


def _tristate(value: bool | None) -> str:
    return "inconclusive" if value is None else ("holds" if value else "fails")


def _certify_or_partial(run: Callable[[], InfCertificate], notes: list[str]) -> InfCertificate:
    try:
        return run()
    except BudgetExhaustedError as exc:
        notes.append(str(exc))
        return exc.certificate


def check_conditions(spec: DistributionSpec, tol: float | None = None, config: LabConfig | None = None) -> ConditionReport:
    config = config or LabConfig()
    tol = config.tol if tol is None else tol
    spec = require_valid(spec)
    notes: list[str] = []

    mu = _certify_or_partial(lambda: estimate_mu(spec, tol, config), notes)
    if mu.certified_positive:
        cond1 = {"status": "holds_on_window", "t": None, "window_T": mu.window_T}
    elif mu.zero_hit:
        cond1 = {"status": "violated_at", "t": mu.argmin_t, "window_T": mu.window_T}
    else:
        cond1 = {"status": "inconclusive", "t": None, "window_T": mu.window_T}

    mu_d: InfCertificate | None = None
    cond2: bool | None = None
    if spec.c_d > 0:
        mu_d = _certify_or_partial(lambda: estimate_mu_d(spec, tol, config), notes)
        if mu_d.certified_positive:
            cond2 = True
            if mu_d.mode is Mode.WINDOW:
                notes.append("cond2 is certified on the window only (non-lattice discrete part)")
        elif mu_d.zero_hit:
            cond2 = False
    else:
        notes.append("cond2 is not applicable: c_d = 0")

    cond3: bool | None = None
    global_lower = mu.global_lower_bound
    if global_lower is not None and global_lower > ZERO_HIT:
        cond3 = True
    elif mu.zero_hit:
        cond3 = False
    elif spec.c_d <= 0:
        cond3 = False
        notes.append("c_d = 0 forces inf|f| = 0 (separation from zero requires a discrete part)")
    elif cond2 is False:
        cond3 = False
        notes.append("inf|f_d| = 0 forces inf|f| = 0")

    if spec.c_d > 0 and cond2 is True and mu_d is not None:
        dominated = spec.c_s < spec.c_d * mu_d.lower_bound
    elif spec.c_d > 0 and cond2 is False:
        dominated = spec.c_s == 0
    else:
        dominated = False

    mass_over_half = spec.discrete is not None and spec.c_d * max(p for _, p in spec.discrete.atoms) > 0.5

    tier: str | None = None
    if mass_over_half:
        verdict, tier = Verdict.MEMBER_BY_CRITERION, "mass_over_half"
    elif spec.c_d > 0 and (cond3 is False or cond2 is False):
        verdict = Verdict.NECESSARY_CONDITIONS_FAIL
    elif spec.c_d <= 0 and cond3 is False:
        verdict = Verdict.NECESSARY_CONDITIONS_FAIL
        notes.append("c_d = 0, cond3 fails; the c_d > 0 necessary conditions do not decide membership here")
    elif spec.c_d > 0 and cond3 is True and cond2 is True and cond1["status"] == "holds_on_window" and (
        spec.c_s == 0 or dominated
    ):
        verdict = Verdict.MEMBER_BY_CRITERION
        tier = "zero_free_no_singular" if spec.c_s == 0 else "dominated_singular"
    else:
        verdict = Verdict.NECESSARY_HOLD_SUFFICIENCY_UNKNOWN

    return ConditionReport(
        cond1_zero_free=cond1,
        cond2_mu_d_positive=cond2,
        cond3_mu_positive=cond3,
        dominated_singular=dominated,
        mass_over_half=mass_over_half,
        verdict=verdict,
        tier=tier,
        cond2_certificate=mu_d,
        cond3_certificate=mu,
        notes=notes,
    )
