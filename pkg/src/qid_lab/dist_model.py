"""Three-part Lebesgue mixture F = c_d F_d + c_a F_a + c_s F_s."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .errors import SpecError, SpecFormatError
from .families import Family, family_from_dict, family_to_dict

logger = logging.getLogger(__name__)

NORMALIZATION_TOL = 1e-12
LATTICE_TOL = 1e-9
MIN_ATOM_MASS = 1e-15
MAX_LATTICE_DENOMINATOR = 1000


@dataclass(frozen=True, slots=True)
class LatticeHint:
    offset: float
    span: float

    def to_dict(self) -> dict[str, float]:
        return {"offset": self.offset, "span": self.span}

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.span


@dataclass(frozen=True, slots=True)
class DiscretePart:
    atoms: tuple[tuple[float, float], ...]
    lattice_hint: LatticeHint | None = None

    @property
    def locations(self) -> np.ndarray:
        return np.array([x for x, _ in self.atoms], dtype=float)

    @property
    def masses(self) -> np.ndarray:
        return np.array([p for _, p in self.atoms], dtype=float)


@dataclass(frozen=True, slots=True)
class AbsContPart:
    components: tuple[tuple[Family, float], ...]


@dataclass(frozen=True, slots=True)
class SingularPart:
    """Standard Cantor law mapped affinely onto ``[offset, offset + scale]``."""

    offset: float = 0.0
    scale: float = 1.0


@dataclass(frozen=True, slots=True)
class DistributionSpec:
    c_d: float
    c_a: float
    c_s: float
    discrete: DiscretePart | None = None
    abscont: AbsContPart | None = None
    singular: SingularPart | None = None

    @property
    def is_lattice(self) -> bool:
        return self.discrete is not None and self.discrete.lattice_hint is not None


@dataclass(slots=True)
class Violation:
    location: str
    message: str

    def to_dict(self) -> dict[str, str]:
        return {"location": self.location, "message": self.message}


@dataclass(slots=True)
class ValidationResult:
    ok: bool
    violations: list[Violation] = field(default_factory=list)
    lattice_hint: LatticeHint | None = None
    spec: DistributionSpec | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "ok": self.ok,
            "violations": [violation.to_dict() for violation in self.violations],
            "lattice_hint": self.lattice_hint.to_dict() if self.lattice_hint else None,
        }


@dataclass(frozen=True, slots=True)
class ContinuousMix:
    weight: float
    abscont_weight: float
    singular_weight: float
    abscont: AbsContPart | None
    singular: SingularPart | None


def _lattice_residual_ok(locations: list[float], hint: LatticeHint) -> bool:
    for x in locations:
        k = round((x - hint.offset) / hint.span)
        if abs(x - (hint.offset + hint.span * k)) > NORMALIZATION_TOL * max(1.0, abs(x)):
            return False
    return True


def infer_lattice_hint(locations: list[float]) -> LatticeHint | None:
    """Find offset and span of the smallest lattice through ``locations``.

    Ratios of differences are reconstructed as fractions with bounded
    denominators; the span is the gcd of the resulting integer multiples.
    """
    if not locations:
        return None
    x0 = locations[0]
    if len(locations) == 1:
        return LatticeHint(offset=x0, span=1.0)

    diffs = [x - x0 for x in locations[1:]]
    d1 = diffs[0]
    fractions: list[Fraction] = []
    for d in diffs:
        ratio = d / d1
        approx = Fraction(ratio).limit_denominator(MAX_LATTICE_DENOMINATOR)
        if abs(ratio - float(approx)) > LATTICE_TOL * max(1.0, abs(ratio)):
            return None
        fractions.append(approx)

    denominator = math.lcm(*(frac.denominator for frac in fractions))
    multiples = [frac.numerator * (denominator // frac.denominator) for frac in fractions]
    common = math.gcd(*multiples)
    hint = LatticeHint(offset=x0, span=abs(d1) * common / denominator)
    if not _lattice_residual_ok(locations, hint):
        return None
    return hint


def _check_discrete(part: DiscretePart, violations: list[Violation]) -> None:
    if not part.atoms:
        violations.append(Violation("discrete.atoms", "at least one atom is required"))
        return
    previous: float | None = None
    for index, (x, p) in enumerate(part.atoms):
        where = f"discrete.atoms[{index}]"
        if not (math.isfinite(x) and math.isfinite(p)):
            violations.append(Violation(where, "location and mass must be finite"))
            continue
        if p < MIN_ATOM_MASS:
            violations.append(Violation(where, f"mass {p!r} is not strictly positive (minimum 1e-15)"))
        elif p > 1.0:
            violations.append(Violation(where, f"mass {p!r} exceeds 1"))
        if previous is not None and x <= previous:
            violations.append(Violation(where, "locations must be strictly increasing"))
        previous = x

    total = float(sum(p for _, p in part.atoms))
    if abs(total - 1.0) > NORMALIZATION_TOL:
        violations.append(Violation("discrete.atoms", f"masses sum to {total:.12g}"))

    hint = part.lattice_hint
    if hint is not None:
        if not (hint.span > 0 and math.isfinite(hint.span) and math.isfinite(hint.offset)):
            violations.append(Violation("discrete.lattice_hint", "span must be a positive finite number"))
        elif not _lattice_residual_ok([x for x, _ in part.atoms], hint):
            violations.append(
                Violation("discrete.lattice_hint", "some location is not of the form offset + span*k")
            )


def _check_abscont(part: AbsContPart, violations: list[Violation]) -> None:
    if not part.components:
        violations.append(Violation("abscont.components", "at least one component is required"))
        return
    for index, (family, weight) in enumerate(part.components):
        where = f"abscont.components[{index}]"
        if not (math.isfinite(weight) and 0.0 < weight <= 1.0):
            violations.append(Violation(where, f"weight {weight!r} must lie in (0, 1]"))
        for problem in family.problems():
            violations.append(Violation(where, f"{family.kind}: {problem}"))
    total = float(sum(weight for _, weight in part.components))
    if abs(total - 1.0) > NORMALIZATION_TOL:
        violations.append(Violation("abscont.components", f"weights sum to {total:.12g}"))


def validate(spec: DistributionSpec) -> ValidationResult:
    violations: list[Violation] = []
    coefficients = {"c_d": spec.c_d, "c_a": spec.c_a, "c_s": spec.c_s}
    for name, value in coefficients.items():
        if not math.isfinite(value) or value < 0:
            violations.append(Violation(name, f"coefficient {value!r} must be a finite number >= 0"))
    total = spec.c_d + spec.c_a + spec.c_s
    if abs(total - 1.0) > NORMALIZATION_TOL:
        violations.append(Violation("c_d+c_a+c_s", f"coefficients sum to {total:.12g}"))

    parts = {"discrete": (spec.c_d, spec.discrete), "abscont": (spec.c_a, spec.abscont), "singular": (spec.c_s, spec.singular)}
    for name, (coefficient, part) in parts.items():
        if coefficient > 0 and part is None:
            violations.append(Violation(name, "part is missing although its coefficient is > 0"))
        if coefficient <= 0 and part is not None:
            violations.append(Violation(name, "part is present although its coefficient is 0"))

    if spec.discrete is not None:
        _check_discrete(spec.discrete, violations)
    if spec.abscont is not None:
        _check_abscont(spec.abscont, violations)
    if spec.singular is not None:
        offset, scale = spec.singular.offset, spec.singular.scale
        if not (math.isfinite(offset) and math.isfinite(scale) and scale > 0):
            violations.append(Violation("singular.cantor", "offset must be finite and scale > 0"))

    if violations:
        for violation in violations:
            logger.warning("spec violation at %s: %s", violation.location, violation.message)
        return ValidationResult(ok=False, violations=violations)

    hint: LatticeHint | None = None
    normalized = spec
    if spec.discrete is not None:
        hint = spec.discrete.lattice_hint or infer_lattice_hint([x for x, _ in spec.discrete.atoms])
        if hint is not None and spec.discrete.lattice_hint is None:
            normalized = replace(spec, discrete=replace(spec.discrete, lattice_hint=hint))
    return ValidationResult(ok=True, violations=[], lattice_hint=hint, spec=normalized)


def require_valid(spec: DistributionSpec) -> DistributionSpec:
    result = validate(spec)
    if not result.ok:
        details = "; ".join(f"{v.location}: {v.message}" for v in result.violations)
        raise SpecError(f"Invalid distribution spec: {details}")
    assert result.spec is not None
    return result.spec


def continuous_mix(spec: DistributionSpec) -> ContinuousMix:
    continuous = spec.c_a + spec.c_s
    if spec.c_d >= 1.0 - NORMALIZATION_TOL or continuous <= 0:
        raise SpecError("Continuous part is undefined when c_d = 1.")
    abscont_weight = spec.c_a / continuous
    return ContinuousMix(
        weight=1.0 - spec.c_d,
        abscont_weight=abscont_weight,
        singular_weight=1.0 - abscont_weight,
        abscont=spec.abscont,
        singular=spec.singular,
    )


def _as_float(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SpecFormatError(f"{where} must be a number.")
    return float(value)


def spec_from_dict(payload: Mapping[str, Any]) -> DistributionSpec:
    if not isinstance(payload, Mapping):
        raise SpecFormatError("Distribution spec must be a JSON object.")
    for key in ("c_d", "c_a", "c_s"):
        if key not in payload:
            raise SpecFormatError(f"Missing required key: {key}")
    c_d = _as_float(payload["c_d"], "c_d")
    c_a = _as_float(payload["c_a"], "c_a")
    c_s = _as_float(payload["c_s"], "c_s")

    discrete: DiscretePart | None = None
    raw_discrete = payload.get("discrete")
    if raw_discrete is not None:
        atoms_raw = raw_discrete.get("atoms") if isinstance(raw_discrete, Mapping) else None
        if not isinstance(atoms_raw, list):
            raise SpecFormatError("discrete.atoms must be an array of [location, mass] pairs.")
        atoms: list[tuple[float, float]] = []
        for index, pair in enumerate(atoms_raw):
            if not isinstance(pair, list) or len(pair) != 2:
                raise SpecFormatError(f"discrete.atoms[{index}] must be a [location, mass] pair.")
            atoms.append((_as_float(pair[0], f"discrete.atoms[{index}][0]"), _as_float(pair[1], f"discrete.atoms[{index}][1]")))
        hint_raw = raw_discrete.get("lattice_hint")
        hint = None
        if hint_raw is not None:
            if not isinstance(hint_raw, Mapping) or "offset" not in hint_raw or "span" not in hint_raw:
                raise SpecFormatError("discrete.lattice_hint must have offset and span.")
            hint = LatticeHint(
                offset=_as_float(hint_raw["offset"], "discrete.lattice_hint.offset"),
                span=_as_float(hint_raw["span"], "discrete.lattice_hint.span"),
            )
        discrete = DiscretePart(atoms=tuple(atoms), lattice_hint=hint)

    abscont: AbsContPart | None = None
    raw_abscont = payload.get("abscont")
    if raw_abscont is not None:
        components_raw = raw_abscont.get("components") if isinstance(raw_abscont, Mapping) else None
        if not isinstance(components_raw, list):
            raise SpecFormatError("abscont.components must be an array.")
        components = []
        for index, item in enumerate(components_raw):
            family = family_from_dict(item)
            weight = _as_float(item.get("weight"), f"abscont.components[{index}].weight")
            components.append((family, weight))
        abscont = AbsContPart(components=tuple(components))

    singular: SingularPart | None = None
    raw_singular = payload.get("singular")
    if raw_singular is not None:
        cantor = raw_singular.get("cantor") if isinstance(raw_singular, Mapping) else None
        if not isinstance(cantor, Mapping):
            raise SpecFormatError("singular.cantor must be an object with offset and scale.")
        singular = SingularPart(
            offset=_as_float(cantor.get("offset", 0.0), "singular.cantor.offset"),
            scale=_as_float(cantor.get("scale", 1.0), "singular.cantor.scale"),
        )

    return DistributionSpec(c_d=c_d, c_a=c_a, c_s=c_s, discrete=discrete, abscont=abscont, singular=singular)


def spec_to_dict(spec: DistributionSpec) -> dict[str, Any]:
    payload: dict[str, Any] = {"c_d": spec.c_d, "c_a": spec.c_a, "c_s": spec.c_s}
    if spec.discrete is not None:
        discrete: dict[str, Any] = {"atoms": [[x, p] for x, p in spec.discrete.atoms]}
        if spec.discrete.lattice_hint is not None:
            discrete["lattice_hint"] = spec.discrete.lattice_hint.to_dict()
        payload["discrete"] = discrete
    if spec.abscont is not None:
        payload["abscont"] = {
            "components": [
                {**family_to_dict(family), "weight": weight} for family, weight in spec.abscont.components
            ]
        }
    if spec.singular is not None:
        payload["singular"] = {"cantor": {"offset": spec.singular.offset, "scale": spec.singular.scale}}
    return payload


def load_spec(path: str | Path) -> DistributionSpec:
    spec_path = Path(path)
    try:
        payload = json.loads(spec_path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise SpecFormatError(f"Spec file not found: {spec_path}") from exc
    except json.JSONDecodeError as exc:
        raise SpecFormatError(f"Malformed JSON in {spec_path}: {exc}") from exc
    return spec_from_dict(payload)
