from __future__ import annotations

import json
import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .catalog import catalog_pairs, catalog_spec
from .charfn import CFValue, Part, eval_grid
from .config import ConfigError, LabConfig
from .dist_model import DistributionSpec, load_spec, require_valid
from .errors import MissingPartError, NumericalError, QidLabError, SpecError
from .harness import (
    TrigPolynomial,
    adjudicate_identity,
    elem_inequality_scan,
    mean_value_decay,
    parseval_A,
    proof_integrals,
    translation_numbers,
    translation_window_means,
)
from .infimum import ConditionReport, InfCertificate, check_conditions, estimate_mu, estimate_mu_d
from .models import EXIT_NUMERICAL, EXIT_VALIDATION, error_envelope, success_envelope
from .spectral import SpectralPair, extract_lattice_spectral, lk_charfn_grid, pair_from_dict, pair_to_dict

logger = logging.getLogger(__name__)

CATALOG_PREFIX = "catalog:"
CSV_HEADER = ("t", "re", "im", "abs")


@dataclass(frozen=True, slots=True)
class RunConfig:
    command: str
    spec_path: str | None = None
    pair_path: str | None = None
    part: str = "full"
    target: str = "full"
    t_min: float = 0.0
    t_max: float = 2.0 * math.pi
    n_points: int = 1024
    tol: float | None = None
    output_path: str | None = None
    format: str | None = None
    lemma: int | None = None
    integrals: bool = False
    parseval: bool = False
    translations: bool = False
    t: float = 0.0
    tau: float = 10.0
    epsilon: float = 0.1
    mu: float | None = None
    window: float = 100.0
    t_eps: float | None = None
    scan_step: float = 0.01
    csv_path: str | None = None


@dataclass(slots=True)
class CommandMeta:
    name: str
    summary: str
    requires_spec: bool = False
    requires_pair: bool = False
    uses_grid: bool = False
    formats: tuple[str, ...] = ("json",)

    @property
    def default_format(self) -> str:
        return self.formats[0]

    def to_public_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "summary": self.summary,
            "requires_spec": self.requires_spec,
            "requires_pair": self.requires_pair,
            "formats": list(self.formats),
        }


@dataclass(slots=True)
class CommandRegistry:
    commands: dict[str, CommandMeta] = field(default_factory=dict)

    def register(self, meta: CommandMeta) -> None:
        self.commands[meta.name] = meta

    def list_commands(self) -> list[dict[str, Any]]:
        return [self.commands[name].to_public_dict() for name in sorted(self.commands)]

    def get_command(self, name: str) -> CommandMeta | None:
        return self.commands.get(name)


def build_registry() -> CommandRegistry:
    registry = CommandRegistry()
    registry.register(
        CommandMeta(
            "eval",
            "Evaluate a characteristic function part on a grid.",
            requires_spec=True,
            uses_grid=True,
            formats=("csv", "json"),
        )
    )
    registry.register(CommandMeta("inf", "Certify inf|f| or inf|f_d|.", requires_spec=True))
    registry.register(CommandMeta("check", "Evaluate the separation-from-zero conditions.", requires_spec=True))
    registry.register(CommandMeta("spectral", "Extract the spectral pair of a lattice discrete part.", requires_spec=True))
    registry.register(
        CommandMeta(
            "synth",
            "Evaluate exp(psi) of a spectral pair on a grid.",
            requires_pair=True,
            uses_grid=True,
            formats=("csv", "json"),
        )
    )
    registry.register(CommandMeta("verify", "Run the numerical checks of the quotient bound and proof integrals."))
    return registry


def resolve_spec(reference: str) -> DistributionSpec:
    if reference.startswith(CATALOG_PREFIX):
        return catalog_spec(reference[len(CATALOG_PREFIX) :])
    return require_valid(load_spec(reference))


def load_pair(reference: str) -> SpectralPair:
    if reference.startswith(CATALOG_PREFIX):
        name = reference[len(CATALOG_PREFIX) :]
        pairs = catalog_pairs()
        if name not in pairs:
            raise SpecError(f"Unknown catalog pair '{name}'. Expected one of: {', '.join(sorted(pairs))}")
        return pairs[name]
    path = Path(reference)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise SpecError(f"Pair file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise SpecError(f"Malformed JSON in {path}: {exc}") from exc
    return pair_from_dict(payload)


@dataclass(slots=True)
class CommandOutput:
    report: Any
    rows: list[tuple[float, ...]] = field(default_factory=list)
    header: tuple[str, ...] = CSV_HEADER
    summary: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {"report": self.report, "rows": self.rows, "header": list(self.header), "summary": self.summary}


def _grid(config: RunConfig) -> np.ndarray:
    return np.linspace(config.t_min, config.t_max, config.n_points)


def _value_rows(t: np.ndarray, values: np.ndarray) -> tuple[list[tuple[float, ...]], list[dict[str, float]]]:
    rows = [(float(ti), float(v.real), float(v.imag), float(abs(v))) for ti, v in zip(t, values)]
    points = [{"t": ti, **CFValue(re=re, im=im).to_dict()} for ti, re, im, _ in rows]
    return rows, points


def _run_eval(config: RunConfig, lab: LabConfig) -> CommandOutput:
    spec = resolve_spec(config.spec_path)
    t = _grid(config)
    rows, points = _value_rows(t, eval_grid(spec, Part(config.part), t, threads=lab.threads))
    return CommandOutput(
        report={"part": config.part, "points": points},
        rows=rows,
        summary=f"evaluated part {config.part} at {len(rows)} points",
    )


def _run_inf(config: RunConfig, lab: LabConfig) -> CommandOutput:
    spec = resolve_spec(config.spec_path)
    if config.target == "d":
        certificate = estimate_mu_d(spec, lab.tol, lab)
    else:
        certificate = estimate_mu(spec, lab.tol, lab)
    return CommandOutput(report=certificate.to_dict(), summary=certificate.summary())


def _run_check(config: RunConfig, lab: LabConfig) -> CommandOutput:
    report = check_conditions(resolve_spec(config.spec_path), lab.tol, lab)
    return CommandOutput(report=report.to_dict(), summary=report.summary())


def _run_spectral(config: RunConfig, lab: LabConfig) -> CommandOutput:
    spec = resolve_spec(config.spec_path)
    if spec.discrete is None:
        raise MissingPartError("Spec has no discrete part (c_d = 0).")
    pair = extract_lattice_spectral(spec.discrete)
    return CommandOutput(
        report=pair_to_dict(pair),
        summary=f"gamma = {pair.gamma:.17g}, {len(pair.G.atoms)} spectral atoms",
    )


def _run_synth(config: RunConfig, lab: LabConfig) -> CommandOutput:
    pair = load_pair(config.pair_path)
    t = _grid(config)
    rows, points = _value_rows(t, lk_charfn_grid(pair, t))
    return CommandOutput(report={"points": points}, rows=rows, summary=f"synthesized {len(rows)} points")


def _verify_spec(config: RunConfig) -> DistributionSpec:
    if config.spec_path is None:
        raise SpecError("This check needs --spec.")
    return resolve_spec(config.spec_path)


def _run_verify(config: RunConfig, lab: LabConfig) -> CommandOutput:
    report: dict[str, Any] = {}
    rows: list[tuple[float, ...]] = []
    header: tuple[str, ...] = CSV_HEADER
    lines: list[str] = []

    if config.lemma == 1:
        pairs = [load_pair(config.pair_path)] if config.pair_path else list(catalog_pairs().values())
        adjudication = adjudicate_identity(pairs)
        grid = np.union1d(np.arange(-100.0, 100.0 + 0.5 * config.scan_step, config.scan_step), [0.0])
        scan = elem_inequality_scan(grid, grid)
        report["lemma1"] = {"identity": adjudication.to_dict(), "inequality": scan.to_dict()}
        header = (
            "t",
            "h",
            "ratio",
            "identity_residual_paper",
            "identity_residual_corrected",
            "bound_margin_paper",
            "bound_margin_corrected",
        )
        rows = [tuple(getattr(row, name) for name in header) for row in adjudication.rows]
        lines.append(f"quotient identity exact for kappa = {adjudication.exact_kappa}")
        lines.append(f"elementary inequality max violation {scan.max_violation:.3g}")
    elif config.lemma == 2:
        decay = mean_value_decay(_verify_spec(config), _grid(config), epsabs=lab.quad_tol)
        report["lemma2"] = decay.to_dict()
        header = ("T", "max_mean", "argmax_t")
        rows = list(zip(decay.T_ladder, decay.max_means, decay.argmax_t))
        lines.append(f"max mean values {', '.join(f'{m:.6g}' for m in decay.max_means)}")

    if config.integrals:
        integrals = proof_integrals(_verify_spec(config), config.t, config.tau, lab.quad_tol)
        report["integrals"] = integrals.to_dict()
        lines.append(f"J = {integrals.J:.9g}, chain lower bound {integrals.chain_lower:.9g}")

    if config.parseval or config.translations:
        spec = _verify_spec(config)
        if spec.discrete is None:
            raise MissingPartError("Spec has no discrete part (c_d = 0).")
        if config.parseval:
            result = parseval_A(TrigPolynomial.from_discrete(spec.discrete))
            report["parseval"] = result.to_dict()
            lines.append(f"A = {result.A_exact:.9g}")
        if config.translations:
            mu = config.mu
            if mu is None:
                mu = estimate_mu(spec, lab.tol, lab).lower_bound
            if not mu > 0:
                raise SpecError("inf|f| is not certified positive on the window; pass --mu explicitly.")
            structure = translation_numbers(spec.discrete, config.epsilon, mu, config.window, t_eps=config.t_eps)
            report["translations"] = structure.to_dict()
            lines.append(f"inclusion length {structure.ell:.9g}, {len(structure.taus)} translation numbers")
            if structure.chain_max is not None:
                lines.append(f"max |f_d| along the chain from t = {config.t_eps:g}: {structure.chain_max:.3g}")
                if spec.abscont is not None or spec.singular is not None:
                    means = translation_window_means(spec, structure, config.t_eps, mu, epsabs=lab.quad_tol)
                    report["window_means"] = means.to_dict()

    return CommandOutput(report=report, rows=rows, header=header, summary="\n".join(lines))


HANDLERS: dict[str, Callable[[RunConfig, LabConfig], CommandOutput]] = {
    "eval": _run_eval,
    "inf": _run_inf,
    "check": _run_check,
    "spectral": _run_spectral,
    "synth": _run_synth,
    "verify": _run_verify,
}


def _validation_problems(meta: CommandMeta, config: RunConfig, lab: LabConfig) -> dict[str, Any] | None:
    fmt = config.format or meta.default_format
    if fmt not in meta.formats:
        return {"message": "Unsupported output format for this command.", "allowed": list(meta.formats), "provided": fmt}
    if meta.requires_spec and not config.spec_path:
        return {"message": "Missing required --spec."}
    if meta.requires_pair and not config.pair_path:
        return {"message": "Missing required --pair."}
    if meta.uses_grid or config.lemma == 2:
        if config.n_points < 2 or not config.t_min < config.t_max:
            return {
                "message": "Grid requires n_points >= 2 and t_min < t_max.",
                "t_min": config.t_min,
                "t_max": config.t_max,
                "n_points": config.n_points,
            }
        if not (math.isfinite(config.t_min) and math.isfinite(config.t_max)):
            return {"message": "Grid bounds must be finite."}
    if config.part not in {part.value for part in Part}:
        return {"message": f"Unknown part '{config.part}'.", "allowed": [part.value for part in Part]}
    if config.target not in {"full", "d"}:
        return {"message": f"Unknown target '{config.target}'.", "allowed": ["full", "d"]}
    if not (math.isfinite(lab.tol) and lab.tol > 0):
        return {"message": "tol must be a positive finite number."}
    if meta.name == "verify":
        if config.lemma is None and not (config.integrals or config.parseval or config.translations):
            return {"message": "Nothing to verify.", "suggestion": "Pass --lemma {1,2}, --integrals, --parseval or --translations."}
        if config.lemma not in (None, 1, 2):
            return {"message": "--lemma must be 1 or 2."}
        if config.lemma == 1 and not config.scan_step > 0:
            return {"message": "--scan-step must be > 0."}
        if config.t_eps is not None and not math.isfinite(config.t_eps):
            return {"message": "--t-eps must be finite."}
    return None


def dispatch_command(
    config: RunConfig,
    *,
    lab: LabConfig,
    registry: CommandRegistry | None = None,
) -> dict[str, Any]:
    registry = registry or build_registry()
    meta = registry.get_command(config.command)
    if meta is None:
        return error_envelope(
            status=EXIT_VALIDATION,
            command=config.command,
            error={
                "message": f"Unknown command '{config.command}'.",
                "suggestion": f"Use one of: {', '.join(sorted(registry.commands))}",
            },
        )

    if config.tol is not None:
        try:
            lab = lab.with_overrides(tol=config.tol)
        except ConfigError as exc:
            return error_envelope(
                status=EXIT_VALIDATION,
                command=meta.name,
                error={"message": str(exc), "kind": "invalid_argument", "tol": str(config.tol)},
            )
    problems = _validation_problems(meta, config, lab)
    if problems is not None:
        return error_envelope(status=EXIT_VALIDATION, command=meta.name, error=problems)

    logger.info("dispatching %s", meta.name)
    try:
        output = HANDLERS[meta.name](config, lab)
    except NumericalError as exc:
        error: dict[str, Any] = {"message": str(exc), "kind": exc.kind}
        certificate = getattr(exc, "certificate", None)
        if isinstance(certificate, InfCertificate):
            error["certificate"] = certificate.to_dict()
        return error_envelope(status=EXIT_NUMERICAL, command=meta.name, error=error)
    except (QidLabError, ConfigError, ValueError) as exc:
        kind = exc.kind if isinstance(exc, QidLabError) else "invalid_argument"
        return error_envelope(status=EXIT_VALIDATION, command=meta.name, error={"message": str(exc), "kind": kind})
    return success_envelope(command=meta.name, data=output.to_dict())


def parse_report(command: str, payload: Any) -> Any:
    """Rebuild the typed result a command emitted as JSON."""
    if command == "inf":
        return InfCertificate.from_dict(payload)
    if command == "check":
        return ConditionReport.from_dict(payload)
    if command == "spectral":
        return pair_from_dict(payload)
    if command in {"eval", "synth"}:
        return [(float(point["t"]), CFValue(re=float(point["re"]), im=float(point["im"]))) for point in payload["points"]]
    if command == "verify":
        return dict(payload)
    raise SpecError(f"Unknown command '{command}'.")
