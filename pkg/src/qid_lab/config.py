from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, replace


class ConfigError(ValueError):
    pass


LOG_LEVELS = {"DEBUG", "INFO", "WARNING", "ERROR"}


@dataclass(frozen=True)
class LabConfig:
    threads: int = 1
    tol: float = 1e-6
    node_cap: int = 10_000_000
    quad_tol: float = 1e-9
    log_level: str = "WARNING"

    def with_overrides(self, *, tol: float | None = None, threads: int | None = None) -> LabConfig:
        updated = self
        if tol is not None:
            if not (math.isfinite(tol) and tol > 0):
                raise ConfigError("tol must be a positive finite number.")
            updated = replace(updated, tol=tol)
        if threads is not None:
            if threads < 1:
                raise ConfigError("threads must be a positive integer.")
            updated = replace(updated, threads=threads)
        return updated

    @property
    def logging_level(self) -> int:
        return getattr(logging, self.log_level)


def _parse_positive_int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = int(raw.strip())
    except ValueError as exc:
        raise ConfigError(f"{name} must be a positive integer.") from exc
    if value < 1:
        raise ConfigError(f"{name} must be a positive integer.")
    return value


def _parse_positive_float_env(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = float(raw.strip())
        if not (math.isfinite(value) and value > 0):
            raise ValueError
    except ValueError as exc:
        raise ConfigError(f"{name} must be a positive number.") from exc
    return value


def load_config() -> LabConfig:
    threads = _parse_positive_int_env("QIDLAB_THREADS", 1)
    tol = _parse_positive_float_env("QIDLAB_TOL", 1e-6)
    node_cap = _parse_positive_int_env("QIDLAB_NODE_CAP", 10_000_000)
    quad_tol = _parse_positive_float_env("QIDLAB_QUAD_TOL", 1e-9)

    log_level = os.getenv("QIDLAB_LOG_LEVEL", "WARNING").strip().upper()
    if log_level not in LOG_LEVELS:
        raise ConfigError(
            "QIDLAB_LOG_LEVEL must be one of: DEBUG, INFO, WARNING, ERROR"
        )

    return LabConfig(
        threads=threads,
        tol=tol,
        node_cap=node_cap,
        quad_tol=quad_tol,
        log_level=log_level,
    )
