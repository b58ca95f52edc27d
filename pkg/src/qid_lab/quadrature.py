"""Panel quadrature on top of ``scipy.integrate.quad_vec``.

``[a, b]`` is cut into equal panels of at most ``panel_width``. The panels are
integrated together: the integrand restricted to each panel becomes one
component of a vector integrand over ``[0, width]``, so quad_vec refines all
panels at once and every call of the integrand is a single vectorized sweep.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad_vec

from .errors import QuadratureError

logger = logging.getLogger(__name__)

DEFAULT_LIMIT = 2000

Integrand = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, slots=True)
class QuadResult:
    value: np.ndarray
    error: float
    panels: int
    converged: bool

    @property
    def scalar(self) -> float:
        return float(np.real(self.value).reshape(-1)[0])


def integrate(
    func: Integrand,
    a: float,
    b: float,
    *,
    epsabs: float = 1e-9,
    panel_width: float | None = None,
    limit: int = DEFAULT_LIMIT,
) -> QuadResult:
    """Integrate ``func`` over ``[a, b]``.

    ``func`` maps a 1-D array of nodes to values of shape ``(n,)`` or
    ``(m, n)`` for an ``m``-component integrand. ``panel_width`` should
    resolve the integrand's oscillation scale. ``error`` bounds the error of
    each component, summed over panels.
    """
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("integration limits must be finite")
    if a == b:
        return QuadResult(value=np.zeros(1), error=0.0, panels=0, converged=True)
    sign = 1.0 if a < b else -1.0
    lo, hi = min(a, b), max(a, b)

    count = 1 if panel_width is None else max(1, math.ceil((hi - lo) / panel_width))
    width = (hi - lo) / count
    starts = lo + width * np.arange(count)
    layout: dict[str, int | bool] = {}

    def panel_values(u: float) -> np.ndarray:
        values = np.asarray(func(starts + u))
        if values.ndim == 1:
            values = values[None, :]
        layout["rows"] = values.shape[0]
        layout["complex"] = bool(np.iscomplexobj(values))
        if layout["complex"]:
            values = np.concatenate([values.real, values.imag])
        return values.astype(float).reshape(-1)

    value, error, info = quad_vec(
        panel_values,
        0.0,
        width,
        epsabs=epsabs / count,
        epsrel=1e-14,
        norm="max",
        limit=limit,
        full_output=True,
    )
    rows = int(layout["rows"])
    sums = np.asarray(value, dtype=float).reshape(-1, count).sum(axis=1)
    total = sums[:rows] + 1j * sums[rows:] if layout["complex"] else sums
    total_error = float(error) * count

    if not np.all(np.isfinite(total)) or not math.isfinite(total_error):
        raise QuadratureError(f"quadrature on [{lo:g}, {hi:g}] produced a non-finite value", error=total_error)
    if not info.success:
        logger.warning("quadrature on [%g, %g] stopped early with status %d", lo, hi, info.status)
    return QuadResult(
        value=sign * total,
        error=total_error,
        panels=count * len(info.intervals),
        converged=bool(info.success),
    )
