from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Any

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2


@dataclass(slots=True)
class RunEnvelope:
    status: int
    command: str
    data: Any = None
    error: Any = None

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def success_envelope(*, command: str, data: Any) -> dict[str, Any]:
    return RunEnvelope(status=EXIT_OK, command=command, data=data, error=None).to_dict()


def error_envelope(*, status: int, command: str, error: Any) -> dict[str, Any]:
    return RunEnvelope(status=status, command=command, data=None, error=error).to_dict()
