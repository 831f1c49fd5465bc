"""Exception hierarchy shared by the library and the CLI"""

from typing import Any, Dict, Optional


class AbelianError(Exception):
    """Base error; carries the process exit code and a machine-readable payload"""

    exit_code = 1
    kind = "error"

    def __init__(self, message: str, payload: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.payload = dict(payload or {})

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "message": self.message, **self.payload}


class DomainError(AbelianError):
    """Input outside the validity domain of an operation"""

    exit_code = 1
    kind = "domain"


class ClassificationConflict(DomainError):
    """Parameters satisfy more than one region inequality set"""

    kind = "classification-conflict"


class ConfigError(DomainError):
    """Bad run configuration or perturbation file"""

    kind = "config"


class NumericalFailure(AbelianError):
    """A numerical tolerance could not be met"""

    exit_code = 2
    kind = "numerical"
