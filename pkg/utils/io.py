"""Input parsing and artifact writers"""

import csv
import io
import json
import math
import re
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import yaml

import config
from .errors import ConfigError


# ---------------------------------------------------------------------------
# Number formatting
# ---------------------------------------------------------------------------

def round_sig(value: float, digits: int = config.SIGNIFICANT_DIGITS) -> float:
    """Round to a fixed number of significant digits"""
    if value == 0.0 or not math.isfinite(value):
        return value
    return float(f"{value:.{digits}g}")


def to_jsonable(obj: Any) -> Any:
    """Convert nested results into JSON-safe values with fixed float precision"""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return round_sig(obj)
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    # numpy scalars and arrays
    if hasattr(obj, "tolist"):
        return to_jsonable(obj.tolist())
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dump_json(payload: Dict[str, Any]) -> str:
    """Deterministic JSON document carrying the schema version"""
    document = {"schema": config.SCHEMA_VERSION}
    document.update(payload)
    return json.dumps(to_jsonable(document), ensure_ascii=False, indent=2)


def dump_csv(columns: Sequence[str], rows: Iterable[Sequence[Any]],
             meta: Optional[Dict[str, Any]] = None) -> str:
    """CSV text with optional '# key=value' metadata header line"""
    buffer = io.StringIO()
    if meta:
        items = " ".join(f"{k}={to_jsonable(v)}" for k, v in meta.items())
        buffer.write(f"# {items}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(list(columns))
    for row in rows:
        writer.writerow([to_jsonable(v) if isinstance(v, float) else v for v in row])
    return buffer.getvalue()


# ---------------------------------------------------------------------------
# Perturbation files
# ---------------------------------------------------------------------------

_KEY_PATTERNS = [
    (re.compile(r"^([ab])_(\d+)_(\d+)$"), "poly"),
    (re.compile(r"^([ab])_(\d)(\d)$"), "poly"),
    (re.compile(r"^(baralpha)([0-3])$"), "chart"),
    (re.compile(r"^(alpha)([0-3])$"), "chart"),
]


def _absorb(result: Dict[str, Any], key: str, value: float, where: str):
    for pattern, kind in _KEY_PATTERNS:
        match = pattern.match(key)
        if not match:
            continue
        if kind == "poly":
            table = result[match.group(1)]
            table[(int(match.group(2)), int(match.group(3)))] = value
        else:
            chart = match.group(1)
            if result[chart] is None:
                result[chart] = [0.0, 0.0, 0.0, 0.0]
            result[chart][int(match.group(2))] = value
        return
    raise ConfigError(f"unrecognised perturbation key '{key}' ({where})", {"key": key})


def parse_perturbation_text(text: str, source: str = "<text>") -> Dict[str, Any]:
    """
    Parse the flat `a_ij = value` / `b_ij = value` format

    Chart keys `alpha0..alpha3` and `baralpha0..baralpha3` are collected
    separately; the caller converts them.

    Returns:
        {"a": {(i, j): v}, "b": {(i, j): v}, "alpha": list | None, "baralpha": list | None}
    """
    result: Dict[str, Any] = {"a": {}, "b": {}, "alpha": None, "baralpha": None}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value' at {source}:{lineno}", {"line": lineno})
        key, value = (part.strip() for part in line.split("=", 1))
        try:
            number = float(value)
        except ValueError:
            raise ConfigError(f"bad number '{value}' at {source}:{lineno}", {"line": lineno})
        _absorb(result, key, number, f"{source}:{lineno}")
    return result


def load_perturbation(path: str) -> Dict[str, Any]:
    """Read a perturbation file; `.json` files hold the same keys as an object"""
    file_path = Path(path)
    if not file_path.exists():
        raise ConfigError(f"perturbation file not found: {path}", {"path": path})
    text = file_path.read_text(encoding="utf-8")
    if file_path.suffix.lower() == ".json":
        try:
            mapping = json.loads(text) if text.strip() else {}
        except json.JSONDecodeError as e:
            raise ConfigError(f"invalid JSON in {path}: {e}", {"path": path})
        result: Dict[str, Any] = {"a": {}, "b": {}, "alpha": None, "baralpha": None}
        for key, value in mapping.items():
            _absorb(result, key, float(value), path)
        return result
    return parse_perturbation_text(text, path)


# ---------------------------------------------------------------------------
# Run configuration
# ---------------------------------------------------------------------------

@dataclass
class RunConfig:
    """Everything a CLI run needs; unknown keys are rejected on load"""
    command: str = ""
    a: float = 0.0
    b: float = 0.0
    c: float = 1.0
    swapped: bool = False
    pert: Optional[str] = None
    grid: int = config.ZERO_GRID_DEFAULT
    n_min: int = config.N_MIN_DEFAULT
    level_tol: float = config.LEVEL_TOL
    classify_tol: float = config.CLASSIFY_TOL
    output: str = "json"
    h_max: float = config.H_MAX_DEFAULT
    q: Optional[float] = config.SADDLE_CONSTANT_Q
    annulus: Optional[int] = None
    h: Optional[float] = None
    i: int = 0
    j: int = 1
    which: Optional[str] = None
    degree: int = 3
    center: str = "first"
    alpha3: float = 1.0
    target: Optional[List[int]] = None
    all: bool = False
    curve: bool = False
    points: int = config.PF_GRID_POINTS

    def validate(self) -> "RunConfig":
        if self.output not in config.OUTPUT_FORMATS:
            raise ConfigError(f"output must be one of {config.OUTPUT_FORMATS}", {"output": self.output})
        for name in ("level_tol", "h_max"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive", {name: getattr(self, name)})
        if self.classify_tol < 0:
            raise ConfigError("classify_tol must be non-negative", {"classify_tol": self.classify_tol})
        if self.grid < config.ZERO_GRID_MIN:
            raise ConfigError(f"grid must be at least {config.ZERO_GRID_MIN}", {"grid": self.grid})
        if self.n_min < config.N_MIN_FLOOR:
            raise ConfigError(f"n_min must be at least {config.N_MIN_FLOOR}", {"n_min": self.n_min})
        return self

    def merged(self, overrides: Dict[str, Any]) -> "RunConfig":
        """Copy with non-None overrides applied (CLI flags win over file values)"""
        known = {f.name for f in fields(self)}
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        for key, value in overrides.items():
            if key in known and value is not None:
                data[key] = value
        return RunConfig(**data).validate()


def load_run_config(path: str) -> RunConfig:
    """Load a YAML run configuration"""
    file_path = Path(path)
    if not file_path.exists():
        raise ConfigError(f"config file not found: {path}", {"path": path})
    with open(file_path, "r", encoding="utf-8") as f:
        data = yaml.safe_load(f) or {}
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a mapping", {"path": path})
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}", {"keys": unknown})
    return RunConfig(**data).validate()
