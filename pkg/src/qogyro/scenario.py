"""Scenario files: flat sectioned key=value text.

    [spectral]
    eta = 0.05
    omega_c = 25
    s = 1

    [probe]
    Omega = 0.01
    N = 100

    [grid]
    t_max = 500

    [run]
    pipeline = exact
    name = fig2d

Lines starting with ``#`` are comments. ``[spectral] kappa`` replaces the
spectral density for the markovian pipeline. ``[sweep] param`` and
``[sweep] values`` make ``run`` emit one series per value.
"""

from dataclasses import dataclass, field, fields, replace
import math
import numbers
import re

from .errors import DomainError
from .spectral import SpectralDensity
from .volterra import ProbeConfig

PIPELINES = ("ideal", "markovian", "exact", "asymptotic")
MEASURES = ("min", "final")

_SECTION = re.compile(r"\[\s*([A-Za-z_]+)\s*\]\s*$")
_KEY = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")

# section -> key -> converter
_SCHEMA = {
    "spectral": {"eta": float, "omega_c": float, "s": float, "kappa": float},
    "probe": {"Omega": float, "N": float, "r": float},
    "grid": {"t_max": float, "dt": float, "t_min": float, "converge": "bool", "rtol": float},
    "run": {"pipeline": str, "name": str, "stride": int, "measure": str, "workers": int},
    "sweep": {"param": str, "values": "floats"},
}
# sections written by the tool itself; accepted and ignored on re-run
_PASSIVE = {"meta"}


class ScenarioError(DomainError):
    def __init__(self, message, line=None, column=None, path=None):
        where = ""
        if line is not None:
            where = f"{path or '<scenario>'}:{line}:{column or 1}: "
        super().__init__(where + message)
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Scenario:
    pipeline: str
    name: str = "scenario"
    eta: float | None = None
    omega_c: float | None = None
    s: float = 1.0
    kappa: float | None = None
    Omega: float = 0.01
    N: float | None = None
    r: float | None = None
    t_max: float = 100.0
    dt: float | None = None
    t_min: float = 0.0
    converge: bool = True
    rtol: float = 1e-5
    stride: int = 1
    measure: str = "min"
    workers: int = 1
    sweep_param: str | None = None
    sweep_values: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.pipeline not in PIPELINES:
            raise ScenarioError(f"pipeline must be one of {', '.join(PIPELINES)}, got {self.pipeline!r}")
        if self.measure not in MEASURES:
            raise ScenarioError(f"measure must be min or final, got {self.measure!r}")
        if self.N is not None and self.r is not None:
            raise ScenarioError("give either N or r in [probe], not both")
        if self.stride < 1 or self.workers < 1:
            raise ScenarioError("stride and workers must be >= 1")
        if self.kappa is not None and self.pipeline != "markovian":
            raise ScenarioError("a direct kappa is only meaningful for pipeline = markovian")
        if self.pipeline in ("exact", "asymptotic") or (self.pipeline == "markovian" and self.kappa is None):
            if self.eta is None or self.omega_c is None:
                raise ScenarioError(f"pipeline {self.pipeline} needs eta and omega_c in [spectral]")
        if self.sweep_param is not None:
            if self.sweep_param not in SWEEPABLE:
                raise ScenarioError(
                    f"cannot sweep {self.sweep_param!r}; choose from {', '.join(SWEEPABLE)}"
                )
            if not self.sweep_values:
                raise ScenarioError("sweep needs a non-empty list of values")

    @property
    def photons(self) -> float:
        if self.r is not None:
            if self.r < 0:
                raise DomainError(f"squeeze parameter must be >= 0, got {self.r}")
            return 2.0 * math.sinh(self.r) ** 2
        return 100.0 if self.N is None else self.N

    def spectral(self) -> SpectralDensity:
        return SpectralDensity(eta=self.eta, omega_c=self.omega_c, s=self.s)

    def probe(self) -> ProbeConfig:
        if self.r is not None:
            return ProbeConfig.from_squeezing(self.Omega, self.r)
        return ProbeConfig(Omega=self.Omega, N=self.photons)

    def with_value(self, param, value):
        """Copy with one scalar replaced; N and r replace each other."""
        if param not in SWEEPABLE:
            raise ScenarioError(f"cannot sweep {param!r}; choose from {', '.join(SWEEPABLE)}")
        changes = {param: value, "sweep_param": None, "sweep_values": ()}
        if param == "N":
            changes["r"] = None
        elif param == "r":
            changes["N"] = None
        return replace(self, **changes)

    def to_text(self, extra=()):
        """Scenario file text that reproduces this scenario; ``extra`` goes to [meta]."""
        out = []
        for section, keys in _SCHEMA.items():
            rows = []
            for key in keys:
                attr = _ATTR.get((section, key), key)
                val = getattr(self, attr)
                if val is None or (attr == "sweep_values" and not val):
                    continue
                rows.append(f"{key} = {format_value(val)}")
            if rows:
                out.append(f"[{section}]")
                out.extend(rows)
                out.append("")
        if extra:
            out.append("[meta]")
            out.extend(f"{k} = {format_value(v)}" for k, v in extra)
            out.append("")
        return "\n".join(out)


_ATTR = {("sweep", "param"): "sweep_param", ("sweep", "values"): "sweep_values"}
SWEEPABLE = ("eta", "omega_c", "s", "kappa", "Omega", "N", "r", "t_max")


def format_value(val):
    if isinstance(val, bool):
        return "true" if val else "false"
    if isinstance(val, numbers.Integral):
        return str(int(val))
    if isinstance(val, numbers.Real):
        return repr(float(val))
    if isinstance(val, (tuple, list)):
        return ", ".join(format_value(v) for v in val)
    return str(val)


def _convert(kind, raw):
    if kind is float:
        val = float(raw)
        if not math.isfinite(val):
            raise ValueError("not finite")
        return val
    if kind is int:
        return int(raw)
    if kind == "bool":
        low = raw.lower()
        if low in ("true", "yes", "1"):
            return True
        if low in ("false", "no", "0"):
            return False
        raise ValueError("expected true or false")
    if kind == "floats":
        vals = tuple(_convert(float, part.strip()) for part in raw.split(",") if part.strip())
        if not vals:
            raise ValueError("empty list")
        return vals
    return raw


def parse_text(text, path=None) -> Scenario:
    values = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        col = raw.index(line[0]) + 1
        if line.startswith("["):
            m = _SECTION.match(line)
            if not m:
                raise ScenarioError("malformed section header", lineno, col, path)
            section = m.group(1)
            if section not in _SCHEMA and section not in _PASSIVE:
                raise ScenarioError(f"unknown section [{section}]", lineno, col, path)
            continue
        if "=" not in line:
            raise ScenarioError("expected key = value", lineno, col, path)
        if section is None:
            raise ScenarioError("key outside of any section", lineno, col, path)
        key, _, val = line.partition("=")
        key, val = key.strip(), val.split("#", 1)[0].strip()
        if section in _PASSIVE:
            continue
        if not _KEY.match(key):
            raise ScenarioError(f"invalid key {key!r}", lineno, col, path)
        kind = _SCHEMA[section].get(key)
        if kind is None:
            raise ScenarioError(f"unknown key {key!r} in [{section}]", lineno, col, path)
        attr = _ATTR.get((section, key), key)
        if attr in values:
            raise ScenarioError(f"duplicate key {key!r}", lineno, col, path)
        after = raw[raw.index("=") + 1 :]
        vcol = raw.index("=") + 2 + len(after) - len(after.lstrip())
        try:
            values[attr] = _convert(kind, val)
        except ValueError as exc:
            raise ScenarioError(f"bad value {val!r} for {key}: {exc}", lineno, vcol, path) from None
    if "pipeline" not in values:
        raise ScenarioError("[run] pipeline is required", path=path)
    known = {f.name for f in fields(Scenario)}
    return Scenario(**{k: v for k, v in values.items() if k in known})


def load(path) -> Scenario:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc.strerror}") from None
    return parse_text(text, path=str(path))
