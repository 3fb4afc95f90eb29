"""Experiment configuration: an INI file with one section per module.

Every optional key has a documented default; ``auto`` means "derive from the
kernel or nonlinearity". The resolved configuration is written back in the
same format, and re-loading it yields an identical object.
"""
from __future__ import annotations

import configparser
import hashlib
import math
from dataclasses import dataclass, field

from .convops import Grid
from .criteria import CriterionOptions, Nonlinearity
from .errors import ParseError, ThreshlabError
from .kernels import Kernel, make_kernel
from .simulator import SimOptions
from .thresholds import BisectOptions

AUTO = "auto"

# section -> key -> (type, default); type is one of float, int, str, floats, ofloat (float or auto)
SCHEMA = {
    "nonlinearity": {"kind": ("str", "cubic"), "theta": ("float", 0.3), "r": ("float", 1.0),
                     "table_u": ("floats", ()), "table_f": ("floats", ())},
    "grid": {"X": ("float", 100.0), "n": ("int", 4096)},
    "sim": {"dt": ("ofloat", None), "margin_e": ("float", 0.05), "margin_p": ("float", 0.05),
            "W_prop": ("ofloat", None), "sample_dt": ("float", 1.0), "t_end": ("float", 200.0),
            "eps": ("float", 0.1), "L": ("float", 5.0)},
    "criterion": {"m": ("float", 0.5), "alpha": ("ofloat", None), "tol": ("float", 1e-12),
                  "eps_list": ("floats", (0.1, 0.01)), "L_list": ("floats", (1.0, 5.0, 20.0))},
    "tails": {"i_list": ("floats", (1.0, 2.0, 4.0, 8.0)), "L_list": ("floats", (0.5, 1.0, 2.0, 4.0)),
              "xi_list": ("floats", (1e-3, 1e-2, 0.1, 1.0, 10.0))},
    "sweep": {"eps_list": ("floats", (0.1, 0.05, 0.02, 0.01)), "bisect_tol": ("float", 0.05),
              "max_sims": ("int", 40), "dx": ("ofloat", None)},
    "wave": {"alpha": ("float", 0.9), "t_max": ("float", 40.0), "sim_X": ("float", 150.0),
             "sim_n": ("int", 4096), "profile_Z": ("float", 30.0), "profile_n": ("int", 600)},
    "output": {"dir": ("str", "out")},
    "run": {"seed": ("int", 0), "threads": ("int", 1)},
}
SECTIONS = ("kernel", *SCHEMA)
_NOT_HASHED = {"output": ("dir",), "run": ("threads",)}


def _parse_value(kind: str, raw: str, where: str):
    raw = raw.strip()
    try:
        if kind == "float":
            return float(raw)
        if kind == "int":
            return int(raw)
        if kind == "str":
            return raw
        if kind == "ofloat":
            return None if raw.lower() == AUTO else float(raw)
        if kind == "floats":
            return tuple(float(v) for v in raw.split(",") if v.strip())
    except ValueError:
        raise ParseError(f"{where}: cannot read {raw!r} as {kind}") from None
    raise AssertionError(kind)


def _format_value(v) -> str:
    if v is None:
        return AUTO
    if isinstance(v, tuple):
        return ", ".join(repr(float(x)) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _kernel_value(raw: str, where: str):
    raw = raw.strip()
    if "," in raw:
        return tuple(_parse_value("floats", raw, where))
    try:
        return float(raw)
    except ValueError:
        return raw


@dataclass
class ExperimentConfig:
    kernel: dict
    nonlinearity: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)
    sim: dict = field(default_factory=dict)
    criterion: dict = field(default_factory=dict)
    tails: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)
    wave: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    run: dict = field(default_factory=dict)

    # -- builders ----------------------------------------------------------
    def build_kernel(self) -> Kernel:
        spec = {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.kernel.items()}
        return make_kernel(spec)

    def build_nonlinearity(self) -> Nonlinearity:
        nl = self.nonlinearity
        return Nonlinearity(nl["kind"], nl["theta"], nl["r"], nl["table_u"], nl["table_f"])

    def build_grid(self) -> Grid:
        return Grid(self.grid["X"], self.grid["n"])

    def sim_options(self) -> SimOptions:
        s = self.sim
        return SimOptions(dt=s["dt"], margin_e=s["margin_e"], margin_p=s["margin_p"],
                          W_prop=s["W_prop"], sample_dt=s["sample_dt"])

    def criterion_options(self) -> CriterionOptions:
        c = self.criterion
        return CriterionOptions(m=c["m"], alpha=c["alpha"], tol=c["tol"])

    def bisect_options(self) -> BisectOptions:
        s = self.sweep
        return BisectOptions(tol=s["bisect_tol"], max_sims=s["max_sims"], dx=s["dx"])

    def validate(self):
        self.build_kernel()
        self.build_nonlinearity()
        self.build_grid()
        return self

    # -- serialization -----------------------------------------------------
    def to_ini(self, for_hash: bool = False) -> str:
        """INI text; ``for_hash`` drops settings that cannot change results."""
        lines = ["[kernel]"]
        for key in sorted(self.kernel, key=lambda s: (s != "family", s)):
            lines.append(f"{key} = {_format_value(self.kernel[key])}")
        for sec, keys in SCHEMA.items():
            if for_hash and set(keys) <= set(_NOT_HASHED.get(sec, ())):
                continue
            lines.append("")
            lines.append(f"[{sec}]")
            values = getattr(self, sec)
            for key in keys:
                if for_hash and key in _NOT_HASHED.get(sec, ()):
                    continue
                lines.append(f"{key} = {_format_value(values[key])}")
        return "\n".join(lines) + "\n"

    def sha256(self) -> str:
        """Hash of the result-determining settings (output dir and thread count excluded)."""
        return hashlib.sha256(self.to_ini(for_hash=True).encode()).hexdigest()

    def to_dict(self) -> dict:
        def clean(v):
            if isinstance(v, tuple):
                return [clean(x) for x in v]
            if isinstance(v, float) and not math.isfinite(v):
                return repr(v)
            return v
        return {sec: {k: clean(v) for k, v in getattr(self, sec).items()} for sec in SECTIONS}


def parse_config(text: str, source: str = "<string>") -> ExperimentConfig:
    cp = configparser.ConfigParser(strict=True, interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str  # keys are case sensitive (X, W_prop)
    try:
        cp.read_string(text, source=source)
    except configparser.DuplicateOptionError as exc:
        raise ParseError(f"{source}:{exc.lineno}: duplicate key {exc.option!r} in [{exc.section}]") from None
    except configparser.DuplicateSectionError as exc:
        raise ParseError(f"{source}:{exc.lineno}: duplicate section [{exc.section}]") from None
    except configparser.Error as exc:
        raise ParseError(f"{source}: {exc}") from None
    unknown = [s for s in cp.sections() if s not in SECTIONS]
    if unknown:
        raise ParseError(f"{source}: unknown section(s) {unknown}")
    if not cp.has_section("kernel") or "family" not in cp["kernel"]:
        raise ParseError(f"{source}: [kernel] with a 'family' key is required")
    if not cp.has_section("nonlinearity"):
        raise ParseError(f"{source}: [nonlinearity] section is required")
    kernel = {}
    for key, raw in cp["kernel"].items():
        val = _kernel_value(raw, f"{source}: [kernel] {key}")
        kernel[key] = val if key != "family" else str(raw).strip().lower()
    sections = {}
    for sec, keys in SCHEMA.items():
        given = cp[sec] if cp.has_section(sec) else {}
        extra = [k for k in given if k not in keys]
        if extra:
            raise ParseError(f"{source}: unknown key(s) {extra} in [{sec}]")
        vals = {}
        for key, (kind, default) in keys.items():
            if key in given:
                vals[key] = _parse_value(kind, given[key], f"{source}: [{sec}] {key}")
            else:
                vals[key] = default
        sections[sec] = vals
    cfg = ExperimentConfig(kernel=kernel, **sections)
    try:
        cfg.validate()
    except ParseError:
        raise
    except ThreshlabError as exc:
        raise type(exc)(f"{source}: {exc}") from None
    except TypeError as exc:
        raise ParseError(f"{source}: {exc}") from None
    return cfg


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, str(path))
