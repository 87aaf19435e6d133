"""Run configuration: a line-oriented ``key = value`` format with sections.

Example::

    [system]
    tls_energy_mhz = 200, 400
    tls_coupling_mhz = 10, 60

    [grid]
    t_samples = 100
    amp_samples = 100

Comments start with ``#`` or ``;``. Frequencies are given in MHz and
converted to rad/ns on access; pulse widths are in ns.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .model import SystemSpec, mhz_to_rad_per_ns

ENGINES = ("analytic", "numeric", "both")
PHASE_MODELS = ("diabatic", "adiabatic")
KERNELS = ("auto", "cython", "python")

_TRUE = {"on", "true", "yes", "1"}
_FALSE = {"off", "false", "no", "0"}


class ConfigError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _float(text):
    v = float(text)
    if not math.isfinite(v):
        raise ValueError(f"non-finite number {text!r}")
    return v


def _int(text):
    return int(text)


def _floats(text):
    parts = [p.strip() for p in text.split(",")]
    if not parts or any(p == "" for p in parts):
        raise ValueError(f"malformed list {text!r}")
    return tuple(_float(p) for p in parts)


def _bool(text):
    low = text.lower()
    if low in _TRUE:
        return True
    if low in _FALSE:
        return False
    raise ValueError(f"expected on/off, got {text!r}")


def _choice(options):
    def parse(text):
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {text!r}")
        return text

    return parse


def _dt(text):
    if text == "auto":
        return "auto"
    v = _float(text)
    if v <= 0.0:
        raise ValueError("dt must be positive")
    return v


def _opt_float(text):
    return None if text == "auto" else _float(text)


def _str(text):
    if not text:
        raise ValueError("empty value")
    return text


# section -> key -> (attribute, parser)
_SCHEMA = {
    "system": {
        "tls_energy_mhz": ("tls_energy_mhz", _floats),
        "tls_coupling_mhz": ("tls_coupling_mhz", _floats),
        "slope": ("slope", _float),
    },
    "grid": {
        "t_min_ns": ("t_min", _float),
        "t_max_ns": ("t_max", _float),
        "t_samples": ("t_samples", _int),
        "amp_min_mhz": ("amp_min_mhz", _opt_float),
        "amp_max_mhz": ("amp_max_mhz", _opt_float),
        "amp_samples": ("amp_samples", _int),
    },
    "engine": {
        "engine": ("engine", _choice(ENGINES)),
        "stokes": ("stokes", _bool),
        "phases": ("phases", _choice(PHASE_MODELS)),
        "dt_ns": ("dt", _dt),
        "kernel": ("kernel", _choice(KERNELS)),
    },
    "spectral": {
        "window": ("window", _bool),
        "ridge_threshold": ("ridge_threshold", _float),
        "min_bin": ("min_bin", _int),
    },
    "darkstate": {
        "omega1_mhz": ("omega1_mhz", _float),
        "omega2_mhz": ("omega2_mhz", _float),
        "detuning_min_mhz": ("detuning_min_mhz", _float),
        "detuning_max_mhz": ("detuning_max_mhz", _float),
        "detuning_samples": ("detuning_samples", _int),
    },
    "lzcheck": {
        "adiabatic_params": ("lz_params", _floats),
        "sweep_rate": ("lz_sweep_rate", _float),
        "window_factor": ("lz_window_factor", _float),
    },
    "ft": {
        "pattern": ("ft_input", _str),
    },
    "run": {
        "workers": ("workers", _int),
        "out_dir": ("out_dir", _str),
        "image": ("image", _bool),
    },
}

_KEY_OF = {attr: (section, key) for section, keys in _SCHEMA.items() for key, (attr, _) in keys.items()}


@dataclass(frozen=True)
class RunConfig:
    tls_energy_mhz: tuple | None = None
    tls_coupling_mhz: tuple | None = None
    slope: float = 1.0
    t_min: float = 1.0
    t_max: float = 100.0
    t_samples: int = 200
    amp_min_mhz: float | None = None
    amp_max_mhz: float | None = None
    amp_samples: int = 200
    engine: str = "analytic"
    stokes: bool = True
    phases: str = "diabatic"
    dt: object = "auto"
    kernel: str = "auto"
    window: bool = False
    ridge_threshold: float = 0.2
    min_bin: int = 2
    omega1_mhz: float = 10.0
    omega2_mhz: float = 10.0
    detuning_min_mhz: float = -100.0
    detuning_max_mhz: float = 100.0
    detuning_samples: int = 101
    lz_params: tuple = (0.01, 0.05, 0.1, 0.3, 0.5, 1.0, 2.0)
    lz_sweep_rate: float = 1.0
    lz_window_factor: float = 40.0
    ft_input: str | None = None
    workers: int = 1
    out_dir: str = "."
    image: bool = False
    defaults: frozenset = field(default=frozenset(), compare=False)

    @property
    def has_system(self) -> bool:
        return self.tls_energy_mhz is not None

    def system(self) -> SystemSpec:
        if not self.has_system:
            raise ConfigError("[system] block with tls_energy_mhz and tls_coupling_mhz is required")
        return SystemSpec.from_mhz(self.tls_energy_mhz, self.tls_coupling_mhz, self.slope)

    def t_axis(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.t_samples)

    def a_axis(self) -> np.ndarray:
        """Drive amplitudes in rad/ns."""
        return np.linspace(
            float(mhz_to_rad_per_ns(self.amp_min_mhz)),
            float(mhz_to_rad_per_ns(self.amp_max_mhz)),
            self.amp_samples,
        )

    def dt_policy(self):
        return None if self.dt == "auto" else self.dt

    def kernel_backend(self):
        return None if self.kernel == "auto" else self.kernel


def parse_config(text: str) -> RunConfig:
    values = {}
    lines = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].split(";", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"malformed section header {raw.strip()!r}", lineno)
            section = line[1:-1].strip()
            if section not in _SCHEMA:
                raise ConfigError(f"unknown section [{section}]", lineno)
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        if section is None:
            raise ConfigError("key outside of any [section]", lineno)
        key, _, value = (part.strip() for part in line.partition("="))
        if key not in _SCHEMA[section]:
            raise ConfigError(f"unknown key {key!r} in [{section}]", lineno)
        attr, parse = _SCHEMA[section][key]
        if attr in values:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        try:
            values[attr] = parse(value)
        except ValueError as exc:
            raise ConfigError(f"{section}.{key}: {exc}", lineno) from None
        lines[attr] = lineno
    return _finish(values, lines)


def _finish(values, lines):
    defaults = {f.name for f in fields(RunConfig) if f.name != "defaults"} - set(values)
    for attr in ("amp_min_mhz", "amp_max_mhz"):
        if values.get(attr, 0.0) is None:
            del values[attr]
            defaults.add(attr)
    cfg = RunConfig(**values)

    def fail(attr, message):
        raise ConfigError(message, lines.get(attr))

    if (cfg.tls_energy_mhz is None) != (cfg.tls_coupling_mhz is None):
        fail("tls_energy_mhz" if cfg.tls_energy_mhz else "tls_coupling_mhz",
             "tls_energy_mhz and tls_coupling_mhz must be given together")
    if cfg.has_system:
        e, d = cfg.tls_energy_mhz, cfg.tls_coupling_mhz
        if len(e) != len(d):
            fail("tls_coupling_mhz", f"{len(e)} TLS energies but {len(d)} couplings")
        if e[0] <= 0.0:
            fail("tls_energy_mhz", "TLS energies must be positive")
        if any(b <= a for a, b in zip(e, e[1:])):
            fail("tls_energy_mhz", "TLS energies must be strictly increasing")
        if any(x < 0.0 for x in d):
            fail("tls_coupling_mhz", "couplings must be non-negative")
        if cfg.slope <= 0.0:
            fail("slope", "slope must be positive")
        # default span: from half the lowest level to three times the highest
        if cfg.amp_min_mhz is None:
            cfg = replace(cfg, amp_min_mhz=0.5 * e[0] / cfg.slope)
        if cfg.amp_max_mhz is None:
            cfg = replace(cfg, amp_max_mhz=3.0 * e[-1] / cfg.slope)
    if cfg.t_min <= 0.0:
        fail("t_min", "t_min_ns must be positive")
    if cfg.t_max <= cfg.t_min:
        fail("t_max", "t range must be ordered: t_max_ns > t_min_ns")
    for attr in ("t_samples", "amp_samples", "detuning_samples"):
        if getattr(cfg, attr) < 2:
            fail(attr, f"{_KEY_OF[attr][1]} must be at least 2")
    if cfg.amp_min_mhz is not None:
        if cfg.amp_min_mhz <= 0.0:
            fail("amp_min_mhz", "amp_min_mhz must be positive")
        if cfg.amp_max_mhz <= cfg.amp_min_mhz:
            fail("amp_max_mhz", "amplitude range must be ordered: amp_max_mhz > amp_min_mhz")
    if not 0.0 < cfg.ridge_threshold < 1.0:
        fail("ridge_threshold", "ridge_threshold must lie in (0, 1)")
    if cfg.min_bin < 1:
        fail("min_bin", "min_bin must be at least 1")
    if cfg.omega1_mhz == 0.0 and cfg.omega2_mhz == 0.0:
        fail("omega2_mhz", "at least one dark-state coupling must be non-zero")
    if cfg.detuning_max_mhz <= cfg.detuning_min_mhz:
        fail("detuning_max_mhz", "detuning range must be ordered")
    if any(p < 0.0 for p in cfg.lz_params):
        fail("lz_params", "adiabatic parameters must be non-negative")
    if cfg.lz_sweep_rate <= 0.0:
        fail("lz_sweep_rate", "sweep_rate must be positive")
    if cfg.lz_window_factor < 20.0:
        fail("lz_window_factor", "window_factor must be at least 20")
    if cfg.workers < 1:
        fail("workers", "workers must be at least 1")
    return replace(cfg, defaults=frozenset(defaults))


def _format(value):
    if isinstance(value, bool):
        return "on" if value else "off"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(_format(v) for v in value)
    return str(value)


def config_to_text(cfg: RunConfig) -> str:
    """Every effective setting, in a form :func:`parse_config` reads back."""
    out = []
    for section, keys in _SCHEMA.items():
        body = []
        for key, (attr, _) in keys.items():
            value = getattr(cfg, attr)
            if value is None:
                continue
            note = "  # default" if attr in cfg.defaults else ""
            body.append(f"{key} = {_format(value)}{note}")
        if body:
            out.append(f"[{section}]")
            out.extend(body)
    return "\n".join(out) + "\n"


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
