"""Flat ``key = value`` run configuration.

Blank lines and ``#`` comments are ignored. Real values accept plain
numbers, fractions (``1/10``) and multiples of pi (``2pi``, ``2*pi``,
``pi/2``). Lists are comma separated. Unknown keys are rejected.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, fields
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .errors import ConfigError
from .models import INITIAL_CONDITIONS, MODELS, build_model, initial_condition
from .spectral import GridSpec
from .stepping import StepperConfig

__all__ = ["RunConfig", "parse_real", "parse_config", "load_config", "MODEL_PARAM_KEYS"]

MODEL_PARAM_KEYS = ("k_alpha", "k_u", "k_v", "f_rate", "lambda_rate", "mu", "epsilon", "beta", "gamma", "delta")

_PI = re.compile(r"^([-+]?[0-9.]*)\s*\*?\s*pi(?:\s*/\s*([0-9.]+))?$")


def parse_real(text):
    """Parse ``1.5``, ``1/10``, ``-20``, ``2pi``, ``2*pi`` or ``pi/2``."""
    s = text.strip()
    m = _PI.match(s)
    try:
        if m:
            coef = m.group(1)
            c = 1.0 if coef in ("", "+") else -1.0 if coef == "-" else float(coef)
            d = float(m.group(2)) if m.group(2) else 1.0
            return c * math.pi / d
        if "/" in s:
            return float(Fraction(s))
        return float(s)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"not a real number: {text!r}") from None


def _parse_bool(text):
    s = text.strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _parse_list(text, item=parse_real):
    text = text.strip()
    if not text:
        return ()
    return tuple(item(p) for p in text.split(","))


def _parse_range(text):
    vals = _parse_list(text)
    if len(vals) != 2:
        raise ConfigError(f"a range needs two values, got {text!r}")
    return vals


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce one run or refinement study.

    ``reference`` is ``"exact"`` (manufactured model only), ``"tau"`` (fine
    time step ``tau_ref`` at the same ``n``) or ``"n"`` (fine grid ``n_ref``
    at the same ``tau``).
    """

    model: str
    n: int
    alpha: float
    kappa: float
    tau: float
    t_end: float
    x1_range: Optional[tuple] = None
    x2_range: Optional[tuple] = None
    ic: Optional[str] = None
    model_params: dict = field(default_factory=dict)
    snapshot_times: tuple = ()
    reference: str = "tau"
    tau_ref: float = 0.0005
    n_ref: int = 1024
    taus: tuple = ()
    ns: tuple = ()
    output_dir: str = "out"
    heatmap: bool = False
    heatmap_crop: Optional[tuple] = None
    heatmap_range: Optional[tuple] = None
    dealias: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}; choose from {sorted(MODELS)}")
        entry = MODELS[self.model]
        ic = self.ic if self.ic is not None else entry.default_ic
        if self.model != "manufactured" and ic not in INITIAL_CONDITIONS:
            raise ConfigError(f"unknown initial condition {ic!r}")
        object.__setattr__(self, "ic", ic)
        if self.x1_range is None or self.x2_range is None:
            r1, r2 = INITIAL_CONDITIONS[ic][1:] if ic in INITIAL_CONDITIONS else entry.domain
            object.__setattr__(self, "x1_range", self.x1_range or r1)
            object.__setattr__(self, "x2_range", self.x2_range or r2)
        if self.reference not in ("exact", "tau", "n"):
            raise ConfigError(f"reference must be exact, tau or n; got {self.reference!r}")
        if self.reference == "exact" and self.model != "manufactured":
            raise ConfigError("reference = exact is only available for the manufactured model")
        if self.reference == "tau":
            if not 0 < self.tau_ref:
                raise ConfigError("tau_ref must be > 0")
            for t in (self.tau,) + tuple(self.taus):
                if not self.tau_ref < t:
                    raise ConfigError(f"tau_ref={self.tau_ref} must be smaller than tau={t}")
        unknown = set(self.model_params) - set(MODEL_PARAM_KEYS)
        if unknown:
            raise ConfigError(f"unknown model parameters {sorted(unknown)}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    def grid(self, n=None):
        return GridSpec(self.n if n is None else n, self.x1_range, self.x2_range)

    def build_model(self, n=None):
        params = dict(self.model_params)
        if self.model == "manufactured":
            params["alpha"] = self.alpha
        return build_model(self.model, self.grid(n), **params)

    def initial_fields(self, n=None):
        grid = self.grid(n)
        if self.model == "manufactured":
            return self.build_model(n).exact(0.0)
        return initial_condition(self.ic, grid)

    def stepper(self, tau=None, snapshot_times=None):
        return StepperConfig(
            tau=self.tau if tau is None else tau,
            kappa=self.kappa,
            alpha=self.alpha,
            t_end=self.t_end,
            snapshot_times=self.snapshot_times if snapshot_times is None else snapshot_times,
            dealias=self.dealias,
        )


_PARSERS = {
    "model": str.strip,
    "ic": str.strip,
    "n": lambda s: _int(s),
    "alpha": parse_real,
    "kappa": parse_real,
    "tau": parse_real,
    "t_end": parse_real,
    "domain": _parse_range,
    "x1_range": _parse_range,
    "x2_range": _parse_range,
    "snapshot_times": _parse_list,
    "reference": str.strip,
    "tau_ref": parse_real,
    "n_ref": lambda s: _int(s),
    "taus": _parse_list,
    "ns": lambda s: _parse_list(s, _int),
    "output_dir": str.strip,
    "heatmap": _parse_bool,
    "heatmap_crop": _parse_list,
    "heatmap_range": _parse_range,
    "dealias": _parse_bool,
    "workers": lambda s: _int(s),
}


def _int(text):
    try:
        return int(text.strip())
    except ValueError:
        raise ConfigError(f"not an integer: {text!r}") from None


#: keys understood by parse_config, for documentation and error messages
CONFIG_KEYS = tuple(sorted(set(_PARSERS) | set(MODEL_PARAM_KEYS)))


def parse_config(text, source="<config>"):
    """Parse config text into a :class:`RunConfig`."""
    values = {}
    params = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (p.strip() for p in line.split("=", 1))
        if key in values or key in params:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        if key in MODEL_PARAM_KEYS:
            params[key] = parse_real(value)
        elif key in _PARSERS:
            try:
                values[key] = _PARSERS[key](value)
            except ConfigError as exc:
                raise ConfigError(f"{source}:{lineno}: {exc}") from None
        else:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
    if "domain" in values:
        dom = values.pop("domain")
        values.setdefault("x1_range", dom)
        values.setdefault("x2_range", dom)
    for required in ("model", "n", "alpha", "kappa", "tau", "t_end"):
        if required not in values:
            raise ConfigError(f"{source}: missing required key {required!r}")
    if "heatmap_crop" in values and len(values["heatmap_crop"]) != 4:
        raise ConfigError(f"{source}: heatmap_crop needs four values")
    known = {f.name for f in fields(RunConfig)}
    assert set(values) <= known
    return RunConfig(model_params=params, **values)


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror or exc}") from None
    return parse_config(text, str(path))
