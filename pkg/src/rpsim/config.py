"""Run configuration: presets, flat key=value config files, CLI overrides.

Precedence (lowest to highest): built-in defaults, preset, config file,
explicit overrides.  All rates and fields are in units of the reference
hyperfine constant; time in its inverse.
"""

import configparser
from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from .master import (COHERENCE_MEASURES, ReactionParams, parse_theory,
                     mixed_triplet_state, singlet_up_state)
from .spins import Coupling, SpinSystem

RHO0_CHOICES = ("SINGLET_UP", "MIXED_TRIPLET", "CUSTOM")

# Scenario presets reproducing the standard figures:
#   fig1ab  pure-singlet start, asymmetric rates, weak relaxation
#   fig1de  fully mixed triplet start, same rates, no relaxation
#   fig2    fig1ab scenario swept over a relaxation-rate ladder
#   fig3    equal rates, Zeeman field sweep (yields / information / coherence)
PRESETS = {
    "fig1ab": dict(theory="haberkorn", n_nuclei=1, couplings="1:D:1",
                   b=0.0, k_s=1 / 100, k_t=1 / 5, gamma=1 / 2000,
                   rho0="SINGLET_UP", t_max=100.0, dt=1e-3, stride=10),
    "fig1de": dict(theory="haberkorn", n_nuclei=1, couplings="1:D:1",
                   b=0.0, k_s=1 / 100, k_t=1 / 5, gamma=0.0,
                   rho0="MIXED_TRIPLET", t_max=100.0, dt=1e-3, stride=10),
    "fig2": dict(theory="haberkorn", n_nuclei=1, couplings="1:D:1",
                 b=0.0, k_s=1 / 100, k_t=1 / 5, gamma=1 / 2000,
                 rho0="SINGLET_UP", t_max=100.0, dt=1e-3, stride=10,
                 gammas="1/2000,1/200,1/20,1/5"),
    "fig3": dict(theory="kominis", n_nuclei=1, couplings="1:D:1",
                 b=0.0, k_s=1 / 20, k_t=1 / 20, gamma=0.0,
                 rho0="SINGLET_UP", t_max=1200.0, dt=1e-3, stride=10,
                 b_min=0.0, b_max=3.0, b_points=201, quad_stride=20),
}


@dataclass(frozen=True)
class RunConfig:
    """Complete description of one CLI run."""

    theory: str = "haberkorn"
    n_nuclei: int = 1
    couplings: str = "1:D:1"      # semicolon/comma list of nucleus:target:A
    b: float = 0.0
    k_s: float = 0.01
    k_t: float = 0.2
    gamma: float = 0.0
    rho0: str = "SINGLET_UP"
    rho0_file: Optional[str] = None
    t_max: Optional[float] = None
    dt: float = 1e-3
    stride: int = 10
    measure: str = "trace-norm"
    # sweep controls
    b_min: float = 0.0
    b_max: float = 3.0
    b_points: int = 201
    quad_stride: int = 20
    # gamma-scan controls
    gammas: Optional[str] = None
    preset: Optional[str] = None

    def validate(self):
        parse_theory(self.theory)
        if self.rho0 not in RHO0_CHOICES:
            raise ValueError(f"rho0 must be one of {RHO0_CHOICES}")
        if self.rho0 == "CUSTOM" and not self.rho0_file:
            raise ValueError("rho0=CUSTOM requires rho0_file")
        if min(self.k_s, self.k_t, self.gamma) < 0:
            raise ValueError("rates must be non-negative")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.stride < 1 or self.quad_stride < 1:
            raise ValueError("strides must be >= 1")
        if self.b_points < 1 or self.b_max < self.b_min:
            raise ValueError("invalid B grid")
        if self.measure not in COHERENCE_MEASURES:
            raise ValueError(f"unknown coherence measure {self.measure!r}")
        return self

    # -- factories ---------------------------------------------------------

    def system(self, b: Optional[float] = None) -> SpinSystem:
        return SpinSystem(self.n_nuclei, parse_couplings(self.couplings),
                          self.b if b is None else float(b))

    def params(self) -> ReactionParams:
        return ReactionParams(self.k_s, self.k_t, self.gamma, self.measure)

    def initial_state(self) -> np.ndarray:
        sys = self.system()
        if self.rho0 == "SINGLET_UP":
            return singlet_up_state(sys)
        if self.rho0 == "MIXED_TRIPLET":
            return mixed_triplet_state(sys)
        rho = np.load(self.rho0_file)
        if rho.shape != (sys.dim, sys.dim):
            raise ValueError(f"custom rho0 has shape {rho.shape}, "
                             f"expected {(sys.dim, sys.dim)}")
        return np.asarray(rho, dtype=complex)

    def b_grid(self) -> np.ndarray:
        return np.linspace(self.b_min, self.b_max, self.b_points)

    def gamma_list(self):
        if not self.gammas:
            raise ValueError("no gamma list configured (set gammas=...)")
        return [parse_number(tok) for tok in self.gammas.split(",") if tok]

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def parse_number(text):
    """Float parser accepting simple fractions like 1/2000."""
    text = str(text).strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)


def parse_couplings(spec) -> tuple:
    """Parse '1:D:1.0; 2:A:0.5' (or comma-separated) into Coupling objects."""
    if isinstance(spec, (list, tuple)):
        return tuple(c if isinstance(c, Coupling) else Coupling(*c)
                     for c in spec)
    out = []
    for chunk in str(spec).replace(";", ",").split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(":")
        if len(parts) not in (2, 3):
            raise ValueError(f"bad coupling {chunk!r}; use nucleus:target[:A]")
        strength = parse_number(parts[2]) if len(parts) == 3 else 1.0
        out.append(Coupling(int(parts[0]), parts[1].strip().upper(), strength))
    if not out:
        raise ValueError("no couplings given")
    return tuple(out)


_FLOAT_KEYS = {"b", "k_s", "k_t", "gamma", "t_max", "dt",
               "b_min", "b_max"}
_INT_KEYS = {"n_nuclei", "stride", "b_points", "quad_stride"}


def _coerce(key, value):
    if value is None or not isinstance(value, str):
        return value
    value = value.strip()
    if key in _FLOAT_KEYS:
        return parse_number(value)
    if key in _INT_KEYS:
        return int(value)
    return value


def read_config_file(path) -> dict:
    """Flat key = value file; '#' and ';' start comments; keys match
    RunConfig field names."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    with open(path) as fh:
        parser.read_string("[run]\n" + fh.read())
    known = {f.name for f in fields(RunConfig)}
    out = {}
    for key, value in parser.items("run"):
        key = key.replace("-", "_")
        if key not in known:
            raise ValueError(f"unknown config key {key!r}")
        out[key] = _coerce(key, value)
    return out


def build_config(preset: Optional[str] = None, config_file=None,
                 overrides: Optional[dict] = None) -> RunConfig:
    """Merge defaults <- preset <- file <- overrides into a validated config."""
    data = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ValueError(f"unknown preset {preset!r}; "
                             f"have {sorted(PRESETS)}")
        data.update(PRESETS[preset])
        data["preset"] = preset
    if config_file is not None:
        data.update(read_config_file(config_file))
    for key, value in (overrides or {}).items():
        if value is not None:
            data[key] = _coerce(key, value)
    cfg = RunConfig(**{k: _coerce(k, v) for k, v in data.items()})
    return cfg.validate()
