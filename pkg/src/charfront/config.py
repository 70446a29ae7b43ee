"""Gas constants, solver tolerances, and the run configuration schema."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

from .errors import ConfigError

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class GasConstants:
    """Polytropic closure constants plus the wall pressure datum."""

    gamma: float = 1.4
    c_nu: float = 1.0
    p_bar: float = 1.0

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ConfigError(f"gas.gamma: must be > 1, got {self.gamma}")
        if not self.c_nu > 0.0:
            raise ConfigError(f"gas.c_nu: must be > 0, got {self.c_nu}")
        if not self.p_bar > 0.0:
            raise ConfigError(f"gas.p_bar: must be > 0, got {self.p_bar}")


@dataclass(frozen=True)
class Tolerances:
    """Numerical knobs shared by the wave-curve and tracking layers."""

    tol_riemann: float = 1e-10     # max-norm target for curve compositions
    newton_tol: float = 1e-12      # residual target inside Newton kernels
    max_iter: int = 50
    eps_cone: float = 1e-6         # admissibility margin off the sonic line
    max_riemann_jump: float = 0.5  # max-norm gate for Riemann data
    neighborhood_radius: float = 0.25  # relative radius of the calibration box
    zero_strength: float = 1e-13   # waves below this are dropped outright
    raref_steps: int = 32          # fixed RK4 step count per curve evaluation
    continuation_step: float = 1e-3  # Hugoniot continuation fallback step
    fd_step: float = 1e-6          # step for reflection-coefficient differencing
    tv_growth: float = 10.0        # blow-up guard factor on total variation
    eps0: float = 0.1              # admissible initial total variation
    max_events: int = 2_000_000

    def __post_init__(self):
        if self.tol_riemann <= 0 or self.newton_tol <= 0:
            raise ConfigError("tolerances: tolerance values must be positive")
        if self.max_iter < 1 or self.raref_steps < 1:
            raise ConfigError("tolerances: iteration counts must be >= 1")


_INITIAL_KINDS = ("constant", "single_jump", "multi_bump", "breakpoints")

_TOP_KEYS = {
    "schema_version", "gas", "reference", "initial_data", "delta", "xi_end",
    "stations", "weights", "seed", "eta_window", "rho_static", "tolerances",
    "workers",
}
_GAS_KEYS = {"gamma", "c_nu", "p_bar"}
_REF_KEYS = {"u", "v", "p", "rho"}
_WEIGHT_KEYS = {"k_plus", "kappa", "kappa1", "kappa2", "c_a", "lam_hat", "k_two"}


@dataclass(frozen=True)
class RunConfig:
    """One experiment: data generator, accuracy, horizon, weights, outputs."""

    gas: GasConstants = field(default_factory=GasConstants)
    ref_u: float = 2.0
    ref_v: float = 0.0
    ref_p: float = 1.0
    ref_rho: float = 1.0
    initial_data: dict = field(default_factory=lambda: {"kind": "constant"})
    delta: float = 1e-3
    xi_end: float = 1.0
    stations: tuple = ()
    weights: Any = "auto"          # "auto" or a dict of explicit constants
    seed: int = 0
    eta_window: float = 8.0
    rho_static: float = 1.25      # display-only static gas below the boundary
    tolerances: Tolerances = field(default_factory=Tolerances)
    workers: int = 1

    def __post_init__(self):
        if self.delta <= 0:
            raise ConfigError(f"delta: must be > 0, got {self.delta}")
        if self.xi_end < 0:
            raise ConfigError(f"xi_end: must be >= 0, got {self.xi_end}")
        if self.eta_window <= 0:
            raise ConfigError("eta_window: must be > 0")
        kind = self.initial_data.get("kind")
        if kind not in _INITIAL_KINDS:
            raise ConfigError(
                f"initial_data.kind: expected one of {_INITIAL_KINDS}, got {kind!r}")
        if self.workers < 1:
            raise ConfigError("workers: must be >= 1")

    def resolved_stations(self) -> tuple:
        if self.stations:
            return tuple(sorted(set(float(s) for s in self.stations)))
        n = 4
        return tuple(self.xi_end * k / n for k in range(n + 1))


def _reject_unknown(section: str, given: dict, allowed: set) -> None:
    for key in given:
        if key not in allowed:
            raise ConfigError(f"{section}: unknown key {key!r}")


def run_config_from_dict(raw: dict) -> RunConfig:
    """Validate a parsed JSON document and build a RunConfig; unknown keys are errors."""
    if not isinstance(raw, dict):
        raise ConfigError("config: top level must be a JSON object")
    _reject_unknown("config", raw, _TOP_KEYS)
    version = raw.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(
            f"schema_version: expected {SCHEMA_VERSION}, got {version!r}")

    gas_raw = raw.get("gas", {})
    _reject_unknown("gas", gas_raw, _GAS_KEYS)
    gas = GasConstants(**{k: float(v) for k, v in gas_raw.items()})

    ref_raw = raw.get("reference", {})
    _reject_unknown("reference", ref_raw, _REF_KEYS)
    ref = {"u": 2.0, "v": 0.0, "p": 1.0, "rho": 1.0}
    ref.update({k: float(v) for k, v in ref_raw.items()})

    tol_raw = raw.get("tolerances", {})
    tol_fields = {f.name for f in fields(Tolerances)}
    _reject_unknown("tolerances", tol_raw, tol_fields)
    tol = Tolerances(**tol_raw)

    weights = raw.get("weights", "auto")
    if isinstance(weights, dict):
        _reject_unknown("weights", weights, _WEIGHT_KEYS)
    elif weights != "auto":
        raise ConfigError('weights: expected "auto" or an object of constants')

    try:
        return RunConfig(
            gas=gas,
            ref_u=ref["u"], ref_v=ref["v"], ref_p=ref["p"], ref_rho=ref["rho"],
            initial_data=dict(raw.get("initial_data", {"kind": "constant"})),
            delta=float(raw.get("delta", 1e-3)),
            xi_end=float(raw.get("xi_end", 1.0)),
            stations=tuple(raw.get("stations", ())),
            weights=weights,
            seed=int(raw.get("seed", 0)),
            eta_window=float(raw.get("eta_window", 8.0)),
            rho_static=float(raw.get("rho_static", 1.25)),
            tolerances=tol,
            workers=int(raw.get("workers", 1)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"config: {exc}") from exc


def load_run_config(path: str | Path) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config: file not found: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return run_config_from_dict(raw)


def format_float(x: float) -> str:
    """Canonical artifact formatting: 17 significant digits, round-trip safe."""
    return format(float(x), ".17g")
