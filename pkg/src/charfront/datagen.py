"""Initial-data profiles: piecewise-constant states on the half line eta > 0."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import GasConstants, RunConfig, Tolerances
from .errors import ConfigError
from .gas import FlowState, reference_state
from .waves import forward_curve


@dataclass(frozen=True)
class InitialProfile:
    """Piecewise-constant data: states[k] rules (positions[k-1], positions[k])."""

    positions: tuple          # strictly increasing, all > 0
    states: tuple             # len(states) == len(positions) + 1

    def __post_init__(self):
        if len(self.states) != len(self.positions) + 1:
            raise ConfigError("profile: need exactly one more state than breakpoints")
        pos = self.positions
        if any(p <= 0 for p in pos) or any(b <= a for a, b in zip(pos, pos[1:])):
            raise ConfigError("profile: breakpoints must be positive and increasing")

    @property
    def tail(self) -> FlowState:
        return self.states[-1]

    def tv(self) -> float:
        """Total variation: sum of absolute jumps in (u, v, p) plus b jumps."""
        total = 0.0
        for lo, hi in zip(self.states, self.states[1:]):
            total += (abs(hi.u - lo.u) + abs(hi.v - lo.v)
                      + abs(hi.p - lo.p) + abs(hi.b - lo.b))
        return total

    def value_at(self, eta: float) -> FlowState:
        idx = 0
        for p in self.positions:
            if eta >= p:
                idx += 1
        return self.states[idx]


def constant_profile(ref: FlowState) -> InitialProfile:
    return InitialProfile((), (ref,))


def single_jump_profile(ref: FlowState, position: float, family: int,
                        strength: float, tol: Tolerances | None = None) -> InitialProfile:
    """Reference state below, one simple wave of the given family above."""
    above = forward_curve(family, strength, ref, tol)
    return InitialProfile((float(position),), (ref, above))


def multi_bump_profile(ref: FlowState, seed: int, n_bumps: int = 3,
                       tv_target: float = 0.04, window: float = 8.0,
                       tol: Tolerances | None = None) -> InitialProfile:
    """Seeded compact perturbation: n_bumps intervals deviating from the
    reference along random wave curves (with occasional energy-constant
    bumps), returning to the reference outside every interval."""
    rng = np.random.default_rng(seed)
    edges = np.sort(rng.uniform(0.05 * window, 0.9 * window, size=2 * n_bumps))
    # keep bumps disjoint by nudging coincident edges apart
    for i in range(1, len(edges)):
        if edges[i] - edges[i - 1] < 1e-3 * window:
            edges[i] = edges[i - 1] + 1e-3 * window
    raw_strengths = rng.uniform(-1.0, 1.0, size=n_bumps)
    families = rng.integers(1, 4, size=n_bumps)
    b_bumps = rng.uniform(-1.0, 1.0, size=n_bumps) * (rng.random(n_bumps) < 0.5)

    def build(scale: float):
        positions, states = [], []
        for k in range(n_bumps):
            s = scale * raw_strengths[k]
            inner = forward_curve(int(families[k]), s, ref, tol)
            if b_bumps[k] != 0.0:
                inner = inner.replace(b=ref.b * (1.0 + scale * 0.5 * b_bumps[k]))
            positions.extend((float(edges[2 * k]), float(edges[2 * k + 1])))
            states.extend((inner, ref))
        return InitialProfile(tuple(positions), (ref, *states))

    profile = build(0.05)
    measured = profile.tv()
    if measured > 0:
        profile = build(0.05 * tv_target / measured)
    return profile


def breakpoints_profile(gas: GasConstants, spec: dict) -> InitialProfile:
    """Explicit breakpoint list from config: positions plus (u, v, p, b) regions."""
    try:
        positions = tuple(float(x) for x in spec["positions"])
        regions = spec["regions"]
        states = tuple(
            FlowState(float(r["u"]), float(r["v"]), float(r["p"]), float(r["b"]), gas)
            for r in regions)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"initial_data.breakpoints: {exc}") from exc
    return InitialProfile(positions, states)


def profile_from_config(cfg: RunConfig) -> InitialProfile:
    """Build the initial profile named by the run configuration."""
    ref = reference_state(cfg.gas, cfg.ref_u, cfg.ref_v, cfg.ref_p, cfg.ref_rho)
    spec = cfg.initial_data
    kind = spec["kind"]
    tol = cfg.tolerances
    if kind == "constant":
        return constant_profile(ref)
    if kind == "single_jump":
        try:
            return single_jump_profile(
                ref, float(spec.get("position", 1.0)),
                int(spec.get("family", 3)), float(spec.get("strength", 0.02)), tol)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"initial_data.single_jump: {exc}") from exc
    if kind == "multi_bump":
        try:
            return multi_bump_profile(
                ref, int(spec.get("seed", cfg.seed)),
                int(spec.get("n_bumps", 3)),
                float(spec.get("tv", 0.04)), cfg.eta_window, tol)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"initial_data.multi_bump: {exc}") from exc
    return breakpoints_profile(cfg.gas, spec)
