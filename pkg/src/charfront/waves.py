"""Elementary wave curves, the interior Riemann solver, and the wall solver.

Wave strengths are parametrized by the increment of the family wave speed
(r . grad(lam) = 1), so for families 1 and 3 a positive strength is a
rarefaction and a negative strength is an admissible shock; family 2 is the
contact, which rescales the velocity magnitude and leaves pressure and flow
direction unchanged. The energy constant b is carried by the states and jumps
only across contacts, which are stationary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import _kernels as K
from .config import Tolerances
from .errors import (CurveLeftCone, NoConvergence, NonPhysicalState,
                     StatesTooFar)
from .gas import FlowState, assert_in_cone

_STATUS_ERRORS = {
    K.ERR_CONVERGENCE: NoConvergence,
    K.ERR_CONE: CurveLeftCone,
    K.ERR_PHYSICAL: NonPhysicalState,
}


def _raise_status(status: int, what: str) -> None:
    if status != K.OK:
        raise _STATUS_ERRORS.get(status, NoConvergence)(what)


@dataclass(frozen=True)
class Wave:
    """One wave of a Riemann solution: family, signed strength, both states,
    and its speed span (a fan for rarefactions, a point for shocks/contacts)."""

    family: int
    strength: float
    below: FlowState
    above: FlowState
    speed_lo: float
    speed_hi: float

    @property
    def is_shock(self) -> bool:
        return self.family != 2 and self.strength < 0.0

    @property
    def is_rarefaction(self) -> bool:
        return self.family != 2 and self.strength > 0.0


@dataclass(frozen=True)
class RiemannSolution:
    """Three strengths and the two middle states connecting below to above."""

    below: FlowState
    above: FlowState
    strengths: tuple
    middle: tuple          # (U1, U2)
    waves: tuple           # Wave entries for nonzero (or contact) waves
    iterations: int
    tol: Tolerances

    def sample(self, slope: float) -> FlowState:
        """Self-similar solution evaluated at ray slope d(eta)/d(xi).

        Right-continuous in the slope at shock and contact positions.
        """
        state = self.below
        for wave in self.waves:
            if slope < wave.speed_lo:
                return state
            if slope < wave.speed_hi and wave.is_rarefaction:
                span = slope - wave.speed_lo
                return forward_curve(wave.family, span, wave.below, self.tol)
            state = wave.above
        return state


def forward_curve(family: int, alpha: float, state: FlowState,
                  tol: Tolerances | None = None,
                  b_above: float | None = None) -> FlowState:
    """State connected to the given one from the upper side by one wave.

    Families 1 and 3: rarefaction branch for alpha > 0 (integral curve of the
    eigenvector field), shock branch for alpha < 0 (jump relations pinned by
    the wave-speed increment); the two branches join twice differentiably at
    alpha = 0. Family 2: velocity rescaled by exp(alpha), pressure unchanged;
    b_above, when given, places the energy-constant jump at this contact.
    """
    tol = tol or Tolerances()
    assert_in_cone(state, tol)
    g = state.gas.gamma
    if family == 2:
        scale = math.exp(alpha)
        b_new = state.b if b_above is None else b_above
        return FlowState(state.u * scale, state.v * scale, state.p, b_new, state.gas)
    if family not in (1, 3):
        raise ValueError(f"family must be 1, 2, or 3, got {family}")
    u, v, p, st = K.forward_point(
        state.u, state.v, state.p, state.b, g, family, float(alpha),
        tol.newton_tol, tol.max_iter, tol.raref_steps, tol.continuation_step,
        tol.eps_cone)
    _raise_status(st, f"forward curve family {family}, strength {alpha}")
    return FlowState(u, v, p, state.b, state.gas)


def shock_speed(family: int, alpha: float, state: FlowState,
                tol: Tolerances | None = None) -> float:
    """Jump speed of the shock branch (alpha < 0) from the given below state."""
    tol = tol or Tolerances()
    g = state.gas.gamma
    _u, _v, _p, sigma, st = K.hugoniot_point(
        state.u, state.v, state.p, state.b, g, family, float(alpha),
        tol.newton_tol, tol.max_iter, tol.continuation_step)
    _raise_status(st, f"shock speed family {family}, strength {alpha}")
    return sigma


def backward_curve_3(beta: float, state: FlowState,
                     tol: Tolerances | None = None) -> FlowState:
    """State below the given one that a 3-wave of strength beta connects up to it."""
    tol = tol or Tolerances()
    assert_in_cone(state, tol)
    u, v, p, st = K.backward3_point(
        state.u, state.v, state.p, state.b, state.gas.gamma, float(beta),
        tol.newton_tol, tol.max_iter, tol.raref_steps, tol.continuation_step,
        tol.eps_cone)
    _raise_status(st, f"backward 3-curve, strength {beta}")
    return FlowState(u, v, p, state.b, state.gas)


def _wave_entries(below: FlowState, above: FlowState, strengths, middle,
                  tol: Tolerances) -> tuple:
    """Build the ordered wave list; zero-strength contacts are kept only when
    they carry an energy-constant jump."""
    a1, a2, a3 = strengths
    u1, u2 = middle
    waves = []
    if a1 != 0.0:
        lo = K.lam_of(below.u, below.v, below.p, below.b, below.gas.gamma, 1)
        hi = K.lam_of(u1.u, u1.v, u1.p, u1.b, u1.gas.gamma, 1)
        if a1 < 0.0:
            sig = shock_speed(1, a1, below, tol)
            lo = hi = sig
        waves.append(Wave(1, a1, below, u1, lo, hi))
    if a2 != 0.0 or u1.b != u2.b:
        waves.append(Wave(2, a2, u1, u2, 0.0, 0.0))
    if a3 != 0.0:
        lo = K.lam_of(u2.u, u2.v, u2.p, u2.b, u2.gas.gamma, 3)
        hi = K.lam_of(above.u, above.v, above.p, above.b, above.gas.gamma, 3)
        if a3 < 0.0:
            sig = shock_speed(3, a3, u2, tol)
            lo = hi = sig
        waves.append(Wave(3, a3, u2, above, lo, hi))
    return tuple(waves)


def solve_riemann(below: FlowState, above: FlowState,
                  tol: Tolerances | None = None) -> RiemannSolution:
    """Decompose the jump from below to above into (a1, a2, a3).

    The energy constant of the below state is carried up to the contact and
    the above state's constant rules above it. Raises StatesTooFar outside
    the configured small-jump neighborhood and NoConvergence on Newton
    failure.
    """
    tol = tol or Tolerances()
    assert_in_cone(below, tol)
    assert_in_cone(above, tol)
    if below.distance(above) > tol.max_riemann_jump:
        raise StatesTooFar(
            f"Riemann data separated by {below.distance(above):.3g} "
            f"(limit {tol.max_riemann_jump})")
    g = below.gas.gamma
    # solve well below the drop threshold so manufactured pure waves come
    # back with exact zeros in the other families
    newton_tol = min(tol.tol_riemann * 0.1, 5e-14)
    a, st, iters = K.riemann_solve(
        below.u, below.v, below.p, below.b,
        above.u, above.v, above.p, above.b, g,
        newton_tol, tol.max_iter, tol.raref_steps,
        tol.continuation_step, tol.eps_cone)
    _raise_status(st, "interior Riemann solve")
    a1, a2, a3 = float(a[0]), float(a[1]), float(a[2])
    u1 = forward_curve(1, a1, below, tol)
    u2 = forward_curve(2, a2, u1, tol, b_above=above.b)
    waves = _wave_entries(below, above, (a1, a2, a3), (u1, u2), tol)
    return RiemannSolution(below, above, (a1, a2, a3), (u1, u2), waves, iters, tol)


def solve_lateral_riemann(u_plus: FlowState,
                          tol: Tolerances | None = None) -> tuple:
    """Wall Riemann problem: the unique solution holding only a 3-wave.

    Returns (beta, boundary_state) where the boundary state sits below the
    3-wave of strength beta and has pressure exactly p_bar.
    """
    tol = tol or Tolerances()
    assert_in_cone(u_plus, tol)
    gas = u_plus.gas
    beta, u, v, p, st = K.lateral_solve(
        u_plus.u, u_plus.v, u_plus.p, u_plus.b, gas.gamma, gas.p_bar,
        tol.newton_tol, tol.max_iter, tol.raref_steps, tol.continuation_step,
        tol.eps_cone)
    _raise_status(st, "lateral Riemann solve")
    return float(beta), FlowState(u, v, p, u_plus.b, gas)


def lateral_response_slope(state: FlowState) -> float:
    """d(beta)/d(p_plus) of the wall solve, linearized at the given state."""
    r3 = K.rvec(state.u, state.v, state.p, state.b, state.gas.gamma, 3)
    return 1.0 / r3[2]


def reflection_coefficient(u_left: FlowState,
                           tol: Tolerances | None = None) -> float:
    """Reflection coefficient K2 of a weak 1-wave off the wall.

    An incident 1-wave of strength a1 arriving from u_left turns into an
    outgoing 3-wave of strength -K2*a1 + O(a1^2); K2 is the centered
    difference of the strength map at a1 = 0.
    """
    tol = tol or Tolerances()
    h = tol.fd_step

    def outgoing(a1: float) -> float:
        mid = forward_curve(1, a1, u_left, tol)
        beta, _ = solve_lateral_riemann(mid, tol)
        return beta

    return -(outgoing(h) - outgoing(-h)) / (2.0 * h)
