"""Thermodynamic closure and eigenstructure of the stream-coordinate system.

The flow state is (u, v, p) together with the streamline energy constant b;
density and sound speed are always derived through the energy closure
    (u^2 + v^2)/2 + c^2/(gamma - 1) = b,      c^2 = gamma p / rho,
so the closure holds as an identity rather than a constraint. The system is
strictly hyperbolic for u > c with wave speeds lam_1 < lam_2 = 0 < lam_3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .config import GasConstants, Tolerances
from .errors import NonPhysicalState, StateOutsideCone


@dataclass(frozen=True)
class FlowState:
    """Immutable supersonic flow state; density and sound speed are accessors.

    Invariants enforced on construction: p > 0, positive internal-energy
    budget b > (u^2+v^2)/2, and strict supersonicity u > c.
    """

    u: float
    v: float
    p: float
    b: float
    gas: GasConstants

    def __post_init__(self):
        if self.p <= 0.0:
            raise NonPhysicalState(f"pressure must be positive, got p={self.p}")
        tau = self.b - 0.5 * (self.u * self.u + self.v * self.v)
        if tau <= 0.0:
            raise NonPhysicalState(
                f"energy constant b={self.b} does not exceed kinetic energy")
        c = math.sqrt((self.gas.gamma - 1.0) * tau)
        if self.u <= c:
            raise NonPhysicalState(
                f"state must be strictly supersonic: u={self.u} <= c={c}")

    @classmethod
    def from_density(cls, u: float, v: float, p: float, rho: float,
                     gas: GasConstants) -> "FlowState":
        """Build a state from (u, v, p, rho), deriving the energy constant."""
        if rho <= 0.0:
            raise NonPhysicalState(f"density must be positive, got rho={rho}")
        b = 0.5 * (u * u + v * v) + gas.gamma * p / ((gas.gamma - 1.0) * rho)
        return cls(u, v, p, b, gas)

    @property
    def rho(self) -> float:
        return K.rho_of(self.u, self.v, self.p, self.b, self.gas.gamma)

    @property
    def c(self) -> float:
        return math.sqrt(K.c2_of(self.u, self.v, self.b, self.gas.gamma))

    @property
    def mach(self) -> float:
        return math.hypot(self.u, self.v) / self.c

    @property
    def entropy(self) -> float:
        """Diagnostic only; plays no dynamic role."""
        return self.gas.c_nu * math.log(self.p / self.rho ** self.gas.gamma)

    def vec(self) -> np.ndarray:
        return np.array([self.u, self.v, self.p])

    def replace(self, u=None, v=None, p=None, b=None) -> "FlowState":
        return FlowState(
            self.u if u is None else u,
            self.v if v is None else v,
            self.p if p is None else p,
            self.b if b is None else b,
            self.gas,
        )

    def distance(self, other: "FlowState") -> float:
        """Max-norm distance over (u, v, p, b); the small-jump gate uses this."""
        return max(abs(self.u - other.u), abs(self.v - other.v),
                   abs(self.p - other.p), abs(self.b - other.b))

    def isclose(self, other: "FlowState", tol: float) -> bool:
        return self.distance(other) <= tol


def reference_state(gas: GasConstants, u: float = 2.0, v: float = 0.0,
                    p: float = 1.0, rho: float = 1.0) -> FlowState:
    """The uniform background flow all perturbations are measured against."""
    return FlowState.from_density(u, v, p, rho, gas)


def density_from_bernoulli(state: FlowState) -> float:
    """Density determined by (u, v, p) through the streamline energy closure."""
    return state.rho


def in_admissibility_cone(state: FlowState, tol: Tolerances) -> bool:
    return K.in_cone(state.u, state.v, state.p, state.b, state.gas.gamma,
                     tol.eps_cone)


def assert_in_cone(state: FlowState, tol: Tolerances) -> None:
    if not in_admissibility_cone(state, tol):
        raise StateOutsideCone(
            f"state (u={state.u}, v={state.v}, p={state.p}, b={state.b}) "
            "violates the admissibility margins")


def eigenvalues(state: FlowState, tol: Tolerances | None = None) -> tuple:
    """Wave speeds (lam1, lam2, lam3) with lam1 < lam2 = 0 < lam3."""
    tol = tol or Tolerances()
    assert_in_cone(state, tol)
    g = state.gas.gamma
    lam1 = K.lam_of(state.u, state.v, state.p, state.b, g, 1)
    lam3 = K.lam_of(state.u, state.v, state.p, state.b, g, 3)
    return lam1, 0.0, lam3


def eigenvectors(state: FlowState, tol: Tolerances | None = None) -> tuple:
    """Right eigenvectors (r1, r2, r3); r1, r3 normalized so r . grad(lam) = 1,
    r2 = (u, v, 0) unnormalized (linearly degenerate family)."""
    tol = tol or Tolerances()
    assert_in_cone(state, tol)
    g = state.gas.gamma
    r1 = K.rvec(state.u, state.v, state.p, state.b, g, 1)
    r2 = K.rvec(state.u, state.v, state.p, state.b, g, 2)
    r3 = K.rvec(state.u, state.v, state.p, state.b, g, 3)
    return r1, r2, r3


def lambda_gradient(state: FlowState, family: int) -> np.ndarray:
    """Closed-form gradient of the wave speed in (u, v, p) at fixed b."""
    return K.grad_lam(state.u, state.v, state.p, state.b, state.gas.gamma, family)


def symmetric_matrices(state: FlowState) -> tuple:
    """The symmetric coefficient matrices (A, B) of the quasilinear form."""
    rho = state.rho
    c2 = K.c2_of(state.u, state.v, state.b, state.gas.gamma)
    u, v = state.u, state.v
    a = np.array([
        [u, 0.0, 1.0 / rho],
        [0.0, u, 0.0],
        [1.0 / rho, 0.0, u / (rho * rho * c2)],
    ])
    b = np.array([
        [0.0, 0.0, -v],
        [0.0, 0.0, u],
        [-v, u, 0.0],
    ])
    return a, b
