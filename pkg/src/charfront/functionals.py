"""Functional machinery: weighted strength and interaction potentials, the
pair distance functional built on shock-curve decompositions, boundary decay
terms, and the local parametrix comparison used to certify trajectories.

All pair functionals evaluate two solutions at the same xi. Integrals over
eta are exact finite sums over the intervals cut by the union of both front
sets; state distance is the sum of absolute differences in (u, v, p).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from . import tracking
from .config import GasConstants, Tolerances
from .errors import NoConvergence, OutOfDomain, TailMismatch
from .gas import FlowState, eigenvalues, eigenvectors
from .tracking import PiecewiseSolution, glimm_of_fronts, run, trace_at
from .waves import forward_curve, reflection_coefficient, solve_riemann

_TAIL_TOL = 1e-9


@dataclass(frozen=True)
class WeightConstants:
    """Calibrated weights for the strength and distance functionals."""

    k_plus: float
    kappa: float
    kappa1: float
    kappa2: float
    c_a: tuple
    lam_hat: float
    k_two: float = 1.0
    meta: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class HugoniotDecomposition:
    """Shock/contact-only connection between two states: strengths, the two
    middle states, and the jump speeds of the three waves."""

    strengths: tuple
    middle: tuple
    speeds: tuple


@dataclass(frozen=True)
class FunctionalSnapshot:
    xi: float
    v_total: float
    q_approach: float
    q_boundary: float
    g: float
    phi: float | None = None
    l1: float | None = None
    w_min: float | None = None
    w_max: float | None = None


def state_distance(a: FlowState, b: FlowState) -> float:
    return abs(a.u - b.u) + abs(a.v - b.v) + abs(a.p - b.p)


def _vec_distance(a, b) -> float:
    return abs(a[0] - b[0]) + abs(a[1] - b[1]) + abs(a[2] - b[2])


def glimm_functional(sol: PiecewiseSolution, w: WeightConstants,
                     xi: float | None = None) -> FunctionalSnapshot:
    """Weighted strength, interaction and boundary potentials of one solution."""
    v, qa, qb, g = glimm_of_fronts(sol.fronts, w.k_plus, w.kappa, w.k_two)
    return FunctionalSnapshot(sol.xi if xi is None else xi, v, qa, qb, g)


def hugoniot_decompose(lower: FlowState, upper: FlowState,
                       tol: Tolerances | None = None) -> HugoniotDecomposition:
    """Connect lower to upper along the 1-jump, contact, 3-jump curves.

    Both branches of the jump curves are allowed (one of the two pressure
    moves is necessarily non-admissible when the end pressures agree). The
    energy constant switches at the contact.
    """
    tol = tol or Tolerances()
    g = lower.gas.gamma
    if lower.distance(upper) == 0.0:
        lam1 = K.lam_of(lower.u, lower.v, lower.p, lower.b, g, 1)
        lam3 = K.lam_of(lower.u, lower.v, lower.p, lower.b, g, 3)
        return HugoniotDecomposition((0.0, 0.0, 0.0), (lower, lower),
                                     (lam1, 0.0, lam3))
    h, st, _ = K.hugoniot_decompose_solve(
        lower.u, lower.v, lower.p, lower.b,
        upper.u, upper.v, upper.p, upper.b, g,
        min(tol.tol_riemann * 0.1, 5e-14), tol.max_iter, tol.continuation_step)
    if st != K.OK:
        raise NoConvergence("shock-curve decomposition failed")
    h1, h2, h3 = float(h[0]), float(h[1]), float(h[2])
    u1u, u1v, u1p, sig1, st1 = K.hugoniot_point(
        lower.u, lower.v, lower.p, lower.b, g, 1, h1,
        tol.newton_tol, tol.max_iter, tol.continuation_step)
    if st1 != K.OK:
        raise NoConvergence("1-jump of the decomposition failed")
    mid1 = FlowState(u1u, u1v, u1p, lower.b, lower.gas)
    scale = math.exp(h2)
    mid2 = FlowState(mid1.u * scale, mid1.v * scale, mid1.p, upper.b, upper.gas)
    _, _, _, sig3, st3 = K.hugoniot_point(
        mid2.u, mid2.v, mid2.p, mid2.b, g, 3, h3,
        tol.newton_tol, tol.max_iter, tol.continuation_step)
    if st3 != K.OK:
        raise NoConvergence("3-jump of the decomposition failed")
    if abs(h1) < 1e-13:
        sig1 = K.lam_of(lower.u, lower.v, lower.p, lower.b, g, 1)
    if abs(h3) < 1e-13:
        sig3 = K.lam_of(mid2.u, mid2.v, mid2.p, mid2.b, g, 3)
    return HugoniotDecomposition((h1, h2, h3), (mid1, mid2),
                                 (float(sig1), 0.0, float(sig3)))


def _check_tails(sol_u: PiecewiseSolution, sol_v: PiecewiseSolution) -> None:
    tu, tv = sol_u.tail, sol_v.tail
    if tu.distance(tv) > _TAIL_TOL:
        raise TailMismatch(
            f"solutions disagree at large eta by {tu.distance(tv):.3g}")


def _pair_grid(sol_u: PiecewiseSolution, sol_v: PiecewiseSolution):
    """Breakpoints 0 = y_0 < ... < y_m joining both front sets; the state pair
    is constant on each (y_k, y_{k+1}) and above y_m."""
    cuts = sorted({0.0, *sol_u.positions(), *sol_v.positions()})
    return cuts


def l1_distance(sol_u: PiecewiseSolution, sol_v: PiecewiseSolution) -> float:
    """Exact L1 distance of the (u, v, p) profiles on the half line."""
    _check_tails(sol_u, sol_v)
    cuts = _pair_grid(sol_u, sol_v)
    total = 0.0
    for lo, hi in zip(cuts, cuts[1:]):
        if hi <= lo:
            continue
        mid = 0.5 * (lo + hi)
        total += state_distance(trace_at(sol_u, mid), trace_at(sol_v, mid)) * (hi - lo)
    return total


def _family_prefixes(sol: PiecewiseSolution, cuts):
    """prefix[f][k] = total strength of family-f fronts at positions <= y_k."""
    index = {y: k for k, y in enumerate(cuts)}
    pref = {f: [0.0] * (len(cuts) + 1) for f in (1, 2, 3)}
    at = {f: [0.0] * len(cuts) for f in (1, 2, 3)}
    for front in sol.fronts:
        at[front.family][index[front.position]] += tracking.front_size(front)
    for f in (1, 2, 3):
        run_sum = 0.0
        for k in range(len(cuts)):
            run_sum += at[f][k]
            pref[f][k] = run_sum
        pref[f][len(cuts)] = run_sum
    totals = {f: pref[f][len(cuts) - 1] if cuts else 0.0 for f in (1, 2, 3)}
    return pref, totals


def lyapunov_phi(sol_u: PiecewiseSolution, sol_v: PiecewiseSolution,
                 w: WeightConstants,
                 tol: Tolerances | None = None) -> FunctionalSnapshot:
    """Weighted distance functional of a solution pair at common xi.

    Integrates |q_i| W_i over eta, where q_i are the weighted shock-curve
    strengths connecting the two profiles and W_i couples the approaching
    strength around eta with both interaction potentials. The reported
    strength/potential components are the sums over the two solutions.
    """
    if sol_u.xi != sol_v.xi:
        raise ValueError("pair functionals need snapshots at the same xi")
    tol = tol or sol_u.tol
    _check_tails(sol_u, sol_v)
    cuts = _pair_grid(sol_u, sol_v)
    pref_u, tot_u = _family_prefixes(sol_u, cuts)
    pref_v, tot_v = _family_prefixes(sol_v, cuts)

    su = glimm_of_fronts(sol_u.fronts, w.k_plus, w.kappa, w.k_two)
    sv = glimm_of_fronts(sol_v.fronts, w.k_plus, w.kappa, w.k_two)
    q_pot = (su[1] + su[2]) + (sv[1] + sv[2])

    phi = 0.0
    l1 = 0.0
    w_seen = []
    c1, c2, c3 = w.c_a
    for k in range(len(cuts)):
        lo = cuts[k]
        hi = cuts[k + 1] if k + 1 < len(cuts) else None
        if hi is not None and hi <= lo:
            continue
        mid = lo if hi is None else 0.5 * (lo + hi)
        length = 0.0 if hi is None else hi - lo
        if length == 0.0:
            continue
        a = trace_at(sol_u, mid)
        bst = trace_at(sol_v, mid)
        if a.distance(bst) == 0.0:
            continue
        dec = hugoniot_decompose(a, bst, tol)
        q = (c1 * dec.strengths[0], c2 * dec.strengths[1], c3 * dec.strengths[2])
        for i in (1, 2, 3):
            qi = q[i - 1]
            if qi == 0.0:
                continue
            below_hi = sum(pref_u[f][k] + pref_v[f][k] for f in (1, 2, 3) if f > i)
            above_lo = sum((tot_u[f] - pref_u[f][k]) + (tot_v[f] - pref_v[f][k])
                           for f in (1, 2, 3) if f < i)
            if qi < 0.0:
                same = pref_u[i][k] + (tot_v[i] - pref_v[i][k])
            else:
                same = pref_v[i][k] + (tot_u[i] - pref_u[i][k])
            a_i = below_hi + above_lo + same
            w_i = 1.0 + w.kappa1 * a_i + w.kappa2 * q_pot
            w_seen.append(w_i)
            phi += abs(qi) * w_i * length
        l1 += state_distance(a, bst) * length

    return FunctionalSnapshot(sol_u.xi, su[0] + sv[0], su[1] + sv[1],
                              su[2] + sv[2], su[3] + sv[3], phi, l1,
                              min(w_seen) if w_seen else None,
                              max(w_seen) if w_seen else None)


def boundary_terms(sol_u: PiecewiseSolution, sol_v: PiecewiseSolution,
                   w: WeightConstants,
                   tol: Tolerances | None = None) -> tuple:
    """Boundary decay terms (E_b1, E_b2, E_b3) at eta = 0+.

    The middle term vanishes identically (stationary contact at the wall);
    with the calibrated first-family weight the other two sum to <= 0.
    """
    if sol_u.xi != sol_v.xi:
        raise ValueError("pair functionals need snapshots at the same xi")
    tol = tol or sol_u.tol
    a = sol_u.bottom
    bst = sol_v.bottom
    dec = hugoniot_decompose(a, bst, tol)
    cuts = _pair_grid(sol_u, sol_v)
    pref_u, tot_u = _family_prefixes(sol_u, cuts)
    pref_v, tot_v = _family_prefixes(sol_v, cuts)
    su = glimm_of_fronts(sol_u.fronts, w.k_plus, w.kappa, w.k_two)
    sv = glimm_of_fronts(sol_v.fronts, w.k_plus, w.kappa, w.k_two)
    q_pot = (su[1] + su[2]) + (sv[1] + sv[2])

    out = []
    for i in (1, 2, 3):
        qi = w.c_a[i - 1] * dec.strengths[i - 1]
        if i == 2:
            out.append(0.0)
            continue
        above_lo = sum(tot_u[f] + tot_v[f] for f in (1, 2, 3) if f < i)
        if qi < 0.0:
            same = tot_v[i]
        else:
            same = tot_u[i]
        a_i = above_lo + same
        w_i = 1.0 + w.kappa1 * a_i + w.kappa2 * q_pot
        out.append(abs(qi) * w_i * dec.speeds[i - 1])
    return tuple(out)


@dataclass(frozen=True)
class PhiDecayReport:
    rows: tuple               # FunctionalSnapshot per grid xi
    c2_observed: float
    c1_observed: float | None
    threshold: float
    passed: bool


def phi_decay_audit(sol_u: PiecewiseSolution, sol_v: PiecewiseSolution,
                    xi_grid, w: WeightConstants,
                    c2_threshold: float = 100.0) -> PhiDecayReport:
    """Advance both solutions along the grid and audit the decay estimate
    phi(xi2) - phi(xi1) <= C2 * delta * (xi2 - xi1) over all grid pairs."""
    delta = max(sol_u.delta, sol_v.delta)
    rows = []
    cur_u, cur_v = sol_u, sol_v
    for xi in sorted(xi_grid):
        cur_u = run(cur_u, xi).final
        cur_v = run(cur_v, xi).final
        rows.append(lyapunov_phi(cur_u, cur_v, w))
    c2_obs = 0.0
    for i in range(len(rows)):
        for j in range(i + 1, len(rows)):
            dxi = rows[j].xi - rows[i].xi
            if dxi <= 0:
                continue
            c2_obs = max(c2_obs, (rows[j].phi - rows[i].phi) / (delta * dxi))
    ratios = [max(r.phi / r.l1, r.l1 / r.phi) for r in rows
              if r.l1 and r.l1 > 1e-14 and r.phi > 0]
    c1_obs = max(ratios) if ratios else None
    return PhiDecayReport(tuple(rows), c2_obs, c1_obs, c2_threshold,
                          c2_obs <= c2_threshold)


def lambda_hat(gas: GasConstants, ref: FlowState,
               tol: Tolerances | None = None) -> float:
    """Uniform wave-speed bound: 1.2 times the extreme speeds over the
    admissibility box around the reference state."""
    tol = tol or Tolerances()
    r = tol.neighborhood_radius
    worst = 0.0
    for du in (-r, 0.0, r):
        for dv in (-r, 0.0, r):
            for dp in (-r, 0.0, r):
                for db in (-r, 0.0, r):
                    u = ref.u * (1.0 + du)
                    v = ref.u * dv
                    p = ref.p * (1.0 + dp)
                    b = ref.b * (1.0 + db)
                    if not K.in_cone(u, v, p, b, gas.gamma, tol.eps_cone):
                        continue
                    l1 = abs(K.lam_of(u, v, p, b, gas.gamma, 1))
                    l3 = K.lam_of(u, v, p, b, gas.gamma, 3)
                    worst = max(worst, l1, l3)
    return 1.2 * worst


def _contact_weight(gas: GasConstants, ref: FlowState, tol: Tolerances,
                    k_plus: float) -> tuple:
    """Weight for contact strengths in the potentials.

    Crossing a contact changes a genuinely nonlinear wave by a multiple of
    (wave strength) x (contact size); the potential credit for the crossing
    pair must dominate that production, including its boundary-potential
    share. The worst production/credit ratio over a crossing grid fixes the
    weight (doubled for margin).
    """
    worst = 0.0
    for fam, a in ((1, 0.02), (1, -0.02), (3, 0.02), (3, -0.02)):
        for a2 in (-0.02, 0.0, 0.02):
            for bb in (-0.02, 0.0, 0.02):
                if a2 == 0.0 and bb == 0.0:
                    continue
                s2 = abs(a2) + abs(bb)
                if fam == 1:
                    mid = forward_curve(2, a2, ref, tol, b_above=ref.b * math.exp(bb))
                    top = forward_curve(1, a, mid, tol)
                else:
                    mid = forward_curve(3, a, ref, tol)
                    top = forward_curve(2, a2, mid, tol, b_above=ref.b * math.exp(bb))
                rsol = solve_riemann(ref, top, tol)
                a1p, a2p, a3p = rsol.strengths
                if fam == 1:
                    prod = k_plus * abs(a1p - a) + abs(a3p)
                else:
                    prod = k_plus * abs(a1p) + abs(a3p - a)
                ds2 = abs(abs(a2p) + abs(bb) - s2)
                w_f = k_plus if fam == 1 else 1.0
                denom = 0.5 * w_f * s2 * abs(a) - ds2
                if denom <= 0:
                    continue
                worst = max(worst, prod / denom)
    return 2.0 * max(1.0, worst), worst


def calibrate_weights(gas: GasConstants, ref: FlowState,
                      tol: Tolerances | None = None,
                      seed: int = 0) -> WeightConstants:
    """Numerical calibration of every constant the estimates leave free.

    k_plus doubles the largest reflection coefficient over a wall-state
    sweep; the contact weight covers the worst transmission growth of
    crossing waves; the first-family distance weight covers the worst wall
    ratio |h3/h1| against the wave-speed ratio; the weight couplings keep
    the distance weights inside [1, 2] for the admissible-variation budget
    while the potential coupling stays far above the approaching-strength
    one.
    """
    tol = tol or Tolerances()
    rng = np.random.default_rng(seed)

    max_k2 = 0.0
    for vfrac in (-0.1, -0.05, 0.0, 0.05, 0.1):
        for ufrac in (0.97, 1.0, 1.03):
            state = FlowState(ref.u * ufrac, ref.u * vfrac, gas.p_bar, ref.b, gas)
            max_k2 = max(max_k2, abs(reflection_coefficient(state, tol)))
    k_plus = 2.0 * max_k2
    k_two, transmission = _contact_weight(gas, ref, tol, k_plus)

    # wave-speed ratio over wall-trace states (the covered inequality lives
    # at eta = 0+, where pressure equals the wall datum)
    lam_ratio = 0.0
    for du in (-0.03, 0.0, 0.03):
        for dv in (-0.1, -0.05, 0.0, 0.05, 0.1):
            for db in (-0.05, 0.0, 0.05):
                u = ref.u * (1.0 + du)
                v = ref.u * dv
                b = ref.b * (1.0 + db)
                if not K.in_cone(u, v, gas.p_bar, b, gas.gamma, tol.eps_cone):
                    continue
                l1 = K.lam_of(u, v, gas.p_bar, b, gas.gamma, 1)
                l3 = K.lam_of(u, v, gas.p_bar, b, gas.gamma, 3)
                lam_ratio = max(lam_ratio, abs(l3 / l1), abs(l1 / l3))

    wall_ratio = 0.0
    for _ in range(40):
        du, dv, db = rng.uniform(-0.02, 0.02, size=3)
        eu, ev, eb = rng.uniform(-0.02, 0.02, size=3)
        a = FlowState(ref.u * (1 + du), ref.u * dv, gas.p_bar,
                      ref.b * (1 + 0.2 * db), gas)
        c = FlowState(ref.u * (1 + eu), ref.u * ev, gas.p_bar,
                      ref.b * (1 + 0.2 * eb), gas)
        dec = hugoniot_decompose(a, c, tol)
        h1, _, h3 = dec.strengths
        if abs(h1) > 1e-8:
            wall_ratio = max(wall_ratio, abs(h3 / h1))
    wall_ratio = max(wall_ratio, 1.0)

    c1a = 4.0 * lam_ratio * wall_ratio
    c_a = (c1a, 1.0, 1.0)

    eps0 = tol.eps0
    strength_budget = 2.5 * eps0
    k_bar = max(k_plus, k_two)
    q_budget = 2.0 * (k_bar * strength_budget + (k_bar * strength_budget) ** 2)
    a_budget = 2.0 * strength_budget
    kappa2 = 0.6 / q_budget
    kappa1 = min(0.2 / a_budget, kappa2 / 25.0)
    kappa = 10.0 / eps0

    lam = lambda_hat(gas, ref, tol)
    meta = {
        "max_K2": max_k2,
        "contact_transmission": transmission,
        "wall_ratio_max": wall_ratio,
        "lambda_ratio_max": lam_ratio,
        "eps0": eps0,
        "strength_budget": strength_budget,
    }
    return WeightConstants(k_plus, kappa, kappa1, kappa2, c_a, lam, k_two, meta)


def weights_from_config(weights, gas: GasConstants, ref: FlowState,
                        tol: Tolerances, seed: int = 0) -> WeightConstants:
    if weights == "auto" or weights is None:
        return calibrate_weights(gas, ref, tol, seed)
    if isinstance(weights, WeightConstants):
        return weights
    return WeightConstants(
        k_plus=float(weights["k_plus"]),
        kappa=float(weights["kappa"]),
        kappa1=float(weights["kappa1"]),
        kappa2=float(weights["kappa2"]),
        c_a=tuple(float(c) for c in weights["c_a"]),
        lam_hat=float(weights.get("lam_hat", lambda_hat(gas, ref, tol))),
        k_two=float(weights.get("k_two", 1.0)),
    )


def _sharp_parametrix(sol_tau: PiecewiseSolution, zeta: float,
                      lam_hat_val: float, delta_step: float,
                      tol: Tolerances):
    """Return H-sharp as a function of eta at time tau + delta_step."""
    left = tracking.trace_below(sol_tau, zeta)
    right = trace_at(sol_tau, zeta)
    rsol = None
    if left.distance(right) > 0.0:
        rsol = solve_riemann(left, right, tol)

    def value(eta: float) -> FlowState:
        if abs(eta - zeta) <= lam_hat_val * delta_step:
            if rsol is None:
                return right
            return rsol.sample((eta - zeta) / delta_step)
        return trace_at(sol_tau, eta)

    edges = {zeta - lam_hat_val * delta_step, zeta + lam_hat_val * delta_step}
    fan_spans = []
    if rsol is not None:
        for wave in rsol.waves:
            lo = zeta + wave.speed_lo * delta_step
            hi = zeta + wave.speed_hi * delta_step
            edges.update((lo, hi))
            if wave.is_rarefaction and hi > lo:
                fan_spans.append((lo, hi))
    return value, edges, fan_spans


def viscosity_check(sol: PiecewiseSolution, tau: float, zeta: float,
                    beta_radius: float, delta_step: float,
                    w: WeightConstants,
                    tol: Tolerances | None = None) -> tuple:
    """Local parametrix comparison at (tau, zeta).

    I_sharp integrates the deviation from the self-similar local wave
    solution, I_flat the deviation from the frozen-coefficient linear
    evolution, both over the light-cone-shrunken window of radius
    beta_radius and divided by delta_step.
    """
    tol = tol or sol.tol
    lam = w.lam_hat
    lo = zeta - beta_radius + delta_step * lam
    hi = zeta + beta_radius - delta_step * lam
    if zeta - beta_radius < 0.0 or lo >= hi or tau < sol.xi:
        raise OutOfDomain("window leaves the quarter plane or is empty")
    sol_tau = run(sol, tau).final
    sol_next = run(sol_tau, tau + delta_step).final

    sharp, edges, fan_spans = _sharp_parametrix(sol_tau, zeta, lam,
                                                delta_step, tol)
    cuts = {lo, hi, *edges}
    cuts.update(p for p in sol_next.positions() if lo < p < hi)
    cuts.update(p for p in sol_tau.positions() if lo < p < hi)
    grid = sorted(c for c in cuts if lo <= c <= hi)

    def in_fan(a: float, b: float) -> bool:
        return any(a >= s - 1e-15 and b <= e + 1e-15 for s, e in fan_spans)

    i_sharp = 0.0
    for a, b in zip(grid, grid[1:]):
        if b <= a:
            continue
        if in_fan(a, b):
            n = 40
            xs = np.linspace(a, b, 2 * n + 1)
            ys = [state_distance(trace_at(sol_next, x), sharp(x)) for x in xs]
            h = (b - a) / (2 * n)
            simp = ys[0] + ys[-1] + 4 * sum(ys[1:-1:2]) + 2 * sum(ys[2:-2:2])
            i_sharp += simp * h / 3.0
        else:
            mid = 0.5 * (a + b)
            i_sharp += state_distance(trace_at(sol_next, mid), sharp(mid)) * (b - a)
    i_sharp /= delta_step

    # frozen-coefficient linear evolution: advect the eigen components of the
    # windowed profile at the three frozen speeds
    center = trace_at(sol_tau, zeta)
    lams = eigenvalues(center, tol)
    r1, r2, r3 = eigenvectors(center, tol)
    rmat = np.column_stack((r1, r2, r3))
    lmat = np.linalg.inv(rmat)

    def clamped_trace(eta: float) -> np.ndarray:
        eta_c = min(max(eta, zeta - beta_radius), zeta + beta_radius)
        return trace_at(sol_tau, eta_c).vec()

    def flat(eta: float) -> np.ndarray:
        out = np.zeros(3)
        for kk in range(3):
            comp = lmat[kk] @ clamped_trace(eta - lams[kk] * delta_step)
            out += comp * rmat[:, kk]
        return out

    cuts = {lo, hi}
    cuts.update(p for p in sol_next.positions() if lo < p < hi)
    for kk in range(3):
        for p in sol_tau.positions():
            q = p + lams[kk] * delta_step
            if lo < q < hi:
                cuts.add(q)
        for edge in (zeta - beta_radius, zeta + beta_radius):
            q = edge + lams[kk] * delta_step
            if lo < q < hi:
                cuts.add(q)
    grid = sorted(cuts)
    i_flat = 0.0
    for a, b in zip(grid, grid[1:]):
        if b <= a:
            continue
        mid = 0.5 * (a + b)
        i_flat += _vec_distance(trace_at(sol_next, mid).vec(), flat(mid)) * (b - a)
    i_flat /= delta_step

    return i_sharp, i_flat
