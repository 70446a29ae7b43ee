"""Event-driven front tracking on the quarter plane xi > 0, eta > 0.

The approximate solution is piecewise constant between straight fronts.
Interior crossings are resolved by the exact Riemann solver, wall hits by the
lateral solver (which emits only a 3-wave), rarefactions are split into fans
of fronts no stronger than delta, and fronts whose interaction generation
exceeds the cap are removed with their strength booked to the error ledger.
Solutions are immutable snapshots; advancing produces a new one.
"""

from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass, replace

from . import _kernels as K
from .config import Tolerances, format_float
from .datagen import InitialProfile
from .errors import BlowUp, DataTooLarge, NoEvent
from .gas import FlowState
from .waves import RiemannSolution, Wave, forward_curve, shock_speed, \
    solve_lateral_riemann, solve_riemann

WALL_EVENT = "boundary_reflection"
INTERIOR_EVENT = "interior_interaction"
REMOVAL_EVENT = "front_removal"


@dataclass(frozen=True)
class WaveFront:
    """One tracked discontinuity of the piecewise-constant solution."""

    id: int
    family: int
    strength: float
    below: FlowState
    above: FlowState
    position: float
    speed: float
    generation: int

    @property
    def is_shock(self) -> bool:
        return self.family != 2 and self.strength < 0.0

    @property
    def is_rarefaction(self) -> bool:
        return self.family != 2 and self.strength > 0.0


@dataclass(frozen=True)
class ErrorLedger:
    """Accumulated solver error budget, split by source."""

    initial_l1: float = 0.0
    pruned: float = 0.0
    zero_dropped: int = 0

    def total(self) -> float:
        return self.initial_l1 + self.pruned


@dataclass(frozen=True)
class EventRecord:
    xi: float
    eta: float
    kind: str
    in_ids: tuple
    out_ids: tuple
    g_before: float | None = None
    g_after: float | None = None
    tie_break: bool = False
    removals: tuple = ()   # (id, family, strength) per pruned front


@dataclass(frozen=True)
class PiecewiseSolution:
    """Front-tracking state at a fixed xi; immutable snapshot."""

    xi: float
    states: tuple          # len(fronts) + 1, bottom to top
    fronts: tuple          # ordered by position (ties keep chain order)
    delta: float
    max_generation: int
    tol: Tolerances
    ledger: ErrorLedger
    tv0: float
    next_id: int

    def __post_init__(self):
        if len(self.states) != len(self.fronts) + 1:
            raise ValueError(
                f"region/front mismatch: {len(self.states)} states for "
                f"{len(self.fronts)} fronts")

    @property
    def bottom(self) -> FlowState:
        return self.states[0]

    @property
    def tail(self) -> FlowState:
        return self.states[-1]

    def tv(self) -> float:
        total = 0.0
        for lo, hi in zip(self.states, self.states[1:]):
            total += (abs(hi.u - lo.u) + abs(hi.v - lo.v)
                      + abs(hi.p - lo.p) + abs(hi.b - lo.b))
        return total

    def positions(self) -> list:
        return [f.position for f in self.fronts]


def trace_at(sol: PiecewiseSolution, eta: float) -> FlowState:
    """Piecewise-constant value at (sol.xi, eta); right-continuous in eta."""
    idx = bisect.bisect_right(sol.positions(), eta)
    return sol.states[idx]


def trace_below(sol: PiecewiseSolution, eta: float) -> FlowState:
    """Left limit at eta (the state just below a front position)."""
    idx = bisect.bisect_left(sol.positions(), eta)
    return sol.states[idx]


def front_size(front) -> float:
    """Unweighted front magnitude.

    Families 1 and 3 use |strength|. A contact is a two-parameter jump here
    (velocity rescaling plus the energy-constant jump it carries), so its
    size is the sum of both components; a pure entropy jump must not look
    like a zero-strength wave to the potentials.
    """
    if front.family != 2:
        return abs(front.strength)
    return abs(front.strength) + abs(math.log(front.above.b / front.below.b))


def glimm_of_fronts(fronts, k_plus: float, kappa: float,
                    k_two: float = 1.0) -> tuple:
    """(V, Q_approach, Q_boundary, G) for a front list.

    Strengths are weighted by k_plus for the 1-family and k_two for
    contacts. Fronts of different families approach when the lower one is
    strictly faster; fronts of the same genuinely nonlinear family approach
    when at least one is a shock, never when both are rarefaction fronts,
    which keeps the potential stable under the small speed refractions
    interactions produce. 1-fronts moving down are charged to the boundary
    potential.
    """
    weights = {1: k_plus, 2: k_two, 3: 1.0}
    weighted = [weights[f.family] * front_size(f) for f in fronts]
    v_total = sum(weighted)
    q_approach = 0.0
    for i, lower in enumerate(fronts):
        for j in range(i + 1, len(fronts)):
            upper = fronts[j]
            if lower.family == upper.family:
                approach = lower.family != 2 and (
                    lower.strength < 0 or upper.strength < 0)
            else:
                approach = lower.speed > upper.speed
            if approach:
                q_approach += weighted[i] * weighted[j]
    q_boundary = sum(w for w, f in zip(weighted, fronts)
                     if f.family == 1 and f.speed < 0)
    return v_total, q_approach, q_boundary, v_total + kappa * (q_approach + q_boundary)


def _rarefaction_speed(front_above: FlowState, family: int) -> float:
    return K.lam_of(front_above.u, front_above.v, front_above.p,
                    front_above.b, front_above.gas.gamma, family)


def _split_wave(wave: Wave, delta: float, tol: Tolerances) -> list:
    """Front specs (family, strength, below, above, speed) for one wave;
    rarefactions stronger than delta become equal-strength fans."""
    if wave.family == 2:
        return [(2, wave.strength, wave.below, wave.above, 0.0)]
    if wave.is_shock:
        sigma = shock_speed(wave.family, wave.strength, wave.below, tol)
        return [(wave.family, wave.strength, wave.below, wave.above, sigma)]
    parts = max(1, math.ceil(wave.strength / delta - 1e-12))
    specs = []
    lower = wave.below
    for k in range(1, parts + 1):
        if k == parts:
            upper = wave.above
        else:
            upper = forward_curve(wave.family, k * wave.strength / parts,
                                  wave.below, tol)
        specs.append((wave.family, wave.strength / parts, lower, upper,
                      _rarefaction_speed(upper, wave.family)))
        lower = upper
    return specs


def _emit(solution: RiemannSolution, position: float, delta: float,
          tol: Tolerances, generation_of, next_id: int):
    """Instantiate fronts for a Riemann solution at one point, applying the
    zero-strength drop and generation pruning.

    The topmost kept front is pinned to the exact above state, absorbing the
    solve residual and any pruned strength there. Returns
    (mid_states, fronts, removals, pruned_strength, zero_drops, next_id).
    """
    specs = []
    for wave in solution.waves:
        specs.extend(_split_wave(wave, delta, tol))

    removals = []
    pruned = 0.0
    zero_drops = 0
    final_specs = []
    for family, strength, below, above, speed in specs:
        carries_b = below.b != above.b
        if abs(strength) < tol.zero_strength and not carries_b:
            zero_drops += 1
            continue
        gen = generation_of(family)
        if gen > generation_of.cap:
            removals.append((next_id, family, strength))
            pruned += abs(strength)
            next_id += 1
            continue
        final_specs.append((family, strength, below, above, speed, gen))

    # re-chain after drops so adjacent states stay consistent; pin the top
    mids, out = [], []
    lower = solution.below
    for k, (family, strength, below, above, speed, gen) in enumerate(final_specs):
        upper = solution.above if k == len(final_specs) - 1 else above
        out.append(WaveFront(next_id, family, strength, lower, upper,
                             position, speed, gen))
        next_id += 1
        if k < len(final_specs) - 1:
            mids.append(upper)
        lower = upper
    return mids, out, tuple(removals), pruned, zero_drops, next_id


class _GenerationRule:
    """Same family present among the incoming fronts: inherit its minimum
    generation; genuinely new family: one past the incoming maximum."""

    def __init__(self, incoming, cap: int):
        self.cap = cap
        self._by_family = {}
        gens = [f.generation for f in incoming] or [0]
        self._new_gen = max(gens) + 1
        for f in incoming:
            g = self._by_family.get(f.family)
            self._by_family[f.family] = f.generation if g is None else min(g, f.generation)

    def __call__(self, family: int) -> int:
        return self._by_family.get(family, self._new_gen)


class _InitialGeneration:
    cap = 10 ** 9

    def __call__(self, family: int) -> int:
        return 1


def default_max_generation(delta: float) -> int:
    return math.ceil(math.log2(1.0 / delta)) + 4


def sample_initial_data(profile: InitialProfile, delta: float,
                        tol: Tolerances | None = None,
                        max_generation: int | None = None) -> PiecewiseSolution:
    """Sample piecewise-constant data: resolve the wall trace with the lateral
    solver, each interior jump with the Riemann solver, and split fans."""
    tol = tol or Tolerances()
    if profile.tv() > tol.eps0:
        raise DataTooLarge(
            f"initial total variation {profile.tv():.4g} exceeds {tol.eps0}")
    if max_generation is None:
        max_generation = default_max_generation(delta)

    gen_rule = _InitialGeneration()
    next_id = 1
    fronts = []

    # wall trace: only a 3-wave connects the boundary state up to the data
    first = profile.states[0]
    beta, bottom = solve_lateral_riemann(first, tol)
    states = [bottom]
    if abs(beta) >= tol.zero_strength:
        if beta < 0:
            speed = shock_speed(3, beta, bottom, tol)
            wave = Wave(3, beta, bottom, first, speed, speed)
        else:
            wave = Wave(3, beta, bottom, first,
                        _rarefaction_speed(bottom, 3),
                        _rarefaction_speed(first, 3))
        sol = RiemannSolution(bottom, first, (0.0, 0.0, beta), (bottom, bottom),
                              (wave,), 0, tol)
        mids, new_fronts, _, _, zero_drops, next_id = _emit(
            sol, 0.0, delta, tol, gen_rule, next_id)
        states.extend(mids)
        fronts.extend(new_fronts)
        states.append(first)

    for position, below, above in zip(profile.positions, profile.states,
                                      profile.states[1:]):
        rsol = solve_riemann(below, above, tol)
        mids, new_fronts, _, _, _, next_id = _emit(
            rsol, position, delta, tol, gen_rule, next_id)
        states.extend(mids)
        if new_fronts:
            fronts.extend(new_fronts)
            states.append(above)

    return PiecewiseSolution(
        xi=0.0, states=tuple(states), fronts=tuple(fronts), delta=delta,
        max_generation=max_generation, tol=tol, ledger=ErrorLedger(),
        tv0=profile.tv(), next_id=next_id)


def _drift_fronts(sol: PiecewiseSolution, xi: float) -> list:
    dxi = xi - sol.xi
    return [replace(f, position=max(0.0, f.position + f.speed * dxi))
            for f in sol.fronts]


def drift(sol: PiecewiseSolution, xi: float) -> PiecewiseSolution:
    """Advance positions with no event strictly before xi."""
    if xi == sol.xi:
        return sol
    return replace(sol, xi=xi, fronts=tuple(_drift_fronts(sol, xi)))


def next_event_xi(sol: PiecewiseSolution):
    """(xi_event, kind, index) of the earliest crossing, or None.

    Wall hits win ties against interior crossings; interior ties break by
    position, then by the smaller front id. The returned flag marks a tie.
    """
    candidates = []
    fronts = sol.fronts
    if fronts and fronts[0].speed < 0.0:
        candidates.append((sol.xi - fronts[0].position / fronts[0].speed,
                           0, WALL_EVENT, 0, 0.0))
    for i in range(len(fronts) - 1):
        lo, hi = fronts[i], fronts[i + 1]
        gap = hi.position - lo.position
        closing = lo.speed - hi.speed
        if closing > 1e-15:
            t = sol.xi + max(gap, 0.0) / closing
            eta = lo.position + lo.speed * (t - sol.xi)
            candidates.append((t, 1, INTERIOR_EVENT, i, eta))
    if not candidates:
        return None
    t_min = min(c[0] for c in candidates)
    tie_eps = 1e-12 * (1.0 + abs(t_min))
    live = [c for c in candidates if c[0] <= t_min + tie_eps]
    live.sort(key=lambda c: (c[1], c[4], sol.fronts[c[3]].id))
    chosen = live[0]
    return chosen[0], chosen[2], chosen[3], len(live) > 1


def _wall_event(sol: PiecewiseSolution, xi: float, tie: bool, moved: list):
    incident = moved[0]
    u_plus = incident.above
    beta, bottom = solve_lateral_riemann(u_plus, sol.tol)
    gen_rule = _GenerationRule([incident], sol.max_generation)
    next_id = sol.next_id
    new_fronts = []
    removals, pruned, zero_drops = (), 0.0, 0
    mids = []
    if abs(beta) >= sol.tol.zero_strength:
        lo_speed = shock_speed(3, beta, bottom, sol.tol) if beta < 0 \
            else _rarefaction_speed(bottom, 3)
        hi_speed = lo_speed if beta < 0 else _rarefaction_speed(u_plus, 3)
        wave = Wave(3, beta, bottom, u_plus, lo_speed, hi_speed)
        rsol = RiemannSolution(bottom, u_plus, (0.0, 0.0, beta),
                               (bottom, bottom), (wave,), 0, sol.tol)
        mids, new_fronts, removals, pruned, zero_drops, next_id = _emit(
            rsol, 0.0, sol.delta, sol.tol, gen_rule, next_id)
    else:
        zero_drops += 1

    if new_fronts:
        states = (bottom, *mids, u_plus, *sol.states[2:])
    else:
        states = (bottom, *sol.states[2:])
    fronts = tuple(new_fronts) + tuple(moved[1:])
    ledger = replace(sol.ledger, pruned=sol.ledger.pruned + pruned,
                     zero_dropped=sol.ledger.zero_dropped + zero_drops)
    new_sol = replace(sol, xi=xi, states=states, fronts=fronts,
                      ledger=ledger, next_id=next_id)
    record = EventRecord(xi, 0.0, WALL_EVENT, (incident.id,),
                         tuple(f.id for f in new_fronts),
                         tie_break=tie, removals=removals)
    return new_sol, record


def _interior_event(sol: PiecewiseSolution, xi: float, idx: int, tie: bool,
                    moved: list):
    eta = moved[idx].position
    pos_tol = 1e-9 * (1.0 + abs(eta))
    lo = idx
    while lo > 0 and abs(moved[lo - 1].position - eta) <= pos_tol \
            and moved[lo - 1].speed > moved[lo].speed:
        lo -= 1
    hi = idx + 1
    while hi + 1 < len(moved) and abs(moved[hi + 1].position - eta) <= pos_tol \
            and moved[hi].speed > moved[hi + 1].speed:
        hi += 1
    group = moved[lo:hi + 1]
    below = sol.states[lo]
    above = sol.states[hi + 1]

    rsol = solve_riemann(below, above, sol.tol)
    gen_rule = _GenerationRule(group, sol.max_generation)
    mids, new_fronts, removals, pruned, zero_drops, next_id = _emit(
        rsol, eta, sol.delta, sol.tol, gen_rule, sol.next_id)

    if new_fronts:
        states = (*sol.states[:lo + 1], *mids, *sol.states[hi + 1:])
    else:
        # everything dropped: merge regions, keeping the wall-side state when
        # the merged region touches the boundary
        keep = below if lo == 0 else above
        states = (*sol.states[:lo], keep, *sol.states[hi + 2:])
    fronts = (*moved[:lo], *new_fronts, *moved[hi + 1:])
    ledger = replace(sol.ledger, pruned=sol.ledger.pruned + pruned,
                     zero_dropped=sol.ledger.zero_dropped + zero_drops)
    new_sol = replace(sol, xi=xi, states=states, fronts=tuple(fronts),
                      ledger=ledger, next_id=next_id)
    record = EventRecord(xi, eta, INTERIOR_EVENT,
                         tuple(f.id for f in group),
                         tuple(f.id for f in new_fronts),
                         tie_break=tie, removals=removals)
    return new_sol, record


def advance_to_next_event(sol: PiecewiseSolution, weights=None):
    """Advance to the earliest crossing and resolve it.

    Returns (new_solution, EventRecord). Raises NoEvent when no crossing
    remains. When weight constants are supplied, the record carries the
    Glimm functional before and after the event.
    """
    found = next_event_xi(sol)
    if found is None:
        raise NoEvent("no further front crossings")
    xi, kind, idx, tie = found
    g_before = g_after = None
    if weights is not None:
        g_before = glimm_of_fronts(sol.fronts, weights.k_plus, weights.kappa,
                                   getattr(weights, 'k_two', 1.0))[3]
    moved = _drift_fronts(sol, xi)
    if kind == WALL_EVENT:
        new_sol, record = _wall_event(sol, xi, tie, moved)
    else:
        new_sol, record = _interior_event(sol, xi, idx, tie, moved)
    if weights is not None:
        g_after = glimm_of_fronts(new_sol.fronts, weights.k_plus,
                                  weights.kappa, getattr(weights, 'k_two', 1.0))[3]
        record = replace(record, g_before=g_before, g_after=g_after)
    return new_sol, record


@dataclass(frozen=True)
class RunResult:
    final: PiecewiseSolution
    events: tuple
    snapshots: tuple       # (station, PiecewiseSolution) pairs


def run(sol: PiecewiseSolution, xi_end: float, weights=None,
        stations=()) -> RunResult:
    """Drive the event loop to xi_end, snapshotting at the given stations."""
    if xi_end < sol.xi:
        raise ValueError("xi_end must not precede the current xi")
    stations = sorted(s for s in stations if sol.xi <= s <= xi_end)
    events = []
    snapshots = []
    tv_limit = sol.tol.tv_growth * sol.tv0 + 1e-12
    for _ in range(sol.tol.max_events):
        found = next_event_xi(sol)
        next_xi = xi_end + 1.0 if found is None else found[0]
        while stations and stations[0] <= min(next_xi, xi_end):
            snapshots.append((stations[0], drift(sol, stations[0])))
            stations.pop(0)
        if found is None or next_xi > xi_end:
            return RunResult(drift(sol, xi_end), tuple(events), tuple(snapshots))
        sol, record = advance_to_next_event(sol, weights)
        events.append(record)
        if sol.tv() > tv_limit:
            raise BlowUp(
                f"total variation {sol.tv():.4g} exceeded {tv_limit:.4g} at xi={sol.xi:.4g}")
    raise BlowUp("event budget exhausted; front cascade did not settle")


def solution_csv_rows(sol: PiecewiseSolution):
    """Rows (xi, eta, u, v, p, rho, b): each region sampled at its lower edge."""
    edges = [0.0] + sol.positions()
    for eta, state in zip(edges, sol.states):
        yield (sol.xi, eta, state.u, state.v, state.p, state.rho, state.b)


def write_solution_csv(path, snapshots) -> None:
    with open(path, "w") as fh:
        fh.write("xi,eta,u,v,p,rho,b\n")
        for _, sol in snapshots:
            for row in solution_csv_rows(sol):
                fh.write(",".join(format_float(x) for x in row) + "\n")


def write_event_log(path, events) -> None:
    """JSON lines; pruned fronts appear as separate front_removal entries."""
    with open(path, "w") as fh:
        for ev in events:
            entry = {"xi": ev.xi, "eta": ev.eta, "kind": ev.kind,
                     "in_ids": list(ev.in_ids), "out_ids": list(ev.out_ids),
                     "G_before": ev.g_before, "G_after": ev.g_after}
            if ev.tie_break:
                entry["tie_break"] = True
            fh.write(json.dumps(entry) + "\n")
            for fid, family, strength in ev.removals:
                fh.write(json.dumps(
                    {"xi": ev.xi, "eta": ev.eta, "kind": REMOVAL_EVENT,
                     "in_ids": [fid], "out_ids": [],
                     "G_before": ev.g_after, "G_after": ev.g_after,
                     "family": family, "strength": strength}) + "\n")
