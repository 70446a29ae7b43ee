"""Coordinate bridge between the stream-function plane and physical space.

The stream coordinate eta satisfies d(eta) = rho*u dy - rho*v dx with eta = 0
on the free boundary y = g(x), and x coincides with the evolution coordinate.
Piecewise-constant tracking solutions map to piecewise-constant physical
fields whose region edges are straight between events, so every conversion
here is exact piecewise-linear arithmetic with no quadrature error.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import format_float
from .errors import BelowBoundary, DegenerateTransform, OutOfDomain
from .gas import FlowState
from .tracking import PiecewiseSolution, advance_to_next_event, drift, \
    next_event_xi


@dataclass(frozen=True)
class EulerianSlab:
    """Vertical strip x0 <= x <= x1 with straight band edges.

    y_edges*/eta_edges* hold the n+1 band edges at the two strip ends;
    states[j] rules the band between edges j and j+1, and the last state
    continues above the top edge.
    """

    x0: float
    x1: float
    y_edges0: tuple
    y_edges1: tuple
    eta_edges0: tuple
    eta_edges1: tuple
    states: tuple

    def y_edges_at(self, x: float) -> list:
        t = 0.0 if self.x1 == self.x0 else (x - self.x0) / (self.x1 - self.x0)
        return [a + t * (b - a) for a, b in zip(self.y_edges0, self.y_edges1)]

    def eta_edges_at(self, x: float) -> list:
        t = 0.0 if self.x1 == self.x0 else (x - self.x0) / (self.x1 - self.x0)
        return [a + t * (b - a) for a, b in zip(self.eta_edges0, self.eta_edges1)]


@dataclass(frozen=True)
class EulerianField:
    """Piecewise-constant physical-plane flow field above a polygonal free
    boundary, with the static gas below it kept for display only."""

    slabs: tuple
    boundary: tuple            # (x, g(x)) vertices
    p_static: float
    rho_static: float

    def g(self, x: float) -> float:
        verts = self.boundary
        if x < verts[0][0] - 1e-12 or x > verts[-1][0] + 1e-12:
            raise OutOfDomain(f"x={x} outside the reconstructed range")
        for (xa, ya), (xb, yb) in zip(verts, verts[1:]):
            if x <= xb or xb == verts[-1][0]:
                t = 0.0 if xb == xa else (x - xa) / (xb - xa)
                return ya + t * (yb - ya)
        return verts[-1][1]

    def slab_at(self, x: float) -> EulerianSlab:
        for slab in self.slabs:
            if slab.x0 - 1e-12 <= x <= slab.x1 + 1e-12:
                return slab
        raise OutOfDomain(f"x={x} outside the reconstructed range")

    def state_at(self, x: float, y: float) -> FlowState:
        slab = self.slab_at(x)
        edges = slab.y_edges_at(x)
        if y < edges[0] - 1e-12:
            raise BelowBoundary(f"({x}, {y}) lies below the free boundary")
        idx = 0
        for k in range(1, len(edges)):
            if y >= edges[k]:
                idx = k
            else:
                break
        return slab.states[min(idx, len(slab.states) - 1)]


def free_boundary_from_lagrangian(bottom_trace) -> tuple:
    """Polyline (x, g(x)) integrating the bottom-state flow direction.

    bottom_trace is a sequence of (xi, FlowState) with the state ruling from
    that xi to the next entry; the final entry closes the range.
    """
    verts = [(bottom_trace[0][0], 0.0)]
    for (x0, state), (x1, _) in zip(bottom_trace, bottom_trace[1:]):
        g_prev = verts[-1][1]
        verts.append((x1, g_prev + (state.v / state.u) * (x1 - x0)))
    return tuple(verts)


def _slab_from_solution(sol: PiecewiseSolution, x1: float, g0: float,
                        eta_cap: float):
    """Exact physical-plane strip for one inter-event interval."""
    bottom = sol.bottom
    slope = bottom.v / bottom.u
    g1 = g0 + slope * (x1 - sol.xi)

    def edges(xi_val, g_val, positions):
        etas = [0.0]
        ys = [g_val]
        states = list(sol.states)
        cap = max(eta_cap, (positions[-1] if positions else 0.0) + 1.0)
        for pos, state in zip(positions, states):
            rho_u = state.rho * state.u
            if rho_u <= 0.0:
                raise DegenerateTransform("mass flux must be positive")
            ys.append(ys[-1] + (pos - etas[-1]) / rho_u)
            etas.append(pos)
        tail = states[-1]
        ys.append(ys[-1] + (cap - etas[-1]) / (tail.rho * tail.u))
        etas.append(cap)
        return etas, ys

    pos0 = sol.positions()
    moved = drift(sol, x1)
    pos1 = moved.positions()
    etas0, ys0 = edges(sol.xi, g0, pos0)
    etas1, ys1 = edges(x1, g1, pos1)
    slab = EulerianSlab(sol.xi, x1, tuple(ys0), tuple(ys1),
                        tuple(etas0), tuple(etas1), sol.states)
    return slab, g1


def to_eulerian(sol: PiecewiseSolution, xi_end: float,
                eta_cap: float | None = None,
                gas_p_static: float | None = None,
                rho_static: float = 1.25) -> EulerianField:
    """Convert a tracking run on [sol.xi, xi_end] to the physical plane."""
    if eta_cap is None:
        eta_cap = (sol.positions()[-1] if sol.fronts else 1.0) + 2.0
    p_static = sol.bottom.gas.p_bar if gas_p_static is None else gas_p_static
    slabs = []
    boundary = [(sol.xi, 0.0)]
    g_cur = 0.0
    cur = sol
    while cur.xi < xi_end:
        found = next_event_xi(cur)
        x1 = xi_end if found is None else min(found[0], xi_end)
        if x1 > cur.xi:
            slab, g_cur = _slab_from_solution(cur, x1, g_cur, eta_cap)
            slabs.append(slab)
            boundary.append((x1, g_cur))
        if found is None or found[0] > xi_end:
            break
        cur, _ = advance_to_next_event(cur)
    if not slabs:
        slab, g_cur = _slab_from_solution(cur, xi_end, g_cur, eta_cap)
        slabs.append(slab)
        boundary.append((xi_end, g_cur))
    return EulerianField(tuple(slabs), tuple(boundary), p_static, rho_static)


def _mass_flux(state: FlowState) -> tuple:
    rho = state.rho
    if rho * state.u <= 0.0:
        raise DegenerateTransform("mass flux must be positive")
    return rho * state.u, rho * state.v


def eta_from_eulerian(field: EulerianField, x: float, y: float) -> float:
    """Stream coordinate by exact integration up from the free boundary."""
    slab = field.slab_at(x)
    edges = slab.y_edges_at(x)
    etas = slab.eta_edges_at(x)
    if y < edges[0] - 1e-12:
        raise BelowBoundary(f"({x}, {y}) lies below the free boundary")
    for k in range(len(edges) - 1):
        if y <= edges[k + 1]:
            ru, _ = _mass_flux(slab.states[k])
            return etas[k] + ru * (y - edges[k])
    ru, _ = _mass_flux(slab.states[-1])
    return etas[-1] + ru * (y - edges[-1])


def path_integral(field: EulerianField, points) -> float:
    """Exact line integral of rho*u dy - rho*v dx along a polyline.

    Splits each segment at slab boundaries and band-edge crossings so each
    piece sees a constant state; used to verify path independence of the
    stream coordinate.
    """
    total = 0.0
    for (xa, ya), (xb, yb) in zip(points, points[1:]):
        cuts = {0.0, 1.0}
        for slab in field.slabs:
            for xs in (slab.x0, slab.x1):
                if xb != xa and min(xa, xb) < xs < max(xa, xb):
                    cuts.add((xs - xa) / (xb - xa))
        for slab in field.slabs:
            n_edges = len(slab.y_edges0)
            for k in range(n_edges):
                # segment point: (x(t), y(t)); edge: linear in x
                # solve y(t) = edge_k(x(t)) for t
                dx = xb - xa
                dy = yb - ya
                if slab.x1 == slab.x0:
                    continue
                ex0, ex1 = slab.y_edges0[k], slab.y_edges1[k]
                slope = (ex1 - ex0) / (slab.x1 - slab.x0)
                denom = dy - slope * dx
                if denom == 0.0:
                    continue
                t = (ex0 + slope * (xa - slab.x0) - ya) / denom
                if 0.0 < t < 1.0:
                    xt = xa + t * dx
                    if slab.x0 - 1e-12 <= xt <= slab.x1 + 1e-12:
                        cuts.add(t)
        ts = sorted(cuts)
        for t0, t1 in zip(ts, ts[1:]):
            if t1 <= t0:
                continue
            tm = 0.5 * (t0 + t1)
            xm = xa + tm * (xb - xa)
            ym = ya + tm * (yb - ya)
            state = field.state_at(xm, ym)
            ru, rv = _mass_flux(state)
            total += ru * (yb - ya) * (t1 - t0) - rv * (xb - xa) * (t1 - t0)
    return total


@dataclass(frozen=True)
class EulerianInitialData:
    """Piecewise-constant inflow data on x = 0: states[k] rules
    (y_breaks[k-1], y_breaks[k]), the last state continues to y_max."""

    y_breaks: tuple
    states: tuple
    y_max: float

    def state_at(self, y: float) -> FlowState:
        idx = 0
        for br in self.y_breaks:
            if y >= br:
                idx += 1
        return self.states[idx]


def lagrangian_trace(data: EulerianInitialData):
    """(eta_breaks, states, eta_max): the inflow data read in the stream
    coordinate, with eta(y) integrated exactly."""
    eta_breaks = []
    eta = 0.0
    y_prev = 0.0
    for y_br, state in zip(data.y_breaks, data.states):
        ru, _ = _mass_flux(state)
        eta += ru * (y_br - y_prev)
        eta_breaks.append(eta)
        y_prev = y_br
    ru, _ = _mass_flux(data.states[-1])
    eta_max = eta + ru * (data.y_max - y_prev)
    return tuple(eta_breaks), data.states, eta_max


def initial_trace_equivalence(data1: EulerianInitialData,
                              data2: EulerianInitialData,
                              tol: float = 1e-10) -> dict:
    """Compare the stream-coordinate traces of two inflow data sets.

    Returns the L1 distance over the common window and the verdict
    'equivalent' when it vanishes to tolerance.
    """
    br1, st1, m1 = lagrangian_trace(data1)
    br2, st2, m2 = lagrangian_trace(data2)
    window = min(m1, m2)
    cuts = sorted({0.0, window, *(b for b in br1 if b < window),
                   *(b for b in br2 if b < window)})

    def value(breaks, states, eta):
        idx = 0
        for br in breaks:
            if eta >= br:
                idx += 1
        return states[idx]

    dist = 0.0
    for lo, hi in zip(cuts, cuts[1:]):
        if hi <= lo:
            continue
        mid = 0.5 * (lo + hi)
        a = value(br1, st1, mid)
        b = value(br2, st2, mid)
        dist += (abs(a.u - b.u) + abs(a.v - b.v) + abs(a.p - b.p)) * (hi - lo)
    return {"l1": dist, "window": window,
            "verdict": "equivalent" if dist < tol else "different"}


def write_boundary_csv(path, field: EulerianField) -> None:
    with open(path, "w") as fh:
        fh.write("x,g\n")
        for x, g in field.boundary:
            fh.write(f"{format_float(x)},{format_float(g)}\n")


def write_regions_csv(path, field: EulerianField) -> None:
    """Quadrilateral bands per slab; band -1 is the display-only static gas."""
    with open(path, "w") as fh:
        fh.write("slab,band,x0,x1,y0_lo,y0_hi,y1_lo,y1_hi,u,v,p,rho,b\n")
        for si, slab in enumerate(field.slabs):
            n = len(slab.states)
            pad = 0.25 * (slab.y_edges0[-1] - slab.y_edges0[0] + 1.0)
            row = [si, -1, slab.x0, slab.x1,
                   slab.y_edges0[0] - pad, slab.y_edges0[0],
                   slab.y_edges1[0] - pad, slab.y_edges1[0],
                   0.0, 0.0, field.p_static, field.rho_static, float("nan")]
            fh.write(",".join(str(r) if isinstance(r, int) else format_float(r)
                              for r in row) + "\n")
            for bi in range(n):
                st = slab.states[bi]
                hi0 = slab.y_edges0[bi + 1]
                hi1 = slab.y_edges1[bi + 1]
                row = [si, bi, slab.x0, slab.x1,
                       slab.y_edges0[bi], hi0, slab.y_edges1[bi], hi1,
                       st.u, st.v, st.p, st.rho, st.b]
                fh.write(",".join(str(r) if isinstance(r, int) else format_float(r)
                                  for r in row) + "\n")
