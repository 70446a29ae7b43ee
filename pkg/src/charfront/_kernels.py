"""Scalar numeric kernels: eigenstructure, wave curves, and Newton solves.

Every kernel here is compiled with numba's @njit when available. Setting the
environment variable CHARFRONT_NO_NUMBA=1 selects the pure NumPy/Python path
instead (same source, no compilation). The jitted variants also keep their
.py_func attribute, which the benchmark script uses to time both paths.

States are passed as plain floats (u, v, p) plus the streamline energy
constant b and the adiabatic exponent g. Density is always derived, never
stored, so the closure rho = g*p / ((g-1)*(b - (u^2+v^2)/2)) is an identity.

Status codes returned by the solvers:
    0  converged / valid
    1  no convergence
    2  left the admissibility cone
    3  non-physical state encountered
"""

import math
import os

import numpy as np

_env = os.environ.get("CHARFRONT_NO_NUMBA", "").strip().lower()
NUMBA_ENABLED = _env not in ("1", "true", "yes")
if NUMBA_ENABLED:
    try:
        from numba import njit as _numba_njit
    except ImportError:  # pragma: no cover - numba is a hard dep, but stay runnable
        NUMBA_ENABLED = False

if NUMBA_ENABLED:
    def njit(func):
        return _numba_njit(cache=True, fastmath=False)(func)
else:
    def njit(func):
        return func

OK = 0
ERR_CONVERGENCE = 1
ERR_CONE = 2
ERR_PHYSICAL = 3


@njit
def c2_of(u, v, b, g):
    """Squared sound speed from the streamline energy constant."""
    return (g - 1.0) * (b - 0.5 * (u * u + v * v))


@njit
def rho_of(u, v, p, b, g):
    return g * p / c2_of(u, v, b, g)


@njit
def is_physical(u, v, p, b, g):
    if p <= 0.0:
        return False
    tau = b - 0.5 * (u * u + v * v)
    if tau <= 0.0:
        return False
    # strict supersonicity u > c
    return u > math.sqrt((g - 1.0) * tau)


@njit
def in_cone(u, v, p, b, g, eps):
    """Admissibility cone: margin eps away from the sonic singularity."""
    if not is_physical(u, v, p, b, g):
        return False
    c2 = c2_of(u, v, b, g)
    c = math.sqrt(c2)
    if u <= c * (1.0 + eps):
        return False
    s = math.sqrt((u * u + v * v - c2) / c2)
    return abs(v / u) < s * (1.0 - eps)


@njit
def lam_of(u, v, p, b, g, fam):
    """Characteristic speed of the given family (2 is identically zero)."""
    if fam == 2:
        return 0.0
    c2 = c2_of(u, v, b, g)
    d = u * u - c2
    s = math.sqrt((u * u + v * v - c2) / c2)
    if fam == 1:
        return g * p * (v - s * u) / d
    return g * p * (v + s * u) / d


@njit
def grad_lam(u, v, p, b, g, fam):
    """Gradient of lam_of in (u, v, p) at fixed b; closed form."""
    out = np.empty(3)
    if fam == 2:
        out[0] = 0.0
        out[1] = 0.0
        out[2] = 0.0
        return out
    c2 = c2_of(u, v, b, g)
    c = math.sqrt(c2)
    e = u * u + v * v - c2
    se = math.sqrt(e)
    s = se / c
    d = u * u - c2
    # d/du and d/dv of s and of d; c2 depends on (u, v) only
    gg = ((g + 1.0) * c2 + (g - 1.0) * e) / (2.0 * c2 * c * se)
    s_u = u * gg
    s_v = v * gg
    d_u = (g + 1.0) * u
    d_v = (g - 1.0) * v
    if fam == 1:
        num = v - s * u
        out[0] = g * p * ((-s - u * s_u) / d - num * d_u / (d * d))
        out[1] = g * p * ((1.0 - u * s_v) / d - num * d_v / (d * d))
        out[2] = g * num / d
    else:
        num = v + s * u
        out[0] = g * p * ((s + u * s_u) / d - num * d_u / (d * d))
        out[1] = g * p * ((1.0 + u * s_v) / d - num * d_v / (d * d))
        out[2] = g * num / d
    return out


@njit
def rvec(u, v, p, b, g, fam):
    """Right eigenvector; families 1 and 3 normalized so r . grad(lam) = 1."""
    out = np.empty(3)
    if fam == 2:
        out[0] = u
        out[1] = v
        out[2] = 0.0
        return out
    lam = lam_of(u, v, p, b, g, fam)
    rho = rho_of(u, v, p, b, g)
    out[0] = lam / rho + v
    out[1] = -u
    out[2] = -lam * u
    grad = grad_lam(u, v, p, b, g, fam)
    kap = 1.0 / (out[0] * grad[0] + out[1] * grad[1] + out[2] * grad[2])
    out[0] *= kap
    out[1] *= kap
    out[2] *= kap
    return out


@njit
def integrate_curve(u, v, p, b, g, fam, span, sign, nsteps, eps_cone):
    """March along sign * r_fam for parameter length span >= 0 (classic RK4)."""
    out = np.empty(3)
    out[0] = u
    out[1] = v
    out[2] = p
    if span == 0.0:
        return out, OK
    h = span / nsteps
    for _ in range(nsteps):
        if not is_physical(out[0], out[1], out[2], b, g):
            return out, ERR_CONE
        k1 = rvec(out[0], out[1], out[2], b, g, fam)
        u2 = out[0] + 0.5 * h * sign * k1[0]
        v2 = out[1] + 0.5 * h * sign * k1[1]
        p2 = out[2] + 0.5 * h * sign * k1[2]
        if not is_physical(u2, v2, p2, b, g):
            return out, ERR_CONE
        k2 = rvec(u2, v2, p2, b, g, fam)
        u3 = out[0] + 0.5 * h * sign * k2[0]
        v3 = out[1] + 0.5 * h * sign * k2[1]
        p3 = out[2] + 0.5 * h * sign * k2[2]
        if not is_physical(u3, v3, p3, b, g):
            return out, ERR_CONE
        k3 = rvec(u3, v3, p3, b, g, fam)
        u4 = out[0] + h * sign * k3[0]
        v4 = out[1] + h * sign * k3[1]
        p4 = out[2] + h * sign * k3[2]
        if not is_physical(u4, v4, p4, b, g):
            return out, ERR_CONE
        k4 = rvec(u4, v4, p4, b, g, fam)
        out[0] += h * sign * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]) / 6.0
        out[1] += h * sign * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]) / 6.0
        out[2] += h * sign * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]) / 6.0
        if not in_cone(out[0], out[1], out[2], b, g, eps_cone):
            return out, ERR_CONE
    return out, OK


@njit
def rh_residual(u, v, p, u0, v0, p0, sigma, b, g, out):
    """sigma * [W] - [F] for the divergence-form fluxes; jump = this minus base."""
    r = rho_of(u, v, p, b, g)
    r0 = rho_of(u0, v0, p0, b, g)
    w1 = 1.0 / (r * u) - 1.0 / (r0 * u0)
    w2 = (u + p / (r * u)) - (u0 + p0 / (r0 * u0))
    w3 = v - v0
    f1 = (-v / u) - (-v0 / u0)
    f2 = (-p * v / u) - (-p0 * v0 / u0)
    f3 = p - p0
    out[0] = sigma * w1 - f1
    out[1] = sigma * w2 - f2
    out[2] = sigma * w3 - f3


@njit
def _hugo_system(x, u0, v0, p0, b, g, fam, target, out):
    """Hugoniot point residual: jump relations plus the wave-speed pin."""
    if not is_physical(x[0], x[1], x[2], b, g):
        return ERR_PHYSICAL
    rh_residual(x[0], x[1], x[2], u0, v0, p0, x[3], b, g, out[:3])
    out[3] = lam_of(x[0], x[1], x[2], b, g, fam) - target
    return OK


@njit
def _hugo_newton(u0, v0, p0, b, g, fam, target, x, tol, maxit):
    """Newton on (u, v, p, sigma); x holds the initial guess and the result."""
    res = np.empty(4)
    resp = np.empty(4)
    resm = np.empty(4)
    jac = np.empty((4, 4))
    for _ in range(maxit):
        if _hugo_system(x, u0, v0, p0, b, g, fam, target, res) != OK:
            return ERR_PHYSICAL
        nr = 0.0
        for i in range(4):
            nr = max(nr, abs(res[i]))
        if nr < tol:
            return OK
        for j in range(4):
            hj = 1e-7 * max(1.0, abs(x[j]))
            xs = x[j]
            x[j] = xs + hj
            okp = _hugo_system(x, u0, v0, p0, b, g, fam, target, resp)
            x[j] = xs - hj
            okm = _hugo_system(x, u0, v0, p0, b, g, fam, target, resm)
            x[j] = xs
            if okp != OK or okm != OK:
                return ERR_PHYSICAL
            for i in range(4):
                jac[i, j] = (resp[i] - resm[i]) / (2.0 * hj)
        dx = np.linalg.solve(jac, res)
        # backtrack if the full step leaves the physical region
        step = 1.0
        for _bt in range(25):
            xt0 = x[0] - step * dx[0]
            xt1 = x[1] - step * dx[1]
            xt2 = x[2] - step * dx[2]
            if is_physical(xt0, xt1, xt2, b, g):
                break
            step *= 0.5
        x[0] -= step * dx[0]
        x[1] -= step * dx[1]
        x[2] -= step * dx[2]
        x[3] -= step * dx[3]
    return ERR_CONVERGENCE


@njit
def hugoniot_point(u0, v0, p0, b, g, fam, h, tol, maxit, cont_step):
    """State at parameter h along the fam-Hugoniot locus through the base state.

    Parametrized by the increment of lam_fam; both signs of h are allowed
    (the locus carries the non-admissible side too). Returns
    (u, v, p, sigma, status). Falls back to stepwise continuation in h when
    the direct Newton solve from the tangent guess fails.
    """
    lam0 = lam_of(u0, v0, p0, b, g, fam)
    if abs(h) < 1e-14:
        return u0, v0, p0, lam0, OK
    target = lam0 + h
    r = rvec(u0, v0, p0, b, g, fam)
    x = np.empty(4)
    x[0] = u0 + h * r[0]
    x[1] = v0 + h * r[1]
    x[2] = p0 + h * r[2]
    x[3] = lam0 + 0.5 * h
    st = _hugo_newton(u0, v0, p0, b, g, fam, target, x, tol, maxit)
    if st == OK:
        return x[0], x[1], x[2], x[3], OK
    # continuation along the locus, reusing each converged point as the guess
    n = int(math.ceil(abs(h) / cont_step))
    x[0] = u0
    x[1] = v0
    x[2] = p0
    x[3] = lam0
    for k in range(1, n + 1):
        hk = h * k / n
        tk = lam0 + hk
        rg = rvec(x[0], x[1], x[2], b, g, fam)
        dh = h / n
        x[0] += dh * rg[0]
        x[1] += dh * rg[1]
        x[2] += dh * rg[2]
        x[3] = tk - 0.5 * dh
        st = _hugo_newton(u0, v0, p0, b, g, fam, tk, x, tol, maxit)
        if st != OK:
            return x[0], x[1], x[2], x[3], st
    return x[0], x[1], x[2], x[3], OK


@njit
def forward_point(u0, v0, p0, b, g, fam, alpha, tol, maxit, nsteps, cont_step, eps_cone):
    """Forward wave curve of family 1 or 3: rarefaction side alpha >= 0, shock side alpha < 0."""
    if alpha == 0.0:
        return u0, v0, p0, OK
    if alpha > 0.0:
        out, st = integrate_curve(u0, v0, p0, b, g, fam, alpha, 1.0, nsteps, eps_cone)
        return out[0], out[1], out[2], st
    uu, vv, pp, _sig, st = hugoniot_point(u0, v0, p0, b, g, fam, alpha, tol, maxit, cont_step)
    return uu, vv, pp, st


@njit
def backward3_point(u0, v0, p0, b, g, beta, tol, maxit, nsteps, cont_step, eps_cone):
    """State below the given one that connects to it by a 3-wave of strength beta."""
    if beta == 0.0:
        return u0, v0, p0, OK
    if beta > 0.0:
        out, st = integrate_curve(u0, v0, p0, b, g, 3, beta, -1.0, nsteps, eps_cone)
        return out[0], out[1], out[2], st
    uu, vv, pp, _sig, st = hugoniot_point(u0, v0, p0, b, g, 3, -beta, tol, maxit, cont_step)
    return uu, vv, pp, st


@njit
def compose_waves(ub, vb, pb, b_below, b_above, g, a1, a2, a3,
                  tol, maxit, nsteps, cont_step, eps_cone):
    """Chain 1-wave, contact, 3-wave from the below state; b switches at the contact."""
    u1, v1, p1, st = forward_point(ub, vb, pb, b_below, g, 1, a1,
                                   tol, maxit, nsteps, cont_step, eps_cone)
    if st != OK:
        return u1, v1, p1, st
    ea = math.exp(a2)
    u2 = u1 * ea
    v2 = v1 * ea
    p2 = p1
    if not is_physical(u2, v2, p2, b_above, g):
        return u2, v2, p2, ERR_PHYSICAL
    return forward_point(u2, v2, p2, b_above, g, 3, a3,
                         tol, maxit, nsteps, cont_step, eps_cone)


@njit
def _linear_strength_guess(ub, vb, pb, bb, ua, va, pa, ba, g):
    """First-order strengths from the eigenbasis at the midpoint state."""
    um = 0.5 * (ub + ua)
    vm = 0.5 * (vb + va)
    pm = 0.5 * (pb + pa)
    bm = 0.5 * (bb + ba)
    out = np.zeros(3)
    if not is_physical(um, vm, pm, bm, g):
        return out, ERR_PHYSICAL
    mat = np.empty((3, 3))
    r1 = rvec(um, vm, pm, bm, g, 1)
    r2 = rvec(um, vm, pm, bm, g, 2)
    r3 = rvec(um, vm, pm, bm, g, 3)
    for i in range(3):
        mat[i, 0] = r1[i]
        mat[i, 1] = r2[i]
        mat[i, 2] = r3[i]
    rhs = np.empty(3)
    rhs[0] = ua - ub
    rhs[1] = va - vb
    rhs[2] = pa - pb
    out = np.linalg.solve(mat, rhs)
    return out, OK


@njit
def riemann_solve(ub, vb, pb, bb, ua, va, pa, ba, g,
                  tol, maxit, nsteps, cont_step, eps_cone):
    """Strengths (a1, a2, a3) with compose_waves(a) equal to the above state.

    Newton with a central finite-difference Jacobian; the initial guess is the
    eigenbasis linearization at the midpoint. Returns (a, status, iterations).
    """
    a, st = _linear_strength_guess(ub, vb, pb, bb, ua, va, pa, ba, g)
    if st != OK:
        return a, st, 0
    res = np.empty(3)
    resp = np.empty(3)
    resm = np.empty(3)
    jac = np.empty((3, 3))
    for it in range(maxit):
        uu, vv, pp, st = compose_waves(ub, vb, pb, bb, ba, g, a[0], a[1], a[2],
                                       tol, maxit, nsteps, cont_step, eps_cone)
        if st != OK:
            return a, st, it
        res[0] = uu - ua
        res[1] = vv - va
        res[2] = pp - pa
        nr = max(abs(res[0]), abs(res[1]), abs(res[2]))
        if nr < tol:
            return a, OK, it
        for j in range(3):
            hj = 1e-7 * max(1.0, abs(a[j]))
            asave = a[j]
            a[j] = asave + hj
            up, vp, ppp, stp = compose_waves(ub, vb, pb, bb, ba, g, a[0], a[1], a[2],
                                             tol, maxit, nsteps, cont_step, eps_cone)
            a[j] = asave - hj
            um, vm, pm, stm = compose_waves(ub, vb, pb, bb, ba, g, a[0], a[1], a[2],
                                            tol, maxit, nsteps, cont_step, eps_cone)
            a[j] = asave
            if stp != OK or stm != OK:
                return a, ERR_CONVERGENCE, it
            resp[0] = up
            resp[1] = vp
            resp[2] = ppp
            resm[0] = um
            resm[1] = vm
            resm[2] = pm
            for i in range(3):
                jac[i, j] = (resp[i] - resm[i]) / (2.0 * hj)
        da = np.linalg.solve(jac, res)
        a[0] -= da[0]
        a[1] -= da[1]
        a[2] -= da[2]
    return a, ERR_CONVERGENCE, maxit


@njit
def lateral_solve(up, vp, pp, b, g, pbar, tol, maxit, nsteps, cont_step, eps_cone):
    """Wall Riemann problem: find beta with backward3_point(beta) at pressure pbar.

    Returns (beta, u, v, p, status) for the boundary state below the 3-wave.
    """
    r3 = rvec(up, vp, pp, b, g, 3)
    dpdb = -r3[2]  # d(pressure)/d(beta) of the backward curve at beta = 0
    beta = 0.0 if dpdb == 0.0 else (pbar - pp) / dpdb
    for _ in range(maxit):
        uu, vv, pw, st = backward3_point(up, vp, pp, b, g, beta,
                                         tol, maxit, nsteps, cont_step, eps_cone)
        if st != OK:
            return beta, uu, vv, pw, st
        f = pw - pbar
        if abs(f) < tol:
            return beta, uu, vv, pw, OK
        hb = 1e-7 * max(1.0, abs(beta))
        u2, v2, p2, st2 = backward3_point(up, vp, pp, b, g, beta + hb,
                                          tol, maxit, nsteps, cont_step, eps_cone)
        u3, v3, p3, st3 = backward3_point(up, vp, pp, b, g, beta - hb,
                                          tol, maxit, nsteps, cont_step, eps_cone)
        if st2 != OK or st3 != OK:
            return beta, uu, vv, pw, ERR_CONVERGENCE
        df = (p2 - p3) / (2.0 * hb)
        if df == 0.0:
            return beta, uu, vv, pw, ERR_CONVERGENCE
        beta -= f / df
    return beta, 0.0, 0.0, 0.0, ERR_CONVERGENCE


@njit
def hugoniot_chain(uu, vv, pu, b_lower, b_upper, g, h1, h2, h3, tol, maxit, cont_step):
    """Compose the three Hugoniot curves (shock/contact only, both branches)."""
    x1u, x1v, x1p, _s1, st = hugoniot_point(uu, vv, pu, b_lower, g, 1, h1, tol, maxit, cont_step)
    if st != OK:
        return x1u, x1v, x1p, st
    eh = math.exp(h2)
    x2u = x1u * eh
    x2v = x1v * eh
    x2p = x1p
    if not is_physical(x2u, x2v, x2p, b_upper, g):
        return x2u, x2v, x2p, ERR_PHYSICAL
    x3u, x3v, x3p, _s3, st = hugoniot_point(x2u, x2v, x2p, b_upper, g, 3, h3, tol, maxit, cont_step)
    return x3u, x3v, x3p, st


@njit
def hugoniot_decompose_solve(uu, vv, pu, bu, uv, vv2, pv, bv, g, tol, maxit, cont_step):
    """Strengths (h1, h2, h3) connecting the lower state to the upper state
    along shock/contact curves only. Returns (h, status, iterations)."""
    h, st = _linear_strength_guess(uu, vv, pu, bu, uv, vv2, pv, bv, g)
    if st != OK:
        return h, st, 0
    res = np.empty(3)
    resp = np.empty(3)
    resm = np.empty(3)
    jac = np.empty((3, 3))
    for it in range(maxit):
        au, av, ap, st = hugoniot_chain(uu, vv, pu, bu, bv, g, h[0], h[1], h[2],
                                        tol, maxit, cont_step)
        if st != OK:
            return h, st, it
        res[0] = au - uv
        res[1] = av - vv2
        res[2] = ap - pv
        nr = max(abs(res[0]), abs(res[1]), abs(res[2]))
        if nr < tol:
            return h, OK, it
        for j in range(3):
            hj = 1e-7 * max(1.0, abs(h[j]))
            hsave = h[j]
            h[j] = hsave + hj
            up, vp, pp, stp = hugoniot_chain(uu, vv, pu, bu, bv, g, h[0], h[1], h[2],
                                             tol, maxit, cont_step)
            h[j] = hsave - hj
            um, vm, pm, stm = hugoniot_chain(uu, vv, pu, bu, bv, g, h[0], h[1], h[2],
                                             tol, maxit, cont_step)
            h[j] = hsave
            if stp != OK or stm != OK:
                return h, ERR_CONVERGENCE, it
            resp[0] = up
            resp[1] = vp
            resp[2] = pp
            resm[0] = um
            resm[1] = vm
            resm[2] = pm
            for i in range(3):
                jac[i, j] = (resp[i] - resm[i]) / (2.0 * hj)
        dh = np.linalg.solve(jac, res)
        h[0] -= dh[0]
        h[1] -= dh[1]
        h[2] -= dh[2]
    return h, ERR_CONVERGENCE, maxit
