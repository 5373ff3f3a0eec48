"""1d characteristics machinery: d'Alembert solutions and the exact front ODE.

This module supplies ground truth for every 1d test.  The fixed-interval
solution uses odd 2L-periodic extensions of the data,

    u(t,x) = [u0~(x+t) + u0~(x-t)]/2 + 1/2 int_{x-t}^{x+t} u1~
             + 1/2 iint_{cone} f~,

with data integrals taken exactly between reflection points whenever the
fields come from the expression catalog.  The debonding front obeys

    l'(t) = max( (F^2 - 2 kappa(l)) / (F^2 + 2 kappa(l)), 0 ),
    F = u0'(l-t) - u1(l-t) - int_0^t f(tau, tau - t + l(t)) dtau,

valid while the backward characteristic from (t, l(t)) reads the initial
data directly, i.e. while l(t) - t >= 0.  Integration stops at the first
root of l(t) - t (the horizon T*) and refuses to continue past it.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import CompatibilityViolated, TooFewSamples
from .expressions import Expression


def adaptive_simpson(f, a, b, tol=1e-9, max_depth=48):
    """Classic recursive adaptive Simpson rule."""
    if a == b:
        return 0.0

    def simpson(x0, x2, f0, f1, f2):
        return (x2 - x0) / 6.0 * (f0 + 4.0 * f1 + f2)

    def recurse(x0, x2, f0, f1, f2, whole, eps, depth):
        xm = 0.5 * (x0 + x2)
        xl = 0.5 * (x0 + xm)
        xr = 0.5 * (xm + x2)
        fl = f(xl)
        fr = f(xr)
        left = simpson(x0, xm, f0, fl, f1)
        right = simpson(xm, x2, f1, fr, f2)
        if depth >= max_depth or abs(left + right - whole) <= 15.0 * eps:
            return left + right + (left + right - whole) / 15.0
        return (recurse(x0, xm, f0, fl, f1, left, 0.5 * eps, depth + 1)
                + recurse(xm, x2, f1, fr, f2, right, 0.5 * eps, depth + 1))

    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = simpson(a, b, fa, fm, fb)
    return recurse(a, b, fa, fm, fb, whole, tol, 0)


def _fold(s, L):
    """Map a real s to (point in [0, L], sign) of the odd 2L-periodic extension."""
    p = math.fmod(s, 2.0 * L)
    if p < 0.0:
        p += 2.0 * L
    if p <= L:
        return p, 1.0
    return 2.0 * L - p, -1.0


def _extended_value(field, s, L):
    p, sign = _fold(s, L)
    return sign * float(field(p))


def _extended_integral(field, a, b, L, tol=1e-9):
    """Integral of the odd 2L-periodic extension over [a, b].

    The interval is split at reflection points; on [kL, (k+1)L] the
    extension is +/- field composed with an affine fold, so each piece
    reduces to an integral of the bare field over a subinterval of [0, L]:
    exact when the field is a catalog expression, adaptive Simpson else.
    """
    if b < a:
        return -_extended_integral(field, b, a, L, tol)
    total = 0.0
    exact = isinstance(field, Expression)
    lo = a
    guard = 0
    while lo < b - 1e-14 * max(1.0, abs(b), abs(a)) and guard < 10_000:
        guard += 1
        k = math.floor(lo / L + 1e-12)
        hi = min(b, (k + 1) * L)
        if hi <= lo:
            break
        if k % 2 == 0:
            p1, p2, sign = lo - k * L, hi - k * L, 1.0
        else:
            p1, p2, sign = (k + 1) * L - hi, (k + 1) * L - lo, -1.0
        if exact:
            seg = float(field.integral(p1, p2))
        else:
            seg = adaptive_simpson(lambda x: float(field(x)), p1, p2, tol)
        total += sign * seg
        lo = hi
    return total


def dalembert_fixed(L, u0, u1, f, t, x, tol=1e-9):
    """Exact solution of the fixed-interval problem at one point."""
    if not (0.0 <= x <= L):
        raise ValueError("x outside [0, L]")
    u = 0.5 * (_extended_value(u0, x + t, L) + _extended_value(u0, x - t, L))
    u += 0.5 * _extended_integral(u1, x - t, x + t, L, tol)
    if f is not None and not (hasattr(f, "is_zero") and f.is_zero()):
        def cone_slice(s):
            lo, hi = x - (t - s), x + (t - s)
            if hasattr(f, "space") and isinstance(f.space, Expression):
                inner = _extended_integral(f.space, lo, hi, L, tol)
                return float(f.time(s)) * inner
            return adaptive_simpson(lambda xi: _extended_value(lambda p: f(s, p), xi, L), lo, hi, tol)

        u += 0.5 * adaptive_simpson(cone_slice, 0.0, t, tol)
    return u


# --- debonding front ------------------------------------------------------


@dataclass
class CharScenario:
    """Data of the 1d coupled problem on the initial interval (0, l0)."""

    l0: float
    u0: object            # field with .deriv on [0, l0]
    u1: object
    kappa: object         # toughness field on [l0, inf)
    horizon: float
    forcing: object = None

    def front_data(self, xi):
        """u0'(xi) - u1(xi), the characteristic combination feeding the ODE."""
        return float(self.u0.deriv(xi)) - float(self.u1(xi))

    def check_front_compatibility(self, tol=1e-9):
        """Conditions at the front for an activated start: u0(l0) = 0,
        u0'(l0)^2 - u1(l0)^2 = 2 kappa(l0) and u0'/u1 < -1."""
        l0 = self.l0
        if abs(float(self.u0(l0))) > tol:
            raise CompatibilityViolated("u0 must vanish at the initial front")
        p0 = float(self.u0.deriv(l0))
        w0 = float(self.u1(l0))
        k0 = float(self.kappa(l0))
        if k0 <= 0:
            raise CompatibilityViolated("toughness must be positive at the front")
        if w0 == 0.0:
            if p0 * p0 > 2.0 * k0 + tol:
                raise CompatibilityViolated("resting start needs u0'(l0)^2 <= 2 kappa")
            return "rest"
        if abs(p0 * p0 - w0 * w0 - 2.0 * k0) > max(tol, 1e-9 * (1 + abs(k0))):
            raise CompatibilityViolated("activated start needs u0'^2 - u1^2 = 2 kappa at l0")
        if p0 / w0 >= -1.0:
            raise CompatibilityViolated("activated start needs u0'(l0)/u1(l0) < -1")
        return "activated"


@dataclass
class FrontCurve:
    times: np.ndarray
    position: np.ndarray
    speed: np.ndarray
    tstar: float

    def speed_at(self, t):
        return float(np.interp(t, self.times, self.speed))

    def position_at(self, t):
        return float(np.interp(t, self.times, self.position))


def front_ode_exact(sc: CharScenario, dt=1e-3, simpson_tol=1e-9, check=True):
    """Integrate the exact front ODE with RK4 up to min(T, T*).

    T* is the first time l(t) - t hits zero (located by step bisection);
    past it the backward characteristic no longer reads initial data and
    the formula is refused.
    """
    if check:
        sc.check_front_compatibility()

    def speed(t, ell):
        xi = ell - t
        if xi < -1e-12:
            return None
        xi = max(xi, 0.0)
        F = sc.front_data(xi)
        if sc.forcing is not None and not (hasattr(sc.forcing, "is_zero") and sc.forcing.is_zero()):
            F -= adaptive_simpson(lambda tau: float(sc.forcing(tau, tau - t + ell)), 0.0, t, simpson_tol)
        k = float(sc.kappa(ell))
        F2 = F * F
        return max((F2 - 2.0 * k) / (F2 + 2.0 * k), 0.0)

    def rk4_step(t, ell, step):
        s1 = speed(t, ell)
        if s1 is None:
            return None, None
        s2 = speed(t + 0.5 * step, ell + 0.5 * step * s1)
        s3 = speed(t + 0.5 * step, ell + 0.5 * step * s2) if s2 is not None else None
        s4 = speed(t + step, ell + step * s3) if s3 is not None else None
        if s2 is None or s3 is None or s4 is None:
            return None, None
        return ell + step / 6.0 * (s1 + 2 * s2 + 2 * s3 + s4), s1

    times = [0.0]
    ells = [sc.l0]
    speeds = [speed(0.0, sc.l0)]
    t, ell = 0.0, sc.l0
    tstar = sc.horizon
    while t < sc.horizon - 1e-14:
        step = min(dt, sc.horizon - t)
        nxt, _ = rk4_step(t, ell, step)
        if nxt is None or nxt - (t + step) < 0.0:
            # bisect the step fraction so that l(T*) - T* = 0 within one step
            lo, hi = 0.0, step
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                cand, _ = rk4_step(t, ell, mid)
                if cand is None or cand - (t + mid) < 0.0:
                    hi = mid
                else:
                    lo = mid
            cand, _ = rk4_step(t, ell, lo)
            if cand is not None and lo > 0:
                t, ell = t + lo, cand
                times.append(t)
                ells.append(ell)
                speeds.append(speed(t, ell) or 0.0)
            tstar = t
            break
        t, ell = t + step, nxt
        times.append(t)
        ells.append(ell)
        speeds.append(speed(t, ell))
    else:
        tstar = sc.horizon

    return FrontCurve(
        times=np.asarray(times),
        position=np.asarray(ells),
        speed=np.asarray(speeds, dtype=float),
        tstar=tstar,
    )


# --- boundary traces ------------------------------------------------------


def one_sided_derivative(values, spacing, side):
    """2nd-order one-sided derivative from three samples ending at the boundary.

    values are ordered inward-to-boundary: [f(b - 2 h), f(b - h), f(b)] for
    side='right', or [f(a), f(a + h), f(a + 2 h)] reversed for side='left'
    (pass values boundary-first there: [f(a), f(a+h), f(a+2h)]).
    """
    v = np.asarray(values, dtype=float)
    if len(v) < 3:
        raise TooFewSamples("one-sided stencil needs three samples")
    if side == "right":
        return (v[-3] - 4.0 * v[-2] + 3.0 * v[-1]) / (2.0 * spacing)
    if side == "left":
        return (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * spacing)
    raise ValueError("side must be 'left' or 'right'")


def front_trace_physical(u_eval, udot_eval, position, spacing, side="right"):
    """(du/dnu, u_dot) at a boundary point from physical-space evaluations.

    u_eval / udot_eval map an array of points to values; the normal
    derivative uses the one-sided stencil with the boundary value included.
    """
    sgn = 1.0 if side == "right" else -1.0
    pts = position - sgn * spacing * np.array([2.0, 1.0, 0.0])
    uv = np.asarray(u_eval(pts), dtype=float)
    # the sample ordering runs inward to the boundary along the outward
    # normal, so the stencil value is du/dnu directly
    p = one_sided_derivative(uv, spacing, "right")
    ud = float(np.asarray(udot_eval(np.array([position])), dtype=float)[0])
    return p, ud


def front_trace_grid(values, velocities, h, side="right", boundary_index=None):
    """(du/dnu, u_dot trace) at a grid boundary node.

    The normal derivative uses the Dirichlet boundary value plus the two
    nearest interior samples; the velocity trace is the interior limit,
    extrapolated quadratically from the three nearest interior nodes
    (the boundary node itself carries the clamped value 0).
    """
    v = np.asarray(values, dtype=float)
    vd = np.asarray(velocities, dtype=float)
    if boundary_index is None:
        boundary_index = len(v) - 1 if side == "right" else 0
    if side == "right":
        if boundary_index < 3:
            raise TooFewSamples("grid too coarse for a boundary stencil")
        window = v[boundary_index - 2: boundary_index + 1]
        dudx = one_sided_derivative(window, h, "right")
        wd = vd[boundary_index - 3: boundary_index]
        ud = quadratic_extrapolate(wd)
        return dudx, ud
    if boundary_index > len(v) - 4:
        raise TooFewSamples("grid too coarse for a boundary stencil")
    window = v[boundary_index: boundary_index + 3]
    dudx = one_sided_derivative(window, h, "left")
    wd = vd[boundary_index + 1: boundary_index + 4]
    ud = quadratic_extrapolate(wd[::-1])
    return -dudx, ud


def quadratic_extrapolate(values):
    """Extrapolate f(b) from [f(b-3h), f(b-2h), f(b-h)] at 2nd order."""
    v = np.asarray(values, dtype=float)
    if len(v) < 3:
        raise TooFewSamples("quadratic extrapolation needs three samples")
    return float(v[-3] - 3.0 * v[-2] + 3.0 * v[-1])
