"""Debonding flow rule and the coupled wave/front evolution.

The front speed comes from the maximum dissipation principle,

    omega = max { alpha in [0,1) : alpha kappa = alpha G_alpha },

equivalently the closed form  omega = sqrt(1 - 2 kappa / p^2)  when
p^2 > 2 kappa (else 0), or the [p - u_dot]^2 quotient form; a brute-force
scan over the alpha grid serves as the independent oracle.

The coupled solvers use explicit staggered splitting: extract the front
trace, apply the flow rule, advance the front by one Euler step, then
advance the transformed PDE on the reference grid with the map rebuilt
from the updated front.  The 1d exact ODE from the characteristics module
is the oracle for the constant-data scenario.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .characteristics import CharScenario, front_trace_grid
from .energy import EnergyLedger, _accumulate
from .errors import (
    BlowUp,
    CompatibilityViolated,
    HorizonReached,
    NonPositiveToughness,
    SupersonicStep,
)
from .expressions import Expression
from .galerkin import Trajectory, gauss_legendre_panels


def flow_rule(p, kappa, udot=None):
    """Scalar normal velocity of the front.

    With only the normal derivative p: sqrt(1 - 2 kappa / p^2) on the
    activated branch, 0 otherwise.  With the velocity trace u_dot: the
    quotient form ([p-u_dot]^2 - 2k) / ([p-u_dot]^2 + 2k), clipped at 0.
    Both land in [0, 1).
    """
    if kappa <= 0.0:
        raise NonPositiveToughness(f"kappa = {kappa}")
    if udot is None:
        p2 = p * p
        if p2 > 2.0 * kappa:
            return float(np.sqrt(1.0 - 2.0 * kappa / p2))
        return 0.0
    q = (p - udot) ** 2
    return max((q - 2.0 * kappa) / (q + 2.0 * kappa), 0.0)


def flow_rule_fixed_point(p, kappa, tol=1e-14, max_iter=10_000):
    """Quotient form evaluated at the self-consistent trace u_dot = -omega p."""
    om = 0.0
    for _ in range(max_iter):
        nxt = flow_rule(p, kappa, udot=-om * p)
        if abs(nxt - om) < tol:
            return nxt
        om = 0.5 * (om + nxt)
    return om


def mdp_oracle(p, kappa, M=10_000):
    """Brute-force maximum dissipation scan over an alpha grid.

    Accepts alpha when |alpha kappa - alpha G_alpha| is within half a
    grid cell of the local slope (the grid-induced slack), and returns
    the largest accepted alpha.  Independent of the closed forms above.
    """
    if kappa <= 0.0:
        raise NonPositiveToughness(f"kappa = {kappa}")
    if M < 100:
        raise ValueError("oracle grid needs at least 100 points")
    alpha = np.arange(M) / M
    h = alpha * kappa - alpha * 0.5 * (1.0 - alpha ** 2) * p * p
    slope = kappa - 0.5 * p * p + 1.5 * alpha ** 2 * p * p
    slack = 0.5 * np.abs(slope) / M + 1e-15
    ok = np.abs(h) <= slack
    return float(alpha[ok].max())


class Verdict(enum.Enum):
    SUBCRITICAL_REST = "SubcriticalRest"
    ACTIVATED_START = "ActivatedStart"
    INCOMPATIBLE = "Incompatible"


def compatibility_check(u0_prime, u1, kappa, tol=1e-9):
    """Classify initial data at a front point.

    Either u1 = 0 with (u0')^2 <= 2 kappa (rest), or u1 != 0 with
    (u0')^2 - u1^2 = 2 kappa and u0'/u1 < -1 (activated start).
    """
    if kappa <= 0.0:
        raise NonPositiveToughness(f"kappa = {kappa}")
    if abs(u1) <= tol:
        if u0_prime * u0_prime <= 2.0 * kappa + tol:
            return Verdict.SUBCRITICAL_REST
        return Verdict.INCOMPATIBLE
    if abs(u0_prime * u0_prime - u1 * u1 - 2.0 * kappa) <= max(tol, 1e-9 * (1 + kappa)):
        if u0_prime / u1 < -1.0:
            return Verdict.ACTIVATED_START
    return Verdict.INCOMPATIBLE


@dataclass
class GriffithReport:
    """Pointwise Griffith-criterion audit along a front history."""

    times: np.ndarray
    speed: np.ndarray
    G: np.ndarray
    kappa: np.ndarray
    activation: np.ndarray
    complementarity: np.ndarray
    tol: float

    def ok(self):
        subsonic = np.all((self.speed >= 0.0) & (self.speed < 1.0))
        bounded = np.all(self.G <= self.kappa + self.tol)
        comp = np.all(np.abs(self.complementarity) <= self.tol)
        return bool(subsonic and bounded and comp)


def griffith_check(times, speed, p, kappa_vals, tol=1e-3):
    """Evaluate the three Griffith conditions on a sampled front history."""
    times = np.asarray(times, dtype=float)
    speed = np.asarray(speed, dtype=float)
    p = np.asarray(p, dtype=float)
    kappa_vals = np.asarray(kappa_vals, dtype=float)
    G = 0.5 * (1.0 - speed ** 2) * p ** 2
    comp = speed * (G - kappa_vals)
    return GriffithReport(
        times=times, speed=speed, G=G, kappa=kappa_vals,
        activation=speed > 0.0, complementarity=comp, tol=tol,
    )


# --- coupled evolutions -----------------------------------------------------


@dataclass
class CoupledNumerics:
    n: int = 1024
    dt: float = None
    cfl: float = 0.45
    store_every: int = 8
    taper: float = 0.35       # fraction of the initial domain regularized at the fixed end
    max_speed_slack: float = 1e-12


@dataclass
class CoupledRun:
    front: "FrontHistory"
    traj: Trajectory
    ledger: EnergyLedger
    report: GriffithReport
    meta: dict = field(default_factory=dict)


@dataclass
class FrontHistory:
    times: np.ndarray
    position: np.ndarray
    speed: np.ndarray
    trace: np.ndarray         # normal derivative p at the front
    kappa: np.ndarray

    def speed_at(self, t):
        return float(np.interp(t, self.times, self.speed))

    def second_difference_bound(self):
        """C^{2,1} surrogate: bounded discrete second differences of the front."""
        if len(self.times) < 3:
            return 0.0
        dt = np.diff(self.times)
        dd = np.diff(self.position, 2) / (dt[:-1] * dt[1:])
        return float(np.max(np.abs(dd)))


def _fixed_end_taper(y, yc, u0_at_0, u1_at_0):
    """C^2 correction (H, theta) enforcing u(t,0) = 0 compatibility.

    Adding H to u0 and theta = H' to both u0' and u1 zeroes the data at
    the fixed end while leaving the right-moving invariant u0' - u1
    untouched everywhere: the correction rides the left-moving wave and
    cannot reach the front before it reflects, i.e. not before T*.
    H is the quintic Hermite with H(0) = -u0(0), H'(0) = -u1(0),
    H''(0) = 0 and a triple zero at yc.
    """
    tau = np.clip(np.asarray(y, dtype=float) / yc, 0.0, 1.0)
    h00 = 1.0 - 10.0 * tau ** 3 + 15.0 * tau ** 4 - 6.0 * tau ** 5
    h10 = tau - 6.0 * tau ** 3 + 8.0 * tau ** 4 - 3.0 * tau ** 5
    d00 = (-30.0 * tau ** 2 + 60.0 * tau ** 3 - 30.0 * tau ** 4) / yc
    d10 = (1.0 - 18.0 * tau ** 2 + 32.0 * tau ** 3 - 15.0 * tau ** 4) / yc
    H = -u0_at_0 * h00 - u1_at_0 * yc * h10
    theta = -u0_at_0 * d00 - u1_at_0 * yc * d10
    inside = tau < 1.0
    return np.where(inside, H, 0.0), np.where(inside, theta, 0.0)


def evolve_coupled_1d(sc: CharScenario, numerics: CoupledNumerics = None):
    """Staggered coupled evolution of the 1d debonding problem.

    Data are regularized near the fixed end x = 0 by a C^2 ramp over the
    first ``taper`` fraction of the domain, enforcing u(t,0) = 0
    compatibility without touching the front's domain of dependence for
    t <= (1 - taper) T*.  The front trace, flow rule, front advance and
    PDE advance alternate explicitly; the map is rebuilt from the updated
    front each step.
    """
    num = numerics or CoupledNumerics()
    verdict = compatibility_check(
        float(sc.u0.deriv(sc.l0)), float(sc.u1(sc.l0)), float(sc.kappa(sc.l0)))
    if verdict is Verdict.INCOMPATIBLE:
        raise CompatibilityViolated("coupled run requires compatible front data")

    l0 = sc.l0
    n = num.n
    h = l0 / n
    y = np.linspace(0.0, l0, n + 1)
    ym = 0.5 * (y[:-1] + y[1:])

    yc = max(num.taper * l0, 4 * h)
    u0v = np.asarray(sc.u0(y), dtype=float)
    u0p = np.asarray(sc.u0.deriv(y), dtype=float)
    u1v = np.asarray(sc.u1(y), dtype=float)
    H, theta = _fixed_end_taper(y, yc, float(sc.u0(0.0)), float(sc.u1(0.0)))
    v0 = u0v + H
    v0p = u0p + theta
    u1t = u1v + theta

    p0 = float(sc.u0.deriv(l0))
    om = flow_rule(p0, float(sc.kappa(l0)))
    v = v0.copy()
    vd = u1t + (om * y / l0) * v0p
    v[0] = v[-1] = 0.0
    vd[0] = vd[-1] = 0.0

    # reference characteristic speed is at most (1 + omega) l0 / ell <= 2
    dt = num.dt if num.dt is not None else num.cfl * h
    T = sc.horizon
    nsteps = int(np.ceil(T / dt - 1e-12))
    dt = T / nsteps

    times = [0.0]
    ells = [l0]
    speeds = [om]
    traces = [p0]
    kappas = [float(sc.kappa(l0))]
    st_times = [0.0]
    st_v = [v.copy()]
    st_vd = [vd.copy()]
    st_ell = [l0]

    ell = l0
    om_prev = om
    Bm = np.empty((3, n))
    an = np.empty((3, n + 1))
    bn = np.empty((3, n + 1))
    gn = np.empty((3, n + 1))
    out_v = np.empty((2, n + 1))
    out_vd = np.empty((2, n + 1))

    forcing = sc.forcing if sc.forcing is not None and not (
        hasattr(sc.forcing, "is_zero") and sc.forcing.is_zero()) else None

    for k in range(nsteps):
        t = k * dt
        # trace -> flow rule
        vy = front_trace_grid(v, vd, h, side="right")[0]
        p = vy * (l0 / ell)
        kap = float(sc.kappa(ell))
        om = flow_rule(p, kap)
        if om >= 1.0 - num.max_speed_slack:
            raise SupersonicStep(f"flow rule returned {om} at t = {t}")
        ldd = (om - om_prev) / dt if k > 0 else 0.0

        # PDE advance on [t, t+dt] with the map l(tau) = ell + om (tau - t)
        for j, frac in enumerate((0.0, 0.5, 1.0)):
            lt = ell + om * frac * dt
            Bm[j] = (l0 * l0 - (om * ym) ** 2) / (lt * lt)
            bn[j] = om * y / lt
            an[j] = -ldd * y / lt
            if forcing is None:
                gn[j] = 0.0
            else:
                gn[j] = np.asarray(forcing(t + frac * dt, (lt / l0) * y), dtype=float)
        out_v[0] = v
        out_vd[0] = vd
        status = kernels.fd_run(v, vd, h, dt, 1, Bm, an, bn, gn, 1, out_v, out_vd)
        if status < 0:
            raise BlowUp(f"coupled 1d run blew up at step {k}")
        ell = ell + dt * om
        om_prev = om

        times.append(t + dt)
        ells.append(ell)
        speeds.append(om)
        traces.append(p)
        kappas.append(kap)
        if (k + 1) % num.store_every == 0 or k + 1 == nsteps:
            st_times.append(t + dt)
            st_v.append(v.copy())
            st_vd.append(vd.copy())
            st_ell.append(ell)

    front = FrontHistory(
        times=np.asarray(times), position=np.asarray(ells),
        speed=np.asarray(speeds), trace=np.asarray(traces),
        kappa=np.asarray(kappas),
    )
    traj = Trajectory(
        kind="grid", times=np.asarray(st_times), values=np.asarray(st_v),
        velocities=np.asarray(st_vd), L=l0, x=y,
        front=np.asarray(st_ell), meta={"dt": dt, "n": n, "reference": True},
    )
    ledger = _coupled_ledger_1d(traj, sc, l0)
    report = griffith_check(front.times, front.speed, front.trace, front.kappa)
    return CoupledRun(front=front, traj=traj, ledger=ledger, report=report,
                      meta={"verdict": verdict.value, "dt": dt, "taper": yc})


def _coupled_ledger_1d(traj, sc, l0):
    """Kinetic/potential/work and debonding dissipation along a coupled run."""
    y = traj.x
    h = y[1] - y[0]
    nt = len(traj.times)
    kinetic = np.empty(nt)
    potential = np.empty(nt)
    work_rate = np.zeros(nt)
    debond = np.empty(nt)
    forcing = sc.forcing if sc.forcing is not None and not (
        hasattr(sc.forcing, "is_zero") and sc.forcing.is_zero()) else None
    speeds = np.gradient(traj.front, traj.times) if nt > 2 else np.zeros(nt)
    for i in range(nt):
        ell = traj.front[i]
        v = traj.values[i]
        vd = traj.velocities[i]
        vy = np.gradient(v, h, edge_order=2)
        om = speeds[i]
        ud = vd - (om * y / ell) * vy
        ur = vy * (l0 / ell)
        w = np.full(len(y), h)
        w[0] = w[-1] = 0.5 * h
        detJ = ell / l0
        kinetic[i] = 0.5 * np.sum(w * ud * ud) * detJ
        potential[i] = 0.5 * np.sum(w * ur * ur) * detJ
        if forcing is not None:
            work_rate[i] = np.sum(w * np.asarray(forcing(traj.times[i], (ell / l0) * y)) * ud) * detJ
        if isinstance(sc.kappa, Expression):
            debond[i] = float(sc.kappa.integral(l0, ell))
        else:
            xq, wq = gauss_legendre_panels(1.0, 8, 10)
            debond[i] = (ell - l0) * float(np.sum(wq * np.asarray(sc.kappa(l0 + (ell - l0) * xq))))
    work = _accumulate(traj.times, work_rate, "trap")
    led = EnergyLedger(times=traj.times.copy(), kinetic=kinetic, potential=potential,
                       work=work, debond_dissipation=debond,
                       meta={"coupled": True})
    E = kinetic + potential - work
    led.residual_moving = np.abs(E + debond - E[0])
    return led


# --- radial coupled evolution ------------------------------------------------


def evolve_coupled_radial(R, rho0, u0, u1, kappa, horizon,
                          numerics: CoupledNumerics = None, forcing=None, dim=2):
    """Coupled debonding on annuli { R - rho(t) < |x| < R } (radial symmetry).

    The radial reduction adds the drift -(dim-1)/r u_r to the 1d operator;
    the inner circle is the front, the outer one stays fixed.  Data are
    radial profiles of r on [R - rho0, R]; compatibility must hold at the
    inner circle (activated or resting start) and homogeneous conditions
    at the outer one.
    """
    if dim != 2:
        raise ValueError("the radial coupled solver is implemented for dim 2")
    num = numerics or CoupledNumerics(taper=0.0)
    p0 = -float(u0.deriv(R - rho0))  # outward normal at the inner circle is -e_r
    verdict = compatibility_check(p0, float(u1(R - rho0)), float(kappa(R - rho0)))
    if verdict is Verdict.INCOMPATIBLE:
        raise CompatibilityViolated("radial data incompatible at the inner circle")

    n = num.n
    h = rho0 / n
    y = np.linspace(R - rho0, R, n + 1)
    ym = 0.5 * (y[:-1] + y[1:])

    om = flow_rule(p0, float(kappa(R - rho0)))
    v = np.asarray(u0(y), dtype=float)
    # v_dot(0) = u1 + u0' Phi_dot(0, .), Phi_dot = -(om/rho0)(R - y)
    vd = np.asarray(u1(y), dtype=float) - (om / rho0) * (R - y) * np.asarray(u0.deriv(y), dtype=float)
    v[0] = v[-1] = 0.0
    vd[0] = vd[-1] = 0.0

    dt = num.dt if num.dt is not None else num.cfl * h
    nsteps = int(np.ceil(horizon / dt - 1e-12))
    dt = horizon / nsteps

    times = [0.0]
    rhos = [rho0]
    speeds = [om]
    traces = [p0]
    kappas = [float(kappa(R - rho0))]
    st = {"times": [0.0], "v": [v.copy()], "vd": [vd.copy()], "rho": [rho0]}

    rho = rho0
    om_prev = om
    Bm = np.empty((3, n))
    an = np.empty((3, n + 1))
    bn = np.empty((3, n + 1))
    gn = np.zeros((3, n + 1))
    out_v = np.empty((2, n + 1))
    out_vd = np.empty((2, n + 1))

    for k in range(nsteps):
        t = k * dt
        vyl = front_trace_grid(v, vd, h, side="left")[0]  # returns -v_y at left end
        s = rho / rho0
        p = vyl / s  # du/dnu = -u_r = -v_y/s at the inner circle
        kap = float(kappa(R - rho))
        om = flow_rule(p, kap)
        if om >= 1.0 - num.max_speed_slack:
            raise SupersonicStep(f"flow rule returned {om} at t = {t}")
        rdd = (om - om_prev) / dt if k > 0 else 0.0

        for j, frac in enumerate((0.0, 0.5, 1.0)):
            rt = rho + om * frac * dt
            st_ = rt / rho0
            sd = om / rho0
            sdd = rdd / rho0
            phin = R - st_ * (R - y)
            phim = R - st_ * (R - ym)
            Bm[j] = 1.0 / st_ ** 2 - ((R - ym) * sd / st_) ** 2
            bn[j] = -(R - y) * sd / st_
            an[j] = (R - y) * sdd / st_ - (dim - 1.0) / (phin * st_)
            if forcing is not None:
                gn[j] = np.asarray(forcing(t + frac * dt, phin), dtype=float)
        out_v[0] = v
        out_vd[0] = vd
        status = kernels.fd_run(v, vd, h, dt, 1, Bm, an, bn, gn, 1, out_v, out_vd)
        if status < 0:
            raise BlowUp(f"radial coupled run blew up at step {k}")
        rho = rho + dt * om
        om_prev = om
        if rho >= R - 4 * h:
            raise HorizonReached(f"front reached the outer circle region at t = {t + dt}")

        times.append(t + dt)
        rhos.append(rho)
        speeds.append(om)
        traces.append(p)
        kappas.append(kap)
        if (k + 1) % num.store_every == 0 or k + 1 == nsteps:
            st["times"].append(t + dt)
            st["v"].append(v.copy())
            st["vd"].append(vd.copy())
            st["rho"].append(rho)

    front = FrontHistory(
        times=np.asarray(times), position=np.asarray(rhos),
        speed=np.asarray(speeds), trace=np.asarray(traces),
        kappa=np.asarray(kappas),
    )
    traj = Trajectory(
        kind="grid", times=np.asarray(st["times"]), values=np.asarray(st["v"]),
        velocities=np.asarray(st["vd"]), L=rho0, x=y,
        front=np.asarray(st["rho"]),
        meta={"dt": dt, "n": n, "radial": True, "R": R, "dim": dim},
    )
    ledger = _coupled_ledger_radial(traj, R, rho0, kappa, forcing, dim)
    report = griffith_check(front.times, front.speed, front.trace, front.kappa)
    return CoupledRun(front=front, traj=traj, ledger=ledger, report=report,
                      meta={"verdict": verdict.value, "dt": dt})


def _coupled_ledger_radial(traj, R, rho0, kappa, forcing, dim):
    y = traj.x
    h = y[1] - y[0]
    nt = len(traj.times)
    kinetic = np.empty(nt)
    potential = np.empty(nt)
    work_rate = np.zeros(nt)
    debond = np.empty(nt)
    angular = 2.0 * np.pi
    speeds = np.gradient(traj.front, traj.times) if nt > 2 else np.zeros(nt)
    xq, wq = gauss_legendre_panels(1.0, 8, 10)
    for i in range(nt):
        rho = traj.front[i]
        s = rho / rho0
        sd = speeds[i] / rho0
        v = traj.values[i]
        vd = traj.velocities[i]
        vy = np.gradient(v, h, edge_order=2)
        r_phys = R - s * (R - y)
        ud = vd + ((R - y) * sd / s) * vy
        ur = vy / s
        w = np.full(len(y), h)
        w[0] = w[-1] = 0.5 * h
        vol = angular * r_phys * s  # 2 pi r dr with dr = s dy
        kinetic[i] = 0.5 * np.sum(w * ud * ud * vol)
        potential[i] = 0.5 * np.sum(w * ur * ur * vol)
        if forcing is not None:
            work_rate[i] = np.sum(w * np.asarray(forcing(traj.times[i], r_phys)) * ud * vol)
        # newly debonded ring R - rho < r < R - rho0
        a, b = R - rho, R - rho0
        rr = a + (b - a) * xq
        debond[i] = (b - a) * float(np.sum(wq * np.asarray(kappa(rr)) * angular * rr))
    work = _accumulate(traj.times, work_rate, "trap")
    led = EnergyLedger(times=traj.times.copy(), kinetic=kinetic, potential=potential,
                       work=work, debond_dissipation=debond, meta={"coupled": "radial"})
    E = kinetic + potential - work
    led.residual_moving = np.abs(E + debond - E[0])
    return led
