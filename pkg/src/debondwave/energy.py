"""Energy functionals, balances and the dynamic energy release rate.

Quantities tracked per stored time on the moving domain:

    kinetic   = 1/2 ||u_dot||^2_{L2(Omega_t)}
    potential = 1/2 ||grad u||^2_{L2(Omega_t)}
    work      = int_0^t <f, u_dot>
    boundary_dissipation = int_0^t int_{bdry} (omega/2)(1 - omega^2) (du/dnu)^2
    debond_dissipation   = int_0^t int_{bdry} omega kappa  ( = int_{Omega_t \ Omega_0} kappa )

Spatial integrals are pulled back to the reference domain with weight
det DPhi; boundary integrals use the per-face parametrization, never a
space-time mesh.  Normal derivatives at the boundary come from one-sided
stencils.  Time accumulation defaults to the forward rectangle rule,
matching the first-order convergence the moving balance exhibits; the
fixed-domain remainder uses trapezoid.

The release-rate density is G_alpha = (1 - alpha^2) p^2 / 2 with the
equivalent form (1-omega)/(1+omega) [p - u_dot]^2 / 2 cross-checked
whenever the pair (p, u_dot) is kinematically consistent.
"""

from dataclasses import dataclass, field

import numpy as np

from .characteristics import one_sided_derivative
from .errors import SupersonicSpeed
from .galerkin import gauss_legendre_panels
from .motion import boundary_kinematics


@dataclass
class EnergyLedger:
    times: np.ndarray
    kinetic: np.ndarray
    potential: np.ndarray
    work: np.ndarray
    boundary_dissipation: np.ndarray = None
    debond_dissipation: np.ndarray = None
    residual_moving: np.ndarray = None
    residual_fixed: np.ndarray = None
    G_total: np.ndarray = None
    meta: dict = field(default_factory=dict)

    def columns(self):
        cols = [("t", self.times), ("kinetic", self.kinetic),
                ("potential", self.potential), ("work", self.work)]
        for name in ("boundary_dissipation", "debond_dissipation",
                     "residual_moving", "residual_fixed", "G_total"):
            arr = getattr(self, name)
            if arr is not None:
                cols.append((name, arr))
        return cols


def _accumulate(times, rates, rule):
    """Cumulative time integral of a sampled rate."""
    out = np.zeros_like(rates)
    dt = np.diff(times)
    if rule == "rect":
        out[1:] = np.cumsum(dt * rates[:-1])
    elif rule == "trap":
        out[1:] = np.cumsum(0.5 * dt * (rates[:-1] + rates[1:]))
    else:
        raise ValueError("rule must be 'rect' or 'trap'")
    return out


def _moving_faces(kins):
    """Faces with nonvanishing normal speed anywhere."""
    return [fk for fk in kins if np.max(np.abs(fk.omega)) > 1e-13]


def front_normal_derivative(traj, fam, i, face_name="right", offset=None):
    """du/dnu at the moving end of a 1d reference trajectory.

    Uses the one-sided stencil on v at the three nearest samples (grid
    nodes, or resolution-matched offsets for modal trajectories), then the
    pushforward factor DPsi(t, Phi).
    """
    L = traj.L
    t = traj.times[i]
    if traj.kind == "grid":
        h = traj.x[1] - traj.x[0]
        vy = one_sided_derivative(traj.values[i][-3:], h, "right")
    else:
        h = offset if offset is not None else L / (2.0 * traj.basis.m)
        pts = np.array([L - 2 * h, L - h, L])
        v, _, _ = traj.eval_index(i, pts)
        v[-1] = 0.0
        vy = one_sided_derivative(v, h, "right")
    K = fam.dpsi_at_phi(t, np.array([[L]]))[0, 0, 0]
    return vy * K  # outward normal is +1 at the right end


def ledger_transformed(traj, fam, forcing=None, kappa=None, problem=None,
                       time_rule="rect", panels=None, nodes=10,
                       resolution=64, trace_offset=None):
    """Energy ledger for a transformed-solver trajectory on a 1d family."""
    if fam.dim != 1:
        raise ValueError("ledger_transformed is the 1d path")
    L = traj.L
    panels = panels or max(16, (traj.basis.m if traj.kind == "modal" else 16))
    yq, wq = gauss_legendre_panels(L, panels, nodes)
    nt = len(traj.times)

    kinetic = np.empty(nt)
    potential = np.empty(nt)
    work_rate = np.empty(nt)
    bdry_rate = np.empty(nt)
    debond_rate = np.empty(nt)
    Gtot = np.full(nt, np.nan)

    faces = fam.reference.boundary_faces(resolution)
    for i, t in enumerate(traj.times):
        v, vd, vy = traj.eval_index(i, yq)
        Y = yq.reshape(-1, 1)
        detJ = fam.det_dphi(t, Y)
        psd = fam.psi_dot_at_phi(t, Y)[:, 0]
        K = fam.dpsi_at_phi(t, Y)[:, 0, 0]
        ud = vd + vy * psd
        gu = vy * K
        kinetic[i] = 0.5 * np.sum(wq * ud * ud * detJ)
        potential[i] = 0.5 * np.sum(wq * gu * gu * detJ)
        if forcing is None:
            work_rate[i] = 0.0
        else:
            xq = fam.phi(t, Y)[:, 0]
            work_rate[i] = np.sum(wq * np.asarray(forcing(t, xq), dtype=float) * ud * detJ)

        kins = boundary_kinematics(fam, t, faces=faces)
        brate = 0.0
        drate = 0.0
        den = 0.0
        for fk in kins:
            if np.max(np.abs(fk.omega)) <= 1e-13 and kappa is None:
                continue
            if fk.name == "right":
                # the moving end of the built-in 1d families
                p = front_normal_derivative(traj, fam, i, offset=trace_offset)
                pvals = np.full(len(fk.omega), p)
            else:
                pvals = np.zeros(len(fk.omega))
            brate += np.sum(fk.weights * 0.5 * fk.omega * (1.0 - fk.omega ** 2) * pvals ** 2)
            den += np.sum(fk.weights * fk.omega)
            if kappa is not None:
                kx = np.asarray(kappa(fk.x[:, 0]), dtype=float)
                drate += np.sum(fk.weights * fk.omega * kx)
        bdry_rate[i] = brate
        debond_rate[i] = drate
        Gtot[i] = brate / den if den > 1e-13 else np.nan

    work = _accumulate(traj.times, work_rate, time_rule)
    bdry = _accumulate(traj.times, bdry_rate, time_rule)
    debond = _accumulate(traj.times, debond_rate, time_rule)
    led = EnergyLedger(
        times=traj.times.copy(), kinetic=kinetic, potential=potential, work=work,
        boundary_dissipation=bdry, debond_dissipation=debond if kappa is not None else None,
        G_total=Gtot,
        meta={"time_rule": time_rule, "panels": panels, "nodes": nodes},
    )
    led.residual_moving = balance_residual_moving(led)
    if problem is not None:
        led.residual_fixed = balance_residual_fixed(traj, problem, panels=panels, nodes=nodes)
    return led


def balance_residual_moving(led: EnergyLedger):
    """|kinetic + potential + boundary_dissipation - initial - work| per time."""
    e0 = led.kinetic[0] + led.potential[0]
    bd = led.boundary_dissipation if led.boundary_dissipation is not None else 0.0
    return np.abs(led.kinetic + led.potential + bd - e0 - led.work)


def balance_residual_fixed(traj, problem, panels=None, nodes=10):
    """Fixed-domain balance with remainder, per stored time.

    residual(t) = | 1/2||v'||^2 + 1/2<B grad v, grad v> - initial - R(t) |,
    R(t) = int_0^t ( 1/2<B' grad v, grad v> - <a grad v, v'> - <div b, v'^2>
                     + <g, v'> ).
    """
    L = traj.L
    panels = panels or max(16, (traj.basis.m if traj.kind == "modal" else 16))
    yq, wq = gauss_legendre_panels(L, panels, nodes)
    nt = len(traj.times)
    lhs = np.empty(nt)
    rate = np.empty(nt)
    eps = problem.dt_step
    T = problem.fam.horizon
    for i, t in enumerate(traj.times):
        v, vd, vy = traj.eval_index(i, yq)
        B, a, b, g = problem.line(t, yq)
        if t - eps < 0.0:
            Bp, _, _, _ = problem.line(t + eps, yq)
            B0, _, _, _ = problem.line(t, yq)
            Bpp, _, _, _ = problem.line(t + 2 * eps, yq)
            Bdot = (-3.0 * B0 + 4.0 * Bp - Bpp) / (2.0 * eps)
        elif t + eps > T:
            Bm, _, _, _ = problem.line(t - eps, yq)
            B0, _, _, _ = problem.line(t, yq)
            Bmm, _, _, _ = problem.line(t - 2 * eps, yq)
            Bdot = (3.0 * B0 - 4.0 * Bm + Bmm) / (2.0 * eps)
        else:
            Bp, _, _, _ = problem.line(t + eps, yq)
            Bm, _, _, _ = problem.line(t - eps, yq)
            Bdot = (Bp - Bm) / (2.0 * eps)
        divb = problem.div_b(t, yq)
        lhs[i] = 0.5 * np.sum(wq * vd * vd) + 0.5 * np.sum(wq * B * vy * vy)
        rate[i] = (0.5 * np.sum(wq * Bdot * vy * vy)
                   - np.sum(wq * a * vy * vd)
                   - np.sum(wq * divb * vd * vd)
                   + np.sum(wq * g * vd))
    R = _accumulate(traj.times, rate, "trap")
    return np.abs(lhs - lhs[0] - R)


def ledger_physical(traj, fam=None, forcing=None, time_rule="trap"):
    """Kinetic/potential/work ledger for physical-grid (cylinder) runs.

    Uses the scheme-consistent discrete energy: trapezoid kinetic on the
    nodes plus cell-slope potential.
    """
    x = traj.x
    h = x[1] - x[0]
    nt = len(traj.times)
    kinetic = np.empty(nt)
    potential = np.empty(nt)
    work_rate = np.empty(nt)
    for i in range(nt):
        vd = traj.velocities[i]
        dv = np.diff(traj.values[i])
        kinetic[i] = 0.5 * h * float(np.sum(vd * vd))
        potential[i] = 0.5 / h * float(np.sum(dv * dv))
        work_rate[i] = 0.0 if forcing is None else h * float(
            np.sum(np.asarray(forcing(traj.times[i], x), dtype=float) * vd))
    work = _accumulate(traj.times, work_rate, time_rule)
    led = EnergyLedger(times=traj.times.copy(), kinetic=kinetic,
                       potential=potential, work=work,
                       meta={"time_rule": time_rule})
    return led


# --- release rate ----------------------------------------------------------


def release_rate_density(p, udot=None, alpha=0.0, tol=1e-10):
    """G_alpha = (1 - alpha^2) p^2 / 2, cross-checked against the
    (1-a)/(1+a) [p - u_dot]^2 / 2 form on kinematically consistent pairs."""
    if not (0.0 <= alpha < 1.0):
        raise SupersonicSpeed(f"front speed {alpha} outside [0, 1)")
    G = 0.5 * (1.0 - alpha * alpha) * p * p
    if udot is not None and abs(udot + alpha * p) <= 1e-8 * (1.0 + abs(p)):
        alt = 0.5 * (1.0 - alpha) / (1.0 + alpha) * (p - udot) ** 2
        if abs(alt - G) > tol * max(1.0, abs(G)):
            raise AssertionError(
                f"release-rate forms disagree: {G} vs {alt} at alpha={alpha}")
    return G


def total_release_rate(omega, p, weights):
    """Boundary-integrated release rate; None when int omega <= 0.

    G(t) = int (omega/2)(1-omega^2) p^2 / int omega, the paper's quotient,
    defined only for growing boundaries.
    """
    omega = np.asarray(omega, dtype=float)
    p = np.asarray(p, dtype=float)
    weights = np.asarray(weights, dtype=float)
    den = float(np.sum(weights * omega))
    if den <= 0.0:
        return None
    num = float(np.sum(weights * 0.5 * omega * (1.0 - omega ** 2) * p ** 2))
    return num / den


# --- measure identity -------------------------------------------------------


def measure_identity_residual(fam, t=None, nt=201, resolution=128):
    """| |Omega_t| - |Omega_0| - int_0^t int_bdry omega | via Simpson in time."""
    from .motion import boundary_flux

    t = fam.horizon if t is None else t
    if nt % 2 == 0:
        nt += 1
    ts = np.linspace(0.0, t, nt)
    flux = np.array([boundary_flux(fam, s, resolution=resolution) for s in ts])
    h = ts[1] - ts[0]
    w = np.ones(nt)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    integral = h / 3.0 * float(np.sum(w * flux))
    geometric = fam.domain_measure(t) - fam.domain_measure(0.0)
    return abs(geometric - integral)
