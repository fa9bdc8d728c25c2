"""Integration of chart vector fields, return maps and periodic orbits.

Every field is autonomous on its chart; time-periodic forcing is handled by
carrying the time as an extra angle coordinate, so the return map to a
section {t = const} is the period map.  Integration uses the embedded 5(4)
Runge-Kutta pair from scipy; section crossings are located here by
bisection and Newton polishing on the crossing time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .contact import BindingChart, binding_rotation_rate, reeb_at
from .openbook import AbstractOpenBook

__all__ = [
    "IntegrationError",
    "NoReturnError",
    "DegenerateOrbitError",
    "ContinuationError",
    "ChartField",
    "Trajectory",
    "Section",
    "PeriodicOrbit",
    "TransversalityReport",
    "integrate",
    "return_map",
    "find_periodic_orbit",
    "mapping_torus_field",
    "binding_torus_field",
    "binding_normal_field",
    "trig_perturbation",
    "continue_binding_orbit",
    "orbit_displacement",
    "transversality_margin",
    "normal_quadratic_form",
    "estimate_delta_threshold",
]

RTOL = 1e-9
ATOL = 1e-10


class IntegrationError(RuntimeError):
    """Step size underflow or exit from the chart domain."""


class NoReturnError(RuntimeError):
    """No crossing of the section before the time cap."""


class DegenerateOrbitError(RuntimeError):
    """Return map Jacobian has an eigenvalue at 1."""


class ContinuationError(RuntimeError):
    def __init__(self, message, residual=np.nan):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class ChartField:
    """Vector field on a chart.

    Parameters
    ----------
    rhs : callable
        ``rhs(y) -> dy`` for a state vector y.
    dim : int
    chart : str
        Chart tag recorded on trajectories.
    periods : dict
        Angle coordinates and their periods, used for wrapping differences.
    domain : callable, optional
        ``domain(Y) -> bool array`` on states stacked along the last axis.
    transition : tuple of callables, optional
        ``(event, jump)``: when ``event(y)`` crosses zero upwards the state is
        replaced by ``jump(y)`` (a chart overlap map).
    """

    rhs: Callable[[np.ndarray], np.ndarray]
    dim: int
    chart: str = "chart"
    periods: dict = field(default_factory=dict)
    domain: Callable[[np.ndarray], np.ndarray] | None = None
    transition: tuple | None = None

    def __call__(self, y):
        return np.asarray(self.rhs(np.asarray(y, float)), float)

    def reversed(self) -> "ChartField":
        """Field with time reversed (transitions are not reversible here)."""
        if self.transition is not None:
            raise ValueError("cannot reverse a field with chart transitions")
        f = self.rhs
        return ChartField(lambda y: -np.asarray(f(y)), self.dim, self.chart,
                          self.periods, self.domain)

    def wrap(self, d):
        """Wrap angle components of a difference into [-period/2, period/2)."""
        d = np.array(d, float)
        for i, p in self.periods.items():
            d[..., i] = (d[..., i] + 0.5 * p) % p - 0.5 * p
        return d


@dataclass
class Trajectory:
    """Time-ordered samples with piecewise dense output."""

    t: np.ndarray
    y: np.ndarray
    chart: str
    rtol: float
    atol: float
    segments: list = field(default_factory=list, repr=False)
    transitions: int = 0

    def __call__(self, t):
        t = np.atleast_1d(np.asarray(t, float))
        out = np.empty((t.size, self.y.shape[1]))
        for k, tk in enumerate(t):
            for t0, t1, sol in self.segments:
                if t0 <= tk <= t1:
                    out[k] = sol(tk)
                    break
            else:
                raise ValueError(f"time {tk} outside trajectory")
        return out

    @property
    def end(self) -> np.ndarray:
        return self.y[-1]


def integrate(
    fld: ChartField,
    x0,
    t_end: float,
    rtol: float = RTOL,
    atol: float = ATOL,
    max_step: float = np.inf,
) -> Trajectory:
    """Adaptive RK5(4) trajectory from time 0 to t_end (negative runs backward).

    Raises
    ------
    IntegrationError
        On step size underflow or when a sample leaves the chart domain.
    """
    if not (rtol > 0 and atol > 0):
        raise ValueError("tolerances must be positive")
    y = np.asarray(x0, float).copy()
    if y.shape != (fld.dim,):
        raise ValueError(f"state must have shape ({fld.dim},)")
    if fld.domain is not None and not np.all(fld.domain(y)):
        raise IntegrationError("initial point outside the chart domain")
    events = []
    if fld.transition is not None:
        ev = lambda t, s: fld.transition[0](s)  # noqa: E731
        ev.terminal, ev.direction = True, 1.0
        events.append(ev)
    if fld.domain is not None:
        # indicator event: stops the solver as soon as a step leaves the domain
        out = lambda t, s: 1.0 if np.all(fld.domain(s)) else -1.0  # noqa: E731
        out.terminal, out.direction = True, -1.0
        events.append(out)
    events = events or None
    t, ts, ys, segs, jumps = 0.0, [0.0], [y.copy()], [], 0
    sign = 1.0 if t_end >= 0 else -1.0
    while sign * (t_end - t) > 0:
        sol = solve_ivp(lambda _t, s: fld(s), (t, t_end), y, method="RK45",
                        rtol=rtol, atol=atol, max_step=max_step, events=events,
                        dense_output=True)
        if sol.status == -1:
            raise IntegrationError(f"integration failed: {sol.message}")
        if fld.domain is not None and not np.all(fld.domain(sol.y.T)):
            raise IntegrationError("trajectory left the chart domain")
        lo, hi = sorted((sol.t[0], sol.t[-1]))
        segs.append((lo, hi, sol.sol))
        ts.extend(sol.t[1:])
        ys.extend(sol.y.T[1:])
        t, y = sol.t[-1], sol.y[:, -1].copy()
        if sol.status == 1 and fld.domain is not None and sol.t_events[-1].size:
            raise IntegrationError("trajectory left the chart domain")
        if sol.status == 1:
            y = np.asarray(fld.transition[1](y), float)
            ts.append(t)
            ys.append(y.copy())
            segs.append((t, t, lambda _t, yy=y.copy(): yy))
            jumps += 1
            if jumps > 10_000:
                raise IntegrationError("too many chart transitions")
    return Trajectory(np.asarray(ts), np.asarray(ys), fld.chart, rtol, atol, segs, jumps)


@dataclass(frozen=True)
class Section:
    """Hypersurface {y[index] = value}; angle sections use the given period."""

    index: int
    value: float = 0.0
    period: float | None = None
    direction: int = 1

    def g(self, y):
        y = np.asarray(y, float)
        if self.period is None:
            return y[..., self.index] - self.value
        return np.sin(2 * np.pi * (y[..., self.index] - self.value) / self.period)

    def on_branch(self, y):
        """For angle sections, reject the antipodal zero of the sine."""
        if self.period is None:
            return True
        return np.cos(2 * np.pi * (y[..., self.index] - self.value) / self.period) > 0

    def dg(self, y, v):
        y = np.asarray(y, float)
        if self.period is None:
            return v[self.index]
        w = 2 * np.pi / self.period
        return w * np.cos(w * (y[self.index] - self.value)) * v[self.index]

    def free(self, dim) -> list:
        return [i for i in range(dim) if i != self.index]


def _period_estimate(fld, section, x0):
    if section.period is None:
        raise ValueError("a period estimate is required for a linear section")
    speed = abs(fld(x0)[section.index])
    if speed == 0:
        raise NoReturnError("field is tangent to the section family at the start")
    return section.period / speed


def _locate(fld, section, sol, ta, tb, ga):
    """Bisection then Newton on the dense interpolant."""
    for _ in range(60):
        tm = 0.5 * (ta + tb)
        gm = section.g(sol(tm))
        if np.sign(gm) == np.sign(ga):
            ta, ga = tm, gm
        else:
            tb = tm
        if abs(tb - ta) < 1e-7 * max(1.0, abs(tb)):
            break
    t = 0.5 * (ta + tb)
    for _ in range(4):
        y = sol(t)
        dg = section.dg(y, fld(y))
        if dg == 0:
            break
        t -= section.g(y) / dg
    return t


def return_map(
    fld: ChartField,
    section: Section,
    x0,
    rtol: float = RTOL,
    atol: float = ATOL,
    period_estimate: float | None = None,
):
    """First positive-time return of x0 to the section.

    Returns
    -------
    point : ndarray
    time : float

    Raises
    ------
    NoReturnError
        When no crossing happens within 50 times the period estimate.
    """
    x0 = np.asarray(x0, float)
    est = period_estimate if period_estimate is not None else _period_estimate(fld, section, x0)
    cap = 50.0 * est
    t_min = 1e-9 * est
    t0, y0 = 0.0, x0.copy()
    chunk = 1.25 * est
    while t0 < cap:
        t1 = min(t0 + chunk, cap)
        traj = integrate(fld, y0, t1 - t0, rtol, atol)
        for lo, hi, sol in traj.segments:
            if hi <= lo:
                continue
            ss = np.linspace(lo, hi, 9)
            grid = np.unique(np.concatenate([ss, traj.t[(traj.t >= lo) & (traj.t <= hi)]]))
            gv = np.array([section.g(sol(s)) for s in grid])
            for k in range(len(grid) - 1):
                if t0 + grid[k + 1] <= t_min:
                    continue
                a, b = gv[k], gv[k + 1]
                if a * b > 0 or a == b:
                    continue
                if np.sign(b - a) != section.direction:
                    continue
                tc = _locate(fld, section, sol, grid[k], grid[k + 1], a)
                yc = sol(tc)
                if t0 + tc <= t_min or not section.on_branch(yc):
                    continue
                y_start = sol(lo)
                return _polish(fld, section, y_start, t0 + lo, tc - lo, rtol, atol)
        t0, y0 = t1, traj.end
    raise NoReturnError(f"no return to the section within time {cap:.3g}")


def _polish(fld, section, y_start, t_start, dt, rtol, atol):
    """Re-integrate to the crossing and refine it with Newton steps in time."""
    y = integrate(fld, y_start, dt, rtol, atol).end
    t = t_start + dt
    for _ in range(3):
        v = fld(y)
        dg = section.dg(y, v)
        if dg == 0:
            break
        step = -section.g(y) / dg
        if abs(step) < 1e-15 * max(1.0, abs(t)):
            break
        y = integrate(fld, y, step, rtol, atol).end if step != 0 else y
        t += step
    return y, t


@dataclass
class PeriodicOrbit:
    """Periodic orbit anchored on a section.

    ``period`` is in the time of the field that produced it; ``multipliers``
    are the eigenvalues of the return map linearization.
    """

    anchor: np.ndarray
    period: float
    multipliers: np.ndarray
    residual: float
    block: str | None = None
    jacobian: np.ndarray | None = None
    trajectory: Trajectory | None = field(default=None, repr=False)

    @property
    def product(self) -> float:
        return float(np.real(np.prod(self.multipliers)))


def _reduced_map(fld, section, est, rtol, atol):
    free = section.free(fld.dim)

    def full(z):
        y = np.empty(fld.dim)
        y[free] = z
        y[section.index] = section.value
        return y

    def pm(z):
        y, t = return_map(fld, section, full(z), rtol, atol, est)
        return y[free], t

    return free, full, pm


def _fd_jacobian(pm, z, wrap, step):
    n = z.size
    jac = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = step
        jac[:, j] = wrap(pm(z + e)[0] - pm(z - e)[0]) / (2 * step)
    return jac


def find_periodic_orbit(
    fld: ChartField,
    seed,
    section: Section,
    tol: float = 1e-10,
    rtol: float = RTOL,
    atol: float = ATOL,
    period_estimate: float | None = None,
    max_iter: int = 30,
    block: str | None = None,
    backward_multipliers: bool = True,
) -> PeriodicOrbit:
    """Newton iteration on P(x) - x for the return map P of the section.

    Floquet multipliers come from a central-difference Jacobian.  With
    ``backward_multipliers`` the contracting multipliers of a hyperbolic
    orbit are taken as reciprocals of the expanding multipliers of the
    inverse map, which is better conditioned than reading them off the
    forward Jacobian.

    Raises
    ------
    DegenerateOrbitError
        If the Jacobian has an eigenvalue within 1e-6 of 1.
    ContinuationError
        If Newton fails to converge.
    """
    seed = np.asarray(seed, float)
    est = period_estimate if period_estimate is not None else _period_estimate(fld, section, seed)
    free, full, pm = _reduced_map(fld, section, est, rtol, atol)
    sub = {k: p for k, p in fld.periods.items() if k in free}
    idx = {k: free.index(k) for k in sub}

    def wrap(d):
        d = np.array(d, float)
        for k, p in sub.items():
            i = idx[k]
            d[..., i] = (d[..., i] + 0.5 * p) % p - 0.5 * p
        return d

    z = seed[free].copy()
    scale = max(1.0, float(np.max(np.abs(z))))
    step = max(tol, rtol) ** (1.0 / 3.0) * scale
    res = np.inf
    for _ in range(max_iter):
        pz, period = pm(z)
        f = wrap(pz - z)
        res = float(np.max(np.abs(f)))
        jac = _fd_jacobian(pm, z, wrap, step)
        ev = np.linalg.eigvals(jac)
        if np.any(np.abs(ev - 1.0) < 1e-6):
            raise DegenerateOrbitError(
                f"return map has eigenvalue 1 within 1e-6 (eigenvalues {ev}); orbit not isolated"
            )
        if res < tol:
            break
        dz = np.linalg.solve(jac - np.eye(z.size), -f)
        z = z + dz
        if not np.all(np.isfinite(z)):
            raise ContinuationError("Newton iteration diverged", res)
    else:
        raise ContinuationError(f"Newton did not converge, residual {res:.3e}", res)
    mult = np.sort_complex(ev)
    if backward_multipliers and np.all(np.abs(ev.imag) < 1e-12) and fld.transition is None:
        bfld = fld.reversed()
        bsec = Section(section.index, section.value, section.period, -section.direction)
        _, _, bpm = _reduced_map(bfld, bsec, est, rtol, atol)
        bjac = _fd_jacobian(bpm, z, wrap, step)
        bev = np.linalg.eigvals(bjac).real
        fwd = np.sort(ev.real)
        big_back = np.sort(np.abs(bev))
        # contracting forward multipliers are the reciprocals of expanding backward ones
        small = fwd[np.abs(fwd) < 1]
        if small.size and big_back[-1] > 1:
            fwd[np.abs(fwd) < 1] = np.sign(small) / big_back[::-1][: small.size]
        mult = fwd.astype(complex)
    y0 = full(z)
    traj = integrate(fld, y0, period, rtol, atol)
    return PeriodicOrbit(y0, float(period), mult, res, block, jac, traj)


def mapping_torus_field(book: AbstractOpenBook) -> ChartField:
    """Reeb field d/dtheta on the mapping torus of an annulus book.

    State (x, phi, theta); at theta = |T(x)| the point is identified with
    (x, phi + sigma(x), 0).
    """
    mono = book.monodromy
    if mono.kind != "dehn_twist":
        raise ValueError("mapping torus flow is modelled for twist monodromies only")
    sig, shift = mono.sigma, mono.shift

    def event(y):
        return y[2] + float(shift(y[0]))

    def jump(y):
        return np.array([y[0], (y[1] + float(sig(y[0]))) % (2 * np.pi), y[2] + float(shift(y[0]))])

    return ChartField(
        lambda y: np.array([0.0, 0.0, 1.0]),
        3,
        "mapping_torus",
        {1: 2 * np.pi},
        lambda Y: np.abs(np.atleast_2d(Y)[:, 0]) <= 1.0,
        (event, jump),
    )


def binding_torus_field(chart: BindingChart) -> ChartField:
    """Reeb field in binding coordinates (theta1, r, theta2)."""

    def rhs(y):
        v = reeb_at(chart, np.clip(y[1], 0.0, 1.0))
        return np.array([float(v.v_theta1), 0.0, float(v.v_theta2)])

    return ChartField(
        rhs, 3, "binding", {0: 2 * np.pi, 2: 2 * np.pi},
        lambda Y: (np.atleast_2d(Y)[:, 1] >= 0) & (np.atleast_2d(Y)[:, 1] <= 1),
    )


def trig_perturbation(seed: int = 0, modes: int = 2, amplitude: float = 1.0):
    """Seeded smooth perturbation h(x, y, t) of a planar field, 2 pi periodic in t.

    Each component is a sum of terms (c0 + c1 x + c2 y) cos(k t + phase) for
    k = 0..modes with standard normal coefficients scaled by 1/(1+k)^2.
    """
    rng = np.random.default_rng(seed)
    coef = rng.standard_normal((2, modes + 1, 3)) / (1.0 + np.arange(modes + 1))[None, :, None] ** 2
    phase = rng.uniform(0, 2 * np.pi, (2, modes + 1))
    k = np.arange(modes + 1)

    def h(x, y, t):
        c = np.cos(k * t + phase)
        lin = coef[..., 0] + coef[..., 1] * x + coef[..., 2] * y
        return amplitude * np.sum(lin * c, axis=1)

    return h


def binding_normal_field(chart: BindingChart, h=None, delta: float = 0.0) -> ChartField:
    """Normalized Reeb field near the binding in Cartesian (x, y, t).

    The binding-direction component is scaled to 1, so t is the binding
    angle and the unperturbed flow rotates the disk at rate -f1'/f2'.  The
    domain is the closed-form region r <= r_inner.  Without ``h`` a nonzero
    delta uses ``trig_perturbation(0)``.
    """
    if delta and h is None:
        h = trig_perturbation(0)

    def rhs(s):
        x, y, t = s
        w = float(binding_rotation_rate(chart, np.hypot(x, y)))
        out = np.array([-w * y, w * x, 1.0])
        if delta:
            out[:2] += delta * np.asarray(h(x, y, t))
        return out

    return ChartField(
        rhs, 3, "binding", {2: 2 * np.pi},
        lambda Y: np.hypot(np.atleast_2d(Y)[:, 0], np.atleast_2d(Y)[:, 1]) <= chart.r_inner,
    )


def continue_binding_orbit(
    chart: BindingChart,
    h=None,
    delta: float = 0.0,
    tol: float = 1e-11,
    rtol: float = 1e-11,
    atol: float = 1e-13,
) -> PeriodicOrbit:
    """Periodic orbit of the perturbed normalized field continued from r = 0.

    The orbit is a fixed point of the 2 pi map of the section t = 0.  The
    returned ``period`` is in normalized time (one turn of the binding).

    Raises
    ------
    ContinuationError
        If Newton fails or the orbit leaves the closed-form region.
    """
    fld = binding_normal_field(chart, h, delta)
    sec = Section(2, 0.0, 2 * np.pi)
    if delta == 0:
        y0 = np.zeros(3)
        traj = integrate(fld, y0, 2 * np.pi, rtol, atol)
        th = 2 * np.pi * chart.a
        mult = np.array([np.exp(-1j * th), np.exp(1j * th)])
        return PeriodicOrbit(y0, 2 * np.pi, mult, 0.0, "binding", None, traj)
    try:
        orb = find_periodic_orbit(fld, np.zeros(3), sec, tol, rtol, atol, 2 * np.pi,
                                  block="binding", backward_multipliers=False)
    except (IntegrationError, NoReturnError) as exc:
        raise ContinuationError(f"continuation failed at delta={delta:g}: {exc}") from exc
    except ContinuationError as exc:
        raise ContinuationError(
            f"continuation failed at delta={delta:g}: {exc}", exc.residual
        ) from exc
    return orb


def orbit_displacement(orbit: PeriodicOrbit, n: int = 257) -> float:
    """Maximum distance of the orbit from the binding circle r = 0."""
    ts = np.linspace(0.0, orbit.period, n)
    pts = orbit.trajectory(ts)
    return float(np.max(np.hypot(pts[:, 0], pts[:, 1])))


@dataclass
class TransversalityReport:
    delta: float
    margin: float
    success: bool
    n_probes: int
    probe_radius: float
    displacement: float
    excluded: int = 0


def _smooth_step(x):
    x = np.clip(x, 0.0, 1.0)
    f = lambda u: np.where(u > 0, np.exp(-1.0 / np.where(u > 0, u, 1.0)), 0.0)  # noqa: E731
    return f(x) / (f(x) + f(1.0 - x))


def _smooth_step_d(x):
    x = np.asarray(x, float)
    inside = (x > 0) & (x < 1)
    xs = np.where(inside, x, 0.5)
    a = np.exp(-1.0 / xs)
    b = np.exp(-1.0 / (1.0 - xs))
    da = a / xs**2
    db = -b / (1.0 - xs) ** 2
    d = (da * (a + b) - a * (da + db)) / (a + b) ** 2
    return np.where(inside, d, 0.0)


def transversality_margin(
    chart: BindingChart,
    delta: float,
    probe_radius: float = 0.05,
    n_probes: int = 1000,
    h=None,
    seed: int = 0,
    orbit: PeriodicOrbit | None = None,
) -> TransversalityReport:
    """Minimum of Omega(R)/(u^2 + v^2) over probes near the continued orbit.

    Coordinates u = x - rho gamma_x(t), v = y - rho gamma_y(t) are recentred
    on the orbit gamma, with rho a smooth cutoff equal to 1 for
    |(x, y)| <= probe_radius and 0 beyond twice that.  Omega = u dv - v du
    is evaluated on the normalized field.  Probes at distance below 1e-9
    from the orbit are excluded.
    """
    if orbit is None:
        orbit = continue_binding_orbit(chart, h, delta)
    fld = binding_normal_field(chart, h, delta)
    rng = np.random.default_rng(seed)
    t = rng.uniform(0, 2 * np.pi, n_probes)
    d = probe_radius * np.sqrt(rng.uniform(0, 1, n_probes))
    ang = rng.uniform(0, 2 * np.pi, n_probes)
    gam = orbit.trajectory(t)
    x = gam[:, 0] + d * np.cos(ang)
    y = gam[:, 1] + d * np.sin(ang)
    rad = np.hypot(x, y)
    rho = 1.0 - _smooth_step(rad / probe_radius - 1.0)
    drho = -_smooth_step_d(rad / probe_radius - 1.0) / probe_radius
    margins = np.empty(n_probes)
    for k in range(n_probes):
        fp = fld(np.array([x[k], y[k], t[k]]))
        fg = fld(gam[k])
        u = x[k] - rho[k] * gam[k, 0]
        v = y[k] - rho[k] * gam[k, 1]
        grad = drho[k] * np.array([x[k], y[k]]) / max(rad[k], 1e-300)
        dr = grad @ fp[:2]
        du = fp[0] - rho[k] * fg[0] - dr * gam[k, 0]
        dv = fp[1] - rho[k] * fg[1] - dr * gam[k, 1]
        margins[k] = (u * dv - v * du) / (u * u + v * v) if u * u + v * v > 0 else np.nan
    keep = d > 1e-9
    m = float(np.nanmin(margins[keep])) if np.any(keep) else np.nan
    return TransversalityReport(delta, m, bool(m > 0), n_probes, probe_radius,
                                orbit_displacement(orbit), int(np.sum(~keep)))


def normal_quadratic_form(chart: BindingChart, delta: float = 0.0, h=None,
                          t: float = 0.0, orbit: PeriodicOrbit | None = None,
                          step: float = 1e-6) -> np.ndarray:
    """J A(t) for the linearized normal flow along the orbit, J = [[0, 1], [-1, 0]].

    A(t) is the Jacobian of the planar field at gamma(t), by central differences.
    """
    if orbit is None:
        orbit = continue_binding_orbit(chart, h, delta)
    fld = binding_normal_field(chart, h, delta)
    g = orbit.trajectory(t)[0]
    a = np.empty((2, 2))
    for j in range(2):
        e = np.zeros(3)
        e[j] = step
        a[:, j] = (fld(g + e)[:2] - fld(g - e)[:2]) / (2 * step)
    jm = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return jm @ a


def estimate_delta_threshold(chart: BindingChart, h, lo: float = 1e-4, hi: float = 10.0,
                             iters: int = 12) -> tuple[float, float]:
    """Bisect in log delta for the largest delta at which continuation succeeds.

    Returns (last success, first failure); the failure end is inf when the
    continuation succeeds at ``hi``.
    """

    def ok(d):
        try:
            continue_binding_orbit(chart, h, d, tol=1e-9, rtol=1e-9, atol=1e-11)
            return True
        except ContinuationError:
            return False

    if not ok(lo):
        return 0.0, lo
    if ok(hi):
        return hi, np.inf
    for _ in range(iters):
        mid = np.sqrt(lo * hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo, hi
