"""Morse Hamiltonian on two annuli joined by a 1-handle.

Coordinates (r, theta) on the page model: the left annulus is
r in [-1, 1] (theta periodic), the handle is [1, 2] x [-pi/4, pi/4] and the
right annulus is r in [2, 4] with the mirrored coordinate s = 3 - r, so its
orientation is reversed.  The symplectic form is dr ^ dtheta and the
Hamiltonian field is X = (-dH/dtheta, dH/dr).  The contact flow near the
page is d/dt + X; the return map to a page is the time-1 map of X.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import fsolve

from .flow import ChartField, Section, find_periodic_orbit, integrate

__all__ = [
    "HandleAnnulusModel",
    "TrimReport",
    "TrimError",
    "PropertyError",
    "h1",
    "h2",
    "slope_profile",
    "make_model",
    "trim_domain",
    "verify_properties",
    "critical_points",
    "morse_chart_field",
    "level_polylines",
    "h0",
    "h1_model",
    "grad_h0",
    "morse_field",
    "cutoff",
    "in_domain",
    "energy_drift",
    "smooth_step",
    "smooth_step_d",
]

QUARTER = np.pi / 4
_GL_X, _GL_W = leggauss(64)


class TrimError(ValueError):
    """Trimming level is singular or leaves the domain."""


class PropertyError(AssertionError):
    """A structural property of the model failed its numerical check."""


def smooth_step(x):
    """C-infinity step, 0 for x <= 0 and 1 for x >= 1."""
    x = np.clip(np.asarray(x, float), 0.0, 1.0)
    inside = (x > 0) & (x < 1)
    xs = np.where(inside, x, 0.5)
    a = np.exp(-1.0 / xs)
    b = np.exp(-1.0 / (1.0 - xs))
    return np.where(inside, a / (a + b), (x >= 1).astype(float))


def smooth_step_d(x):
    x = np.asarray(x, float)
    inside = (x > 0) & (x < 1)
    xs = np.where(inside, x, 0.5)
    a = np.exp(-1.0 / xs)
    b = np.exp(-1.0 / (1.0 - xs))
    da = a / xs**2
    db = -b / (1.0 - xs) ** 2
    return np.where(inside, (da * b - a * db) / (a + b) ** 2, 0.0)


def h1(r):
    """Annulus Hamiltonian -pi r^2/2 + pi r, generating pi (1 - r) d/dtheta."""
    r = np.asarray(r, float)
    return -0.5 * np.pi * r**2 + np.pi * r


def h2(r, theta, C: float):
    """Handle Hamiltonian C (1 - (r - 3/2)^2 + (4 theta / pi)^2), saddle at (3/2, 0)."""
    r = np.asarray(r, float)
    theta = np.asarray(theta, float)
    return C * (1.0 - (r - 1.5) ** 2 + (4.0 * theta / np.pi) ** 2)


@dataclass(frozen=True)
class HandleAnnulusModel:
    """Parameters of the Morse model.

    Parameters
    ----------
    C : float
        Handle constant; pi^2/4 makes the saddle rate 2 pi per unit time.
    epsilon_trim : float
        Trimming offset above the saddle value.
    up_ramp : (start, width, slope)
        Slope increase near the attached side of the annulus; slope 4 pi makes
        the time-1 map the identity there.
    low_ramp : (start, width, slope)
        Slope adjustment near the free boundary s = -1; slope 2 pi gives the
        identity on the outer strip.
    blend_start, blend_width, theta_inner
        Shape of the cutoff rho.
    """

    C: float = np.pi**2 / 4
    epsilon_trim: float = np.pi**2 / 40
    up_ramp: tuple = (0.7, 0.1, 4 * np.pi)
    low_ramp: tuple = (0.9, 0.05, 2 * np.pi)
    blend_start: float = 0.5
    blend_width: float = 0.2
    theta_inner: float = 0.55

    @property
    def saddle(self) -> tuple:
        return (1.5, 0.0)

    @property
    def saddle_value(self) -> float:
        return float(h2(1.5, 0.0, self.C))

    @property
    def rate(self) -> float:
        """Hyperbolic rate of the saddle, sqrt(64 C^2 / pi^2)."""
        return 8.0 * self.C / np.pi


def make_model(C: float = np.pi**2 / 4, epsilon_trim: float | None = None, **kw) -> HandleAnnulusModel:
    if not C > 0:
        raise ValueError("C must be positive")
    eps = C / 10 if epsilon_trim is None else epsilon_trim
    return HandleAnnulusModel(C=C, epsilon_trim=eps, **kw)


def _mirror(r):
    r = np.asarray(r, float)
    return np.where(r <= 1.5, r, 3.0 - r), np.where(r <= 1.5, 1.0, -1.0)


def slope_profile(model: HandleAnnulusModel, s):
    """dH1/ds of the adjusted annulus Hamiltonian."""
    s = np.asarray(s, float)
    base = np.pi * (1.0 - s)
    u0, uw, us = model.up_ramp
    l0, lw, ls = model.low_ramp
    up = smooth_step((s - u0) / uw)
    lo = smooth_step((-s - l0) / lw)
    out = base * (1.0 - up) + us * up
    return out * (1.0 - lo) + ls * lo


def _ramp_integral(model, a, b):
    """Integral of slope_profile - pi (1 - s) over [a, b] by Gauss-Legendre (1-d arrays)."""
    mid = 0.5 * (a + b)[:, None]
    half = 0.5 * (b - a)[:, None]
    u = mid + half * _GL_X
    vals = slope_profile(model, u) - np.pi * (1.0 - u)
    return np.sum(vals * _GL_W, axis=-1) * half[:, 0]


def _excess(model, s, start, width, slope, sign):
    """Signed integral of the slope excess between the ramp start and s.

    sign=+1 is the ramp on s > start, sign=-1 the ramp on s < -start.
    Quadrature is used only inside the ramp; past it the excess has a closed form.
    """
    x = sign * s
    out = np.zeros_like(s)
    inside = (x > start) & (x < start + width)
    past = x >= start + width
    if np.any(inside):
        xs = s[inside]
        a = np.minimum(sign * start, xs)
        b = np.maximum(sign * start, xs)
        out[inside] = sign * _ramp_integral(model, a, b)
    if np.any(past):
        lo, hi = sorted((sign * start, sign * (start + width)))
        full = _ramp_integral(model, np.array([lo]), np.array([hi]))[0]
        e = sign * (start + width)
        xe = s[past]
        lin = slope * (xe - e) - np.pi * ((xe - e) - 0.5 * (xe**2 - e**2))
        out[past] = sign * full + lin
    return out


def h1_model(model: HandleAnnulusModel, s):
    """Adjusted annulus Hamiltonian in the side coordinate s, zero at s = 1/2."""
    s = np.minimum(np.asarray(s, float), 1.0)
    shape = s.shape
    s = s.ravel()
    up = _excess(model, s, *model.up_ramp, 1)
    lo = _excess(model, s, *model.low_ramp, -1)
    return (h1(s) - h1(0.5) + up + lo).reshape(shape)


def _rho_parts(model, s, theta):
    """rho and its partial derivatives in (s, theta)."""
    s = np.asarray(s, float)
    at = np.abs(theta)
    sg = np.sign(theta)
    b0, bw = model.blend_start, model.blend_width
    a_s = smooth_step((s - b0) / bw)
    da_s = smooth_step_d((s - b0) / bw) / bw
    # the theta-transition width closes linearly at the corners s = 1, |theta| = pi/4;
    # the kink of w at s = b0 is invisible since a_s vanishes to all orders there
    w0 = QUARTER - model.theta_inner
    span = 1.0 - b0
    frac = np.clip((1.0 - s) / span, 0.0, 1.0)
    w = w0 * frac
    dw = np.where((s > b0) & (s < 1.0), -w0 / span, 0.0)
    pos = w > 0
    ws = np.where(pos, w, 1.0)
    z = 1.0 + (at - QUARTER) / ws
    bval = np.where(pos, 1.0 - smooth_step(z), (at < QUARTER).astype(float))
    dz = np.where(pos, smooth_step_d(z), 0.0)
    db_ds = dz * (at - QUARTER) / ws**2 * dw
    db_dt = -dz / ws * sg
    rho = 1.0 - a_s * bval
    drho_ds = -(da_s * bval + a_s * db_ds)
    drho_dt = -a_s * db_dt
    return rho, drho_ds, drho_dt


def in_domain(r, theta):
    """Membership in the untrimmed model domain."""
    r = np.asarray(r, float)
    th = (np.asarray(theta, float) + np.pi) % (2 * np.pi) - np.pi
    s, _ = _mirror(r)
    return (r >= -1.0) & (r <= 4.0) & ((s <= 1.0) | (np.abs(th) <= QUARTER))


def cutoff(model: HandleAnnulusModel, r, theta):
    """Cutoff rho in [0, 1]: 1 on the annulus side, 0 on the handle."""
    s, _ = _mirror(r)
    th = (np.asarray(theta, float) + np.pi) % (2 * np.pi) - np.pi
    rho = _rho_parts(model, s, th)[0]
    rho = np.where(s <= model.blend_start, 1.0, rho)
    return np.where(s >= 1.0, 0.0, rho)


def _check(r, theta, strict):
    ok = in_domain(r, theta)
    if strict and not np.all(ok):
        raise ValueError("point outside the model domain")
    return ok


def h0(model: HandleAnnulusModel, r, theta, strict: bool = True):
    """Blended Hamiltonian rho h1 + (1 - rho) h2; NaN outside the domain when not strict."""
    ok = _check(r, theta, strict)
    s, _ = _mirror(r)
    th = (np.asarray(theta, float) + np.pi) % (2 * np.pi) - np.pi
    rho = cutoff(model, r, th)
    val = rho * h1_model(model, s) + (1.0 - rho) * h2(s, th, model.C)
    return np.where(ok, val, np.nan)


def grad_h0(model: HandleAnnulusModel, r, theta, strict: bool = True):
    """Exact partial derivatives (dH/dr, dH/dtheta) of h0."""
    ok = _check(r, theta, strict)
    s, ds_dr = _mirror(r)
    th = (np.asarray(theta, float) + np.pi) % (2 * np.pi) - np.pi
    rho, drs, drt = _rho_parts(model, s, th)
    annulus = s <= model.blend_start
    handle = s >= 1.0
    rho = np.where(annulus, 1.0, np.where(handle, 0.0, rho))
    drs = np.where(annulus | handle, 0.0, drs)
    drt = np.where(annulus | handle, 0.0, drt)
    a = h1_model(model, s)
    da = np.where(s <= 1.0, slope_profile(model, np.minimum(s, 1.0)), 0.0)
    b = h2(s, th, model.C)
    db_s = -2.0 * model.C * (s - 1.5)
    db_t = 2.0 * model.C * (4.0 / np.pi) ** 2 * th
    hs = drs * (a - b) + rho * da + (1.0 - rho) * db_s
    ht = drt * (a - b) + (1.0 - rho) * db_t
    nan = np.where(ok, 1.0, np.nan)
    return hs * ds_dr * nan, ht * nan


def morse_field(model: HandleAnnulusModel, r, theta, strict: bool = True):
    """Hamiltonian velocity (dr/dt, dtheta/dt) = (-dH/dtheta, dH/dr)."""
    hr, ht = grad_h0(model, r, theta, strict)
    return -ht, hr


def morse_chart_field(model: HandleAnnulusModel, perturbation=None, delta: float = 0.0) -> ChartField:
    """Field on (r, theta, t) with t advancing at unit speed.

    ``perturbation(r, theta, t)`` adds a smooth periodic forcing scaled by delta.
    """

    def rhs(y):
        vr, vt = morse_field(model, y[0], y[1], strict=False)
        out = np.array([float(vr), float(vt), 1.0])
        if delta:
            out[:2] += delta * np.asarray(perturbation(y[0], y[1], y[2]))
        return out

    dom = lambda Y: in_domain(np.atleast_2d(Y)[:, 0], np.atleast_2d(Y)[:, 1])  # noqa: E731
    return ChartField(rhs, 3, "handle", {1: 2 * np.pi, 2: 1.0}, dom)


@dataclass
class TrimReport:
    level: float
    epsilon: float
    n_curves: int
    min_grad: float
    corner_distance: float
    boundary_distance: float
    regular: bool
    polylines: list = field(default_factory=list, repr=False)


def level_polylines(model: HandleAnnulusModel, level: float, n: int = 1201):
    """Polylines of {h0 = level} on a grid covering the domain."""
    import contourpy

    R = np.linspace(-1.0, 4.0, 2 * n - 1)
    TH = np.linspace(-np.pi, np.pi, n)
    RR, TT = np.meshgrid(R, TH)
    Z = h0(model, RR, TT, strict=False)
    gen = contourpy.contour_generator(R, TH, Z)
    return [np.asarray(L) for L in gen.lines(level) if len(L) > 1]


CORNERS = np.array([[1.0, QUARTER], [1.0, -QUARTER], [2.0, QUARTER], [2.0, -QUARTER]])


def trim_domain(model: HandleAnnulusModel, grid: int = 1201, corner_tol: float = 0.02) -> TrimReport:
    """Trim the domain at {h0 = saddle value + epsilon} and certify the level.

    The kept region is {h0 <= saddle + epsilon}.  The level must be regular,
    stay inside the domain (away from the handle edges and the free
    boundaries) and keep a positive distance from the corners where rho
    is discontinuous.

    Raises
    ------
    TrimError
    """
    eps = model.epsilon_trim
    if eps <= 0:
        raise TrimError("trimming level passes through the saddle (epsilon must be positive)")
    level = model.saddle_value + eps
    lines = level_polylines(model, level, grid)
    if not lines:
        raise TrimError(f"trimming level {level:.4g} exits the domain (empty level set)")
    pts = np.concatenate(lines)
    s, _ = _mirror(pts[:, 0])
    edge = np.where(s > 1.0, QUARTER - np.abs(pts[:, 1]), np.inf)
    free = pts[:, 0] + 1.0, 4.0 - pts[:, 0]
    bdist = float(min(np.min(edge), np.min(free[0]), np.min(free[1])))
    cdist = float(np.min(np.linalg.norm(pts[:, None, :] - CORNERS[None], axis=2)))
    hr, ht = grad_h0(model, pts[:, 0], pts[:, 1], strict=False)
    gnorm = np.hypot(hr, ht)
    min_grad = float(np.nanmin(gnorm))
    step = 5.0 / (2 * grid - 2)
    if bdist < 2 * step or np.any(np.isnan(gnorm)):
        raise TrimError(f"trimming level {level:.4g} exits the domain")
    if cdist < corner_tol:
        raise TrimError(f"trimming level comes within {cdist:.3g} of the cutoff discontinuity")
    if not min_grad > 1e-3:
        raise TrimError(f"trimming level is not regular (min |grad h0| = {min_grad:.3g})")
    return TrimReport(level, eps, len(lines), min_grad, cdist, bdist, True, lines)


def critical_points(model: HandleAnnulusModel, n: int = 81, tol: float = 1e-10):
    """Zeros of grad h0 in the handle region r in [1, 2], by grid search and Newton polishing."""
    R = np.linspace(1.0, 2.0, n)
    TH = np.linspace(-QUARTER, QUARTER, n)
    RR, TT = np.meshgrid(R, TH)
    hr, ht = grad_h0(model, RR, TT)
    g = np.hypot(hr, ht)
    found = []
    for i in range(1, n - 1):
        for j in range(1, n - 1):
            win = g[i - 1:i + 2, j - 1:j + 2]
            if g[i, j] > win.min():
                continue
            x0 = np.array([RR[i, j], TT[i, j]])
            sol, info, ok, _ = fsolve(
                lambda z: np.array(grad_h0(model, z[0], z[1], strict=False), float).ravel(),
                x0, full_output=True, xtol=1e-13)
            if ok != 1 or np.any(~np.isfinite(sol)):
                continue
            if np.max(np.abs(info["fvec"])) > tol or not (1 <= sol[0] <= 2 and abs(sol[1]) <= QUARTER):
                continue
            if all(np.hypot(*(sol - f)) > 1e-6 for f in found):
                found.append(sol)
    return np.array(found)


def verify_properties(
    model: HandleAnnulusModel,
    n_radii: int = 20,
    rtol: float = 1e-12,
    atol: float = 1e-13,
    perturbation=None,
    delta: float = 0.0,
) -> dict:
    """Check the three structural properties of the model.

    1. A hyperbolic orbit through the saddle with multipliers exp(+-rate).
    2. Invariant circles on r in [-1/2, 1/2] with rotation number (1 - r)/2.
    3. The time-1 map is the identity on the free boundary strip.

    Energy conservation along a trimmed-region trajectory is reported too.

    Raises
    ------
    PropertyError
    """
    report = {"C": model.C, "rate": model.rate, "epsilon_trim": model.epsilon_trim}
    trim = trim_domain(model)
    report["trim"] = {
        "level": trim.level, "n_curves": trim.n_curves, "min_grad": trim.min_grad,
        "corner_distance": trim.corner_distance,
    }
    crit = critical_points(model)
    if len(crit) != 1 or np.hypot(*(crit[0] - np.array(model.saddle))) > 1e-8:
        raise PropertyError(f"expected a unique saddle in the handle, found {crit.tolist()}")
    fld = morse_chart_field(model, perturbation, delta)
    sec = Section(2, 0.0, 1.0)
    seed = np.array([model.saddle[0], model.saddle[1], 0.0])
    orb = find_periodic_orbit(fld, seed, sec, tol=1e-11, rtol=rtol, atol=atol,
                              period_estimate=1.0, block="H")
    mult = np.sort(orb.multipliers.real)
    expect = np.exp([-model.rate, model.rate])
    rel = np.abs(mult - expect) / expect
    report["saddle"] = {
        "anchor": orb.anchor[:2].tolist(), "period": orb.period,
        "multipliers": mult.tolist(), "relative_error": rel.tolist(),
        "product": float(np.prod(mult)),
    }
    if delta == 0 and np.max(rel) > 1e-4:
        raise PropertyError(f"saddle multipliers {mult} differ from {expect}")

    radii = np.linspace(-0.5, 0.5, n_radii)
    rot = []
    for r0 in radii:
        traj = integrate(fld, [r0, 0.0, 0.0], 1.0, rtol, atol)
        rot.append((traj.end[1] - 0.0) / (2 * np.pi))
    rot = np.array(rot)
    rot_err = float(np.max(np.abs(rot - (1.0 - radii) / 2)))
    report["rotation"] = {"radii": radii.tolist(), "rotation": rot.tolist(), "max_error": rot_err}
    if delta == 0 and rot_err > 1e-6:
        raise PropertyError(f"annulus rotation numbers off by {rot_err:.3g}")

    edge = np.concatenate([np.linspace(-1.0, -1.0 + model.low_ramp[1], 6),
                           np.linspace(4.0 - model.low_ramp[1], 4.0, 6)])
    disp = []
    for r0 in edge:
        for th0 in (-2.0, 0.5, 2.5):
            end = integrate(fld, [r0, th0, 0.0], 1.0, rtol, atol).end
            d = np.hypot(end[0] - r0, (end[1] - th0 + np.pi) % (2 * np.pi) - np.pi)
            disp.append(d)
    max_disp = float(np.max(disp))
    report["boundary"] = {"samples": len(disp), "max_displacement": max_disp}
    if delta == 0 and max_disp > 1e-8:
        raise PropertyError(f"boundary return map moves points by {max_disp:.3g}")

    drift = energy_drift(model, rtol=rtol, atol=atol)
    report["energy_drift"] = drift
    if drift > 1e-8:
        raise PropertyError(f"energy drift {drift:.3g} per unit time")
    return report


def energy_drift(model: HandleAnnulusModel, start=(0.7614, -0.7279), t_end: float = 5.0,
                 rtol: float = 1e-12, atol: float = 1e-13) -> float:
    """Max |h0(t) - h0(0)| / t_end along a trajectory through the blend strip."""
    fld = morse_chart_field(model)
    traj = integrate(fld, [start[0], start[1], 0.0], t_end, rtol, atol)
    e = h0(model, traj.y[:, 0], traj.y[:, 1], strict=False)
    return float(np.max(np.abs(e - e[0])) / t_end)
