"""Profile functions of a binding chart and the closed-form Reeb field.

Near a binding component the contact form is alpha = f1(r) dtheta1 + f2(r) dtheta2
on S^1 x D^2 (theta1 along the binding, (r, theta2) polar on the disk).  The
Reeb field is

    R = (f2' d/dtheta1 - f1' d/dtheta2) / (f1 f2' - f2 f1'),

so r is preserved and every r-torus is invariant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

__all__ = [
    "BindingChart",
    "ReebVelocity",
    "build_profile",
    "reeb_at",
    "action_angle",
    "validate_contact",
    "contact_margin",
    "reeb_identities",
    "binding_rotation_rate",
]

R_MID = 0.5


def _quintic_hermite(y0, y1, h):
    """Coefficients in t in [0,1] matching value, slope and curvature at both ends."""
    m = np.array(
        [
            [1, 0, 0, 0, 0, 0],
            [0, 1, 0, 0, 0, 0],
            [0, 0, 2, 0, 0, 0],
            [1, 1, 1, 1, 1, 1],
            [0, 1, 2, 3, 4, 5],
            [0, 0, 2, 6, 12, 20],
        ],
        float,
    )
    scale = np.array([1.0, h, h * h])
    rhs = np.concatenate([np.asarray(y0) * scale, np.asarray(y1) * scale])
    return np.linalg.solve(m, rhs)


@dataclass(frozen=True)
class BindingChart:
    """Solid torus chart with profiles f1, f2 and twist constant T.

    Closed forms hold on r <= r_inner (f1 = 2 - a r^2, f2 = r^2) and on
    [1/2, 1] (f1 = exp(1/2 - r), f2 = -T / 2pi); a quintic blend joins them.
    """

    T: float
    a: float
    r_inner: float
    c1: np.ndarray
    c2: np.ndarray
    r_mid: float = R_MID

    def _split(self, r):
        r = np.asarray(r, float)
        return r, r <= self.r_inner, r >= self.r_mid

    def _blend(self, coef, r, order):
        h = self.r_mid - self.r_inner
        t = (r - self.r_inner) / h
        c = coef
        for _ in range(order):
            c = P.polyder(c)
        return P.polyval(t, c) / h**order

    def f1(self, r):
        r, lo, hi = self._split(r)
        out = self._blend(self.c1, r, 0)
        out = np.where(lo, 2.0 - self.a * r**2, out)
        return np.where(hi, np.exp(0.5 - r), out)

    def f2(self, r):
        r, lo, hi = self._split(r)
        out = self._blend(self.c2, r, 0)
        out = np.where(lo, r**2, out)
        return np.where(hi, -self.T / (2 * np.pi), out)

    def df1(self, r):
        r, lo, hi = self._split(r)
        out = self._blend(self.c1, r, 1)
        out = np.where(lo, -2.0 * self.a * r, out)
        return np.where(hi, -np.exp(0.5 - r), out)

    def df2(self, r):
        r, lo, hi = self._split(r)
        out = self._blend(self.c2, r, 1)
        out = np.where(lo, 2.0 * r, out)
        return np.where(hi, 0.0, out)


@dataclass(frozen=True)
class ReebVelocity:
    """Reeb velocity components in a chart; arrays when evaluated on arrays of r."""

    v_theta1: np.ndarray
    v_r: np.ndarray
    v_theta2: np.ndarray
    chart: str = "binding"

    def as_array(self) -> np.ndarray:
        return np.stack(np.broadcast_arrays(self.v_theta1, self.v_r, self.v_theta2), -1)


def build_profile(
    T: float,
    a: float = np.sqrt(2.0),
    r_inner: float = 0.25,
    grid_size: int = 10_000,
) -> BindingChart:
    """Binding chart with blended profiles, validated on a dense grid.

    Parameters
    ----------
    T : float
        Twist constant of the boundary component, must be negative.
    a : float
        Slope constant of the inner region, must be positive.
    r_inner : float
        Radius up to which the inner closed forms hold, in (0, 1/2).
    grid_size : int
        Validation grid for the contact condition.

    Raises
    ------
    ValueError
        If the parameters are out of range or the blend breaks the contact condition.
    """
    if not T < 0:
        raise ValueError(f"twist constant must be negative, got T={T}")
    if not a > 0:
        raise ValueError(f"slope must be positive, got a={a}")
    if not 0 < r_inner < R_MID:
        raise ValueError(f"r_inner must lie in (0, {R_MID}), got {r_inner}")
    h = R_MID - r_inner
    ri = r_inner
    c1 = _quintic_hermite([2 - a * ri**2, -2 * a * ri, -2 * a], [1.0, -1.0, 1.0], h)
    c2 = _quintic_hermite([ri**2, 2 * ri, 2.0], [-T / (2 * np.pi), 0.0, 0.0], h)
    chart = BindingChart(float(T), float(a), float(r_inner), c1, c2)
    margin = validate_contact(chart, grid_size)
    if not margin > 0:
        raise ValueError(
            f"blend violates the contact condition (min margin {margin:.3e}); adjust r_inner"
        )
    return chart


def contact_margin(chart, r):
    """f1 f2' - f2 f1' at r."""
    return chart.f1(r) * chart.df2(r) - chart.f2(r) * chart.df1(r)


def validate_contact(chart, grid_size: int = 10_000) -> float:
    """Minimum of f1 f2' - f2 f1' over the grid k/grid_size, k = 1..grid_size."""
    if grid_size < 100:
        raise ValueError("grid_size must be at least 100")
    r = np.arange(1, grid_size + 1) / grid_size
    return float(np.min(contact_margin(chart, r)))


def reeb_at(chart: BindingChart, r) -> ReebVelocity:
    """Closed-form Reeb velocity (v_theta1, v_r, v_theta2) at radius r in [0, 1].

    At r = 0 the inner closed form gives the limit (1/2, 0, a/2).
    """
    r = np.asarray(r, float)
    if np.any(r < 0) or np.any(r > 1):
        raise ValueError("r must lie in [0, 1]")
    d = contact_margin(chart, r)
    inner = r <= chart.r_inner
    if np.any(~inner & (d <= 0)):
        raise ValueError("contact condition fails: non-positive denominator")
    safe = np.where(inner, 1.0, d)
    v1 = np.where(inner, 0.5, chart.df2(r) / safe)
    v2 = np.where(inner, 0.5 * chart.a, -chart.df1(r) / safe)
    return ReebVelocity(v1, np.zeros_like(v1), v2)


def binding_rotation_rate(chart: BindingChart, r):
    """Angular speed of theta2 per unit theta1, -f1'/f2'; equals a near the binding."""
    r = np.asarray(r, float)
    inner = r <= chart.r_inner
    d2 = np.where(inner, 1.0, chart.df2(r))
    return np.where(inner, chart.a, -chart.df1(r) / d2)


def action_angle(chart: BindingChart, rho, r):
    """Action coordinates I1 = rho f1(r), I2 = rho f2(r)."""
    rho = np.asarray(rho, float)
    if np.any(rho <= 0):
        raise ValueError("rho must be positive")
    return rho * chart.f1(r), rho * chart.f2(r)


def _fd_derivative(chart, f, r, h):
    """Fourth-order difference of f using samples from one smooth piece only."""
    r = np.atleast_1d(np.asarray(r, float))
    knots = np.array([0.0, chart.r_inner, chart.r_mid, 1.0])
    out = np.empty_like(r)
    for k, rk in enumerate(r):
        j = min(max(np.searchsorted(knots, rk) - 1, 0), 2)
        p0, p1 = knots[j], knots[j + 1]
        if rk - 2 * h >= p0 and rk + 2 * h <= p1:
            s = f(rk + h * np.array([-2.0, -1.0, 1.0, 2.0]))
            out[k] = (s[0] - 8 * s[1] + 8 * s[2] - s[3]) / (12 * h)
        elif rk - 4 * h >= p0:
            s = f(rk - h * np.arange(5.0))
            out[k] = (25 * s[0] - 48 * s[1] + 36 * s[2] - 16 * s[3] + 3 * s[4]) / (12 * h)
        else:
            s = f(rk + h * np.arange(5.0))
            out[k] = (-25 * s[0] + 48 * s[1] - 36 * s[2] + 16 * s[3] - 3 * s[4]) / (12 * h)
    return out


def reeb_identities(chart: BindingChart, r, h: float = 1e-4):
    """Residuals alpha(R) - 1 and the dr-coefficient of iota_R dalpha.

    Derivatives of f1, f2 are fourth-order differences taken within one
    smooth piece of the profile, independent of the analytic derivatives
    used to build R.
    """
    r = np.asarray(r, float)
    v = reeb_at(chart, r)
    g1 = _fd_derivative(chart, chart.f1, r, h).reshape(r.shape)
    g2 = _fd_derivative(chart, chart.f2, r, h).reshape(r.shape)
    alpha_r = chart.f1(r) * v.v_theta1 + chart.f2(r) * v.v_theta2 - 1.0
    # dalpha = f1' dr^dtheta1 + f2' dr^dtheta2, and v_r = 0
    contraction = -(g1 * v.v_theta1 + g2 * v.v_theta2)
    return alpha_r, contraction
