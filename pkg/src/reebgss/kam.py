"""Non-degenerate Hamiltonians near the binding, Diophantine checks and twist maps.

Near a binding circle the Reeb flow is the Hamiltonian flow of
H0 = (I1 + a I2)/2 in the action variables I = rho (f1, f2).  Its square
(I1 + a I2)^2 / 4 has the same level set rho = 1 and a rank one Hessian;
adding g(r) with r = sqrt(2 I2 / (I1 + a I2)) makes it non-degenerate.

The twist map part iterates area-preserving annulus maps built from a
generating function and finds invariant circles of a prescribed Diophantine
rotation number by Fourier-Newton iteration.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Callable

import numpy as np
from numpy.polynomial import Polynomial

__all__ = [
    "ModifiedHamiltonian",
    "RampProfile",
    "default_g",
    "frequency",
    "hessian",
    "nondegeneracy",
    "diophantine",
    "DiophantineResult",
    "continued_fraction",
    "convergents",
    "TwistMap",
    "rotation_number",
    "RotationEstimate",
    "InvariantCircle",
    "CircleNotFound",
    "find_invariant_circle",
    "circle_set_error",
]


class RampProfile:
    """C^2 function of r with g = 0 for r <= r0 and g'(r)/r increasing on (r0, r1).

    g'(r) = A r q((r - r0)/(r1 - r0)) with q the cubic smoothstep 3t^2 - 2t^3,
    so g'/r rises monotonically from 0 to A across the band and stays at A
    beyond it.
    """

    def __init__(self, amplitude: float = 0.05, r0: float = 0.1, r1: float = 0.24):
        if not r1 > r0 >= 0:
            raise ValueError("need 0 <= r0 < r1")
        self.amplitude, self.r0, self.r1 = float(amplitude), float(r0), float(r1)
        w = r1 - r0
        t = Polynomial([-r0 / w, 1.0 / w])
        q = 3 * t**2 - 2 * t**3
        self._dg = Polynomial([0.0, 1.0]) * q
        self._g = self._dg.integ(lbnd=r0)
        self._g1 = self._g(r1)

    def __call__(self, r):
        r = np.asarray(r, float)
        A, r0, r1 = self.amplitude, self.r0, self.r1
        mid = A * self._g(np.clip(r, r0, r1))
        tail = A * (self._g1 + 0.5 * (r**2 - r1**2))
        return np.where(r <= r0, 0.0, np.where(r >= r1, tail, mid))

    def derivative(self, r):
        r = np.asarray(r, float)
        A, r0, r1 = self.amplitude, self.r0, self.r1
        mid = A * self._dg(np.clip(r, r0, r1))
        return np.where(r <= r0, 0.0, np.where(r >= r1, A * r, mid))

    def scaled(self, factor: float) -> "RampProfile":
        return RampProfile(self.amplitude * factor, self.r0, self.r1)


def _zero(r):
    return np.zeros_like(np.asarray(r, float))


def default_g(amplitude: float = 0.05) -> RampProfile:
    """Default non-degeneracy profile, active on r in [0.1, 0.24]."""
    return RampProfile(amplitude, 0.1, 0.24)


@dataclass(frozen=True)
class ModifiedHamiltonian:
    """H = (I1 + a I2)^2 / 4 + g(r(I1, I2)).

    ``g`` is None for the unmodified (degenerate) Hamiltonian.
    """

    a: float = np.sqrt(2.0)
    g: RampProfile | None = None

    def _check(self, I1, I2):
        S = np.asarray(I1, float) + self.a * np.asarray(I2, float)
        if np.any(S == 0):
            raise ZeroDivisionError("I1 + a I2 vanishes")
        return S

    def radius(self, I1, I2):
        S = self._check(I1, I2)
        return np.sqrt(2.0 * np.asarray(I2, float) / S)

    def __call__(self, I1, I2):
        S = self._check(I1, I2)
        out = 0.25 * S**2
        if self.g is not None:
            out = out + self.g(self.radius(I1, I2))
        return out

    def dg(self, r):
        return _zero(r) if self.g is None else self.g.derivative(r)


def frequency(H: ModifiedHamiltonian, I1, I2):
    """Gradient (dH/dI1, dH/dI2).

    With S = I1 + a I2 the quadratic part contributes (S/2, a S/2); the
    radius r = sqrt(2 I2 / S) has dr/dI1 = -I2 / (r S^2), dr/dI2 = I1 / (r S^2).
    """
    I1 = np.asarray(I1, float)
    I2 = np.asarray(I2, float)
    S = H._check(I1, I2)
    r = H.radius(I1, I2)
    dg = H.dg(r)
    safe = np.where(r > 0, r, 1.0)
    drdI1 = np.where(r > 0, -I2 / (safe * S**2), 0.0)
    drdI2 = np.where(r > 0, I1 / (safe * S**2), 0.0)
    return 0.5 * S + dg * drdI1, 0.5 * H.a * S + dg * drdI2


def hessian(H: ModifiedHamiltonian, I1, I2, step: float = 1e-6):
    """Hessian by central differences of the gradient, shape (..., 2, 2)."""
    I1 = np.asarray(I1, float)
    I2 = np.asarray(I2, float)
    c1 = [(p - m) / (2 * step) for p, m in
          zip(frequency(H, I1 + step, I2), frequency(H, I1 - step, I2))]
    c2 = [(p - m) / (2 * step) for p, m in
          zip(frequency(H, I1, I2 + step), frequency(H, I1, I2 - step))]
    out = np.empty(I1.shape + (2, 2))
    out[..., 0, 0], out[..., 1, 0] = c1
    out[..., 0, 1], out[..., 1, 1] = c2
    return 0.5 * (out + np.swapaxes(out, -1, -2))


@dataclass
class NondegeneracyReport:
    min_abs_det: float
    argmin: tuple
    det_min: float
    det_max: float
    single_signed: bool


def nondegeneracy(
    H: ModifiedHamiltonian,
    rho_range=(0.9, 1.1),
    r_range=(0.12, 0.22),
    grid: int = 41,
) -> NondegeneracyReport:
    """Minimum |det Hessian| over a (rho, r) band mapped by I = rho (2 - a r^2, r^2)."""
    rho = np.linspace(*rho_range, grid)
    r = np.linspace(*r_range, grid)
    RR, QQ = np.meshgrid(rho, r, indexing="ij")
    I1 = RR * (2.0 - H.a * QQ**2)
    I2 = RR * QQ**2
    det = np.linalg.det(hessian(H, I1, I2))
    k = np.unravel_index(np.argmin(np.abs(det)), det.shape)
    return NondegeneracyReport(
        float(np.abs(det[k])), (float(RR[k]), float(QQ[k])), float(det.min()),
        float(det.max()), bool(det.min() > 0 or det.max() < 0),
    )


def continued_fraction(x: float, n: int = 20) -> list:
    """Leading partial quotients of x."""
    out = []
    for _ in range(n):
        a = int(np.floor(x))
        out.append(a)
        frac = x - a
        if frac < 1e-14:
            break
        x = 1.0 / frac
    return out


def convergents(x: float, n: int = 20) -> list:
    """Convergents p/q of x as (p, q) pairs."""
    p0, q0, p1, q1 = 1, 0, 0, 1
    out = []
    for a in continued_fraction(x, n):
        p0, p1 = a * p0 + p1, p0
        q0, q1 = a * q0 + q1, q0
        out.append((p0, q0))
    return out


@dataclass
class DiophantineResult:
    passed: bool
    worst: tuple
    worst_ratio: float

    def __bool__(self):
        return self.passed


def diophantine(omega, c: float = 0.2, gamma: float = 2.0, K: int = 10_000) -> DiophantineResult:
    """Check a Diophantine condition up to size K.

    Scalar ``omega`` (a slope x): |x - p/q| >= c q^-gamma for all q <= K.
    The result records the worst fraction p/q (in lowest terms) and the
    ratio q^gamma |x - p/q| / c.

    Pair ``omega``: |<k, omega>| >= 1 / (c |k|^gamma) for all nonzero integer
    k with Euclidean norm |k| <= K.  The ratio is c |k|^gamma |<k, omega>|
    and the worst k is returned.
    """
    if not (c > 0 and gamma > 0):
        raise ValueError("c and gamma must be positive")
    if K < 100:
        raise ValueError("K must be at least 100")
    w = np.atleast_1d(np.asarray(omega, float))
    if w.size == 1:
        x = float(w[0])
        q = np.arange(1, K + 1, dtype=float)
        p = np.rint(q * x)
        ratio = q**gamma * np.abs(x - p / q) / c
        i = int(np.argmin(ratio))
        pi, qi = int(p[i]), int(q[i])
        g = gcd(pi, qi) or 1
        return DiophantineResult(bool(ratio[i] >= 1), (pi // g, qi // g), float(ratio[i]))
    if w.size != 2:
        raise ValueError("frequency vectors of length 1 or 2 only")
    w1, w2 = w
    if w1 == 0:
        w1, w2, swap = w2, w1, True
    else:
        swap = False
    best, arg = np.inf, None
    for k2 in range(0, K + 1):
        centre = int(np.rint(-k2 * w2 / w1))
        # terms |k1 w1 + k2 w2| grow by |w1| per step away from the centre
        span = 1
        lower = c * max(k2, 1) ** gamma * abs(w1)
        if lower > 0:
            span = max(1, int(np.ceil(1.0 / lower + 0.5)))
        k1 = np.arange(centre - span, centre + span + 1)
        norm = np.hypot(k1, k2)
        ok = (norm <= K) & (norm > 0)
        if not np.any(ok):
            continue
        k1, norm = k1[ok], norm[ok]
        val = c * norm**gamma * np.abs(k1 * w1 + k2 * w2)
        j = int(np.argmin(val))
        if val[j] < best:
            best, arg = float(val[j]), (int(k1[j]), k2)
    if swap:
        arg = (arg[1], arg[0])
    return DiophantineResult(bool(best >= 1), arg, best)


SMOOTH9 = Polynomial([0, 0, 0, 0, 0, 126, -420, 540, -315, 70])


def _taper(r, inner, outer):
    """C^4 taper: 1 for |r| <= inner, 0 for |r| >= outer, with first two derivatives."""
    r = np.asarray(r, float)
    w = outer - inner
    t = np.clip((np.abs(r) - inner) / w, 0.0, 1.0)
    sg = np.sign(r)
    c = 1.0 - SMOOTH9(t)
    d1 = -SMOOTH9.deriv(1)(t) / w * sg
    d2 = -SMOOTH9.deriv(2)(t) / w**2
    inside = (t > 0) & (t < 1)
    return c, np.where(inside, d1, 0.0), np.where(inside, d2, 0.0)


class TwistMap:
    """Area-preserving annulus map from the generating function

        S(r', theta) = r' theta + Sigma(r') + delta c(r') s(r', theta),

    with r = dS/dtheta and theta' = dS/dr'.  Here Sigma' = sigma, c is a C^4
    taper vanishing for |r'| >= 0.9 and s is a seeded trigonometric
    polynomial with coefficients affine in r'.

    Calling the map returns (r', theta') with theta' lifted to R.
    """

    def __init__(
        self,
        sigma: Callable = None,
        dsigma: Callable = None,
        delta: float = 0.0,
        seed: int = 0,
        modes: int = 3,
        taper=(0.7, 0.9),
    ):
        self.sigma = sigma if sigma is not None else (lambda r: np.pi * (1.0 - np.asarray(r, float)))
        self.dsigma = dsigma if dsigma is not None else (lambda r: -np.pi * np.ones_like(np.asarray(r, float)))
        self.delta = float(delta)
        self.seed = seed
        self.taper = taper
        rng = np.random.default_rng(seed)
        m = np.arange(1, modes + 1)
        decay = 1.0 / m**3
        self.m = m
        self.ca = rng.standard_normal(modes) * decay
        self.cb = rng.standard_normal(modes) * decay
        self.ea = rng.standard_normal(modes) * decay
        self.eb = rng.standard_normal(modes) * decay
        if abs(self.delta) >= self.delta_limit:
            raise ValueError(
                f"delta={delta:g} exceeds {self.delta_limit:.4g}, beyond which the "
                "generating function no longer defines a map"
            )

    @property
    def delta_limit(self) -> float:
        """Largest |delta| keeping r' -> r' + delta c(r') s_theta(r', theta) monotone."""
        rp = np.linspace(-1.0, 1.0, 801)[:, None]
        th = np.linspace(0.0, 2 * np.pi, 256, endpoint=False)[None, :]
        c, dc, _ = _taper(rp, *self.taper)
        _, st, _, _, srt = self._s(rp, th)
        return float(1.0 / np.max(np.abs(dc * st + c * srt)))

    def _s(self, rp, th):
        """s and the partials s_theta, s_thetatheta, s_r, s_rtheta (s_rr = 0)."""
        rp = np.asarray(rp, float)[..., None]
        th = np.asarray(th, float)[..., None]
        m = self.m
        cos, sin = np.cos(m * th), np.sin(m * th)
        A = self.ca + self.ea * rp
        B = self.cb + self.eb * rp
        s = np.sum(A * cos + B * sin, -1)
        st = np.sum(m * (-A * sin + B * cos), -1)
        stt = np.sum(-(m**2) * (A * cos + B * sin), -1)
        sr = np.sum(self.ea * cos + self.eb * sin, -1)
        srt = np.sum(m * (-self.ea * sin + self.eb * cos), -1)
        return s, st, stt, sr, srt

    def _solve_rp(self, r, th):
        r = np.asarray(r, float)
        rp = r.copy()
        if self.delta == 0:
            return rp
        for _ in range(50):
            c, dc, _ = _taper(rp, *self.taper)
            s, st, stt, sr, srt = self._s(rp, th)
            f = rp + self.delta * c * st - r
            df = 1.0 + self.delta * (dc * st + c * srt)
            step = f / df
            rp = rp - step
            if np.max(np.abs(step)) <= 1e-15 * max(1.0, float(np.max(np.abs(rp)))):
                return rp
        if np.max(np.abs(f)) > 1e-13:
            raise ValueError("implicit twist equation did not converge")
        return rp

    def __call__(self, r, th):
        r = np.asarray(r, float)
        th = np.asarray(th, float)
        if np.any(np.abs(r) > 1):
            raise ValueError("point outside the annulus")
        rp = self._solve_rp(r, th)
        out = th + self.sigma(rp)
        if self.delta:
            c, dc, _ = _taper(rp, *self.taper)
            s, st, stt, sr, srt = self._s(rp, th)
            out = out + self.delta * (dc * s + c * sr)
        return rp, out

    def jacobian(self, r, th):
        """Exact derivative of the map, shape (..., 2, 2), rows (r', theta')."""
        r = np.asarray(r, float)
        th = np.asarray(th, float)
        rp = self._solve_rp(r, th)
        d = self.delta
        c, dc, ddc = _taper(rp, *self.taper)
        s, st, stt, sr, srt = self._s(rp, th)
        a_r = dc * st + c * srt
        a_t = c * stt
        b_r = ddc * s + 2 * dc * sr
        b_t = dc * st + c * srt
        den = 1.0 + d * a_r
        drp_dr = 1.0 / den
        drp_dt = -d * a_t / den
        slope = self.dsigma(rp) + d * b_r
        out = np.empty(r.shape + (2, 2))
        out[..., 0, 0] = drp_dr
        out[..., 0, 1] = drp_dt
        out[..., 1, 0] = slope * drp_dr
        out[..., 1, 1] = 1.0 + d * b_t + slope * drp_dt
        return out


@dataclass
class RotationEstimate:
    value: float
    error: float
    n: int

    def __float__(self):
        return self.value


def _weights(n):
    t = (np.arange(n) + 0.5) / n
    w = np.exp(-1.0 / (t * (1.0 - t)))
    return w / w.sum()


def rotation_number(tmap: TwistMap, r0: float, N: int = 10_000, theta0: float = 0.0) -> RotationEstimate:
    """Weighted Birkhoff average of the angle increments, in turns per iterate.

    The error estimate compares the full average with the one over the
    first half of the orbit.

    Raises
    ------
    ValueError
        If the orbit leaves the annulus.
    """
    r, th = float(r0), float(theta0)
    inc = np.empty(N)
    for k in range(N):
        if abs(r) > 1:
            raise ValueError(f"orbit left the annulus at iterate {k}")
        rn, thn = tmap(r, th)
        inc[k] = thn - th
        r, th = float(rn), float(thn) % (2 * np.pi)
    inc /= 2 * np.pi
    full = float(np.sum(_weights(N) * inc))
    half = float(np.sum(_weights(N // 2) * inc[: N // 2]))
    return RotationEstimate(full, abs(full - half), N)


class CircleNotFound(RuntimeError):
    """Fourier-Newton iteration did not converge."""


@dataclass
class InvariantCircle:
    """Invariant curve r = r0 + g1(x), theta = x + g2(x), mapped by x -> x + kappa."""

    kappa: float
    r0: float
    g1: np.ndarray
    g2: np.ndarray
    residual: float
    norm_g1: float
    norm_g2: float
    translation: float
    n_modes: int
    delta: float
    iterations: int = 0

    @property
    def rotation(self) -> float:
        return self.kappa / (2 * np.pi)

    def coefficients(self):
        return np.fft.rfft(self.g1) / self.g1.size, np.fft.rfft(self.g2) / self.g2.size

    def evaluate(self, x):
        """Curve points at parameters x via trigonometric interpolation."""
        x = np.asarray(x, float)
        return self.r0 + _interp(self.g1, x), x + _interp(self.g2, x)


def _interp(values, x):
    n = values.size
    c = np.fft.rfft(values) / n
    k = np.arange(c.size)
    if n % 2 == 0:
        c = c.copy()
        c[-1] *= 0.5
    ph = np.exp(1j * np.multiply.outer(np.asarray(x, float), k))
    out = c[0].real + 2 * np.real(ph[..., 1:] @ c[1:])
    return out


def _shift_matrix(n, kappa):
    """Real matrix taking nodal values g(x_j) to g(x_j + kappa), n odd."""
    k = np.fft.fftfreq(n, 1.0 / n)
    eye = np.eye(n)
    return np.real(np.fft.ifft(np.fft.fft(eye, axis=0) * np.exp(1j * k * kappa)[:, None], axis=0))


def _spectral_derivative(values):
    n = values.size
    k = np.fft.fftfreq(n, 1.0 / n)
    return np.real(np.fft.ifft(1j * k * np.fft.fft(values)))


def _norms(g1, g2):
    n1 = float(np.max(np.abs(g1)) + np.max(np.abs(_spectral_derivative(g1))))
    n2 = float(np.max(np.abs(g2)) + np.max(np.abs(_spectral_derivative(g2))))
    return n1, n2


def _invariance_error(tmap, r0, g1, g2, kappa, lam, m=4):
    """Max invariance defect on a grid m times finer than the nodes."""
    n = g1.size
    x = 2 * np.pi * np.arange(m * n) / (m * n)
    r = r0 + _interp(g1, x)
    th = x + _interp(g2, x)
    rn, thn = tmap(r, th)
    e1 = rn + lam - (r0 + _interp(g1, x + kappa))
    e2 = thn - (x + kappa + _interp(g2, x + kappa))
    return float(max(np.max(np.abs(e1)), np.max(np.abs(e2))))


def find_invariant_circle(
    tmap: TwistMap,
    kappa: float,
    tol: float = 1e-10,
    n_modes: int = 64,
    alpha: float = 0.2,
    beta: float = 2.0,
    K: int = 10_000,
    max_iter: int = 40,
    max_modes: int = 512,
    r0: float | None = None,
) -> InvariantCircle:
    """Solve F(r0 + g1(x), x + g2(x)) = (r0 + g1(x + kappa) - lam, x + kappa + g2(x + kappa)).

    Unknowns are the nodal values of g1 and g2 on 2 n_modes + 1 points (both
    with zero mean), the level r0 and a translation lam, which vanishes for
    exact area-preserving maps and keeps the Newton system square.  The
    number of modes is doubled when Newton stagnates.

    Raises
    ------
    ValueError
        If kappa / 2 pi fails the Diophantine condition with (alpha, beta).
    CircleNotFound
        If Newton does not reach the tolerance.
    """
    dio = diophantine(kappa / (2 * np.pi), alpha, beta, K)
    if not dio.passed:
        raise ValueError(
            f"rotation {kappa / (2 * np.pi):.6g} is not Diophantine "
            f"(worst {dio.worst[0]}/{dio.worst[1]}, ratio {dio.worst_ratio:.3g})"
        )
    if r0 is None:
        r0 = 1.0 - kappa / np.pi
    n = 2 * n_modes + 1
    if tmap.delta == 0:
        z = np.zeros(n)
        return InvariantCircle(kappa, r0, z, z.copy(), 0.0, 0.0, 0.0, 0.0, n_modes, 0.0)
    g1 = np.zeros(n)
    g2 = np.zeros(n)
    lam = 0.0
    modes = n_modes
    total_iter = 0
    while True:
        n = 2 * modes + 1
        x = 2 * np.pi * np.arange(n) / n
        S = _shift_matrix(n, kappa)
        last = np.inf
        for it in range(max_iter):
            total_iter += 1
            r = r0 + g1
            th = x + g2
            rn, thn = tmap(r, th)
            e1 = rn + lam - r0 - S @ g1
            e2 = thn - x - kappa - S @ g2
            res = float(max(np.max(np.abs(e1)), np.max(np.abs(e2))))
            if res < 0.1 * tol:
                break
            J = tmap.jacobian(r, th)
            A = np.zeros((2 * n + 2, 2 * n + 2))
            A[:n, :n] = np.diag(J[:, 0, 0]) - S
            A[:n, n:2 * n] = np.diag(J[:, 0, 1])
            A[n:2 * n, :n] = np.diag(J[:, 1, 0])
            A[n:2 * n, n:2 * n] = np.diag(J[:, 1, 1]) - S
            A[:n, 2 * n] = J[:, 0, 0] - 1.0
            A[n:2 * n, 2 * n] = J[:, 1, 0]
            A[:n, 2 * n + 1] = 1.0
            A[2 * n, :n] = 1.0 / n
            A[2 * n + 1, n:2 * n] = 1.0 / n
            rhs = -np.concatenate([e1, e2, [np.mean(g1), np.mean(g2)]])
            step = np.linalg.lstsq(A, rhs, rcond=None)[0]
            g1 = g1 + step[:n]
            g2 = g2 + step[n:2 * n]
            r0 = r0 + step[2 * n]
            lam = lam + step[2 * n + 1]
            if not np.all(np.isfinite(step)) or np.max(np.abs(r0 + g1)) > 1:
                raise CircleNotFound("Newton iterate left the annulus")
            if res > 0.5 * last and it > 5:
                break
            last = res
        err = _invariance_error(tmap, r0, g1, g2, kappa, lam)
        if err < tol:
            n1, n2 = _norms(g1, g2)
            return InvariantCircle(kappa, float(r0), g1, g2, err, n1, n2, float(lam),
                                   modes, tmap.delta, total_iter)
        if 2 * modes > max_modes:
            raise CircleNotFound(f"no invariant circle to tolerance {tol:g} (defect {err:.3e})")
        xs = 2 * np.pi * np.arange(4 * modes + 1) / (4 * modes + 1)
        g1, g2 = _interp(g1, xs), _interp(g2, xs)
        modes *= 2


def circle_set_error(tmap: TwistMap, circle: InvariantCircle, n: int = 64) -> float:
    """Distance in r of forward images of n curve points from the curve, at equal theta."""
    from scipy.optimize import brentq

    xs = 2 * np.pi * (np.arange(n) + 0.5) / n
    r, th = circle.evaluate(xs)
    rn, thn = tmap(r, th)
    worst = 0.0
    for rk, tk in zip(rn, thn):
        f = lambda y: y + _interp(circle.g2, y) - tk  # noqa: E731
        lo, hi = tk - 1.0, tk + 1.0
        y = brentq(f, lo, hi, xtol=1e-15)
        worst = max(worst, abs(rk - (circle.r0 + _interp(circle.g1, y))))
    return worst
