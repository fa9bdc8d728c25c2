from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from reebgss.kam import (
    CircleNotFound,
    ModifiedHamiltonian,
    RampProfile,
    TwistMap,
    circle_set_error,
    continued_fraction,
    convergents,
    default_g,
    diophantine,
    find_invariant_circle,
    frequency,
    hessian,
    nondegeneracy,
    rotation_number,
)

A = np.sqrt(2.0)
KAPPA = np.pi * (2 - np.sqrt(2))  # rotation (2 - sqrt 2)/2 of a turn


def test_ramp_profile():
    g = default_g()
    r = np.linspace(0, 0.4, 401)
    assert np.all(g(r[r <= 0.1]) == 0)
    h = 1e-6
    rs = np.linspace(0.05, 0.35, 31)
    fd = (g(rs + h) - g(rs - h)) / (2 * h)
    assert np.allclose(fd, g.derivative(rs), atol=1e-9)
    ratio = g.derivative(r[r > 0.1]) / r[r > 0.1]
    assert np.all(np.diff(ratio) >= -1e-15)
    with pytest.raises(ValueError):
        RampProfile(r0=0.3, r1=0.2)


def test_frequency_without_g_is_proportional():
    H = ModifiedHamiltonian(A)
    w1, w2 = frequency(H, 2.0, 0.0)
    assert (w1, w2) == pytest.approx((1.0, A))
    I1 = np.linspace(0.5, 2, 7)
    I2 = np.linspace(0.1, 0.3, 7)
    w1, w2 = frequency(H, I1, I2)
    assert np.allclose(w2 / w1, A)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.9, 1.1), st.floats(0.05, 0.3))
def test_frequency_matches_difference_quotients(rho, r):
    H = ModifiedHamiltonian(A, default_g(0.07))
    I1, I2 = rho * (2 - A * r * r), rho * r * r
    h = 1e-6
    fd1 = (H(I1 + h, I2) - H(I1 - h, I2)) / (2 * h)
    fd2 = (H(I1, I2 + h) - H(I1, I2 - h)) / (2 * h)
    w1, w2 = frequency(H, I1, I2)
    assert abs(w1 - fd1) < 1e-6 and abs(w2 - fd2) < 1e-6


def test_frequency_singular():
    with pytest.raises(ZeroDivisionError):
        frequency(ModifiedHamiltonian(A), -A, 1.0)


def test_degenerate_hessian_is_rank_one():
    H = ModifiedHamiltonian(A)
    hs = hessian(H, 1.3, 0.2)
    assert np.allclose(hs, 0.5 * np.array([[1, A], [A, A * A]]), atol=1e-8)
    assert nondegeneracy(H).min_abs_det < 1e-10


def test_nondegeneracy_scales_linearly():
    dets = [nondegeneracy(ModifiedHamiltonian(A, default_g(s)), (1.0, 1.0), grid=21).min_abs_det
            for s in (0.04, 0.02, 0.01)]
    assert all(d > 0 for d in dets)
    assert dets[0] / dets[1] == pytest.approx(2, rel=0.02)
    assert dets[1] / dets[2] == pytest.approx(2, rel=0.02)
    rep = nondegeneracy(ModifiedHamiltonian(A, default_g()))
    assert rep.single_signed and rep.min_abs_det > 1e-3


def test_continued_fractions():
    assert continued_fraction(np.sqrt(2), 6) == [1, 2, 2, 2, 2, 2]
    conv = convergents((1 + np.sqrt(5)) / 2, 8)
    fib = [1, 1, 2, 3, 5, 8, 13, 21, 34]
    assert conv == [(fib[i + 1], fib[i]) for i in range(8)]
    assert convergents(0.5) == [(0, 1), (1, 2)]


def test_scalar_diophantine():
    res = diophantine(np.sqrt(2), 0.2, 2, 10_000)
    assert res.passed and res.worst == (3, 2)
    assert diophantine(0.5).worst == (1, 2) and not diophantine(0.5)
    bad = diophantine(1 / 3, 0.2, 2)
    assert not bad.passed and bad.worst == (1, 3)
    with pytest.raises(ValueError):
        diophantine(np.sqrt(2), K=50)
    with pytest.raises(ValueError):
        diophantine(np.sqrt(2), c=0)


def test_scalar_worst_offender_by_brute_force():
    # independent oracle with exact rationals
    x = np.sqrt(3)
    best = min((Fraction(q) ** 2 * abs(Fraction(x) - Fraction(round(q * x), q)), q)
               for q in range(1, 300))
    res = diophantine(x, 1.0, 2, 299)
    assert res.worst[1] == best[1]
    assert res.worst_ratio == pytest.approx(float(best[0]), rel=1e-9)


def test_pair_worst_offender_is_a_convergent():
    phi = (1 + np.sqrt(5)) / 2
    res = diophantine((1.0, phi), 1.0, 2, 10_000)
    assert res.passed
    k1, k2 = res.worst
    # k = (-1, 0): the zeroth convergent 0/1 of 1/phi
    assert (abs(k1), k2) in {(q, p) for p, q in convergents(1 / phi, 25)} | {(1, 0)}
    lin = diophantine((1.0, phi), 1.2, 1, 10_000)
    k1, k2 = lin.worst
    assert (-k1, k2) in convergents(phi, 30)


def test_pair_matches_exhaustive_small():
    w = np.array([1.0, np.sqrt(2)])
    K, c, gamma = 100, 0.5, 1.5
    best = np.inf
    for k1 in range(-K, K + 1):
        for k2 in range(-K, K + 1):
            n = np.hypot(k1, k2)
            if 0 < n <= K:
                best = min(best, c * n**gamma * abs(k1 * w[0] + k2 * w[1]))
    assert diophantine(w, c, gamma, K).worst_ratio == pytest.approx(best, rel=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.floats(-0.95, 0.95), st.floats(0, 2 * np.pi), st.integers(0, 1000),
       st.sampled_from([1e-3, 5e-3, 1e-2]))
def test_twist_map_area_preserving(r, th, seed, delta):
    assume(delta < 0.9 * TwistMap(seed=seed).delta_limit)
    tm = TwistMap(delta=delta, seed=seed)
    J = tm.jacobian(np.array([r]), np.array([th]))[0]
    assert abs(np.linalg.det(J) - 1) < 1e-8
    h = 1e-6
    for j, e in enumerate(([h, 0], [0, h])):
        p = np.array(tm(np.array([r + e[0]]), np.array([th + e[1]]))).ravel()
        m = np.array(tm(np.array([r - e[0]]), np.array([th - e[1]]))).ravel()
        assert np.allclose((p - m) / (2 * h), J[:, j], atol=1e-7)


def test_twist_map_unperturbed_and_cutoff():
    tm = TwistMap()
    r, th = tm(np.array([0.3]), np.array([1.0]))
    assert r[0] == 0.3 and th[0] == pytest.approx(1.0 + np.pi * 0.7)
    pert = TwistMap(delta=0.02, seed=2)
    for rr in (-0.95, 0.93):
        out = pert(np.array([rr]), np.array([0.4]))
        ref = tm(np.array([rr]), np.array([0.4]))
        assert np.allclose(out, ref, atol=1e-15)
    with pytest.raises(ValueError):
        tm(np.array([1.2]), np.array([0.0]))


@pytest.mark.parametrize("r0,expected", [(0.0, 0.5), (1.0, 0.0), (-1.0, 1.0), (0.3, 0.35)])
def test_rotation_unperturbed(r0, expected):
    est = rotation_number(TwistMap(), r0, 10_000)
    assert est.value == pytest.approx(expected, abs=1e-8)
    assert est.error < 1e-8


def test_rotation_escape():
    with pytest.raises(ValueError, match="left the annulus"):
        rotation_number(TwistMap(), 1.5, 200)


def test_delta_beyond_map_limit():
    limit = TwistMap(seed=3).delta_limit
    assert 0 < limit < 1
    with pytest.raises(ValueError, match="generating function"):
        TwistMap(delta=1.01 * limit, seed=3)


def test_circle_identity_at_zero():
    c = find_invariant_circle(TwistMap(), KAPPA)
    assert c.residual == 0 and not c.g1.any() and not c.g2.any()
    assert c.r0 == pytest.approx(np.sqrt(2) - 1)


def test_circle_rational_rejected():
    with pytest.raises(ValueError, match="not Diophantine"):
        find_invariant_circle(TwistMap(delta=1e-3), 2 * np.pi / 3)


def test_circle_properties():
    norms = []
    for delta in (1e-5, 1e-4, 1e-3):
        tm = TwistMap(delta=delta, seed=5)
        c = find_invariant_circle(tm, KAPPA)
        assert c.residual < 1e-10
        assert abs(c.translation) < 1e-10
        assert circle_set_error(tm, c) <= 2 * c.residual + 1e-14
        norms.append(c.norm_g1 + c.norm_g2)
        # the orbit on the circle rotates at the target rate
        est = rotation_number(tm, float(c.evaluate(0.0)[0]), 4000, float(c.evaluate(0.0)[1]))
        assert est.value == pytest.approx(KAPPA / (2 * np.pi), abs=1e-8)
    assert norms[0] < norms[1] < norms[2]
    assert norms[2] / norms[1] == pytest.approx(10, rel=0.05)


def test_circle_truncation_failure_reported():
    tm = TwistMap(delta=1e-2, seed=0)
    with pytest.raises(CircleNotFound):
        find_invariant_circle(tm, KAPPA, tol=1e-15, n_modes=2, max_modes=4)
