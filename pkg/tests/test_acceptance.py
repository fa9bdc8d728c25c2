"""Acceptance suite: nine end-to-end criteria with tolerances and runtime limits.

Each criterion prints one PASS/FAIL line (collected in the pytest terminal
summary).  Run ``python3 tests/test_acceptance.py`` for the lines alone.
"""

import time

import numpy as np

from reebgss.contact import build_profile, contact_margin, reeb_at, reeb_identities, validate_contact
from reebgss.flow import (
    Section,
    continue_binding_orbit,
    mapping_torus_field,
    normal_quadratic_form,
    orbit_displacement,
    return_map,
    transversality_margin,
    trig_perturbation,
)
from reebgss.kam import (
    ModifiedHamiltonian,
    TwistMap,
    default_g,
    diophantine,
    find_invariant_circle,
    nondegeneracy,
)
from reebgss.linking import (
    brute_force_bound,
    certify_lower_bound,
    circle,
    gauss_link,
    replay_certificate,
    torus_curve,
)
from reebgss.morse import make_model, verify_properties
from reebgss.openbook import decompose, dehn_sigma, example_chain, make_annulus_book

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # standalone run
    ACCEPTANCE_LINES = []

T, A = -2 * np.pi, np.sqrt(2.0)
NONDEGENERACY_THRESHOLD = 1e-3


def report(k, name, ok, elapsed, limit, detail):
    ok = bool(ok) and elapsed < limit
    line = f"criterion {k} [{name}]: {'PASS' if ok else 'FAIL'} ({elapsed:.2f}s < {limit:g}s; {detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def test_criterion_1_contact_validity():
    t0 = time.perf_counter()
    ch = build_profile(T, A)
    margin = validate_contact(ch, 10_000)
    r = np.arange(1, 10_001) / 10_000
    m = contact_margin(ch, r)
    inner, outer = r <= ch.r_inner, r >= 0.5
    e_in = np.max(np.abs(m[inner] - 4 * r[inner]))
    e_out = np.max(np.abs(m[outer] - (-T / (2 * np.pi)) * np.exp(0.5 - r[outer])))
    el = time.perf_counter() - t0
    ok = margin > 0 and e_in < 1e-9 and e_out < 1e-9
    assert report(1, "contact validity", ok, el, 1.0,
                  f"margin {margin:.3e}, inner err {e_in:.1e}, outer err {e_out:.1e}")


def test_criterion_2_reeb_closed_form():
    t0 = time.perf_counter()
    ch = build_profile(T, A)
    r = np.linspace(0.0, ch.r_inner, 500)
    v = reeb_at(ch, r)
    e_freq = max(np.max(np.abs(v.v_theta1 - 0.5)), np.max(np.abs(v.v_theta2 - A / 2)))
    rr = np.linspace(0.001, 0.999, 999)
    e_alpha, e_contr = reeb_identities(ch, rr)
    e_id = max(np.max(np.abs(e_alpha)), np.max(np.abs(e_contr)))
    el = time.perf_counter() - t0
    ok = e_freq < 1e-12 and e_id < 1e-9
    assert report(2, "Reeb closed form", ok, el, 1.0,
                  f"frequency err {e_freq:.1e}, identity residual {e_id:.1e}")


def test_criterion_3_open_book_return_map():
    t0 = time.perf_counter()
    fld = mapping_torus_field(make_annulus_book())
    sec = Section(2, 0.3)
    err = 0.0
    for x in np.linspace(-1.0, 1.0, 100):
        y, _ = return_map(fld, sec, [x, 0.7, 0.3], 1e-10, 1e-12, period_estimate=np.pi)
        expect = 0.7 + dehn_sigma(x)
        err = max(err, abs((y[1] - expect + np.pi) % (2 * np.pi) - np.pi))
    el = time.perf_counter() - t0
    assert report(3, "open-book return map", err < 1e-8, el, 10.0, f"max twist error {err:.1e}")


def test_criterion_4_morse_model():
    t0 = time.perf_counter()
    model = make_model()
    rep = verify_properties(model)
    el = time.perf_counter() - t0
    mult = np.array(rep["saddle"]["multipliers"])
    rel = np.max(np.abs(mult - np.exp([-2 * np.pi, 2 * np.pi])) / np.exp([-2 * np.pi, 2 * np.pi]))
    drift = rep["energy_drift"]
    rot = rep["rotation"]["max_error"]
    n_rad = len(rep["rotation"]["radii"])
    ok = rel < 1e-4 and drift < 1e-8 and rot < 1e-6 and n_rad == 20
    assert report(4, "Morse model", ok, el, 30.0,
                  f"multiplier rel err {rel:.1e}, drift {drift:.1e}, rotation err {rot:.1e}")


def test_criterion_5_certifier_vs_oracle():
    t0 = time.perf_counter()
    rows = []
    ok = True
    for regime, ns, expected in (("thm1", (1, 2, 3), lambda n: n + 1), ("thm2", (1, 2), lambda n: n)):
        for n in ns:
            dec = decompose(example_chain(n, regime), regime)
            cert = certify_lower_bound(dec)
            brute = brute_force_bound(dec)
            replay = replay_certificate(cert, dec)
            ok &= cert.bound == brute == replay == expected(n)
            rows.append(f"{regime} n={n}: {cert.bound}/{brute}")
    el = time.perf_counter() - t0
    assert report(5, "certifier vs oracle", ok, el, 60.0, ", ".join(rows))


def test_criterion_6_linking_oracle():
    t0 = time.perf_counter()
    a = circle((0, 0, 0), 1.0, (0, 0, 1))
    b = circle((1, 0, 0), 1.0, (0, 1, 0))
    far = circle((4, 0, 0), 1.0, (0, 0, 1))
    checks = [(gauss_link(a, b), gauss_link(b, a), 1), (gauss_link(a, far), gauss_link(far, a), 0)]
    core = circle((0, 0, 0), 2.0, (0, 0, 1), n=400)
    for p, q in ((1, 1), (2, 3), (3, 5), (2, -1)):
        c = torus_curve(p, q, n=800)
        checks.append((gauss_link(core, c), gauss_link(c, core), q))
    ok = all(x.value == want for x, _, want in checks)
    ok &= all(x.value == y.value and x.residual < 0.05 and y.residual < 0.05 for x, y, _ in checks)
    el = time.perf_counter() - t0
    res = max(max(x.residual, y.residual) for x, y, _ in checks)
    assert report(6, "linking oracle", ok, el, 30.0,
                  f"values {[x.value for x, _, _ in checks]}, max residual {res:.1e}")


def test_criterion_7_kam_persistence():
    t0 = time.perf_counter()
    kappa = np.pi * (2 - np.sqrt(2))
    zero = find_invariant_circle(TwistMap(), kappa)
    ok = not zero.g1.any() and not zero.g2.any() and zero.residual == 0
    norms, resid = [], []
    for seed in (0, 1, 2):
        seq = []
        for delta in (1e-5, 1e-4, 1e-3):
            c = find_invariant_circle(TwistMap(delta=delta, seed=seed), kappa, tol=1e-10)
            resid.append(c.residual)
            seq.append(c.norm_g1 + c.norm_g2)
        norms.append(seq)
        ok &= bool(np.all(np.diff(seq) > 0))
    ok &= max(resid) < 1e-10
    el = time.perf_counter() - t0
    assert report(7, "KAM persistence", ok, el, 120.0,
                  f"max residual {max(resid):.1e}, norms seed0 {['%.2e' % x for x in norms[0]]}")


def test_criterion_8_binding_continuation():
    t0 = time.perf_counter()
    ch = build_profile(T, A)
    h = trig_perturbation(0)
    orb = continue_binding_orbit(ch, h, 1e-4)
    half = continue_binding_orbit(ch, h, 5e-5)
    ratio = orbit_displacement(half) / orbit_displacement(orb)
    tr = transversality_margin(ch, 1e-4, n_probes=1000, h=h, orbit=orb)
    q = normal_quadratic_form(ch, 0.0)
    qerr = np.max(np.abs(q - A * np.eye(2)))
    el = time.perf_counter() - t0
    ok = 0.4 <= ratio <= 0.6 and tr.margin > 0 and tr.n_probes == 1000 and qerr < 1e-6
    assert report(8, "binding continuation", ok, el, 60.0,
                  f"ratio {ratio:.4f}, margin {tr.margin:.3f}, form err {qerr:.1e}")


def test_criterion_9_nondegeneracy():
    t0 = time.perf_counter()
    deg = nondegeneracy(ModifiedHamiltonian(A, None))
    nd = nondegeneracy(ModifiedHamiltonian(A, default_g()))
    dio = diophantine(A, 0.2, 2, 10_000)
    el = time.perf_counter() - t0
    ok = deg.min_abs_det < 1e-10 and nd.min_abs_det > NONDEGENERACY_THRESHOLD and dio.passed
    assert report(9, "non-degeneracy", ok, el, 10.0,
                  f"|det| g=0 {deg.min_abs_det:.1e}, default g {nd.min_abs_det:.3e} > "
                  f"{NONDEGENERACY_THRESHOLD:g}, sqrt2 worst {dio.worst[0]}/{dio.worst[1]}")


if __name__ == "__main__":
    import sys

    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion"):
            try:
                fn()
            except AssertionError:
                failed += 1
            except Exception as exc:  # noqa: BLE001
                print(f"{name}: FAIL ({type(exc).__name__}: {exc})")
                failed += 1
    sys.exit(1 if failed else 0)
