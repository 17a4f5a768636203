import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from layerpot import build_polyline, make_curve, parse_density
from layerpot.curve import Curve
from layerpot.diagnostics import (ModulusTable, ahlfors_check, annulus_pieces, density_modulus,
                                  dini_integral, dyadic_sectors, fit_lemma3_constant, k_gamma,
                                  kral_check, kral_functional, lemma_inequality_check,
                                  modulus_of_continuity, omega_characteristic, oscillation_count,
                                  oscillation_profile, phi_gamma, radius_grid, ray_crossings,
                                  theta_report)


def polygon(pts):
    pts = np.asarray(pts, dtype=complex)
    return Curve(np.append(pts, pts[0]))


def brute_phi(curve, xi, R, n=20000):
    # directions meeting the annulus, by sampling rays against dense curve points
    a, b = curve.vertices[:-1], curve.vertices[1:]
    u = np.linspace(0, 1, 200)[:, None]
    pts = (a + u * (b - a)).ravel() - xi
    r = np.abs(pts)
    sel = (r > R / 2) & (r < R)
    ang = np.mod(np.angle(pts[sel]), 2 * np.pi)
    hit = np.zeros(n, bool)
    hit[np.floor(ang / (2 * np.pi) * n).astype(int) % n] = True
    return hit.mean() * 2 * np.pi


def test_ray_crossings_circle(circle):
    assert ray_crossings(circle, 1.0, np.pi) == 1
    assert ray_crossings(circle, 1.0, np.pi / 2 - 0.3) == 0
    assert ray_crossings(circle, 0.0, 0.4) == 1
    assert list(ray_crossings(circle, 5.0, np.array([0.0, np.pi]))) == [0, 2]


def test_kral_functional_circle(circle):
    assert kral_functional(circle, 1.0) == pytest.approx(np.pi, abs=2e-3)
    n = circle.n_segments
    assert kral_functional(circle, 1.0, exact=True) == pytest.approx(np.pi * (n - 2) / n, abs=1e-9)
    with pytest.raises(ValueError):
        kral_functional(circle, 1.0, grid_size=100)


@settings(max_examples=20, deadline=None)
@given(st.integers(3, 12), st.floats(0, 2 * np.pi), st.floats(0.2, 4))
def test_kral_at_vertex_of_regular_polygon(n, phase, scale):
    pts = scale * np.exp(1j * (phase + 2 * np.pi * np.arange(n) / n))
    c = polygon(pts)
    interior = np.pi * (n - 2) / n
    assert kral_functional(c, pts[0], exact=True) == pytest.approx(interior, abs=1e-9)


def test_theta_ratio_circle(circle):
    rep = theta_report(circle, [1e-3], circle.vertices[::64])
    assert 2.0 <= rep.ratio[0] <= 2.01
    with pytest.raises(ValueError):
        theta_report(circle, [0.0])


def test_ahlfors_and_kral_checks(circle):
    ok, rep = ahlfors_check(circle)
    assert ok and rep.constant < 2.1
    ok, res = kral_check(circle, circle.vertices[:2])
    assert ok


def test_annulus_pieces_and_oscillation(circle):
    pieces = annulus_pieces(circle, 1.0, 0.5, 1.0)
    assert len(pieces) == 2
    # the circle leaves xi = 1 at angles near +-pi/2: one crossing in a sector near pi/2
    assert oscillation_count(circle, 1.0, 1.0, 1.9, 2.0) == 1
    assert oscillation_count(circle, 1.0, 1.0, 0.0, 0.5) == 0
    assert oscillation_count(circle, 1.0, 1.0, -0.2, 0.2) == 0
    with pytest.raises(ValueError):
        oscillation_count(circle, 1.0, 1.0, 1.0, 0.5)
    assert k_gamma(circle, 1.0, 1.0) == 1
    with pytest.raises(ValueError):
        k_gamma(circle, 1.0, 1.0, sectors=dyadic_sectors()[:10])


def test_dyadic_sectors_shape():
    s = dyadic_sectors()
    assert s.shape == (252, 2)
    assert np.all(s[:, 1] > s[:, 0])


def test_ex3_oscillations_thin_out():
    # the angular amplitude decays like 1/|ln r|: several crossings at moderate
    # radii, too thin for the sampled sectors near 0
    c = make_curve("ex3", depth=8)
    assert k_gamma(c, 0.0, 0.25) >= 2
    assert k_gamma(c, 0.0, 2.0 ** -6) == 1
    phis = [phi_gamma(c, 0.0, 2.0 ** -j) for j in range(2, 8)]
    assert all(a > b for a, b in zip(phis, phis[1:]))


@pytest.mark.parametrize("R", [1.0, 0.5, 0.1])
def test_phi_matches_ray_sampling(circle, R):
    assert phi_gamma(circle, 1.0, R) == pytest.approx(brute_phi(circle, 1.0, R), abs=2e-3)


def test_phi_on_spiral_matches_ray_sampling():
    c = make_curve("ex3", depth=6)
    for R in (0.5, 0.125):
        assert phi_gamma(c, 0.0, R) == pytest.approx(brute_phi(c, 0.0, R, 4000), abs=1e-2)


def test_radius_grid_and_profile(circle):
    g = radius_grid(0.125, 1.0)
    assert g[-1] == 1.0 and g[0] <= 0.125 and g.size == 22
    prof = oscillation_profile(circle, 1.0, 0.125, 1.0)
    assert np.all(prof.k_hat >= prof.k) and np.all(prof.phi_hat >= prof.phi)


def test_modulus_of_constant_and_linear(circle):
    eta = np.geomspace(1e-3, 2, 40)
    const = density_modulus(circle, parse_density("const:1"), eta)
    assert np.all(const.omega == 0)
    lin = density_modulus(circle, parse_density("re"), eta)
    assert np.all(lin.omega <= eta + 1e-12)
    assert lin.omega[-1] == pytest.approx(2.0, abs=1e-3)
    assert np.all(np.diff(lin.omega) >= 0)


def test_modulus_dense_and_tree_paths_agree():
    rng = np.random.default_rng(1)
    p = rng.random(600) + 1j * rng.random(600)
    v = np.sin(5 * p.real) + p.imag ** 2
    small = np.geomspace(1e-3, 0.05, 10)
    a = modulus_of_continuity(v, p, small)
    b = modulus_of_continuity(v, p, np.append(small, 5.0))
    assert np.allclose(a.omega, b.omega[:-1])


def test_omega_characteristic_examples():
    eta = np.geomspace(1e-4, 1, 200)
    lin = ModulusTable(eta, eta.copy(), 0)
    assert omega_characteristic(lin, 1e-2, 0.5) == pytest.approx(1.0)
    root = ModulusTable(eta, np.sqrt(eta), 0)
    assert omega_characteristic(root, eta[50], eta[100]) == pytest.approx(eta[50] ** -0.5)
    with pytest.raises(ValueError):
        omega_characteristic(lin, 0.5, 0.1)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=5, max_size=30), st.data())
def test_omega_characteristic_monotone(incs, data):
    eta = np.geomspace(1e-3, 1, len(incs))
    tab = ModulusTable(eta, np.cumsum(incs), 0)
    i, j, k = sorted(data.draw(st.lists(st.integers(0, len(incs) - 1), min_size=3, max_size=3)))
    a, b, c = eta[i], eta[j], eta[k]
    # shrinking the interval cannot increase Omega
    assert omega_characteristic(tab, a, c) >= omega_characteristic(tab, b, c) - 1e-12
    assert omega_characteristic(tab, a, c) >= omega_characteristic(tab, a, b) - 1e-12


def test_dini_integral_of_linear_modulus():
    eta = np.geomspace(2.0 ** -20, 1, 400)
    res = dini_integral(ModulusTable(eta, eta.copy(), 0))
    assert res.converged
    assert res.values[-1] == pytest.approx(1.0, abs=1e-3)
    log_mod = 1 / np.log(2 / eta)
    assert dini_integral(ModulusTable(eta, log_mod, 0)).divergent
    with pytest.raises(ValueError):
        dini_integral(ModulusTable(eta, eta.copy(), 0), kind="other")


def test_lemma2_on_circle(circle):
    g = parse_density("re")
    for R in (1.0, 0.5, 0.25):
        r = lemma_inequality_check(circle, g, 1.0, R=R)
        assert r["ratio"] <= 1
    zero = lemma_inequality_check(circle, parse_density("const:1"), 1.0, R=0.5)
    assert zero["lhs"] == 0 and zero["ratio"] == 0
    with pytest.raises(ValueError):
        lemma_inequality_check(circle, g, 1.0)


def test_lemma3_fit(circle):
    g = parse_density("re")
    res = [lemma_inequality_check(circle, g, 1.0, which="lemma3", delta=d, eps=0.5)
           for d in (0.1, 0.01)]
    c = fit_lemma3_constant(res)
    assert all(r["ratio"] <= c for r in res)
    with pytest.raises(ValueError):
        lemma_inequality_check(circle, g, 1.0, which="lemma3", delta=0.5, eps=0.1)


@settings(max_examples=30, deadline=None)
@given(st.floats(1.01, 50), st.floats(0.1, 10))
def test_kral_grid_matches_exact_for_collinear_edges(x, scale):
    # xi on the line of the bottom edge: that edge is radial and has zero width
    c = polygon(scale * np.array([0, 1, 1 + 1j, 1j]))
    grid = kral_functional(c, scale * x, grid_size=3600)
    exact = kral_functional(c, scale * x, exact=True)
    assert abs(grid - exact) <= 4 * 2 * np.pi / 3600
    assert ray_crossings(c, scale * x, np.pi) == 0
