"""Acceptance suite: thirteen end-to-end criteria at their stated tolerances.

Run with ``pytest tests/test_acceptance.py``; the terminal summary prints
one PASS/FAIL line per criterion.
"""

from functools import lru_cache

import numpy as np
import pytest
from scipy.integrate import quad

from layerpot import (Density, boundary_limit, criterion_sweep, double_layer_potential,
                      kral_functional, make_curve, make_density_example4, parse_density,
                      total_arg_variation)
from layerpot.cli import main as cli_main
from layerpot.diagnostics import (ahlfors_check, density_modulus, dini_integral, kral_check,
                                  lemma_inequality_check, modulus_of_continuity,
                                  omega_characteristic, theorem3_report, theta_report)
from layerpot.zoo import AHLFORS_CONSTANT_EX4, _ex2_t, example2_r0

RNG_SEED = 20240611


def random_points(curve, n, inside, seed):
    rng = np.random.default_rng(seed)
    v = curve.vertices
    pad = 0.5 * curve.diameter
    out = []
    while len(out) < n:
        z = (rng.uniform(v.real.min() - pad, v.real.max() + pad, 256)
             + 1j * rng.uniform(v.imag.min() - pad, v.imag.max() + pad, 256))
        _, _, d = curve.nearest(z)
        w = curve.winding_number(z)
        keep = (w == (1 if inside else 0)) & (np.asarray(d) > 1e-3 * curve.diameter)
        out.extend(z[keep].tolist())
    return np.array(out[:n])


def arc_points(curve, n):
    return curve.point_at(curve.length * np.arange(n) / n)


# Closed form of 6 int_0^{1/2} d eta / (eta ln(3 eta/2)(ln eta - 1)): substitute x = -ln eta.
def ex4_corollary_bound():
    a = np.log(1.5)
    return 6.0 / (1 + a) * np.log((1 + np.log(2)) / (np.log(2) - a))


@lru_cache(maxsize=None)
def ex4_curve():
    return make_curve("ex4", depth=8)


@lru_cache(maxsize=None)
def ex4_table():
    c = ex4_curve()
    return density_modulus(c, make_density_example4(), np.geomspace(2.0 ** -18, c.diameter, 400))


@lru_cache(maxsize=None)
def circle_table():
    c = make_curve("circle")
    return density_modulus(c, Density.from_rule("re"), np.geomspace(1e-6, c.diameter, 400))


@lru_cache(maxsize=None)
def ex2_arg_table():
    r0 = example2_r0()
    r = np.geomspace(1e-60, r0, 600)
    pts = np.concatenate([[0.0], _ex2_t(r)])
    vals = np.angle(pts)
    eta = np.concatenate([r, np.geomspace(r0, 1.0, 20)[1:]])
    return modulus_of_continuity(vals, pts, eta)


def test_criterion_01():
    """Gauss identity: constant density gives 1 inside and 0 outside"""
    one = Density.from_rule("const", 1.0)
    cases = [("circle", None, 1e-6), ("ellipse", None, 1e-6), ("ex1", 6, 1e-4), ("ex4", 6, 1e-4)]
    for k, (name, depth, tol) in enumerate(cases):
        c = make_curve(name, depth=depth)
        zi = random_points(c, 50, True, RNG_SEED + k)
        ze = random_points(c, 50, False, RNG_SEED + 100 + k)
        assert np.max(np.abs(double_layer_potential(c, one, zi) - 1)) <= tol, name
        assert np.max(np.abs(double_layer_potential(c, one, ze))) <= tol, name


def test_criterion_02():
    """Residue oracle for Re t on the circle, interior, exterior and boundary"""
    c = make_curve("circle")
    g = Density.from_rule("re")
    zi = random_points(c, 20, True, RNG_SEED)
    ze = random_points(c, 20, False, RNG_SEED + 1)
    from layerpot import cauchy_integral
    assert np.max(np.abs(cauchy_integral(c, g, zi) - zi / 2)) <= 1e-7
    assert np.max(np.abs(cauchy_integral(c, g, ze) + 1 / (2 * ze))) <= 1e-7
    for xi in arc_points(c, 16):
        res = boundary_limit(c, g, xi, "+")
        assert res.discrepancy <= 1e-4


def test_criterion_03():
    """Sokhotski jump: extrapolated g+ - g- equals g(xi)"""
    cases = [(make_curve("circle"), Density.from_rule("re")),
             (make_curve("lyapunov"), parse_density("holder:0.5,0.3"))]
    for c, g in cases:
        for xi in arc_points(c, 16):
            p = boundary_limit(c, g, xi, "+", formula=False)
            m = boundary_limit(c, g, xi, "-", formula=False)
            gx = float(g(np.array([p.xi]))[0])
            assert abs(p.limit - m.limit - gx) <= 1e-3


def test_criterion_04():
    """ex4 regularity ratio stays below 4 + sqrt(1 + ln^2 2)/ln 2"""
    c = ex4_curve()
    assert AHLFORS_CONSTANT_EX4 == pytest.approx(5.7554, abs=1e-4)
    rep = theta_report(c, 2.0 ** -np.arange(1, 11))
    assert np.isfinite(rep.constant)
    assert rep.constant <= AHLFORS_CONSTANT_EX4


def test_criterion_05():
    """ex1 arg variation at 0 within pi + 3/2, convergent at 12 points"""
    c = make_curve("ex1", depth=6)
    v0 = total_arg_variation(c, 0.0)
    assert v0.converged
    assert v0.value <= np.pi + 1.5
    xs = np.array([0, 2 ** -1, 2 ** -3, 2 ** -5, 2 ** -8, 2 ** -10, 1, 1j, np.exp(0.3j), -0.5,
                   -2 ** -6, 2 ** -4 * np.exp(0.5j * 2 ** -4)])
    ok, res = kral_check(c, xs)
    assert ok, [r.status for r in res]


def test_criterion_06():
    """ex2: variation at 0 tends to pi, arg Dini integral diverges"""
    c = make_curve("ex2")
    sched = np.geomspace(0.1, 1e-250, 40)
    tv = total_arg_variation(c, 0.0, sched)
    assert abs(tv.value - np.pi) <= 1e-2
    r0 = example2_r0()
    tab = ex2_arg_table()
    res = dini_integral(tab, "arg", upper=r0)
    assert res.divergent
    lower = res.deltas
    assert np.all(res.values >= 0.9 * np.log(np.log(1 / lower) / np.log(1 / r0)) - 1e-12)


def test_criterion_07():
    """ex3: ray-crossing integral grows with depth; partial variation bound"""
    kral = []
    for N in (4, 6, 8, 10):
        c = make_curve("ex3", depth=N)
        kral.append(kral_functional(c, 0.0, grid_size=2 ** 20))
        sched = 0.25 * 2.0 ** -np.arange(0, N + 1)
        tv = total_arg_variation(c, 0.0, sched)
        bound = 0.5 * sum(1 / (n * np.log(n)) for n in range(2, N + 1))
        assert tv.value >= bound
    assert np.all(np.diff(kral) > 0), kral


def test_criterion_08():
    """ex4 pipeline: Dini fails, the simplified sufficient condition holds, one-sided limits match formulas"""
    c = ex4_curve()
    g = make_density_example4()
    tab = ex4_table()
    assert dini_integral(tab, "plain", upper=0.5).divergent
    bound = ex4_corollary_bound()
    num = 6 * quad(lambda x: 1 / ((x - np.log(1.5)) * (x + 1)), np.log(2), np.inf)[0]
    assert bound == pytest.approx(num, rel=1e-10)
    v = c.vertices[:-1]
    junction = np.flatnonzero(np.diff(c.seg_piece, prepend=c.seg_piece[-1]) != 0)
    idx = np.unique(np.concatenate([np.linspace(0, v.size - 1, 24).astype(int), junction[::3]]))
    g2 = [z for z in v[idx] if abs(z) > 0]
    rep = theorem3_report(c, g, [0.0], g2, lambda x: min(2 * abs(x), 0.5), 0.5, table=tab)
    assert rep.verdict == "PASS", rep.notes
    assert rep.sup_integral < bound
    for side in "+-":
        res = boundary_limit(c, g, 0.0, side, schedule=2.0 ** -np.arange(20, 33))
        assert res.converged
        assert res.discrepancy <= 1e-2


def test_criterion_09():
    """Criterion functional decreases in eps and is small at 2^-7"""
    eps = 2.0 ** -np.arange(2, 8)
    c = make_curve("circle")
    e4 = ex4_curve()
    cases = [(c, Density.from_rule("re"), arc_points(c, 16)),
             (e4, make_density_example4(), np.concatenate([[0.0], arc_points(e4, 16)]))]
    for curve, g, xs in cases:
        vals = np.array([r.value for r in criterion_sweep(curve, g, eps, xs)])
        assert np.all(np.diff(vals) < 0), vals
        assert vals[-1] < 0.05


def test_criterion_10():
    """Annulus inequality with constant 6 on 50 random (xi, R) per curve"""
    rng = np.random.default_rng(RNG_SEED)
    cases = [(make_curve("circle"), Density.from_rule("re"), circle_table()),
             (ex4_curve(), make_density_example4(), ex4_table())]
    for c, g, tab in cases:
        for _ in range(50):
            xi = c.vertices[rng.integers(c.n_segments)]
            R = np.exp(rng.uniform(np.log(1e-3 * c.diameter), np.log(c.diameter)))
            res = lemma_inequality_check(c, g, xi, R, table=tab)
            assert res["lhs"] <= res["rhs"] * (1 + 1e-12), res


def _omega_matrix(tab):
    ratio = tab.omega / tab.eta
    n = ratio.size
    M = np.full((n, n), np.nan)
    for i in range(n):
        M[i, i:] = np.maximum.accumulate(ratio[i:])
    return M


def test_criterion_11():
    """Omega monotonicity triple on every modulus table used above"""
    for tab in (ex2_arg_table(), ex4_table(), circle_table()):
        M = _omega_matrix(tab)
        eta = tab.eta
        n = eta.size
        for i in range(0, n, 37):
            for j in range(i, n, 41):
                assert M[i, j] == pytest.approx(omega_characteristic(tab, eta[i], eta[j]), rel=1e-12)
        iu = np.triu_indices(n)
        with np.errstate(invalid="ignore"):
            # nonincreasing in a (down a column), nondecreasing in b (along a row)
            da = np.diff(M, axis=0)
            db = np.diff(M, axis=1)
            aM = eta[:, None] * M
            dA = np.diff(aM, axis=0)
        valid_a = ~np.isnan(da)
        valid_b = ~np.isnan(db)
        assert np.all(da[valid_a] <= 0)
        assert np.all(db[valid_b] >= 0)
        assert np.all(dA[~np.isnan(dA)] >= -1e-15 * np.nanmax(np.abs(aM)))
        assert np.isfinite(M[iu]).all()


def test_criterion_12():
    """Kral check implies Ahlfors check over the zoo; the Lyapunov blob passes both"""
    verdicts = {}
    for name in ["circle", "ellipse", "lyapunov", "ex1", "ex2", "ex3", "ex4"]:
        c = make_curve(name)
        xs = arc_points(c, 8)
        if float(np.atleast_1d(c.nearest(0.0)[2])[0]) < 1e-12:
            xs = np.concatenate([[0.0], xs])
        kral, _ = kral_check(c, xs)
        ahl, _ = ahlfors_check(c)
        verdicts[name] = (kral, ahl)
        if kral:
            assert ahl, name
    assert verdicts["lyapunov"] == (True, True)
    tab = _blob_tangent_table()
    assert dini_integral(tab, "tangent").converged


def _blob_tangent_table():
    from layerpot.diagnostics import tangent_modulus
    return tangent_modulus(make_curve("lyapunov"), np.geomspace(1e-5, 0.5, 200), samples=16000)


def test_criterion_13(tmp_path):
    """Diagnose on ex4 is byte-identical at parallelism 1 and 8"""
    outs = []
    for t in (1, 8):
        d = tmp_path / f"t{t}"
        assert cli_main(["diagnose", "--zoo", "ex4", "--depth", "8", "--out", str(d),
                         "--threads", str(t)]) == 0
        outs.append(d)
    import json
    names = sorted(p.name for p in outs[0].iterdir())
    assert names == sorted(p.name for p in outs[1].iterdir())
    for name in names:
        if name == "manifest.json":
            continue
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes(), name
    m = [json.loads((d / "manifest.json").read_text()) for d in outs]
    assert m[0]["files"] == m[1]["files"]
    verdicts = json.loads((outs[0] / "report.json").read_text())["verdicts"]
    assert verdicts["ahlfors"] == "PASS"
    assert verdicts["theorem3"] == "PASS"
    assert verdicts["kral"] == "FAIL"
