import numpy as np
import pytest

from layerpot import Density, make_curve, parse_density
from layerpot.curve import CurveError
from layerpot.zoo import (AHLFORS_CONSTANT_EX4, _ex2_dt, _ex3_dt, _ex3_t, example2_r0,
                          example3_ellipse, truncation_scale)


def test_ahlfors_constant_closed_form():
    ln2 = np.log(2)
    assert AHLFORS_CONSTANT_EX4 == pytest.approx(4 + np.sqrt(1 + ln2 ** 2) / ln2, rel=1e-15)


def test_example2_r0_is_first_vertical_tangent():
    r0 = example2_r0()
    assert abs(_ex2_dt(r0).real) < 1e-12
    r = np.linspace(1e-4, r0 * (1 - 1e-6), 2000)
    assert np.all(_ex2_dt(r).real > 0)


def test_example3_ellipse_tangencies():
    a, b, v1 = example3_ellipse()
    p = _ex3_t(0.5)
    # on the ellipse x^2/a^2 + (y-b)^2/b^2 = 1
    assert (p.real / a) ** 2 + ((p.imag - b) / b) ** 2 == pytest.approx(1, abs=1e-12)
    # tangent parallel to the spiral there
    tang = -a * np.cos(v1) + 1j * b * np.sin(v1)
    assert abs(np.imag(tang * np.conj(_ex3_dt(0.5)))) < 1e-10 * abs(tang) * abs(_ex3_dt(0.5))


def test_zoo_geometry():
    e4 = make_curve("ex4", depth=8)
    assert e4.diameter == pytest.approx(2.0, abs=1e-9)
    assert truncation_scale(e4) == 2.0 ** -16
    assert truncation_scale(make_curve("ex1", depth=4)) == 2.0 ** -16
    assert truncation_scale(make_curve("circle")) == 0.0
    e3 = make_curve("ex3", depth=6)
    assert truncation_scale(e3) == 2.0 ** -6


def test_zoo_errors():
    with pytest.raises(KeyError):
        make_curve("square")
    with pytest.raises(CurveError):
        make_curve("ex4", depth=1)
    with pytest.raises(CurveError):
        make_curve("lyapunov", amplitude=0.3)


def test_density_rules(circle):
    t = np.array([0.5 + 0.25j, -1.0, 0.0])
    assert np.array_equal(parse_density("re")(t), t.real)
    assert np.array_equal(parse_density("im")(t), t.imag)
    assert np.array_equal(parse_density("const:2.5")(t), [2.5] * 3)
    g = parse_density("ex4-log")(np.array([0.0, np.exp(-3.0)]))
    assert g[0] == 0.0 and g[1] == pytest.approx(0.25)
    h = parse_density("holder:0.5,0.25")(np.array([1.25 + 0j]))
    assert h[0] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        parse_density("wiggle")


def test_density_table_and_files(tmp_path, circle):
    s = np.linspace(0, circle.length, 50, endpoint=False)
    tab = Density.from_table(s, np.cos(s), circle.length)
    seg = np.array([0, 1000])
    u = np.array([0.0, 0.5])
    vals = tab.at(circle, seg, u)
    expect = np.cos(circle.arc_coordinate(seg, u))
    assert np.max(np.abs(vals - expect)) < 1e-2
    (tmp_path / "g.csv").write_text("s,g\n" + "\n".join(f"{a},{b}" for a, b in zip(s, np.cos(s))))
    g2 = parse_density(str(tmp_path / "g.csv"), circle)
    assert np.allclose(g2.at(circle, seg, u), vals)
    import json
    (tmp_path / "g.json").write_text(json.dumps({"rule_id": "const", "params": {"c": 3.0}}))
    assert parse_density(str(tmp_path / "g.json"))(np.array([1j]))[0] == 3.0
