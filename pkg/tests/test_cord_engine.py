import json
import math

import numpy as np
import pytest

from cordspec import cord_engine as ce
from cordspec.hyperbolic_core import distance
from cordspec.isometry_group import INFINITY, Horoball, Moebius, image_horoball

A0 = 1.2


def test_vertical_cord_geometry():
    cord = ce.Cord.from_vertical("w", 2.0, 1 + 1j, 0.8)
    assert cord.start.z == 2.0
    assert abs(cord.end.z - 2.0 * math.exp(-0.8)) < 1e-15
    assert abs(distance(cord.start, cord.end) - 0.8) < 1e-12
    f0, b0 = cord.profile
    assert f0 == b0 == 0.5
    # constant speed: d(c(0), c(t)) = t * length
    for t in (0.25, 0.5, 0.9):
        assert abs(distance(cord.point(0), cord.point(t)) - t * 0.8) < 1e-12


def test_cord_length_closed_form(fig8):
    g = fig8.evaluate("b")
    assert abs(ce.cord_length(g, A0) - 2 * math.log(A0)) < 1e-14
    with pytest.raises(ValueError):
        ce.cord_length(fig8.evaluate("a"), A0)  # peripheral
    with pytest.raises(ValueError):
        ce.cord_length(g, 1.0)  # tangent horoballs at threshold


def test_common_perpendicular_matches_closed_form(fig8):
    B0 = Horoball(INFINITY, A0)
    for word in ("b", "ab", "bA", "abb"):
        g = fig8.evaluate(word)
        cord = ce.common_perpendicular(B0, image_horoball(g, B0), word)
        assert abs(cord.length - ce.cord_length(g, A0)) < 1e-10


def test_common_perpendicular_orthogonal_endpoints():
    B0 = Horoball(INFINITY, 2.0)
    B1 = Horoball(0.7 - 0.3j, 0.4)
    cord = ce.common_perpendicular(B0, B1)
    # endpoint 0 on the horosphere at infinity: velocity purely vertical
    v0 = cord.velocity(0.0)
    assert math.hypot(v0[0], v0[1]) < 1e-5 * abs(v0[2])
    assert abs(cord.start.z - 2.0) < 1e-10
    # endpoint 1 on the sphere: velocity parallel to the radial direction
    c = np.array([B1.center.real, B1.center.imag, B1.size / 2])
    rad = cord.end.coords() - c
    v1 = cord.velocity(1.0)
    cosang = abs(rad @ v1) / (np.linalg.norm(rad) * np.linalg.norm(v1))
    assert cosang > 1.0 - 1e-8


def test_degenerate_horoballs_rejected():
    B0 = Horoball(INFINITY, 1.0)
    with pytest.raises(ValueError):
        ce.common_perpendicular(B0, Horoball(0j, 1.0))  # tangent
    with pytest.raises(ValueError):
        ce.common_perpendicular(B0, Horoball(INFINITY, 2.0))
    with pytest.raises(ValueError):
        ce.common_perpendicular(Horoball(1j, 0.3), Horoball(1j, 0.2))


def test_transformed_cord_is_isometric(fig8):
    cord = ce.Cord.from_vertical("w", A0, 0j, 1.1)
    g = fig8.evaluate("ab")
    moved = cord.transformed(g)
    assert abs(moved.length - cord.length) < 1e-14
    assert abs(distance(moved.start, moved.end) - 1.1) < 1e-10
    for t in (0.0, 0.3, 1.0):
        lhs = moved.point(t).coords()
        from cordspec.isometry_group import apply_h3
        rhs = apply_h3(g, cord.point(t)).coords()
        assert np.abs(lhs - rhs).max() < 1e-10


def test_z_profile_residual_and_bounds(fig8):
    B0 = Horoball(INFINITY, A0)
    for word in ("b", "aB", "bab"):
        g = fig8.evaluate(word)
        cord = ce.cord_for_class(g, A0)
        assert ce.z_profile_residual(cord) < 1e-10
        f0, b0 = cord.profile
        assert abs(b0) <= f0 + 1e-12
        ell = cord.length
        fmax = max(1.0 / cord.point(t).z for t in np.linspace(0, 1, 50))
        assert fmax <= f0 * math.cosh(ell) + abs(b0) * math.sinh(ell) + 1e-10


def test_max_embedded_height(fig8):
    assert ce.max_embedded_height(fig8) == pytest.approx(1.0, abs=1e-9)


def test_enumerate_cords_golden(fig8):
    spec = ce.enumerate_cords(fig8, A0, 4.0)
    assert len(spec.entries) == 1211
    assert spec.entries[0].length == pytest.approx(2 * math.log(A0), abs=1e-12)
    lengths = spec.lengths()
    assert lengths == sorted(lengths)
    for e in spec.entries[:20]:
        assert e.energy == pytest.approx(0.5 * e.length**2)
        assert e.action == pytest.approx(-0.5 * e.length**2)
        assert e.f0 == e.b0 == pytest.approx(1 / A0)
    assert lengths[-1] <= 4.0 + 1e-9


def test_enumerate_cords_below_threshold_rejected(fig8):
    with pytest.raises(ValueError):
        ce.enumerate_cords(fig8, 0.5, 2.0)


def test_canonical_classes_deterministic(fig8):
    c1 = ce.canonical_classes(fig8, A0, 2.0)
    c2 = ce.canonical_classes(fig8, A0, 2.0)
    assert [g.word for g in c1] == [g.word for g in c2]
    assert len({g.key(6) for g in c1}) == len(c1)


def test_spectrum_serialization(tmp_path, fig8):
    spec = ce.enumerate_cords(fig8, A0, 2.0)
    jpath = tmp_path / "spec.json"
    cpath = tmp_path / "spec.csv"
    spec.write_json(jpath)
    spec.write_csv(cpath)
    data = json.loads(jpath.read_text())
    assert data["cutoff"] == 2.0
    assert len(data["entries"]) == len(spec.entries)
    rows = cpath.read_text().strip().split("\n")
    assert rows[0] == "class_word,length,energy,action,f0,b0"
    assert len(rows) == len(spec.entries) + 1


def test_chord_lift_and_action():
    cord = ce.Cord.from_vertical("w", A0, 0j, 1.3)
    chord = ce.lift_to_chord(cord)
    s = chord.state(0.4)
    # H = z^2 |p|^2 / 2 = length^2 / 2 along the unit-parameterized lift
    H = 0.5 * s.q.z**2 * float(np.dot(s.p, s.p))
    assert abs(H - 0.5 * 1.3**2) < 1e-8
    assert ce.action(chord) == pytest.approx(-0.5 * 1.3**2)


def test_extend_to_tame():
    cord = ce.Cord.from_vertical("w", A0, 0.5 + 0.5j, 1.0)
    ends = ce.extend_to_tame(cord)
    assert ends[0] == INFINITY and ends[1] == 0.5 + 0.5j
