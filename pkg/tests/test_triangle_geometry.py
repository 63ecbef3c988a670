import math

import pytest
from scipy.integrate import quad

from cordspec import cord_engine as ce
from cordspec import triangle_geometry as tg
from cordspec.isometry_group import INFINITY, Horoball, Moebius, apply_boundary


@pytest.fixture(scope="module")
def fig8_spectrum(fig8):
    return ce.enumerate_cords(fig8, 1.2, 4.0)


def symmetric_hexagon():
    tri = tg.IdealTriangle((0j, 1 + 0j, INFINITY))
    balls = (Horoball(0j, 0.3), Horoball(1 + 0j, 0.3), Horoball(INFINITY, 3.0))
    return tg.truncate(tri, balls), tri, balls


def test_ideal_triangle_validation():
    with pytest.raises(ValueError):
        tg.IdealTriangle((0j, 0j, INFINITY))
    with pytest.raises(ValueError):
        tg.IdealTriangle((INFINITY, INFINITY, 0j))
    tg.IdealTriangle((0j, 1j, INFINITY))  # ok


def test_truncate_symmetric_sides_and_arcs():
    hexa, _, _ = symmetric_hexagon()
    # symmetry: the two sides meeting the horoball at infinity are equal
    assert hexa.side_lengths[1] == pytest.approx(hexa.side_lengths[2])
    assert hexa.side_lengths[1] == pytest.approx(math.log(3.0 / 0.3))
    assert hexa.side_lengths[0] == pytest.approx(-2 * math.log(0.3))
    assert hexa.arc_lengths[2] == pytest.approx(1.0 / 3.0)  # |0-1| / height
    assert hexa.arc_lengths[0] == pytest.approx(0.3)


def test_truncate_rejects_mismatched_or_overlapping():
    tri = tg.IdealTriangle((0j, 1 + 0j, INFINITY))
    with pytest.raises(ValueError):
        tg.truncate(tri, (Horoball(5j, 0.1), Horoball(1 + 0j, 0.1),
                          Horoball(INFINITY, 3.0)))
    with pytest.raises(ValueError):  # tangent/overlapping horoballs
        tg.truncate(tri, (Horoball(0j, 1.0), Horoball(1 + 0j, 1.0),
                          Horoball(INFINITY, 3.0)))


def test_sides_meet_arcs_orthogonally():
    hexa, _, _ = symmetric_hexagon()
    assert max(tg.corner_angle_defects(hexa)) < 1e-8


def test_area_gauss_bonnet_and_quadrature():
    hexa, _, _ = symmetric_hexagon()
    assert hexa.gauss_bonnet_residual() < 1e-12
    # independent quadrature of the hyperbolic area of the region
    a, d0, d1 = 3.0, 0.3, 0.3

    def f(u):
        zlow = math.sqrt(max(u * (1 - u), 1e-300))
        tot = 1.0 / zlow - 1.0 / a
        for (uc, d) in ((0.0, d0), (1.0, d1)):
            du = u - uc
            disc = (d / 2) ** 2 - du * du
            if disc > 0:
                zm, zp = d / 2 - math.sqrt(disc), d / 2 + math.sqrt(disc)
                lo, hi = max(zm, zlow), min(zp, a)
                if hi > lo:
                    tot -= 1.0 / lo - 1.0 / hi
        return tot

    val, _ = quad(f, 0, 1, points=[0.15, 0.3, 0.7, 0.85], limit=200)
    assert abs(hexa.area - val) < 1e-6


def test_area_tends_to_ideal_triangle():
    tri = tg.IdealTriangle((0j, 1 + 0j, INFINITY))
    prev = 0.0
    for eps in (0.1, 0.01, 0.001):
        hexa = tg.truncate(tri, (Horoball(0j, eps), Horoball(1 + 0j, eps),
                                 Horoball(INFINITY, 1.0 / eps)))
        assert prev < hexa.area < math.pi
        prev = hexa.area
    assert abs(hexa.area - math.pi) < 0.01


def test_coplanar_reduce_chained_triple():
    _, tri, balls = symmetric_hexagon()
    c0 = ce.common_perpendicular(balls[0], balls[1])
    c1 = ce.common_perpendicular(balls[1], balls[2])
    c2 = ce.common_perpendicular(balls[2], balls[0])
    g = tg.coplanar_reduce(c0, c1, c2)
    assert tg.plane_defect(g, (c0, c1, c2)) < 1e-8
    # broken chain rejected
    with pytest.raises(ValueError):
        tg.coplanar_reduce(c0, c0, c2)


def test_coplanar_reduce_round_trip():
    _, _, balls = symmetric_hexagon()
    c0 = ce.common_perpendicular(balls[0], balls[1])
    c1 = ce.common_perpendicular(balls[1], balls[2])
    c2 = ce.common_perpendicular(balls[2], balls[0])
    r = Moebius(1.3 + 0.2j, 0.4 - 1.1j, 0.7 + 0.3j, 1)
    moved = [c.transformed(r) for c in (c0, c1, c2)]
    g = tg.coplanar_reduce(*moved)
    assert tg.plane_defect(g, moved) < 1e-8


def test_reduction_examples_up_to_axis_rotation():
    # real-axis triples reduce to the identity composed with w -> i w
    rot = Moebius(1j, 0, 0, 1)
    g = tg.reduction_to_vertical_plane(0j, 1 + 0j, INFINITY)
    assert g.is_close(rot, 1e-12)
    g2 = tg.reduction_to_vertical_plane(1j, 1 + 1j, INFINITY)
    shift = rot.compose(Moebius(1, -1j, 0, 1))  # translation by -i, then rot
    assert g2.is_close(shift, 1e-12)


def test_triangle_catalog_figure_eight(fig8, fig8_spectrum):
    spec = fig8_spectrum
    catalog = tg.triangle_catalog(fig8, spec, ("b", "b", "BB"))
    assert len(catalog) >= 1
    lb = ce.cord_length(fig8.evaluate("b"), 1.2)
    lbb = ce.cord_length(fig8.evaluate("bb"), 1.2)
    for hexa in catalog:
        s = sorted(hexa.side_lengths)
        assert s[0] == pytest.approx(lb, abs=1e-7)
        assert s[1] == pytest.approx(lb, abs=1e-7)
        assert s[2] == pytest.approx(lbb, abs=1e-7)
        assert hexa.gauss_bonnet_residual() < 1e-6
        g = tg.coplanar_reduce(*hexa.sides)
        assert tg.plane_defect(g, hexa.sides) < 1e-8


def test_triangle_catalog_rejections(fig8, fig8_spectrum):
    spec = fig8_spectrum
    with pytest.raises(ValueError):  # peripheral class: constant chord
        tg.triangle_catalog(fig8, spec, ("a", "b", "B"))
    with pytest.raises(ValueError):  # not composable at this cutoff
        tg.triangle_catalog(fig8, spec, ("b", "b", "b"), search_range=2)


def test_triangle_catalog_conjugation_invariant(fig8, fig8_spectrum):
    spec = fig8_spectrum
    c1 = tg.triangle_catalog(fig8, spec, ("b", "b", "BB"))
    # conjugating every class word simultaneously preserves the geometry
    c2 = tg.triangle_catalog(fig8, spec, ("Aba", "Aba", "ABBa"))
    assert len(c1) == len(c2)
    for h1, h2 in zip(c1, c2):
        for s1, s2 in zip(sorted(h1.side_lengths), sorted(h2.side_lengths)):
            assert s1 == pytest.approx(s2, abs=1e-7)
