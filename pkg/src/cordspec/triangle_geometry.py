"""Ideal triangles spanned by horoball-center triples, coplanarity reduction
of chained cord triples into the vertical plane {x = 0}, and truncated
geodesic triangles (right-angled hexagons bounded by three geodesic sides
and three horocyclic arcs)."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .cord_engine import Cord, common_perpendicular
from .isometry_group import (INFINITY, GroupPresentation, Horoball, Moebius,
                             apply_boundary, apply_h3, double_coset_canonical,
                             image_horoball)

_TOL = 1e-9


def _is_inf(w) -> bool:
    return w == INFINITY or (isinstance(w, complex) and not math.isfinite(abs(w)))


@dataclass(frozen=True)
class IdealTriangle:
    """Three pairwise distinct ideal vertices on the boundary sphere."""

    vertices: tuple

    def __post_init__(self):
        v = self.vertices
        if len(v) != 3:
            raise ValueError("need exactly three vertices")
        for i in range(3):
            for j in range(i + 1, 3):
                wi, wj = v[i], v[j]
                if _is_inf(wi) and _is_inf(wj):
                    raise ValueError("vertices must be pairwise distinct")
                if not _is_inf(wi) and not _is_inf(wj) and abs(wi - wj) < 1e-13:
                    raise ValueError("vertices must be pairwise distinct")


@dataclass
class TruncatedTriangle:
    """Hexagon obtained from an ideal triangle by cutting off a horoball
    neighborhood of each vertex: three geodesic sides alternating with three
    horocyclic arcs, all corners right angles.

    ``side_lengths[i]`` is the geodesic side between vertices i and i+1;
    ``arc_lengths[i]`` is the horocyclic arc at vertex i.  By Gauss-Bonnet
    (geodesic sides, horocycle arcs of signed curvature -1 with respect to
    the region, six right angles) the area is pi minus the total arc length.
    """

    triangle: IdealTriangle
    horoballs: tuple
    side_lengths: tuple
    arc_lengths: tuple
    area: float
    sides: tuple = ()

    def gauss_bonnet_residual(self) -> float:
        return abs(self.area - math.pi + sum(self.arc_lengths))

    def to_dict(self) -> dict:
        return {
            "side_lengths": list(self.side_lengths),
            "arc_lengths": list(self.arc_lengths),
            "area": self.area,
        }


def _map_triple(p, q, r) -> Moebius:
    """Moebius map sending (p, q, r) to (0, 1, infinity)."""
    if _is_inf(p):
        return Moebius(0, q - r, 1, -r)
    if _is_inf(q):
        return Moebius(1, -p, 1, -r)
    if _is_inf(r):
        return Moebius(1, -p, 0, q - p)
    return Moebius(q - r, -p * (q - r), q - p, -r * (q - p))


def reduction_to_vertical_plane(w0, w1, w2) -> Moebius:
    """Isometry taking the three ideal points to (0, i, infinity), so the
    totally geodesic plane through them becomes {x = 0} (the plane over the
    imaginary boundary axis)."""
    rot = Moebius(1j, 0, 0, 1)
    return rot.compose(_map_triple(w0, w1, w2))


def _chain_centers(c0: Cord, c1: Cord, c2: Cord) -> tuple:
    """The three distinct horoball centers of a chained cord triple
    (c0: B0->B1, c1: B1->B2, c2: B2->B0); raises if the chain pattern or
    the pairwise sharing fails."""

    def same(u, v):
        if _is_inf(u) or _is_inf(v):
            return _is_inf(u) and _is_inf(v)
        return abs(u - v) < 1e-9

    w0, w1 = c0.centers
    if not same(c1.centers[0], w1):
        raise ValueError("cords are not chained: c1 does not start on c0's end")
    w2 = c1.centers[1]
    if not (same(c2.centers[0], w2) and same(c2.centers[1], w0)):
        raise ValueError("cords are not chained: c2 does not close the triangle")
    return w0, w1, w2


def coplanar_reduce(c0: Cord, c1: Cord, c2: Cord) -> Moebius:
    """Isometry g moving a chained cord triple into the plane {x = 0}.

    The three cords lie on the totally geodesic plane through their three
    horoball centers; g maps those centers to (0, i, infinity) on the
    imaginary boundary axis, so every transformed cord point has x = 0.
    """
    w0, w1, w2 = _chain_centers(c0, c1, c2)
    return reduction_to_vertical_plane(w0, w1, w2)


def plane_defect(g: Moebius, cords, samples: int = 17) -> float:
    """Max |x| over sampled points of the g-images of the given cords."""
    worst = 0.0
    for c in cords:
        gc = c.transformed(g)
        if gc._parametric:
            pts = [gc.point(k / (samples - 1.0)) for k in range(samples)]
        else:
            pts = [gc.start, gc.end]
        for p in pts:
            worst = max(worst, abs(p.x))
    return worst


def _arc_length_at_vertex(v, ball: Horoball, u1, u2) -> float:
    """Horocyclic arc on the horosphere at vertex v between the edge
    geodesics toward the ideal points u1 and u2."""
    if _is_inf(v):
        a = ball.size
        return abs(u1 - u2) / a
    m = Moebius(0, -1, 1, -v)  # send v to infinity
    bp = image_horoball(m, ball)
    return abs(apply_boundary(m, u1) - apply_boundary(m, u2)) / bp.size


def truncate(tri: IdealTriangle, horoballs) -> TruncatedTriangle:
    """Cut a horoball neighborhood of each vertex off the ideal triangle.

    Side i is the cord between the horoballs at vertices i and i+1 and its
    length comes from the common-perpendicular engine; arc i sits on the
    horosphere at vertex i.  Area is pi minus the total arc length: each
    removed cusp region has hyperbolic area equal to the horocyclic arc
    bounding it.
    """
    if len(horoballs) != 3:
        raise ValueError("need exactly three horoballs")
    v = tri.vertices
    balls = tuple(horoballs)
    for i, (w, B) in enumerate(zip(v, balls)):
        ok = (_is_inf(w) and B.is_at_infinity()) or \
            (not _is_inf(w) and not B.is_at_infinity() and abs(w - B.center) < 1e-9)
        if not ok:
            raise ValueError(f"horoball {i} is not centered at vertex {i}")
    sides = []
    for i in range(3):
        sides.append(common_perpendicular(balls[i], balls[(i + 1) % 3]))
    arcs = []
    for i in range(3):
        arcs.append(_arc_length_at_vertex(v[i], balls[i],
                                          v[(i + 1) % 3], v[(i + 2) % 3]))
    area = math.pi - sum(arcs)
    return TruncatedTriangle(tri, balls, tuple(s.length for s in sides),
                             tuple(arcs), area, tuple(sides))


def corner_angle_defects(hexagon: TruncatedTriangle) -> list:
    """Deviation from orthogonality where each geodesic side meets the two
    adjacent horocyclic arcs: |<side tangent, arc tangent>| at the corner,
    computed in the frame with that corner's vertex at infinity (where the
    side is vertical and the horocycle horizontal)."""
    v = hexagon.triangle.vertices
    out = []
    for i in range(3):
        w = v[i]
        m = Moebius.identity() if _is_inf(w) else Moebius(0, -1, 1, -w)
        for j in ((i + 1) % 3, (i + 2) % 3):
            # edge toward vertex j becomes the vertical line over m(v_j);
            # tangents are (0,0,1) and a horizontal vector: defect is the
            # horizontal component of the mapped side tangent
            side = next(s for s in hexagon.sides
                        if _touches(s, w) and _touches(s, v[j]))
            t = 0.0 if _cord_starts_at(side, w) else 1.0
            vel = _side_tangent(side, t, m)
            horiz = math.hypot(vel[0], vel[1])
            out.append(horiz / max(math.hypot(*vel), 1e-300))
    return out


def _touches(cord: Cord, w) -> bool:
    for c in cord.centers:
        if _is_inf(c) and _is_inf(w):
            return True
        if not _is_inf(c) and not _is_inf(w) and abs(c - w) < 1e-9:
            return True
    return False


def _cord_starts_at(cord: Cord, w) -> bool:
    c = cord.centers[0]
    if _is_inf(c) or _is_inf(w):
        return _is_inf(c) and _is_inf(w)
    return abs(c - w) < 1e-9


def _side_tangent(cord: Cord, t: float, m: Moebius, h: float = 1e-6):
    t0, t1 = max(t - h, 0.0), min(t + h, 1.0)
    p0 = apply_h3(m, cord.point(t0)).coords()
    p1 = apply_h3(m, cord.point(t1)).coords()
    return (p1 - p0) / (t1 - t0)


def _peripheral_translation(rep: GroupPresentation, mcount: int, ncount: int) -> Moebius:
    mu, lam = rep.lattice_vectors()
    return Moebius(1, mcount * mu + ncount * lam, 0, 1)


def triangle_catalog(rep: GroupPresentation, spectrum, words,
                     search_range: int = 6) -> list:
    """Candidate geodesic triangles for a composable class triple.

    A chained horoball triple (B0, h1 B0, h2 B0) with B0 = {z >= a0}
    realizes the classes (e0, e1, e2) when h1 = e0 and h2 = e0 p e1 for a
    peripheral translation p, provided h2 lies in the double coset of the
    inverse of e2.  The finite search runs p over the cusp lattice box
    [-search_range, search_range]^2 and keeps triples whose three cords are
    nondegenerate and no longer than the spectrum cutoff.  Purely geometric
    candidates; no holomorphic-triangle count is implied.
    """
    a0 = spectrum.horoball_height
    Lmax = spectrum.cutoff
    e0, e1, e2 = (rep.evaluate(w) for w in words)
    for w, g in zip(words, (e0, e1, e2)):
        if abs(g.c) < 1e-9:
            raise ValueError(f"class {w!r} is peripheral (constant chord)")
    target = double_coset_canonical(e2.inverse(), rep).key(6)
    B0 = Horoball(INFINITY, a0)
    cmax = math.exp(Lmax / 2.0) / a0
    found = []
    seen = set()
    for mi in range(-search_range, search_range + 1):
        for ni in range(-search_range, search_range + 1):
            p = _peripheral_translation(rep, mi, ni)
            h2 = e0.compose(p).compose(e1)
            ac = abs(h2.c)
            if ac < 1e-9 or ac > cmax or a0 * ac <= 1.0 + 1e-9:
                continue
            if double_coset_canonical(h2, rep).key(6) != target:
                continue
            B1 = image_horoball(e0, B0)
            B2 = image_horoball(h2, B0)
            key = (round(B2.center.real, 8), round(B2.center.imag, 8),
                   round(B2.size, 10))
            if key in seen:
                continue
            seen.add(key)
            tri = IdealTriangle((INFINITY, B1.center, B2.center))
            try:
                hexagon = truncate(tri, (B0, B1, B2))
            except ValueError:
                continue  # degenerate configuration (tangent horoballs)
            found.append(hexagon)
    if not found:
        raise ValueError(
            "classes are not composable within the peripheral search range")
    found.sort(key=lambda h: (sum(h.side_lengths), h.side_lengths))
    return found
