"""H^2 x R geometry of (p,q)-torus-knot complements in S^3 and S^2 x S^1:
the symmetric 2p-gon with alternating ideal/interior vertices, parabolic
face pairings with R-shift bookkeeping, cord-family enumeration over the
surface holonomy group, and the degree-(0,1) rank table."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from .isometry_group import (INFINITY, Horoball, Moebius, apply_boundary,
                             classify, image_horoball)

_TOL = 1e-9


@dataclass(frozen=True)
class TorusKnotParams:
    """(p, q) torus knot in the chosen ambient manifold."""

    p: int
    q: int
    ambient: str = "s3"

    def __post_init__(self):
        if self.ambient not in ("s3", "s2xs1"):
            raise ValueError("ambient must be 's3' or 's2xs1'")
        if math.gcd(self.p, abs(self.q)) != 1:
            raise ValueError("p and q must be coprime")
        if self.ambient == "s3":
            if self.p < 2 or self.q < 2:
                raise ValueError("s3 torus knots require p, q >= 2")
        else:
            if not (self.p > abs(self.q) >= 2):
                raise ValueError("s2xs1 torus knots require p > |q| >= 2")

    def geometric_pq(self) -> tuple:
        """Presentation used for the polygon construction.

        The literal 2p-gon degenerates at p = 2 (its subdivision triangles
        have angle sum pi, so the interior vertices collapse to the center
        and the edge pairings become trivial).  Since the (p,q) and (q,p)
        torus knots in S^3 coincide, the geometric realization for p = 2
        uses the equivalent (q, 2) presentation.
        """
        if self.ambient == "s3" and self.p < 3:
            return self.q, self.p
        return self.p, self.q


@dataclass
class PolygonP:
    """Symmetric hyperbolic 2p-gon in the Poincare disk: vertices v_1..v_2p
    (stored with v_k = vertices[k-1]), even-index vertices ideal on the unit
    circle, odd-index vertices interior with angle 2 pi / p."""

    p: int
    vertices: list
    center_distance: float

    def is_ideal(self, k: int) -> bool:
        return k % 2 == 0

    def vertex(self, k: int) -> complex:
        return self.vertices[(k - 1) % (2 * self.p)]

    def interior_angle(self, k: int) -> float:
        """Measured angle at vertex v_k between its two polygon edges."""
        if self.is_ideal(k):
            return 0.0
        v = self.vertex(k)
        d1 = _disk_direction(v, self.vertex(k + 1))
        d2 = _disk_direction(v, self.vertex(k - 1))
        cosang = max(-1.0, min(1.0, (d1 * d2.conjugate()).real))
        return math.acos(cosang)

    def angle_sum(self) -> float:
        return sum(self.interior_angle(2 * i - 1) for i in range(1, self.p + 1))


def _disk_direction(z1: complex, z2: complex) -> complex:
    """Unit initial direction at z1 of the disk-model geodesic toward z2
    (the disk model is conformal, so Euclidean angles are hyperbolic)."""
    w = (z2 - z1) / (1.0 - z1.conjugate() * z2)
    return w / abs(w)


def build_polygon(p: int) -> PolygonP:
    """The 2p-gon assembled from 2p congruent (pi/p, pi/p, 0) triangles.

    Ideal vertices v_2i sit at disk angle 2 pi i / p; interior vertices
    v_{2i-1} halfway between at hyperbolic distance c from the center with
    cosh c = (1 + cos^2(pi/p)) / sin^2(pi/p), the finite side of the
    one-ideal-vertex triangle.  For p = 2 the triangles have angle sum pi
    and the polygon degenerates: c = 0 and the interior angles are pi.
    """
    if p < 2:
        raise ValueError("need p >= 2")
    alpha = math.pi / p
    coshc = (1.0 + math.cos(alpha) ** 2) / math.sin(alpha) ** 2
    c = math.acosh(coshc)
    r = math.tanh(c / 2.0)
    verts = []
    for k in range(1, 2 * p + 1):
        ang = math.pi * k / p
        rad = 1.0 if k % 2 == 0 else r
        verts.append(rad * cmath.exp(1j * ang))
    return PolygonP(p, verts, c)


_CAYLEY = Moebius(1j, 1j, -1, 1)  # disk -> upper half plane, sends 1 to inf


def _to_halfplane(z: complex):
    """Cayley transform of a disk point; ideal vertex at disk point 1 maps
    to infinity."""
    if abs(z - 1.0) < 1e-13:
        return INFINITY
    return apply_boundary(_CAYLEY, z)


@dataclass
class FacePairing:
    """One face pairing of the fundamental domain P x [0, n]: an isometry
    of H^2 (real Moebius, upper half-plane model) times an R-shift."""

    name: str
    h2: Moebius
    shift: float


def _parabolic_through(fix, src, dst) -> Moebius:
    """The parabolic (half-plane) isometry fixing the ideal point ``fix``
    and mapping src to dst; src and dst must lie on a common horocycle
    about fix."""
    if fix == INFINITY or (isinstance(fix, complex) and not cmath.isfinite(fix)):
        n = Moebius.identity()
    else:
        n = Moebius(0, -1, 1, -fix)
    a = _mob_point(n, src)
    b = _mob_point(n, dst)
    s = b - a
    if abs(s.imag) > 1e-9:
        raise ValueError("points are not on a common horocycle")
    t = Moebius(1, s.real, 0, 1)
    return n.inverse().compose(t).compose(n)


def _mob_point(g: Moebius, w: complex) -> complex:
    return (g.a * w + g.b) / (g.c * w + g.d)


def face_pairings(params: TorusKnotParams) -> list:
    """Face pairings of D = P x [0, n] in the half-plane model.

    phi_i maps the oriented edge v_{2i-1} v_{2i} to v_{2i+1} v_{2i}; it is
    the parabolic fixing the ideal vertex v_{2i}.  tau rotates the polygon
    by 2 pi q / p.  R-shifts: (phi_i, tau) carry (1, q) for S^3 and (0, p)
    for S^2 x S^1.
    """
    p, q = params.geometric_pq()
    poly = build_polygon(p)
    out = []
    phi_shift = 1.0 if params.ambient == "s3" else 0.0
    for i in range(1, p + 1):
        fix = _to_halfplane(poly.vertex(2 * i))
        src = apply_boundary(_CAYLEY, poly.vertex(2 * i - 1))
        dst = apply_boundary(_CAYLEY, poly.vertex(2 * i + 1))
        phi = _parabolic_through(fix, src, dst)
        phi.word = f"phi{i}"
        out.append(FacePairing(f"phi{i}", phi, phi_shift))
    rot = cmath.exp(2j * math.pi * q / p)
    tau_disk = Moebius(rot, 0, 0, 1)
    tau = _CAYLEY.compose(tau_disk).compose(_CAYLEY.inverse())
    tau.word = "tau"
    tau_shift = float(q) if params.ambient == "s3" else float(p)
    out.append(FacePairing("tau", tau, tau_shift))
    return out


def vertex_cycle_holonomy(params: TorusKnotParams) -> Moebius:
    """Composition phi_p ... phi_1 around the compact-vertex gluing cycle;
    a full rotation by 2 pi, i.e. the identity in PSL(2, R)."""
    pairings = face_pairings(params)
    p, _ = params.geometric_pq()
    g = Moebius.identity()
    for i in range(p):
        g = pairings[i].h2.compose(g)
    return g


def euler_char(params: TorusKnotParams) -> int:
    """Euler characteristic 2p + q - pq of the capped surface S_t-hat."""
    return 2 * params.p + params.q - params.p * params.q


@dataclass
class CordFamily:
    """An S^1-family of geodesic cords of the semi-horo-torus, one per
    nontrivial double coset; the whole circle of cords shares its length.
    ``shift`` is the net R-coordinate displacement of the representative
    word (the longitude-direction bookkeeping of the family tag)."""

    word: str
    source_cusp: int
    target_cusp: int
    length: float
    shift: float


def _cusp_horoballs(params: TorusKnotParams, y0: float) -> list:
    """Equivariant horodisk at each ideal vertex: the tau_1-rotates of the
    height-y0 horocycle at the vertex sent to infinity."""
    p, _ = params.geometric_pq()
    balls = []
    for j in range(1, p + 1):
        rot = cmath.exp(2j * math.pi * (j - p) / p)
        m = _CAYLEY.compose(Moebius(rot, 0, 0, 1)).compose(_CAYLEY.inverse())
        balls.append(image_horoball(m, Horoball(INFINITY, y0)))
    return balls


def _infinity_translation(phi: Moebius) -> float:
    """Translation length at infinity of a parabolic fixing infinity."""
    if abs(phi.c) > 1e-12:
        raise ValueError("not upper triangular")
    return abs((phi.b / phi.d).real)


def enumerate_surface_cords(params: TorusKnotParams, Lmax: float,
                            y0: float = 4.0, max_word_len: int = 8,
                            max_elements: int = 500_000,
                            prune: bool = True) -> list:
    """Cord families with length <= Lmax, one per double coset of the cusp
    stabilizers in the surface holonomy group <phi_1, ..., phi_p>.

    Families are enumerated from the cusp at infinity: deduplicate image
    horodisks g . B_j by (diameter, center modulo the infinity-cusp
    translation); every cord between horodisk lifts of the boundary
    horocycles arises this way, and the p source cusps contribute
    rotation-equivalent copies (tau_1 conjugation permutes the phi_i), so
    each infinity-based family is reported once per source cusp.
    Deterministic order: by length, then word, then target cusp.
    """
    from .isometry_group import BudgetExceeded

    p, _ = params.geometric_pq()
    pairings = face_pairings(params)[:p]
    table = {}
    for i, fp in enumerate(pairings, start=1):
        table[f"{i}"] = (fp.h2, fp.shift)
        table[f"-{i}"] = (fp.h2.inverse(), -fp.shift)
    balls = _cusp_horoballs(params, y0)
    s_inf = _infinity_translation(pairings[p - 1].h2)
    dmin = math.exp(-Lmax) * y0  # emission bound on image diameters
    families = {}

    def consider(word, shift, g):
        for j, B in enumerate(balls, start=1):
            gb = image_horoball(g, B)
            if gb.is_at_infinity() or gb.size < dmin - 1e-12:
                continue
            if gb.size > y0 * (1.0 - 1e-12):
                continue  # tangent/overlapping: degenerate
            x = gb.center.real % s_inf
            key = (round(gb.size, 9), round(min(x, s_inf - x), 8)
                   if x < 1e-8 or s_inf - x < 1e-8 else round(x, 8), j)
            if key not in families:
                ell = math.log(y0 / gb.size)
                families[key] = CordFamily(word or "e", p, j, ell, shift)

    frontier = [("", 0.0, Moebius.identity())]
    consider(*frontier[0])
    seen = {Moebius.identity().key(): True}
    count = 0
    for _ in range(max_word_len):
        nxt = []
        for word, shift, g in frontier:
            last = word.split(".")[-1] if word else ""
            for lab, (m, sh) in sorted(table.items()):
                if last and lab == (last[1:] if last.startswith("-")
                                    else "-" + last):
                    continue
                h = g.compose(m)
                if prune and abs(h.c) > 8.0 / math.sqrt(dmin * y0):
                    continue
                k = h.key()
                if k in seen:
                    continue
                seen[k] = True
                count += 1
                if count > max_elements:
                    raise BudgetExceeded(f"element cap {max_elements}")
                w = f"{word}.{lab}" if word else lab
                consider(w, shift + sh, h)
                nxt.append((w, shift + sh, h))
        frontier = nxt
        if not frontier:
            break
    base = sorted(families.values(),
                  key=lambda f: (f.length, f.word, f.target_cusp))
    out = []
    for src in range(1, p + 1):  # rotation-equivalent copies per source cusp
        for f in base:
            tgt = (f.target_cusp + src - p - 1) % p + 1
            out.append(CordFamily(f.word, src, tgt, f.length, f.shift))
    out.sort(key=lambda f: (f.length, f.word, f.source_cusp, f.target_cusp))
    return out


@dataclass
class RankTable:
    """Homology ranks by degree from the Morse-Bott S^1-families: each
    family contributes one generator in degree 0 and one in degree 1."""

    counts: dict
    cutoff: float

    def to_dict(self) -> dict:
        return {"cutoff": self.cutoff,
                "counts": {str(k): v for k, v in sorted(self.counts.items())}}


def hw_rank_table(params: TorusKnotParams, Lmax: float, **kw) -> RankTable:
    fams = enumerate_surface_cords(params, Lmax, **kw)
    n = len(fams)
    return RankTable({0: n, 1: n}, Lmax)
