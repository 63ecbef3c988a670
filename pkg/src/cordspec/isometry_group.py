"""PSL(2,C) isometries of H^3: Moebius action, Poincare extension,
horoball images, presentation checks, and pruned word / double coset
enumeration for cusped-manifold holonomy groups."""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .hyperbolic_core import PointH3

INFINITY = complex("inf")

_TOL = 1e-9


def _is_inf(w) -> bool:
    return w == INFINITY or (isinstance(w, complex) and not cmath.isfinite(w))


class Moebius:
    """A normalized element of PSL(2,C) with an optional generator word.

    Words are strings over generator letters; uppercase means inverse.
    The matrix is normalized to det 1 and sign-canonicalized so the first
    nonzero entry of (a, b, c, d) has argument in (-pi/2, pi/2].
    """

    __slots__ = ("a", "b", "c", "d", "word")

    def __init__(self, a, b, c, d, word: str = ""):
        det = a * d - b * c
        s = cmath.sqrt(det)
        a, b, c, d = a / s, b / s, c / s, d / s
        a, b, c, d = _canonical_sign(a, b, c, d)
        self.a, self.b, self.c, self.d = a, b, c, d
        self.word = word

    @classmethod
    def identity(cls) -> "Moebius":
        return cls(1, 0, 0, 1, "")

    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    def compose(self, other: "Moebius") -> "Moebius":
        return Moebius(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
            word=_free_reduce(self.word + other.word),
        )

    def inverse(self) -> "Moebius":
        return Moebius(self.d, -self.b, -self.c, self.a,
                       word=invert_word(self.word))

    def trace(self) -> complex:
        return self.a + self.d

    def is_close(self, other: "Moebius", tol: float = _TOL) -> bool:
        return max(abs(self.a - other.a), abs(self.b - other.b),
                   abs(self.c - other.c), abs(self.d - other.d)) < tol

    def key(self, digits: int = 8) -> tuple:
        """Hashable rounded key for PSL equality testing."""
        return tuple(round(v, digits) for pair in
                     ((z.real, z.imag) for z in (self.a, self.b, self.c, self.d))
                     for v in pair)

    def __repr__(self):
        return f"Moebius({self.a:.6g}, {self.b:.6g}, {self.c:.6g}, {self.d:.6g}, word={self.word!r})"


def _canonical_sign(a, b, c, d):
    for v in (a, b, c, d):
        if abs(v) > 1e-13:
            ph = cmath.phase(v)
            if ph > math.pi / 2 + 1e-15 or ph <= -math.pi / 2 + 1e-15:
                return -a, -b, -c, -d
            return a, b, c, d
    return a, b, c, d


def _free_reduce(word: str) -> str:
    out = []
    for ch in word:
        if out and out[-1] == ch.swapcase() and out[-1] != ch:
            out.pop()
        else:
            out.append(ch)
    return "".join(out)


def invert_word(word: str) -> str:
    return word[::-1].swapcase()


def apply_boundary(g: Moebius, w):
    """Action on the boundary sphere C u {inf}."""
    if _is_inf(w):
        if abs(g.c) < 1e-15:
            return INFINITY
        return g.a / g.c
    den = g.c * w + g.d
    if abs(den) < 1e-15:
        return INFINITY
    return (g.a * w + g.b) / den


def apply_h3(g: Moebius, q: PointH3) -> PointH3:
    """Poincare extension of the Moebius action to upper half-space.

    Using quaternionic coordinates w + z j: g(q) = (a(w+zj)+b)(c(w+zj)+d)^{-1}.
    """
    w = complex(q.x, q.y)
    z = q.z
    # denominator cq + d with q = w + z j
    dc = g.c * w + g.d
    den = abs(dc) ** 2 + abs(g.c) ** 2 * z**2
    nu = (g.a * w + g.b) * dc.conjugate() + g.a * g.c.conjugate() * z**2
    new_w = nu / den
    new_z = z / den  # |ad - bc| = 1
    return PointH3(new_w.real, new_w.imag, new_z)


def classify(g: Moebius, tol: float = 1e-8) -> str:
    """Classification by tr^2: identity, parabolic, elliptic, or loxodromic."""
    if g.is_close(Moebius.identity(), tol):
        return "identity"
    t2 = g.trace() ** 2
    if abs(t2 - 4) < tol:
        return "parabolic"
    if abs(t2.imag) < tol and -tol < t2.real < 4 + tol:
        return "elliptic"
    return "loxodromic"


@dataclass(frozen=True)
class Horoball:
    """Horoball with ideal center; size is the height a0 if the center is
    infinity, else the Euclidean diameter."""

    center: complex
    size: float

    def __post_init__(self):
        if not self.size > 0:
            raise ValueError("horoball size must be positive")

    def is_at_infinity(self) -> bool:
        return _is_inf(self.center)


def image_horoball(g: Moebius, B: Horoball) -> Horoball:
    """Image of a horoball under an isometry.

    For B = {z >= a0} and c != 0 the image is the ball at a/c with
    Euclidean diameter 1/(|c|^2 a0); finite centers are handled by
    factoring off the standard map sending infinity to the center.
    """
    if B.is_at_infinity():
        if abs(g.c) < 1e-14:
            # g fixes infinity; heights scale by |a|^2 (since ad = 1)
            return Horoball(INFINITY, B.size * abs(g.a) ** 2)
        return Horoball(g.a / g.c, 1.0 / (abs(g.c) ** 2 * B.size))
    # B = m . {z >= 1/diam} with m = [[w0, -1], [1, 0]]
    m = Moebius(B.center, -1, 1, 0)
    return image_horoball(g.compose(m), Horoball(INFINITY, 1.0 / B.size))


@dataclass
class GroupPresentation:
    """Holonomy data: matrix generators, relators, peripheral words."""

    name: str
    generators: list  # list of Moebius, one per lowercase letter a, b, ...
    relators: list  # list of words
    meridian: str
    longitude: str
    cusp_lattice: list = field(default_factory=list)  # [[m_re, m_im], [l_re, l_im]]

    def letters(self) -> dict:
        table = {}
        for i, g in enumerate(self.generators):
            lo = chr(ord("a") + i)
            table[lo] = g
            table[lo.upper()] = g.inverse()
        return table

    def evaluate(self, word: str) -> Moebius:
        table = self.letters()
        out = Moebius.identity()
        for ch in word:
            out = out.compose(table[ch])
        return Moebius(out.a, out.b, out.c, out.d, word=_free_reduce(word))

    def lattice_vectors(self) -> tuple:
        (m1, m2), (l1, l2) = self.cusp_lattice
        return complex(m1, m2), complex(l1, l2)


def load_presentation(path) -> GroupPresentation:
    with open(path) as f:
        data = json.load(f)
    gens = []
    for i, gd in enumerate(data["generators"]):
        a, b = complex(*gd["a"]), complex(*gd["b"])
        c, d = complex(*gd["c"]), complex(*gd["d"])
        gens.append(Moebius(a, b, c, d, word=chr(ord("a") + i)))
    return GroupPresentation(
        name=data.get("name", "unnamed"),
        generators=gens,
        relators=list(data["relators"]),
        meridian=data["meridian"],
        longitude=data["longitude"],
        cusp_lattice=data["cusp_lattice"],
    )


def verify_presentation(rep: GroupPresentation, tol: float = 1e-8) -> dict:
    """Check relators, peripheral parabolicity, and peripheral commutation.

    Returns a report dict with residuals and boolean flags; never raises
    on a failed check.
    """
    report = {"name": rep.name, "relator_residuals": [], "flags": {}, "ok": True}
    ident = Moebius.identity()
    for w in rep.relators:
        m = rep.evaluate(w).matrix()
        res = min(np.abs(m - np.eye(2)).max(), np.abs(m + np.eye(2)).max())
        report["relator_residuals"].append(float(res))
        if res > tol:
            report["ok"] = False
    flags = report["flags"]
    mer = rep.evaluate(rep.meridian)
    lon = rep.evaluate(rep.longitude)
    for label, g in (("meridian", mer), ("longitude", lon)):
        flags[f"{label}_parabolic"] = classify(g, tol) == "parabolic"
        flags[f"{label}_fixes_infinity"] = abs(g.c) < tol
    comm = mer.compose(lon).compose(mer.inverse()).compose(lon.inverse())
    flags["peripheral_commute"] = comm.is_close(ident, tol)
    if rep.cusp_lattice:
        mu, lam = rep.lattice_vectors()
        flags["lattice_matches_meridian"] = abs(mer.b / mer.a - mu) < tol
        flags["lattice_matches_longitude"] = abs(lon.b / lon.a - lam) < tol
        flags["lattice_nondegenerate"] = abs((mu.conjugate() * lam).imag) > tol
    for k, v in flags.items():
        if not v:
            report["ok"] = False
    return report


class BudgetExceeded(RuntimeError):
    pass


def enumerate_elements(rep: GroupPresentation, max_radius: float,
                       a0: float = 1.0, max_word_len: int = 14,
                       max_elements: int = 2_000_000,
                       margin: float = 8.0):
    """Breadth-first enumeration of freely reduced words in the generators.

    Yields elements whose lower-left entry satisfies a0*|c| <= e^{max_radius/2}
    (so the associated cord length is at most max_radius) together with the
    peripheral elements (c = 0) encountered.  Prefixes whose |c| exceeds the
    emission bound by ``margin`` are pruned: for discrete cusped holonomies
    |c| grows along reduced words once it leaves the peripheral subgroup, and
    the margin absorbs the non-monotone steps (validated against an unpruned
    oracle in the tests).  Deterministic order: by word length, then
    lexicographic word.
    """
    cmax = math.exp(max_radius / 2.0) / a0
    table = rep.letters()
    letters = sorted(table.keys())
    emitted = {}
    ident = Moebius.identity()
    emitted[ident.key()] = ident
    frontier = [("", ident)]
    count = 0
    for _ in range(max_word_len):
        nxt = []
        for word, g in frontier:
            for ch in letters:
                if word and word[-1] == ch.swapcase() and word[-1] != ch:
                    continue
                h = g.compose(table[ch])
                h.word = word + ch
                ac = abs(h.c)
                if ac > margin * cmax:
                    continue
                nxt.append((h.word, h))
                if ac < 1e-12 or ac <= cmax + 1e-12:
                    k = h.key()
                    if k not in emitted:
                        emitted[k] = h
                        count += 1
                        if count > max_elements:
                            raise BudgetExceeded(
                                f"element cap {max_elements} exceeded")
                        yield h
        frontier = nxt
        if not frontier:
            break


def _lattice_reduce(w: complex, mu: complex, lam: complex) -> complex:
    """Reduce w modulo the lattice Z mu + Z lam into [0,1) x [0,1) coords."""
    M = np.array([[mu.real, lam.real], [mu.imag, lam.imag]])
    st = np.linalg.solve(M, [w.real, w.imag])
    st -= np.floor(st + 1e-9)
    v = M @ st
    return complex(v[0], v[1])


def double_coset_canonical(g: Moebius, rep: GroupPresentation) -> Moebius:
    """Canonical representative of the peripheral double coset of g.

    Left/right multiplication by the cusp translations shifts a/c and d/c
    by lattice vectors without changing c; the representative puts both in
    the fundamental parallelogram of the cusp lattice, then recomputes b
    from the determinant and applies the PSL sign rule.  Idempotent.
    """
    if abs(g.c) < 1e-12:
        raise ValueError("peripheral element has no cord class")
    mu, lam = rep.lattice_vectors()
    c = g.c
    ac = _lattice_reduce(g.a / c, mu, lam)
    dc = _lattice_reduce(g.d / c, mu, lam)
    a = ac * c
    d = dc * c
    b = (a * d - 1.0) / c
    return Moebius(a, b, c, d, word=g.word)
