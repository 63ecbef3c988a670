"""Geodesic cords of a horo-torus: common perpendiculars between horoballs,
closed-form lengths, z-profiles, lifts to Hamiltonian chords, and action
spectrum enumeration over peripheral double cosets."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .hyperbolic_core import PointH3, distance
from .isometry_group import (INFINITY, GroupPresentation, Horoball, Moebius,
                             apply_h3, double_coset_canonical,
                             enumerate_elements, image_horoball)


@dataclass
class Cord:
    """A geodesic arc meeting two horospheres orthogonally, parameterized on
    [0, 1] at constant speed ``length``.

    ``profile`` holds (f0, b0) of the reciprocal height along the arc:
    f(t) = 1/z(c(t)) = f0 cosh(l t) + b0 sinh(l t).
    """

    class_word: str
    length: float
    start: PointH3
    end: PointH3
    profile: tuple
    centers: tuple = (INFINITY, 0j)  # ideal centers of the two horoballs
    _conjugator: Moebius | None = field(default=None, repr=False)
    _a0: float = field(default=1.0, repr=False)
    _parametric: bool = field(default=True, repr=False)

    @classmethod
    def from_vertical(cls, class_word: str, a0: float, center: complex,
                      length: float, conjugator: Moebius | None = None) -> "Cord":
        """Cord that is the vertical segment over ``center`` from z = a0 down
        to z = a0 e^{-length}, optionally pushed forward by ``conjugator``."""
        cx, cy = center.real, center.imag
        start = PointH3(cx, cy, a0)
        end = PointH3(cx, cy, a0 * math.exp(-length))
        centers = (INFINITY, center)
        cord = cls(class_word, length, start, end, (1.0 / a0, 1.0 / a0),
                   centers, None, a0)
        if conjugator is not None:
            cord = cord.transformed(conjugator)
        return cord

    @classmethod
    def from_endpoints(cls, class_word: str, start: PointH3, end: PointH3,
                       length: float) -> "Cord":
        """Cord from endpoint data alone (used by the shooting solver); the
        profile coefficients are recovered from the endpoint heights."""
        f0 = 1.0 / start.z
        f1 = 1.0 / end.z
        b0 = (f1 - f0 * math.cosh(length)) / math.sinh(length)
        return cls(class_word, length, start, end, (f0, b0),
                   _parametric=False)

    def transformed(self, g: Moebius) -> "Cord":
        new = Cord(self.class_word, self.length,
                   apply_h3(g, self.start), apply_h3(g, self.end),
                   self.profile, tuple(_apply_center(g, c) for c in self.centers),
                   _compose_opt(g, self._conjugator), self._a0)
        f0 = 1.0 / new.start.z
        f1 = 1.0 / new.end.z
        b0 = (f1 - f0 * math.cosh(new.length)) / math.sinh(new.length)
        new.profile = (f0, b0)
        return new

    def point(self, t: float) -> PointH3:
        """The point c(t), t in [0, 1]."""
        if not self._parametric:
            raise ValueError("cord built from endpoints has no parameterization")
        cx = self.centers[1] if not _is_center_inf(self.centers[1]) else 0j
        if self._conjugator is None and _is_center_inf(self.centers[0]):
            return PointH3(cx.real, cx.imag, self._a0 * math.exp(-self.length * t))
        base = PointH3(self._base_center().real, self._base_center().imag,
                       self._a0 * math.exp(-self.length * t))
        return apply_h3(self._conjugator, base)

    def _base_center(self) -> complex:
        g = self._conjugator.inverse()
        c = _apply_center(g, self.centers[1])
        return c

    def velocity(self, t: float, h: float = 1e-6) -> np.ndarray:
        """Coordinate velocity dc/dt by central differences."""
        return (self.point(t + h).coords() - self.point(t - h).coords()) / (2 * h)

    def energy(self) -> float:
        return 0.5 * self.length**2

    def action(self) -> float:
        return -self.energy()


def _is_center_inf(c) -> bool:
    return c == INFINITY or (isinstance(c, complex) and not math.isfinite(abs(c)))


def _apply_center(g: Moebius, c):
    from .isometry_group import apply_boundary

    return apply_boundary(g, c)


def _compose_opt(g: Moebius, h: Moebius | None) -> Moebius:
    return g if h is None else g.compose(h)


def common_perpendicular(B0: Horoball, B1: Horoball,
                         class_word: str = "") -> Cord:
    """The unique geodesic arc meeting both horospheres orthogonally,
    parameterized on [0, 1] from B0 to B1.

    Degenerate (tangent or overlapping) horoballs are rejected.
    """
    inf0, inf1 = B0.is_at_infinity(), B1.is_at_infinity()
    if inf0 and inf1:
        raise ValueError("horoballs share the center at infinity")
    if not inf0 and not inf1 and abs(B0.center - B1.center) < 1e-14:
        raise ValueError("horoballs share a center")
    if inf0:
        a0, d = B0.size, B1.size
        if d >= a0 - 1e-12:
            raise ValueError("tangent or overlapping horoballs (no cord)")
        return Cord.from_vertical(class_word, a0, B1.center, math.log(a0 / d))
    # move B0's center to infinity with m: w -> -1/(w - w0)
    m = Moebius(0, -1, 1, -B0.center)
    B0p = image_horoball(m, B0)
    B1p = image_horoball(m, B1)
    cord = common_perpendicular(B0p, B1p, class_word)
    return cord.transformed(m.inverse())


def cord_length(g: Moebius, a0: float) -> float:
    """Closed-form cord length 2 ln(a0 |c(g)|) for the class of g relative
    to the horoball {z >= a0}."""
    ac = abs(g.c)
    if ac < 1e-14:
        raise ValueError("peripheral element has no cord")
    if a0 * ac <= 1.0 + 1e-12:
        raise ValueError("tangent or overlapping horoballs")
    return 2.0 * math.log(a0 * ac)


def cord_for_class(g: Moebius, a0: float) -> Cord:
    """The geodesic cord from {z >= a0} to its image horoball under g."""
    B0 = Horoball(INFINITY, a0)
    return common_perpendicular(B0, image_horoball(g, B0), class_word=g.word)


def z_profile(cord: Cord) -> tuple:
    """Profile coefficients (f0, b0) with f(t) = f0 cosh(lt) + b0 sinh(lt)."""
    return cord.profile


def z_profile_residual(cord: Cord, samples: int = 100) -> float:
    """Max deviation of 1/z(c(t)) from the cosh/sinh profile on a grid."""
    f0, b0 = cord.profile
    ell = cord.length
    worst = 0.0
    for t in np.linspace(0.0, 1.0, samples):
        f = 1.0 / cord.point(float(t)).z
        model = f0 * math.cosh(ell * t) + b0 * math.sinh(ell * t)
        worst = max(worst, abs(f - model))
    return worst


@dataclass
class HamiltonianChord:
    """The cotangent lift (c(t), c'(t)-flat) of a cord; a Hamiltonian
    trajectory with endpoints on the conormal of the horo-torus."""

    cord: Cord

    def state(self, t: float):
        from .flow_integrator import CotangentState

        q = self.cord.point(t)
        v = self.cord.velocity(t)
        return CotangentState(q, v / q.z**2)  # flat: p_i = v_i / z^2

    def hamiltonian_value(self) -> float:
        return 0.5 * self.cord.length**2


def lift_to_chord(cord: Cord) -> HamiltonianChord:
    return HamiltonianChord(cord)


def action(chord: HamiltonianChord) -> float:
    """Action of the chord: minus the energy of the underlying cord."""
    return -chord.cord.energy()


@dataclass
class SpectrumEntry:
    class_word: str
    length: float
    energy: float
    action: float
    f0: float
    b0: float


@dataclass
class ActionSpectrum:
    entries: list
    cutoff: float
    horoball_height: float

    def lengths(self) -> list:
        return [e.length for e in self.entries]

    def to_json(self) -> str:
        return json.dumps({
            "cutoff": self.cutoff,
            "horoball_height": self.horoball_height,
            "entries": [e.__dict__ for e in self.entries],
        }, indent=1)

    def write_csv(self, path):
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["class_word", "length", "energy", "action", "f0", "b0"])
            for e in self.entries:
                w.writerow([e.class_word, f"{e.length:.12g}", f"{e.energy:.12g}",
                            f"{e.action:.12g}", f"{e.f0:.12g}", f"{e.b0:.12g}"])

    def write_json(self, path):
        with open(path, "w") as f:
            f.write(self.to_json())


def max_embedded_height(rep: GroupPresentation, search_word_len: int = 8) -> float:
    """Smallest height a0 such that the translates of {z >= a0} are pairwise
    disjoint: 1 / min |c| over the enumerated non-peripheral elements.

    Returns the default 1.0 when the group has no element with c != 0.
    """
    best = None
    for g in enumerate_elements(rep, max_radius=12.0,
                                max_word_len=search_word_len):
        ac = abs(g.c)
        if ac > 1e-9 and (best is None or ac < best):
            best = ac
    if best is None:
        return 1.0
    return 1.0 / best


def canonical_classes(rep: GroupPresentation, a0: float, Lmax: float,
                      max_word_len: int = 10) -> list:
    """Deterministic list of canonical double-coset representatives with
    nondegenerate cord length <= Lmax, sorted by (length, word)."""
    classes = {}
    for g in enumerate_elements(rep, max_radius=Lmax, a0=a0,
                                max_word_len=max_word_len):
        ac = abs(g.c)
        if ac < 1e-9:
            continue  # peripheral
        if a0 * ac <= 1.0 + 1e-9:
            continue  # tangent horoballs: degenerate class, rejected
        if 2.0 * math.log(a0 * ac) > Lmax + 1e-12:
            continue
        cg = double_coset_canonical(g, rep)
        key = cg.key(6)
        if key not in classes:
            classes[key] = cg
    out = sorted(classes.values(),
                 key=lambda m: (2.0 * math.log(a0 * abs(m.c)), m.word))
    return out


def enumerate_cords(rep: GroupPresentation, a0: float, Lmax: float,
                    max_word_len: int = 10) -> ActionSpectrum:
    """Action spectrum of the pair: one entry per nontrivial double coset
    with cord length <= Lmax, sorted by action descending (shortest first).

    a0 must be at least the embedded-height threshold of the group.
    """
    a_min = max_embedded_height(rep)
    if a0 < a_min - 1e-9:
        raise ValueError(
            f"height {a0} below embedded threshold {a_min}: horoballs overlap")
    entries = []
    for cg in canonical_classes(rep, a0, Lmax, max_word_len):
        ell = cord_length(cg, a0)
        entries.append(SpectrumEntry(
            class_word=cg.word, length=ell, energy=0.5 * ell**2,
            action=-0.5 * ell**2, f0=1.0 / a0, b0=1.0 / a0))
    entries.sort(key=lambda e: (-e.action, e.class_word))
    return ActionSpectrum(entries, Lmax, a0)


def extend_to_tame(cord: Cord) -> tuple:
    """Ideal endpoints of the bi-infinite geodesic extension of the cord:
    the two horoball centers."""
    if cord.length <= 0:
        raise ValueError("constant cord has no geodesic extension")
    return cord.centers
