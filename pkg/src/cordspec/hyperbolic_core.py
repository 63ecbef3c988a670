"""Analytic primitives of the upper half-space model of hyperbolic 3-space.

The model is H^3 = {(x, y, z) : z > 0} with metric (dx^2 + dy^2 + dz^2)/z^2,
constant sectional curvature -1.  The plane {x = 0} is a totally geodesic
copy of H^2 used by the 2D specializations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PointH3:
    """A point of upper half-space; z must be positive."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        if not self.z > 0:
            raise ValueError(f"z must be positive, got {self.z}")

    def coords(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    @staticmethod
    def from_coords(v) -> "PointH3":
        return PointH3(float(v[0]), float(v[1]), float(v[2]))


@dataclass(frozen=True)
class TangentVec:
    """A tangent vector at a base point, components in d/dx, d/dy, d/dz."""

    base: PointH3
    v: tuple

    def vec(self) -> np.ndarray:
        return np.asarray(self.v, dtype=float)

    def norm(self) -> float:
        w = self.vec()
        return math.sqrt(float(w @ w)) / self.base.z


def metric_tensor(q: PointH3) -> np.ndarray:
    """Metric matrix h_ij = delta_ij / z^2 at q."""
    return np.eye(3) / q.z**2


def christoffel(q: PointH3) -> np.ndarray:
    """Christoffel symbols Gamma^a_ij of the hyperbolic metric.

    Nonzero symbols: Gamma^3_11 = Gamma^3_22 = 1/z and
    Gamma^1_13 = Gamma^1_31 = Gamma^2_23 = Gamma^2_32 = Gamma^3_33 = -1/z.
    Indexed as gamma[a, i, j].
    """
    g = np.zeros((3, 3, 3))
    iz = 1.0 / q.z
    g[2, 0, 0] = iz
    g[2, 1, 1] = iz
    g[0, 0, 2] = g[0, 2, 0] = -iz
    g[1, 1, 2] = g[1, 2, 1] = -iz
    g[2, 2, 2] = -iz
    return g


def christoffel_fd(q: PointH3, rel_step: float = 1e-5) -> np.ndarray:
    """Christoffel symbols from central differences of metric_tensor.

    Independent Levi-Civita computation used as an oracle for christoffel.
    """
    h = rel_step * q.z
    c = q.coords()
    dg = np.zeros((3, 3, 3))  # dg[k, i, j] = d_k g_ij
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        gp = metric_tensor(PointH3.from_coords(c + e))
        gm = metric_tensor(PointH3.from_coords(c - e))
        dg[k] = (gp - gm) / (2 * h)
    ginv = np.linalg.inv(metric_tensor(q))
    gamma = np.zeros((3, 3, 3))
    for a in range(3):
        for i in range(3):
            for j in range(3):
                s = 0.0
                for m in range(3):
                    s += ginv[a, m] * (dg[i, m, j] + dg[j, m, i] - dg[m, i, j])
                gamma[a, i, j] = 0.5 * s
    return gamma


def inner(X: TangentVec, Y: TangentVec) -> float:
    """Riemannian inner product; bases must agree."""
    if X.base != Y.base:
        raise ValueError("mismatched base points")
    return float(X.vec() @ Y.vec()) / X.base.z**2


def riemann(q: PointH3, X: TangentVec, Y: TangentVec, Z: TangentVec) -> TangentVec:
    """Curvature operator R(X,Y)Z = <Z,X>Y - <Z,Y>X (curvature -1)."""
    for W in (X, Y, Z):
        if W.base != q:
            raise ValueError("mismatched base points")
    out = inner(Z, X) * Y.vec() - inner(Z, Y) * X.vec()
    return TangentVec(q, tuple(out))


def riemann_fd(q: PointH3, X: TangentVec, Y: TangentVec, Z: TangentVec,
               rel_step: float = 1e-4) -> TangentVec:
    """Curvature from finite differences of the Christoffel symbols.

    R^a_bij = d_i Gamma^a_jb - d_j Gamma^a_ib
              + Gamma^a_im Gamma^m_jb - Gamma^a_jm Gamma^m_ib,
    contracted with X^i Y^j Z^b.  Independent oracle for riemann.
    """
    h = rel_step * q.z
    c = q.coords()
    dgam = np.zeros((3, 3, 3, 3))  # dgam[k, a, i, j] = d_k Gamma^a_ij
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        gp = christoffel(PointH3.from_coords(c + e))
        gm = christoffel(PointH3.from_coords(c - e))
        dgam[k] = (gp - gm) / (2 * h)
    gam = christoffel(q)
    R = np.zeros((3, 3, 3, 3))  # R[a, b, i, j] = R^a_{bij}
    for a in range(3):
        for b in range(3):
            for i in range(3):
                for j in range(3):
                    val = dgam[i, a, j, b] - dgam[j, a, i, b]
                    for m in range(3):
                        val += gam[a, i, m] * gam[m, j, b] - gam[a, j, m] * gam[m, i, b]
                    R[a, b, i, j] = val
    out = np.einsum("abij,i,j,b->a", R, X.vec(), Y.vec(), Z.vec())
    return TangentVec(q, tuple(out))


def distance(q1: PointH3, q2: PointH3) -> float:
    """Hyperbolic distance via cosh d = 1 + |dq|^2 / (2 z1 z2)."""
    d2 = (q1.x - q2.x) ** 2 + (q1.y - q2.y) ** 2 + (q1.z - q2.z) ** 2
    return math.acosh(1.0 + d2 / (2.0 * q1.z * q2.z))


def busemann(q: PointH3) -> float:
    """Busemann function of the vertical ray to infinity: -log z."""
    return -math.log(q.z)


def geodesic_point(q: PointH3, v: TangentVec, t: float) -> PointH3:
    """Point at arc length t along the unit-speed geodesic through q with velocity v.

    Closed form: vertical lines and Euclidean semicircles orthogonal to {z=0}.
    """
    w = v.vec()
    nrm = v.norm()
    if nrm == 0.0:
        raise ValueError("zero velocity vector")
    if abs(nrm - 1.0) > 1e-9:
        w = w / nrm
    vx, vy, vz = w / q.z  # unit Euclidean direction
    horiz = math.hypot(vx, vy)
    if horiz < 1e-14:
        # vertical geodesic
        s = 1.0 if vz > 0 else -1.0
        return PointH3(q.x, q.y, q.z * math.exp(s * t))
    # work in the vertical plane through q spanned by (vx,vy)/horiz and z
    ux, uy = vx / horiz, vy / horiz
    # 2D upper half-plane point (0, z) with unit tangent (horiz, vz);
    # realize as A * R_theta acting on the vertical geodesic i e^t in PSL(2,R)
    z0 = q.z
    # angle of the tangent measured from vertical: tangent (sin a, cos a)
    a = math.atan2(horiz, vz)
    # Mobius: rotate the vertical tangent at i by a, then scale i -> i z0;
    # the horizontal offset is applied in the (ux, uy) frame afterwards.
    half = -a / 2.0
    ca, sa = math.cos(half), math.sin(half)
    rz = math.sqrt(z0)
    # A = [[rz, 0], [0, 1/rz]] . [[ca, sa], [-sa, ca]]
    ma, mb = rz * ca, rz * sa
    mc, md = -sa / rz, ca / rz
    et = math.exp(t)
    # image of i e^t under [[ma, mb], [mc, md]]
    num = complex(mb, ma * et)
    den = complex(md, mc * et)
    wpt = num / den
    u, zz = wpt.real, wpt.imag
    return PointH3(q.x + u * ux, q.y + u * uy, zz)


def geodesic_h2_point(u0: float, z0: float, angle: float, t: float) -> tuple:
    """Unit-speed geodesic in the upper half-plane from (u0, z0).

    ``angle`` measures the initial tangent from the vertical: tangent
    direction (sin angle, cos angle).  Returns (u, z) after arc length t.
    """
    half = -angle / 2.0
    ca, sa = math.cos(half), math.sin(half)
    rz = math.sqrt(z0)
    ma, mb = rz * ca, rz * sa
    mc, md = -sa / rz, ca / rz
    et = math.exp(t)
    w = complex(mb, ma * et) / complex(md, mc * et)
    return (u0 + w.real, w.imag)
