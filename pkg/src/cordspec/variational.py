"""Discrete energy functional on paths with endpoints on horospheres,
first/second variation with free-boundary shape-operator terms, Jacobi
fields, Morse index and nullity, and the constant-chord Hessian."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cord_engine import Cord
from .hyperbolic_core import PointH3, TangentVec, christoffel, distance, riemann
from .isometry_group import Horoball, INFINITY


@dataclass
class DiscretePath:
    """Uniform-mesh nodal path; boundary nodes sit on the designated
    horospheres (plane at infinity for node 0, finite ball for node N when
    horoballs are given)."""

    nodes: list  # N+1 PointH3
    horoballs: tuple = (None, None)

    @property
    def N(self) -> int:
        return len(self.nodes) - 1

    @classmethod
    def from_cord(cls, cord: Cord, N: int, B0: Horoball = None,
                  B1: Horoball = None) -> "DiscretePath":
        nodes = [cord.point(k / N) for k in range(N + 1)]
        return cls(nodes, (B0, B1))


def _dist_grad(q1: PointH3, q2: PointH3):
    """Gradient of the distance d(q1, q2) with respect to the coordinates of
    q1 and q2 (closed form from the cosh distance formula)."""
    dx = q1.x - q2.x
    dy = q1.y - q2.y
    dz = q1.z - q2.z
    s = dx * dx + dy * dy + dz * dz
    ch = 1.0 + s / (2.0 * q1.z * q2.z)
    sh = math.sqrt(max(ch * ch - 1.0, 1e-300))
    g1 = np.array([dx / (q1.z * q2.z),
                   dy / (q1.z * q2.z),
                   dz / (q1.z * q2.z) - s / (2.0 * q1.z**2 * q2.z)]) / sh
    g2 = np.array([-dx / (q1.z * q2.z),
                   -dy / (q1.z * q2.z),
                   -dz / (q1.z * q2.z) - s / (2.0 * q1.z * q2.z**2)]) / sh
    return g1, g2


def energy(path: DiscretePath) -> float:
    """Discrete energy (N/2) sum_k d(q_k, q_{k+1})^2.

    Exact-distance segments make sampled geodesics exactly critical; for a
    geodesic cord of length l the value is l^2/2.
    """
    N = path.N
    return 0.5 * N * sum(
        distance(path.nodes[k], path.nodes[k + 1]) ** 2 for k in range(N))


def check_boundary_tangent(path: DiscretePath, V: np.ndarray,
                           tol: float = 1e-8):
    """Raise unless the endpoint variation vectors are tangent to the
    designated horospheres."""
    B0, B1 = path.horoballs
    if B0 is not None:
        if B0.is_at_infinity():
            if abs(V[0][2]) > tol:
                raise ValueError("V(0) not tangent to the horosphere")
        else:
            c = np.array([B0.center.real, B0.center.imag, B0.size / 2.0])
            r = path.nodes[0].coords() - c
            if abs(V[0] @ r) / np.linalg.norm(r) > tol:
                raise ValueError("V(0) not tangent to the horosphere")
    if B1 is not None:
        if B1.is_at_infinity():
            if abs(V[-1][2]) > tol:
                raise ValueError("V(1) not tangent to the horosphere")
        else:
            c = np.array([B1.center.real, B1.center.imag, B1.size / 2.0])
            r = path.nodes[-1].coords() - c
            if abs(V[-1] @ r) / np.linalg.norm(r) > tol:
                raise ValueError("V(1) not tangent to the horosphere")


def first_variation(path: DiscretePath, V: np.ndarray) -> float:
    """Analytic directional derivative dE(path)(V) of the discrete energy for
    a nodal variation field V (shape (N+1, 3), coordinate components)."""
    V = np.asarray(V, dtype=float)
    check_boundary_tangent(path, V)
    N = path.N
    out = 0.0
    for k in range(N):
        q1, q2 = path.nodes[k], path.nodes[k + 1]
        d = distance(q1, q2)
        g1, g2 = _dist_grad(q1, q2)
        out += N * d * (g1 @ V[k] + g2 @ V[k + 1])
    return out


# ---------------------------------------------------------------------------
# Hessian of the energy at a cord (standard vertical frame)


@dataclass
class HessianForm:
    """Discrete second variation over transverse nodal fields (components in
    the horosphere-tangent directions d_x, d_y at each node)."""

    matrix: np.ndarray  # 2(N+1) x 2(N+1)
    mass: np.ndarray  # same shape, L^2 Gram matrix
    ell: float
    N: int

    def value(self, u: np.ndarray) -> float:
        u = np.asarray(u, dtype=float).ravel()
        return float(u @ self.matrix @ u)


def _cord_frame_data(cord: Cord, N: int):
    ell = cord.length
    a0 = 1.0 / cord.profile[0]
    t = np.arange(N + 1) / N
    z = a0 * np.exp(-ell * t)
    return ell, a0, t, z


def hessian(cord: Cord, N: int = 256, route: str = "direct",
            curvature_sign: float = 1.0,
            include_boundary: bool = True) -> HessianForm:
    """Second variation quadratic form of the energy at a nondegenerate cord,
    assembled over transverse variation fields in the standard vertical
    frame of the cord.

    route "direct": integrand |DV/dt|^2 + |c'|^2 |V|^2 with the Robin
    boundary terms l(|V(0)|^2 + |V(1)|^2).
    route "curvature": the general form with -<R(V, c')c', V> evaluated by
    the curvature operator and the boundary contribution |c'| <S V, V> via
    the numeric shape operator of the horospheres.
    The ``curvature_sign`` and ``include_boundary`` switches exist only for
    constructing synthetic counterexamples in tests.
    """
    if cord.length <= 0:
        raise ValueError("constant chord: use constant_chord_hessian")
    ell, a0, tgrid, z = _cord_frame_data(cord, N)
    h = 1.0 / N
    n = N + 1
    H = np.zeros((2 * n, 2 * n))
    M = np.zeros((2 * n, 2 * n))

    def idx(comp, k):
        return comp * n + k

    for k in range(N):
        zm = math.sqrt(z[k] * z[k + 1])  # geometric midpoint height
        w = 1.0 / zm**2
        qmid = PointH3(cord.point((k + 0.5) / N).x,
                       cord.point((k + 0.5) / N).y, zm)
        if route == "curvature":
            # -<R(V, c')c', V> via the curvature operator, per component
            cdot = TangentVec(qmid, (0.0, 0.0, -ell * zm))
            curv = []
            for comp in range(2):
                e = [0.0, 0.0, 0.0]
                e[comp] = 1.0
                Vv = TangentVec(qmid, tuple(e))
                Rv = riemann(qmid, Vv, cdot, cdot)
                curv.append(-(np.array(Rv.v) @ np.array(e)) / zm**2)
        else:
            curv = [ell**2 * w, ell**2 * w]
        for comp in range(2):
            i0, i1 = idx(comp, k), idx(comp, k + 1)
            # DV/dt at the midpoint: (V_{k+1}-V_k)/h + l * Vmid
            ca = (-1.0 / h + ell / 2.0)
            cb = (1.0 / h + ell / 2.0)
            # h * w * (ca V_k + cb V_{k+1})^2
            H[i0, i0] += h * w * ca * ca
            H[i1, i1] += h * w * cb * cb
            H[i0, i1] += h * w * ca * cb
            H[i1, i0] += h * w * ca * cb
            # curvature term on the midpoint value
            q = h * curvature_sign * curv[comp] / 4.0
            H[i0, i0] += q
            H[i1, i1] += q
            H[i0, i1] += q
            H[i1, i0] += q
            # trapezoid L^2 mass (nodal, positive definite)
            M[i0, i0] += h / (2.0 * z[k] ** 2)
            M[i1, i1] += h / (2.0 * z[k + 1] ** 2)
    if include_boundary:
        if route == "curvature":
            s0 = _shape_operator_diag(PointH3(0.0, 0.0, z[0]))
            s1 = _shape_operator_diag(PointH3(0.0, 0.0, z[N]))
        else:
            s0 = s1 = (1.0, 1.0)
        for comp in range(2):
            H[idx(comp, 0), idx(comp, 0)] += ell * s0[comp] / z[0] ** 2
            H[idx(comp, N), idx(comp, N)] += ell * s1[comp] / z[N] ** 2
    return HessianForm((H + H.T) / 2.0, (M + M.T) / 2.0, ell, N)


def _shape_operator_diag(q: PointH3, step: float = 1e-6) -> tuple:
    """Diagonal of the horosphere shape operator at q for the normal field
    pointing into the adjacent horoball (numeric covariant derivative of the
    normal field nu = z d_z of the foliation by horizontal horospheres)."""
    gam = christoffel(q)
    diag = []
    for comp in range(2):
        e = np.zeros(3)
        e[comp] = step
        qp = PointH3.from_coords(q.coords() + e)
        qm = PointH3.from_coords(q.coords() - e)
        nu_p = np.array([0.0, 0.0, qp.z])
        nu_m = np.array([0.0, 0.0, qm.z])
        dnu = (nu_p - nu_m) / (2 * step)
        nu = np.array([0.0, 0.0, q.z])
        ev = np.zeros(3)
        ev[comp] = 1.0
        cov = dnu + np.einsum("aij,i,j->a", gam, ev, nu)
        # S(e) = -(nabla_e nu)^tangent; tangent components are x, y
        diag.append(-cov[comp])
    return tuple(diag)


def mean_curvature(z0: float) -> float:
    """Mean curvature of the horosphere {z = z0} from the shape operator
    (average of the two principal curvatures); equals 1 for every z0 > 0."""
    d = _shape_operator_diag(PointH3(0.0, 0.0, z0))
    return 0.5 * (d[0] + d[1])


def shape_operator_eigenvalues(z0: float) -> tuple:
    return _shape_operator_diag(PointH3(0.0, 0.0, z0))


def index_nullity(H: HessianForm, zero_band: float = None) -> tuple:
    """Counts of negative and near-zero eigenvalues of the generalized
    problem H u = lambda M u.  The zero band defaults to 10/N^2."""
    from scipy.linalg import eigh

    if zero_band is None:
        zero_band = 10.0 / H.N**2
    vals = eigh(H.matrix, H.mass, eigvals_only=True)
    index = int(np.sum(vals < -zero_band))
    nullity = int(np.sum(np.abs(vals) <= zero_band))
    return index, nullity


def smallest_eigenvalue(H: HessianForm) -> float:
    from scipy.linalg import eigh

    vals = eigh(H.matrix, H.mass, eigvals_only=True)
    return float(vals[0])


def jacobi_solve(ell: float, V0, dV0):
    """Sampler for the Jacobi field solving D^2V/dt^2 = l^2 V in a parallel
    frame: V(t) = V0 cosh(lt) + (dV0/l) sinh(lt), with the l -> 0 limit
    V0 + t dV0."""
    V0 = np.asarray(V0, dtype=float)
    dV0 = np.asarray(dV0, dtype=float)

    if ell < 0:
        raise ValueError("length must be nonnegative")

    def sample(t):
        if ell == 0.0:
            return V0 + t * dV0
        return V0 * math.cosh(ell * t) + dV0 * math.sinh(ell * t) / ell

    return sample


def constant_chord_hessian(a0: float = 1.0, N: int = 128) -> tuple:
    """Kernel and cokernel dimensions of the linearized constant-chord
    problem at a point of the horo-torus {z = a0}.

    The linearization of the Hamiltonian chord equations at a constant chord
    (q, p = 0) is dq' = z^2 dp, dp' = 0, with endpoint conditions
    dq(i) tangent to the torus and dp(i) conormal.  Both dimensions equal
    dim T = 2: constant tangent fields (v, 0) span the kernel, and constant
    conormal-dual fields (0, beta) span the cokernel.
    """
    h = 1.0 / N
    n = N + 1
    dim = 6 * n
    rows = []

    def unit(j):
        r = np.zeros(dim)
        r[j] = 1.0
        return r

    def var(k, comp):
        # comp 0..2: dq, comp 3..5: dp at node k
        return 6 * k + comp

    for k in range(N):
        for c in range(3):
            # (dq_{k+1} - dq_k)/h - a0^2 (dp_k + dp_{k+1})/2 = 0
            r = np.zeros(dim)
            r[var(k + 1, c)] += 1.0 / h
            r[var(k, c)] -= 1.0 / h
            r[var(k, 3 + c)] -= a0**2 / 2.0
            r[var(k + 1, 3 + c)] -= a0**2 / 2.0
            rows.append(r)
            # (dp_{k+1} - dp_k)/h = 0
            r = np.zeros(dim)
            r[var(k + 1, 3 + c)] += 1.0 / h
            r[var(k, 3 + c)] -= 1.0 / h
            rows.append(r)
    # boundary: dq_z = 0 at both ends; dp_x = dp_y = 0 at both ends
    rows.append(unit(var(0, 2)))
    rows.append(unit(var(N, 2)))
    rows.append(unit(var(0, 3)))
    rows.append(unit(var(0, 4)))
    rows.append(unit(var(N, 3)))
    rows.append(unit(var(N, 4)))
    L = np.array(rows)
    sv = np.linalg.svd(L, compute_uv=False)
    tol = 1e-8 * sv[0]
    rank = int(np.sum(sv > tol))
    kernel_dim = L.shape[1] - rank
    cokernel_dim = L.shape[0] - rank
    return kernel_dim, cokernel_dim
