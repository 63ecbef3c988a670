"""Kinetic Hamiltonian system on T*H^3: vector field, metric almost complex
structure in the horizontal/vertical frame, symplectic integration, Neumann
shooting for cords, cylindrical end metrics, and pointwise two-form identity
checks done by finite-difference exterior derivatives.

Cotangent coordinates are (x, y, z, p_x, p_y, p_z); the symplectic form is
omega_0 = sum dq^i ^ dp_i and theta = sum p_i dq^i.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .hyperbolic_core import PointH3, christoffel
from .isometry_group import Horoball, Moebius, image_horoball


@dataclass
class CotangentState:
    """A point (q, p) of T*H^3 with covector components p."""

    q: PointH3
    p: np.ndarray

    def __post_init__(self):
        self.p = np.asarray(self.p, dtype=float)

    def vector(self) -> np.ndarray:
        return np.concatenate([self.q.coords(), self.p])

    @staticmethod
    def from_vector(v) -> "CotangentState":
        return CotangentState(PointH3(float(v[0]), float(v[1]), float(v[2])),
                              np.asarray(v[3:6], dtype=float))


def hamiltonian(s: CotangentState) -> float:
    """Kinetic Hamiltonian H = z^2 |p|^2 / 2."""
    return 0.5 * s.q.z**2 * float(s.p @ s.p)


def _rhs(v: np.ndarray) -> np.ndarray:
    """Coordinate Hamiltonian vector field of the kinetic Hamiltonian:
    X_H = z^2 (p_x d_x + p_y d_y + p_z d_z) - z |p|^2 d_{p_z}."""
    z = v[2]
    p = v[3:6]
    out = np.empty(6)
    out[0:3] = z**2 * p
    out[3:5] = 0.0
    out[5] = -z * float(p @ p)
    return out


def ham_vector_field(s: CotangentState) -> np.ndarray:
    return _rhs(s.vector())


def hamiltonian_gradient(v: np.ndarray) -> np.ndarray:
    """Analytic dH in coordinates (used for frame and form computations)."""
    z = v[2]
    p = v[3:6]
    g = np.zeros(6)
    g[2] = z * float(p @ p)
    g[3:6] = z**2 * p
    return g


@dataclass
class FrameData:
    """Horizontal vectors H_i and vertical vectors V_i at a state, as columns
    of 6-component coordinate vectors, plus the frame matrix F = [H | V]."""

    H: np.ndarray  # 6 x 3
    V: np.ndarray  # 6 x 3
    F: np.ndarray  # 6 x 6


def frame_fields(s: CotangentState) -> FrameData:
    """Sasakian frame: H_i = d_{q^i} + p_a Gamma^a_{ij} d_{p_j}, V_i = d_{p_i}."""
    gam = christoffel(s.q)
    H = np.zeros((6, 3))
    for i in range(3):
        H[i, i] = 1.0
        for j in range(3):
            H[3 + j, i] = float(s.p @ gam[:, i, j])
    V = np.zeros((6, 3))
    V[3:, :] = np.eye(3)
    return FrameData(H, V, np.hstack([H, V]))


def sasakian_J(s: CotangentState) -> np.ndarray:
    """Metric almost complex structure in coordinates.

    In the frame, J maps H_i -> h_ij V_j = (1/z^2) V_i and
    V_i -> -h^ij H_j = -z^2 H_i; J^2 = -Identity.
    """
    fr = frame_fields(s)
    z2 = s.q.z**2
    B = np.zeros((6, 6))
    for i in range(3):
        B[3 + i, i] = 1.0 / z2
        B[i, 3 + i] = -z2
    return fr.F @ B @ np.linalg.inv(fr.F)


def symplectic_form_matrix() -> np.ndarray:
    """Matrix of omega_0 = sum dq^i ^ dp_i: omega(u, v) = u^T Om v."""
    Om = np.zeros((6, 6))
    for i in range(3):
        Om[i, 3 + i] = 1.0
        Om[3 + i, i] = -1.0
    return Om


def theta_covector(s: CotangentState) -> np.ndarray:
    """The canonical one-form theta = p dq as a coordinate covector."""
    out = np.zeros(6)
    out[0:3] = s.p
    return out


def integrate_flow(s0: CotangentState, T: float, dt: float,
                   return_path: bool = False):
    """Implicit-midpoint integration of the Hamiltonian flow.

    Symmetric and symplectic; suitable for the non-separable kinetic
    Hamiltonian.  Raises on step underflow when the trajectory approaches
    the boundary z = 0.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    n = int(round(abs(T) / dt))
    sgn = 1.0 if T >= 0 else -1.0
    v = s0.vector()
    path = [v.copy()] if return_path else None
    for _ in range(n):
        v = _midpoint_step(v, sgn * dt)
        if v[2] <= 1e-12:
            raise FloatingPointError("step underflow: trajectory hit z -> 0")
        if return_path:
            path.append(v.copy())
    if return_path:
        return CotangentState.from_vector(v), np.array(path)
    return CotangentState.from_vector(v)


def _midpoint_step(v: np.ndarray, dt: float, tol: float = 1e-13,
                   max_iter: int = 60) -> np.ndarray:
    vn = v + dt * _rhs(v)  # explicit Euler predictor
    for _ in range(max_iter):
        mid = 0.5 * (v + vn)
        vnew = v + dt * _rhs(mid)
        if np.max(np.abs(vnew - vn)) < tol:
            return vnew
        vn = vnew
    return vn


def geodesic_residual(path: np.ndarray, dt: float) -> float:
    """Max residual of the geodesic equation along the projected trajectory,
    q'' + Gamma(q)[q', q'] = 0, via central differences."""
    qs = path[:, 0:3]
    worst = 0.0
    for k in range(1, len(qs) - 1):
        qd = (qs[k + 1] - qs[k - 1]) / (2 * dt)
        qdd = (qs[k + 1] - 2 * qs[k] + qs[k - 1]) / dt**2
        gam = christoffel(PointH3.from_coords(qs[k]))
        res = qdd + np.einsum("aij,i,j->a", gam, qd, qd)
        worst = max(worst, float(np.max(np.abs(res))))
    return worst


# ---------------------------------------------------------------------------
# finite-difference exterior calculus on T*H^3


def _d_oneform(alpha, v: np.ndarray, step: float) -> np.ndarray:
    """Exterior derivative matrix of a 1-form field alpha at v:
    (d alpha)[m, n] = d_m alpha_n - d_n alpha_m by central differences."""
    A = np.zeros((6, 6))  # A[m, n] = d_m alpha_n
    for m in range(6):
        h = step * (v[2] if m in (0, 1, 2) else 1.0)
        e = np.zeros(6)
        e[m] = h
        A[m] = (alpha(v + e) - alpha(v - e)) / (2 * h)
    return A - A.T


def _alpha_df_J(v: np.ndarray, grad) -> np.ndarray:
    s = CotangentState.from_vector(v)
    return grad(v) @ sasakian_J(s)


def plurisubharmonic_value(s: CotangentState, step: float = 1e-5) -> float:
    """Value of -d(df o J)(X, JX) on the unit-normalized horizontal
    directions for the exhaustion function f = H + 1/z.

    For the hyperbolic metric the value is (1+z)/z^3, independent of the
    horizontal direction i; the three directions are averaged.
    """

    def grad(v):
        g = hamiltonian_gradient(v)
        g[2] -= 1.0 / v[2] ** 2  # d(1/z)
        return g

    v = s.vector()
    dal = _d_oneform(lambda w: _alpha_df_J(w, grad), v, step)
    J = sasakian_J(s)
    fr = frame_fields(s)
    vals = []
    for i in range(3):
        X = fr.H[:, i]
        vals.append(-float(X @ dal @ (J @ X)))
    return float(np.mean(vals))


def form_identity_residuals(s: CotangentState, step: float = 1e-5) -> dict:
    """Pointwise residuals of the two-form identities, evaluated on all 15
    coordinate 2-plane pairs with finite-difference exterior derivatives.

    Checked identities:
      1. -d(dH o J) = omega_0   (equivalently dH o J = theta)
      2. -d(dphi o J) = phi omega_0 - dphi ^ theta   for phi = x/z
      3. -dV^3 = -d(1/z) ^ theta + (1/z) omega_0
         where V^3 = dp_z + (1/z) theta
    Returns a dict of max residuals per identity.
    """
    v = s.vector()
    z = v[2]
    Om = symplectic_form_matrix()
    th = theta_covector(s)

    def wedge(a, b):
        return np.outer(a, b) - np.outer(b, a)

    # identity 1
    d1 = _d_oneform(lambda w: _alpha_df_J(w, hamiltonian_gradient), v, step)
    r1 = np.max(np.abs(-d1 - Om))
    # algebraic form of the same statement
    r1b = np.max(np.abs(_alpha_df_J(v, hamiltonian_gradient) - th))

    # identity 2, phi = x/z
    def grad_phi(w):
        g = np.zeros(6)
        g[0] = 1.0 / w[2]
        g[2] = -w[0] / w[2] ** 2
        return g

    d2 = _d_oneform(lambda w: _alpha_df_J(w, grad_phi), v, step)
    phi = v[0] / z
    dphi = grad_phi(v)
    r2 = np.max(np.abs(-d2 - (phi * Om - wedge(dphi, th))))

    # identity 3, V^3 = dp_z + theta/z
    def v3(w):
        out = np.zeros(6)
        out[5] = 1.0
        out[0:3] += w[3:6] / w[2]
        return out

    d3 = _d_oneform(v3, v, step)
    dzinv = np.zeros(6)
    dzinv[2] = -1.0 / z**2
    r3 = np.max(np.abs(-d3 - (-wedge(dzinv, th) + Om / z)))

    return {"dH_J": float(r1), "dH_J_algebraic": float(r1b),
            "phi_x_over_z": float(r2), "vertical_coframe": float(r3)}


# ---------------------------------------------------------------------------
# Neumann shooting


def shoot_neumann(B0: Horoball, g: Moebius, max_iter: int = 60,
                  tol: float = 1e-12, initial_guess=None):
    """Solve the two-horosphere Neumann boundary value problem by damped
    Newton iteration and return the resulting cord.

    B0 must be the horoball {z >= a0} at infinity; the target is its image
    B1 under g.  Unknowns are two angles fixing the launch point on the
    sphere B1 (the geodesic leaves along the outward normal there, so
    orthogonality at the B1 end holds by construction) and the flight time.
    Residuals: arrival on {z = a0} and the two horizontal components of the
    arrival velocity (orthogonality to the horosphere at infinity).
    """
    from .hyperbolic_core import TangentVec, geodesic_point
    from . import cord_engine  # local import to avoid a module cycle

    if not B0.is_at_infinity():
        raise ValueError("B0 must be centered at infinity")
    if abs(g.c) < 1e-12:
        raise ValueError("peripheral element has no cord")
    a0 = B0.size
    B1 = image_horoball(g, B0)
    r = B1.size / 2.0
    center = np.array([B1.center.real, B1.center.imag, r])

    def launch(u):
        al, be, _ = u
        # outward unit normal of the sphere, parameterized near the top
        n = np.array([math.sin(al), math.sin(be),
                      math.sqrt(max(1e-12, 1 - math.sin(al) ** 2 - math.sin(be) ** 2))])
        q = PointH3.from_coords(center + r * n)
        return q, n

    def endpoint(u):
        q, n = launch(u)
        v = TangentVec(q, tuple(q.z * n))  # unit hyperbolic speed
        return geodesic_point(q, v, u[2])

    def residual(u):
        h = 1e-6
        pe = endpoint(u)
        up = endpoint([u[0], u[1], u[2] + h])
        um = endpoint([u[0], u[1], u[2] - h])
        vel = (up.coords() - um.coords()) / (2 * h)
        return np.array([pe.z - a0, vel[0], vel[1]])

    if initial_guess is None:
        u = np.array([0.05, -0.05, math.log(a0 / B1.size)])
    else:
        u = np.asarray(initial_guess, dtype=float)

    for _ in range(max_iter):
        F = residual(u)
        if np.max(np.abs(F)) < tol:
            break
        Jm = np.zeros((3, 3))
        for j in range(3):
            h = 1e-6 * max(1.0, abs(u[j]))
            e = np.zeros(3)
            e[j] = h
            Jm[:, j] = (residual(u + e) - residual(u - e)) / (2 * h)
        try:
            duu = np.linalg.solve(Jm, -F)
        except np.linalg.LinAlgError:
            duu = -np.linalg.lstsq(Jm, F, rcond=None)[0]
        lam = 1.0
        base = np.linalg.norm(F)
        for _ in range(30):
            if np.linalg.norm(residual(u + lam * duu)) < base:
                break
            lam *= 0.5
        u = u + lam * duu
    F = residual(u)
    if np.max(np.abs(F)) > 1e-8:
        raise RuntimeError(f"shooting did not converge; residual {F}")
    q1, _ = launch(u)
    q0 = endpoint(u)
    return cord_engine.Cord.from_endpoints(
        class_word=g.word, start=q0, end=q1, length=float(u[2]))


# ---------------------------------------------------------------------------
# cylindrical end metrics


def _tau01(t: float) -> float:
    """Smooth cutoff e^{1/t} / (e^{1/(1-t)} + e^{1/t}): 1 for t <= 0,
    0 for t >= 1.  Evaluated as a logistic in u = 1/(1-t) - 1/t for
    overflow-free arithmetic."""
    if t <= 0:
        return 1.0
    if t >= 1:
        return 0.0
    u = 1.0 / (1.0 - t) - 1.0 / t
    if u > 700:
        return 0.0
    if u < -700:
        return 1.0
    return 1.0 / (1.0 + math.exp(u))


def _tau01_prime(t: float) -> float:
    if t <= 0 or t >= 1:
        return 0.0
    tau = _tau01(t)
    du = 1.0 / (1.0 - t) ** 2 + 1.0 / t**2
    return -du * tau * (1.0 - tau)


def _E(t: float) -> float:
    return 1.0 + math.exp(-1.0 / t) if t > 0 else 1.0


def _E_prime(t: float) -> float:
    return math.exp(-1.0 / t) / t**2 if t > 0 else 0.0


class CylMetric:
    """Cylindrical adjustment metric da^2 + rho_i(a)^2 (dx^2 + dy^2).

    rho_i = exp(-B_i) with B_i the integral of the interpolation profile
    A_{i,eps0}; eps0 is fixed by the area condition int_0^i A = i.
    """

    def __init__(self, level: int):
        if level < 1:
            raise ValueError("level must be >= 1")
        self.level = int(level)
        self.eps0 = self._solve_eps()

    def _profile(self, t: float, eps: float) -> float:
        i = self.level
        if t <= i - 0.5:
            return 1.0
        if t <= i - eps:
            return _E(t - i + 0.5)
        return _E(t - i + 0.5) * _tau01((t - (i - eps)) / eps)

    def _profile_prime(self, t: float, eps: float) -> float:
        i = self.level
        if t <= i - 0.5:
            return 0.0
        s = t - i + 0.5
        if t <= i - eps:
            return _E_prime(s)
        u = (t - (i - eps)) / eps
        return _E_prime(s) * _tau01(u) + _E(s) * _tau01_prime(u) / eps

    def _area(self, eps: float) -> float:
        i = self.level
        val, _ = integrate.quad(lambda t: self._profile(t, eps),
                                i - 0.5, i, limit=200)
        return (i - 0.5) + val

    def _solve_eps(self) -> float:
        i = self.level
        f = lambda e: self._area(e) - i
        return optimize.brentq(f, 1e-6, 1 - 1e-9, xtol=1e-13)

    def A(self, a: float) -> float:
        if a >= self.level:
            return 0.0
        return self._profile(a, self.eps0)

    def A_prime(self, a: float) -> float:
        if a >= self.level:
            return 0.0
        return self._profile_prime(a, self.eps0)

    def B(self, a: float) -> float:
        i = self.level
        if a <= i - 0.5:
            return a
        if a >= i:
            return float(i)
        val, _ = integrate.quad(self.A, i - 0.5, a, limit=200)
        return (i - 0.5) + val

    def rho(self, a: float) -> float:
        return math.exp(-self.B(a))

    def rho_prime(self, a: float) -> float:
        return -self.A(a) * self.rho(a)

    def rho_second(self, a: float) -> float:
        return (self.A(a) ** 2 - self.A_prime(a)) * self.rho(a)

    def metric(self, a: float) -> np.ndarray:
        """Metric matrix in (a, x, y) coordinates."""
        r2 = self.rho(a) ** 2
        return np.diag([1.0, r2, r2])

    def sectional_curvatures(self, a: float) -> tuple:
        """(K(dx,dy), K(da,dx)) = (-(rho'/rho)^2, -rho''/rho)."""
        r = self.rho(a)
        return (-((self.rho_prime(a) / r) ** 2), -self.rho_second(a) / r)


def cusp_metric(a: float) -> np.ndarray:
    """Hyperbolic cusp metric da^2 + e^{-2a}(dx^2 + dy^2) in (a, x, y)."""
    return np.diag([1.0, math.exp(-2 * a), math.exp(-2 * a)])


def build_cyl_metric(i: int) -> CylMetric:
    return CylMetric(i)


class CappedMetric:
    """Smooth capped metric agreeing with the cylindrical adjustment on N_i
    and with e^{-2a} da^2 + e^{-2a} dx^2 + e^{-2i} dy^2 outside N_{i+1/4};
    blended by the smooth cutoff on the short transition collar."""

    def __init__(self, level: int):
        self.level = int(level)
        self.cyl = CylMetric(level)

    def metric(self, a: float) -> np.ndarray:
        i = self.level
        inner = self.cyl.metric(a)
        e2a = math.exp(-2 * a)
        outer = np.diag([e2a, e2a, math.exp(-2 * i)])
        if a <= i:
            return inner
        if a >= i + 0.25:
            return outer
        w = _tau01((a - i) / 0.25)
        return w * inner + (1 - w) * outer

    def pullback_polar(self, r: float, m1: float, l1: float, l2: float) -> np.ndarray:
        """Components of the metric pulled back through the solid-torus polar
        map (z, x, y) = (1/r, m1 theta/2pi + l1 phi/2pi, l2 phi/2pi), in the
        (r, theta, phi) coordinate basis.  Valid in the capped regime
        (a = -log r >= i + 1/4); components stay bounded as r -> 0."""
        a = -math.log(r)
        g = self.metric(a)  # diag in (a, x, y)
        twopi = 2 * math.pi
        # da = -dr/r; dx = m1 dtheta/2pi + l1 dphi/2pi; dy = l2 dphi/2pi
        Jac = np.array([
            [-1.0 / r, 0.0, 0.0],
            [0.0, m1 / twopi, l1 / twopi],
            [0.0, 0.0, l2 / twopi],
        ])
        return Jac.T @ g @ Jac


def build_capped_metric(i: int) -> CappedMetric:
    return CappedMetric(i)
