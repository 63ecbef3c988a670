import math

import numpy as np
import pytest

from cordspec import cord_engine as ce
from cordspec import flow_integrator as fl
from cordspec.flow_integrator import CotangentState
from cordspec.hyperbolic_core import PointH3
from cordspec.isometry_group import INFINITY, Horoball


def rand_states(n, seed=3):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        x, y = rng.normal(size=2)
        z = math.exp(rng.normal(scale=0.7))
        out.append(CotangentState(PointH3(x, y, z), rng.normal(size=3)))
    return out


def test_hamiltonian_and_vector_field():
    s = CotangentState(PointH3(0, 0, 2.0), np.array([0.0, 0.0, 0.5]))
    assert fl.hamiltonian(s) == pytest.approx(0.5)
    X = fl.ham_vector_field(s)
    # dq/dt = z^2 p, dp_z/dt = -z |p|^2
    assert np.allclose(X[:3], [0, 0, 2.0])
    assert np.allclose(X[3:], [0, 0, -0.5])


def test_flow_conserves_h_long_time():
    s0 = CotangentState(PointH3(0.3, -0.2, 1.1), np.array([0.4, -0.3, 0.5]))
    h0 = fl.hamiltonian(s0)
    s1, path = fl.integrate_flow(s0, T=10.0, dt=1e-3, return_path=True)
    assert abs(fl.hamiltonian(s1) - h0) < 1e-5
    assert fl.geodesic_residual(path, 1e-3) < 1e-6


def test_flow_reproduces_vertical_solution():
    # exact solution z(t) = e^t, p = (0, 0, e^{-t}) from z0 = 1
    s0 = CotangentState(PointH3(0.0, 0.0, 1.0), np.array([0.0, 0.0, 1.0]))
    s1 = fl.integrate_flow(s0, T=1.0, dt=1e-4)
    assert s1.q.x == 0.0 and s1.q.y == 0.0
    assert abs(s1.q.z - math.e) < 1e-8
    assert abs(s1.p[2] - 1.0 / math.e) < 1e-8


def test_flow_blowup_guard():
    s0 = CotangentState(PointH3(0, 0, 2e-12), np.array([0.0, 0.0, -1e12]))
    with pytest.raises(FloatingPointError):
        fl.integrate_flow(s0, T=1.0, dt=1e-3)


def test_sasakian_j_squares_to_minus_one():
    for s in rand_states(10):
        J = fl.sasakian_J(s)
        assert np.abs(J @ J + np.eye(6)).max() < 1e-9


def test_j_compatible_with_symplectic_form():
    Om = fl.symplectic_form_matrix()
    for s in rand_states(10, seed=5):
        J = fl.sasakian_J(s)
        # omega(J., J.) = omega and g = omega(., J.) symmetric positive
        assert np.abs(J.T @ Om @ J - Om).max() < 1e-9
        G = Om @ J
        assert np.abs(G - G.T).max() < 1e-9
        assert np.linalg.eigvalsh((G + G.T) / 2).min() > 0


def test_form_identities_small_residual():
    for s in rand_states(20, seed=7):
        res = fl.form_identity_residuals(s)
        assert max(res.values()) < 1e-5


def test_form_identities_second_order_convergence():
    s = CotangentState(PointH3(0.4, -0.3, 1.3), np.array([0.2, 0.5, -0.4]))
    for key in ("phi_x_over_z", "vertical_coframe"):
        r2 = fl.form_identity_residuals(s, step=2e-2)[key]
        r1 = fl.form_identity_residuals(s, step=1e-2)[key]
        assert 3.4 < r2 / r1 < 4.6  # O(step^2)


def test_plurisubharmonic_closed_form():
    # -d(d(H + 1/z) o J) on horizontal/J-horizontal pairs: (1+z)/z^3
    for z, val in ((1.0, 2.0), (2.0, 3.0 / 8.0)):
        s = CotangentState(PointH3(0.2, -0.1, z), np.array([0.3, -0.2, 0.4]))
        assert fl.plurisubharmonic_value(s) == pytest.approx(val, abs=1e-6)
    for s in rand_states(20, seed=9):
        z = s.q.z
        assert fl.plurisubharmonic_value(s) == pytest.approx(
            (1 + z) / z**3, abs=1e-5)


def test_shooting_matches_closed_form(fig8):
    B0 = Horoball(INFINITY, 1.2)
    for word in ("b", "ab", "bab"):
        g = fig8.evaluate(word)
        cord = fl.shoot_neumann(B0, g)
        assert abs(cord.length - ce.cord_length(g, 1.2)) < 1e-9


def test_shooting_unique_under_perturbed_starts(fig8):
    B0 = Horoball(INFINITY, 1.2)
    g = fig8.evaluate("ab")
    base = fl.shoot_neumann(B0, g)
    for guess in ([0.2, 0.1, 0.5], [-0.15, 0.2, 1.5], [0.0, 0.0, 0.2]):
        c = fl.shoot_neumann(B0, g, initial_guess=guess)
        assert abs(c.length - base.length) < 1e-9
        assert np.abs(c.end.coords() - base.end.coords()).max() < 1e-7


def test_shooting_rejects_bad_input():
    with pytest.raises(ValueError):
        fl.shoot_neumann(Horoball(0j, 1.0), None)


# --------------------------------------------------------------- cylinders


def test_cutoff_function_shape():
    assert fl._tau01(-1.0) == 1.0 and fl._tau01(2.0) == 0.0
    assert fl._tau01(0.5) == pytest.approx(0.5)
    ts = np.linspace(0.01, 0.99, 99)
    vals = [fl._tau01(float(t)) for t in ts]
    assert all(a >= b for a, b in zip(vals, vals[1:]))
    for t in (0.2, 0.5, 0.8):
        h = 1e-6
        fd = (fl._tau01(t + h) - fl._tau01(t - h)) / (2 * h)
        assert fl._tau01_prime(t) == pytest.approx(fd, abs=1e-6)


@pytest.mark.parametrize("level", [1, 2, 3])
def test_cyl_metric_area_normalization(level):
    cyl = fl.build_cyl_metric(level)
    from scipy.integrate import quad
    val, _ = quad(cyl.A, 0, level, limit=200)
    assert val == pytest.approx(level, abs=1e-9)
    # profile interpolates 1 (cusp regime) to 0 (cylinder regime)
    assert cyl.A(level - 0.5) == pytest.approx(1.0)
    assert cyl.A(level) == 0.0
    assert cyl.rho(level + 3.0) == pytest.approx(math.exp(-level))


def test_rho_convex_on_dense_grid():
    cyl = fl.build_cyl_metric(2)
    grid = np.linspace(1e-4, 2.0 + 1.0, 10_000)
    worst = min(cyl.rho_second(float(a)) for a in grid)
    assert worst >= -1e-12


def test_cyl_sectional_curvatures_nonpositive():
    for level in (1, 2):
        cyl = fl.build_cyl_metric(level)
        for a in np.linspace(0.05, level + 1.0, 200):
            k1, k2 = cyl.sectional_curvatures(float(a))
            assert k1 <= 1e-14 and k2 <= 1e-14
            # cusp regime: both equal -1
            if a <= level - 0.5:
                assert k1 == pytest.approx(-1.0) and k2 == pytest.approx(-1.0)


def _quadratic_form(gmat, v):
    return float(np.asarray(v) @ gmat @ np.asarray(v))


def test_metric_monotonicities_on_defining_regimes():
    # h <= h_i and h_j <= h_i (j > i) away from the smoothing collar
    # (i - 1/2, i), where any smooth area-normalized profile must dip
    i, j = 2, 3
    hi = fl.build_cyl_metric(i)
    hj = fl.build_cyl_metric(j)
    rng = np.random.default_rng(0)
    samples = np.concatenate([np.linspace(0.05, i - 0.5, 30),
                              np.linspace(i, j + 2.0, 40)])
    for a in samples:
        g = fl.cusp_metric(float(a))
        gi = hi.metric(float(a))
        for _ in range(5):
            v = rng.normal(size=3)
            assert _quadratic_form(g, v) <= _quadratic_form(gi, v) + 1e-12
    samples_j = np.concatenate([np.linspace(0.05, i - 0.5, 20),
                                np.linspace(i, j - 0.5, 15),
                                np.linspace(j, j + 2.0, 15)])
    for a in samples_j:
        gi = hi.metric(float(a))
        gj = hj.metric(float(a))
        for _ in range(5):
            v = rng.normal(size=3)
            assert _quadratic_form(gj, v) <= _quadratic_form(gi, v) + 1e-12


def test_capped_metric_ordering_and_polar_pullback():
    # g[i] >= g[k] for i <= k on sampled vectors, in the capped regime
    gi = fl.build_capped_metric(1)
    gk = fl.build_capped_metric(2)
    rng = np.random.default_rng(1)
    for a in np.linspace(2.3, 6.0, 25):
        mi, mk = gi.metric(float(a)), gk.metric(float(a))
        for _ in range(5):
            v = rng.normal(size=3)
            assert _quadratic_form(mi, v) >= _quadratic_form(mk, v) - 1e-12
    # pulled-back components stay bounded as r -> 0
    prev = None
    for r in (1e-2, 1e-4, 1e-6, 1e-8):
        M = gi.pullback_polar(r, 1.0, 0.3, 2.0)
        assert np.isfinite(M).all()
        assert np.abs(M).max() < 1e3
        prev = M
    assert np.linalg.eigvalsh(prev).min() >= 0
