import math

import numpy as np
import pytest

from cordspec import cord_engine as ce
from cordspec import variational as va
from cordspec.hyperbolic_core import PointH3

A0 = 1.2


def vertical_cord(length=1.3):
    return ce.Cord.from_vertical("w", A0, 0j, length)


def test_mean_curvature_of_horospheres():
    for z0 in (0.1, 1.0, 10.0):
        assert abs(va.mean_curvature(z0) - 1.0) < 1e-8
        lo, hi = va.shape_operator_eigenvalues(z0)
        assert abs(lo - 1.0) < 1e-8 and abs(hi - 1.0) < 1e-8


def test_discrete_energy_of_geodesic_samples():
    cord = vertical_cord(0.9)
    path = va.DiscretePath.from_cord(cord, N=64)
    # exact segment distances make geodesic samples exactly critical
    assert va.energy(path) == pytest.approx(0.5 * 0.9**2, abs=1e-13)


def test_first_variation_vanishes_at_cord():
    cord = vertical_cord(1.1)
    path = va.DiscretePath.from_cord(cord, N=48)
    rng = np.random.default_rng(2)
    V = rng.normal(size=(49, 3))
    V[0, 2] = V[-1, 2] = 0.0  # tangent to the horospheres at the ends
    assert abs(va.first_variation(path, V)) < 1e-10


def test_first_variation_matches_finite_differences():
    cord = vertical_cord(1.0)
    N = 32
    path = va.DiscretePath.from_cord(cord, N=N)
    rng = np.random.default_rng(4)
    # perturb the interior nodes so the gradient is nonzero
    nodes = [PointH3(q.x + 0.02 * rng.normal(), q.y + 0.02 * rng.normal(),
                     q.z * math.exp(0.02 * rng.normal()))
             if 0 < k < N else q for k, q in enumerate(path.nodes)]
    path = va.DiscretePath(nodes, path.horoballs)
    V = rng.normal(size=(N + 1, 3))
    V[0, 2] = V[-1, 2] = 0.0
    analytic = va.first_variation(path, V)
    h = 1e-6
    def shifted(sign):
        moved = [PointH3(*(q.coords() + sign * h * V[k]))
                 for k, q in enumerate(path.nodes)]
        return va.energy(va.DiscretePath(moved, path.horoballs))
    fd = (shifted(1) - shifted(-1)) / (2 * h)
    assert abs(analytic - fd) <= 1e-4 * max(1.0, abs(fd))


def test_hessian_positive_index_zero():
    for length in (0.4, 1.6, 3.0):
        cord = vertical_cord(length)
        H = va.hessian(cord, N=256)
        idx, nul = va.index_nullity(H)
        assert (idx, nul) == (0, 0)
        # Robin boundary terms push the spectrum above l^2
        assert va.smallest_eigenvalue(H) > length**2


def test_hessian_routes_agree():
    cord = vertical_cord(1.2)
    Hd = va.hessian(cord, N=128, route="direct")
    Hc = va.hessian(cord, N=128, route="curvature")
    assert np.abs(Hd.matrix - Hc.matrix).max() < 1e-8


def test_hessian_mesh_consistency():
    cord = vertical_cord(1.0)
    e64 = va.smallest_eigenvalue(va.hessian(cord, N=64))
    e256 = va.smallest_eigenvalue(va.hessian(cord, N=256))
    assert abs(e64 - e256) <= 1.0 / 64


def test_synthetic_sign_flip_creates_index():
    # flipping the curvature sign and dropping the boundary terms must
    # produce negative directions: validates that the detector can see them
    cord = vertical_cord(2.5)
    H = va.hessian(cord, N=128, curvature_sign=-1.0, include_boundary=False)
    idx, _ = va.index_nullity(H)
    assert idx > 0


def test_jacobi_fields_match_closed_form():
    ell = 0.8
    sol = va.jacobi_solve(ell, 1.0, ell)  # e^{l t}
    for t in (0.0, 0.5, 1.0):
        assert sol(t) == pytest.approx(math.exp(ell * t), rel=1e-12)
    lin = va.jacobi_solve(0.0, 0.5, 2.0)
    assert lin(1.0) == pytest.approx(2.5)


def test_constant_chord_kernel_cokernel():
    assert va.constant_chord_hessian(1.0, N=128) == (2, 2)
    assert va.constant_chord_hessian(2.0, N=64) == (2, 2)


def test_enumerated_cords_all_stable(fig8):
    for g in ce.canonical_classes(fig8, A0, 2.0):
        cord = ce.cord_for_class(g, A0)
        H = va.hessian(cord, N=128)
        assert va.index_nullity(H) == (0, 0)
        assert va.smallest_eigenvalue(H) > cord.length**2
