import pytest
import numpy as np
from hypothesis import given, strategies as st
from hspheres.analysis import *
from hspheres.profile import ShootingParams, SolverConfig, Termination, integrate_profile
from hspheres.utils import DomainError


def test_classify():
    assert classify(ShootingParams(0., 1.)) == CurveClass.CIRCLE
    assert classify(ShootingParams(0., -3.)) == CurveClass.CIRCLE
    assert classify(ShootingParams(1., 0.4)) == CurveClass.UNDULOID
    assert classify(ShootingParams(1., -1.)) == CurveClass.LINE
    assert classify(ShootingParams(1., -0.5)) == CurveClass.OVALOID
    assert classify(ShootingParams(1., -2.)) == CurveClass.NODOID
    # negative c_o is read through (c_o, z_0) -> (-c_o, -z_0)
    assert classify(ShootingParams(-1., 0.5)) == CurveClass.OVALOID
    assert classify(ShootingParams(-1., -0.5)) == CurveClass.UNDULOID
    assert classify(ShootingParams(-2., 0.5)) == CurveClass.LINE
    assert CurveClass.LINE.value == 'HorizontalLine'


@given(st.floats(-10, 10).filter(lambda c: abs(c) > 1e-6), st.floats(-10, 10).filter(lambda z: abs(z) > 1e-6),
       st.sampled_from([0.25, 0.5, 2., 4.]))
def test_classify_is_scale_invariant(c_o, z0, lam):
    params = ShootingParams(c_o, z0)
    assert classify(params.scaled(lam)) == classify(params)


def _cap(c_o, z0, config=None):
    curve = integrate_profile(ShootingParams(c_o, z0), config)
    assert curve.termination == Termination.EQUATOR_REACHED
    return curve


def test_circle_endpoint():
    curve = _cap(0., 1.)
    end = endpoint_extrapolate(curve)
    assert abs(end.ell - np.pi/2) <= 1e-6
    assert abs(end.r_star - 1) <= 1e-6
    assert abs(end.dphi + 1) <= 1e-5
    assert abs(end.ddphi) <= 1e-4
    assert abs(end.phi_limit + np.pi/2) <= 1e-6
    assert end.sigma == 1
    assert len(end.levels) == curve.config.richardson_levels + 1
    assert end.H_equator == pytest.approx(-1, abs=1e-6)


def test_endpoint_identity():
    """phi'(ell) = 2 c_o - sigma/r_star on caps from above and below."""
    for c_o, z0 in ((1., 0.4), (1., 1.), (1., 2.5), (2., 0.3), (1., -0.5), (1., -0.2), (0.5, -1.5)):
        end = endpoint_extrapolate(_cap(c_o, z0))
        assert end.identity_defect <= 1e-5, (c_o, z0)
        assert end.sigma == np.sign(z0)
        assert abs(end.phi_limit + end.sigma*np.pi/2) <= 1e-5
        assert abs(end.ddphi - end.ddphi_alt) <= 1e-3*(1 + abs(end.ddphi)), (c_o, z0)


def test_endpoint_scaling():
    """phi''(ell) scales like 1/lambda^2 and r_star like lambda."""
    end = endpoint_extrapolate(_cap(1., 0.7))
    scaled = endpoint_extrapolate(_cap(0.5, 1.4))
    assert scaled.r_star == pytest.approx(2*end.r_star, rel=1e-6)
    assert scaled.ell == pytest.approx(2*end.ell, rel=1e-6)
    assert scaled.ddphi == pytest.approx(end.ddphi/4, abs=1e-5)


def test_endpoint_stable_under_halved_start():
    end = endpoint_extrapolate(_cap(1., 0.7))
    halved = endpoint_extrapolate(_cap(1., 0.7, SolverConfig(h0=5e-7)))
    assert halved.r_star == pytest.approx(end.r_star, abs=1e-6)
    assert halved.ell == pytest.approx(end.ell, abs=1e-6)
    assert halved.ddphi == pytest.approx(end.ddphi, abs=1e-4)


def test_endpoint_needs_equator():
    curve = integrate_profile(ShootingParams(1., -1.))
    with pytest.raises(DomainError):
        endpoint_extrapolate(curve)


def test_endpoint_data_properties():
    end = EndpointData(1., 0.5, 0., 0.2, 1e-9, c_o=1., sigma=1)
    assert end.dphi_limit == 0.
    assert end.identity_defect == 0.
    assert end.H_equator == -1.
    assert end.dH == 0.1
    below = EndpointData(1., 0.5, 4., 0.2, 1e-9, c_o=1., sigma=-1)
    assert below.dphi_limit == 4.


def test_curvature_on_circle():
    curve = _cap(0., 1.)
    fields = curvature_fields(curve)
    assert len(fields) == len(curve)
    H = np.array([f.H for f in fields])
    K = np.array([f.K for f in fields])
    assert np.allclose(H, -1, atol=1e-7)
    assert np.allclose(K, 1, atol=1e-7)
    assert fields[0].nu3 == pytest.approx(1)


def test_reduced_membrane_equation():
    for c_o, z0 in ((1., 0.4), (1., 2.), (1., -0.5)):
        assert rme_residual(_cap(c_o, z0)) <= 1e-8


def test_el_residual():
    """The Euler-Lagrange defect is small on unduloid caps."""
    for z0 in (0.4, 0.8, 1.2, 2., 3.):
        assert el_residual(_cap(1., z0), grid=1e-3) <= 1e-4, z0
    with pytest.raises(DomainError):
        el_residual(_cap(1., 0.4), grid=1.)


def test_el_residual_decays_with_the_grid():
    """Halving the grid divides the second order defect by about four."""
    for z0 in (0.6, 1.2):
        curve = _cap(1., z0)
        coarse = el_residual(curve, grid=1e-2)
        fine = el_residual(curve, grid=5e-3)
        assert 3 < coarse/fine < 5, (z0, coarse, fine)


def test_el_residual_from_samples():
    """Without a second integration the stored samples are resampled."""
    curve = _cap(1., 0.6)
    assert el_residual(curve, grid=1e-2, tol=None) == pytest.approx(el_residual(curve, grid=1e-2), rel=0.2)


def test_el_residual_fourth_order():
    curve = _cap(1., 0.8)
    assert el_residual(curve, grid=1e-2, order=4) < el_residual(curve, grid=1e-2, order=2)


def test_ovaloid_normal_has_one_sign():
    curve = _cap(1., -0.5)
    assert nu3_sign_changes(curve) == 0
    assert is_graph_over_r(curve)
    assert radius_extrema(curve) == []


def test_small_cap_is_a_graph():
    curve = _cap(1., 0.1)
    assert is_graph_over_r(curve)
    assert nu3_sign_changes(curve) == 0


def test_tall_cap_winds():
    """A tall cap overshoots the cylinder radius and turns back."""
    curve = _cap(1., 5.)
    extrema = radius_extrema(curve)
    assert len(extrema) >= 1
    assert nu3_sign_changes(curve) >= 1
    for s, r in extrema:
        assert r > 0
        assert curve.s[0] < s < curve.s[-1]
    # the tangent is vertical at an extremum
    s, r = extrema[0]
    assert abs(np.cos(curve.interpolate(s)[2])) < 1e-8


def test_radius_extrema_without_dense_output():
    curve = _cap(1., 5., SolverConfig())
    extrema = radius_extrema(curve)
    curve.solution = None
    approx = radius_extrema(curve)
    assert len(approx) == len(extrema)
    assert np.allclose(approx, extrema, atol=1e-5)


def test_cylinder_profile():
    curve = cylinder_profile(2.)
    assert np.all(curve.r == 0.25)
    assert rme_residual(curve) <= 1e-12
    assert el_residual(curve) <= 1e-12
    with pytest.raises(DomainError):
        cylinder_profile(0.)
