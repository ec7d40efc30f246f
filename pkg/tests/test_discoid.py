import math
import pytest
import numpy as np
import sympy as sy
from hypothesis import given, strategies as st
from hspheres.analysis import curvature_arrays, rme_residual
from hspheres.discoid import *
from hspheres.profile import SolverConfig, Termination
from hspheres.utils import DomainError, DomainExceeded

UNIT = DiscoidSpec(1., 0.)


@pytest.fixture(scope='module')
def unit_discoid():
    return discoid_profile(UNIT)


def test_closed_forms():
    assert UNIT.argument(1/math.e) == pytest.approx(2/math.e)
    assert UNIT.argument(1.) == 0
    assert UNIT.argument(0.) == 0
    assert np.array_equal(UNIT.argument(np.array([0., 1.])), [0., 0.])
    assert discoid_H(1., UNIT) == -1
    assert discoid_H(1/math.e, UNIT) + 1 == pytest.approx(2)
    assert isinstance(discoid_H(0.5, UNIT), float)
    assert discoid_H(np.array([1., 1.]), UNIT).shape == (2,)
    assert discoid_H(1e-12, UNIT) > 50
    with pytest.raises(DomainError):
        discoid_H(0., UNIT)
    with pytest.raises(DomainError):
        discoid_H(np.array([1., -1.]), UNIT)


def test_euler_lagrange_identity():
    """H = -2 c_o log r + A - c_o solves Delta H + 2 (H + c_o)(H (H - c_o) - K) = 0
    along sin(phi) = g(r), with d/ds = cos(phi) d/dr."""
    r, c, A = sy.symbols('r c A', positive=True)
    g = -2*c*r*sy.log(r) + A*r
    g_r = sy.diff(g, r)
    H = g/(2*r) + g_r/2
    assert sy.simplify(H - (-2*c*sy.log(r) + A - c)) == 0
    H_r = sy.diff(H, r)
    laplacian = (1 - g**2)*(sy.diff(H, r, 2) + H_r/r) - g*g_r*H_r
    K = g*g_r/r
    assert sy.simplify(sy.expand(laplacian + 2*(H + c)*(H*(H - c) - K))) == 0


def test_special_radii():
    rim, kind = UNIT.exit_radius()
    assert kind == 'rim'
    assert rim == pytest.approx(1.4215, abs=1e-4)
    assert UNIT.argument(rim) == pytest.approx(-1, abs=1e-12)
    assert UNIT.rim_radius() == rim
    assert UNIT.crest_radius() == 1.
    assert UNIT.extremum_radius() == pytest.approx(1/math.e)
    assert UNIT.derivative(UNIT.extremum_radius()) == pytest.approx(0, abs=1e-14)
    assert UNIT.admissible()

    sphere = DiscoidSpec(0., 1.)
    assert sphere.exit_radius() == (1., 'rim')
    assert sphere.crest_radius() is None and sphere.extremum_radius() is None
    assert DiscoidSpec(0., -2.).rim_radius() == 0.5
    assert DiscoidSpec(0., 0.).exit_radius() == (math.inf, 'overflow')


def test_inadmissible():
    spec = DiscoidSpec(1., 5.)
    radius, kind = spec.exit_radius()
    assert kind == 'overflow'
    assert spec.argument(radius) == pytest.approx(1, abs=1e-12)
    assert 0.1 < radius < 0.11
    assert spec.rim_radius() is None
    assert not spec.admissible()
    assert not spec.admissible(1.)
    assert spec.admissible(0.05)
    with pytest.raises(DomainExceeded) as info:
        discoid_profile(spec, r_max=1.)
    assert info.value.radius == radius
    curve = discoid_profile(spec, r_max=0.05)
    assert curve.termination == Termination.MAX_RADIUS
    assert curve.r[-1] == 0.05


def test_profile_reaches_rim(unit_discoid):
    curve = unit_discoid
    assert curve.termination == Termination.RIM_REACHED
    assert curve.params == UNIT
    assert curve.r[0] == 1e-7
    assert curve.r[-1] == UNIT.rim_radius()
    assert abs(math.cos(curve.phi[-1])) < 1e-6
    assert curve.phi[-1] < 0
    assert curve.z[-1] == 0
    assert np.all(np.diff(curve.s) > 0) and np.all(np.diff(curve.r) > 0)
    assert np.sum(curve.r < 1e-3) >= 20
    # unit speed: the chords add up to the arc length
    chords = np.hypot(np.diff(curve.r), np.diff(curve.z))
    assert np.sum(chords) == pytest.approx(curve.s[-1] - curve.s[0], rel=1e-6)


def test_sphere_profile():
    """With c_o = 0 and A = 1 the discoid is the unit sphere."""
    curve = discoid_profile(DiscoidSpec(0., 1.))
    assert curve.termination == Termination.RIM_REACHED
    assert curve.s[-1] == pytest.approx(math.pi/2 - math.asin(1e-7), abs=1e-6)
    assert curve.z[0] == pytest.approx(-1, abs=1e-6)
    assert np.allclose(curve.r**2 + (curve.z - curve.z[0] - 1)**2, 1, atol=1e-6)
    assert discoid_el_residual(curve, 0.05) <= 1e-6


def test_profile_options():
    curve = discoid_profile(UNIT, stop='crest')
    assert curve.termination == Termination.CREST_REACHED
    assert curve.r[-1] == 1.
    assert curve.phi[-1] == pytest.approx(0, abs=1e-12)
    assert np.all(curve.phi[1:-1] > 0)
    assert discoid_profile(UNIT, SolverConfig(h0=1e-5), n=500).r[0] == 1e-5
    flat = discoid_profile(DiscoidSpec(0., 0.), r_max=1.)
    assert flat.termination == Termination.MAX_RADIUS
    assert np.all(flat.z == 0)
    with pytest.raises(DomainExceeded):
        discoid_profile(DiscoidSpec(0., 0.))
    with pytest.raises(DomainError):
        discoid_profile(UNIT, stop='pole')
    with pytest.raises(DomainError):
        discoid_profile(DiscoidSpec(0., 1.), stop='crest')
    with pytest.raises(DomainError):
        discoid_profile(UNIT, r_max=1e-8)


def test_mean_curvature_of_profile(unit_discoid):
    H, _, _ = curvature_arrays(unit_discoid)
    assert np.allclose(H, discoid_H(unit_discoid.r, UNIT), atol=1e-9)


def test_el_residual(unit_discoid):
    near = discoid_el_residual(unit_discoid, 0.05)
    far = discoid_el_residual(unit_discoid, 0.5)
    assert near <= 1e-3
    assert far < near
    with pytest.raises(DomainError):
        discoid_el_residual(unit_discoid, 0.)
    with pytest.raises(DomainError):
        discoid_el_residual(unit_discoid, 10.)


def test_el_residual_decays_with_the_grid(unit_discoid):
    """With second order stencils halving the grid divides the defect by
    about four."""
    coarse = discoid_el_residual(unit_discoid, 0.2, grid=1e-2, order=2)
    fine = discoid_el_residual(unit_discoid, 0.2, grid=5e-3, order=2)
    assert 3.5 < coarse/fine < 4.5
    assert discoid_el_residual(unit_discoid, 0.2, grid=5e-3) < fine


def test_discoid_misses_the_reduced_equation(unit_discoid):
    assert rme_residual(unit_discoid) >= 0.1


def test_boundary_flux(unit_discoid):
    estimate = boundary_flux(unit_discoid, UNIT)
    assert estimate.target == -4*np.pi
    assert estimate.extrapolated_limit == pytest.approx(-4*np.pi, rel=1e-2)
    assert estimate.total == pytest.approx(8*np.pi, rel=1e-2)
    assert estimate.conormal_values == (0., 0., 0., 0.)
    assert estimate.monotone
    sizes = np.abs(estimate.probe_values)
    assert np.all(np.diff(sizes) < 0)
    assert estimate.flux_values[-1] == pytest.approx(-4*np.pi, rel=1e-5)


def test_boundary_flux_scales_with_curvature():
    spec = DiscoidSpec(0.5, 0.)
    estimate = boundary_flux(discoid_profile(spec), spec)
    assert estimate.total == pytest.approx(4*np.pi, rel=1e-2)


def test_boundary_flux_errors(unit_discoid):
    with pytest.raises(DomainError):
        boundary_flux(unit_discoid, UNIT, (1e-2, 1e-3, 1e-4))
    with pytest.raises(DomainError):
        boundary_flux(unit_discoid, UNIT, (1e-5, 1e-4, 1e-3, 1e-2))
    with pytest.raises(DomainError):
        boundary_flux(unit_discoid, UNIT, (1e-2, 1e-3, 1e-4, 1e-9))


def test_verdicts(unit_discoid):
    estimate = boundary_flux(unit_discoid, UNIT)
    assert discoid_verdict(UNIT, estimate).startswith("not critical (Dirac defect 25.1")
    sphere = DiscoidSpec(0., 1.)
    curve = discoid_profile(sphere)
    estimate = boundary_flux(curve, sphere)
    assert abs(estimate.total) < 1e-12
    assert discoid_verdict(sphere, estimate) == "critical (Willmore sphere)"


def test_mesh(unit_discoid):
    mesh = discoid_mesh(unit_discoid, n_theta=32, n_profile=100)
    assert mesh.euler_characteristic() == 2
    assert len(mesh.vertices) == 2 + 32*201
    assert np.allclose(mesh.vertices[:, 2].max(), -mesh.vertices[:, 2].min())
    assert np.max(np.hypot(mesh.vertices[:, 0], mesh.vertices[:, 1])) == pytest.approx(UNIT.rim_radius())
    assert 'H' in mesh.attributes
    with pytest.raises(DomainError):
        discoid_mesh(discoid_profile(UNIT, stop='crest'))
    with pytest.raises(DomainError):
        discoid_mesh(unit_discoid, n_theta=6)


@given(st.floats(1e-3, 3), st.floats(-2, 2), st.floats(-2, 2))
def test_mean_curvature_closed_form(r, c_o, A):
    spec = DiscoidSpec(c_o, A)
    g = float(spec.argument(r))
    assert discoid_H(r, spec) == pytest.approx(g/(2*r) + spec.derivative(r)/2, abs=1e-9)


@given(st.floats(0.1, 3), st.floats(-2, 2))
def test_crest_and_extremum(c_o, A):
    spec = DiscoidSpec(c_o, A)
    assert spec.argument(spec.crest_radius()) == pytest.approx(0, abs=1e-9)
    assert spec.crest_radius() == pytest.approx(math.e*spec.extremum_radius())
    assert spec.derivative(spec.extremum_radius()) == pytest.approx(0, abs=1e-9)
