import pytest
import numpy as np
from hspheres.profile import ShootingParams
from hspheres.surface import *
from hspheres.utils import DomainError, OrientationMismatch, RadiusMismatch


@pytest.fixture(scope='module')
def unit_sphere():
    return symmetric_surface(ShootingParams(0., 1.))


def test_unit_sphere_integrals(unit_sphere):
    """With c_o = 0 the glued caps form the unit sphere."""
    assert unit_sphere.symmetric
    assert unit_sphere.r_star == pytest.approx(1, abs=1e-6)
    value, error = surface_integral(unit_sphere, lambda v: np.ones_like(v.s), return_error=True)
    assert value == pytest.approx(4*np.pi, abs=1e-6)
    assert error < 1e-6
    assert area(unit_sphere) == pytest.approx(4*np.pi, abs=1e-6)
    assert total_gaussian_curvature(unit_sphere) == pytest.approx(4*np.pi, abs=1e-5)
    assert surface_integral(unit_sphere, lambda v: v.H**2) == pytest.approx(4*np.pi, abs=1e-5)
    assert helfrich_energy(unit_sphere, 0.) == pytest.approx(4*np.pi, abs=1e-5)
    assert full_helfrich_energy(unit_sphere, 0., b=1.) == pytest.approx(8*np.pi, abs=1e-4)
    assert abs(surface_integral(unit_sphere, lambda v: v.nu3)) < 1e-8
    assert abs(surface_integral(unit_sphere, lambda v: v.z)) < 1e-8


def test_unit_sphere_is_regular(unit_sphere):
    report = regularity_report(unit_sphere)
    assert report.certified
    assert report.c1_gap == 0 and report.c2_gap == 0
    assert report.c3_gap <= 1e-4
    assert abs(report.first_variation) <= 1e-3


def test_cap_view(unit_sphere):
    view = CapView(unit_sphere.top)
    assert view.s[0] == 0 and view.r[0] == 0 and view.z[0] == 1
    assert view.H[0] == -1 and view.K[0] == 1 and view.nu3[0] == 1
    assert view.z[-1] == 0 and view.nu3[-1] == 0
    assert view.r[-1] == pytest.approx(1, abs=1e-6)
    reflected = CapView(unit_sphere.bottom, reflect=True)
    assert np.array_equal(reflected.z, -view.z)
    assert np.array_equal(reflected.H, view.H)
    half = view.at(np.linspace(0, view.s[-1], 11))
    assert np.allclose(half.r, np.sin(half.s), atol=1e-6)
    assert cap_integral(unit_sphere.top, lambda v: np.ones_like(v.s)) == pytest.approx(2*np.pi, abs=1e-6)


def test_glue_errors():
    above = Cap.from_params(ShootingParams(1., 0.4))
    below = Cap.from_params(ShootingParams(1., -0.5))
    other = Cap.from_params(ShootingParams(1., 0.8))
    with pytest.raises(OrientationMismatch):
        glue(above, below)
    with pytest.raises(RadiusMismatch):
        glue(above, other)
    surface = glue(above, other, tol=1.)
    assert not surface.symmetric
    assert surface.r_star == pytest.approx((above.endpoint.r_star + other.endpoint.r_star)/2)
    with pytest.raises(DomainError):
        Cap.from_params(ShootingParams(1., -1.))
    scaled = Cap.from_params(ShootingParams(2., 0.2))
    with pytest.raises(DomainError):
        glue(above, scaled, tol=1.)


def test_vertical_flux_identities():
    """Over a cap from above int nu3 is the area of its equator disk and
    int 2H nu3 is minus the length of its equator circle, so both integrals
    vanish once the equator radii agree."""
    above = Cap.from_params(ShootingParams(1., 0.4))
    other = Cap.from_params(ShootingParams(1., 0.8))
    for cap in (above, other):
        r_star = cap.endpoint.r_star
        assert cap_integral(cap, lambda v: v.nu3) == pytest.approx(np.pi*r_star**2, abs=1e-5)
        assert cap_integral(cap, lambda v: 2*v.H*v.nu3) == pytest.approx(-2*np.pi*r_star, abs=1e-5)
    surface = glue(above, other, tol=1.)
    assert not surface.symmetric
    r_a, r_b = above.endpoint.r_star, other.endpoint.r_star
    assert surface_integral(surface, lambda v: v.nu3) == pytest.approx(np.pi*(r_a**2 - r_b**2), abs=1e-5)
    assert surface_integral(surface, lambda v: 2*v.H*v.nu3) == pytest.approx(2*np.pi*(r_b - r_a), abs=1e-5)
    closed = symmetric_surface(ShootingParams(1., 0.8))
    assert abs(surface_integral(closed, lambda v: 2*v.H*v.nu3)) <= 1e-5


def test_flux_identity():
    """2 c_o int (H + c_o) + sigma pi r_star^2 phi''(ell) vanishes on every cap."""
    for c_o, z0 in ((1., 0.2), (1., 0.4), (1., 0.9), (1., 1.3), (1., 2.), (2., 0.3), (0.5, 1.),
                    (1., -0.3), (1., -0.6), (1., -0.9)):
        cap = Cap.from_params(ShootingParams(c_o, z0))
        assert flux_identity_defect(cap, c_o) <= 1e-4*(1 + abs(cap.endpoint.ddphi)), (c_o, z0)


def test_rescaling_integral():
    surface = symmetric_surface(ShootingParams(1., 0.4))
    total, top, bottom = rescaling_integral(surface, 1.)
    assert total == pytest.approx(top + bottom)
    # the defect of a non-critical sphere is carried by phi''(ell)
    expected = -np.pi*surface.r_star**2*surface.top.endpoint.ddphi
    assert total == pytest.approx(expected, abs=1e-4)
    with pytest.raises(DomainError):
        rescaling_integral(symmetric_surface(ShootingParams(0., 1.)), 0.)


def test_mesh(unit_sphere):
    mesh = revolve_mesh(unit_sphere, n_theta=64, n_profile=100)
    assert mesh.euler_characteristic() == 2
    assert len(mesh.vertices) == 2 + 64*199
    assert set(mesh.attributes) == {'H', 'K', 'nu3'}
    assert abs(mesh.area() - 4*np.pi) <= 0.01*4*np.pi
    assert mesh.area() < 4*np.pi
    assert abs(mesh.integrate(mesh.attributes['K']) - 4*np.pi) <= 0.01*4*np.pi
    assert np.allclose(np.linalg.norm(mesh.vertices, axis=1), 1, atol=1e-6)
    # faces are oriented outward
    a, b, c = (mesh.vertices[mesh.faces[:, i]] for i in range(3))
    normals = np.cross(b - a, c - a)
    assert np.all(np.sum(normals*(a + b + c), axis=1) > 0)


def test_mesh_needs_eight_meridians(unit_sphere):
    with pytest.raises(DomainError):
        revolve_mesh(unit_sphere, n_theta=4)
    assert revolve_mesh(unit_sphere, n_theta=8, n_profile=10).euler_characteristic() == 2
    with pytest.raises(DomainError):
        revolve_mesh(unit_sphere, n_profile=0)


def test_revolve_profile():
    r = np.array([0., 1., 0.])
    z = np.array([1., 0., -1.])
    mesh = revolve_profile(r, z, {'t': np.array([0., 1., 2.])}, n_theta=4)
    assert len(mesh.vertices) == 6
    assert len(mesh.faces) == 8
    assert mesh.euler_characteristic() == 2
    assert np.array_equal(mesh.attributes['t'], [0., 1., 1., 1., 1., 2.])
    with pytest.raises(DomainError):
        revolve_profile(r, z, n_theta=2)
    with pytest.raises(DomainError):
        revolve_profile(r[:2], z[:2])
