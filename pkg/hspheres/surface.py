"""
Closed surfaces glued from two caps along the equator, their regularity,
surface integrals and triangulations.

The bottom cap is reflected across the equator plane. Mean and Gauss
curvature do not change under the reflection, while z and the
z-component of the normal change sign.
"""
from dataclasses import dataclass
import numpy as np
from scipy.interpolate import CubicSpline
from hspheres.analysis import curvature_arrays, endpoint_extrapolate
from hspheres.profile import Termination, integrate_profile
from hspheres.utils import DomainError, OrientationMismatch, RadiusMismatch, simpson_uniform


@dataclass(frozen=True)
class Cap:
    """A profile that reaches the equator together with its equator data."""
    curve: object
    endpoint: object

    @classmethod
    def from_params(cls, params, config=None):
        curve = integrate_profile(params, config)
        if curve.termination != Termination.EQUATOR_REACHED:
            raise DomainError("The cap at {} ended with {}".format(params, curve.termination.value))
        return cls(curve, endpoint_extrapolate(curve, config))

    @property
    def sigma(self):
        return self.curve.params.sigma


@dataclass(frozen=True)
class ClosedSurface:
    """Two caps glued along a common equator circle.

    Attributes
    ----------
    top, bottom : Cap
    r_star : float
        Mean of the two equator radii.
    symmetric : bool
        Whether both caps come from the same shooting parameters.
    """
    top: Cap
    bottom: Cap
    r_star: float
    symmetric: bool

    @property
    def c_o(self):
        return self.top.curve.params.c_o


@dataclass(frozen=True)
class RegularityReport:
    """How smoothly the two caps of a closed surface meet.

    Attributes
    ----------
    c1_gap : float
        Mismatch of the equator radii and tangent angles.
    c2_gap : float
        Mismatch of phi'(ell).
    dH_top, dH_bottom : float
        Outward conormal derivatives of H on each side, phi''(ell)/2.
    c3_gap : float
        |dH_top + dH_bottom|, zero exactly when the glued surface is
        critical for the Helfrich energy.
    fit_uncertainty : float
        The larger of the two endpoint uncertainties.
    certified : bool
        Whether c3_gap is below the tolerance the report was made with.
    first_variation : float
        -2 pi r_star (dH_top + dH_bottom), the coefficient of the normal
        variation at the equator in the first variation of the energy.
    """
    c1_gap: float
    c2_gap: float
    dH_top: float
    dH_bottom: float
    c3_gap: float
    fit_uncertainty: float
    certified: bool
    first_variation: float


def glue(top, bottom, tol=None):
    """Glues two caps along the equator.

    Parameters
    ----------
    top, bottom : Cap
        Caps at the same c_o, approaching the equator from the same side.
    tol : float
        Allowed difference of the equator radii. Defaults to 1e-6 r_star.

    Returns
    -------
    surface : ClosedSurface
    """
    for cap in (top, bottom):
        if cap.curve.termination != Termination.EQUATOR_REACHED:
            raise DomainError("Only caps that reach the equator can be glued")
    if not np.isclose(top.curve.params.c_o, bottom.curve.params.c_o, rtol=1e-12, atol=0):
        raise DomainError("The caps have different spontaneous curvatures")
    if top.sigma != bottom.sigma:
        raise OrientationMismatch("A cap from above and a cap from below the equator carry opposite normals")
    r_star = (top.endpoint.r_star + bottom.endpoint.r_star)/2
    tol = 1e-6*r_star if tol is None else tol
    gap = abs(top.endpoint.r_star - bottom.endpoint.r_star)
    if gap > tol:
        raise RadiusMismatch("Equator radii {} and {} differ by {} > {}".format(
            top.endpoint.r_star, bottom.endpoint.r_star, gap, tol))
    return ClosedSurface(top, bottom, r_star, top.curve.params == bottom.curve.params)


def symmetric_surface(params, config=None):
    cap = Cap.from_params(params, config)
    return glue(cap, cap)


def regularity_report(surface, tol=1e-4):
    """Measures how smoothly the caps of a closed surface meet.

    Parameters
    ----------
    surface : ClosedSurface
    tol : float
        c3_gap below tol certifies the surface.

    Returns
    -------
    report : RegularityReport
    """
    top, bottom = surface.top.endpoint, surface.bottom.endpoint
    c1_gap = max(abs(top.r_star - bottom.r_star), abs(top.phi_limit - bottom.phi_limit))
    c2_gap = abs(top.dphi - bottom.dphi)
    dH_top, dH_bottom = top.dH, bottom.dH
    c3_gap = abs(dH_top + dH_bottom)
    return RegularityReport(c1_gap, c2_gap, dH_top, dH_bottom, c3_gap,
                            max(top.fit_uncertainty, bottom.fit_uncertainty), bool(c3_gap <= tol),
                            -2*np.pi*surface.r_star*(dH_top + dH_bottom))


class CapView:
    '''
    The samples of a cap in the frame of the closed surface, extended by the
    axis point at s = 0 and the equator point at s = ell.

    Attributes
    ----------
    s, r, z, phi, H, K, nu3 : numpy array
    '''
    def __init__(self, cap, reflect=False):
        curve, end = cap.curve, cap.endpoint
        c, z0 = curve.params.c_o, curve.params.z_0
        H, K, nu3 = curvature_arrays(curve)
        a = -1/z0 - c
        dphi_end = end.dphi_limit
        phi_end = -end.sigma*np.pi/2
        head = (0., 0., z0, 0., a, a**2, 1.)
        tail = (end.ell, end.r_star, 0., phi_end, c - end.sigma/end.r_star,
                dphi_end*np.sin(phi_end)/end.r_star, 0.)
        columns = [curve.s, curve.r, curve.z, curve.phi, H, K, nu3]
        if end.ell > curve.s[-1]:
            columns = [np.concatenate([[h], col, [t]]) for h, col, t in zip(head, columns, tail)]
        else:
            columns = [np.concatenate([[h], col]) for h, col in zip(head, columns)]
        self.s, self.r, self.z, self.phi, self.H, self.K, self.nu3 = columns
        if reflect:
            self.z = -self.z
            self.nu3 = -self.nu3

    def at(self, s):
        """The view resampled at arc lengths s by cubic interpolation."""
        view = CapView.__new__(CapView)
        for name in ('r', 'z', 'phi', 'H', 'K', 'nu3'):
            setattr(view, name, CubicSpline(self.s, getattr(self, name))(s))
        view.s = np.asarray(s)
        return view


def _cap_integral(view, field, n):
    integrand = 2*np.pi*np.asarray(field(view), dtype=float)*view.r
    return simpson_uniform(view.s, integrand, n)


def cap_integral(cap, field, n=None, reflect=False):
    """The integral of a field over one cap, 2 pi int_0^ell field r ds."""
    view = CapView(cap, reflect)
    return _cap_integral(view, field, n or max(2*len(view.s), 2000))


def surface_integral(surface, field, n=None, return_error=False):
    """Integrates a field over a closed surface.

    Each cap is resampled onto a uniform arc length grid by cubic
    interpolation and integrated with the composite Simpson rule. The
    error estimate compares with the rule on half as many points.

    Parameters
    ----------
    surface : ClosedSurface
    field : callable
        Maps a CapView to the values of the field at its samples.
    n : int
        Number of Simpson intervals per cap.
    return_error : bool
        If True also return the error estimate.

    Returns
    -------
    value : float
    error : float
        Only if return_error is True.
    """
    value = error = 0.
    for cap, reflect in ((surface.top, False), (surface.bottom, True)):
        view = CapView(cap, reflect)
        m = n or max(2*len(view.s), 2000)
        fine = _cap_integral(view, field, m)
        value += fine
        error += abs(fine - _cap_integral(view, field, m//2))
    if return_error:
        return value, error
    return value


def area(surface):
    return surface_integral(surface, lambda v: np.ones_like(v.s))


def rescaling_integral(surface, c_o):
    """int (H + c_o) over the surface and over each cap. It vanishes at
    critical points of the Helfrich energy with c_o != 0.

    Returns
    -------
    total, top, bottom : float
    """
    if c_o == 0:
        raise DomainError("The rescaling integral is only informative for c_o != 0")
    field = lambda v: v.H + c_o
    top = cap_integral(surface.top, field)
    bottom = cap_integral(surface.bottom, field, reflect=True)
    return top + bottom, top, bottom


def helfrich_energy(surface, c_o):
    """The reduced Helfrich energy int (H + c_o)^2 of a closed surface."""
    return surface_integral(surface, lambda v: (v.H + c_o)**2)


def total_gaussian_curvature(surface):
    return surface_integral(surface, lambda v: v.K)


def full_helfrich_energy(surface, c_o, a=1., b=0.):
    """a int (H + c_o)^2 + b int K. The second term is 4 pi b for every
    surface of genus zero.
    """
    return a*helfrich_energy(surface, c_o) + b*total_gaussian_curvature(surface)


def flux_identity_defect(cap, c_o):
    """|2 c_o int_cap (H + c_o) + sigma pi r_star^2 phi''(ell)|, which
    vanishes for every cap of the profile system.
    """
    integral = cap_integral(cap, lambda v: v.H + c_o)
    end = cap.endpoint
    return abs(2*c_o*integral + cap.sigma*np.pi*end.r_star**2*end.ddphi)


class TriMesh:
    '''
    A triangulated surface with values attached to its vertices.

    Attributes
    ----------
    vertices : numpy array
        Shape (n, 3).
    faces : numpy array
        Shape (m, 3), vertex indices, counterclockwise seen from outside.
    attributes : dict
        Name to an array of per-vertex values.
    '''
    def __init__(self, vertices, faces, attributes=None):
        self.vertices = np.asarray(vertices, dtype=float)
        self.faces = np.asarray(faces, dtype=int)
        self.attributes = dict(attributes or {})

    def edges(self):
        pairs = np.concatenate([self.faces[:, [0, 1]], self.faces[:, [1, 2]], self.faces[:, [2, 0]]])
        return np.unique(np.sort(pairs, axis=1), axis=0)

    def euler_characteristic(self):
        return len(self.vertices) - len(self.edges()) + len(self.faces)

    def face_areas(self):
        a, b, c = (self.vertices[self.faces[:, i]] for i in range(3))
        return np.linalg.norm(np.cross(b - a, c - a), axis=1)/2

    def area(self):
        return float(np.sum(self.face_areas()))

    def integrate(self, values):
        """Integral of per-vertex values, averaged over each triangle."""
        values = np.asarray(values, dtype=float)
        return float(np.sum(self.face_areas()*values[self.faces].mean(axis=1)))


def revolve_profile(r, z, attributes=None, n_theta=64):
    """Triangulates the surface swept by a profile running from a pole on the
    axis to another pole on the axis.

    Parameters
    ----------
    r, z : numpy array
        The profile, with r = 0 exactly at both ends only.
    attributes : dict
        Name to per-profile-point values, repeated around each ring.
    n_theta : int
        Vertices per ring.

    Returns
    -------
    mesh : TriMesh
    """
    if n_theta < 3 or len(r) < 3:
        raise DomainError("A mesh needs n_theta >= 3 and at least one ring")
    attributes = attributes or {}
    theta = 2*np.pi*np.arange(n_theta)/n_theta
    rings = len(r) - 2
    ring_r = np.asarray(r)[1:-1, None]
    ring_vertices = np.stack([ring_r*np.cos(theta), ring_r*np.sin(theta),
                              np.repeat(np.asarray(z)[1:-1, None], n_theta, axis=1)], axis=-1)
    vertices = np.concatenate([[[0., 0., z[0]]], ring_vertices.reshape(-1, 3), [[0., 0., z[-1]]]])
    values = {name: np.concatenate([[v[0]], np.repeat(v[1:-1], n_theta), [v[-1]]])
              for name, v in attributes.items()}

    bottom = len(vertices) - 1
    j = np.arange(n_theta)
    jn = (j + 1) % n_theta
    ring = lambda k, idx: 1 + k*n_theta + idx
    faces = [np.column_stack([np.zeros(n_theta, dtype=int), ring(0, j), ring(0, jn)])]
    for k in range(rings - 1):
        a, b, c, d = ring(k, j), ring(k + 1, j), ring(k + 1, jn), ring(k, jn)
        faces.append(np.column_stack([a, b, c]))
        faces.append(np.column_stack([a, c, d]))
    faces.append(np.column_stack([ring(rings - 1, j), np.full(n_theta, bottom), ring(rings - 1, jn)]))
    return TriMesh(vertices, np.concatenate(faces), values)


def revolve_mesh(surface, n_theta=64, n_profile=200):
    """Triangulates a closed surface by revolving its profile.

    Each cap is sampled at n_profile + 1 evenly spaced arc lengths from pole
    to equator. The poles are single vertices joined to the first rings by
    fans.

    Parameters
    ----------
    surface : ClosedSurface
    n_theta : int
        Vertices per ring.
    n_profile : int
        Profile segments per cap.

    Returns
    -------
    mesh : TriMesh
        Attributes H, K and nu3 at every vertex.
    """
    if n_theta < 8:
        raise DomainError("A closed surface mesh needs n_theta >= 8, got {}".format(n_theta))
    if n_profile < 1:
        raise DomainError("A mesh needs n_profile >= 1")
    views = []
    for cap, reflect in ((surface.top, False), (surface.bottom, True)):
        view = CapView(cap, reflect)
        views.append(view.at(np.linspace(0, view.s[-1], n_profile + 1)))
    # top pole to equator, then along the bottom cap to its pole
    profile = {name: np.concatenate([getattr(views[0], name), getattr(views[1], name)[-2::-1]])
               for name in ('r', 'z', 'H', 'K', 'nu3')}
    profile['r'][[0, -1]] = 0.
    profile['r'][n_profile] = surface.r_star
    profile['z'][n_profile] = 0.
    return revolve_profile(profile['r'], profile['z'],
                           {name: profile[name] for name in ('H', 'K', 'nu3')}, n_theta)
