"""
Circular biconcave discoids.

Their profiles have the closed-form tangent angle

    sin(phi) = g(r) = -2 c_o r log(r) + A r,

and their mean curvature H = -2 c_o log(r) + A - c_o solves the
Euler-Lagrange equation of the Helfrich energy for r > 0. They are only C^1
at the poles, where H diverges, and the boundary terms of the first
variation around each pole leave a Dirac defect of 4 pi c_o, so discoids with
c_o != 0 are not critical points.
"""
import math
from dataclasses import dataclass
import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq
from hspheres.analysis import el_residual_uniform
from hspheres.profile import ProfileCurve, Termination
from hspheres.surface import revolve_profile
from hspheres.utils import DomainError, DomainExceeded


@dataclass(frozen=True)
class DiscoidSpec:
    """The constants of a discoid profile.

    Attributes
    ----------
    c_o : float
        Spontaneous curvature. c_o = 0 gives a round sphere of radius 1/|A|.
    A : float
    """
    c_o: float = 1.
    A: float = 0.

    def argument(self, r):
        """g(r) = -2 c_o r log r + A r, with g(0) = 0."""
        r = np.asarray(r, dtype=float)
        safe = np.where(r > 0, r, 1.)
        return np.where(r > 0, -2*self.c_o*r*np.log(safe) + self.A*r, 0.)

    def derivative(self, r):
        """g'(r), which is phi' along the profile."""
        return self.A - 2*self.c_o*(np.log(r) + 1)

    def extremum_radius(self):
        if self.c_o == 0:
            return None
        return math.exp(self.A/(2*self.c_o) - 1)

    def crest_radius(self):
        """Where phi returns to 0 after leaving the pole."""
        if self.c_o == 0:
            return None
        return math.exp(self.A/(2*self.c_o))

    def exit_radius(self):
        """The first radius at which |g| reaches 1.

        Returns
        -------
        radius : float
            inf if |g| stays below 1.
        kind : str
            'rim' if the profile turns vertical there and can be closed by
            reflection, 'overflow' if g leaves [-1, 1] before turning back.
        """
        f = lambda r: abs(float(self.argument(r))) - 1
        if self.c_o == 0:
            if self.A == 0:
                return math.inf, 'overflow'
            return 1/abs(self.A), 'rim'
        r_m = self.extremum_radius()
        if f(r_m) >= 0:
            return brentq(f, 0, r_m, xtol=1e-15), 'overflow'
        hi = 2*r_m
        while f(hi) < 0:
            hi *= 2
        return brentq(f, r_m, hi, xtol=1e-15), 'rim'

    def rim_radius(self):
        radius, kind = self.exit_radius()
        return radius if kind == 'rim' else None

    def admissible(self, r_max=None):
        """Whether |g| <= 1 on (0, r_max], r_max defaulting to the rim."""
        radius, kind = self.exit_radius()
        if r_max is None:
            return kind == 'rim'
        return kind == 'rim' or r_max <= radius


@dataclass(frozen=True)
class FluxEstimate:
    """The boundary terms of the first variation around a pole.

    Attributes
    ----------
    epsilons : tuple
        The cut radii, decreasing.
    flux_values : tuple
        2 pi eps dH/dn at each cut radius, tending to -4 pi c_o.
    conormal_values : tuple
        2 pi eps (H + c_o) dpsi/dn for psi = 1 near the pole, all zero.
    probe_values : tuple
        The same term for a test function with unit radial slope. It tends
        to zero like eps log(eps).
    extrapolated_limit : float
    target : float
        -4 pi c_o.
    total : float
        The Dirac coefficient over both poles, -2 extrapolated_limit.
    monotone : bool
        Whether |value - target| decreases over the last three levels.
    """
    epsilons: tuple
    flux_values: tuple
    conormal_values: tuple
    probe_values: tuple
    extrapolated_limit: float
    target: float
    total: float
    monotone: bool


def _discoid_system(v, y, spec, top, u0, limit):
    u = u0 - v
    r = top - u*u
    g = float(spec.argument(r))
    cos_phi = math.sqrt(max(1 - g*g, 0.))
    if cos_phi == 0. or (limit is not None and u < 1e-9*u0):
        speed = limit
    else:
        speed = 2*u/cos_phi
    return np.array([speed, speed*g])


def discoid_profile(spec, config=None, r_max=None, stop='rim', n=8000):
    """Generates the profile of a discoid from its pole.

    The angle is evaluated from r at every point and only r' = cos(phi),
    z' = sin(phi) are integrated, with r = r_end - u^2 as independent
    variable so the vertical tangent at the rim stays regular. The profile
    starts at r = h0 with phi -> 0 and ends at the rim (RimReached), at the
    crest where phi returns to 0 if stop is 'crest', or at r_max (MaxRadius).
    Heights are shifted so that z = 0 at the end.

    Parameters
    ----------
    spec : DiscoidSpec
    config : SolverConfig
        Only h0 and rel_tol are used. h0 defaults to 1e-7.
    r_max : float
    stop : str
        'rim' or 'crest'.
    n : int
        Number of samples.

    Returns
    -------
    curve : ProfileCurve
        With spec as its params.
    """
    h0 = config.h0 if config is not None and config.h0 is not None else 1e-7
    tol = min(config.rel_tol, 1e-12) if config is not None else 1e-12
    if stop not in ('rim', 'crest'):
        raise DomainError("stop must be 'rim' or 'crest', got {!r}".format(stop))
    exit_r, kind = spec.exit_radius()
    if not spec.admissible(r_max):
        raise DomainExceeded("The arcsine argument of {} reaches modulus 1 at r={:.6g}".format(spec, exit_r),
                             exit_r)
    if r_max is None or r_max >= exit_r:
        end, termination = exit_r, Termination.RIM_REACHED
    else:
        end, termination = r_max, Termination.MAX_RADIUS
    if stop == 'crest':
        crest = spec.crest_radius()
        if crest is None:
            raise DomainError("A discoid with c_o = 0 has no crest")
        if crest < end:
            end, termination = crest, Termination.CREST_REACHED
    if end <= h0:
        raise DomainError("The radial range ({}, {}] is empty".format(h0, end))

    at_rim = end == exit_r
    limit = math.sqrt(2/abs(float(spec.derivative(end)))) if at_rim else None
    u0 = math.sqrt(end - h0)
    v = np.linspace(0, u0, n)
    # extra samples near the pole, geometric in r
    r_first = end - (u0 - v[1])**2
    v_pole = u0 - np.sqrt(end - np.geomspace(h0, r_first, 60)[1:-1])
    v = np.unique(np.concatenate([v, v_pole]))
    sol = solve_ivp(_discoid_system, (0, u0), [h0, 0.], method='DOP853', t_eval=v, rtol=tol, atol=tol,
                    args=(spec, end, u0, limit))
    if sol.status != 0:
        raise DomainError("Discoid integration failed: {}".format(sol.message))
    s, z = sol.y
    r = end - (u0 - v)**2
    r[0], r[-1] = h0, end
    phi = np.arcsin(np.clip(spec.argument(r), -1, 1))
    return ProfileCurve(spec, s, r, z - z[-1], phi, spec.derivative(r), termination)


def discoid_H(r, spec):
    """The mean curvature -2 c_o log(r) + A - c_o of a discoid.

    Parameters
    ----------
    r : float or numpy array
        Positive radii.
    spec : DiscoidSpec

    Returns
    -------
    H : float or numpy array
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("The discoid mean curvature needs r > 0")
    H = -2*spec.c_o*np.log(r) + spec.A - spec.c_o
    return float(H) if H.ndim == 0 else H


def _radius_rate(s, r, spec):
    g = spec.argument(r)
    return np.sqrt(np.clip(1 - g**2, 0, None))


def discoid_el_residual(curve, r_min, grid=1e-3, order=4, tol=1e-13):
    """The largest Euler-Lagrange defect of a discoid profile on r >= r_min.

    The radius on a uniform arc length grid starting at r_min comes from
    integrating r' = cos(phi(r)) at tolerance tol. The angle and its
    derivative are evaluated from the closed form, and the defect is taken
    with centered differences of the given order. The last five grid cells
    before the end of the profile are left out.

    Parameters
    ----------
    curve : ProfileCurve
        A discoid profile.
    r_min : float
        Positive exclusion radius around the pole.
    grid : float
    order : int
        2 or 4. The fourth order stencils keep the differencing error of
        H ~ log(r) small near the pole.
    tol : float

    Returns
    -------
    residual : float
    """
    if not r_min > 0:
        raise DomainError("r_min must be positive")
    spec = curve.params
    inside = np.nonzero(curve.r >= r_min)[0]
    if not len(inside):
        raise DomainError("The profile does not reach r_min={}".format(r_min))
    lo = np.interp(r_min, curve.r, curve.s)
    hi = curve.s[-1] - 5*grid
    if hi - lo < (2*order + 2)*grid:
        raise DomainError("The profile beyond r_min is too short for grid={}".format(grid))
    n = max(int(np.ceil((hi - lo)/grid - 1e-9)), 2)
    step = (hi - lo)/n
    grid_s = step*np.arange(n + 1)
    sol = solve_ivp(_radius_rate, (0, grid_s[-1]), [r_min], method='DOP853', t_eval=grid_s,
                    rtol=tol, atol=tol, args=(spec,))
    if sol.status != 0:
        raise DomainError("Resampling the discoid failed: {}".format(sol.message))
    r = sol.y[0]
    g = spec.argument(r)
    cos_phi = np.sqrt(np.clip(1 - g**2, 0, None))
    residual = el_residual_uniform(r, g, cos_phi, spec.derivative(r), spec.c_o, step, order)
    return float(np.max(np.abs(residual)))


def boundary_flux(curve, spec, epsilons=(1e-2, 1e-3, 1e-4, 1e-5)):
    """The pole terms of the first variation of a discoid.

    On the parallel circle r = eps the boundary terms are
    2 pi eps ((H + c_o) dpsi/dn - psi dH/dn), with d/dn = cos(phi) d/dr. For
    psi = 1 near the pole only the second survives, and its coefficient
    2 pi eps dH/dn tends to -4 pi c_o. The limit is extrapolated linearly in
    g(eps)^2, the leading deviation of cos(phi) from 1.

    Parameters
    ----------
    curve : ProfileCurve
        A discoid profile.
    spec : DiscoidSpec
    epsilons : sequence
        At least 4 decreasing cut radii inside the profile.

    Returns
    -------
    estimate : FluxEstimate
    """
    eps = np.asarray(epsilons, dtype=float)
    if len(eps) < 4:
        raise DomainError("The flux extrapolation needs at least 4 cut radii")
    if np.any(np.diff(eps) >= 0) or eps[-1] <= 0:
        raise DomainError("Cut radii must be positive and decreasing")
    if eps[-1] < curve.r[0] or eps[0] > curve.r.max():
        raise DomainError("Cut radii must lie inside the profile's radial range")
    cos_phi = np.cos(np.interp(eps, curve.r, curve.phi))
    delta = 1e-3
    dH_dr = (discoid_H(eps*(1 + delta), spec) - discoid_H(eps*(1 - delta), spec))/(2*eps*delta)
    flux = 2*np.pi*eps*cos_phi*dH_dr
    probe = 2*np.pi*eps*(discoid_H(eps, spec) + spec.c_o)*cos_phi
    _, limit = np.polyfit(spec.argument(eps)**2, flux, 1)
    target = -4*np.pi*spec.c_o
    gaps = np.abs(flux - target)[-3:]
    return FluxEstimate(tuple(eps), tuple(flux), tuple(np.zeros(len(eps))), tuple(probe), float(limit),
                        target, float(-2*limit), bool(np.all(np.diff(gaps) <= 1e-12)))


def discoid_verdict(spec, estimate):
    if spec.c_o == 0:
        return "critical (Willmore sphere)"
    return "not critical (Dirac defect {:.6g} psi(0))".format(estimate.total)


def discoid_mesh(curve, n_theta=64, n_profile=200):
    """Triangulates the discoid closed up by reflection across its rim plane."""
    if n_theta < 8:
        raise DomainError("A closed surface mesh needs n_theta >= 8, got {}".format(n_theta))
    if curve.termination != Termination.RIM_REACHED or abs(math.cos(curve.phi[-1])) > 1e-6:
        raise DomainError("Only a profile that ends on its vertical rim closes up")
    s = np.linspace(curve.s[0], curve.s[-1], n_profile + 1)
    r = np.interp(s, curve.s, curve.r)
    z = np.interp(s, curve.s, curve.z)
    H = discoid_H(r, curve.params)
    r = np.concatenate([[0.], r, r[-2::-1], [0.]])
    z = np.concatenate([[z[0]], z, -z[-2::-1], [-z[0]]])
    H = np.concatenate([[H[0]], H, H[-2::-1], [H[0]]])
    return revolve_profile(r, z, {'H': H}, n_theta)
