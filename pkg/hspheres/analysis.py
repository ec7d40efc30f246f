"""
Classification of profiles, extrapolation of their equator data, and the
curvature fields and residuals used to check them.
"""
import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
import numpy as np
from numpy.polynomial import Chebyshev
from scipy.integrate import solve_ivp
from scipy.optimize import brentq
from hspheres.profile import (ProfileCurve, ShootingParams, SolverConfig, Termination,
                              integrate_profile, phi_prime)
from hspheres.utils import (DomainError, ExtrapolationDiverged, EndpointWarning,
                            centered_derivatives, uniform_resample)


class CurveClass(str, Enum):
    UNDULOID = 'UnduloidType'
    OVALOID = 'OvaloidType'
    LINE = 'HorizontalLine'
    NODOID = 'NodoidType'
    CIRCLE = 'Circle'


def classify(params):
    """The qualitative type of the profile started at params.

    Parameters with c_o < 0 are first mapped to (-c_o, -z_0).

    Parameters
    ----------
    params : ShootingParams

    Returns
    -------
    kind : CurveClass
    """
    p, _ = params.normalized()
    c, z0 = p.c_o, p.z_0
    if c == 0:
        return CurveClass.CIRCLE
    if z0 > 0:
        return CurveClass.UNDULOID
    if abs(c*z0 + 1) <= 1e-12:
        return CurveClass.LINE
    if c*z0 > -1:
        return CurveClass.OVALOID
    return CurveClass.NODOID


@dataclass(frozen=True)
class EndpointData:
    """What a cap looks like where it meets the equator.

    Attributes
    ----------
    ell : float
        Arc length at the equator.
    r_star : float
        Radius at the equator.
    dphi : float
        phi'(ell), from a free fit of phi.
    ddphi : float
        phi''(ell), from a fit with the limit angle and slope imposed.
    fit_uncertainty : float
        Difference of the last two Richardson levels.
    c_o : float
    sigma : int
        sign(z_0). The cap approaches the equator with phi -> -sigma pi/2.
    phi_limit : float
        Extrapolated phi(ell).
    ddphi_alt : float
        phi''(ell) from the slope of the right hand side for phi.
    levels : tuple
        The phi''(ell) estimate at each stop threshold.
    """
    ell: float
    r_star: float
    dphi: float
    ddphi: float
    fit_uncertainty: float
    c_o: float = 0.
    sigma: int = 1
    phi_limit: float = float('nan')
    ddphi_alt: float = float('nan')
    levels: tuple = field(default=())

    @property
    def dphi_limit(self):
        """phi'(ell) = 2 c_o - sigma/r_star, forced by the profile system."""
        return 2*self.c_o - self.sigma/self.r_star

    @property
    def identity_defect(self):
        return abs(self.dphi - self.dphi_limit)

    @property
    def H_equator(self):
        return self.c_o - self.sigma/self.r_star

    @property
    def dH(self):
        """Outward conormal derivative of H at the equator."""
        return self.ddphi/2


def _tail_system(zeta, y, c_o, sigma):
    s, r, phi = y
    sin_phi = math.sin(phi)
    cos_phi = math.cos(phi)
    dphi = -2*cos_phi/(sigma*zeta) - sin_phi/r - 2*c_o
    return np.array([sigma/sin_phi, sigma*cos_phi/sin_phi, sigma*dphi/sin_phi])


def _tail_start(curve, config):
    """The height above the equator where the tail fit starts and the state
    there.
    """
    params = curve.params
    c, sigma = params.c_o, params.sigma
    height = sigma*curve.z
    scale = min(abs(params.z_0), curve.r[-1], 1/abs(c) if c else np.inf)
    window = config.tail_window*scale
    # the tail must be a graph over the z-axis
    flat = np.nonzero(np.abs(np.sin(curve.phi)) < 0.9)[0]
    if len(flat):
        if flat[-1] + 1 >= len(curve):
            raise ExtrapolationDiverged("The profile is not steep near the equator")
        window = min(window, height[flat[-1] + 1])
    if window <= 20*config.z_stop:
        raise ExtrapolationDiverged("The fitting window {:.3g} is too small for z_stop={:.3g}".format(
            window, config.z_stop))
    i = np.nonzero(height >= window)[0][-1]
    if height[i] == window:
        s_w = curve.s[i]
    else:
        s_w = brentq(lambda t: sigma*float(curve.interpolate(t)[1]) - window, curve.s[i], curve.s[i + 1])
    r_w, _, phi_w = curve.interpolate(s_w)
    return window, np.array([s_w, float(r_w), float(phi_w)])


def endpoint_extrapolate(curve, config=None):
    """Extrapolates the data of a cap at the equator.

    The tail of the cap is integrated again with the height above the
    equator as independent variable, down to z_stop/2^k for each Richardson
    level k. At every level polynomials in the height are fitted to arc
    length, radius and tangent angle and evaluated at the equator. phi''(ell)
    comes from a fit of

        phi + sigma pi/2 - (sigma/r_star - 2 c_o) zeta = zeta^2 Q(zeta)

    in which the limit angle and slope are imposed. A second estimate of
    phi''(ell) is the slope at the equator of the right hand side for phi,
    evaluated away from the cancellation near zeta = 0.

    Parameters
    ----------
    curve : ProfileCurve
        A curve that reached the equator.
    config : SolverConfig
        Defaults to the configuration the curve was integrated with.

    Returns
    -------
    endpoint : EndpointData
    """
    if curve.termination != Termination.EQUATOR_REACHED:
        raise DomainError("Only curves that reach the equator can be extrapolated, got {}".format(
            curve.termination.value))
    params = curve.params
    config = (config or curve.config or SolverConfig()).resolve(params)
    c, sigma = params.c_o, params.sigma
    deg = config.fit_degree
    window, y_w = _tail_start(curve, config)

    levels = []
    for k in range(config.richardson_levels + 1):
        z_k = config.z_stop/2**k
        zeta = np.linspace(window, z_k, config.tail_points)
        sol = solve_ivp(_tail_system, (window, z_k), y_w, method='DOP853', t_eval=zeta,
                        rtol=config.tail_tol, atol=config.tail_tol, args=(c, sigma))
        if sol.status != 0:
            raise ExtrapolationDiverged("Tail integration failed: {}".format(sol.message), levels)
        s_t, r_t, phi_t = sol.y
        x = zeta/window

        ell = Chebyshev.fit(x, s_t, deg, domain=[0, 1])(0)
        r_star = Chebyshev.fit(x, r_t, deg, domain=[0, 1])(0)
        phi_fit = Chebyshev.fit(x, phi_t, deg, domain=[0, 1])
        phi_limit = phi_fit(0)
        dphi = -phi_fit.deriv()(0)/window

        slope = sigma/r_star - 2*c
        remainder = phi_t + sigma*np.pi/2 - slope*zeta
        q = Chebyshev.fit(x, remainder/x**2, deg - 2, domain=[0, 1], w=x**2)
        levels.append(2*q(0)/window**2)

    keep = zeta >= window/20
    rhs_fit = Chebyshev.fit(x[keep], phi_prime(r_t[keep], sigma*zeta[keep], phi_t[keep], c), deg,
                            domain=[0, 1])
    ddphi_alt = -rhs_fit.deriv()(0)/window

    ddphi = levels[-1]
    diffs = np.abs(np.diff(levels))
    floor = config.extrapolation_floor*(1 + abs(ddphi))
    for k in range(1, len(diffs)):
        if diffs[k] > floor and diffs[k] > 0.5*diffs[k - 1]:
            raise ExtrapolationDiverged(
                "Equator extrapolation does not settle for {}: levels {}".format(params, levels), levels)
    fit_uncertainty = max(float(diffs[-1]), 1e-10)

    endpoint = EndpointData(float(ell), float(r_star), float(dphi), float(ddphi), fit_uncertainty,
                            c_o=c, sigma=sigma, phi_limit=float(phi_limit),
                            ddphi_alt=float(ddphi_alt), levels=tuple(float(v) for v in levels))
    if endpoint.identity_defect > max(1e-5, 10*fit_uncertainty):
        warnings.warn("phi'(ell)={:.10g} misses 2c_o - sigma/r_star={:.10g} for {}".format(
            endpoint.dphi, endpoint.dphi_limit, params), EndpointWarning)
    if abs(ddphi - ddphi_alt) > max(10*fit_uncertainty, 1e-4*(1 + abs(ddphi))):
        warnings.warn("The two phi''(ell) estimates disagree for {}: {:.10g} and {:.10g}".format(
            params, ddphi, ddphi_alt), EndpointWarning)
    return endpoint


@dataclass(frozen=True)
class CurvatureSample:
    s: float
    H: float
    K: float
    nu3: float


def curvature_arrays(curve):
    """Mean curvature, Gauss curvature and the z-component of the normal at
    every sample, with phi' taken from the equation that generated the curve.

    Returns
    -------
    H, K, nu3 : numpy array
    """
    sin_phi = np.sin(curve.phi)
    H = sin_phi/(2*curve.r) + curve.dphi/2
    K = curve.dphi*sin_phi/curve.r
    return H, K, np.cos(curve.phi)


def curvature_fields(curve):
    """The curvature samples of a profile.

    Parameters
    ----------
    curve : ProfileCurve

    Returns
    -------
    fields : list of CurvatureSample
    """
    H, K, nu3 = curvature_arrays(curve)
    return [CurvatureSample(float(s), float(h), float(k), float(n))
            for s, h, k, n in zip(curve.s, H, K, nu3)]


def rme_residual(curve):
    """The largest defect of H + c_o + nu3/z = 0 over the samples off the
    equator.
    """
    H, _, nu3 = curvature_arrays(curve)
    mask = curve.z != 0
    return float(np.max(np.abs(H[mask] + curve.params.c_o + nu3[mask]/curve.z[mask])))


def el_residual_uniform(r, sin_phi, cos_phi, dphi, c_o, step, order=2):
    """The Euler-Lagrange defect

        Delta H + 2 (H + c_o)(H (H - c_o) - K),   Delta H = H'' + cos(phi)/r H',

    on uniformly sampled profile data.

    Returns
    -------
    residual : numpy array
        The defect on the interior points of the stencil.
    """
    H = sin_phi/(2*r) + dphi/2
    K = dphi*sin_phi/r
    dH, ddH = centered_derivatives(H, step, order)
    cut = order//2
    inner = slice(cut, len(H) - cut)
    H, K = H[inner], K[inner]
    laplacian = ddH + cos_phi[inner]/r[inner]*dH
    return laplacian + 2*(H + c_o)*(H*(H - c_o) - K)


def el_residual(curve, grid=1e-3, order=2, tol=1e-13, equator_margin=0.02):
    """The largest Euler-Lagrange defect of a profile.

    The state is evaluated on a uniform grid and H is differenced with
    centered stencils. A curve that still carries its integrator output is
    integrated again at tolerance tol and the dense output of that run is
    evaluated on the grid, with phi' taken from the right hand side. Other
    curves are resampled by cubic interpolation. Arc lengths below
    max(5 h0, 5 grid) are left out and, on curves that reach the equator, so
    is the part with |z| below max(10 z_stop, equator_margin |z_0|), where
    cos(phi)/z loses its digits.

    Parameters
    ----------
    curve : ProfileCurve
    grid : float
        The spacing of the resampled grid.
    order : int
        Order of the difference stencils, 2 or 4.
    tol : float or None
        Integrator tolerance of the second run. None resamples the stored
        samples instead.
    equator_margin : float
        Height of the equator cut relative to |z_0|.

    Returns
    -------
    residual : float
    """
    s = curve.s
    c = curve.params.c_o
    lo = max(5*s[0], 5*grid)
    hi = s[-1]
    if curve.termination == Termination.EQUATOR_REACHED:
        cut = max(10*curve.stop_height, equator_margin*abs(curve.params.z_0))
        far = np.nonzero(np.abs(curve.z) >= cut)[0]
        if not len(far):
            raise DomainError("The profile never leaves the equator cut {}".format(cut))
        hi = s[far[-1]]
    dense = None
    if tol is not None and curve.solution is not None and curve.config is not None:
        again = integrate_profile(curve.params, curve.config.updated(rel_tol=tol, abs_tol=tol,
                                                                     sample_spacing=None))
        dense = again.solution
        hi = min(hi, again.s[-1])
    if hi - lo < (2*order + 2)*grid:
        raise DomainError("The profile is too short for grid={}".format(grid))
    if dense is None:
        _, step, (r, phi, dphi) = uniform_resample(s, [curve.r, curve.phi, curve.dphi], grid, lo, hi)
    else:
        n = max(int(np.ceil((hi - lo)/grid - 1e-9)), 2)
        step = (hi - lo)/n
        r, z, phi = dense(np.linspace(lo, hi, n + 1))
        dphi = phi_prime(r, z, phi, c)
    residual = el_residual_uniform(r, np.sin(phi), np.cos(phi), dphi, c, step, order)
    return float(np.max(np.abs(residual)))


def nu3_sign_changes(curve, tol=1e-8):
    """The number of sign changes of the z-component of the normal along the
    profile, ignoring values within tol of zero.
    """
    nu3 = np.cos(curve.phi)
    signs = np.sign(nu3[np.abs(nu3) > tol])
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def is_graph_over_r(curve, tol=1e-8):
    return bool(np.all(np.cos(curve.phi[:-1]) > -tol))


def radius_extrema(curve):
    """The local extrema of the radius along the profile.

    Returns
    -------
    extrema : list of tuple
        (s, r) at each place where cos(phi) changes sign.
    """
    cos_phi = np.cos(curve.phi)
    extrema = []
    for i in np.nonzero(np.sign(cos_phi[1:]) * np.sign(cos_phi[:-1]) < 0)[0]:
        if curve.solution is not None:
            s = brentq(lambda t: math.cos(curve.solution(t)[2]), curve.s[i], curve.s[i + 1])
            extrema.append((float(s), float(curve.solution(s)[0])))
        else:
            w = cos_phi[i]/(cos_phi[i] - cos_phi[i + 1])
            extrema.append((float(curve.s[i] + w*(curve.s[i + 1] - curve.s[i])),
                            float(curve.r[i] + w*(curve.r[i + 1] - curve.r[i]))))
    return extrema


def cylinder_profile(c_o, length=1., n=2001):
    """The vertical line r = 1/(2 c_o), which solves the profile system away
    from the axis. It is the radius the equator radii of the sphere caps
    wind around.
    """
    if c_o <= 0:
        raise DomainError("The critical cylinder needs c_o > 0")
    s = np.linspace(0, length, n)
    top = length + 1.
    return ProfileCurve(ShootingParams(c_o, top), s, np.full(n, 1/(2*c_o)), top - s,
                        np.full(n, -np.pi/2), np.zeros(n), Termination.MAX_ARC_LENGTH)
