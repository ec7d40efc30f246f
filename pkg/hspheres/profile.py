"""
The profile system of an axially symmetric Helfrich surface.

A profile is a unit speed curve (r(s), z(s)) in the half plane r > 0 with
tangent angle phi(s), starting on the symmetry axis at height z_0 with a
horizontal tangent and satisfying

    r' = cos(phi),  z' = sin(phi),  phi' = -2 cos(phi)/z - sin(phi)/r - 2 c_o.

The system is singular at the axis, so integration starts a short arc length
h0 away from it with a series expansion, and it is stopped a short height
z_stop above the equator {z = 0} where it is singular again.
"""
import math
from dataclasses import dataclass, replace, asdict
from enum import Enum
import numpy as np
from scipy.integrate import solve_ivp, cumulative_simpson
from scipy.interpolate import CubicSpline
from hspheres.utils import DomainError, centered_derivatives, uniform_resample


class Termination(str, Enum):
    EQUATOR_REACHED = 'EquatorReached'
    MAX_ARC_LENGTH = 'MaxArcLength'
    STEP_FAILURE = 'StepFailure'
    RIM_REACHED = 'RimReached'
    MAX_RADIUS = 'MaxRadius'
    CREST_REACHED = 'CrestReached'


@dataclass(frozen=True)
class ShootingParams:
    """The spontaneous curvature and the height at which the profile leaves
    the axis.

    Attributes
    ----------
    c_o : float
        The spontaneous curvature.
    z_0 : float
        The starting height, nonzero.
    """
    c_o: float
    z_0: float

    def __post_init__(self):
        if not (np.isfinite(self.c_o) and np.isfinite(self.z_0)):
            raise DomainError("Shooting parameters must be finite, got c_o={}, z_0={}".format(self.c_o, self.z_0))
        if self.z_0 == 0:
            raise DomainError("The starting height z_0 must be nonzero")
        object.__setattr__(self, 'c_o', float(self.c_o))
        object.__setattr__(self, 'z_0', float(self.z_0))

    @property
    def sigma(self):
        """The side of the equator the profile starts on."""
        return 1 if self.z_0 > 0 else -1

    def normalized(self):
        """The equivalent parameters with c_o >= 0 and the scaling factor
        (1 or -1) that maps them back.
        """
        if self.c_o < 0:
            return ShootingParams(-self.c_o, -self.z_0), -1
        return self, 1

    def scaled(self, lam):
        return ShootingParams(self.c_o/lam, lam*self.z_0)


@dataclass(frozen=True)
class ProfileState:
    s: float
    r: float
    z: float
    phi: float


@dataclass(frozen=True)
class SolverConfig:
    """Settings for integrating and analysing a profile.

    Entries left as None are derived from the shooting parameters by resolve:
    h0 = 1e-6 max(1, |z_0|), z_stop = 1e-4 |z_0| and s_max = 50/max(|c_o|, 1).

    Attributes
    ----------
    h0 : float
        Arc length of the series start.
    rel_tol, abs_tol : float
        Tolerances of the integrator.
    z_stop : float
        Height above the equator at which integration stops.
    s_max : float
        Arc length cap.
    richardson_levels : int
        Number of halvings of z_stop used when extrapolating to the equator.
    phi_window : float
        How close phi must be to -+pi/2 when the stop height is reached.
    sample_spacing : float or None
        Spacing of the uniform output grid. None keeps the integrator steps.
    min_samples : int
        Lower bound on the number of output samples.
    tail_window : float
        Size of the fitting window near the equator relative to the cap.
    tail_points : int
        Number of samples used in each endpoint fit.
    tail_tol : float
        Integrator tolerance on the tail.
    fit_degree : int
        Degree of the endpoint fits.
    extrapolation_floor : float
        Level differences below this (relative to 1 + |phi''|) count as settled.
    """
    h0: float = None
    rel_tol: float = 1e-10
    abs_tol: float = 1e-10
    z_stop: float = None
    s_max: float = None
    richardson_levels: int = 3
    phi_window: float = 0.05
    sample_spacing: float = 1e-3
    min_samples: int = 2000
    tail_window: float = 0.05
    tail_points: int = 200
    tail_tol: float = 1e-12
    fit_degree: int = 8
    extrapolation_floor: float = 1e-6

    def resolve(self, params):
        """Fills in the derived entries and checks the settings.

        Parameters
        ----------
        params : ShootingParams
            The profile these settings will be used for.

        Returns
        -------
        config : SolverConfig
            A copy with no None entries apart from sample_spacing.
        """
        height = abs(params.z_0)
        config = replace(
            self,
            h0=1e-6*max(1., height) if self.h0 is None else self.h0,
            z_stop=1e-4*height if self.z_stop is None else self.z_stop,
            s_max=50./max(abs(params.c_o), 1.) if self.s_max is None else self.s_max)
        for name in ('h0', 'rel_tol', 'abs_tol', 'z_stop', 's_max', 'phi_window',
                     'tail_window', 'tail_tol', 'extrapolation_floor'):
            if not getattr(config, name) > 0:
                raise DomainError("{} must be positive, got {}".format(name, getattr(config, name)))
        if config.sample_spacing is not None and not config.sample_spacing > 0:
            raise DomainError("sample_spacing must be positive or None")
        if config.z_stop >= height:
            raise DomainError("z_stop={} must be below |z_0|={}".format(config.z_stop, height))
        if config.h0 > 1e-3*height:
            raise DomainError("h0={} is not small against |z_0|={}".format(config.h0, height))
        if config.richardson_levels < 2:
            raise DomainError("At least two Richardson levels are needed")
        return config

    def updated(self, **changes):
        return replace(self, **changes)

    def as_dict(self):
        return asdict(self)


class ProfileCurve:
    '''
    An arc length sampled trajectory of the profile system.

    Attributes
    ----------
    params : ShootingParams
        The parameters the curve was started with. Closed-form profiles store
        their own parameter record here.
    s, r, z, phi : numpy array
        The samples. s[0] is the arc length of the series start.
    dphi : numpy array
        The derivative of phi at the samples, from the equation that
        generated the curve.
    termination : Termination
        Why the integration stopped.
    stop_height : float
        |z| at the last sample.
    config : SolverConfig
        The resolved settings used, if any.
    solution : callable
        The dense output of the integrator, if kept. Maps arc length to the
        stacked (r, z, phi).
    '''
    def __init__(self, params, s, r, z, phi, dphi, termination, config=None, solution=None):
        self.params = params
        self.s = np.asarray(s, dtype=float)
        self.r = np.asarray(r, dtype=float)
        self.z = np.asarray(z, dtype=float)
        self.phi = np.asarray(phi, dtype=float)
        self.dphi = np.asarray(dphi, dtype=float)
        self.termination = Termination(termination)
        self.config = config
        self.solution = solution
        self.stop_height = float(abs(self.z[-1]))

    def __len__(self):
        return len(self.s)

    def __repr__(self):
        return "ProfileCurve({}, {} samples, s_end={:.6g}, {})".format(
            self.params, len(self), self.s[-1], self.termination.value)

    def state(self, i):
        return ProfileState(float(self.s[i]), float(self.r[i]), float(self.z[i]), float(self.phi[i]))

    @property
    def samples(self):
        return [self.state(i) for i in range(len(self))]

    def interpolate(self, s):
        """The state at arbitrary arc lengths inside the sampled range.

        Returns
        -------
        r, z, phi : numpy array
        """
        s = np.asarray(s, dtype=float)
        if self.solution is not None:
            r, z, phi = self.solution(s)
            return r, z, phi
        return (CubicSpline(self.s, self.r)(s), CubicSpline(self.s, self.z)(s),
                CubicSpline(self.s, self.phi)(s))


def phi_prime(r, z, phi, c_o):
    """The right hand side for phi, vectorized over numpy arrays."""
    return -2*np.cos(phi)/z - np.sin(phi)/r - 2*c_o


def rhs(state, c_o):
    """The right hand side of the profile system.

    Parameters
    ----------
    state : ProfileState
        The point to evaluate at. Needs r > 0 and z != 0.
    c_o : float
        The spontaneous curvature.

    Returns
    -------
    derivative : tuple
        (r', z', phi').
    """
    if not state.r > 0:
        raise DomainError("The profile system is singular on the axis (r={})".format(state.r))
    if state.z == 0:
        raise DomainError("The profile system is singular on the equator (z=0)")
    cos_phi = math.cos(state.phi)
    sin_phi = math.sin(state.phi)
    return cos_phi, sin_phi, -2*cos_phi/state.z - sin_phi/state.r - 2*c_o


def _system(s, y, c_o):
    r, z, phi = y
    cos_phi = math.cos(phi)
    sin_phi = math.sin(phi)
    return np.array([cos_phi, sin_phi, -2*cos_phi/z - sin_phi/r - 2*c_o])


def series_start(params, h0):
    """The state at arc length h0 from the expansion about the axis.

    With a = phi'(0) = -1/z_0 - c_o the system forces phi''(0) = 0 and
    phi'''(0) = -3 a c_o/(2 z_0), so

        phi = a h + b h^3,   b = -a c_o/(4 z_0),
        r = h - a^2 h^3/6 + (a^4/24 - a b) h^5/5,
        z = z_0 + a h^2/2 + (b - a^3/6) h^4/4.

    Parameters
    ----------
    params : ShootingParams
        The starting height and spontaneous curvature.
    h0 : float
        Small positive arc length.

    Returns
    -------
    state : ProfileState
    """
    if not 0 < h0 < abs(params.z_0):
        raise DomainError("h0 must lie in (0, |z_0|), got {}".format(h0))
    c, z0 = params.c_o, params.z_0
    a = -1/z0 - c
    b = -a*c/(4*z0)
    h = h0
    phi = a*h + b*h**3
    r = h - a**2*h**3/6 + (a**4/24 - a*b)*h**5/5
    z = z0 + a*h**2/2 + (b - a**3/6)*h**4/4
    return ProfileState(h, r, z, phi)


def reaches_equator(params):
    """Whether curves with these parameters are proved to reach the equator.

    Those are the circles and the unduloid and ovaloid types. On them the
    tangent angle stays inside (-pi, pi), which integrate_profile enforces.
    """
    p, _ = params.normalized()
    return p.c_o == 0 or p.z_0 > 0 or p.c_o*p.z_0 > -1 + 1e-12


def _event(fun, direction=-1):
    fun.terminal = True
    fun.direction = direction
    return fun


def integrate_profile(params, config=None):
    """Integrates the profile system from the series start.

    Integration stops when |z| reaches z_stop (EquatorReached, provided phi is
    within phi_window of -sign(z_0) pi/2), when s reaches s_max
    (MaxArcLength), or when r drops to 0, the tangent angle leaves (-pi, pi)
    on a curve that must reach the equator, or the integrator fails
    (StepFailure).

    Parameters
    ----------
    params : ShootingParams
        The shooting parameters. Negative c_o is integrated as given.
    config : SolverConfig
        Solver settings. Defaults to SolverConfig().

    Returns
    -------
    curve : ProfileCurve
        The sampled trajectory. It keeps the dense output of the integrator.
    """
    config = (config or SolverConfig()).resolve(params)
    c, sigma = params.c_o, params.sigma
    start = series_start(params, config.h0)
    y0 = np.array([start.r, start.z, start.phi])

    events = [_event(lambda s, y, c_o: sigma*y[1] - config.z_stop),
              _event(lambda s, y, c_o: y[0])]
    if reaches_equator(params):
        events.append(_event(lambda s, y, c_o: math.pi - abs(y[2])))

    with np.errstate(divide='ignore', invalid='ignore'):
        sol = solve_ivp(_system, (config.h0, config.s_max), y0, method='DOP853',
                        rtol=config.rel_tol, atol=config.abs_tol, events=events,
                        dense_output=True, args=(c,))

    if sol.status == -1:
        termination = Termination.STEP_FAILURE
    elif sol.status == 0:
        termination = Termination.MAX_ARC_LENGTH
    elif len(sol.t_events[0]):
        phi_end = sol.y[2, -1]
        if abs(phi_end + sigma*math.pi/2) <= config.phi_window:
            termination = Termination.EQUATOR_REACHED
        else:
            termination = Termination.STEP_FAILURE
    else:
        termination = Termination.STEP_FAILURE

    s_end = sol.t[-1]
    if config.sample_spacing is None or sol.sol is None or s_end <= config.h0:
        s, y = sol.t, sol.y
    else:
        length = s_end - config.h0
        spacing = min(config.sample_spacing, length/config.min_samples)
        interior = config.h0 + spacing*np.arange(1, int(length/spacing) + 1)
        interior = interior[interior < s_end - 1e-3*spacing]
        s = np.concatenate([[config.h0], interior, [s_end]])
        y = sol.sol(s)
        y[:, 0] = y0
        y[:, -1] = sol.y[:, -1]
    r, z, phi = y
    with np.errstate(divide='ignore', invalid='ignore'):
        dphi = phi_prime(r, z, phi, c)
    return ProfileCurve(params, s, r, z, phi, dphi, termination, config=config, solution=sol.sol)


def conserved_residual(curve):
    """The defect of the first integral

        r (sin(phi) + c_o r) + 2 int_0^s r cos(phi)^2 / z dt = 0

    along the curve. The integral is a cumulative Simpson quadrature on the
    samples, with the axis limit t/z_0 of the integrand used on [0, h0].

    Parameters
    ----------
    curve : ProfileCurve

    Returns
    -------
    residual : float
        The largest defect over the samples.
    """
    c, z0 = curve.params.c_o, curve.params.z_0
    s, r, z, phi = curve.s, curve.r, curve.z, curve.phi
    integrand = r*np.cos(phi)**2/z
    head = s[0]**2/(2*z0)
    integral = head + cumulative_simpson(integrand, x=s, initial=0)
    return float(np.max(np.abs(r*(np.sin(phi) + c*r) + 2*integral)))


def reflect_profile(curve):
    """Reflects a profile across the plane z = 0.

    The reflected curve solves the profile system with the opposite
    spontaneous curvature and starting height.
    """
    params = ShootingParams(-curve.params.c_o, -curve.params.z_0)
    return ProfileCurve(params, curve.s, curve.r, -curve.z, -curve.phi, -curve.dphi,
                        curve.termination, config=None, solution=None)


def apply_scaling(curve, lam):
    """Rescales a profile by lam != 0.

    For lam > 0 this is the dilation r -> lam r(s/lam), z -> lam z(s/lam),
    which maps solutions with (c_o, z_0) to solutions with
    (c_o/lam, lam z_0). A negative lam is the dilation by |lam| followed by
    the reflection across z = 0, again giving parameters (c_o/lam, lam z_0).

    Parameters
    ----------
    curve : ProfileCurve
    lam : float

    Returns
    -------
    scaled : ProfileCurve
    """
    if lam == 0 or not np.isfinite(lam):
        raise DomainError("The scaling factor must be finite and nonzero")
    mu = abs(lam)
    params = ShootingParams(curve.params.c_o/mu, mu*curve.params.z_0)
    scaled = ProfileCurve(params, mu*curve.s, mu*curve.r, mu*curve.z, curve.phi, curve.dphi/mu,
                          curve.termination)
    if lam < 0:
        scaled = reflect_profile(scaled)
    return scaled


def unit_speed_defect(curve):
    """The largest deviation of (r')^2 + (z')^2 from 1 along the curve,
    with the derivatives taken by fourth order centered differences on a
    uniform resampling of the interior samples.
    """
    s = curve.s
    if len(s) < 8:
        raise DomainError("Too few samples to difference")
    spacing = np.median(np.diff(s[1:-1]))
    _, step, (r, z) = uniform_resample(s, [curve.r, curve.z], spacing, lo=s[1], hi=s[-2])
    dr, _ = centered_derivatives(r, step, order=4)
    dz, _ = centered_derivatives(z, step, order=4)
    return float(np.max(np.abs(dr**2 + dz**2 - 1)))
