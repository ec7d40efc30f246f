# Exceptions, warnings and small numerical helpers shared by the hspheres modules
import os
import numpy as np
from scipy.interpolate import CubicSpline
from scipy.integrate import simpson


class EndpointWarning(Warning):
    pass


class SoftPropertyWarning(Warning):
    pass


class RoundSphereFamily(Warning):
    """Issued when a search is asked for spheres with zero spontaneous
    curvature. Every round sphere is then a critical point, so there is
    nothing discrete to find.
    """
    pass


class DomainError(ValueError):
    """Raised when a function is evaluated at a singular point of the
    profile system or with parameters outside its domain.

    Attributes
    ----------
    message : str
        A message describing the error that occurred.
    """

    def __init__(self, message):
        super().__init__(message)
        self.message = message


class ExtrapolationDiverged(Exception):
    """Raised when the successive equator extrapolations do not settle.

    Attributes
    ----------
    message : str
        A message describing the error that occurred.
    levels : list
        The second derivative estimates obtained at each stop threshold.
    """

    def __init__(self, message, levels=()):
        self.message = message
        self.levels = list(levels)


class BracketLost(Exception):
    """Raised when a point inside a sign-change bracket fails to reach the
    equator.

    Attributes
    ----------
    message : str
        A message describing the error that occurred.
    bracket : tuple
        The bracket that was being refined.
    """

    def __init__(self, message, bracket=None):
        self.message = message
        self.bracket = bracket


class RadiusMismatch(Exception):
    """Raised when two caps meet the equator at different radii.

    Attributes
    ----------
    message : str
        A message describing the error that occurred.
    """

    def __init__(self, message):
        self.message = message


class OrientationMismatch(Exception):
    """Raised when two caps approach the equator from opposite sides, so the
    glued surface would not carry one consistent normal.

    Attributes
    ----------
    message : str
        A message describing the error that occurred.
    """

    def __init__(self, message):
        self.message = message


class DomainExceeded(Exception):
    """Raised when a closed-form profile leaves the domain of the arcsine.

    Attributes
    ----------
    message : str
        A message describing the error that occurred.
    radius : float
        The radius at which the argument first reaches modulus one.
    """

    def __init__(self, message, radius=None):
        self.message = message
        self.radius = radius


def isNumOrBool(x):
    """Determines if x is a number or a bool

    Parameters
    ----------
    x : var
        The variable to check.

    Returns
    -------
    isNumber : bool
        True if x is an number or bool, otherwise False.
    """
    return isinstance(x, (int, float, bool, np.number))


class Tolerances:
    '''
    Tracks the solver tolerances used by successive polishing rounds of the
    sphere search.

    Any number of tolerances may be passed in, each as a float or as a list.
    Lists must all have the same length, and floats are repeated to that
    length. A tolerance passed as "rel_tol" is stored in self.rel_tols, and
    self.rel_tol holds the value for the current round once nextTols has been
    called.

    Attributes
    ----------
    numTols: int
        The number of rounds.
    currTol : int
        The current round.
    names : list
        The names of the tolerances being tracked.

    Methods
    -------
    __init__
        Initializes everything.
    nextTols
        Moves to the next round.
    current
        The tolerances of the current round as a dict.
    '''
    def __init__(self, **tolerances):
        numTols = 1
        for name, value in tolerances.items():
            if not isNumOrBool(value):
                numTols = len(value)

        self.names = []
        for name, value in tolerances.items():
            if isNumOrBool(value):
                setattr(self, name + 's', [value]*numTols)
            elif hasattr(value, '__iter__'):
                value = list(value)
                if len(value) != numTols:
                    raise ValueError("Length of tolerance lists must be the same!")
                setattr(self, name + 's', value)
            else:
                raise TypeError("Tolerance value must be number or boolean type or iterable!")
            self.names.append(name)

        self.currTol = -1
        self.numTols = numTols

    def nextTols(self):
        """Determines the next tolerances

        Returns
        -------
        nextTols : bool
            True if there are more rounds to run, otherwise False.
        """
        self.currTol += 1
        if self.currTol >= self.numTols:
            return False
        for name in self.names:
            setattr(self, name, getattr(self, name + 's')[self.currTol])
        return True

    def current(self):
        return {name: getattr(self, name) for name in self.names}


def thread_count(default=None):
    """The number of worker processes to use.

    The environment variable HELFRICH_THREADS caps the count.

    Parameters
    ----------
    default : int
        The count asked for. Defaults to the number of cpus.

    Returns
    -------
    count : int
        A positive worker count.
    """
    count = default if default is not None else (os.cpu_count() or 1)
    cap = os.environ.get('HELFRICH_THREADS')
    if cap:
        try:
            count = min(count, int(cap))
        except ValueError:
            raise DomainError("HELFRICH_THREADS must be an integer, got {!r}".format(cap))
    return max(int(count), 1)


def uniform_resample(s, values, ds, lo=None, hi=None):
    """Resamples values given at increasing arc lengths onto a uniform grid
    by cubic interpolation.

    Parameters
    ----------
    s : numpy array
        The arc lengths of the samples.
    values : numpy array or list of numpy arrays
        The sampled values.
    ds : float
        The requested spacing. The spacing used divides hi - lo evenly and
        is at most ds.
    lo, hi : float
        The ends of the grid. Default to the ends of s.

    Returns
    -------
    grid : numpy array
        The uniform grid.
    step : float
        Its spacing.
    resampled : numpy array or list of numpy arrays
        The values on the grid.
    """
    lo = s[0] if lo is None else lo
    hi = s[-1] if hi is None else hi
    n = max(int(np.ceil((hi - lo)/ds - 1e-9)), 2)
    grid = np.linspace(lo, hi, n + 1)
    step = (hi - lo)/n
    if isinstance(values, (list, tuple)):
        return grid, step, [CubicSpline(s, v)(grid) for v in values]
    return grid, step, CubicSpline(s, values)(grid)


def simpson_uniform(s, integrand, n):
    """Composite Simpson rule of a sampled integrand after resampling it
    onto n+1 uniform points (n is rounded up to even).
    """
    n += n % 2
    grid = np.linspace(s[0], s[-1], n + 1)
    return simpson(CubicSpline(s, integrand)(grid), x=grid)


def centered_derivatives(values, step, order=2):
    """First and second derivatives of uniformly sampled values by centered
    differences.

    Parameters
    ----------
    values : numpy array
        Samples on a uniform grid.
    step : float
        The grid spacing.
    order : int
        2 or 4, the order of the stencils.

    Returns
    -------
    first, second : numpy array
        The derivatives on the interior points. With order 2 these are
        values[1:-1], with order 4 values[2:-2].
    """
    f = values
    if order == 2:
        first = (f[2:] - f[:-2])/(2*step)
        second = (f[2:] - 2*f[1:-1] + f[:-2])/step**2
    elif order == 4:
        first = (-f[4:] + 8*f[3:-1] - 8*f[1:-3] + f[:-4])/(12*step)
        second = (-f[4:] + 16*f[3:-1] - 30*f[2:-2] + 16*f[1:-3] - f[:-4])/(12*step**2)
    else:
        raise DomainError("Stencil order must be 2 or 4, got {}".format(order))
    return first, second
