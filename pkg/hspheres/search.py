"""
Search for Helfrich spheres among the unduloid caps.

A cap started at height z_0 closes up smoothly with its mirror image exactly
when phi''(ell) = 0 at the equator. The search scans phi''(ell) over a grid
of starting heights, refines every sign change with Brent's method and then
polishes the roots with tighter solver tolerances.
"""
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq, least_squares
from hspheres.analysis import CurveClass, EndpointData, classify, endpoint_extrapolate
from hspheres.profile import ShootingParams, SolverConfig, Termination, integrate_profile
from hspheres.RootTracker import RootTracker
from hspheres.ScanData import ScanData
from hspheres.utils import (BracketLost, DomainError, ExtrapolationDiverged, RoundSphereFamily,
                            SoftPropertyWarning, Tolerances)

EQUATOR = Termination.EQUATOR_REACHED.value


@dataclass(frozen=True)
class ScanRecord:
    """The equator data of the cap started at z0, or why there is none.

    The numeric entries are nan unless status is EquatorReached.
    """
    c_o: float
    z0: float
    status: str
    ell: float = float('nan')
    r_star: float = float('nan')
    dphi: float = float('nan')
    ddphi: float = float('nan')
    fit_uncertainty: float = float('nan')


@dataclass(frozen=True)
class SphereRoot:
    """A starting height whose cap glues with its mirror image into a
    smooth closed surface.

    Attributes
    ----------
    z0_root : float
    bracket : tuple
        The grid interval the root was refined in.
    endpoint : EndpointData
        The equator data at the root.
    index : int
        Position among the roots in increasing z0, from 1.
    drift : float
        How far the root moved over the polishing rounds.
    """
    z0_root: float
    bracket: tuple
    endpoint: EndpointData
    index: int
    drift: float = 0.


@dataclass(frozen=True)
class AsymmetricPair:
    z0_a: float
    z0_b: float
    r_star_a: float
    r_star_b: float
    ddphi_a: float
    ddphi_b: float


def default_grid(c_o, zmax=None, n=2000):
    """n evenly spaced starting heights on (0, zmax], zmax defaulting to 6/c_o."""
    if zmax is None:
        if c_o <= 0:
            raise DomainError("A default grid needs c_o > 0")
        zmax = 6/c_o
    return np.linspace(zmax/n, zmax, n)


def scan_point(c_o, z0, config=None):
    """Evaluates one starting height.

    Returns
    -------
    record : ScanRecord
    """
    try:
        params = ShootingParams(c_o, z0)
        kind = classify(params)
        if kind in (CurveClass.LINE, CurveClass.NODOID):
            return ScanRecord(c_o, z0, kind.value)
        curve = integrate_profile(params, config)
        if curve.termination != Termination.EQUATOR_REACHED:
            return ScanRecord(c_o, z0, curve.termination.value)
        endpoint = endpoint_extrapolate(curve, config)
    except ExtrapolationDiverged:
        return ScanRecord(c_o, z0, 'ExtrapolationDiverged')
    except DomainError:
        return ScanRecord(c_o, z0, 'DomainError')
    return ScanRecord(c_o, z0, EQUATOR, endpoint.ell, endpoint.r_star, endpoint.dphi,
                      endpoint.ddphi, endpoint.fit_uncertainty)


def _evaluate(z0s, c_o, config, threads, verbose):
    data = ScanData(len(z0s))
    worker = partial(scan_point, c_o, config=config)
    if threads > 1 and len(z0s) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = pool.map(worker, z0s, chunksize=max(len(z0s)//(4*threads), 1))
            records = []
            for record in results:
                records.append(record)
                data.track_record(record)
                if verbose:
                    data.print_progress()
    else:
        records = []
        for z0 in z0s:
            record = worker(z0)
            records.append(record)
            data.track_record(record)
            if verbose:
                data.print_progress()
    return records, data


def scan(c_o, z0_grid, config=None, threads=1, refine=False, refine_threshold=0.1, verbose=False):
    """Computes the equator data of the caps started at each height of a grid.

    Parameters
    ----------
    c_o : float
        The spontaneous curvature, >= 0.
    z0_grid : iterable
        The starting heights, nonzero.
    config : SolverConfig
        Defaults to SolverConfig(sample_spacing=None).
    threads : int
        Number of worker processes. The records do not depend on it.
    refine : bool
        If True, add the midpoint of every grid interval between two caps
        that reach the equator where |phi''(ell)| < refine_threshold at
        either end, and return the records sorted by z0.
    refine_threshold : float
    verbose : bool
        If True prints progress and a summary of the statuses.

    Returns
    -------
    records : list of ScanRecord
        One per grid point, in grid order.
    """
    if c_o < 0:
        raise DomainError("Scans are run with c_o >= 0, got {}".format(c_o))
    if config is None:
        config = SolverConfig(sample_spacing=None)
    z0s = [float(z) for z in z0_grid]
    records, data = _evaluate(z0s, c_o, config, threads, verbose)
    if refine:
        ordered = sorted(records, key=lambda rec: rec.z0)
        mids = [(a.z0 + b.z0)/2 for a, b in zip(ordered[:-1], ordered[1:])
                if a.status == EQUATOR and b.status == EQUATOR and a.z0*b.z0 > 0
                and min(abs(a.ddphi), abs(b.ddphi)) < refine_threshold]
        extra, more = _evaluate(mids, c_o, config, threads, verbose)
        records = sorted(records + extra, key=lambda rec: rec.z0)
        for name, heights in more.status_results.items():
            data.status_results.setdefault(name, []).extend(heights)
    if verbose:
        data.print_results()
    return records


def evaluate_endpoint(z0, c_o, config=None):
    """The equator data of the cap started at z0, raising BracketLost if
    there is none.
    """
    curve = integrate_profile(ShootingParams(c_o, z0), config)
    if curve.termination != Termination.EQUATOR_REACHED:
        raise BracketLost("The cap at z0={} ended with {}".format(z0, curve.termination.value))
    try:
        return endpoint_extrapolate(curve, config)
    except ExtrapolationDiverged as e:
        raise BracketLost(e.message)


def _refine_bracket(lo, hi, evaluate, tol):
    found = {}

    def f(z0):
        endpoint = evaluate(z0)
        found[z0] = endpoint
        if abs(endpoint.ddphi) <= max(tol, endpoint.fit_uncertainty):
            return 0.
        return endpoint.ddphi

    root = brentq(f, lo, hi, xtol=tol*max(abs(lo), abs(hi)))
    return root, found[root] if root in found else evaluate(root)


def bracket_and_refine(records, tol=1e-8, config=None, evaluate=None, tracker=None):
    """Refines every sign change of phi''(ell) between neighbouring records.

    Parameters
    ----------
    records : list of ScanRecord
        A scan at a single c_o.
    tol : float
        phi''(ell) values within max(tol, fit_uncertainty) of zero count as
        roots, and brackets are refined to a width of tol |z0|.
    config : SolverConfig
        Settings used for the evaluations inside a bracket.
    evaluate : callable
        Maps z0 to its EndpointData. Defaults to integrating and extrapolating
        the cap, with failures raised as BracketLost.
    tracker : RootTracker
        Receives the roots and the lost brackets.

    Returns
    -------
    roots : list of SphereRoot
        Sorted by z0.
    """
    tracker = RootTracker() if tracker is None else tracker
    usable = sorted([rec for rec in records if rec.status == EQUATOR], key=lambda rec: rec.z0)
    if not usable:
        return []
    c_o = usable[0].c_o
    if any(rec.c_o != c_o for rec in usable):
        raise DomainError("All records must share one spontaneous curvature")
    if c_o == 0:
        warnings.warn("With c_o = 0 every round sphere is critical; no discrete roots exist",
                      RoundSphereFamily)
        return []
    if evaluate is None:
        evaluate = partial(evaluate_endpoint, c_o=c_o, config=config)

    for a, b in zip(usable[:-1], usable[1:]):
        if a.z0*b.z0 < 0:
            continue
        if a.ddphi == 0:
            tracker.add_root(a.z0, (a.z0, a.z0), evaluate(a.z0), 'grid')
            continue
        if a.ddphi*b.ddphi > 0 or b.ddphi == 0:
            continue
        try:
            z, endpoint = _refine_bracket(a.z0, b.z0, evaluate, tol)
        except (BracketLost, ValueError) as e:
            message = getattr(e, 'message', str(e))
            tracker.add_lost_bracket((a.z0, b.z0), message)
            warnings.warn("Lost the bracket ({}, {}): {}".format(a.z0, b.z0, message), SoftPropertyWarning)
            continue
        tracker.add_root(z, (a.z0, b.z0), endpoint, 'brentq')
    if usable[-1].ddphi == 0:
        tracker.add_root(usable[-1].z0, (usable[-1].z0,)*2, evaluate(usable[-1].z0), 'grid')

    order = np.argsort(tracker.roots)
    return [SphereRoot(float(tracker.roots[i]), tracker.brackets[i], tracker.endpoints[i], k + 1)
            for k, i in enumerate(order)]


def sign_changes(records):
    """The number of sign changes and grid zeros of phi''(ell) among the
    records above the equator.
    """
    usable = sorted([rec for rec in records if rec.status == EQUATOR and rec.z0 > 0], key=lambda rec: rec.z0)
    ddphi = np.array([rec.ddphi for rec in usable])
    if len(ddphi) == 0:
        return 0
    return int(np.count_nonzero(ddphi[:-1]*ddphi[1:] < 0) + np.count_nonzero(ddphi == 0))


def find_spheres(c_o, zmax=None, n=2000, count=None, config=None, tolerances=None, threads=1,
                 tol=1e-8, tracker=None, max_extensions=4, verbose=False):
    """Finds the symmetric Helfrich spheres for a spontaneous curvature.

    The first round scans the default grid with adaptive refinement and
    refines the sign changes. While fewer than count sign changes are found
    the scan is continued over further intervals of the same length and
    density, at most max_extensions times. Every further round of tolerances
    re-refines each root inside its bracket with the tighter solver settings,
    and the movement of the root is kept as its drift.

    Parameters
    ----------
    c_o : float
        Positive spontaneous curvature.
    zmax, n : float, int
        The scan grid, see default_grid.
    count : int
        Keep only the first count roots.
    config : SolverConfig
    tolerances : Tolerances
        Rounds of rel_tol and abs_tol. Defaults to 1e-10 then 5e-11.
    threads : int
    tol : float
        Root tolerance, see bracket_and_refine.
    tracker : RootTracker
        Receives the roots of the last round and every lost bracket.
    max_extensions : int
    verbose : bool

    Returns
    -------
    roots : list of SphereRoot
    records : list of ScanRecord
        The scan of the first round, extensions included, sorted by z0.
    """
    if c_o == 0:
        warnings.warn("With c_o = 0 every round sphere is critical; no discrete roots exist",
                      RoundSphereFamily)
        return [], []
    tols = tolerances or Tolerances(rel_tol=[1e-10, 5e-11], abs_tol=[1e-10, 5e-11])
    tols.nextTols()
    base = (config or SolverConfig()).updated(sample_spacing=None)
    round_config = base.updated(**tols.current())
    grid = default_grid(c_o, zmax, n)
    span = grid[-1]
    records = scan(c_o, grid, round_config, threads=threads, refine=True, verbose=verbose)
    extensions = 0
    while count is not None and sign_changes(records) < count and extensions < max_extensions:
        extensions += 1
        if verbose:
            print("Extending the scan to z0={}".format((extensions + 1)*span))
        records = sorted(records + scan(c_o, extensions*span + grid, round_config, threads=threads,
                                        refine=True, verbose=verbose), key=lambda rec: rec.z0)
    if count is not None and sign_changes(records) < count:
        warnings.warn("Found {} sign changes below z0={}, fewer than {}".format(
            sign_changes(records), (extensions + 1)*span, count), SoftPropertyWarning)

    tracker = RootTracker() if tracker is None else tracker
    roots = bracket_and_refine(records, tol=tol, config=round_config, tracker=tracker)
    if count is not None:
        roots = roots[:count]

    polish_round = 1
    while tols.nextTols() and roots:
        polish_round += 1
        round_config = base.updated(**tols.current())
        evaluate = partial(evaluate_endpoint, c_o=c_o, config=round_config)
        methods = [tracker.methods[i] for i in np.argsort(tracker.roots)]
        polished = []
        for root, bracket, method in zip(roots, tracker.get_polish_brackets(), methods):
            if verbose:
                print("\rPolishing Round: {} Root: {}/{}{}".format(polish_round, root.index, len(roots),
                                                                  ' '*20), end='')
            lo, hi = bracket
            try:
                if lo == hi:
                    z, endpoint = lo, evaluate(lo)
                else:
                    z, endpoint = _refine_bracket(lo, hi, evaluate, tol)
            except (BracketLost, ValueError) as e:
                message = "polishing round {}: {}".format(polish_round, getattr(e, 'message', str(e)))
                tracker.add_lost_bracket(bracket, message)
                tracker.add_root(root.z0_root, bracket, root.endpoint, method)
                warnings.warn("Polishing lost the root at {}: {}".format(root.z0_root, message),
                              SoftPropertyWarning)
                polished.append(root)
                continue
            tracker.add_root(z, bracket, endpoint, 'polish')
            drift = max(root.drift, abs(z - root.z0_root))
            polished.append(SphereRoot(z, root.bracket, endpoint, root.index, drift))
        roots = polished
        if verbose:
            print()
    for root in roots:
        if root.drift > 1e-4*root.z0_root:
            warnings.warn("The root at z0={} moved by {} under tighter tolerances".format(
                root.z0_root, root.drift), SoftPropertyWarning)
    return roots, records


def spiral_curve(records):
    """The points (phi''(ell), r_star) of the caps above the equator, in
    increasing z0.

    Returns
    -------
    points : numpy array
        Shape (n, 2).
    """
    usable = sorted([rec for rec in records if rec.status == EQUATOR and rec.z0 > 0],
                    key=lambda rec: rec.z0)
    return np.array([(rec.ddphi, rec.r_star) for rec in usable]).reshape(-1, 2)


def spiral_report(roots, c_o):
    """How the equator radii of the roots approach the cylinder radius.

    The distances |r_star - 1/(2 c_o)| are expected to decrease along the
    roots. A warning is issued when they do not.

    Returns
    -------
    report : dict
        'cylinder_radius', 'distances' and 'contracting'.
    """
    if c_o <= 0:
        raise DomainError("The spiral needs c_o > 0")
    target = 1/(2*c_o)
    distances = [abs(root.endpoint.r_star - target) for root in roots]
    contracting = bool(np.all(np.diff(distances) <= 1e-9))
    if not contracting:
        warnings.warn("The equator radii do not contract towards 1/(2c_o): {}".format(distances),
                      SoftPropertyWarning)
    return {'cylinder_radius': target, 'distances': distances, 'contracting': contracting}


def _mirror_intersections(z, D, R):
    """Parameters (a, b) where the polyline through (D, R) crosses its mirror
    image (-D, R).
    """
    p0 = np.column_stack([D[:-1], R[:-1]])
    dp = np.diff(np.column_stack([D, R]), axis=0)
    q0 = np.column_stack([-D[:-1], R[:-1]])
    dq = dp*np.array([-1, 1])
    found = []
    chunk = 256
    for start in range(0, len(p0), chunk):
        P0, dP = p0[start:start + chunk, None, :], dp[start:start + chunk, None, :]
        cross = dP[..., 0]*dq[None, :, 1] - dP[..., 1]*dq[None, :, 0]
        w = q0[None, :, :] - P0
        with np.errstate(divide='ignore', invalid='ignore'):
            t = (w[..., 0]*dq[None, :, 1] - w[..., 1]*dq[None, :, 0])/cross
            u = (w[..., 0]*dP[..., 1] - w[..., 1]*dP[..., 0])/cross
        eps = 1e-12
        hit = (cross != 0) & (t >= -eps) & (t <= 1 + eps) & (u >= -eps) & (u <= 1 + eps)
        for i, j in zip(*np.nonzero(hit)):
            k = start + i
            a = z[k] + t[i, j]*(z[k + 1] - z[k])
            b = z[j] + u[i, j]*(z[j + 1] - z[j])
            found.append((min(a, b), max(a, b)))
    return found


def asymmetric_pair_search(records, tol_r=1e-4, tol_d=1e-4, refine=True, config=None, evaluate=None):
    """Looks for two different caps that could be glued into a smooth closed
    surface, that is z0_a != z0_b with equal equator radii and opposite
    phi''(ell).

    Candidates are record pairs within the tolerances and the places where
    the curve (phi''(ell), r_star) crosses its mirror image. Each candidate
    is refined on cubic interpolants of the scan and, if refine is True,
    verified by integrating both caps. Pairs at which phi''(ell) is zero
    within tol_d are symmetric roots and are left out.

    Parameters
    ----------
    records : list of ScanRecord
    tol_r, tol_d : float
    refine : bool
    config : SolverConfig
    evaluate : callable
        Maps z0 to EndpointData for the verification.

    Returns
    -------
    pairs : list of AsymmetricPair
    """
    usable = sorted([rec for rec in records if rec.status == EQUATOR and rec.z0 > 0],
                    key=lambda rec: rec.z0)
    if len(usable) < 2:
        return []
    z = np.array([rec.z0 for rec in usable])
    D = np.array([rec.ddphi for rec in usable])
    R = np.array([rec.r_star for rec in usable])
    separation = 2*np.max(np.diff(z))
    distinct = 0.5*np.min(np.diff(z))

    close = ((np.abs(R[:, None] - R[None, :]) <= tol_r) & (np.abs(D[:, None] + D[None, :]) <= tol_d)
             & (np.abs(D[:, None]) > tol_d))
    candidates = [(z[i], z[j]) for i, j in zip(*np.nonzero(np.triu(close, 1)))]
    candidates += _mirror_intersections(z, D, R)

    spline_R = CubicSpline(z, R)
    spline_D = CubicSpline(z, D)

    def gap(x):
        a, b = x
        return [(spline_R(a) - spline_R(b))/tol_r, (spline_D(a) + spline_D(b))/tol_d]

    pairs = []
    for a, b in sorted(candidates):
        if b - a <= distinct or abs(spline_D(a)) <= tol_d:
            continue
        lower = [max(a - separation, z[0]), max(b - separation, z[0])]
        upper = [min(a + separation, z[-1]), min(b + separation, z[-1])]
        a, b = least_squares(gap, [a, b], bounds=(lower, upper)).x
        a, b = min(a, b), max(a, b)
        if b - a <= distinct or abs(spline_D(a)) <= tol_d:
            continue
        values = (float(spline_R(a)), float(spline_R(b)), float(spline_D(a)), float(spline_D(b)))
        if refine:
            if evaluate is None:
                evaluate = partial(evaluate_endpoint, c_o=usable[0].c_o, config=config)
            try:
                end_a, end_b = evaluate(a), evaluate(b)
            except BracketLost:
                continue
            values = (end_a.r_star, end_b.r_star, end_a.ddphi, end_b.ddphi)
        r_a, r_b, d_a, d_b = values
        if abs(r_a - r_b) <= tol_r and abs(d_a + d_b) <= tol_d and abs(d_a) > tol_d:
            if not any(abs(p.z0_a - a) <= separation and abs(p.z0_b - b) <= separation for p in pairs):
                pairs.append(AsymmetricPair(float(a), float(b), r_a, r_b, d_a, d_b))
    return pairs
