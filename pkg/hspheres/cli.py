"""
The hspheres command line.

    hspheres profile --co 1 --z0 0.4 --out run
    hspheres scan --co 1 --zmax 6 --n 2000
    hspheres spheres --co 1 --count 4
    hspheres pairs --co 1 --zmax 6
    hspheres discoid --co 1 --A 0
    hspheres family --co 1
    hspheres mesh --co 1 --z0 2.5

Settings can also come from a file of key=value lines given with --config,
where the keys are the long flag names. Flags given on the command line
win over the file, which wins over the built-in defaults.

Exit codes are 0 on success, 2 for usage errors and 3 for numerical failures.
"""
import argparse
import logging
import os
import sys
import numpy as np
from hspheres import export
from hspheres.analysis import CurveClass, classify, el_residual, endpoint_extrapolate, rme_residual
from hspheres.discoid import (DiscoidSpec, boundary_flux, discoid_el_residual, discoid_mesh, discoid_profile,
                              discoid_verdict)
from hspheres.profile import (ShootingParams, SolverConfig, Termination, conserved_residual, integrate_profile,
                              reaches_equator)
from hspheres.RootTracker import RootTracker
from hspheres.search import (asymmetric_pair_search, default_grid, find_spheres, scan, spiral_curve,
                             spiral_report)
from hspheres.surface import (area, full_helfrich_energy, regularity_report, rescaling_integral, revolve_mesh,
                              symmetric_surface, total_gaussian_curvature)
from hspheres.utils import (BracketLost, DomainError, DomainExceeded, ExtrapolationDiverged, OrientationMismatch,
                            RadiusMismatch, thread_count)

logger = logging.getLogger('hspheres')

NUMERICAL_FAILURE = 3
NUMERICAL_ERRORS = (DomainError, DomainExceeded, ExtrapolationDiverged, BracketLost, RadiusMismatch,
                    OrientationMismatch)

FAMILY_HEIGHTS = (0.4, 1.5, -0.5, -1., -1.5, -3.)
SOLVER_FLAGS = ('h0', 'rel_tol', 'abs_tol', 'z_stop', 's_max', 'richardson_levels', 'sample_spacing')


class NumericalFailure(Exception):
    def __init__(self, message):
        super().__init__(message)
        self.message = message


def _solver_arguments(parser):
    group = parser.add_argument_group('solver')
    group.add_argument('--h0', type=float, help='arc length of the series start')
    group.add_argument('--rel-tol', type=float, help='integrator relative tolerance')
    group.add_argument('--abs-tol', type=float, help='integrator absolute tolerance')
    group.add_argument('--z-stop', type=float, help='stop height above the equator')
    group.add_argument('--s-max', type=float, help='arc length cap')
    group.add_argument('--richardson-levels', type=int, help='halvings of the stop height')
    group.add_argument('--sample-spacing', type=float, help='spacing of the output samples')


def _common_arguments(parser):
    parser.add_argument('--out', default='.', help='output directory')
    parser.add_argument('--config', help='file of key=value settings')
    parser.add_argument('--verbose', action='store_true')


def build_parser():
    """The argument parser and its subcommand parsers by name."""
    parser = argparse.ArgumentParser(prog='hspheres', description='Axially symmetric Helfrich spheres')
    commands = parser.add_subparsers(dest='command', required=True)
    subparsers = {}

    sub = commands.add_parser('profile', help='integrate one profile and analyse its equator')
    sub.add_argument('--co', type=float, required=True)
    sub.add_argument('--z0', type=float, required=True)
    _solver_arguments(sub)
    subparsers['profile'] = sub

    for name, text in (('scan', 'scan phi\'\'(ell) over starting heights'),
                       ('spheres', 'find, glue and verify the symmetric spheres'),
                       ('pairs', 'look for asymmetric pairs of caps')):
        sub = commands.add_parser(name, help=text)
        sub.add_argument('--co', type=float, required=True)
        sub.add_argument('--zmax', type=float, help='largest starting height, default 6/co')
        sub.add_argument('--n', type=int, default=2000, help='number of grid heights')
        sub.add_argument('--threads', type=int, help='worker processes, capped by HELFRICH_THREADS')
        _solver_arguments(sub)
        subparsers[name] = sub
    subparsers['scan'].add_argument('--refine', action='store_true', help='bisect intervals near roots')
    subparsers['spheres'].add_argument('--count', type=int, help='number of roots to keep')
    subparsers['spheres'].add_argument('--tol', type=float, default=1e-4, help='largest C3 gap at the equator')
    subparsers['spheres'].add_argument('--rescaling-tol', type=float, default=1e-5,
                                       help='largest |integral of H + c_o| per unit area')
    subparsers['spheres'].add_argument('--rme-tol', type=float, default=1e-6)
    subparsers['spheres'].add_argument('--el-tol', type=float, default=1e-4)
    subparsers['spheres'].add_argument('--n-theta', type=int, default=64)
    subparsers['spheres'].add_argument('--n-profile', type=int, default=200)
    subparsers['pairs'].add_argument('--tol-r', type=float, default=1e-4)
    subparsers['pairs'].add_argument('--tol-d', type=float, default=1e-4)

    sub = commands.add_parser('discoid', help='generate a discoid and its pole flux')
    sub.add_argument('--co', type=float, default=1.)
    sub.add_argument('--A', type=float, default=0.)
    sub.add_argument('--r-max', type=float)
    sub.add_argument('--stop', choices=('rim', 'crest'), default='rim')
    sub.add_argument('--eps', type=float, nargs='+', default=[1e-2, 1e-3, 1e-4, 1e-5], help='cut radii')
    sub.add_argument('--r-min', type=float, default=0.05, help='pole exclusion of the residual check')
    sub.add_argument('--n-theta', type=int, default=64)
    subparsers['discoid'] = sub

    sub = commands.add_parser('family', help='profiles of the representative curve classes')
    sub.add_argument('--co', type=float, default=1.)
    sub.add_argument('--z0', type=float, nargs='+', default=list(FAMILY_HEIGHTS))
    _solver_arguments(sub)
    subparsers['family'] = sub

    sub = commands.add_parser('mesh', help='triangulate the symmetric surface at one height')
    sub.add_argument('--co', type=float, required=True)
    sub.add_argument('--z0', type=float, required=True)
    sub.add_argument('--n-theta', type=int, default=64)
    sub.add_argument('--n-profile', type=int, default=200)
    _solver_arguments(sub)
    subparsers['mesh'] = sub

    for sub in subparsers.values():
        _common_arguments(sub)
    return parser, subparsers


def read_config(path):
    """Reads a file of key=value lines. '#' starts a comment and dashes in
    keys are read as underscores.
    """
    values = {}
    with open(path, encoding='utf-8') as f:
        for number, line in enumerate(f, 1):
            line = line.split('#', 1)[0].strip()
            if not line:
                continue
            if '=' not in line:
                raise ValueError("{}:{}: expected key=value".format(path, number))
            key, value = line.split('=', 1)
            values[key.strip().replace('-', '_')] = value.strip()
    return values


def config_defaults(parser, values):
    """Converts config file entries to defaults of a subcommand parser."""
    actions = {action.dest: action for action in parser._actions}
    defaults = {}
    for key, value in values.items():
        if key in ('config', 'help') or key not in actions:
            raise ValueError("Unknown setting {!r}".format(key))
        action = actions[key]
        if isinstance(action, argparse._StoreTrueAction):
            defaults[key] = value.lower() in ('1', 'true', 'yes', 'on')
            continue
        convert = action.type or str
        if action.nargs in ('+', '*'):
            defaults[key] = [convert(item) for item in value.replace(',', ' ').split()]
        else:
            defaults[key] = convert(value)
        if action.choices is not None and defaults[key] not in action.choices:
            raise ValueError("{} must be one of {}".format(key, action.choices))
    for action in parser._actions:
        if action.dest in defaults:
            action.required = False
    return defaults


def solver_config(args):
    config = SolverConfig()
    changes = {name: getattr(args, name) for name in SOLVER_FLAGS if getattr(args, name, None) is not None}
    return config.updated(**changes)


def _setup_logging(out, verbose):
    handler = logging.FileHandler(os.path.join(out, 'run.log'), mode='a', encoding='utf-8')
    handler.setFormatter(logging.Formatter('%(asctime)s %(levelname)s %(name)s: %(message)s'))
    logger.addHandler(handler)
    logger.setLevel(logging.DEBUG if verbose else logging.INFO)
    logging.captureWarnings(True)
    logging.getLogger('py.warnings').addHandler(handler)
    return handler


def _teardown_logging(handler):
    logger.removeHandler(handler)
    logging.getLogger('py.warnings').removeHandler(handler)
    logging.captureWarnings(False)
    handler.close()


def _path(args, name):
    return os.path.join(args.out, name)


def _validate(args, parser):
    """Checks the flags of a command before anything is computed."""
    def check(condition, message):
        if not condition:
            parser.error(message)

    if args.command in ('profile', 'mesh'):
        try:
            params = ShootingParams(args.co, args.z0)
            solver_config(args).resolve(params)
        except DomainError as e:
            parser.error(e.message)
    if args.command in ('scan', 'spheres', 'pairs'):
        check(args.co > 0, "--co must be positive for a search")
        check(args.n >= 2, "--n must be at least 2")
        check(args.zmax is None or args.zmax > 0, "--zmax must be positive")
        check(args.threads is None or args.threads >= 1, "--threads must be at least 1")
    if args.command == 'spheres':
        check(args.count is None or args.count >= 1, "--count must be at least 1")
        check(min(args.tol, args.rescaling_tol, args.rme_tol, args.el_tol) > 0, "tolerances must be positive")
    if args.command in ('spheres', 'mesh', 'discoid'):
        check(args.n_theta >= 8, "--n-theta must be at least 8")
    if args.command in ('spheres', 'mesh'):
        check(args.n_profile >= 1, "--n-profile must be at least 1")
    if args.command == 'pairs':
        check(args.tol_r > 0 and args.tol_d > 0, "--tol-r and --tol-d must be positive")
    if args.command == 'discoid':
        eps = np.asarray(args.eps)
        check(len(eps) >= 4, "--eps needs at least 4 cut radii")
        check(np.all(eps > 0) and np.all(np.diff(eps) < 0), "--eps must be positive and decreasing")
        check(args.r_min > 0, "--r-min must be positive")
        check(args.r_max is None or args.r_max > 0, "--r-max must be positive")
        check(args.stop == 'rim' or args.co != 0, "--stop crest needs --co != 0")
    if args.command == 'family':
        for z0 in args.z0:
            check(z0 != 0, "--z0 values must be nonzero")


def cmd_profile(args):
    """Writes profile.csv, profile.json and analysis.json for one shooting height."""
    params = ShootingParams(args.co, args.z0)
    curve = integrate_profile(params, solver_config(args))
    logger.info("profile %s", curve)
    export.write_profile_csv(curve, _path(args, 'profile.csv'))
    export.write_json(export.profile_record(curve), _path(args, 'profile.json'))
    endpoint = None
    if curve.termination == Termination.EQUATOR_REACHED:
        endpoint = endpoint_extrapolate(curve, curve.config)
        logger.info("equator r*=%.12g phi''=%.6g +- %.2g", endpoint.r_star, endpoint.ddphi,
                    endpoint.fit_uncertainty)
    record = export.analysis_record(curve, classify(params), endpoint,
                                    conserved_residual=conserved_residual(curve))
    export.write_json(record, _path(args, 'analysis.json'))
    if curve.termination == Termination.STEP_FAILURE:
        raise NumericalFailure("The integration of {} failed".format(params))
    print("{}: {}".format(curve.termination.value, _path(args, 'profile.csv')))


def _grid(args):
    return default_grid(args.co, args.zmax, args.n)


def cmd_scan(args):
    """Writes scan.csv, scan.json and the spiral points spiral.csv."""
    records = scan(args.co, _grid(args), solver_config(args).updated(sample_spacing=None),
                   threads=thread_count(args.threads), refine=args.refine, verbose=args.verbose)
    export.write_scan_csv(records, _path(args, 'scan.csv'))
    export.write_json(export.scan_record(records), _path(args, 'scan.json'))
    export.write_table(_path(args, 'spiral.csv'), spiral_curve(records), ('ddphi', 'r_star'), export.SCAN_SCHEMA,
                       c_o=args.co)
    print("Scanned {} heights: {}".format(len(records), _path(args, 'scan.csv')))
    return records


def cmd_spheres(args):
    """Finds the roots, then glues, certifies and meshes the surface at each.

    A sphere is certified when its C3 gap is within --tol, the rescaling
    integral within --rescaling-tol per unit area, and the cap satisfies the
    reduced membrane equation and the Euler-Lagrange equation within
    --rme-tol and --el-tol.
    """
    config = solver_config(args)
    tracker = RootTracker()
    roots, records = find_spheres(args.co, args.zmax, args.n, args.count, config=config,
                                  threads=thread_count(args.threads), tracker=tracker, verbose=args.verbose)
    export.write_scan_csv(records, _path(args, 'scan.csv'))
    spiral = spiral_report(roots, args.co) if roots else None
    export.write_json(export.roots_record(args.co, roots, spiral, lost_brackets=tracker.lost_brackets),
                      _path(args, 'roots.json'))

    certified = 0
    for root in roots:
        surface = symmetric_surface(ShootingParams(args.co, root.z0_root), config)
        report = regularity_report(surface, args.tol)
        total, top, bottom = rescaling_integral(surface, args.co)
        surface_area = area(surface)
        rme = rme_residual(surface.top.curve)
        try:
            el = el_residual(surface.top.curve)
        except DomainError as e:
            logger.warning("sphere %d: no Euler-Lagrange residual: %s", root.index, e.message)
            el = None
        passed = bool(report.certified and abs(total) <= args.rescaling_tol*surface_area
                      and rme <= args.rme_tol and el is not None and el <= args.el_tol)
        certified += passed
        logger.info("sphere %d z0=%.12g r*=%.12g c3_gap=%.3g rescaling=%.3g rme=%.3g el=%s", root.index,
                    root.z0_root, surface.r_star, report.c3_gap, total, rme, el)
        export.write_json(export.surface_record(surface, report, area=surface_area, rescaling=total,
                                                rescaling_top=top, rescaling_bottom=bottom,
                                                energy=full_helfrich_energy(surface, args.co),
                                                gauss=total_gaussian_curvature(surface), rme_residual=rme,
                                                el_residual=el, certified=passed, z0=root.z0_root,
                                                index=root.index),
                          _path(args, 'sphere_{}.json'.format(root.index)))
        mesh = revolve_mesh(surface, args.n_theta, args.n_profile)
        export.write_obj(mesh, _path(args, 'sphere_{}.obj'.format(root.index)), c_o=args.co, z0=root.z0_root,
                         euler_characteristic=mesh.euler_characteristic())
    print("Found {} spheres, {} certified: {}".format(len(roots), certified, _path(args, 'roots.json')))
    return roots


def cmd_pairs(args):
    """Writes pairs.json with every asymmetric pair found, normally none."""
    records = scan(args.co, _grid(args), solver_config(args).updated(sample_spacing=None),
                   threads=thread_count(args.threads), verbose=args.verbose)
    pairs = asymmetric_pair_search(records, args.tol_r, args.tol_d, config=solver_config(args))
    export.write_json(export.roots_record(args.co, [], pairs=pairs), _path(args, 'pairs.json'))
    export.write_table(_path(args, 'spiral.csv'), spiral_curve(records), ('ddphi', 'r_star'), export.SCAN_SCHEMA,
                       c_o=args.co)
    print("Found {} asymmetric pairs: {}".format(len(pairs), _path(args, 'pairs.json')))
    return pairs


def cmd_discoid(args):
    """Writes discoid.csv, flux.json and, for a closed discoid, discoid.obj."""
    spec = DiscoidSpec(args.co, args.A)
    curve = discoid_profile(spec, r_max=args.r_max, stop=args.stop)
    estimate = boundary_flux(curve, spec, args.eps)
    verdict = discoid_verdict(spec, estimate)
    residual = discoid_el_residual(curve, args.r_min) if curve.r[-1] > args.r_min else None
    export.write_profile_csv(curve, _path(args, 'discoid.csv'))
    export.write_json(export.discoid_record(spec, curve, estimate, verdict, el_residual=residual,
                                            rim_radius=spec.rim_radius()),
                      _path(args, 'flux.json'))
    if curve.termination == Termination.RIM_REACHED:
        export.write_obj(discoid_mesh(curve, args.n_theta), _path(args, 'discoid.obj'),
                         schema=export.DISCOID_SCHEMA, c_o=args.co, A=args.A)
    logger.info("discoid %s total %.8g: %s", spec, estimate.total, verdict)
    print("{}: {}".format(verdict, _path(args, 'flux.json')))
    return estimate


def cmd_family(args):
    """Writes family_<k>.csv for each starting height."""
    for k, z0 in enumerate(args.z0, 1):
        params = ShootingParams(args.co, z0)
        curve = integrate_profile(params, solver_config(args))
        logger.info("family %d %s %s", k, classify(params).value, curve)
        export.write_profile_csv(curve, _path(args, 'family_{}.csv'.format(k)))
        if curve.termination == Termination.STEP_FAILURE:
            if reaches_equator(params):
                raise NumericalFailure("The integration of {} failed".format(params))
            logger.warning("family %d: the %s curve at %s left the half plane", k, classify(params).value, params)
    print("Wrote {} profiles to {}".format(len(args.z0), args.out))


def cmd_mesh(args):
    params = ShootingParams(args.co, args.z0)
    if classify(params) not in (CurveClass.UNDULOID, CurveClass.OVALOID, CurveClass.CIRCLE):
        raise NumericalFailure("The curve at {} does not reach the equator".format(params))
    surface = symmetric_surface(params, solver_config(args))
    mesh = revolve_mesh(surface, args.n_theta, args.n_profile)
    export.write_obj(mesh, _path(args, 'mesh.obj'), c_o=args.co, z0=args.z0,
                     euler_characteristic=mesh.euler_characteristic())
    print("Wrote {}".format(_path(args, 'mesh.obj')))
    return mesh


COMMANDS = {'profile': cmd_profile, 'scan': cmd_scan, 'spheres': cmd_spheres, 'pairs': cmd_pairs,
            'discoid': cmd_discoid, 'family': cmd_family, 'mesh': cmd_mesh}


def main(argv=None):
    """Runs the command line and returns the exit code."""
    parser, subparsers = build_parser()
    # the config file has to be read before required flags are checked
    pre = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    pre.add_argument('command', nargs='?')
    pre.add_argument('--config')
    known, _ = pre.parse_known_args(argv)
    if known.config is not None and known.command in subparsers:
        sub = subparsers[known.command]
        try:
            sub.set_defaults(**config_defaults(sub, read_config(known.config)))
        except (OSError, ValueError) as e:
            sub.error(str(e))
    args = parser.parse_args(argv)
    _validate(args, subparsers[args.command])
    os.makedirs(args.out, exist_ok=True)

    handler = _setup_logging(args.out, args.verbose)
    logger.info("hspheres %s", ' '.join(sys.argv[1:] if argv is None else argv))
    try:
        COMMANDS[args.command](args)
    except (NumericalFailure, *NUMERICAL_ERRORS) as e:
        message = getattr(e, 'message', str(e))
        logger.error(message)
        print("Error: {}".format(message), file=sys.stderr)
        return NUMERICAL_FAILURE
    finally:
        _teardown_logging(handler)
    return 0


if __name__ == '__main__':
    sys.exit(main())
