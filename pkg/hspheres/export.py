"""
Writers for the static artifacts: CSV tables, JSON records and OBJ meshes.

Every file carries a schema tag. Numbers are written with 17 significant
digits so identical runs give identical files.
"""
import json
import math
from dataclasses import fields, is_dataclass
from enum import Enum
import numpy as np

PROFILE_SCHEMA = 'profile/1'
ANALYSIS_SCHEMA = 'analysis/1'
SCAN_SCHEMA = 'scan/1'
ROOTS_SCHEMA = 'roots/1'
SURFACE_SCHEMA = 'surface/1'
DISCOID_SCHEMA = 'discoid/1'

SCAN_COLUMNS = ('c_o', 'z0', 'ell', 'r_star', 'dphi', 'ddphi', 'fit_uncertainty', 'status')


def to_jsonable(obj):
    """Converts dataclasses, enums, numpy values and containers into plain
    JSON types. Non-finite floats become None.
    """
    if isinstance(obj, Enum):
        return obj.value
    if is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in fields(obj)}
    if isinstance(obj, dict):
        return {str(key): to_jsonable(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(value) for value in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(value) for value in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        obj = float(obj)
        return obj if math.isfinite(obj) else None
    return obj


def write_json(record, path):
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        json.dump(to_jsonable(record), f, sort_keys=True, indent=2, allow_nan=False)
        f.write('\n')


def _header(schema, columns, **meta):
    items = ['schema={}'.format(schema)] + ['{}={}'.format(key, meta[key]) for key in sorted(meta)]
    return ' '.join(items) + '\n' + ','.join(columns)


def write_table(path, table, columns, schema, fmt='%.17g', **meta):
    """Writes the rows of table as comma separated values.

    The first two lines are comments holding the schema tag with any meta
    data, then the column names. fmt may be a list with one format per
    column for tables holding text.
    """
    table = np.asarray(table, dtype=float if isinstance(fmt, str) else object).reshape(-1, len(columns))
    np.savetxt(path, table, fmt=fmt, delimiter=',', header=_header(schema, columns, **meta),
               comments='# ', encoding='utf-8', newline='\n')


def read_table(path, dtype=float):
    """Reads a table written by write_table. Tables holding text are read
    with dtype=str.

    Returns
    -------
    meta : dict
        The schema tag and meta data, as strings.
    columns : list
    table : numpy array
    """
    with open(path, encoding='utf-8') as f:
        meta = dict(item.split('=', 1) for item in f.readline()[2:].split())
        columns = f.readline()[2:].strip().split(',')
    table = np.loadtxt(path, delimiter=',', comments='#', ndmin=2, dtype=dtype).reshape(-1, len(columns))
    return meta, columns, table


def write_profile_csv(curve, path):
    params = curve.params
    meta = {name: getattr(params, name) for name in ('c_o', 'z_0', 'A') if hasattr(params, name)}
    write_table(path, np.column_stack([curve.s, curve.r, curve.z, curve.phi]), ('s', 'r', 'z', 'phi'),
                PROFILE_SCHEMA, termination=curve.termination.value, **meta)


def profile_record(curve):
    """The JSON record of a profile."""
    return {'schema': PROFILE_SCHEMA,
            'params': curve.params,
            'config': curve.config.as_dict() if curve.config is not None else None,
            'termination': curve.termination,
            'samples': {'s': curve.s, 'r': curve.r, 'z': curve.z, 'phi': curve.phi}}


def analysis_record(curve, kind, endpoint=None, **diagnostics):
    record = {'schema': ANALYSIS_SCHEMA,
              'params': curve.params,
              'class': kind,
              'source': 'solver',
              'termination': curve.termination,
              's_end': float(curve.s[-1]),
              'stop_height': curve.stop_height,
              'endpoint': None}
    if endpoint is not None:
        record['endpoint'] = dict(to_jsonable(endpoint), dphi_limit=endpoint.dphi_limit,
                                  identity_defect=endpoint.identity_defect, H_equator=endpoint.H_equator)
    record.update(diagnostics)
    return record


def write_scan_csv(records, path):
    """One row per scanned starting height, nan where there is no equator
    data.
    """
    table = [[getattr(rec, name) for name in SCAN_COLUMNS] for rec in records]
    write_table(path, table, SCAN_COLUMNS, SCAN_SCHEMA, fmt=['%.17g']*(len(SCAN_COLUMNS) - 1) + ['%s'])


def scan_record(records):
    statuses = {}
    for rec in records:
        statuses[rec.status] = statuses.get(rec.status, 0) + 1
    return {'schema': SCAN_SCHEMA, 'count': len(records), 'source': 'solver', 'statuses': statuses,
            'status': [rec.status for rec in records]}


def roots_record(c_o, roots, spiral=None, lost_brackets=(), pairs=None):
    record = {'schema': ROOTS_SCHEMA,
              'c_o': c_o,
              'source': 'solver',
              'roots': [{'index': root.index, 'z0': root.z0_root, 'bracket': root.bracket,
                         'drift': root.drift, 'r_star': root.endpoint.r_star, 'ell': root.endpoint.ell,
                         'dphi': root.endpoint.dphi, 'ddphi': root.endpoint.ddphi,
                         'fit_uncertainty': root.endpoint.fit_uncertainty} for root in roots],
              'lost_brackets': [{'bracket': bracket, 'message': message} for bracket, message in lost_brackets]}
    if spiral is not None:
        record['spiral'] = spiral
    if pairs is not None:
        record['pairs'] = pairs
    return record


def surface_record(surface, report, **integrals):
    return {'schema': SURFACE_SCHEMA,
            'c_o': surface.c_o,
            'top': surface.top.curve.params,
            'bottom': surface.bottom.curve.params,
            'r_star': surface.r_star,
            'symmetric': surface.symmetric,
            'regularity': report,
            'integrals': integrals}


def discoid_record(spec, curve, estimate, verdict, **diagnostics):
    record = {'schema': DISCOID_SCHEMA,
              'spec': spec,
              'termination': curve.termination,
              'r_end': float(curve.r[-1]),
              'height': float(np.max(curve.z) - np.min(curve.z)),
              'flux': estimate,
              'verdict': verdict}
    record.update(diagnostics)
    return record


def write_obj(mesh, path, schema=SURFACE_SCHEMA, **meta):
    """Writes a TriMesh in the Wavefront OBJ text format.

    Vertex attributes follow the faces as comment blocks, one
    '# attribute <name>' line followed by one '# <value>' line per vertex.
    """
    lines = ['# ' + _header(schema, ('x', 'y', 'z')).split('\n')[0]]
    lines += ['# {}={}'.format(key, meta[key]) for key in sorted(meta)]
    lines += ['v {:.17g} {:.17g} {:.17g}'.format(*vertex) for vertex in mesh.vertices]
    lines += ['f {} {} {}'.format(*(face + 1)) for face in mesh.faces]
    for name in sorted(mesh.attributes):
        lines.append('# attribute {}'.format(name))
        lines += ['# {:.17g}'.format(value) for value in mesh.attributes[name]]
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        f.write('\n'.join(lines) + '\n')


def read_obj(path):
    """Reads the vertices, faces and attributes of a file written by write_obj.

    Returns
    -------
    vertices, faces : numpy array
        Faces are zero based.
    attributes : dict
    """
    vertices, faces, attributes, current = [], [], {}, None
    with open(path, encoding='utf-8') as f:
        for line in f:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == 'v':
                vertices.append([float(x) for x in parts[1:4]])
            elif parts[0] == 'f':
                faces.append([int(x.split('/')[0]) - 1 for x in parts[1:4]])
            elif parts[:2] == ['#', 'attribute']:
                current = attributes.setdefault(parts[2], [])
            elif current is not None and parts[0] == '#' and len(parts) == 2:
                current.append(float(parts[1]))
    return (np.array(vertices).reshape(-1, 3), np.array(faces, dtype=int).reshape(-1, 3),
            {name: np.array(values) for name, values in attributes.items()})
