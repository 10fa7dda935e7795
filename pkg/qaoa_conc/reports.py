"""Structured-text (JSON) and CSV output for schedules and reports.

Structured text is JSON with sorted keys and two-space indent.  Floats are
written with Python's shortest round-trip repr, so reading a document back
gives bit-identical numbers and identical inputs give byte-identical files.
CSV tables use four decimals and ``#`` comment lines for the embedded
config and seed ledger (read back with ``pandas.read_csv(comment='#')``).
"""

import json
from pathlib import Path

import numpy as np

from .errors import ParameterError
from .qaoa_core import AngleSchedule


def _jsonable(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, AngleSchedule):
        return obj.to_dict()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f'{type(obj).__name__} is not JSON serializable')


def dumps(doc):
    return json.dumps(doc, sort_keys=True, indent=2, default=_jsonable) + '\n'


def write_structured(path, doc):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='\n') as f:
        f.write(dumps(doc))
    return path


def read_structured(path):
    with open(path) as f:
        return json.load(f)


def write_csv(path, frame, header=None):
    """Write a DataFrame with four-decimal floats after ``# key=json`` lines."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='\n') as f:
        for key, value in (header or {}).items():
            f.write(f'# {key}={json.dumps(value, sort_keys=True, default=_jsonable)}\n')
        frame.to_csv(f, index=False, float_format='%.4f', lineterminator='\n')
    return path


def document(command, config, seeds, result):
    """Standard report envelope: the run config, its seed ledger and the result."""
    return {'command': command, 'config': config, 'seeds': seeds, 'result': result}


# ---------------------------------------------------------------------------
# Angle schedule files
# ---------------------------------------------------------------------------

def write_angles(path, angles):
    return write_structured(path, angles.to_dict())


def angles_from_doc(doc):
    """Find a schedule in a plain angle file or in a report that carries one."""
    queue = [doc]
    while queue:
        node = queue.pop(0)
        if not isinstance(node, dict):
            continue
        if 'gamma' in node and 'beta' in node:
            return AngleSchedule.from_dict(node)
        queue.extend(node[key] for key in ('result', 'best_angles', 'angles') if key in node)
    raise ParameterError('no angle schedule (gamma, beta) found in document')


def read_angles(path):
    return angles_from_doc(read_structured(path))
