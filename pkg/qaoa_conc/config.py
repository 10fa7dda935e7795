"""Load and resolve qaoa_config.json."""

import copy
import json
import os
from pathlib import Path

from .errors import ConfigError

_CONFIG_PATH = Path(__file__).parent.parent / 'qaoa_config.json'

OUTPUT_DIR_ENV = 'QAOA_CONC_OUTPUT_DIR'

DEFAULTS = {
    'simulator_max_qubits': 26,
    'brute_force_max_vertices': 30,
    'regular_max_attempts': 10000,
    'maxcut_max_tries': 2000,
    'local_search_tol': 1e-6,
    'local_search_max_iters': 2000,
    'initial_simplex_step': 0.1,
    'landscape_resolution': 32,
    'leapfrog_eval_count': 25,
    'sample_shots': 1024,
    'bands': {
        'med_low': [7.0, 8.0],
        'med_high': [21.0, 22.0],
    },
    'output_dir': None,
    'threads': 1,
}


def load_config(path=None):
    """Load configuration, merging the file over the built-in defaults.

    A missing file at the default location is not an error; an explicitly
    given path must exist.  Unknown keys raise ``ConfigError``.
    """
    explicit = path is not None
    path = Path(path) if explicit else _CONFIG_PATH
    cfg = copy.deepcopy(DEFAULTS)

    if path.exists():
        with open(path) as f:
            try:
                data = json.load(f)
            except json.JSONDecodeError as exc:
                raise ConfigError(f'{path}: not valid JSON ({exc})')
        unknown = sorted(set(data) - set(DEFAULTS))
        if unknown:
            raise ConfigError(
                f'{path}: unknown config key(s) {unknown}. '
                f'Valid keys: {sorted(DEFAULTS)}'
            )
        for key, value in data.items():
            if key == 'bands':
                cfg['bands'].update(value)
            else:
                cfg[key] = value
    elif explicit:
        raise FileNotFoundError(f'Config file not found: {path}')

    # Environment wins over the file for the output directory only
    env_out = os.getenv(OUTPUT_DIR_ENV)
    if env_out:
        cfg['output_dir'] = env_out
    if cfg['output_dir']:
        cfg['output_dir'] = str(Path(cfg['output_dir']).expanduser())

    _validate(cfg)
    return cfg


def _validate(cfg):
    for key in ('simulator_max_qubits', 'brute_force_max_vertices',
                'regular_max_attempts', 'maxcut_max_tries',
                'local_search_max_iters', 'landscape_resolution',
                'leapfrog_eval_count', 'sample_shots', 'threads'):
        value = cfg[key]
        if not isinstance(value, int) or isinstance(value, bool) or value < 1:
            raise ConfigError(f'{key} must be a positive integer, got {value!r}')
    for key in ('local_search_tol', 'initial_simplex_step'):
        if not float(cfg[key]) > 0:
            raise ConfigError(f'{key} must be positive, got {cfg[key]!r}')
    for name, band in cfg['bands'].items():
        if len(band) != 2 or not band[0] < band[1]:
            raise ConfigError(f'band {name!r} must be [low, high] with low < high, got {band!r}')


def get_simulator_cap(cfg):
    return int(cfg['simulator_max_qubits'])


def get_brute_force_cap(cfg):
    return int(cfg['brute_force_max_vertices'])


def get_band(cfg, name):
    """Return the (low, high) objective band for an early-stopped regime."""
    try:
        low, high = cfg['bands'][name]
    except KeyError:
        valid = list(cfg['bands'].keys())
        raise ConfigError(f'Unknown band {name!r}. Valid bands: {valid}')
    return float(low), float(high)


def get_output_dir(cfg):
    out = cfg.get('output_dir')
    return Path(out) if out else None


def resolve_output_path(cfg, path):
    """Resolve a relative output path against the configured output directory."""
    path = Path(path)
    out_dir = get_output_dir(cfg)
    if out_dir is not None and not path.is_absolute():
        path = out_dir / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path
