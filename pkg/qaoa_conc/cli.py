"""Command-line interface for QAOA concentration runs."""

import argparse
import copy
import json
import sys
from dataclasses import asdict, dataclass, field, fields
from itertools import combinations
from pathlib import Path

import pandas as pd

from . import config, experiments, graphs, optimize, qaoa_core, reports
from .errors import (
    ConfigError,
    DegenerateVarianceError,
    GenerationError,
    ParameterError,
    ResourceCapError,
    SearchAbortError,
)
from .streams import derive_seed, rng_stream


EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_GENERATION = 3
EXIT_RESOURCE = 4
EXIT_NUMERIC = 5

COMMANDS = (
    'gen-graph', 'maxcut', 'census', 'neighborhood', 'evaluate', 'sample',
    'optimize', 'landscape', 'leapfrog', 'concentration', 'correlation',
    'transfer', 'bound',
)

REGIME_NAMES = {
    'low': experiments.LOW,
    'med-low': experiments.MED_LOW,
    'random': experiments.RANDOM,
    'med-high': experiments.MED_HIGH,
    'high': experiments.HIGH,
}

_CAP_KEYS = ('simulator_max_qubits', 'brute_force_max_vertices')

# Commands that write a report file even without --output
_DEFAULT_OUTPUT = {
    'gen-graph': 'graph.txt',
    'optimize': 'optimize',
    'landscape': 'landscape',
    'leapfrog': 'leapfrog',
    'concentration': 'concentration',
    'correlation': 'correlation',
    'transfer': 'transfer',
}


# ---------------------------------------------------------------------------
# Run configuration
# ---------------------------------------------------------------------------

@dataclass
class RunConfig:
    """Everything one command needs; serialized into every output file.

    ``threads`` is left out of the serialized form: results do not depend on
    it, and leaving it out keeps reports byte-identical across thread counts.
    """

    command: str
    seed: int = 0
    n: int = None
    d: int = 3
    p: int = None
    p_list: list = None
    model: str = 'regular'
    p_edge: float = None
    target_cmax: int = None
    largest_component: bool = False
    instances: int = None
    restarts: int = None
    evals: int = None
    shots: int = None
    resolution: int = None
    sizes: list = None
    n_train: int = None
    n_eval: int = None
    include_training: bool = False
    refine_tol: float = None
    regimes: list = None
    direction: str = optimize.MAXIMIZE
    graph: str = None
    angles: str = None
    edge: int = None
    radius: int = None
    seeds: list = None
    trend: bool = False
    samples: int = None
    t: float = None
    L: int = None
    c: float = None
    output: str = None
    format: str = 'json'
    caps: dict = field(default_factory=dict)
    threads: int = None

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f'unknown run-config field(s) {unknown}')
        if 'command' not in data:
            raise ConfigError('run config needs a "command" field')
        return cls(**data)

    def to_dict(self):
        data = asdict(self)
        data.pop('threads')
        return data


def _require(run_cfg, *names):
    missing = [name for name in names if getattr(run_cfg, name) is None]
    if missing:
        flags = ', '.join('--' + name.replace('_', '-') for name in missing)
        raise ConfigError(f'{run_cfg.command} needs {flags}')


def _positive(run_cfg, *names):
    for name in names:
        value = getattr(run_cfg, name)
        if value is not None and value < 1:
            raise ConfigError(f'--{name.replace("_", "-")} must be >= 1, got {value}')


def _check_cap(label, value, cap, what):
    if value is not None and value > cap:
        raise ResourceCapError(f'{label}={value} exceeds the {what} cap {cap}')


def validate(run_cfg, cfg):
    """Check a RunConfig against the loaded config; return the effective config.

    Caps overrides in ``run_cfg.caps`` are applied to a copy of ``cfg``.  All
    size checks happen here, before any work starts.
    """
    if run_cfg.command not in COMMANDS:
        raise ConfigError(f'unknown command {run_cfg.command!r}; valid: {list(COMMANDS)}')
    if not isinstance(run_cfg.seed, int) or isinstance(run_cfg.seed, bool) or run_cfg.seed < 0:
        raise ConfigError(f'--seed must be a non-negative integer, got {run_cfg.seed!r}')
    if run_cfg.seed >= 2 ** 64:
        raise ConfigError(f'--seed must fit in 64 bits, got {run_cfg.seed}')
    if run_cfg.format not in ('json', 'csv'):
        raise ConfigError(f'--format must be json or csv, got {run_cfg.format!r}')
    if run_cfg.direction not in (optimize.MAXIMIZE, optimize.MINIMIZE):
        raise ConfigError(f'--direction must be maximize or minimize, got {run_cfg.direction!r}')
    if run_cfg.model not in ('regular', 'er'):
        raise ConfigError(f'--model must be regular or er, got {run_cfg.model!r}')
    for name in run_cfg.regimes or ():
        if name not in REGIME_NAMES:
            raise ConfigError(f'unknown regime {name!r}; valid: {list(REGIME_NAMES)}')

    unknown_caps = sorted(set(run_cfg.caps) - set(_CAP_KEYS))
    if unknown_caps:
        raise ConfigError(f'unknown cap override(s) {unknown_caps}; valid: {list(_CAP_KEYS)}')
    cfg = copy.deepcopy(cfg)
    for key, value in run_cfg.caps.items():
        if not isinstance(value, int) or value < 1:
            raise ConfigError(f'cap {key} must be a positive integer, got {value!r}')
        cfg[key] = value
    if run_cfg.threads is None:
        run_cfg.threads = cfg['threads']
    if run_cfg.command == 'landscape' and run_cfg.resolution is None:
        run_cfg.resolution = cfg['landscape_resolution']
    if run_cfg.command == 'leapfrog' and run_cfg.evals is None:
        run_cfg.evals = cfg['leapfrog_eval_count']
    if run_cfg.threads < 1:
        raise ConfigError(f'--threads must be >= 1, got {run_cfg.threads!r}')

    _positive(run_cfg, 'n', 'p', 'instances', 'restarts', 'evals', 'shots',
              'samples', 'n_train', 'n_eval', 'L')
    sim_cap = config.get_simulator_cap(cfg)
    brute_cap = config.get_brute_force_cap(cfg)
    command = run_cfg.command

    if command == 'gen-graph':
        _require(run_cfg, 'n')
        if run_cfg.target_cmax is not None:
            _check_cap('--n', run_cfg.n, brute_cap, 'brute-force')
    elif command == 'maxcut':
        _require(run_cfg, 'graph')
    elif command == 'census':
        if not run_cfg.trend:
            _require(run_cfg, 'graph')
    elif command == 'neighborhood':
        _require(run_cfg, 'graph', 'edge', 'radius')
    elif command in ('evaluate', 'sample'):
        _require(run_cfg, 'graph', 'angles')
    elif command == 'optimize':
        _require(run_cfg, 'p', 'restarts')
        if run_cfg.graph is None:
            _require(run_cfg, 'n')
        _check_cap('--n', run_cfg.n, sim_cap, 'simulator')
    elif command == 'landscape':
        _require(run_cfg, 'resolution')
        if run_cfg.graph is None:
            _require(run_cfg, 'n')
        if run_cfg.resolution < 2:
            raise ConfigError(f'--resolution must be >= 2, got {run_cfg.resolution}')
        _check_cap('--n', run_cfg.n, sim_cap, 'simulator')
    elif command == 'leapfrog':
        _require(run_cfg, 'sizes', 'p', 'restarts', 'evals', 'refine_tol')
        for size in run_cfg.sizes:
            _check_cap('--sizes', size, min(sim_cap, brute_cap), 'simulator/brute-force')
    elif command in ('concentration', 'correlation'):
        _require(run_cfg, 'n', 'instances', 'restarts')
        if command == 'concentration':
            _require(run_cfg, 'p_list')
        else:
            _require(run_cfg, 'p')
        _check_cap('--n', run_cfg.n, sim_cap, 'simulator')
        if run_cfg.target_cmax is not None:
            _check_cap('--n', run_cfg.n, brute_cap, 'brute-force')
        if command == 'correlation' and run_cfg.instances < 2:
            raise ConfigError('correlation needs --instances >= 2')
    elif command == 'transfer':
        _require(run_cfg, 'n_train', 'n_eval', 'p', 'restarts', 'evals')
        for label in ('n_train', 'n_eval'):
            value = getattr(run_cfg, label)
            _check_cap(f'--{label.replace("_", "-")}', value, min(sim_cap, brute_cap),
                       'simulator/brute-force')
    elif command == 'bound':
        _require(run_cfg, 't', 'L', 'c')
    return cfg


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def _output_path(run_cfg, cfg):
    path = run_cfg.output or _DEFAULT_OUTPUT.get(run_cfg.command)
    if path is None:
        return None
    path = Path(path)
    if run_cfg.command != 'gen-graph' and not path.suffix:
        path = path.with_suffix('.csv' if run_cfg.format == 'csv' else '.json')
    return config.resolve_output_path(cfg, path)


def _write_report(run_cfg, cfg, result, seeds, frame):
    """Write the structured or CSV report; return its path (or None)."""
    path = _output_path(run_cfg, cfg)
    if path is None:
        return None
    if run_cfg.format == 'csv':
        if frame is None:
            frame = pd.DataFrame([{k: v for k, v in result.items()
                                   if not isinstance(v, (list, dict))}])
        return reports.write_csv(path, frame,
                                 header={'config': run_cfg.to_dict(), 'seeds': seeds})
    doc = reports.document(run_cfg.command, run_cfg.to_dict(), seeds, result)
    return reports.write_structured(path, doc)


# ---------------------------------------------------------------------------
# Command handlers: each returns (result, seeds, frame, summary)
# ---------------------------------------------------------------------------

def _load_graph(run_cfg):
    try:
        return graphs.read_edge_list(run_cfg.graph)
    except FileNotFoundError:
        raise ConfigError(f'graph file not found: {run_cfg.graph}')


def _load_angles(run_cfg):
    try:
        return reports.read_angles(run_cfg.angles)
    except FileNotFoundError:
        raise ConfigError(f'angle file not found: {run_cfg.angles}')


def _instance_graph(run_cfg, cfg, seed=None):
    """The --graph file, or a random d-regular instance tossed from the seed."""
    if run_cfg.graph is not None:
        return _load_graph(run_cfg), None
    instance_seed = derive_seed(run_cfg.seed if seed is None else seed, 'instance')
    g = experiments.toss_instance(cfg, run_cfg.n, instance_seed, run_cfg.d, run_cfg.target_cmax)
    return g, instance_seed


def _maybe_ratio(g, value, cfg):
    if g.m == 0 or g.n > config.get_brute_force_cap(cfg):
        return None, None
    cmax, _ = graphs.brute_force_maxcut(g, cap=config.get_brute_force_cap(cfg))
    return cmax, qaoa_core.approximation_ratio(value, cmax)


def _cmd_gen_graph(run_cfg, cfg, verbose):
    rng = rng_stream(run_cfg.seed, 'gen-graph')
    if run_cfg.model == 'regular':
        if run_cfg.target_cmax is not None:
            g = graphs.gen_regular_with_maxcut(
                run_cfg.n, run_cfg.d, run_cfg.target_cmax, rng, cfg['maxcut_max_tries'],
                max_attempts=cfg['regular_max_attempts'],
                brute_force_cap=config.get_brute_force_cap(cfg),
            )
        else:
            g = graphs.gen_regular(run_cfg.n, run_cfg.d, rng,
                                   max_attempts=cfg['regular_max_attempts'])
    else:
        p_edge = run_cfg.p_edge
        if p_edge is None:
            p_edge = graphs.sparse_edge_probability(run_cfg.n)
        g = graphs.gen_erdos_renyi(run_cfg.n, p_edge, rng)
        if run_cfg.largest_component:
            g = graphs.largest_component(g)

    result = {'n': g.n, 'm': g.m, 'degrees': sorted(set(g.degrees()))}
    if run_cfg.target_cmax is not None:
        result['maxcut'] = run_cfg.target_cmax

    path = config.resolve_output_path(cfg, run_cfg.output or _DEFAULT_OUTPUT['gen-graph'])
    graphs.write_edge_list(g, path)
    # The edge-list format has no room for metadata; config and seeds go alongside
    sidecar = path.with_name(path.name + '.json')
    seeds = {'root': run_cfg.seed, 'stream': 'gen-graph'}
    reports.write_structured(sidecar, reports.document(
        run_cfg.command, run_cfg.to_dict(), seeds, result))
    extra = f', maxcut={run_cfg.target_cmax}' if run_cfg.target_cmax is not None else ''
    return result, seeds, None, f'Saved: {path} (n={g.n}, m={g.m}{extra})'


def _cmd_maxcut(run_cfg, cfg, verbose):
    g = _load_graph(run_cfg)
    cmax, witness = graphs.brute_force_maxcut(g, cap=config.get_brute_force_cap(cfg))
    result = {'n': g.n, 'm': g.m, 'maxcut': cmax, 'witness': witness}
    return result, {}, None, f'MaxCut = {cmax}  (witness {witness})'


def _cmd_census(run_cfg, cfg, verbose):
    if run_cfg.trend:
        sizes = run_cfg.sizes or [100, 1000]
        samples = run_cfg.samples or 20
        frame = experiments.census_trend(cfg, sizes, samples, run_cfg.seed,
                                         threads=run_cfg.threads)
        if verbose:
            print(frame.to_string(index=False))
        result = {'trend': frame.to_dict(orient='records')}
        last = frame.iloc[-1]
        summary = (f'n={int(last["n"])}: mean f_shared0={last["mean_f_shared0"]:.4f}, '
                   f'{int(last["at_threshold"])}/{samples} at >= 0.97')
        return result, {'root': run_cfg.seed}, frame, summary

    g = _load_graph(run_cfg)
    census = graphs.census_p1(g)
    result = census.to_dict()
    frame = pd.DataFrame([result])
    summary = (f'w = ({census.w_shared2}, {census.w_shared1}, {census.w_shared0})  '
               f'f_shared0 = {census.f_shared0:.4f}')
    return result, {}, frame, summary


def _cmd_neighborhood(run_cfg, cfg, verbose):
    g = _load_graph(run_cfg)
    sub, mapping = graphs.neighborhood(g, run_cfg.edge, run_cfg.radius)
    result = {
        'edge': list(g.edges[run_cfg.edge]),
        'radius': run_cfg.radius,
        'vertices': sub.n,
        'edges': sub.m,
        'is_tree': sub.m == sub.n - 1,
        'mapping': list(mapping),
        'subgraph': [list(e) for e in sub.edges],
    }
    if run_cfg.radius >= 1:
        result['tree_size'] = graphs.qaoa_tree_size(run_cfg.radius)
    tree = f' of tree size {result["tree_size"]}' if 'tree_size' in result else ''
    return result, {}, None, f'{sub.n} vertices, {sub.m} edges{tree}'


def _cmd_evaluate(run_cfg, cfg, verbose):
    g = _load_graph(run_cfg)
    angles = _load_angles(run_cfg)
    value, edge_values = qaoa_core.evaluate(g, angles, cap=config.get_simulator_cap(cfg))
    if verbose:
        for k, ((u, v), e) in enumerate(zip(g.edges, edge_values)):
            print(f'  edge {k} ({u}, {v}): {e:.10f}')
        print(f'  sum of edges: {sum(edge_values):.10f}')
    cmax, ratio = _maybe_ratio(g, value, cfg)
    result = {'objective': value, 'edge_expectations': edge_values,
              'angles': angles.to_dict(), 'maxcut': cmax, 'ratio': ratio}
    frame = pd.DataFrame({'edge': range(g.m),
                          'u': [u for u, _ in g.edges], 'v': [v for _, v in g.edges],
                          'expectation': edge_values})
    return result, {}, frame, f'F = {value:.10f}'


def _cmd_sample(run_cfg, cfg, verbose):
    g = _load_graph(run_cfg)
    angles = _load_angles(run_cfg)
    cap = config.get_simulator_cap(cfg)
    table = qaoa_core.cost_table(g, cap)
    state = qaoa_core.prepare(g, angles, table, cap)
    shots = run_cfg.shots or cfg['sample_shots']
    samples = qaoa_core.sample_bitstrings(state, rng_stream(run_cfg.seed, 'sample'), shots)
    stats = qaoa_core.sampled_cost_stats(g, samples)
    stats['objective'] = qaoa_core.expected_cost(state, table)
    summary = (f'best sampled cut {stats["best_cut"]} ({stats["best_bits"]}), '
               f'mean {stats["mean_cut"]:.4f} over {shots} shots')
    return stats, {'root': run_cfg.seed, 'stream': 'sample'}, None, summary


def _cmd_optimize(run_cfg, cfg, verbose):
    g, instance_seed = _instance_graph(run_cfg, cfg)
    search_seed = derive_seed(run_cfg.seed, 'search')
    result = optimize.multistart(
        g, run_cfg.p, run_cfg.restarts, run_cfg.direction, search_seed,
        tol=cfg['local_search_tol'], max_iters=cfg['local_search_max_iters'],
        step=cfg['initial_simplex_step'], threads=run_cfg.threads,
        cap=config.get_simulator_cap(cfg), verbose=verbose,
    )
    body = result.to_dict()
    cmax, ratio = _maybe_ratio(g, result.best_value, cfg)
    body.update({'n': g.n, 'm': g.m, 'maxcut': cmax, 'ratio': ratio})
    seeds = {'root': run_cfg.seed, 'instance': instance_seed, 'search': search_seed}
    frame = pd.DataFrame([{'restart': i, 'value': v}
                          for i, (_, v) in enumerate(result.restart_trace)])
    ratio_text = f', ratio {ratio:.4f}' if ratio is not None else ''
    return body, seeds, frame, f'{run_cfg.direction}: F = {result.best_value:.6f}{ratio_text}'


def _cmd_landscape(run_cfg, cfg, verbose):
    cap = config.get_simulator_cap(cfg)
    if run_cfg.graph is not None:
        instances = [(_load_graph(run_cfg), None)]
    else:
        instances = [_instance_graph(run_cfg, cfg, seed=s)
                     for s in (run_cfg.seeds or [run_cfg.seed])]
    grids = [optimize.landscape_grid(g, run_cfg.resolution, run_cfg.threads, cap)
             for g, _ in instances]

    rows = []
    for k, grid in enumerate(grids):
        for i in range(grid.shape[0]):
            for j in range(grid.shape[1]):
                rows.append({'instance': k,
                             'gamma': qaoa_core.GAMMA_PERIOD * i / run_cfg.resolution,
                             'beta': qaoa_core.BETA_PERIOD * j / run_cfg.resolution,
                             'objective': grid[i, j]})
    distance = max((optimize.landscape_distance(a, b) for a, b in combinations(grids, 2)),
                   default=0.0)
    result = {'resolution': run_cfg.resolution, 'grids': [g.tolist() for g in grids],
              'max_distance': distance,
              'grid_max': [float(g.max()) for g in grids]}
    seeds = {'root': run_cfg.seed, 'instances': [s for _, s in instances]}
    summary = (f'{len(grids)} landscape(s) at {run_cfg.resolution}x{run_cfg.resolution}, '
               f'max pairwise difference {distance:.4f}')
    return result, seeds, pd.DataFrame(rows), summary


def _cmd_leapfrog(run_cfg, cfg, verbose):
    stages = optimize.leapfrog(
        run_cfg.sizes, run_cfg.p, run_cfg.seed, run_cfg.restarts, run_cfg.refine_tol,
        eval_count=run_cfg.evals, d=run_cfg.d, tol=cfg['local_search_tol'],
        max_iters=cfg['local_search_max_iters'], threads=run_cfg.threads,
        cap=config.get_simulator_cap(cfg), brute_force_cap=config.get_brute_force_cap(cfg),
        max_attempts=cfg['regular_max_attempts'], verbose=verbose,
    )
    result = {'stages': [s.to_dict() for s in stages]}
    seeds = {'root': run_cfg.seed, 'instances': [s.instance_seed for s in stages]}
    frame = pd.DataFrame([{'size': s.size, 'transferred': s.transferred_value,
                           'refined': s.refined_value, 'mean_ratio': s.mean_ratio}
                          for s in stages])
    return result, seeds, frame, f'final stage n={stages[-1].size}: mean ratio {stages[-1].mean_ratio:.4f}'


def _regime_labels(run_cfg, default):
    if not run_cfg.regimes:
        return default
    return tuple(REGIME_NAMES[name] for name in run_cfg.regimes)


def _cmd_concentration(run_cfg, cfg, verbose):
    report = experiments.concentration_table(
        cfg, run_cfg.p_list, _regime_labels(run_cfg, experiments.CONCENTRATION_REGIMES),
        run_cfg.instances, run_cfg.n, run_cfg.target_cmax, run_cfg.seed,
        run_cfg.restarts, run_cfg.threads, verbose,
    )
    frame = report.to_frame()
    if verbose:
        print(frame.to_string(index=False))
    worst = max(report.rows, key=lambda r: r.std)
    summary = f'{len(report.rows)} cells, largest std {worst.std:.4f} (p={worst.p} {worst.regime})'
    return report.to_dict(), report.seeds, frame, summary


def _cmd_correlation(run_cfg, cfg, verbose):
    found, ledger = experiments.correlation_experiment(
        cfg, run_cfg.n, run_cfg.p, _regime_labels(run_cfg, experiments.CORRELATION_REGIMES),
        run_cfg.instances, run_cfg.target_cmax, run_cfg.seed, run_cfg.restarts,
        run_cfg.threads, verbose,
    )
    frame = experiments.correlation_frame(found)
    if verbose:
        print(frame.to_string(index=False))
    largest = max(abs(r.corr) for r in found)
    return ({'reports': [r.to_dict() for r in found]}, ledger, frame,
            f'{len(found)} regimes, largest |corr| {largest:.4f}')


def _cmd_transfer(run_cfg, cfg, verbose):
    report = experiments.transfer_experiment(
        cfg, run_cfg.n_train, run_cfg.n_eval, run_cfg.p, run_cfg.restarts, run_cfg.evals,
        run_cfg.seed, run_cfg.include_training, run_cfg.threads, verbose,
    )
    summary = (f'train ratio {report.train_ratio:.4f}; n={report.n_eval} mean ratio '
               f'{report.mean_ratio:.4f} +/- {report.std_ratio:.4f}')
    return report.to_dict(), report.seeds, report.to_frame(), summary


def _cmd_bound(run_cfg, cfg, verbose):
    value = experiments.mcdiarmid_bound(run_cfg.t, run_cfg.L, run_cfg.c)
    result = {'t': run_cfg.t, 'L': run_cfg.L, 'c': run_cfg.c, 'bound': value}
    return result, {}, None, f'P(|f - E f| >= t) <= {value:.6g}'


_HANDLERS = {
    'gen-graph': _cmd_gen_graph,
    'maxcut': _cmd_maxcut,
    'census': _cmd_census,
    'neighborhood': _cmd_neighborhood,
    'evaluate': _cmd_evaluate,
    'sample': _cmd_sample,
    'optimize': _cmd_optimize,
    'landscape': _cmd_landscape,
    'leapfrog': _cmd_leapfrog,
    'concentration': _cmd_concentration,
    'correlation': _cmd_correlation,
    'transfer': _cmd_transfer,
    'bound': _cmd_bound,
}


def _exit_status(exc):
    if isinstance(exc, GenerationError):
        return EXIT_GENERATION
    if isinstance(exc, ResourceCapError):
        return EXIT_RESOURCE
    if isinstance(exc, (DegenerateVarianceError, SearchAbortError)):
        return EXIT_NUMERIC
    return EXIT_CONFIG


def run(run_cfg, cfg=None, verbose=True):
    """Validate and execute one run; return the process exit status."""
    try:
        if cfg is None:
            cfg = config.load_config()
        cfg = validate(run_cfg, cfg)
        result, seeds, frame, summary = _HANDLERS[run_cfg.command](run_cfg, cfg, verbose)
        if run_cfg.command != 'gen-graph':
            path = _write_report(run_cfg, cfg, result, seeds, frame)
            if path is not None:
                summary = f'{summary}  Saved: {path}'
        print(summary)
        return EXIT_OK
    except (ConfigError, ParameterError, GenerationError, ResourceCapError,
            DegenerateVarianceError, SearchAbortError) as exc:
        partial = getattr(exc, 'partial_report', None)
        if partial is not None:
            path = _write_report(run_cfg, cfg, partial.to_dict(), partial.seeds,
                                 partial.to_frame())
            if path is not None:
                print(f'Partial results saved: {path}')
        print(f'Error ({exc.category}): {exc}', file=sys.stderr)
        return _exit_status(exc)


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _common_parent():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--seed', type=int, default=0, metavar='INT',
                        help='Root seed (64-bit); every random stream derives from it')
    common.add_argument('--output', default=None, metavar='PATH',
                        help='Output file (relative paths resolve against '
                             f'${config.OUTPUT_DIR_ENV} or output_dir; unset uses the command name)')
    common.add_argument('--format', default='json', choices=('json', 'csv'),
                        help='Report format: structured text (json) or table (csv)')
    common.add_argument('--threads', type=int, default=None, metavar='N',
                        help='Worker threads, unset uses threads from config; results do not depend on it')
    common.add_argument('--quiet', action='store_true',
                        help='Only print the one-line summary')
    common.add_argument('--config', default=None, metavar='PATH',
                        help='Config file; unset uses qaoa_config.json next to the package')
    common.add_argument('--max-qubits', type=int, default=None, dest='max_qubits',
                        metavar='N', help='Override simulator_max_qubits')
    common.add_argument('--max-brute-force', type=int, default=None, dest='max_brute_force',
                        metavar='N', help='Override brute_force_max_vertices')
    return common


def build_parser():
    parser = argparse.ArgumentParser(
        prog='python -m qaoa_conc',
        description='QAOA MaxCut simulation and instance-concentration experiments',
    )
    sub = parser.add_subparsers(dest='command', required=True)
    common = _common_parent()
    fmt = argparse.ArgumentDefaultsHelpFormatter

    def add(name, help_text):
        return sub.add_parser(name, help=help_text, parents=[common], formatter_class=fmt)

    regimes = sorted(REGIME_NAMES)
    graph_help = 'Edge-list graph file'
    angles_help = 'Angle file, or any report holding best angles'

    # ---- gen-graph ---------------------------------------------------------
    p = add('gen-graph', 'Toss a random graph and write it as an edge list')
    p.add_argument('--n', type=int, required=True, help='Vertex count')
    p.add_argument('--d', type=int, default=3, help='Degree (regular model)')
    p.add_argument('--model', default='regular', choices=('regular', 'er'),
                   help='Random d-regular or Erdos-Renyi')
    p.add_argument('--p-edge', type=float, default=None, dest='p_edge',
                   help='Erdos-Renyi edge probability; unset uses 3/(n-1)')
    p.add_argument('--maxcut', type=int, default=None, dest='target_cmax',
                   help='Reject regular graphs until the MaxCut equals this')
    p.add_argument('--largest-component', action='store_true', dest='largest_component',
                   help='Keep only the largest connected component (er model)')

    # ---- maxcut ------------------------------------------------------------
    p = add('maxcut', 'Brute-force MaxCut of an edge-list graph')
    p.add_argument('--graph', required=True, metavar='PATH', help=graph_help)

    # ---- census ------------------------------------------------------------
    p = add('census', 'Depth-1 edge-type census of a 3-regular graph')
    p.add_argument('--graph', default=None, metavar='PATH', help=graph_help)
    p.add_argument('--trend', action='store_true',
                   help='Census random graphs at several sizes instead of one file')
    p.add_argument('--sizes', type=int, nargs='+', default=None,
                   help='Sizes for --trend; unset uses 100 1000')
    p.add_argument('--samples', type=int, default=None,
                   help='Graphs per size for --trend; unset uses 20')

    # ---- neighborhood ------------------------------------------------------
    p = add('neighborhood', 'Induced subgraph within a radius of one edge')
    p.add_argument('--graph', required=True, metavar='PATH', help=graph_help)
    p.add_argument('--edge', type=int, required=True, help='Edge label (0-based)')
    p.add_argument('--radius', type=int, required=True, help='Distance p from the edge')

    # ---- evaluate ----------------------------------------------------------
    p = add('evaluate', 'Objective and per-edge expectations at fixed angles')
    p.add_argument('--graph', required=True, metavar='PATH', help=graph_help)
    p.add_argument('--angles', required=True, metavar='PATH', help=angles_help)

    # ---- sample ------------------------------------------------------------
    p = add('sample', 'Sample bit strings from the QAOA state')
    p.add_argument('--graph', required=True, metavar='PATH', help=graph_help)
    p.add_argument('--angles', required=True, metavar='PATH', help=angles_help)
    p.add_argument('--shots', type=int, default=None,
                   help='Number of samples; unset uses sample_shots from config')

    # ---- optimize ----------------------------------------------------------
    p = add('optimize', 'Multistart Nelder-Mead search for angles')
    p.add_argument('--graph', default=None, metavar='PATH',
                   help='Graph file; unset tosses a random instance of --n')
    p.add_argument('--n', type=int, default=None, help='Vertex count of the tossed instance')
    p.add_argument('--d', type=int, default=3, help='Degree of the tossed instance')
    p.add_argument('--maxcut', type=int, default=None, dest='target_cmax',
                   help='Required MaxCut of the tossed instance')
    p.add_argument('--p', type=int, required=True, help='Circuit depth')
    p.add_argument('--restarts', type=int, default=20, help='Random starting points')
    p.add_argument('--direction', default=optimize.MAXIMIZE,
                   choices=(optimize.MAXIMIZE, optimize.MINIMIZE),
                   help='Search for the largest or smallest objective')

    # ---- landscape ---------------------------------------------------------
    p = add('landscape', 'p=1 objective on a (gamma, beta) grid')
    p.add_argument('--graph', default=None, metavar='PATH',
                   help='Graph file; unset tosses one instance per seed')
    p.add_argument('--n', type=int, default=None, help='Vertex count of tossed instances')
    p.add_argument('--d', type=int, default=3, help='Degree of tossed instances')
    p.add_argument('--seeds', type=int, nargs='+', default=None,
                   help='One random instance per seed; reports the largest difference')
    p.add_argument('--resolution', type=int, default=None,
                   help='Grid points per axis; unset uses landscape_resolution from config')

    # ---- leapfrog ----------------------------------------------------------
    p = add('leapfrog', 'Optimize small, transfer and refine at growing sizes')
    p.add_argument('--sizes', type=int, nargs='+', required=True, help='Vertex counts in order')
    p.add_argument('--p', type=int, required=True, help='Circuit depth')
    p.add_argument('--d', type=int, default=3, help='Degree')
    p.add_argument('--restarts', type=int, default=20, help='Restarts at the first size')
    p.add_argument('--refine-tol', type=float, default=1e-4, dest='refine_tol',
                   help='Simplex tolerance of the refinement at each later size')
    p.add_argument('--evals', type=int, default=None,
                   help='Fresh instances scored per stage; unset uses leapfrog_eval_count')

    # ---- concentration -----------------------------------------------------
    p = add('concentration', 'Objective mean/std over instances at fixed angles')
    p.add_argument('--p-list', type=int, nargs='+', default=[2, 3, 4, 5, 6, 7], dest='p_list',
                   help='Circuit depths, one table row each')
    p.add_argument('--regimes', nargs='+', default=None, choices=regimes,
                   help='Angle regimes; unset uses low random high')
    p.add_argument('--instances', type=int, default=25, help='Instances per cell')
    p.add_argument('--n', type=int, default=20, help='Vertex count')
    p.add_argument('--maxcut', type=int, default=26, dest='target_cmax',
                   help='Required MaxCut of every instance')
    p.add_argument('--restarts', type=int, default=10, help='Restarts when training angles')

    # ---- correlation -------------------------------------------------------
    p = add('correlation', 'Per-edge correlation estimate for each regime')
    p.add_argument('--p', type=int, default=8, help='Circuit depth')
    p.add_argument('--regimes', nargs='+', default=None, choices=regimes,
                   help='Angle regimes; unset uses all five')
    p.add_argument('--instances', type=int, default=100, help='Instances N per regime')
    p.add_argument('--n', type=int, default=20, help='Vertex count')
    p.add_argument('--maxcut', type=int, default=26, dest='target_cmax',
                   help='Required MaxCut of every instance')
    p.add_argument('--restarts', type=int, default=10, help='Restarts when training angles')

    # ---- transfer ----------------------------------------------------------
    p = add('transfer', 'Train angles at one size and score them frozen at another')
    p.add_argument('--n-train', type=int, required=True, dest='n_train',
                   help='Vertex count of the training instance')
    p.add_argument('--n-eval', type=int, required=True, dest='n_eval',
                   help='Vertex count of the scored instances')
    p.add_argument('--p', type=int, required=True, help='Circuit depth')
    p.add_argument('--restarts', type=int, default=200, help='Restarts on the training instance')
    p.add_argument('--evals', type=int, default=25, help='Instances scored with the frozen angles')
    p.add_argument('--include-training', action='store_true', dest='include_training',
                   help='Score the training instance first (needs n-eval == n-train)')

    # ---- bound -------------------------------------------------------------
    p = add('bound', 'Bounded-differences tail bound exp(-2t^2/(L c^2))')
    p.add_argument('--t', type=float, required=True, help='Deviation from the mean')
    p.add_argument('--L', type=int, required=True, dest='L', help='Number of independent inputs')
    p.add_argument('--c', type=float, required=True, help='Largest change from one input')

    # ---- run ---------------------------------------------------------------
    p = sub.add_parser('run', help='Run a saved RunConfig JSON file', formatter_class=fmt)
    p.add_argument('--file', required=True, metavar='PATH',
                   help='RunConfig JSON, e.g. the config block of an earlier report')
    p.add_argument('--config', default=None, metavar='PATH',
                   help='Config file; unset uses qaoa_config.json next to the package')
    p.add_argument('--quiet', action='store_true', help='Only print the one-line summary')

    return parser


_NON_CONFIG_ARGS = ('quiet', 'config', 'max_qubits', 'max_brute_force')


def run_config_from_args(args):
    """Turn parsed arguments into a RunConfig."""
    data = {k: v for k, v in vars(args).items() if k not in _NON_CONFIG_ARGS}
    caps = {}
    if getattr(args, 'max_qubits', None) is not None:
        caps['simulator_max_qubits'] = args.max_qubits
    if getattr(args, 'max_brute_force', None) is not None:
        caps['brute_force_max_vertices'] = args.max_brute_force
    data['caps'] = caps
    return RunConfig.from_dict(data)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        cfg = config.load_config(args.config)
        if args.command == 'run':
            with open(args.file) as f:
                run_cfg = RunConfig.from_dict(json.load(f))
        else:
            run_cfg = run_config_from_args(args)
    except (ConfigError, FileNotFoundError, json.JSONDecodeError, TypeError) as exc:
        print(f'Error (config): {exc}', file=sys.stderr)
        sys.exit(EXIT_CONFIG)

    sys.exit(run(run_cfg, cfg, verbose=not args.quiet))


if __name__ == '__main__':
    main()
