"""Concentration, correlation and transfer experiments on random 3-regular
MaxCut instances, plus the bounded-differences tail bound.

Every driver takes the loaded config dict first (caps, search settings and
early-stopping bands come from it) and a root seed; all instance, permutation
and optimizer streams are derived from that seed and written to the report's
seed ledger.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from . import graphs, optimize, qaoa_core
from .config import get_band, get_brute_force_cap, get_simulator_cap
from .errors import (
    DegenerateVarianceError,
    GenerationError,
    ParameterError,
)
from .qaoa_core import AngleSchedule
from .streams import derive_seed, ordered_map, rng_stream


LOW = 'Low'
MED_LOW = 'Med Low'
RANDOM = 'Random'
MED_HIGH = 'Med High'
HIGH = 'High'

CONCENTRATION_REGIMES = (LOW, RANDOM, HIGH)
CORRELATION_REGIMES = (LOW, MED_LOW, RANDOM, MED_HIGH, HIGH)
REGIMES = CORRELATION_REGIMES

# Regime -> (search direction, config band name or None)
_REGIME_SEARCH = {
    LOW: (optimize.MINIMIZE, None),
    MED_LOW: (optimize.MINIMIZE, 'med_low'),
    MED_HIGH: (optimize.MAXIMIZE, 'med_high'),
    HIGH: (optimize.MAXIMIZE, None),
}


# ---------------------------------------------------------------------------
# Report types
# ---------------------------------------------------------------------------

@dataclass
class ConcentrationRow:
    p: int
    regime: str
    count: int
    mean: float
    std: float
    angles: AngleSchedule
    holdout_value: float = None
    single_sample: bool = False
    values: list = field(default_factory=list)

    def to_dict(self):
        return {
            'p': self.p,
            'regime': self.regime,
            'count': self.count,
            'mean': self.mean,
            'std': self.std,
            'single_sample': self.single_sample,
            'holdout_value': self.holdout_value,
            'angles': self.angles.to_dict(),
            'values': list(self.values),
        }


@dataclass
class ConcentrationReport:
    """Mean and spread of the objective at fixed angles, one row per (p, regime)."""

    n: int
    target_cmax: int
    rows: list = field(default_factory=list)
    seeds: dict = field(default_factory=dict)
    partial: bool = False

    def cell(self, p, regime):
        for row in self.rows:
            if row.p == p and row.regime == regime:
                return row
        raise KeyError(f'no row for p={p}, regime={regime!r}')

    def to_long_frame(self):
        return pd.DataFrame(
            [{'p': r.p, 'regime': r.regime, 'count': r.count,
              'mean': r.mean, 'std': r.std} for r in self.rows],
            columns=['p', 'regime', 'count', 'mean', 'std'],
        )

    def to_frame(self):
        """One row per p with a mean and std column per regime, regimes in run order."""
        long = self.to_long_frame()
        if long.empty:
            return pd.DataFrame(columns=['p'])
        regimes = list(dict.fromkeys(long['regime']))
        wide = long.pivot(index='p', columns='regime', values=['mean', 'std'])
        columns = [(stat, regime) for regime in regimes for stat in ('mean', 'std')]
        wide = wide[columns]
        wide.columns = [f'{regime} {stat}' for stat, regime in columns]
        return wide.reset_index()

    def to_dict(self):
        return {
            'n': self.n,
            'target_cmax': self.target_cmax,
            'partial': self.partial,
            'rows': [r.to_dict() for r in self.rows],
            'seeds': self.seeds,
        }


@dataclass
class EdgeExpectationMatrix:
    """``entries[alpha, k]``: expectation of edge label alpha on instance k."""

    entries: np.ndarray
    objectives: np.ndarray
    permutation_seeds: list = field(default_factory=list)

    @property
    def m(self):
        return self.entries.shape[0]

    @property
    def N(self):
        return self.entries.shape[1]


@dataclass
class CorrelationReport:
    regime: str
    N: int
    m: int
    f_mean: float
    f_var: float
    c_mean: float
    c_var: float
    corr: float
    angles: AngleSchedule = None

    @property
    def f_std(self):
        return math.sqrt(self.f_var)

    @property
    def corr_floor(self):
        """Smallest value the estimate can take: ``-1/(m-1)``."""
        return -1.0 / (self.m - 1)

    def to_dict(self):
        return {
            'regime': self.regime,
            'N': self.N,
            'm': self.m,
            'f_mean': self.f_mean,
            'f_var': self.f_var,
            'f_std': self.f_std,
            'c_mean': self.c_mean,
            'c_var': self.c_var,
            'corr': self.corr,
            'angles': self.angles.to_dict() if self.angles is not None else None,
        }


@dataclass
class TransferReport:
    n_train: int
    n_eval: int
    p: int
    train_ratio: float
    train_value: float
    train_cmax: int
    angles: AngleSchedule
    eval_ratios: list
    seeds: dict = field(default_factory=dict)

    @property
    def mean_ratio(self):
        return float(np.mean(self.eval_ratios))

    @property
    def std_ratio(self):
        if len(self.eval_ratios) < 2:
            return 0.0
        return float(np.std(self.eval_ratios, ddof=1))

    def to_frame(self):
        return pd.DataFrame([{
            'n_train': self.n_train, 'n_eval': self.n_eval, 'p': self.p,
            'train_ratio': self.train_ratio, 'eval_count': len(self.eval_ratios),
            'mean_ratio': self.mean_ratio, 'std_ratio': self.std_ratio,
        }])

    def to_dict(self):
        return {
            'n_train': self.n_train,
            'n_eval': self.n_eval,
            'p': self.p,
            'train_ratio': self.train_ratio,
            'train_value': self.train_value,
            'train_cmax': self.train_cmax,
            'angles': self.angles.to_dict(),
            'eval_ratios': list(self.eval_ratios),
            'mean_ratio': self.mean_ratio,
            'std_ratio': self.std_ratio,
            'seeds': self.seeds,
        }


# ---------------------------------------------------------------------------
# Instance tossing
# ---------------------------------------------------------------------------

def toss_instance(cfg, n, instance_seed, d=3, target_cmax=None):
    """One random d-regular instance from its own seed (MaxCut-filtered if asked)."""
    rng = rng_stream(instance_seed, 'graph')
    if target_cmax is None:
        return graphs.gen_regular(n, d, rng, max_attempts=cfg['regular_max_attempts'])
    return graphs.gen_regular_with_maxcut(
        n, d, target_cmax, rng, cfg['maxcut_max_tries'],
        max_attempts=cfg['regular_max_attempts'],
        brute_force_cap=get_brute_force_cap(cfg),
    )


def toss_instances(cfg, n, count, seed, tag, d=3, target_cmax=None, exclude=(),
                   threads=1):
    """``count`` instances with seeds ``derive_seed(seed, tag, k)``.

    Any instance equal to a graph in ``exclude`` (same labelled edge set) is
    skipped and the next index drawn.  Returns ``(graphs, instance_seeds)``.
    """
    excluded = {frozenset(g.edges) for g in exclude}

    def toss(k):
        s = derive_seed(seed, tag, k)
        return toss_instance(cfg, n, s, d, target_cmax), s

    out, seeds = [], []
    next_index = 0
    while len(out) < count:
        batch = range(next_index, next_index + count - len(out))
        next_index += len(batch)
        for g, s in ordered_map(toss, batch, threads):
            if frozenset(g.edges) in excluded:
                continue
            out.append(g)
            seeds.append(s)
    return out, seeds


def _sample_std(values):
    if len(values) < 2:
        return 0.0
    return float(np.std(values, ddof=1))


# ---------------------------------------------------------------------------
# Regime angles
# ---------------------------------------------------------------------------

def regime_angles(cfg, g, p, regime, seed, restarts, threads=1, verbose=False):
    """Fixed angles for one regime, found on the held-out instance ``g``.

    Low/High: minimizing/maximizing multistart.  Med Low/Med High: the same
    searches stopped on entering the configured objective band.  Random: a
    uniform draw.  Returns ``(angles, value_on_g)``.
    """
    cap = get_simulator_cap(cfg)
    if regime == RANDOM:
        angles = AngleSchedule.random(p, rng_stream(seed, 'random-angles', p))
        return angles, qaoa_core.objective(g, angles, cap=cap)
    if regime not in _REGIME_SEARCH:
        raise ParameterError(f'unknown regime {regime!r}; valid regimes: {list(REGIMES)}')

    direction, band_name = _REGIME_SEARCH[regime]
    band = get_band(cfg, band_name) if band_name else None
    result = optimize.multistart(
        g, p, restarts, direction, derive_seed(seed, f'search-{regime}', p),
        tol=cfg['local_search_tol'], max_iters=cfg['local_search_max_iters'],
        step=cfg['initial_simplex_step'], stop_band=band, threads=threads, cap=cap,
    )
    if verbose:
        print(f'  p={p} {regime}: {result.best_value:.4f} on held-out instance '
              f'({result.evaluations} evaluations)')
    return result.best_angles, result.best_value


def _objectives(cfg, graph_list, angles, threads):
    cap = get_simulator_cap(cfg)
    return ordered_map(lambda g: qaoa_core.objective(g, angles, cap=cap), graph_list, threads)


# ---------------------------------------------------------------------------
# Concentration table
# ---------------------------------------------------------------------------

def concentration_table(cfg, p_list, regimes=CONCENTRATION_REGIMES, instances_per_cell=25,
                        n=20, target_cmax=26, seed=0, restarts=10, threads=1,
                        verbose=True):
    """Objective mean and sample std over fresh instances at fixed angles.

    For each p a held-out instance supplies one angle set per regime; the
    angles are then evaluated on ``instances_per_cell`` other instances
    (shared by all regimes of that p).  A ``GenerationError`` is re-raised
    with the rows finished so far attached as ``exc.partial_report``.
    """
    if instances_per_cell < 1:
        raise ParameterError(f'instances_per_cell must be >= 1, got {instances_per_cell}')
    report = ConcentrationReport(n=n, target_cmax=target_cmax, seeds={'root': seed})

    try:
        for p in p_list:
            holdout_seed = derive_seed(seed, 'holdout', p)
            holdout = toss_instance(cfg, n, holdout_seed, target_cmax=target_cmax)
            graph_list, instance_seeds = toss_instances(
                cfg, n, instances_per_cell, seed, f'instances-p{p}',
                target_cmax=target_cmax, exclude=[holdout], threads=threads,
            )
            report.seeds[f'p{p}'] = {'holdout': holdout_seed, 'instances': instance_seeds}
            if verbose:
                print(f'[concentration] p={p}: {len(graph_list)} instances tossed')

            for regime in regimes:
                angles, held = regime_angles(cfg, holdout, p, regime, seed, restarts,
                                             threads, verbose)
                values = _objectives(cfg, graph_list, angles, threads)
                row = ConcentrationRow(
                    p=p, regime=regime, count=len(values),
                    mean=float(np.mean(values)), std=_sample_std(values),
                    angles=angles, holdout_value=float(held),
                    single_sample=len(values) == 1, values=[float(v) for v in values],
                )
                report.rows.append(row)
                if verbose:
                    print(f'[concentration] p={p} {regime}: mean={row.mean:.4f} std={row.std:.4f}')
    except GenerationError as exc:
        report.partial = True
        exc.partial_report = report
        raise
    return report


# ---------------------------------------------------------------------------
# Correlation estimate
# ---------------------------------------------------------------------------

def build_expectation_matrix(graph_list, angles, seed=0, threads=1,
                             cap=qaoa_core.DEFAULT_SIMULATOR_CAP):
    """Edge expectations of each instance after a random relabelling of its edges.

    Instance k is relabelled with stream ``(seed, 'permutation', k)`` and
    becomes column k.
    """
    if not graph_list:
        raise ParameterError('need at least one instance')
    ms = sorted({g.m for g in graph_list})
    if len(ms) != 1:
        raise ParameterError(f'all instances must have the same edge count, found {ms}')

    def column(k):
        g = graphs.permute_edge_labels(graph_list[k], rng_stream(seed, 'permutation', k))
        return qaoa_core.evaluate(g, angles, cap=cap)

    results = ordered_map(column, range(len(graph_list)), threads)
    entries = np.array([edges for _, edges in results], dtype=float).reshape(len(graph_list), ms[0]).T
    objectives = np.array([f for f, _ in results], dtype=float)
    return EdgeExpectationMatrix(entries, objectives,
                                 [derive_seed(seed, 'permutation', k) for k in range(len(graph_list))])


def correlation_stats(mat, regime=None, angles=None):
    """Estimate the common pairwise correlation of the per-edge terms.

    With ``F_k`` the column sums::

        F_mean = mean(F_k)
        F_var  = sum((F_k - F_mean)**2) / (N - 1)
        C_mean = F_mean / m
        C_var  = sum((C[a, k] - C_mean)**2) / (m*N - 1)
        corr   = (F_var / (m * C_var) - 1) / (m - 1)
    """
    entries = np.asarray(mat.entries, dtype=float)
    m, N = entries.shape
    if N < 2 or m < 2:
        raise ParameterError(f'need N >= 2 instances and m >= 2 edges, got N={N}, m={m}')
    f = entries.sum(axis=0)
    f_mean = float(f.mean())
    f_var = float(np.sum((f - f_mean) ** 2) / (N - 1))
    c_mean = f_mean / m
    c_var = float(np.sum((entries - c_mean) ** 2) / (m * N - 1))
    if np.ptp(entries) == 0.0 or c_var <= 0.0:
        raise DegenerateVarianceError(
            'per-edge expectations are all equal; the correlation is undefined'
        )
    corr = (f_var / (m * c_var) - 1.0) / (m - 1)
    return CorrelationReport(regime, N, m, f_mean, f_var, c_mean, c_var, corr, angles)


def correlation_experiment(cfg, n=20, p=8, regimes=CORRELATION_REGIMES, N=100, target_cmax=26,
                           seed=0, restarts=10, threads=1, verbose=True):
    """Correlation estimate for each regime over ``N`` fresh instances.

    Returns ``(reports, seeds)`` where ``seeds`` is the ledger of every
    instance and permutation stream used.
    """
    cap = get_simulator_cap(cfg)
    holdout_seed = derive_seed(seed, 'holdout-corr', p)
    holdout = toss_instance(cfg, n, holdout_seed, target_cmax=target_cmax)
    ledger = {'root': seed, 'holdout': holdout_seed}
    reports = []
    for regime in regimes:
        angles, _ = regime_angles(cfg, holdout, p, regime, seed, restarts, threads, verbose)
        graph_list, instance_seeds = toss_instances(
            cfg, n, N, seed, f'corr-{regime}', target_cmax=target_cmax,
            exclude=[holdout], threads=threads,
        )
        perm_seed = derive_seed(seed, f'corr-perm-{regime}')
        mat = build_expectation_matrix(graph_list, angles, perm_seed, threads, cap)
        report = correlation_stats(mat, regime, angles)
        reports.append(report)
        ledger[regime] = {'instances': instance_seeds, 'permutation': perm_seed}
        if verbose:
            print(f'[correlation] {regime}: F={report.f_mean:.4f} '
                  f'std={report.f_std:.4f} corr={report.corr:.4f}')
    return reports, ledger


def correlation_frame(reports):
    return pd.DataFrame(
        [{'regime': r.regime, 'N': r.N, 'm': r.m, 'f_mean': r.f_mean,
          'f_std': r.f_std, 'corr': r.corr} for r in reports],
        columns=['regime', 'N', 'm', 'f_mean', 'f_std', 'corr'],
    )


# ---------------------------------------------------------------------------
# Transfer
# ---------------------------------------------------------------------------

def transfer_experiment(cfg, n_train, n_eval, p, restarts, eval_count, seed=0,
                        include_training=False, threads=1, verbose=True):
    """Train angles on one small instance and score them, frozen, on fresh larger ones.

    With ``include_training`` (requires ``n_eval == n_train``) the training
    instance is the first evaluation instance.
    """
    cap = get_simulator_cap(cfg)
    brute_cap = get_brute_force_cap(cfg)
    if include_training and n_eval != n_train:
        raise ParameterError('include_training needs n_eval == n_train')

    train_seed = derive_seed(seed, 'train')
    g_train = toss_instance(cfg, n_train, train_seed)
    train_cmax, _ = graphs.brute_force_maxcut(g_train, cap=brute_cap)
    search_seed = derive_seed(seed, 'train-search')
    result = optimize.multistart(
        g_train, p, restarts, optimize.MAXIMIZE, search_seed,
        tol=cfg['local_search_tol'], max_iters=cfg['local_search_max_iters'],
        step=cfg['initial_simplex_step'], threads=threads, cap=cap,
    )
    train_ratio = qaoa_core.approximation_ratio(result.best_value, train_cmax)
    if verbose:
        print(f'[transfer] trained at n={n_train}: F={result.best_value:.4f} '
              f'cmax={train_cmax} ratio={train_ratio:.4f}')

    count = eval_count - 1 if include_training else eval_count
    eval_graphs, eval_seeds = toss_instances(cfg, n_eval, count, seed, 'transfer-eval',
                                             threads=threads)
    if include_training:
        eval_graphs = [g_train] + eval_graphs
        eval_seeds = [train_seed] + eval_seeds

    def ratio(g):
        cmax, _ = graphs.brute_force_maxcut(g, cap=brute_cap)
        return qaoa_core.approximation_ratio(
            qaoa_core.objective(g, result.best_angles, cap=cap), cmax)

    ratios = [float(r) for r in ordered_map(ratio, eval_graphs, threads)]
    report = TransferReport(
        n_train=n_train, n_eval=n_eval, p=p, train_ratio=train_ratio,
        train_value=result.best_value, train_cmax=train_cmax,
        angles=result.best_angles, eval_ratios=ratios,
        seeds={'root': seed, 'train': train_seed, 'search': search_seed,
               'eval': eval_seeds},
    )
    if verbose:
        print(f'[transfer] n={n_eval}: mean ratio={report.mean_ratio:.4f} '
              f'std={report.std_ratio:.4f} over {len(ratios)} instances')
    return report


# ---------------------------------------------------------------------------
# Bounds and census trend
# ---------------------------------------------------------------------------

def mcdiarmid_bound(t, L, c):
    """``exp(-2 t**2 / (L c**2))``, capped at 1.

    Tail bound for a function of L independent inputs that changes by at most
    ``c`` when any one input changes.
    """
    if not t >= 0:
        raise ParameterError(f't must be >= 0, got {t!r}')
    if int(L) != L or L < 1:
        raise ParameterError(f'L must be a positive integer, got {L!r}')
    if not c > 0:
        raise ParameterError(f'c must be positive, got {c!r}')
    return min(1.0, math.exp(-2.0 * t * t / (L * c * c)))


def census_trend(cfg, sizes, samples, seed=0, threshold=0.97, threads=1):
    """Depth-1 edge-type fractions of random 3-regular graphs by size.

    One row per size: mean/min/std of ``f_shared0`` and how many samples
    reached ``threshold``.
    """
    rows = []
    for n in sizes:
        def fraction(k, n=n):
            g = toss_instance(cfg, n, derive_seed(seed, f'census-{n}', k))
            return graphs.census_p1(g).f_shared0

        fractions = np.array(ordered_map(fraction, range(samples), threads))
        rows.append({
            'n': n,
            'samples': samples,
            'mean_f_shared0': float(fractions.mean()),
            'min_f_shared0': float(fractions.min()),
            'std_f_shared0': _sample_std(fractions),
            'at_threshold': int(np.sum(fractions >= threshold)),
        })
    return pd.DataFrame(rows, columns=['n', 'samples', 'mean_f_shared0', 'min_f_shared0',
                                       'std_f_shared0', 'at_threshold'])
