"""Angle search: local Nelder-Mead refinement, random multistart, p=1
landscapes and the small-to-large leapfrog schedule.

Searches move through unreduced real angles; the objective is periodic in
every angle, so the simplex never sees a wrap-around.  Angles are reduced to
the canonical box when an ``AngleSchedule`` is built from the result.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import graphs, qaoa_core
from .errors import ParameterError, ResourceCapError, SearchAbortError
from .qaoa_core import AngleSchedule
from .streams import derive_seed, ordered_map, rng_stream


MAXIMIZE = 'maximize'
MINIMIZE = 'minimize'
_DIRECTIONS = (MAXIMIZE, MINIMIZE)

DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITERS = 2000
DEFAULT_STEP = 0.1


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

class CountingObjective:
    """Wrap an objective over ``AngleSchedule`` and count its calls."""

    def __init__(self, fn):
        self.fn = fn
        self.calls = 0

    def __call__(self, angles):
        self.calls += 1
        return self.fn(angles)


def graph_objective(g, cap=qaoa_core.DEFAULT_SIMULATOR_CAP):
    """Counting objective ``angles -> F_p`` for one graph (cost table cached)."""
    table = qaoa_core.cost_table(g, cap)
    return CountingObjective(lambda angles: qaoa_core.objective(g, angles, table, cap))


@dataclass
class OptimizationResult:
    """Outcome of a multistart search.

    ``restart_trace`` holds one ``(start, converged_value)`` pair per restart
    in restart order.  For a plain search ``best_value`` is the
    direction-appropriate extreme of the trace; for a banded search
    (``target_band`` set) it is the trace value closest to the band centre.
    """

    best_angles: AngleSchedule
    best_value: float
    direction: str
    evaluations: int
    restart_trace: list = field(default_factory=list)
    target_band: tuple = None

    def best_so_far(self):
        """Running best over the restart trace."""
        pick = max if self.direction == MAXIMIZE else min
        running, out = None, []
        for _, value in self.restart_trace:
            running = value if running is None else pick(running, value)
            out.append(running)
        return out

    def to_dict(self):
        return {
            'best_angles': self.best_angles.to_dict(),
            'best_value': self.best_value,
            'direction': self.direction,
            'evaluations': self.evaluations,
            'target_band': list(self.target_band) if self.target_band else None,
            'restart_trace': [
                {'start': start.to_dict(), 'value': value}
                for start, value in self.restart_trace
            ],
        }


@dataclass
class LeapfrogStage:
    size: int
    angles: AngleSchedule
    mean_ratio: float
    transferred_value: float
    refined_value: float
    instance_seed: int
    eval_ratios: list = field(default_factory=list)

    def to_dict(self):
        return {
            'size': self.size,
            'angles': self.angles.to_dict(),
            'mean_ratio': self.mean_ratio,
            'transferred_value': self.transferred_value,
            'refined_value': self.refined_value,
            'instance_seed': self.instance_seed,
            'eval_ratios': list(self.eval_ratios),
        }


class _BandReached(Exception):
    def __init__(self, x):
        super().__init__('objective entered target band')
        self.x = x


def _check_direction(direction):
    if direction not in _DIRECTIONS:
        raise ParameterError(f'direction must be one of {_DIRECTIONS}, got {direction!r}')


# ---------------------------------------------------------------------------
# Local search
# ---------------------------------------------------------------------------

def local_search(f, start, direction=MAXIMIZE, tol=DEFAULT_TOL,
                 max_iters=DEFAULT_MAX_ITERS, step=DEFAULT_STEP, stop_band=None):
    """Nelder-Mead simplex search for ``f(AngleSchedule)`` from ``start``.

    The first simplex offsets ``start`` by ``step`` radians along each of the
    2p coordinates. The search stops once the simplex values spread by less
    than ``tol``, or at the first point whose value lies in ``stop_band``.
    Returns the final angles and ``f`` re-evaluated there.
    """
    _check_direction(direction)
    if not tol > 0:
        raise ParameterError(f'tol must be positive, got {tol!r}')
    if max_iters < 1:
        raise ParameterError(f'max_iters must be >= 1, got {max_iters!r}')

    sign = -1.0 if direction == MAXIMIZE else 1.0
    x0 = start.to_vector()
    simplex = np.vstack([x0, x0 + step * np.eye(x0.size)])

    def scalar(x):
        value = f(AngleSchedule.from_vector(x))
        if not math.isfinite(value):
            raise SearchAbortError(f'objective returned {value!r} at angles {list(x)}')
        if stop_band is not None and stop_band[0] <= value <= stop_band[1]:
            raise _BandReached(np.array(x, copy=True))
        return sign * value

    try:
        res = minimize(
            scalar, x0, method='Nelder-Mead',
            options={
                'initial_simplex': simplex,
                'maxiter': int(max_iters),
                'xatol': np.inf,
                'fatol': float(tol),
                'adaptive': False,
            },
        )
        x = res.x
    except _BandReached as hit:
        x = hit.x

    angles = AngleSchedule.from_vector(x)
    return angles, float(f(angles))


# ---------------------------------------------------------------------------
# Multistart
# ---------------------------------------------------------------------------

def _closest_to_band(values, band):
    centre = 0.5 * (band[0] + band[1])
    return min(range(len(values)), key=lambda i: (abs(values[i] - centre), i))


def multistart(g, p, restarts, direction, seed, tol=DEFAULT_TOL,
               max_iters=DEFAULT_MAX_ITERS, step=DEFAULT_STEP, stop_band=None,
               threads=1, cap=qaoa_core.DEFAULT_SIMULATOR_CAP, verbose=False):
    """Independent local searches from uniform random starts.

    Restart i draws its start from stream ``(seed, 'restart', i)``, so the
    result does not depend on ``threads``.  The winner is the
    direction-appropriate best, lowest restart index on ties.  With
    ``stop_band`` every search stops on entering the band and the winner is
    the restart closest to the band centre.
    """
    _check_direction(direction)
    if restarts < 1:
        raise ParameterError(f'restarts must be >= 1, got {restarts}')
    table = qaoa_core.cost_table(g, cap)

    def run(i):
        start = AngleSchedule.random(p, rng_stream(seed, 'restart', i))
        f = CountingObjective(lambda angles: qaoa_core.objective(g, angles, table, cap))
        angles, value = local_search(f, start, direction, tol, max_iters, step, stop_band)
        if verbose:
            print(f'  restart {i}: {direction} -> {value:.6f} ({f.calls} evaluations)')
        return start, angles, value, f.calls

    runs = ordered_map(run, range(restarts), threads)
    values = [value for _, _, value, _ in runs]
    if stop_band is not None:
        best = _closest_to_band(values, stop_band)
    elif direction == MAXIMIZE:
        best = min(range(restarts), key=lambda i: (-values[i], i))
    else:
        best = min(range(restarts), key=lambda i: (values[i], i))

    return OptimizationResult(
        best_angles=runs[best][1],
        best_value=values[best],
        direction=direction,
        evaluations=sum(calls for _, _, _, calls in runs),
        restart_trace=[(start, value) for start, _, value, _ in runs],
        target_band=tuple(stop_band) if stop_band is not None else None,
    )


# ---------------------------------------------------------------------------
# Landscapes
# ---------------------------------------------------------------------------

def landscape_grid(g, resolution, threads=1, cap=qaoa_core.DEFAULT_SIMULATOR_CAP):
    """p=1 objective on a ``resolution x resolution`` grid.

    Row i is ``gamma = 2*pi*i/resolution``, column j is
    ``beta = pi*j/resolution``.
    """
    if resolution < 2:
        raise ParameterError(f'resolution must be >= 2, got {resolution}')
    table = qaoa_core.cost_table(g, cap)
    gammas = [qaoa_core.GAMMA_PERIOD * i / resolution for i in range(resolution)]
    betas = [qaoa_core.BETA_PERIOD * j / resolution for j in range(resolution)]

    def row(gamma):
        return [qaoa_core.objective(g, AngleSchedule((gamma,), (beta,)), table, cap)
                for beta in betas]

    return np.array(ordered_map(row, gammas, threads), dtype=float)


def landscape_distance(grid_a, grid_b):
    """Largest entrywise difference between two landscapes of equal shape."""
    grid_a, grid_b = np.asarray(grid_a), np.asarray(grid_b)
    if grid_a.shape != grid_b.shape:
        raise ParameterError(f'landscape shapes differ: {grid_a.shape} vs {grid_b.shape}')
    return float(np.max(np.abs(grid_a - grid_b)))


# ---------------------------------------------------------------------------
# Leapfrog
# ---------------------------------------------------------------------------

def _stage_ratios(angles, size, d, eval_count, seed, stage, threads, cap,
                  brute_force_cap, max_attempts):
    def ratio(k):
        rng = rng_stream(seed, f'leapfrog-eval-{stage}', k)
        g = graphs.gen_regular(size, d, rng, max_attempts=max_attempts)
        cmax, _ = graphs.brute_force_maxcut(g, cap=brute_force_cap)
        return qaoa_core.approximation_ratio(qaoa_core.objective(g, angles, cap=cap), cmax)

    return ordered_map(ratio, range(eval_count), threads)


def leapfrog(sizes, p, seed, per_stage_restarts, refine_tol, eval_count=25, d=3,
             tol=DEFAULT_TOL, max_iters=DEFAULT_MAX_ITERS, threads=1,
             cap=qaoa_core.DEFAULT_SIMULATOR_CAP,
             brute_force_cap=graphs.DEFAULT_BRUTE_FORCE_CAP,
             max_attempts=graphs.DEFAULT_REGULAR_MAX_ATTEMPTS, verbose=False):
    """Optimize at the smallest size, then carry the angles up through ``sizes``.

    Stage 0 runs a maximizing multistart on a random instance of
    ``sizes[0]``.  Every later stage tosses a fresh instance, records the
    objective of the carried angles there, and refines them with one local
    search.  Each stage reports the mean approximation ratio of its angles on
    ``eval_count`` fresh instances.
    """
    sizes = [int(s) for s in sizes]
    if not sizes:
        raise ParameterError('leapfrog needs at least one size')
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ParameterError(f'sizes must be strictly increasing, got {sizes}')
    too_big = [s for s in sizes if s > min(cap, brute_force_cap)]
    if too_big:
        raise ResourceCapError(
            f'leapfrog sizes {too_big} exceed the simulator/brute-force cap '
            f'{min(cap, brute_force_cap)}'
        )

    stages = []
    angles = None
    for stage, size in enumerate(sizes):
        instance_seed = derive_seed(seed, 'leapfrog-instance', stage)
        g = graphs.gen_regular(size, d, rng_stream(instance_seed, 'graph'),
                               max_attempts=max_attempts)
        if stage == 0:
            result = multistart(
                g, p, per_stage_restarts, MAXIMIZE, derive_seed(seed, 'leapfrog-search'),
                tol=tol, max_iters=max_iters, threads=threads, cap=cap,
            )
            angles = result.best_angles
            transferred = refined = result.best_value
        else:
            f = graph_objective(g, cap)
            transferred = f(angles)
            angles, refined = local_search(f, angles, MAXIMIZE, refine_tol, max_iters)

        ratios = _stage_ratios(angles, size, d, eval_count, seed, stage, threads,
                               cap, brute_force_cap, max_attempts)
        mean_ratio = float(np.mean(ratios)) if ratios else float('nan')
        if verbose:
            print(f'[leapfrog] n={size}: transferred={transferred:.4f} '
                  f'refined={refined:.4f} mean ratio={mean_ratio:.4f}')
        stages.append(LeapfrogStage(size, angles, mean_ratio, transferred, refined,
                                    instance_seed, [float(r) for r in ratios]))
    return stages
