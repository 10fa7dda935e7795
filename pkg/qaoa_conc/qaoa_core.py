"""Exact statevector simulation of the QAOA circuit for MaxCut.

Bit j of the amplitude index ``z`` is the value of qubit (vertex) j.
The cost layer is ``exp(-i gamma C)`` with ``C(z)`` the number of cut edges,
the mixer is ``prod_j exp(-i beta X_j)``, and the state after p layers is
``U(B, beta_p) U(C, gamma_p) ... U(B, beta_1) U(C, gamma_1) |s>``.

Global phase is never tracked; everything downstream works with
probabilities and expectation values.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import graphs
from .errors import ParameterError, ResourceCapError, UndefinedRatioError
from .graphs import EdgeP1Type, Graph


DEFAULT_SIMULATOR_CAP = 26

# Qubits per matrix product in the mixer layer
_MIXER_BLOCK = 3

GAMMA_PERIOD = 2 * math.pi
BETA_PERIOD = math.pi


def _reduce(x, period):
    x = float(x)
    if not math.isfinite(x):
        raise ParameterError(f'angles must be finite, got {x!r}')
    r = math.fmod(x, period)
    if r < 0:
        r += period
    if r >= period:
        r = 0.0
    return r


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AngleSchedule:
    """The 2p control angles, stored reduced (gamma mod 2pi, beta mod pi)."""

    gamma: tuple
    beta: tuple

    def __post_init__(self):
        gamma = tuple(_reduce(g, GAMMA_PERIOD) for g in self.gamma)
        beta = tuple(_reduce(b, BETA_PERIOD) for b in self.beta)
        if len(gamma) != len(beta):
            raise ParameterError(
                f'gamma and beta must have equal length, got {len(gamma)} and {len(beta)}'
            )
        if not gamma:
            raise ParameterError('an angle schedule needs p >= 1')
        object.__setattr__(self, 'gamma', gamma)
        object.__setattr__(self, 'beta', beta)

    @property
    def p(self):
        return len(self.gamma)

    @classmethod
    def zeros(cls, p):
        return cls((0.0,) * p, (0.0,) * p)

    @classmethod
    def random(cls, p, rng):
        """Uniform draw: gamma in [0, 2pi)^p, beta in [0, pi)^p."""
        gamma = rng.uniform(0.0, GAMMA_PERIOD, size=p)
        beta = rng.uniform(0.0, BETA_PERIOD, size=p)
        return cls(tuple(gamma.tolist()), tuple(beta.tolist()))

    @classmethod
    def from_vector(cls, x):
        """Build from ``[gamma_1..gamma_p, beta_1..beta_p]`` (any real values)."""
        x = [float(v) for v in x]
        if len(x) % 2:
            raise ParameterError(f'angle vector must have even length, got {len(x)}')
        p = len(x) // 2
        return cls(tuple(x[:p]), tuple(x[p:]))

    def to_vector(self):
        return np.array(self.gamma + self.beta, dtype=float)

    def to_dict(self):
        return {'p': self.p, 'gamma': list(self.gamma), 'beta': list(self.beta)}

    @classmethod
    def from_dict(cls, data):
        schedule = cls(tuple(data['gamma']), tuple(data['beta']))
        if 'p' in data and int(data['p']) != schedule.p:
            raise ParameterError(
                f'p={data["p"]} does not match {schedule.p} gamma/beta entries'
            )
        return schedule


@dataclass
class StateVector:
    """``2**n`` complex amplitudes; mutated in place by the layer functions."""

    n: int
    amplitudes: np.ndarray

    def norm(self):
        return float(np.sqrt(np.vdot(self.amplitudes, self.amplitudes).real))

    def probabilities(self):
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class CostTable:
    """``values[z]`` is the number of edges cut by basis string ``z``."""

    n: int
    m: int
    values: np.ndarray


def _check_cap(n, cap):
    if n > cap:
        raise ResourceCapError(f'statevector simulation limited to n <= {cap} qubits, got n={n}')


# ---------------------------------------------------------------------------
# Primitives
# ---------------------------------------------------------------------------

def uniform_state(n, cap=DEFAULT_SIMULATOR_CAP):
    """|s>: every amplitude ``2**(-n/2)``."""
    if n < 1:
        raise ParameterError(f'need at least one qubit, got n={n}')
    _check_cap(n, cap)
    dim = 1 << n
    return StateVector(n, np.full(dim, 1.0 / math.sqrt(dim), dtype=np.complex128))


def cost_table(g, cap=DEFAULT_SIMULATOR_CAP):
    _check_cap(g.n, cap)
    values = graphs.cut_counts(g, np.arange(1 << g.n, dtype=np.int64))
    return CostTable(g.n, g.m, values)


def apply_cost_layer(state, table, gamma):
    """Multiply amplitude z by ``exp(-i gamma C(z))`` in place."""
    if state.amplitudes.shape != table.values.shape:
        raise ParameterError(
            f'state has {state.amplitudes.size} amplitudes but cost table has {table.values.size}'
        )
    # C is integer valued, so one phase per distinct cost value suffices
    phases = np.exp(-1j * gamma * np.arange(table.m + 1))
    state.amplitudes *= phases[table.values]
    return state


def apply_mixer_layer(state, beta):
    """Apply ``exp(-i beta X_j)`` to every qubit j.

    Qubits are rotated in blocks: the lowest ``k`` index bits get the
    ``2**k``-dimensional Kronecker power of the single-qubit rotation as one
    matrix product, then the index bits are cycled down by ``k`` with a
    transpose.  After all blocks the bits have cycled ``n`` places, back to
    the original order.
    """
    c, s = math.cos(beta), math.sin(beta)
    rot = np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
    amps = state.amplitudes
    n = state.n
    done = 0
    while done < n:
        k = min(_MIXER_BLOCK, n - done)
        gate = rot
        for _ in range(k - 1):
            gate = np.kron(gate, rot)
        block = amps.reshape(-1, 1 << k) @ gate.T
        amps = np.ascontiguousarray(block.T).reshape(-1)
        done += k
    state.amplitudes = amps
    return state


def prepare(g, angles, table=None, cap=DEFAULT_SIMULATOR_CAP):
    """|gamma, beta>: p alternating cost and mixer layers on |s>.

    ``table`` may be passed in to reuse a cost table across many calls.
    """
    if table is None:
        table = cost_table(g, cap)
    state = uniform_state(g.n, cap)
    for gamma, beta in zip(angles.gamma, angles.beta):
        apply_cost_layer(state, table, gamma)
        apply_mixer_layer(state, beta)
    return state


# ---------------------------------------------------------------------------
# Expectation values
# ---------------------------------------------------------------------------

def expected_cost(state, table):
    """``sum_z |amp_z|^2 C(z)``."""
    return float(np.dot(state.probabilities(), table.values))


def edge_expectations_of_state(g, state):
    """Per-edge cut probability ``<(1 - Z_u Z_v)/2>`` in label order."""
    probs = state.probabilities()
    z = np.arange(probs.size, dtype=np.int64)
    return [float(np.dot(probs, ((z >> u) ^ (z >> v)) & 1)) for u, v in g.edges]


def objective(g, angles, table=None, cap=DEFAULT_SIMULATOR_CAP):
    """F_p(gamma, beta) = <gamma, beta| C |gamma, beta>."""
    if table is None:
        table = cost_table(g, cap)
    return expected_cost(prepare(g, angles, table, cap), table)


def edge_expectations(g, angles, table=None, cap=DEFAULT_SIMULATOR_CAP):
    return edge_expectations_of_state(g, prepare(g, angles, table, cap))


def evaluate(g, angles, table=None, cap=DEFAULT_SIMULATOR_CAP):
    """Objective and per-edge expectations from a single simulation."""
    if table is None:
        table = cost_table(g, cap)
    state = prepare(g, angles, table, cap)
    return expected_cost(state, table), edge_expectations_of_state(g, state)


def approximation_ratio(f, cmax):
    if cmax < 1:
        raise UndefinedRatioError(f'approximation ratio needs cmax >= 1, got {cmax}')
    return float(f) / cmax


# ---------------------------------------------------------------------------
# Measurement
# ---------------------------------------------------------------------------

def sample_indices(state, rng, shots):
    if shots < 1:
        raise ParameterError(f'shots must be >= 1, got {shots}')
    probs = state.probabilities()
    probs = probs / probs.sum()
    return rng.choice(probs.size, size=int(shots), p=probs)


def sample_bitstrings(state, rng, shots):
    """i.i.d. measurement outcomes; character j of each string is qubit j."""
    return [graphs.format_bits(int(z), state.n) for z in sample_indices(state, rng, shots)]


def sampled_cost_stats(g, samples):
    """Mean cut and best sampled string for a list of bit strings."""
    if not samples:
        raise ParameterError('no samples given')
    z = np.array([graphs.parse_bits(b) for b in samples], dtype=np.int64)
    cuts = graphs.cut_counts(g, z)
    best = int(np.argmax(cuts))
    return {
        'shots': len(samples),
        'mean_cut': float(cuts.mean()),
        'best_cut': int(cuts[best]),
        'best_bits': samples[best],
    }


# ---------------------------------------------------------------------------
# Depth-1 edge-type functions
# ---------------------------------------------------------------------------

# Central edge (0, 1) plus only the edges touching its endpoints; any other
# edge commutes through a depth-1 conjugation.
_P1_LOCAL_GRAPHS = {
    EdgeP1Type.SHARED_TWO: Graph.from_pairs(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]),
    EdgeP1Type.SHARED_ONE: Graph.from_pairs(5, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 4)]),
    EdgeP1Type.SHARED_ZERO: Graph.from_pairs(6, [(0, 1), (0, 2), (0, 3), (1, 4), (1, 5)]),
}


def p1_type_values(angles):
    """Edge expectation of each depth-1 edge type at the given p=1 angles."""
    if angles.p != 1:
        raise ParameterError(f'edge-type functions are defined for p=1, got p={angles.p}')
    return {
        edge_type: edge_expectations(local, angles)[0]
        for edge_type, local in _P1_LOCAL_GRAPHS.items()
    }


def objective_from_census(census, angles):
    """``sum_X w_X F_X``; equals ``objective`` on any 3-regular graph at p=1."""
    values = p1_type_values(angles)
    return sum(census.count(t) * values[t] for t in EdgeP1Type)
