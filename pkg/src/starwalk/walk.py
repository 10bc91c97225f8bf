"""
Full-basis simulation of the scattering walk.

The step operator is assembled once per graph. Leaf and pass-through
vertices act as a signed permutation on the center-to-outer states. Each
center of degree ``n`` acts on its incoming states ``x`` as
``(2/n) * sum(x) - x``, written onto the matching outgoing states, which is
the local rule ``-r`` reflection plus ``t`` transmission with ``r + t = 1``.
Applying it costs O(E) per step instead of the O(N^2) a dense block would.

States are plain complex numpy arrays indexed by
:attr:`StarChainGraph.states`. A 2-d array is treated as a batch of column
states.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .graph import VertexKind, path_edges

__all__ = [
    "StepOperator",
    "step_operator",
    "sparse_step_matrix",
    "step",
    "step_adjoint",
    "evolve",
    "initial_state_two_star",
    "initial_state_three_star",
    "initial_state",
    "mirror_permutation",
    "ProbabilityReading",
    "measure",
]


@dataclass(frozen=True, eq=False)
class StepOperator:
    dim: int
    # center -> outer states, and where each lands
    leaf_src: np.ndarray
    leaf_dst: np.ndarray
    leaf_phase: np.ndarray
    # outer -> center states grouped contiguously by center
    hub_in: np.ndarray
    hub_out: np.ndarray
    hub_offsets: np.ndarray
    hub_coef: np.ndarray = field(repr=False)

    def _check(self, x):
        x = np.asarray(x)
        if x.shape[0] != self.dim:
            raise ValueError(
                f"state has dimension {x.shape[0]}, graph needs {self.dim}"
            )
        return x

    def _hub(self, x):
        sums = np.add.reduceat(x, self.hub_offsets, axis=0)
        counts = np.diff(np.append(self.hub_offsets, len(self.hub_in)))
        return np.repeat(sums * self.hub_coef.reshape((-1,) + (1,) * (x.ndim - 1)),
                         counts, axis=0) - x

    def apply(self, x):
        x = self._check(x)
        y = np.empty(x.shape, dtype=complex)
        phase = self.leaf_phase.reshape((-1,) + (1,) * (x.ndim - 1))
        y[self.leaf_dst] = phase * x[self.leaf_src]
        y[self.hub_out] = self._hub(x[self.hub_in])
        return y

    def adjoint(self, y):
        y = self._check(y)
        x = np.empty(y.shape, dtype=complex)
        phase = self.leaf_phase.reshape((-1,) + (1,) * (y.ndim - 1))
        x[self.leaf_src] = np.conj(phase) * y[self.leaf_dst]
        # the center block is real symmetric
        x[self.hub_in] = self._hub(y[self.hub_out])
        return x

    __call__ = apply


@lru_cache(maxsize=64)
def step_operator(graph):
    """Assemble (and cache) the step operator of ``graph``."""
    leaf_src, leaf_dst, leaf_phase = [], [], []
    hub_in, hub_out, offsets, coef = [], [], [], []

    for center in graph.centers:
        offsets.append(len(hub_in))
        coef.append(graph.scatter(center).t)
        for b in graph.adjacency[center]:
            hub_in.append(graph.index(b, center))
            hub_out.append(graph.index(center, b))

            kind = graph.kinds[b]
            leaf_src.append(graph.index(center, b))
            if kind is VertexKind.PASS_THROUGH:
                (other,) = [c for c in graph.adjacency[b] if c != center]
                leaf_dst.append(graph.index(b, other))
                leaf_phase.append(1.0)
            else:
                leaf_dst.append(graph.index(b, center))
                leaf_phase.append(-1.0 if kind is VertexKind.REFLECT_MINUS else 1.0)

    return StepOperator(
        dim=graph.num_states,
        leaf_src=np.array(leaf_src),
        leaf_dst=np.array(leaf_dst),
        leaf_phase=np.array(leaf_phase),
        hub_in=np.array(hub_in),
        hub_out=np.array(hub_out),
        hub_offsets=np.array(offsets),
        hub_coef=np.array(coef),
    )


def sparse_step_matrix(graph):
    """Explicit sparse matrix of the step operator, built entry by entry.

    Scales as O(N^2) per star, so only meant for small graphs and for
    checking :class:`StepOperator` against the local vertex rules.
    """
    rows, cols, vals = [], [], []
    for i, s in enumerate(graph.states):
        v, came_from = s.target, s.source
        kind = graph.kinds[v]
        if kind is VertexKind.SCATTER:
            sc = graph.scatter(v)
            for w in graph.adjacency[v]:
                rows.append(graph.index(v, w))
                cols.append(i)
                vals.append(-sc.r if w == came_from else sc.t)
        elif kind is VertexKind.PASS_THROUGH:
            (w,) = [c for c in graph.adjacency[v] if c != came_from]
            rows.append(graph.index(v, w))
            cols.append(i)
            vals.append(1.0)
        else:
            rows.append(graph.index(v, came_from))
            cols.append(i)
            vals.append(-1.0 if kind is VertexKind.REFLECT_MINUS else 1.0)
    n = graph.num_states
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n), dtype=complex)


def step(graph, state):
    return step_operator(graph).apply(state)


def step_adjoint(graph, state):
    return step_operator(graph).adjoint(state)


def evolve(graph, state, steps):
    """Apply ``steps`` single steps of the walk to ``state``."""
    if steps < 0:
        raise ValueError("steps must be non-negative")
    op = step_operator(graph)
    x = np.array(op._check(state), dtype=complex)
    for _ in range(steps):
        x = op.apply(x)
    return x


def initial_state_two_star(graph):
    """Uniform ingoing state, positive on star 1 and negative on star 2."""
    if graph.stars != 2:
        raise ValueError("initial_state_two_star needs a two-star graph")
    return _signed_ingoing(graph, {1: 1.0, 2: -1.0})


def initial_state_three_star(graph):
    """Uniform ingoing state, positive on stars 1 and 3, negative on star 2."""
    if graph.stars != 3:
        raise ValueError("initial_state_three_star needs a three-star graph")
    return _signed_ingoing(graph, {1: 1.0, 2: -1.0, 3: 1.0})


def initial_state(graph):
    if graph.stars == 2:
        return initial_state_two_star(graph)
    return initial_state_three_star(graph)


def _signed_ingoing(graph, signs):
    mask = graph.ingoing_mask
    sign = np.array([signs[k] for k in graph.state_stars])
    psi = np.where(mask, sign, 0.0).astype(complex)
    return psi / np.sqrt(mask.sum())


@lru_cache(maxsize=64)
def mirror_permutation(graph):
    """Index permutation of the three-star relabelling star 1 <-> star 3."""
    if graph.stars != 3:
        raise ValueError("mirror symmetry is defined for three-star graphs")
    swap = {"1": "3", "3": "1", "2": "2"}

    def relabel(v):
        return v[0] + swap[v[1]] + v[2:]

    return np.array(
        [graph.index(relabel(s.source), relabel(s.target)) for s in graph.states]
    )


@dataclass
class ProbabilityReading:
    """Classical read-out of a walk state.

    ``edge_probabilities`` follows the order of ``graph.edges``.
    ``basis_probabilities`` maps each reduced-basis label (``"psi1"``, ...)
    to the squared overlap of the state with that basis vector.
    """

    edge_probabilities: np.ndarray
    path_probability: float
    basis_probabilities: dict

    @property
    def total(self):
        return float(self.edge_probabilities.sum())


@lru_cache(maxsize=64)
def _edge_pairs(graph):
    fwd = np.array([graph.index(a, b) for a, b in graph.edges])
    back = np.array([graph.index(b, a) for a, b in graph.edges])
    on_path = path_edges(graph)
    mask = np.array([e in on_path for e in graph.edges])
    return fwd, back, mask


def measure(graph, state, basis=None):
    """Edge, path and reduced-basis probabilities of ``state``."""
    from .reduced import default_basis

    state = np.asarray(state)
    if state.shape != (graph.num_states,):
        raise ValueError("state dimension does not match graph")
    p = np.abs(state) ** 2
    fwd, back, on_path = _edge_pairs(graph)
    edge_p = p[fwd] + p[back]
    if basis is None:
        basis = default_basis(graph)
    overlaps = basis.vectors.conj().T @ state
    return ProbabilityReading(
        edge_probabilities=edge_p,
        path_probability=float(edge_p[on_path].sum()),
        basis_probabilities={
            label: float(abs(c) ** 2) for label, c in zip(basis.labels, overlaps)
        },
    )
