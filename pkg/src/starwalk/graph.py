"""
Star-chain graphs for the scattering walk.

Two families are supported: a chain of two stars joined by two shared
prong vertices, and a chain of three stars where neighbouring stars share
``m - 1`` prong vertices. Vertices are labelled ``"A<k>"`` for the center
of star ``k`` and ``"B<k>.<j>"`` for outer vertices, so that ``B1.1`` is
always START.

Directed edge states are indexed star by star. Within a star the
center-to-outer states come first, then the outer-to-center states, each
block sorted by the outer vertex label. A shared vertex contributes states
to both stars whose centers it touches.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import InvalidParameterError

__all__ = [
    "VertexKind",
    "ScatterCoefficients",
    "DirectedEdgeState",
    "StarChainGraph",
    "scatter_coefficients",
    "build_two_star",
    "build_three_star",
    "path_edges",
]


class VertexKind(enum.Enum):
    REFLECT_PLUS = "reflect_plus"
    REFLECT_MINUS = "reflect_minus"
    PASS_THROUGH = "pass_through"
    SCATTER = "scatter"


_REQUIRED_DEGREE = {
    VertexKind.REFLECT_PLUS: 1,
    VertexKind.REFLECT_MINUS: 1,
    VertexKind.PASS_THROUGH: 2,
}


@dataclass(frozen=True)
class ScatterCoefficients:
    n: int
    r: float
    t: float


@dataclass(frozen=True)
class DirectedEdgeState:
    source: str
    target: str
    index: int


def scatter_coefficients(n):
    """Reflection and transmission amplitudes of a degree-``n`` scatterer.

    The reflected amplitude enters the step operator with a minus sign, so
    a vertex maps an incoming unit amplitude to ``-r`` back along the same
    edge and ``t`` along every other edge.
    """
    if int(n) != n or n < 3:
        raise InvalidParameterError(
            f"scattering vertices need degree >= 3, got {n}"
        )
    n = int(n)
    return ScatterCoefficients(n=n, r=(n - 2) / n, t=2 / n)


def outer_label(star, j):
    return f"B{star}.{j}"


def center_label(star):
    return f"A{star}"


def _label_key(label):
    # "B3.12" -> (3, 12)
    star, j = label[1:].split(".")
    return int(star), int(j)


@dataclass(frozen=True, eq=False)
class StarChainGraph:
    """Immutable star chain with canonical directed-state indexing.

    Attributes
    ----------
    stars : int
        Number of stars in the chain (2 or 3).
    N : int
        Prongs per star; every center has degree ``N``.
    m : int
        Sharing parameter. Neighbouring stars share ``m - 1`` vertices, so the
        two-star chain has ``m = 3``.
    kinds : dict
        Behaviour of every vertex.
    adjacency : dict
        Sorted neighbour tuple of every vertex.
    states : tuple of DirectedEdgeState
        All directed edge states in index order.
    """

    stars: int
    N: int
    m: int
    kinds: dict
    adjacency: dict
    states: tuple
    start: str
    end: str
    _index: dict = field(repr=False)

    @property
    def centers(self):
        return tuple(center_label(k) for k in range(1, self.stars + 1))

    @property
    def num_states(self):
        return len(self.states)

    @cached_property
    def edges(self):
        """Undirected edges as ``(center, outer)`` pairs in first-seen index order."""
        out = []
        for s in self.states:
            if s.source.startswith("A"):
                out.append((s.source, s.target))
        return tuple(out)

    def index(self, source, target):
        try:
            return self._index[(source, target)]
        except KeyError:
            raise KeyError(f"no edge state {source}->{target}") from None

    def reverse(self, i):
        s = self.states[i]
        return self._index[(s.target, s.source)]

    def degree(self, v):
        return len(self.adjacency[v])

    def star_of_state(self, i):
        """Star whose center the state touches (1-based)."""
        s = self.states[i]
        center = s.source if s.source.startswith("A") else s.target
        return int(center[1:])

    @cached_property
    def ingoing_mask(self):
        """Boolean array, True for outer-to-center states."""
        return np.array([s.target.startswith("A") for s in self.states])

    @cached_property
    def state_stars(self):
        return np.array([self.star_of_state(i) for i in range(self.num_states)])

    def scatter(self, center):
        return scatter_coefficients(self.degree(center))


def _assemble(stars, N, m, star_prongs, kinds, start, end):
    # star_prongs: {star: [outer labels]} in any order
    adjacency = {}
    for k, prongs in star_prongs.items():
        c = center_label(k)
        adjacency[c] = tuple(sorted(prongs, key=_label_key))
        for b in prongs:
            adjacency.setdefault(b, ())
            adjacency[b] = adjacency[b] + (c,)
        kinds[c] = VertexKind.SCATTER

    states = []
    index = {}
    for k in sorted(star_prongs):
        c = center_label(k)
        for source, target in [(c, b) for b in adjacency[c]] + [
            (b, c) for b in adjacency[c]
        ]:
            index[(source, target)] = len(states)
            states.append(DirectedEdgeState(source, target, len(states)))

    graph = StarChainGraph(
        stars=stars,
        N=N,
        m=m,
        kinds=kinds,
        adjacency=adjacency,
        states=tuple(states),
        start=start,
        end=end,
        _index=index,
    )
    _check_kinds(graph)
    return graph


def _check_kinds(graph):
    for v, kind in graph.kinds.items():
        deg = graph.degree(v)
        need = _REQUIRED_DEGREE.get(kind)
        if need is not None and deg != need:
            raise AssertionError(f"{v} is {kind.name} but has degree {deg}")
        if kind is VertexKind.SCATTER and deg < 3:
            raise AssertionError(f"{v} scatters but has degree {deg}")


def build_two_star(N):
    """Two stars of ``N`` prongs sharing ``B1.2`` and ``B1.3``.

    START is ``B1.1`` and END is ``B2.1``; both reflect with phase -1.
    """
    if int(N) != N or N < 4:
        raise InvalidParameterError(f"two-star chain needs N >= 4, got {N}")
    N = int(N)
    shared = [outer_label(1, 2), outer_label(1, 3)]
    star1 = [outer_label(1, j) for j in range(1, N + 1)]
    star2 = [outer_label(2, 1)] + shared + [outer_label(2, j) for j in range(4, N + 1)]

    kinds = {}
    for b in star1 + star2:
        kinds[b] = VertexKind.REFLECT_PLUS
    for b in shared:
        kinds[b] = VertexKind.PASS_THROUGH
    start, end = outer_label(1, 1), outer_label(2, 1)
    kinds[start] = kinds[end] = VertexKind.REFLECT_MINUS
    return _assemble(2, N, 3, {1: star1, 2: star2}, kinds, start, end)


def build_three_star(N, m):
    """Three stars of ``N`` prongs; stars 1-2 and 2-3 each share ``m - 1`` vertices.

    Shared vertices are ``B1.2..B1.m`` (left) and ``B3.2..B3.m`` (right).
    The middle star keeps ``N - 2m + 2`` plain prongs ``B2.1..``, and START
    and END are ``B1.1`` and ``B3.1``.
    """
    if int(N) != N or int(m) != m:
        raise InvalidParameterError("N and m must be integers")
    N, m = int(N), int(m)
    if m < 2 or N - 2 * m + 2 < 1 or N < m + 1:
        raise InvalidParameterError(
            f"three-star chain needs m >= 2 and N > 2m - 2, got N={N}, m={m}"
        )
    left = [outer_label(1, j) for j in range(2, m + 1)]
    right = [outer_label(3, j) for j in range(2, m + 1)]
    star1 = [outer_label(1, j) for j in range(1, N + 1)]
    star3 = [outer_label(3, j) for j in range(1, N + 1)]
    star2 = left + [outer_label(2, j) for j in range(1, N - 2 * m + 3)] + right

    kinds = {}
    for b in star1 + star2 + star3:
        kinds[b] = VertexKind.REFLECT_PLUS
    for b in left + right:
        kinds[b] = VertexKind.PASS_THROUGH
    start, end = outer_label(1, 1), outer_label(3, 1)
    kinds[start] = kinds[end] = VertexKind.REFLECT_MINUS
    return _assemble(3, N, m, {1: star1, 2: star2, 3: star3}, kinds, start, end)


def path_edges(graph):
    """Undirected edges lying on some START -> END path.

    These are exactly the edges incident to START, END or a shared vertex.
    """
    special = {graph.start, graph.end}
    special.update(
        v for v, kind in graph.kinds.items() if kind is VertexKind.PASS_THROUGH
    )
    return frozenset(e for e in graph.edges if e[1] in special)
