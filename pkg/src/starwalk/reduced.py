"""
Collapsed bases and the reduced two-step operator.

Symmetric superpositions of edge states close the dynamics in a handful of
dimensions. The matrix of the two-step operator on such a span is never
typed in by hand; :func:`derive_reduced_matrix` embeds each basis vector,
runs the full step operator and projects back, failing loudly if anything
leaks out of the span.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NotInvariantError
from .graph import center_label, outer_label
from .walk import step_operator

__all__ = [
    "ReducedBasis",
    "ReducedModel",
    "two_star_basis",
    "three_star_basis",
    "default_basis",
    "derive_reduced_matrix",
    "reduced_model",
    "project",
    "reduced_evolve",
    "INVARIANCE_TOL",
]

INVARIANCE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ReducedBasis:
    """Orthonormal vectors in the edge-state space, stored as columns."""

    labels: tuple
    vectors: np.ndarray

    @property
    def k(self):
        return len(self.labels)

    def __getitem__(self, label):
        return self.vectors[:, self.labels.index(label)]

    def gram(self):
        return self.vectors.conj().T @ self.vectors

    def embed(self, coords):
        return self.vectors @ np.asarray(coords, dtype=complex)

    def subset(self, labels):
        cols = [self.labels.index(lab) for lab in labels]
        return ReducedBasis(tuple(labels), self.vectors[:, cols])


@dataclass(frozen=True, eq=False)
class ReducedModel:
    """Two-step operator restricted to the span of ``basis``.

    ``matrix[i, j] = <psi_i | U^2 psi_j>``. ``residual`` is the largest norm
    of ``U^2 psi_j`` left outside the span.
    """

    basis: ReducedBasis
    matrix: np.ndarray
    N: int
    m: int
    t: float
    r: float
    residual: float
    power: int = 2

    @property
    def mu(self):
        return np.sqrt((self.m - 1) * (self.N - self.m))

    @property
    def nu(self):
        return np.sqrt(2 * (self.m - 1) * (self.N - 2 * self.m + 2))


def _group(graph, terms):
    """Vector with the given ``(coefficient, [(source, target), ...])`` groups.

    Each group is normalized on its own before the coefficient is applied.
    """
    v = np.zeros(graph.num_states, dtype=complex)
    for coef, pairs in terms:
        idx = [graph.index(a, b) for a, b in pairs]
        v[idx] += coef / np.sqrt(len(idx))
    return v


@lru_cache(maxsize=64)
def two_star_basis(graph):
    """The four collapsed states of the two-star chain.

    ``psi1``/``psi2`` live on the plain prongs (outgoing/ingoing), ``psi3``/
    ``psi4`` on the six path edges (ingoing/outgoing). Star-2 terms carry a
    minus sign.
    """
    if graph.stars != 2:
        raise ValueError("two_star_basis needs a two-star graph")
    N = graph.N
    A1, A2 = center_label(1), center_label(2)
    plain1 = [outer_label(1, j) for j in range(4, N + 1)]
    plain2 = [outer_label(2, j) for j in range(4, N + 1)]
    path1 = [outer_label(1, j) for j in (1, 2, 3)]
    path2 = [outer_label(2, 1), outer_label(1, 2), outer_label(1, 3)]

    def pair(coef1, coef2, star1, star2, outgoing):
        def orient(a, b):
            return (a, b) if outgoing else (b, a)

        # both halves share one normalization
        v = np.zeros(graph.num_states, dtype=complex)
        for b in star1:
            v[graph.index(*orient(A1, b))] += coef1
        for b in star2:
            v[graph.index(*orient(A2, b))] += coef2
        return v / np.sqrt(len(star1) + len(star2))

    vecs = [
        pair(1, -1, plain1, plain2, outgoing=True),
        pair(1, -1, plain1, plain2, outgoing=False),
        pair(1, -1, path1, path2, outgoing=False),
        pair(1, -1, path1, path2, outgoing=True),
    ]
    return ReducedBasis(("psi1", "psi2", "psi3", "psi4"), np.column_stack(vecs))


@lru_cache(maxsize=64)
def three_star_basis(graph):
    """The five mirror-symmetric ingoing states of the three-star chain.

    ``psi1`` plain prongs of the end stars, ``psi2`` START and END,
    ``psi3`` shared prongs seen from the end stars, ``psi4`` shared prongs
    seen from the middle star, ``psi5`` plain prongs of the middle star.
    """
    if graph.stars != 3:
        raise ValueError("three_star_basis needs a three-star graph")
    N, m = graph.N, graph.m
    A1, A2, A3 = (center_label(k) for k in (1, 2, 3))

    def into(center, star, js):
        return [(outer_label(star, j), center) for j in js]

    plain = range(m + 1, N + 1)
    shared = range(2, m + 1)
    h = 1 / np.sqrt(2)
    vecs = [
        _group(graph, [(h, into(A1, 1, plain)), (h, into(A3, 3, plain))]),
        _group(graph, [(h, into(A1, 1, [1])), (h, into(A3, 3, [1]))]),
        _group(graph, [(h, into(A1, 1, shared)), (h, into(A3, 3, shared))]),
        _group(graph, [(h, into(A2, 1, shared)), (h, into(A2, 3, shared))]),
        _group(graph, [(1.0, into(A2, 2, range(1, N - 2 * m + 3)))]),
    ]
    return ReducedBasis(
        ("psi1", "psi2", "psi3", "psi4", "psi5"), np.column_stack(vecs)
    )


def default_basis(graph):
    if graph.stars == 2:
        return two_star_basis(graph)
    return three_star_basis(graph)


def derive_reduced_matrix(graph, basis, power=2, tol=INVARIANCE_TOL):
    """Matrix of ``U**power`` on the span of ``basis``, computed from the full operator.

    Raises
    ------
    NotInvariantError
        If some ``U**power psi_j`` has a component outside the span larger
        than ``tol``.
    """
    op = step_operator(graph)
    V = basis.vectors
    W = V
    for _ in range(power):
        W = op.apply(W)
    M = V.conj().T @ W
    residual = float(np.max(np.linalg.norm(W - V @ M, axis=0)))
    if residual > tol:
        raise NotInvariantError(
            f"span of {basis.labels} is not invariant (residual {residual:.3e})",
            residual=residual,
        )
    sc = graph.scatter(center_label(1))
    return ReducedModel(
        basis=basis,
        matrix=M,
        N=graph.N,
        m=graph.m,
        t=sc.t,
        r=sc.r,
        residual=residual,
        power=power,
    )


def reduced_model(graph, labels=None):
    """Two-step model on the default basis, optionally restricted to ``labels``."""
    basis = default_basis(graph)
    if labels is not None:
        basis = basis.subset(labels)
    return derive_reduced_matrix(graph, basis)


def project(basis, state):
    """Coordinates of ``state`` in ``basis`` and the norm of what is left over."""
    state = np.asarray(state, dtype=complex)
    if state.shape[0] != basis.vectors.shape[0]:
        raise ValueError("state and basis dimensions differ")
    coords = basis.vectors.conj().T @ state
    residual = float(np.linalg.norm(state - basis.vectors @ coords))
    return coords, residual


def reduced_evolve(model, coords, n):
    """Apply the reduced matrix ``n`` times."""
    coords = np.asarray(coords, dtype=complex)
    if coords.shape[0] != model.basis.k:
        raise ValueError(f"expected {model.basis.k} coordinates")
    if n < 0:
        raise ValueError("n must be non-negative")
    return np.linalg.matrix_power(model.matrix, n) @ coords
