"""Weighted measurement graphs and the selection-weighted Laplacian family.

A sparsification problem consists of a fixed edge set (kept no matter what),
a pool of candidate edges, and a budget K of candidates that may be retained.
Each candidate carries a nonnegative rotational concentration weight, and the
graph Laplacian is an affine function of the per-candidate selection weights:

    L(w) = L_fixed + sum_k w_k * L_k,   w in [0, 1]^m.

Everything here is immutable after construction and safe to share across
threads; the operations are pure functions.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DimensionError, FeasibilityError, GraphValidationError

__all__ = [
    "WeightedEdge",
    "SelectionVector",
    "SparsificationProblem",
    "edge_laplacian",
    "build_laplacian",
    "is_connected",
]

#: Absolute tolerance on sum(w) == K for relaxation feasibility.
BUDGET_TOL = 1e-9

#: Entries this far outside [0, 1] are treated as construction errors rather
#: than floating-point noise.
BOX_TOL = 1e-9


@dataclass(frozen=True)
class WeightedEdge:
    """Undirected edge between two 0-based node indices with weight >= 0."""

    u: int
    v: int
    weight: float

    def __post_init__(self):
        if self.u == self.v:
            raise GraphValidationError(f"self-loop edge ({self.u}, {self.v})")
        if self.u < 0 or self.v < 0:
            raise GraphValidationError(
                f"negative node index in edge ({self.u}, {self.v})"
            )
        if not math.isfinite(self.weight) or self.weight < 0:
            raise GraphValidationError(
                f"edge ({self.u}, {self.v}) has invalid weight {self.weight!r}"
            )

    @property
    def pair(self) -> tuple[int, int]:
        """Endpoints as an unordered (min, max) pair."""
        return (self.u, self.v) if self.u < self.v else (self.v, self.u)


@dataclass(frozen=True)
class SelectionVector:
    """Per-candidate selection weights, each in [0, 1].

    Fractional while the relaxation is being solved; integral selections have
    every entry exactly 0 or 1.
    """

    values: np.ndarray

    def __post_init__(self):
        arr = np.atleast_1d(np.asarray(self.values, dtype=float))
        if arr.ndim != 1:
            raise DimensionError("selection must be a 1-D vector")
        if arr.size and (arr.min() < -BOX_TOL or arr.max() > 1 + BOX_TOL):
            raise GraphValidationError(
                f"selection entries outside [0, 1]: min={arr.min()}, max={arr.max()}"
            )
        arr = np.clip(arr, 0.0, 1.0)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.size

    @property
    def integral(self) -> bool:
        """True when every entry is exactly 0 or 1."""
        v = self.values
        return bool(np.all((v == 0.0) | (v == 1.0)))

    @property
    def selected_indices(self) -> np.ndarray:
        """Indices of nonzero entries (for integral selections: the chosen edges)."""
        return np.flatnonzero(self.values)

    def require_budget(self, budget: int, tol: float = BUDGET_TOL) -> None:
        """Raise unless sum(values) == budget within ``tol``."""
        total = float(self.values.sum())
        if abs(total - budget) > tol:
            raise FeasibilityError(
                f"selection sums to {total}, expected budget {budget}"
            )

    @staticmethod
    def zeros(m: int) -> "SelectionVector":
        return SelectionVector(np.zeros(m))

    @staticmethod
    def ones(m: int) -> "SelectionVector":
        return SelectionVector(np.ones(m))

    @staticmethod
    def from_indices(indices: Iterable[int], m: int) -> "SelectionVector":
        """Indicator vector of length ``m`` with ones at ``indices``."""
        values = np.zeros(m)
        idx = np.asarray(list(indices), dtype=int)
        if idx.size:
            if idx.min() < 0 or idx.max() >= m:
                raise DimensionError(f"selection index out of range for m={m}")
            values[idx] = 1.0
        return SelectionVector(values)


class _UnionFind:
    """Array-based disjoint sets with path halving and union by size."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n
        self.count = n

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.count -= 1


def _as_weights(w, m: int) -> np.ndarray:
    """Coerce a SelectionVector or array-like to a length-m weight array."""
    values = w.values if isinstance(w, SelectionVector) else np.asarray(w, dtype=float)
    if values.ndim != 1 or values.size != m:
        raise DimensionError(
            f"selection has length {values.size}, expected {m} candidates"
        )
    return values


@dataclass(frozen=True)
class SparsificationProblem:
    """A budgeted edge-selection instance over a weighted measurement graph.

    ``fixed_edges`` are always present; exactly ``budget`` of the
    ``candidate_edges`` may be added.  Construction validates that the fixed
    and candidate pair sets are disjoint, that all indices are in range, and
    that some budget-feasible selection can connect the graph: the union of
    fixed and candidate edges must be connected, and the fixed subgraph may
    have at most ``budget + 1`` connected components.
    """

    num_nodes: int
    fixed_edges: tuple[WeightedEdge, ...]
    candidate_edges: tuple[WeightedEdge, ...]
    budget: int

    def __post_init__(self):
        object.__setattr__(self, "fixed_edges", tuple(self.fixed_edges))
        object.__setattr__(self, "candidate_edges", tuple(self.candidate_edges))
        self._validate()

    def _validate(self) -> None:
        n = self.num_nodes
        if n < 1:
            raise GraphValidationError(f"num_nodes must be positive, got {n}")
        m = len(self.candidate_edges)
        if not 0 <= self.budget <= m:
            raise GraphValidationError(
                f"budget {self.budget} outside [0, {m}] for {m} candidates"
            )
        for e in self.fixed_edges + self.candidate_edges:
            if e.u >= n or e.v >= n:
                raise GraphValidationError(
                    f"edge ({e.u}, {e.v}) references node >= num_nodes={n}"
                )
        fixed_pairs = {e.pair for e in self.fixed_edges}
        overlap = fixed_pairs & {e.pair for e in self.candidate_edges}
        if overlap:
            raise GraphValidationError(
                f"fixed and candidate edge sets share pairs: {sorted(overlap)[:5]}"
            )
        zero = [e.pair for e in self.fixed_edges + self.candidate_edges if e.weight == 0]
        if zero:
            warnings.warn(
                f"{len(zero)} zero-weight edge(s), e.g. {zero[0]}; they contribute "
                "nothing to connectivity and usually indicate an ingestion bug",
                stacklevel=3,
            )

        uf = _UnionFind(n)
        for e in self.fixed_edges:
            uf.union(e.u, e.v)
        fixed_components = uf.count
        for e in self.candidate_edges:
            uf.union(e.u, e.v)
        if uf.count > 1:
            raise FeasibilityError(
                "graph is disconnected even with every candidate edge selected "
                f"({uf.count} components)"
            )
        if fixed_components > self.budget + 1:
            raise FeasibilityError(
                f"fixed edges form {fixed_components} components; "
                f"budget {self.budget} cannot connect them"
            )

    @property
    def num_candidates(self) -> int:
        return len(self.candidate_edges)

    @cached_property
    def candidate_endpoints(self) -> tuple[np.ndarray, np.ndarray]:
        """Candidate endpoints as two int arrays (u_k, v_k)."""
        u = np.fromiter((e.u for e in self.candidate_edges), dtype=np.intp,
                        count=len(self.candidate_edges))
        v = np.fromiter((e.v for e in self.candidate_edges), dtype=np.intp,
                        count=len(self.candidate_edges))
        u.setflags(write=False)
        v.setflags(write=False)
        return u, v

    @cached_property
    def candidate_weights(self) -> np.ndarray:
        """Candidate rotational weights kappa_k."""
        w = np.fromiter((e.weight for e in self.candidate_edges), dtype=float,
                        count=len(self.candidate_edges))
        w.setflags(write=False)
        return w

    @cached_property
    def fixed_laplacian(self) -> sp.csr_array:
        """Laplacian of the fixed subgraph, cached in CSR form."""
        return _edges_laplacian(self.fixed_edges, self.num_nodes)


def _edges_laplacian(edges: Sequence[WeightedEdge], n: int) -> sp.csr_array:
    k = len(edges)
    rows = np.empty(4 * k, dtype=np.intp)
    cols = np.empty(4 * k, dtype=np.intp)
    data = np.empty(4 * k, dtype=float)
    for i, e in enumerate(edges):
        rows[4 * i : 4 * i + 4] = (e.u, e.v, e.u, e.v)
        cols[4 * i : 4 * i + 4] = (e.u, e.v, e.v, e.u)
        data[4 * i : 4 * i + 4] = (e.weight, e.weight, -e.weight, -e.weight)
    return sp.csr_array(sp.coo_array((data, (rows, cols)), shape=(n, n)))


def edge_laplacian(edge: WeightedEdge, n: int) -> sp.csr_array:
    """Laplacian of the single-edge subgraph on ``n`` nodes.

    Has ``weight`` on the two diagonal entries and ``-weight`` off-diagonal;
    positive semidefinite with zero row sums.
    """
    if edge.u >= n or edge.v >= n:
        raise GraphValidationError(
            f"edge ({edge.u}, {edge.v}) does not fit a graph on {n} nodes"
        )
    return _edges_laplacian([edge], n)


def build_laplacian(problem: SparsificationProblem, w) -> sp.csr_array:
    """Assemble L(w) = L_fixed + sum_k w_k L_k for selection weights ``w``.

    ``w`` may be a SelectionVector or any length-m array-like with entries in
    [0, 1].  The map is affine in ``w`` and the result is symmetric PSD with
    the all-ones vector in its kernel.
    """
    values = _as_weights(w, problem.num_candidates)
    n = problem.num_nodes
    u, v = problem.candidate_endpoints
    scaled = values * problem.candidate_weights
    rows = np.concatenate([u, v, u, v])
    cols = np.concatenate([u, v, v, u])
    data = np.concatenate([scaled, scaled, -scaled, -scaled])
    cand = sp.csr_array(sp.coo_array((data, (rows, cols)), shape=(n, n)))
    return problem.fixed_laplacian + cand


def is_connected(problem: SparsificationProblem, w, threshold: float = 0.0) -> bool:
    """Combinatorial connectivity of fixed edges plus candidates with w_k > threshold."""
    values = _as_weights(w, problem.num_candidates)
    uf = _UnionFind(problem.num_nodes)
    for e in problem.fixed_edges:
        uf.union(e.u, e.v)
    for k in np.flatnonzero(values > threshold):
        e = problem.candidate_edges[k]
        uf.union(e.u, e.v)
    return uf.count == 1
