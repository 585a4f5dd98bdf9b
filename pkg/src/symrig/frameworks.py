"""Bar-joint frameworks: graphs, configurations, and rigidity linear algebra.

A framework is a graph together with a placement of its vertices in
d-dimensional space; edges act as rigid bars.  This module also hosts the
tolerance-based rank machinery (SVD based) that every other module leans on.
All matrices are dense numpy; problem sizes in this package are tiny.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

#: Environment variable holding an absolute singular-value cutoff that is used
#: whenever a rank tolerance is not passed explicitly.
RANK_TOL_ENV = "SYMRIG_TOL"

Edge = tuple[int, int]


class FrameworkError(ValueError):
    """Structurally invalid graph, configuration, or framework."""


def _env_rank_tol() -> float | None:
    raw = os.environ.get(RANK_TOL_ENV)
    if not raw:
        return None
    try:
        return float(raw)
    except ValueError as exc:
        raise FrameworkError(f"{RANK_TOL_ENV} must be a float, got {raw!r}") from exc


# ---------------------------------------------------------------------------
# core types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Graph:
    """Finite simple graph with vertices 1..n and a fixed edge order.

    The edge order is part of the object's identity: rows of the rigidity
    matrix and of every derived block follow it.
    """

    vertex_count: int
    edges: tuple[Edge, ...]

    def __init__(self, vertex_count: int, edges: Iterable[Sequence[int]]):
        n = int(vertex_count)
        if n < 1:
            raise FrameworkError("vertex_count must be positive")
        normalized: list[Edge] = []
        seen: set[Edge] = set()
        for raw in edges:
            pair = tuple(int(v) for v in raw)
            if len(pair) != 2:
                raise FrameworkError(f"edge {raw!r} is not a pair")
            i, j = min(pair), max(pair)
            if i == j:
                raise FrameworkError(f"loop edge at vertex {i}")
            if not (1 <= i and j <= n):
                raise FrameworkError(f"edge ({i}, {j}) out of range 1..{n}")
            if (i, j) in seen:
                raise FrameworkError(f"duplicate edge ({i}, {j})")
            seen.add((i, j))
            normalized.append((i, j))
        object.__setattr__(self, "vertex_count", n)
        object.__setattr__(self, "edges", tuple(normalized))

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(n, [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)])

    @property
    def n(self) -> int:
        return self.vertex_count

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @cached_property
    def edge_array(self) -> np.ndarray:
        """Edges as a read-only (m, 2) array of 0-based indices."""
        arr = np.array(self.edges, dtype=int).reshape(-1, 2) - 1
        arr.setflags(write=False)
        return arr

    @cached_property
    def edge_index(self) -> dict[frozenset, int]:
        """0-based endpoint pair -> edge position."""
        return {frozenset((i - 1, j - 1)): k for k, (i, j) in enumerate(self.edges)}

    @property
    def is_complete(self) -> bool:
        return self.edge_count == self.n * (self.n - 1) // 2


@dataclass(frozen=True, eq=False)
class Configuration:
    """Placement of n points in d-space, flattened vertex-major on demand."""

    coords: np.ndarray

    def __init__(self, coords):
        arr = np.array(coords, dtype=float)
        if arr.ndim != 2 or arr.shape[1] < 1:
            raise FrameworkError("coords must be an (n, d) array")
        if not np.all(np.isfinite(arr)):
            raise FrameworkError("coordinates must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "coords", arr)

    @classmethod
    def from_flat(cls, vec, dim: int) -> "Configuration":
        vec = np.asarray(vec, dtype=float).reshape(-1)
        if vec.size % dim:
            raise FrameworkError("flat vector length is not a multiple of dim")
        return cls(vec.reshape(-1, dim))

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def dim(self) -> int:
        return self.coords.shape[1]

    def flatten(self) -> np.ndarray:
        """Vertex-major flattening: point i occupies slots d*(i-1)..d*i-1."""
        return self.coords.reshape(-1).copy()

    @property
    def scale(self) -> float:
        if self.coords.size == 0:
            return 1.0
        return max(1.0, float(np.abs(self.coords).max()))

    @cached_property
    def affine_dim(self) -> int:
        """Dimension of the affine hull of the point set."""
        if self.n <= 1:
            return 0
        centered = self.coords - self.coords.mean(axis=0)
        return numerical_rank(centered).rank

    @property
    def spans_space(self) -> bool:
        return self.affine_dim == self.dim


@dataclass(frozen=True, eq=False)
class Framework:
    """A graph together with a configuration of its vertices.

    Coincident adjacent joints are permitted: the offending bars produce zero
    rows in the rigidity matrix and are flagged rather than rejected, so that
    degenerate intermediate states remain analyzable.
    """

    graph: Graph
    config: Configuration

    def __post_init__(self):
        if self.graph.n != self.config.n:
            raise FrameworkError(
                f"graph has {self.graph.n} vertices, configuration has {self.config.n}"
            )

    @cached_property
    def coincident_edges(self) -> tuple[int, ...]:
        """Indices of edges whose endpoints (nearly) coincide."""
        p = self.config.coords
        tol = 1e-12 * self.config.scale
        out = []
        for k, (i, j) in enumerate(self.graph.edge_array):
            if np.linalg.norm(p[i] - p[j]) <= tol:
                out.append(k)
        return tuple(out)

    @property
    def is_proper(self) -> bool:
        return not self.coincident_edges

    @property
    def dim(self) -> int:
        return self.config.dim


# ---------------------------------------------------------------------------
# rigidity operators
# ---------------------------------------------------------------------------


def edge_function(graph: Graph, config: Configuration) -> np.ndarray:
    """Vector of squared bar lengths, in the graph's fixed edge order."""
    if graph.n != config.n:
        raise FrameworkError("graph/configuration vertex counts differ")
    p = config.coords
    ea = graph.edge_array
    if ea.size == 0:
        return np.zeros(0)
    diff = p[ea[:, 0]] - p[ea[:, 1]]
    return np.einsum("ij,ij->i", diff, diff)


def rigidity_matrix(graph: Graph, config: Configuration) -> np.ndarray:
    """The m x dn rigidity matrix, equal to half the edge-function Jacobian.

    The row for edge {i, j} carries p_i - p_j in vertex block i and the
    negated difference in block j.  A coincident pair yields a zero row.
    """
    if graph.n != config.n:
        raise FrameworkError("graph/configuration vertex counts differ")
    d, n = config.dim, config.n
    p = config.coords
    r = np.zeros((graph.edge_count, d * n))
    for k, (i, j) in enumerate(graph.edge_array):
        diff = p[i] - p[j]
        r[k, d * i : d * (i + 1)] = diff
        r[k, d * j : d * (j + 1)] = -diff
    return r


@dataclass(frozen=True, eq=False)
class RigidMotionBasis:
    """Generators of the infinitesimal rigid motions at a configuration.

    ``generators`` holds d translations followed by C(d,2) rotation fields as
    columns of a (dn, k) matrix.  When the points affinely span dimension at
    least d-1 the columns are linearly independent; otherwise ``full_span``
    is False and the list may be dependent (rotations can degenerate).
    """

    generators: np.ndarray
    full_span: bool
    affine_dim: int

    @property
    def count(self) -> int:
        return self.generators.shape[1]


def rigid_motion_generators(config: Configuration) -> RigidMotionBasis:
    d, n = config.dim, config.n
    p = config.coords
    cols = []
    for a in range(d):
        t = np.zeros((n, d))
        t[:, a] = 1.0
        cols.append(t.reshape(-1))
    for a in range(d):
        for b in range(a + 1, d):
            # skew generator: e_a -> e_b, e_b -> -e_a
            u = np.zeros((n, d))
            u[:, b] = p[:, a]
            u[:, a] = -p[:, b]
            cols.append(u.reshape(-1))
    gens = np.column_stack(cols) if cols else np.zeros((d * n, 0))
    adim = config.affine_dim
    return RigidMotionBasis(gens, full_span=adim >= d - 1, affine_dim=adim)


# ---------------------------------------------------------------------------
# rank machinery
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RankReport:
    """Numerical rank of a matrix: singular values above a cutoff."""

    rank: int
    nullity: int
    singular_values: tuple[float, ...]
    tolerance_used: float

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "nullity": self.nullity,
            "singular_values": list(self.singular_values),
            "tolerance_used": self.tolerance_used,
        }


def numerical_rank(matrix, tol: float | None = None) -> RankReport:
    """Rank via SVD.

    ``tol`` is an absolute singular-value cutoff; when omitted it defaults to
    max(rows, cols) * machine epsilon * largest singular value, or to the
    value of the SYMRIG_TOL environment variable if that is set.  Explicit
    tolerances matter when ranks are compared across nearby configurations.
    """
    a = np.atleast_2d(np.asarray(matrix, dtype=float))
    if not np.all(np.isfinite(a)):
        raise FrameworkError("matrix has non-finite entries")
    m, n = a.shape
    if m == 0 or n == 0:
        return RankReport(0, n, (), 0.0 if tol is None else float(tol))
    s = np.linalg.svd(a, compute_uv=False)
    if tol is None:
        tol = _env_rank_tol()
    if tol is None:
        tol = max(m, n) * np.finfo(float).eps * float(s[0])
    rank = int(np.sum(s > tol))
    return RankReport(rank, n - rank, tuple(float(x) for x in s), float(tol))


def nullspace(matrix, tol: float | None = None) -> np.ndarray:
    """Orthonormal basis of the kernel, as columns of an (n, k) matrix."""
    a = np.atleast_2d(np.asarray(matrix, dtype=float))
    m, n = a.shape
    if n == 0:
        return np.zeros((0, 0))
    if m == 0:
        return np.eye(n)
    u, s, vt = np.linalg.svd(a, full_matrices=True)
    if tol is None:
        tol = _env_rank_tol()
    if tol is None:
        tol = max(m, n) * np.finfo(float).eps * (float(s[0]) if s.size else 0.0)
    rank = int(np.sum(s > tol))
    return vt[rank:].T.copy()


def left_nullspace(matrix, tol: float | None = None) -> np.ndarray:
    a = np.atleast_2d(np.asarray(matrix, dtype=float))
    return nullspace(a.T, tol)


def orthonormal_image(matrix, tol: float | None = None) -> np.ndarray:
    """Orthonormal basis of the column space, as columns."""
    a = np.atleast_2d(np.asarray(matrix, dtype=float))
    m, n = a.shape
    if m == 0 or n == 0:
        return np.zeros((m, 0))
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if tol is None:
        tol = _env_rank_tol()
    if tol is None:
        tol = max(m, n) * np.finfo(float).eps * (float(s[0]) if s.size else 0.0)
    rank = int(np.sum(s > tol))
    return u[:, :rank].copy()


def subspace_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Distance between equal-dimensional subspaces given orthonormal bases.

    Returns sin of the largest principal angle, computed as the norm of the
    component of one basis outside the other (stable near zero angle).
    """
    if a.shape[1] != b.shape[1]:
        return 1.0
    if a.shape[1] == 0:
        return 0.0
    residual = b - a @ (a.T @ b)
    return float(np.linalg.norm(residual, 2))


# ---------------------------------------------------------------------------
# infinitesimal rigidity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RigidityVerdict:
    rigid: bool
    report: RankReport
    required_rank: int
    reason: str

    def to_dict(self) -> dict:
        return {
            "infinitesimally_rigid": self.rigid,
            "required_rank": self.required_rank,
            "reason": self.reason,
            **self.report.to_dict(),
        }


def _affinely_independent(config: Configuration, tol: float | None = None) -> bool:
    if config.n == 1:
        return True
    diffs = config.coords[1:] - config.coords[0]
    return numerical_rank(diffs, tol).rank == config.n - 1


def infinitesimal_rigidity_test(fw: Framework, tol: float | None = None) -> RigidityVerdict:
    """Decide infinitesimal rigidity from the rank of the rigidity matrix.

    Rigid iff rank equals d*n - C(d+1, 2), or the graph is complete and the
    points are affinely independent (small complete frameworks in high
    dimension satisfy the second clause but not the first).
    """
    d, n = fw.dim, fw.graph.n
    report = numerical_rank(rigidity_matrix(fw.graph, fw.config), tol)
    required = d * n - math.comb(d + 1, 2)
    if report.rank == required:
        return RigidityVerdict(True, report, required, "full rigidity rank")
    if fw.graph.is_complete and _affinely_independent(fw.config, tol):
        return RigidityVerdict(
            True, report, required, "complete graph with affinely independent joints"
        )
    return RigidityVerdict(False, report, required, "rank deficit")
