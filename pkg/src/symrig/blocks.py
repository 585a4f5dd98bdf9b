"""Block-diagonalized rigidity matrices and symmetric Maxwell counting.

For a framework whose configuration is fixed by a type map, the rigidity
matrix couples each isotypic component of displacement space only to the
matching component of bar space.  The resulting diagonal blocks carry all
information about symmetric infinitesimal flexes and self-stresses; the
trivial block also drives the finite-flex certificates in ``certify``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .frameworks import (
    Framework,
    Graph,
    RankReport,
    nullspace,
    numerical_rank,
    orthonormal_image,
    rigid_motion_generators,
    rigidity_matrix,
)
from .groups import Representation, TypeMap, external_representation, internal_representation
from .irreps import (
    PROJECTOR_CUT,
    IrrepTable,
    IsotypicBasis,
    character_table,
    fixed_subspace_basis,
    isotypic_bases,
    isotypic_projector,
)

DEFAULT_OFF_BLOCK_TOL = 1e-9


class BrokenSymmetryError(ValueError):
    """The configuration does not actually have the symmetry claimed by phi."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True, eq=False)
class BlockDecomposition:
    """Rigidity matrix in symmetry-adapted coordinates.

    ``blocks[t]`` is the diagonal block coupling the t-th isotypic component
    of bar space (rows) to the t-th component of displacement space (columns).
    ``off_block_residual`` is the relative mass of the transformed matrix
    outside those blocks; for a valid symmetric framework it is numerical
    noise.
    """

    table: IrrepTable
    external: IsotypicBasis
    internal: IsotypicBasis
    blocks: tuple[np.ndarray, ...]
    off_block_residual: float
    matrix: np.ndarray
    transform_external: np.ndarray
    transform_internal: np.ndarray

    @property
    def block_shapes(self) -> tuple[tuple[int, int], ...]:
        return tuple(b.shape for b in self.blocks)

    def block_ranks(self, tol: float | None = None) -> tuple[RankReport, ...]:
        return tuple(numerical_rank(b, tol) for b in self.blocks)

    def transformed(self) -> np.ndarray:
        return self.transform_internal.T @ self.matrix @ self.transform_external


def block_diagonalize(
    fw: Framework,
    phi: TypeMap,
    off_block_tol: float = DEFAULT_OFF_BLOCK_TOL,
) -> BlockDecomposition:
    """Split the rigidity matrix into one block per irreducible character.

    Raises ``BrokenSymmetryError`` when the off-block mass exceeds
    ``off_block_tol`` relative to the matrix norm, which signals an invalid
    type map or a configuration that breaks the claimed symmetry.
    """
    table = character_table(phi.group)
    ext = isotypic_bases(external_representation(phi), table)
    inn = isotypic_bases(internal_representation(phi, fw.graph), table)
    r = rigidity_matrix(fw.graph, fw.config)

    blocks = tuple(
        inn.bases[t].T @ r @ ext.bases[t] for t in range(table.count)
    )
    t_e = ext.transform()
    t_i = inn.transform()
    transformed = t_i.T @ r @ t_e

    mask = np.ones_like(transformed, dtype=bool)
    row0 = 0
    for t in range(table.count):
        col0 = sum(ext.dims[:t])
        rows = inn.dims[t]
        cols = ext.dims[t]
        mask[row0 : row0 + rows, col0 : col0 + cols] = False
        row0 += rows
    norm = float(np.linalg.norm(r))
    off = float(np.linalg.norm(transformed[mask])) / norm if norm > 0 else 0.0
    if off > off_block_tol:
        raise BrokenSymmetryError(
            f"off-block residual {off:.3g} exceeds {off_block_tol:.3g}; "
            "the configuration breaks the claimed symmetry or phi is invalid",
            off,
        )
    return BlockDecomposition(table, ext, inn, blocks, off, r, t_e, t_i)


@dataclass(frozen=True, eq=False)
class SymmetricMotionBasis:
    """Rigid motions lying in one isotypic component of displacement space."""

    basis: np.ndarray  # (dn, k), orthonormal columns
    full_span: bool  # points affinely span dimension >= d-1

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


def symmetric_rigid_motions(fw: Framework, phi: TypeMap, index: int) -> SymmetricMotionBasis:
    """Basis of the rigid motions inside the ``index``-th isotypic component.

    Computed as the fixed space of the isotypic projector restricted to the
    span of the rigid-motion generators.  For configurations that do not
    affinely span, the generator span may underrepresent the true rigid
    motions; ``full_span`` is False in that case.
    """
    gens = rigid_motion_generators(fw.config)
    q_w = orthonormal_image(gens.generators)
    if q_w.shape[1] == 0:
        return SymmetricMotionBasis(q_w, gens.full_span)
    rep = external_representation(phi)
    table = character_table(phi.group)
    proj = isotypic_projector(rep, table, index)
    restricted = q_w.T @ proj @ q_w  # idempotent: the span is invariant
    inner = orthonormal_image(restricted, PROJECTOR_CUT)
    return SymmetricMotionBasis(q_w @ inner, gens.full_span)


@dataclass(frozen=True)
class MaxwellRow:
    """Dimension counts for one irreducible character.

    ``slack = dim_external - dim_rigid - dim_internal``; positive slack
    guarantees an infinitesimal flex with that symmetry, negative slack a
    non-zero self-stress with that symmetry.
    """

    name: str
    dim_internal: int
    dim_external: int
    dim_rigid: int

    @property
    def slack(self) -> int:
        return self.dim_external - self.dim_rigid - self.dim_internal

    def to_dict(self) -> dict:
        return {
            "irrep": self.name,
            "dim_internal": self.dim_internal,
            "dim_external": self.dim_external,
            "dim_rigid": self.dim_rigid,
            "slack": self.slack,
        }


@dataclass(frozen=True)
class MaxwellCounts:
    rows: tuple[MaxwellRow, ...]
    full_span: bool

    def row(self, name: str) -> MaxwellRow:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"full_span": self.full_span, "rows": [r.to_dict() for r in self.rows]}


def maxwell_counts(fw: Framework, phi: TypeMap) -> MaxwellCounts:
    """Per-character dimension counts of bar space, displacement space, and
    rigid motions, with the flex/self-stress slack."""
    table = character_table(phi.group)
    ext = isotypic_bases(external_representation(phi), table)
    inn = isotypic_bases(internal_representation(phi, fw.graph), table)
    rows = []
    span = True
    for t in range(table.count):
        sym = symmetric_rigid_motions(fw, phi, t)
        span = span and sym.full_span
        rows.append(
            MaxwellRow(table.characters[t].name, inn.dims[t], ext.dims[t], sym.dim)
        )
    return MaxwellCounts(tuple(rows), span)


def fully_symmetric_flexes(
    fw: Framework, phi: TypeMap, rank_tol: float | None = None
) -> np.ndarray:
    """Orthonormal basis (dn, k) of the fully symmetric infinitesimal flexes.

    These are the kernel vectors of the trivial block with the symmetric
    rigid motions projected out; an empty basis means every fully symmetric
    infinitesimal motion is a rigid motion.
    """
    dec = block_diagonalize(fw, phi)
    b1 = dec.external.bases[0]
    kern = nullspace(dec.blocks[0], rank_tol)
    if kern.shape[1] == 0:
        return np.zeros((b1.shape[0], 0))
    lifted = b1 @ kern
    w = symmetric_rigid_motions(fw, phi, 0).basis
    if w.shape[1]:
        lifted = lifted - w @ (w.T @ lifted)
    # the kernel basis is orthonormal and contains the rigid-motion space, so
    # the projected singular values are exactly 1 (flexes) or 0 (rigid); an
    # absolute cutoff avoids promoting noise when no flex remains
    return orthonormal_image(lifted, 1e-8)


def fully_symmetric_self_stresses(
    fw: Framework, phi: TypeMap, rank_tol: float | None = None
) -> np.ndarray:
    """Orthonormal basis (m, k) of the fully symmetric self-stresses.

    Left-kernel vectors of the trivial block, expressed back in bar
    coordinates.  Empty iff the trivial block has independent rows.
    """
    dec = block_diagonalize(fw, phi)
    left = nullspace(dec.blocks[0].T, rank_tol)
    return dec.internal.bases[0] @ left


def restricted_rank(
    fw: Framework,
    phi: TypeMap,
    graph_choice: str = "graph",
    rank_tol: float | None = None,
) -> RankReport:
    """Rank of the rigidity matrix restricted to the symmetric configuration space.

    ``graph_choice`` selects the framework's own graph or the complete graph
    on the same vertices.  This equals the rank of the corresponding trivial
    block but is computed without block-diagonalizing, so the two routes
    cross-check each other.
    """
    if graph_choice == "graph":
        g = fw.graph
    elif graph_choice == "complete":
        g = Graph.complete(fw.graph.n)
    else:
        raise ValueError("graph_choice must be 'graph' or 'complete'")
    b_u = fixed_subspace_basis(phi)
    return numerical_rank(rigidity_matrix(g, fw.config) @ b_u, rank_tol)
