"""Real irreducible characters, isotypic projectors, and invariant bases.

Characters are kept real throughout: complex-conjugate pairs of cyclic-group
irreps are merged into a single real character of degree 2 before any
projection, so all bases come out real.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .frameworks import nullspace, numerical_rank, orthonormal_image, subspace_distance
from .groups import (
    GroupError,
    Representation,
    SymmetryGroup,
    TypeMap,
    external_representation,
    symmetry_equation_matrices,
)

#: Singular-value cutoff used when extracting the image of an (orthogonal)
#: projector; projector spectra are {0, 1} so anything near 0.5 is safe.
PROJECTOR_CUT = 0.5


@dataclass(frozen=True)
class IrrepCharacter:
    """One real irreducible character.

    ``degree`` is the value at the identity.  ``projector_weight`` is the
    scalar in front of the group average in the isotypic projector; it equals
    the degree for absolutely irreducible characters and 1 for characters
    obtained by merging a complex-conjugate pair (``merged_pair`` True).
    """

    name: str
    degree: int
    values: tuple[float, ...]
    projector_weight: float
    merged_pair: bool = False


@dataclass(frozen=True)
class IrrepTable:
    """All real irreducible characters of a group, trivial character first."""

    group: SymmetryGroup
    characters: tuple[IrrepCharacter, ...]

    @property
    def count(self) -> int:
        return len(self.characters)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.characters)

    def orthogonality_defect(self) -> float:
        """Max deviation from real-character orthogonality relations."""
        worst = 0.0
        size = self.group.order
        for i, ci in enumerate(self.characters):
            for j, cj in enumerate(self.characters):
                dot = float(np.dot(ci.values, cj.values))
                if i != j:
                    expect = 0.0
                else:
                    expect = size * (2.0 if ci.merged_pair else 1.0)
                worst = max(worst, abs(dot - expect))
        return worst


def character_table(group: SymmetryGroup) -> IrrepTable:
    """Real character table for C1, Cs, Cm, or Cmv."""
    elems = group.elements
    m = group.rot_order

    def rot_ref(rot_val, ref_val):
        return tuple(rot_val(e.power) if e.kind == "rot" else ref_val(e.power) for e in elems)

    chars: list[IrrepCharacter] = []
    if group.kind == "C1":
        chars.append(IrrepCharacter("A", 1, (1.0,), 1.0))
    elif group.kind == "Cs":
        chars.append(IrrepCharacter("A'", 1, rot_ref(lambda k: 1.0, lambda k: 1.0), 1.0))
        chars.append(IrrepCharacter("A''", 1, rot_ref(lambda k: 1.0, lambda k: -1.0), 1.0))
    elif group.kind == "Cm":
        chars.append(IrrepCharacter("A", 1, tuple(1.0 for _ in elems), 1.0))
        if m % 2 == 0:
            chars.append(
                IrrepCharacter("B", 1, tuple(float((-1) ** e.power) for e in elems), 1.0)
            )
        for j in range(1, (m - 1) // 2 + 1):
            if 2 * j == m:
                continue
            vals = tuple(2.0 * math.cos(2.0 * math.pi * j * e.power / m) for e in elems)
            chars.append(IrrepCharacter(f"E{j}", 2, vals, 1.0, merged_pair=True))
    elif group.kind == "Cmv":
        chars.append(IrrepCharacter("A1", 1, rot_ref(lambda k: 1.0, lambda k: 1.0), 1.0))
        chars.append(IrrepCharacter("A2", 1, rot_ref(lambda k: 1.0, lambda k: -1.0), 1.0))
        if m % 2 == 0:
            chars.append(
                IrrepCharacter(
                    "B1", 1, rot_ref(lambda k: float((-1) ** k), lambda k: float((-1) ** k)), 1.0
                )
            )
            chars.append(
                IrrepCharacter(
                    "B2",
                    1,
                    rot_ref(lambda k: float((-1) ** k), lambda k: float((-1) ** (k + 1))),
                    1.0,
                )
            )
        for j in range(1, (m - 1) // 2 + 1):
            if 2 * j == m:
                continue
            vals = rot_ref(lambda k, j=j: 2.0 * math.cos(2.0 * math.pi * j * k / m), lambda k: 0.0)
            chars.append(IrrepCharacter(f"E{j}", 2, vals, 2.0))
    else:  # pragma: no cover - make_group rejects other kinds
        raise GroupError(f"no character table for kind {group.kind!r}")

    table = IrrepTable(group, tuple(chars))
    # dimension bookkeeping over the regular representation
    total = sum(
        c.degree * (c.degree if not c.merged_pair else 1) for c in chars
    )
    if total != group.order:
        raise GroupError("character table degrees do not sum to the group order")
    return table


def isotypic_projector(rep: Representation, table: IrrepTable, index: int) -> np.ndarray:
    """Projector onto the isotypic component of character ``index``.

    P = (w / |S|) * sum_x chi(x) H(x), with w the character's projector
    weight.  The result is a real orthogonal projector.
    """
    char = table.characters[index]
    size = rep.group.order
    p = np.zeros((rep.degree, rep.degree))
    for val, mat in zip(char.values, rep.matrices):
        if val:
            p += val * mat
    return (char.projector_weight / size) * p


@dataclass(frozen=True, eq=False)
class IsotypicBasis:
    """Orthonormal bases of the isotypic components of a representation.

    ``bases[t]`` is an (ambient, dim_t) column basis; dims sum to the ambient
    dimension and the components are pairwise orthogonal.
    """

    table: IrrepTable
    bases: tuple[np.ndarray, ...]
    dims: tuple[int, ...]
    multiplicities: tuple[int, ...]
    ambient: int

    def transform(self) -> np.ndarray:
        """Orthogonal change of basis with isotypic blocks as column groups."""
        if self.ambient == 0:
            return np.zeros((0, 0))
        return np.hstack([b for b in self.bases]) if self.bases else np.eye(self.ambient)


def isotypic_bases(rep: Representation, table: IrrepTable | None = None) -> IsotypicBasis:
    """Split the representation space into isotypic components."""
    if table is None:
        table = character_table(rep.group)
    bases = []
    dims = []
    mults = []
    for t in range(table.count):
        proj = isotypic_projector(rep, table, t)
        basis = orthonormal_image(proj, PROJECTOR_CUT)
        dim = basis.shape[1]
        degree = table.characters[t].degree
        if dim % degree:
            raise GroupError(
                f"isotypic component {table.characters[t].name} has dimension {dim}, "
                f"not a multiple of the character degree {degree}"
            )
        bases.append(basis)
        dims.append(dim)
        mults.append(dim // degree)
    if sum(dims) != rep.degree:
        raise GroupError(
            f"isotypic dimensions {dims} do not sum to the ambient dimension {rep.degree}"
        )
    return IsotypicBasis(table, tuple(bases), tuple(dims), tuple(mults), rep.degree)


def fixed_subspace_basis(phi: TypeMap, cross_check_tol: float = 1e-9) -> np.ndarray:
    """Orthonormal basis of the space of configurations with the symmetry of phi.

    Computed as the joint kernel of the per-element symmetry constraints and
    cross-checked against the trivial isotypic component of the external
    representation; the two routes must agree to ``cross_check_tol``.
    """
    d = phi.group.dim
    n = phi.vertex_count
    constraints = [
        mat
        for mat, e in zip(symmetry_equation_matrices(phi), phi.group.elements)
        if not e.is_identity
    ]
    if not constraints:
        basis = np.eye(d * n)
    else:
        basis = nullspace(np.vstack(constraints))

    rep = external_representation(phi)
    table = character_table(phi.group)
    trivial = orthonormal_image(isotypic_projector(rep, table, 0), PROJECTOR_CUT)
    dist = subspace_distance(basis, trivial)
    if dist > cross_check_tol:
        raise GroupError(
            f"fixed-subspace routes disagree (principal-angle distance {dist:.3g})"
        )
    return basis
