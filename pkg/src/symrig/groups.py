"""Point groups acting on frameworks: elements, type maps, representations.

Supported groups are the identity-only group C1, the mirror group Cs, the
cyclic rotation group Cm, and the dihedral group Cmv, in dimensions 2 and 3.
Groups are generated from geometric parameters (rotation axis, mirror
normal), so the same graph can be analyzed under differently oriented copies
of a group.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .frameworks import Configuration, Framework, FrameworkError, Graph


class GroupError(ValueError):
    """Bad group geometry or an inconsistent type map."""


# ---------------------------------------------------------------------------
# permutations (0-based arrays; cycle notation is 1-based, "v"-prefix allowed)
# ---------------------------------------------------------------------------


def identity_perm(n: int) -> np.ndarray:
    return np.arange(n, dtype=int)


def compose_perms(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Composition a after b: (a o b)(v) = a(b(v))."""
    return a[b]


def as_perm(data, n: int) -> np.ndarray:
    """Coerce a permutation given as a cycle string or index sequence."""
    if isinstance(data, str):
        return parse_cycles(data, n)
    arr = np.asarray(data, dtype=int)
    if arr.shape != (n,) or sorted(arr.tolist()) != list(range(n)):
        raise GroupError(f"not a permutation of 0..{n - 1}: {data!r}")
    return arr.copy()


def parse_cycles(text: str, n: int) -> np.ndarray:
    """Parse cycle notation like ``(1 3)(2 4)`` or ``(v1 v3)(v2 v4)``.

    Vertex names are 1-based; fixed points may be written as singleton
    cycles or omitted.  Returns a 0-based permutation array.
    """
    perm = identity_perm(n)
    stripped = text.strip()
    if stripped in ("", "()", "id", "Id"):
        return perm
    if not re.fullmatch(r"(\s*\([^()]*\)\s*)+", stripped):
        raise GroupError(f"malformed cycle notation: {text!r}")
    touched: set[int] = set()
    for body in re.findall(r"\(([^()]*)\)", stripped):
        tokens = [t for t in re.split(r"[,\s]+", body.strip()) if t]
        cycle = []
        for tok in tokens:
            m = re.fullmatch(r"v?(\d+)", tok)
            if not m:
                raise GroupError(f"bad vertex token {tok!r} in {text!r}")
            v = int(m.group(1))
            if not 1 <= v <= n:
                raise GroupError(f"vertex {v} out of range 1..{n} in {text!r}")
            cycle.append(v - 1)
        if len(set(cycle)) != len(cycle):
            raise GroupError(f"repeated vertex inside a cycle in {text!r}")
        for v in cycle:
            if v in touched:
                raise GroupError(f"vertex {v + 1} appears in two cycles in {text!r}")
            touched.add(v)
        for k, v in enumerate(cycle):
            perm[v] = cycle[(k + 1) % len(cycle)]
    return perm


def format_cycles(perm: np.ndarray) -> str:
    """Canonical cycle notation: cycles sorted by least element, fixed points omitted."""
    n = len(perm)
    seen = [False] * n
    cycles = []
    for start in range(n):
        if seen[start]:
            continue
        cyc = [start]
        seen[start] = True
        v = int(perm[start])
        while v != start:
            cyc.append(v)
            seen[v] = True
            v = int(perm[v])
        if len(cyc) > 1:
            cycles.append(cyc)
    if not cycles:
        return "()"
    return "".join("(" + " ".join(str(v + 1) for v in c) + ")" for c in cycles)


def automorphism_violation(graph: Graph, perm: np.ndarray) -> tuple[int, int] | None:
    """First edge (1-based) whose image is not an edge, or None if perm is an automorphism."""
    idx = graph.edge_index
    for i, j in graph.edge_array:
        if frozenset((int(perm[i]), int(perm[j]))) not in idx:
            return (i + 1, j + 1)
    return None


def induced_edge_permutation(graph: Graph, perm: np.ndarray) -> np.ndarray:
    """Permutation of edge indices induced by a vertex automorphism."""
    idx = graph.edge_index
    out = np.empty(graph.edge_count, dtype=int)
    for k, (i, j) in enumerate(graph.edge_array):
        key = frozenset((int(perm[i]), int(perm[j])))
        if key not in idx:
            u, v = sorted((int(perm[i]) + 1, int(perm[j]) + 1))
            raise GroupError(
                f"permutation is not a graph automorphism: image ({u}, {v}) of "
                f"edge ({i + 1}, {j + 1}) is not an edge"
            )
        out[k] = idx[key]
    return out


# ---------------------------------------------------------------------------
# orthogonal matrices
# ---------------------------------------------------------------------------


def _snap(x: float) -> float:
    for exact in (-1.0, -0.5, 0.0, 0.5, 1.0):
        if abs(x - exact) < 1e-15:
            return exact
    return x


def _cos_sin(k: int, m: int) -> tuple[float, float]:
    ang = 2.0 * math.pi * k / m
    return _snap(math.cos(ang)), _snap(math.sin(ang))


def rotation_matrix(dim: int, k: int, m: int, axis: np.ndarray | None) -> np.ndarray:
    """Rotation by 2*pi*k/m, counterclockwise in 2D or about ``axis`` in 3D."""
    c, s = _cos_sin(k, m)
    if dim == 2:
        return np.array([[c, -s], [s, c]])
    a = np.asarray(axis, dtype=float)
    ax = a.reshape(3, 1)
    cross = np.array([[0.0, -a[2], a[1]], [a[2], 0.0, -a[0]], [-a[1], a[0], 0.0]])
    return c * np.eye(3) + s * cross + (1.0 - c) * (ax @ ax.T)


def mirror_matrix(normal: np.ndarray) -> np.ndarray:
    nu = np.asarray(normal, dtype=float).reshape(-1, 1)
    return np.eye(len(normal)) - 2.0 * (nu @ nu.T)


def _unit(vec, what: str, dim: int) -> np.ndarray:
    v = np.asarray(vec, dtype=float).reshape(-1)
    if v.shape != (dim,):
        raise GroupError(f"{what} must be a {dim}-vector")
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > 1e-9:
        raise GroupError(f"{what} must be a unit vector (norm {norm:.3g})")
    return v / norm


# ---------------------------------------------------------------------------
# group elements and groups
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GroupElement:
    """One orthogonal operation: a rotation power or a mirrored rotation.

    ``kind`` is "rot" (power k of the base rotation; k = 0 is the identity)
    or "ref" (the generator mirror composed with rotation power k).
    """

    label: str
    matrix: np.ndarray
    kind: str
    power: int

    @property
    def is_identity(self) -> bool:
        return self.kind == "rot" and self.power == 0


def _element_label(kind: str, k: int, m: int) -> str:
    if kind == "rot":
        if k == 0:
            return "Id"
        return f"C{m}" if k == 1 else f"C{m}^{k}"
    if k == 0:
        return "s"
    return f"s*C{m}" if k == 1 else f"s*C{m}^{k}"


@dataclass(frozen=True, eq=False)
class SymmetryGroup:
    """A finite orthogonal group of kind C1, Cs, Cm, or Cmv.

    Elements are canonically ordered: identity first, rotations by
    increasing power, then reflections s*C^k by increasing k.
    """

    kind: str
    dim: int
    rot_order: int
    elements: tuple[GroupElement, ...]
    axis: np.ndarray | None
    mirror_normal: np.ndarray | None

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def identity_index(self) -> int:
        return 0

    @cached_property
    def cayley(self) -> np.ndarray:
        """cayley[i, j] = index of the product element_i * element_j."""
        m = max(1, self.rot_order)
        tags = [(e.kind, e.power) for e in self.elements]
        lookup = {t: i for i, t in enumerate(tags)}
        table = np.empty((self.order, self.order), dtype=int)
        for i, (k1, a) in enumerate(tags):
            for j, (k2, b) in enumerate(tags):
                if k1 == "rot" and k2 == "rot":
                    prod = ("rot", (a + b) % m)
                elif k1 == "rot":  # C^a * s C^b = s C^(b-a)
                    prod = ("ref", (b - a) % m)
                elif k2 == "rot":  # s C^a * C^b = s C^(a+b)
                    prod = ("ref", (a + b) % m)
                else:  # s C^a * s C^b = C^(b-a)
                    prod = ("rot", (b - a) % m)
                table[i, j] = lookup[prod]
        return table

    @cached_property
    def inverse(self) -> np.ndarray:
        inv = np.empty(self.order, dtype=int)
        for i in range(self.order):
            hits = np.where(self.cayley[i] == self.identity_index)[0]
            inv[i] = hits[0]
        return inv

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(e.label for e in self.elements)

    @property
    def generator_labels(self) -> tuple[str, ...]:
        if self.kind == "C1":
            return ()
        if self.kind == "Cs":
            return ("s",)
        if self.kind == "Cm":
            return (f"C{self.rot_order}",)
        return (f"C{self.rot_order}", "s")

    def check_consistency(self, tol: float = 1e-12) -> float:
        """Max deviation from orthogonality/closure; also checks labels."""
        worst = 0.0
        mats = [e.matrix for e in self.elements]
        for e in self.elements:
            worst = max(worst, float(np.abs(e.matrix.T @ e.matrix - np.eye(self.dim)).max()))
            det = float(np.linalg.det(e.matrix))
            expected = -1.0 if e.kind == "ref" else 1.0
            if abs(det - expected) > 1e-9:
                raise GroupError(f"element {e.label} has det {det:.3g}, expected {expected}")
        for i in range(self.order):
            for j in range(self.order):
                k = self.cayley[i, j]
                worst = max(worst, float(np.abs(mats[i] @ mats[j] - mats[k]).max()))
        if worst > tol:
            raise GroupError(f"group tables inconsistent to {worst:.3g}")
        return worst


def make_group(
    kind: str,
    dim: int,
    *,
    order: int | None = None,
    axis=None,
    mirror_normal=None,
) -> SymmetryGroup:
    """Build a symmetry group from its geometric parameters.

    Cs needs ``mirror_normal``; Cm needs ``order`` (and ``axis`` in 3D);
    Cmv needs both, with the mirror containing the rotation axis in 3D.
    """
    if dim not in (2, 3):
        raise GroupError("dim must be 2 or 3")
    if kind not in ("C1", "Cs", "Cm", "Cmv"):
        raise GroupError(f"unsupported group kind {kind!r}")

    axis_v: np.ndarray | None = None
    normal_v: np.ndarray | None = None
    m = 1

    if kind in ("Cm", "Cmv"):
        if order is None or int(order) < 2:
            raise GroupError("rotation order must be an integer >= 2")
        m = int(order)
        if dim == 3:
            axis_v = _unit(axis, "rotation axis", 3)
    if kind in ("Cs", "Cmv"):
        normal_v = _unit(mirror_normal, "mirror normal", dim)
    if kind == "Cmv" and dim == 3:
        if abs(float(np.dot(axis_v, normal_v))) > 1e-9:
            raise GroupError("Cmv mirror must contain the rotation axis")

    elements: list[GroupElement] = []
    rot_powers = range(m) if kind in ("Cm", "Cmv") else range(1)
    for k in rot_powers:
        mat = rotation_matrix(dim, k, max(m, 1), axis_v) if k else np.eye(dim)
        elements.append(GroupElement(_element_label("rot", k, m), mat, "rot", k))
    if kind in ("Cs", "Cmv"):
        s_mat = mirror_matrix(normal_v)
        ref_powers = range(m) if kind == "Cmv" else range(1)
        for k in ref_powers:
            mat = s_mat @ rotation_matrix(dim, k, max(m, 1), axis_v) if k else s_mat
            elements.append(GroupElement(_element_label("ref", k, m), mat, "ref", k))

    group = SymmetryGroup(kind, dim, m, tuple(elements), axis_v, normal_v)
    group.check_consistency()
    return group


# ---------------------------------------------------------------------------
# type maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TypeMap:
    """Assignment of a vertex permutation to every group element.

    ``perms[i]`` corresponds to ``group.elements[i]``.  Construction from
    generator assignments extends along the group's word structure so the
    result is a homomorphism by construction; ``homomorphism_violations``
    re-checks it for maps supplied element by element.
    """

    group: SymmetryGroup
    vertex_count: int
    perms: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.perms) != self.group.order:
            raise GroupError("one permutation per group element required")
        if not np.array_equal(self.perms[0], identity_perm(self.vertex_count)):
            raise GroupError("the identity element must map to the identity permutation")

    @classmethod
    def from_generators(
        cls, group: SymmetryGroup, vertex_count: int, generators: Mapping[str, object]
    ) -> "TypeMap":
        n = int(vertex_count)
        needed = group.generator_labels
        given = dict(generators)
        perm_for: dict[str, np.ndarray] = {}
        for label in needed:
            if label not in given:
                raise GroupError(f"missing generator permutation for {label!r}")
            perm_for[label] = as_perm(given.pop(label), n)
        if given:
            raise GroupError(f"unknown generator labels: {sorted(given)}")

        m = group.rot_order
        rot_gen = perm_for.get(f"C{m}", identity_perm(n))
        ref_gen = perm_for.get("s")

        rot_pows = [identity_perm(n)]
        for _ in range(1, max(m, 1)):
            rot_pows.append(compose_perms(rot_gen, rot_pows[-1]))

        perms = []
        for e in group.elements:
            if e.kind == "rot":
                perms.append(rot_pows[e.power])
            else:
                perms.append(compose_perms(ref_gen, rot_pows[e.power]))
        return cls(group, n, tuple(p.copy() for p in perms))

    def perm(self, index: int) -> np.ndarray:
        return self.perms[index]

    def homomorphism_violations(self, limit: int = 5) -> list[tuple[str, str]]:
        bad = []
        cay = self.group.cayley
        for i in range(self.group.order):
            for j in range(self.group.order):
                expect = self.perms[cay[i, j]]
                got = compose_perms(self.perms[i], self.perms[j])
                if not np.array_equal(expect, got):
                    bad.append((self.group.labels[i], self.group.labels[j]))
                    if len(bad) >= limit:
                        return bad
        return bad

    def generator_cycles(self) -> dict[str, str]:
        """Generator label -> canonical cycle string (for serialization)."""
        out = {}
        lookup = {e.label: i for i, e in enumerate(self.group.elements)}
        for label in self.group.generator_labels:
            out[label] = format_cycles(self.perms[lookup[label]])
        return out


@dataclass(frozen=True)
class TypeMapReport:
    """Outcome of checking a (framework, type map) pair."""

    valid: bool
    automorphism_failures: tuple[tuple[str, tuple[int, int]], ...]
    homomorphism_failures: tuple[tuple[str, str], ...]
    max_residual: float
    tolerance: float
    residuals: tuple[tuple[float, ...], ...]  # per element, per vertex

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "automorphism_failures": [
                {"element": lab, "edge": list(edge)} for lab, edge in self.automorphism_failures
            ],
            "homomorphism_failures": [list(pair) for pair in self.homomorphism_failures],
        }


def validate_type_map(fw: Framework, phi: TypeMap, tol: float | None = None) -> TypeMapReport:
    """Check that phi consists of automorphisms, is a homomorphism, and that
    every operation carries each joint onto the image joint within tolerance.
    """
    if phi.vertex_count != fw.graph.n:
        raise GroupError("type map vertex count does not match the graph")
    if phi.group.dim != fw.dim:
        raise GroupError("group dimension does not match the configuration")
    if tol is None:
        tol = 1e-9 * fw.config.scale

    auto_fail = []
    for e, perm in zip(phi.group.elements, phi.perms):
        bad = automorphism_violation(fw.graph, perm)
        if bad is not None:
            auto_fail.append((e.label, bad))

    hom_fail = phi.homomorphism_violations()

    p = fw.config.coords
    residuals = []
    worst = 0.0
    for e, perm in zip(phi.group.elements, phi.perms):
        image = p @ e.matrix.T  # row i holds M_x p_i
        res = np.linalg.norm(image - p[perm], axis=1)
        worst = max(worst, float(res.max()) if res.size else 0.0)
        residuals.append(tuple(float(r) for r in res))

    valid = not auto_fail and not hom_fail and worst <= tol
    return TypeMapReport(
        valid=valid,
        automorphism_failures=tuple(auto_fail),
        homomorphism_failures=tuple(hom_fail),
        max_residual=worst,
        tolerance=float(tol),
        residuals=tuple(residuals),
    )


# ---------------------------------------------------------------------------
# external / internal representations
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Representation:
    """Matrix representation of a group: one square matrix per element."""

    group: SymmetryGroup
    matrices: tuple[np.ndarray, ...]
    degree: int

    def matrix(self, index: int) -> np.ndarray:
        return self.matrices[index]

    def max_homomorphism_residual(self) -> float:
        worst = 0.0
        cay = self.group.cayley
        for i in range(self.group.order):
            for j in range(self.group.order):
                delta = self.matrices[i] @ self.matrices[j] - self.matrices[cay[i, j]]
                worst = max(worst, float(np.abs(delta).max()))
        return worst


def external_representation(phi: TypeMap) -> Representation:
    """Action on joint displacement fields (degree d*n).

    The matrix for x carries the d x d orthogonal block M_x at block position
    (phi(x)(w), w) for every vertex w: the displacement at w is rotated by
    M_x and transported to the image vertex.
    """
    d = phi.group.dim
    n = phi.vertex_count
    mats = []
    for e, perm in zip(phi.group.elements, phi.perms):
        h = np.zeros((d * n, d * n))
        for w in range(n):
            v = int(perm[w])
            h[d * v : d * (v + 1), d * w : d * (w + 1)] = e.matrix
        mats.append(h)
    return Representation(phi.group, tuple(mats), d * n)


def internal_representation(phi: TypeMap, graph: Graph) -> Representation:
    """Action on bar coordinates (degree m): edge k is carried to its image edge."""
    if graph.n != phi.vertex_count:
        raise GroupError("graph does not match the type map")
    m = graph.edge_count
    mats = []
    for perm in phi.perms:
        sigma = induced_edge_permutation(graph, perm)
        h = np.zeros((m, m))
        for k in range(m):
            h[sigma[k], k] = 1.0
        mats.append(h)
    return Representation(phi.group, tuple(mats), m)


def symmetry_equation_matrices(phi: TypeMap) -> list[np.ndarray]:
    """For each element x, the matrix M^(x) - P_phi(x) whose kernel expresses
    the symmetry constraint on flattened configurations."""
    d = phi.group.dim
    n = phi.vertex_count
    out = []
    for e, perm in zip(phi.group.elements, phi.perms):
        big_m = np.kron(np.eye(n), e.matrix)
        p_mat = np.zeros((d * n, d * n))
        for i in range(n):
            j = int(perm[i])
            p_mat[d * i : d * (i + 1), d * j : d * (j + 1)] = np.eye(d)
        out.append(big_m - p_mat)
    return out
