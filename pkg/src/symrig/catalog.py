"""Built-in example frameworks.

Every generator returns a FrameworkDocument.  Where the geometry is not
pinned by construction, coordinates are drawn inside the symmetric
configuration space from the seed; such documents carry
``assume_generic: true`` so the certificate pipeline may treat them as
symmetry-generic samples.
"""

from __future__ import annotations

import math
import re

import numpy as np

from .certify import sample_symmetric_configuration
from .documents import AnalysisOptions, DocumentError, FrameworkDocument
from .groups import TypeMap, make_group, parse_cycles

DEFAULT_SEED = 12

X = (1.0, 0.0, 0.0)
Y = (0.0, 1.0, 0.0)
Z = (0.0, 0.0, 1.0)


def octahedron_edges() -> list[tuple[int, int]]:
    """Octahedron on vertices 1..6: equator 4-cycle (1,2,3,4), apexes 5 and 6."""
    ring = [(1, 2), (2, 3), (3, 4), (1, 4)]
    spokes = [(i, a) for a in (5, 6) for i in (1, 2, 3, 4)]
    return sorted(tuple(sorted(e)) for e in ring + spokes)


def k33_edges() -> list[tuple[int, int]]:
    """Complete bipartite graph on parts {1,2,3} and {4,5,6}."""
    return [(i, j) for i in (1, 2, 3) for j in (4, 5, 6)]


def double_suspension_edges(n: int) -> list[tuple[int, int]]:
    """A 2n-gon (vertices 1..2n) joined to two cone vertices 2n+1, 2n+2."""
    if n < 2:
        raise DocumentError(f"double-suspension needs n >= 2, got {n}")
    ring = [(i, i % (2 * n) + 1) for i in range(1, 2 * n + 1)]
    cones = [(i, c) for c in (2 * n + 1, 2 * n + 2) for i in range(1, 2 * n + 1)]
    return sorted(tuple(sorted(e)) for e in ring + cones)


def _sampled_doc(
    dim, edges, n, group_kind, phi_gens, seed, *, order=None, axis=None, mirror_normal=None
) -> FrameworkDocument:
    from .frameworks import Graph

    group = make_group(group_kind, dim, order=order, axis=axis, mirror_normal=mirror_normal)
    phi = TypeMap.from_generators(
        group, n, {k: parse_cycles(v, n) for k, v in phi_gens.items()}
    )
    config = sample_symmetric_configuration(Graph(n, edges), phi, seed)
    return FrameworkDocument(
        dimension=dim,
        vertex_count=n,
        edges=tuple(tuple(e) for e in edges),
        coordinates=config.coords,
        group_kind=group_kind,
        group_order=order,
        axis=axis,
        mirror_normal=mirror_normal,
        phi_generators=dict(phi_gens),
        options=AnalysisOptions(seed=seed, assume_generic=True),
    )


def _triangle_cs(seed: int, n_param) -> FrameworkDocument:
    # mirror along the y-axis; apex on the mirror
    coords = np.array([[-1.0, 0.0], [1.0, 0.0], [0.0, 2.0]])
    return FrameworkDocument(
        dimension=2,
        vertex_count=3,
        edges=((1, 2), (1, 3), (2, 3)),
        coordinates=coords,
        group_kind="Cs",
        mirror_normal=(1.0, 0.0),
        phi_generators={"s": "(1 2)"},
        options=AnalysisOptions(seed=seed),
    )


def _k33_phi_a(seed: int, n_param) -> FrameworkDocument:
    return _sampled_doc(
        2, k33_edges(), 6, "Cs", {"s": "(1 2)(5 6)"}, seed, mirror_normal=(1.0, 0.0)
    )


def _k33_phi_b(seed: int, n_param) -> FrameworkDocument:
    return _sampled_doc(
        2, k33_edges(), 6, "Cs", {"s": "(1 4)(2 5)(3 6)"}, seed, mirror_normal=(1.0, 0.0)
    )


def _k33_hexagon(seed: int, n_param) -> FrameworkDocument:
    # All six joints on the unit circle, hexagonal cyclic order 1,4,2,5,3,6;
    # the mirror (y-axis) fixes joints 3 and 4 and swaps the free pairs.
    # This is a special mirror-symmetric position of the same graph and type
    # map as k33-phi-a: it carries a fully symmetric flex and self-stress.
    ang = {1: 60.0, 4: 90.0, 2: 120.0, 5: 200.0, 3: 270.0, 6: 340.0}
    coords = np.zeros((6, 2))
    for v, a in ang.items():
        rad = math.radians(a)
        coords[v - 1] = (math.cos(rad), math.sin(rad))
    # make the mirror pairs exact: 2 = s(1), 6 = s(5), fixed joints on x = 0
    coords[1] = (-coords[0][0], coords[0][1])
    coords[5] = (-coords[4][0], coords[4][1])
    coords[2][0] = 0.0
    coords[3][0] = 0.0
    return FrameworkDocument(
        dimension=2,
        vertex_count=6,
        edges=tuple(k33_edges()),
        coordinates=coords,
        group_kind="Cs",
        mirror_normal=(1.0, 0.0),
        phi_generators={"s": "(1 2)(5 6)"},
        options=AnalysisOptions(seed=seed),
    )


def _bricard_c2(seed: int, n_param) -> FrameworkDocument:
    return _sampled_doc(
        3, octahedron_edges(), 6, "Cm", {"C2": "(1 3)(2 4)(5 6)"}, seed, order=2, axis=Z
    )


def _bricard_cs(seed: int, n_param) -> FrameworkDocument:
    return _sampled_doc(
        3, octahedron_edges(), 6, "Cs", {"s": "(1 3)(5 6)"}, seed, mirror_normal=X
    )


def _octahedron_c2v(seed: int, n_param) -> FrameworkDocument:
    return _sampled_doc(
        3,
        octahedron_edges(),
        6,
        "Cmv",
        {"C2": "(1 3)(2 4)(5 6)", "s": "(1 3)(5 6)"},
        seed,
        order=2,
        axis=Z,
        mirror_normal=X,
    )


def _octahedron_cs_isostatic(seed: int, n_param) -> FrameworkDocument:
    return _sampled_doc(
        3, octahedron_edges(), 6, "Cs", {"s": "(2 4)"}, seed, mirror_normal=Y
    )


def _double_suspension(seed: int, n_param) -> FrameworkDocument:
    n = 2 if n_param is None else int(n_param)
    edges = double_suspension_edges(n)
    two_n = 2 * n
    cycles = "".join(f"({i} {i + n})" for i in range(1, n + 1))
    cycles += f"({two_n + 1} {two_n + 2})"
    return _sampled_doc(
        3, edges, two_n + 2, "Cm", {"C2": cycles}, seed, order=2, axis=Z
    )


def _square_4cycle(seed: int, n_param) -> FrameworkDocument:
    # unit square with the mirror through opposite edge midpoints
    coords = np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])
    return FrameworkDocument(
        dimension=2,
        vertex_count=4,
        edges=((1, 2), (1, 4), (2, 3), (3, 4)),
        coordinates=coords,
        group_kind="Cs",
        mirror_normal=(1.0, 0.0),
        phi_generators={"s": "(1 2)(3 4)"},
        options=AnalysisOptions(seed=seed),
    )


_BUILDERS = {
    "triangle-cs": _triangle_cs,
    "k33-phi-a": _k33_phi_a,
    "k33-phi-b": _k33_phi_b,
    "k33-hexagon": _k33_hexagon,
    "bricard-c2": _bricard_c2,
    "bricard-cs": _bricard_cs,
    "octahedron-c2v": _octahedron_c2v,
    "octahedron-cs-isostatic": _octahedron_cs_isostatic,
    "double-suspension": _double_suspension,
    "square-4cycle": _square_4cycle,
}


def example_names() -> tuple[str, ...]:
    return tuple(sorted(_BUILDERS))


def builtin_example(name: str, seed: int | None = None, n: int | None = None) -> FrameworkDocument:
    """Build a named example document.

    ``double-suspension`` takes the half-gon-size parameter either via ``n``
    or inline as ``double-suspension(3)``.
    """
    match = re.fullmatch(r"([a-z0-9-]+)\((\d+)\)", name.strip())
    if match:
        name, inline_n = match.group(1), int(match.group(2))
        if n is not None and n != inline_n:
            raise DocumentError("conflicting size parameters for the example")
        n = inline_n
    if name not in _BUILDERS:
        known = ", ".join(example_names())
        raise DocumentError(f"unknown example {name!r}; known examples: {known}")
    if n is not None and name != "double-suspension":
        raise DocumentError(f"example {name!r} takes no size parameter")
    return _BUILDERS[name](DEFAULT_SEED if seed is None else int(seed), n)
