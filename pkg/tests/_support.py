"""Shared builders and independent oracles for the test suite.

The oracles deliberately use different computational routes than the library
(orbit counting and group averaging instead of kernel/SVD machinery) so the
two sides cross-check each other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from symrig import (
    Configuration,
    Framework,
    Graph,
    TypeMap,
    edge_function,
    external_representation,
    make_group,
    nullspace,
    numerical_rank,
    rigid_motion_generators,
    sample_symmetric_configuration,
)
from symrig.catalog import k33_edges, octahedron_edges

# ---------------------------------------------------------------------------
# canonical fixtures
# ---------------------------------------------------------------------------


def triangle() -> tuple[Framework, TypeMap]:
    g = Graph(3, [(1, 2), (1, 3), (2, 3)])
    fw = Framework(g, Configuration([[-1.0, 0.0], [1.0, 0.0], [0.0, 2.0]]))
    grp = make_group("Cs", 2, mirror_normal=(1.0, 0.0))
    phi = TypeMap.from_generators(grp, 3, {"s": "(1 2)"})
    return fw, phi


def k33_graph() -> Graph:
    return Graph(6, k33_edges())


def octahedron() -> Graph:
    return Graph(6, octahedron_edges())


def bricard_c2(seed: int = 12) -> tuple[Framework, TypeMap]:
    g = octahedron()
    grp = make_group("Cm", 3, order=2, axis=(0.0, 0.0, 1.0))
    phi = TypeMap.from_generators(grp, 6, {"C2": "(1 3)(2 4)(5 6)"})
    return Framework(g, sample_symmetric_configuration(g, phi, seed)), phi


def bricard_cs(seed: int = 12) -> tuple[Framework, TypeMap]:
    g = octahedron()
    grp = make_group("Cs", 3, mirror_normal=(1.0, 0.0, 0.0))
    phi = TypeMap.from_generators(grp, 6, {"s": "(1 3)(5 6)"})
    return Framework(g, sample_symmetric_configuration(g, phi, seed)), phi


def diamond_square() -> tuple[Framework, TypeMap]:
    """4-cycle at the unit diamond, mirror through joints 1 and 3."""
    g = Graph(4, [(1, 2), (2, 3), (3, 4), (1, 4)])
    fw = Framework(g, Configuration([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]))
    grp = make_group("Cs", 2, mirror_normal=(0.0, 1.0))
    phi = TypeMap.from_generators(grp, 4, {"s": "(2 4)"})
    return fw, phi


# ---------------------------------------------------------------------------
# independent oracles
# ---------------------------------------------------------------------------


def vertex_orbits(phi: TypeMap) -> list[list[int]]:
    seen: set[int] = set()
    orbits = []
    for v in range(phi.vertex_count):
        if v in seen:
            continue
        orbit = sorted({int(p[v]) for p in phi.perms})
        seen.update(orbit)
        orbits.append(orbit)
    return orbits


def fixed_config_dim_oracle(phi: TypeMap) -> int:
    """dim of the symmetric configuration space, by orbit/stabilizer counting."""
    d = phi.group.dim
    total = 0
    for orbit in vertex_orbits(phi):
        v = orbit[0]
        stab = [
            e.matrix
            for e, p in zip(phi.group.elements, phi.perms)
            if int(p[v]) == v and not e.is_identity
        ]
        if not stab:
            total += d
        else:
            total += nullspace(np.vstack([m - np.eye(d) for m in stab])).shape[1]
    return total


def edge_orbit_count_oracle(graph: Graph, phi: TypeMap) -> int:
    """Number of edge orbits = dim of the trivial component of bar space."""
    edges = [frozenset((int(i), int(j))) for i, j in graph.edge_array]
    seen: set[frozenset] = set()
    count = 0
    for e in edges:
        if e in seen:
            continue
        i, j = tuple(e) if len(e) == 2 else (tuple(e)[0], tuple(e)[0])
        orbit = {frozenset((int(p[i]), int(p[j]))) for p in phi.perms}
        seen.update(orbit)
        count += 1
    return count


def symmetric_rigid_dim_oracle(fw: Framework, phi: TypeMap) -> int:
    """dim of fully symmetric rigid motions: group-average the generators, rank."""
    rep = external_representation(phi)
    avg = sum(rep.matrices) / phi.group.order
    gens = rigid_motion_generators(fw.config).generators
    return numerical_rank(avg @ gens).rank


def fd_directional_derivative(graph: Graph, config: Configuration, u: np.ndarray, h: float = 1e-6):
    """Central finite difference of the squared-length map along u."""
    p = config.flatten()
    fp = edge_function(graph, Configuration.from_flat(p + h * u, config.dim))
    fm = edge_function(graph, Configuration.from_flat(p - h * u, config.dim))
    return (fp - fm) / (2.0 * h)


# ---------------------------------------------------------------------------
# randomized symmetric instances
# ---------------------------------------------------------------------------

GROUP_CHOICES = [
    ("C1", 2, None),
    ("C1", 3, None),
    ("Cs", 2, None),
    ("Cs", 3, None),
    ("Cm", 2, 2),
    ("Cm", 2, 3),
    ("Cm", 2, 4),
    ("Cm", 3, 2),
    ("Cm", 3, 3),
    ("Cmv", 2, 2),
    ("Cmv", 3, 2),
    ("Cmv", 3, 3),
]


@dataclass
class Instance:
    fw: Framework
    phi: TypeMap
    seed: int


def _random_unit(rng, dim):
    while True:
        v = rng.normal(size=dim)
        norm = np.linalg.norm(v)
        if norm > 0.1:
            return v / norm


def random_symmetric_instance(seed: int) -> Instance:
    """A random (graph, group, type map, configuration) with exact symmetry.

    Vertices are group orbits of random seed points (some projected onto the
    fixed set of a random operation so stabilized joints occur); edges are
    orbit closures of random vertex pairs.
    """
    rng = np.random.default_rng(seed)
    for attempt in range(20):
        kind, dim, order = GROUP_CHOICES[int(rng.integers(len(GROUP_CHOICES)))]
        axis = (0.0, 0.0, 1.0) if dim == 3 else None
        if kind in ("Cs", "Cmv"):
            if dim == 2:
                normal = tuple(_random_unit(rng, 2))
            else:
                raw = _random_unit(rng, 3)
                raw = raw - raw[2] * np.array([0.0, 0.0, 1.0])  # orthogonal to the axis
                normal = tuple(raw / np.linalg.norm(raw))
        else:
            normal = None
        group = make_group(kind, dim, order=order, axis=axis, mirror_normal=normal)

        pts = []
        for _ in range(int(rng.integers(2, 4))):
            x = rng.uniform(-1.0, 1.0, size=dim)
            if group.order > 1 and rng.random() < 0.4:
                e = group.elements[int(rng.integers(1, group.order))]
                fix = nullspace(e.matrix - np.eye(dim))
                x = fix @ (fix.T @ x) if fix.shape[1] else np.zeros(dim)
            pts.append(x)

        verts: list[np.ndarray] = []
        for x in pts:
            for e in group.elements:
                y = e.matrix @ x
                if not any(np.linalg.norm(y - v) < 1e-6 for v in verts):
                    verts.append(y)
        n = len(verts)
        if n < 2:
            continue
        coords = np.array(verts)

        perms = []
        ok = True
        for e in group.elements:
            image = coords @ e.matrix.T
            perm = np.empty(n, dtype=int)
            for i in range(n):
                dist = np.linalg.norm(coords - image[i], axis=1)
                j = int(np.argmin(dist))
                if dist[j] > 1e-8:
                    ok = False
                    break
                perm[i] = j
            if not ok or len(set(perm.tolist())) != n:
                ok = False
                break
            perms.append(perm)
        if not ok:
            continue

        edge_set: set[tuple[int, int]] = set()
        for _ in range(int(rng.integers(1, 4))):
            i, j = rng.choice(n, size=2, replace=False)
            for p in perms:
                a, b = int(p[i]), int(p[j])
                edge_set.add((min(a, b) + 1, max(a, b) + 1))
        if not edge_set:
            continue

        graph = Graph(n, sorted(edge_set))
        phi = TypeMap(group, n, tuple(perms))
        if phi.homomorphism_violations():
            continue
        return Instance(Framework(graph, Configuration(coords)), phi, seed)
    raise RuntimeError(f"could not build a random symmetric instance for seed {seed}")
