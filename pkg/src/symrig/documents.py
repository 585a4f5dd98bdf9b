"""The .fw framework document format: canonical JSON, parsing, validation.

A document bundles a graph, coordinates, a symmetry group given by its
geometric parameters, and the generator permutations of the type map, plus
optional analysis options.  Serialization is canonical (sorted keys, floats
at 17 significant digits, absent optional keys omitted), so equal documents
render to byte-identical text and reports diff cleanly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .frameworks import Configuration, Framework, FrameworkError, Graph
from .groups import (
    GroupError,
    SymmetryGroup,
    TypeMap,
    automorphism_violation,
    format_cycles,
    make_group,
    parse_cycles,
    validate_type_map,
)

FORMAT_VERSION = 1


class DocumentError(ValueError):
    """Malformed or semantically invalid framework document.

    ``syntactic`` distinguishes unparseable text (with line/column when the
    JSON layer provides them) from schema and semantic violations.
    """

    def __init__(self, message: str, *, syntactic: bool = False, line=None, column=None):
        loc = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + loc)
        self.syntactic = syntactic
        self.line = line
        self.column = column


# ---------------------------------------------------------------------------
# canonical JSON
# ---------------------------------------------------------------------------


def _format_scalar(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if not math.isfinite(v):
            raise DocumentError(f"non-finite number {v!r} cannot be serialized")
        return format(v, ".17g")
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    raise DocumentError(f"cannot serialize value of type {type(value).__name__}")


def canonical_json(obj, indent: int = 0) -> str:
    """Render to canonical JSON text: sorted keys, 17-significant-digit floats."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, Mapping):
        if not obj:
            return "{}"
        parts = [
            f"{inner}{json.dumps(str(k), ensure_ascii=False)}: {canonical_json(obj[k], indent + 1)}"
            for k in sorted(obj)
        ]
        return "{\n" + ",\n".join(parts) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        rendered = [canonical_json(v, indent + 1) for v in seq]
        if all(not isinstance(v, (Mapping, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(rendered) + "]"
        return "[\n" + ",\n".join(inner + r for r in rendered) + "\n" + pad + "]"
    return _format_scalar(obj)


# ---------------------------------------------------------------------------
# document model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AnalysisOptions:
    """Optional per-document analysis defaults carried in the file."""

    seed: int | None = None
    assume_generic: bool = False
    tolerance: float | None = None
    trials: int | None = None
    radius: float | None = None

    def to_dict(self) -> dict:
        out: dict[str, Any] = {}
        if self.seed is not None:
            out["seed"] = int(self.seed)
        if self.assume_generic:
            out["assume_generic"] = True
        if self.tolerance is not None:
            out["tolerance"] = float(self.tolerance)
        if self.trials is not None:
            out["trials"] = int(self.trials)
        if self.radius is not None:
            out["radius"] = float(self.radius)
        return out


@dataclass(frozen=True, eq=False)
class FrameworkDocument:
    dimension: int
    vertex_count: int
    edges: tuple[tuple[int, int], ...]
    coordinates: np.ndarray  # (n, d) floats
    group_kind: str  # C1 | Cs | Cm | Cmv
    group_order: int | None = None
    axis: tuple[float, ...] | None = None
    mirror_normal: tuple[float, ...] | None = None
    phi_generators: Mapping[str, str] = field(default_factory=dict)
    vertex_labels: tuple[str, ...] | None = None
    options: AnalysisOptions = field(default_factory=AnalysisOptions)

    def to_dict(self) -> dict:
        out: dict[str, Any] = {
            "format_version": FORMAT_VERSION,
            "dimension": self.dimension,
            "vertex_count": self.vertex_count,
            "edges": [list(e) for e in self.edges],
            "coordinates": [[float(x) for x in row] for row in np.asarray(self.coordinates)],
            "group": {"kind": self.group_kind},
            "phi": dict(sorted(self.phi_generators.items())),
        }
        if self.group_order is not None:
            out["group"]["order"] = int(self.group_order)
        if self.axis is not None:
            out["group"]["axis"] = [float(x) for x in self.axis]
        if self.mirror_normal is not None:
            out["group"]["mirror_normal"] = [float(x) for x in self.mirror_normal]
        if self.vertex_labels is not None:
            out["vertex_labels"] = list(self.vertex_labels)
        opts = self.options.to_dict()
        if opts:
            out["options"] = opts
        return out


def render_document(doc: FrameworkDocument) -> str:
    return canonical_json(doc.to_dict()) + "\n"


def _expect(data: Mapping, key: str, kinds, where: str):
    if key not in data:
        raise DocumentError(f"missing required key {key!r} in {where}")
    value = data[key]
    if not isinstance(value, kinds):
        raise DocumentError(f"key {key!r} in {where} has wrong type {type(value).__name__}")
    return value


def parse_document(text: str) -> FrameworkDocument:
    """Parse and structurally validate a framework document.

    Syntax errors carry line/column; schema violations name the offending
    element.  Semantic validation of the type map against the coordinates is
    performed by ``validate_document`` / ``build_framework``.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(
            f"JSON syntax error: {exc.msg}", syntactic=True, line=exc.lineno, column=exc.colno
        ) from exc
    if not isinstance(data, dict):
        raise DocumentError("document root must be an object")

    version = _expect(data, "format_version", int, "document")
    if version != FORMAT_VERSION:
        raise DocumentError(f"unsupported format_version {version}")
    dim = _expect(data, "dimension", int, "document")
    if dim not in (2, 3):
        raise DocumentError(f"dimension must be 2 or 3, got {dim}")
    n = _expect(data, "vertex_count", int, "document")
    edges_raw = _expect(data, "edges", list, "document")
    coords_raw = _expect(data, "coordinates", list, "document")
    group_raw = _expect(data, "group", dict, "document")
    phi_raw = _expect(data, "phi", dict, "document")

    try:
        graph = Graph(n, edges_raw)
    except FrameworkError as exc:
        raise DocumentError(f"edges: {exc}") from exc

    if len(coords_raw) != n:
        raise DocumentError(f"coordinates: expected {n} rows, got {len(coords_raw)}")
    try:
        coords = np.array(coords_raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise DocumentError(f"coordinates: {exc}") from exc
    if coords.ndim != 2 or coords.shape[1] != dim:
        raise DocumentError(f"coordinates: each row must have {dim} entries")
    if not np.all(np.isfinite(coords)):
        raise DocumentError("coordinates: entries must be finite")

    kind = _expect(group_raw, "kind", str, "group")
    if kind not in ("C1", "Cs", "Cm", "Cmv"):
        raise DocumentError(f"group.kind must be one of C1, Cs, Cm, Cmv, got {kind!r}")
    order = group_raw.get("order")
    axis = group_raw.get("axis")
    normal = group_raw.get("mirror_normal")
    try:
        group = make_group(kind, dim, order=order, axis=axis, mirror_normal=normal)
    except GroupError as exc:
        raise DocumentError(f"group: {exc}") from exc

    gens: dict[str, str] = {}
    for key, value in phi_raw.items():
        if not isinstance(value, str):
            raise DocumentError(f"phi[{key!r}] must be a cycle string")
        try:
            perm = parse_cycles(value, n)
        except GroupError as exc:
            raise DocumentError(f"phi[{key!r}]: {exc}") from exc
        gens[key] = format_cycles(perm)
    try:
        phi = TypeMap.from_generators(
            group, n, {k: parse_cycles(v, n) for k, v in gens.items()}
        )
    except GroupError as exc:
        raise DocumentError(f"phi: {exc}") from exc
    for element, perm in zip(group.elements, phi.perms):
        bad = automorphism_violation(graph, perm)
        if bad is not None:
            i, j = bad
            u, v = sorted((int(perm[i - 1]) + 1, int(perm[j - 1]) + 1))
            raise DocumentError(
                f"phi: permutation for {element.label} is not a graph automorphism; "
                f"the image ({u}, {v}) of edge ({i}, {j}) is not an edge"
            )

    labels = data.get("vertex_labels")
    if labels is not None:
        if not isinstance(labels, list) or len(labels) != n:
            raise DocumentError(f"vertex_labels must list {n} strings")
        labels = tuple(str(x) for x in labels)

    opts_raw = data.get("options", {})
    if not isinstance(opts_raw, dict):
        raise DocumentError("options must be an object")
    known = {"seed", "assume_generic", "tolerance", "trials", "radius"}
    unknown = set(opts_raw) - known
    if unknown:
        raise DocumentError(f"unknown options: {sorted(unknown)}")
    options = AnalysisOptions(
        seed=opts_raw.get("seed"),
        assume_generic=bool(opts_raw.get("assume_generic", False)),
        tolerance=opts_raw.get("tolerance"),
        trials=opts_raw.get("trials"),
        radius=opts_raw.get("radius"),
    )

    return FrameworkDocument(
        dimension=dim,
        vertex_count=n,
        edges=graph.edges,
        coordinates=coords,
        group_kind=kind,
        group_order=int(order) if order is not None else None,
        axis=tuple(float(x) for x in axis) if axis is not None else None,
        mirror_normal=tuple(float(x) for x in normal) if normal is not None else None,
        phi_generators=gens,
        vertex_labels=labels,
        options=options,
    )


def load_document(path) -> FrameworkDocument:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_document(fh.read())


def save_document(doc: FrameworkDocument, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(render_document(doc))


# ---------------------------------------------------------------------------
# realization
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BuiltFramework:
    framework: Framework
    group: SymmetryGroup
    phi: TypeMap
    options: AnalysisOptions


def build_framework(doc: FrameworkDocument) -> BuiltFramework:
    """Turn a parsed document into live framework/group/type-map objects."""
    graph = Graph(doc.vertex_count, doc.edges)
    config = Configuration(doc.coordinates)
    group = make_group(
        doc.group_kind,
        doc.dimension,
        order=doc.group_order,
        axis=doc.axis,
        mirror_normal=doc.mirror_normal,
    )
    try:
        phi = TypeMap.from_generators(
            group,
            doc.vertex_count,
            {k: parse_cycles(v, doc.vertex_count) for k, v in doc.phi_generators.items()},
        )
    except GroupError as exc:
        raise DocumentError(f"phi: {exc}") from exc
    return BuiltFramework(Framework(graph, config), group, phi, doc.options)


def validate_document(doc: FrameworkDocument) -> dict:
    """Full semantic validation; returns a report dict (see CLI ``validate``)."""
    built = build_framework(doc)
    tol = doc.options.tolerance
    report = validate_type_map(built.framework, built.phi, tol)
    out = report.to_dict()
    out["coincident_edges"] = [k + 1 for k in built.framework.coincident_edges]
    out["dimension"] = doc.dimension
    out["vertex_count"] = doc.vertex_count
    out["edge_count"] = len(doc.edges)
    out["group_kind"] = doc.group_kind
    out["group_order"] = built.group.order
    return out
