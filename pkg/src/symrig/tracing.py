"""Predictor-corrector tracing of symmetry-preserving flexes.

The path lives in the symmetric configuration space by construction: frames
are expressed in an orthonormal basis of that space, the predictor steps
along the current symmetric flex tangent, and a Gauss-Newton corrector
restores the bar lengths.  Least-norm corrections are automatically
orthogonal to the kernel of the restricted Jacobian, which pins the
symmetric rigid motions (the only gauge freedom inside the space).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blocks import fully_symmetric_flexes, symmetric_rigid_motions
from .certify import (
    VERDICT_FINITE_FLEX,
    DecisionPolicy,
    FlexCertificate,
    finite_flex_decision,
)
from .frameworks import (
    Configuration,
    Framework,
    edge_function,
    numerical_rank,
    nullspace,
    rigid_motion_generators,
    rigidity_matrix,
)
from .groups import TypeMap, external_representation
from .irreps import fixed_subspace_basis

MAX_CORRECTOR_ITERS = 25
MAX_STEP_HALVINGS = 8


class NoSymmetricFlexError(ValueError):
    """Requested a flex tangent where no fully symmetric flex exists."""


class TraceError(RuntimeError):
    """Corrector divergence or an unverified trace request."""

    def __init__(self, message: str, frame_index: int | None = None):
        super().__init__(message)
        self.frame_index = frame_index


def _sign_fix(vec: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    for x in vec:
        if abs(x) > tol:
            return vec if x > 0 else -vec
    return vec


def tangent_flex(fw: Framework, phi: TypeMap, rank_tol: float | None = None) -> np.ndarray:
    """Deterministically selected unit flex direction in the symmetric space.

    Takes the most robust direction of the fully symmetric flex space (the
    leading column of its orthonormal basis, i.e. the largest singular-gap
    direction of the projected kernel), with the sign normalized so the first
    nonzero coordinate is positive.
    """
    flexes = fully_symmetric_flexes(fw, phi, rank_tol)
    if flexes.shape[1] == 0:
        raise NoSymmetricFlexError("the framework has no fully symmetric infinitesimal flex")
    return _sign_fix(flexes[:, 0].copy())


@dataclass(frozen=True, eq=False)
class FlexPath:
    """A traced discrete path with per-frame diagnostics.

    ``edge_drift`` holds max absolute bar-length deviation from frame 0,
    ``edge_drift_sq`` the same for squared lengths, ``symmetry_residual`` the
    max violation of the symmetry equations, and ``gauge_drift`` the motion
    accumulated along the initial symmetric rigid directions.
    """

    frames: tuple[Configuration, ...]
    step_size: float
    edge_drift: tuple[float, ...]
    edge_drift_sq: tuple[float, ...]
    symmetry_residual: tuple[float, ...]
    gauge_drift: tuple[float, ...]
    tangents: tuple[np.ndarray, ...]
    singular_frames: tuple[int, ...]
    flags: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def max_edge_drift(self) -> float:
        return max(self.edge_drift) if self.edge_drift else 0.0

    @property
    def max_symmetry_residual(self) -> float:
        return max(self.symmetry_residual) if self.symmetry_residual else 0.0


class FlexTracer:
    """Stateful predictor-corrector walker along a symmetric flex.

    Unless ``allow_unverified`` is set, construction requires a certificate
    with a finite-flex verdict (one is computed when not supplied).  With the
    override and no flex present, tracing still runs: the predictor follows
    the least-singular restricted direction and the corrector collapses every
    step back to the start, which is then flagged on the path.
    """

    def __init__(
        self,
        fw: Framework,
        phi: TypeMap,
        *,
        certificate: FlexCertificate | None = None,
        allow_unverified: bool = False,
        policy: DecisionPolicy | None = None,
        rank_tol: float | None = None,
        corrector_tol: float = 1e-12,
        initial_tangent: np.ndarray | None = None,
    ):
        self.fw = fw
        self.phi = phi
        self.graph = fw.graph
        self.dim = fw.dim
        self.rank_tol = rank_tol
        self.corrector_tol = corrector_tol

        if certificate is None and not allow_unverified:
            certificate = finite_flex_decision(fw, phi, policy)
        if not allow_unverified and certificate.verdict != VERDICT_FINITE_FLEX:
            raise TraceError(
                "tracing requires a finite-flex certificate "
                f"(verdict was {certificate.verdict!r}); pass allow_unverified to override"
            )
        self.certificate = certificate

        self.basis = fixed_subspace_basis(phi)  # (dn, k)
        flat = fw.config.flatten()
        self.coords = self.basis.T @ flat
        if np.linalg.norm(self.basis @ self.coords - flat) > 1e-9 * fw.config.scale:
            raise TraceError("the starting configuration does not lie in the symmetric space")
        self.lengths_sq0 = edge_function(self.graph, fw.config)
        self.scale_sq = max(1.0, float(np.abs(self.lengths_sq0).max()) if self.lengths_sq0.size else 1.0)

        ext = external_representation(phi)
        self._sym_mats = [m for m, e in zip(ext.matrices, phi.group.elements) if not e.is_identity]

        base = numerical_rank(self._jacobian(self.coords), rank_tol)
        self.base_rank = base.rank
        self.abs_tol = base.tolerance_used
        self._gauge0 = self.basis.T @ symmetric_rigid_motions(fw, phi, 0).basis

        self._stepped = False
        self.no_flex = False
        if initial_tangent is not None:
            t = self.basis.T @ np.asarray(initial_tangent, dtype=float).reshape(-1)
            norm = np.linalg.norm(t)
            if norm < 1e-12:
                raise TraceError("initial tangent has no component in the symmetric space")
            self.tangent = t / norm
        else:
            try:
                self.tangent = self.basis.T @ tangent_flex(fw, phi, rank_tol)
                self.tangent /= np.linalg.norm(self.tangent)
            except NoSymmetricFlexError:
                if not allow_unverified:
                    raise
                self.no_flex = True
                self.tangent = self._fallback_direction()

    # -- geometry helpers -------------------------------------------------

    def _config(self, coords: np.ndarray) -> Configuration:
        return Configuration.from_flat(self.basis @ coords, self.dim)

    def _jacobian(self, coords: np.ndarray) -> np.ndarray:
        return 2.0 * rigidity_matrix(self.graph, self._config(coords)) @ self.basis

    def _gauge_coords(self, coords: np.ndarray) -> np.ndarray:
        w = symmetric_rigid_motions(Framework(self.graph, self._config(coords)), self.phi, 0)
        return self.basis.T @ w.basis

    def _fallback_direction(self) -> np.ndarray:
        # least-singular direction of the restricted Jacobian with the gauge
        # directions appended; used only under the unverified override
        stack = np.vstack([self._jacobian(self.coords), self._gauge0.T])
        _, _, vt = np.linalg.svd(stack)
        return _sign_fix(vt[-1].copy())

    def _frame_tangent(self, coords: np.ndarray, prev: np.ndarray) -> np.ndarray:
        kern = nullspace(self._jacobian(coords), self.abs_tol)
        if kern.shape[1] == 0:
            return prev
        gauge = self._gauge_coords(coords)
        if gauge.shape[1]:
            kern = kern - gauge @ (gauge.T @ kern)
        # pick the kernel direction best aligned with the previous tangent
        weights = kern.T @ prev
        if np.linalg.norm(weights) < 1e-12:
            cand = kern[:, 0]
        else:
            cand = kern @ weights
        norm = np.linalg.norm(cand)
        if norm < 1e-12:
            return prev
        cand = cand / norm
        return cand if float(cand @ prev) >= 0 else -cand

    def _correct(self, coords: np.ndarray) -> np.ndarray:
        c = coords.copy()
        target = self.lengths_sq0
        for _ in range(MAX_CORRECTOR_ITERS):
            residual = edge_function(self.graph, self._config(c)) - target
            if residual.size == 0 or np.abs(residual).max() < self.corrector_tol * self.scale_sq:
                return c
            jac = self._jacobian(c)
            delta, *_ = np.linalg.lstsq(jac, -residual, rcond=None)
            c = c + delta
            if not np.all(np.isfinite(c)):
                break
        residual = edge_function(self.graph, self._config(c)) - target
        if residual.size and np.abs(residual).max() >= self.corrector_tol * self.scale_sq:
            raise _CorrectorFailure()
        return c

    # -- stepping ----------------------------------------------------------

    def probe(self, step_size: float) -> Configuration:
        """Predict and correct one frame of the given size without committing.

        Useful for refining the path onto an event (for example a frame where
        some joints become coplanar) by bisection on the step size.
        """
        predicted = self.coords + step_size * self.tangent
        return self._config(self._correct(predicted))

    def step(self, step_size: float) -> tuple[np.ndarray, float, bool]:
        """Advance one frame; returns (coords, achieved step, singular flag).

        The step is halved (up to a floor) when the corrector fails to
        converge, and once more preemptively after a frame where the
        restricted Jacobian lost rank.
        """
        h = step_size
        singular_here = numerical_rank(self._jacobian(self.coords), self.abs_tol).rank < self.base_rank
        if singular_here:
            h = h / 2.0
        for _ in range(MAX_STEP_HALVINGS + 1):
            predicted = self.coords + h * self.tangent
            try:
                corrected = self._correct(predicted)
            except _CorrectorFailure:
                h = h / 2.0
                continue
            direction = corrected - self.coords
            self.tangent = self._frame_tangent(
                corrected, direction if np.linalg.norm(direction) > 1e-14 else self.tangent
            )
            self.coords = corrected
            self._stepped = True
            sing = numerical_rank(self._jacobian(corrected), self.abs_tol).rank < self.base_rank
            return corrected, h, sing
        raise TraceError("corrector failed to converge after step halving", None)

    def run(self, steps: int, step_size: float) -> FlexPath:
        if steps < 0:
            raise ValueError("steps must be non-negative")
        frames = [self.fw.config if not self._stepped else self._config(self.coords)]
        tangents = [self.basis @ self.tangent]
        drift = [0.0]
        drift_sq = [0.0]
        sym_res = [self._symmetry_residual(frames[0])]
        gauge = [0.0]
        singular: list[int] = []
        flags: list[str] = []
        start_coords = self.coords.copy()
        lengths0 = np.sqrt(np.maximum(self.lengths_sq0, 0.0))

        reduced = False
        for k in range(steps):
            try:
                coords, achieved, sing = self.step(step_size)
            except TraceError as exc:
                raise TraceError(str(exc), frame_index=k + 1) from exc
            if achieved < step_size:
                reduced = True
            if sing:
                singular.append(k + 1)
            frame = self._config(coords)
            frames.append(frame)
            tangents.append(self.basis @ self.tangent)
            lsq = edge_function(self.graph, frame)
            drift_sq.append(float(np.abs(lsq - self.lengths_sq0).max()) if lsq.size else 0.0)
            lengths = np.sqrt(np.maximum(lsq, 0.0))
            drift.append(float(np.abs(lengths - lengths0).max()) if lsq.size else 0.0)
            sym_res.append(self._symmetry_residual(frame))
            if self._gauge0.shape[1]:
                gauge.append(float(np.linalg.norm(self._gauge0.T @ (coords - start_coords))))
            else:
                gauge.append(0.0)

        if reduced:
            flags.append("step reduced")
        if singular:
            flags.append("singular frames traversed")
        if self.no_flex:
            flags.append("no flex realized")
        elif steps > 0 and np.linalg.norm(self.coords - start_coords) < 1e-9:
            flags.append("no flex realized")
        return FlexPath(
            frames=tuple(frames),
            step_size=step_size,
            edge_drift=tuple(drift),
            edge_drift_sq=tuple(drift_sq),
            symmetry_residual=tuple(sym_res),
            gauge_drift=tuple(gauge),
            tangents=tuple(tangents),
            singular_frames=tuple(singular),
            flags=tuple(flags),
        )

    def _symmetry_residual(self, config: Configuration) -> float:
        flat = config.flatten()
        worst = 0.0
        for mat in self._sym_mats:
            worst = max(worst, float(np.abs(mat @ flat - flat).max()))
        return worst


class _CorrectorFailure(Exception):
    pass


def trace_flex(
    fw: Framework,
    phi: TypeMap,
    steps: int,
    step_size: float,
    *,
    certificate: FlexCertificate | None = None,
    allow_unverified: bool = False,
    policy: DecisionPolicy | None = None,
    rank_tol: float | None = None,
) -> FlexPath:
    """Trace the framework's symmetry-preserving flex for ``steps`` frames."""
    tracer = FlexTracer(
        fw,
        phi,
        certificate=certificate,
        allow_unverified=allow_unverified,
        policy=policy,
        rank_tol=rank_tol,
    )
    return tracer.run(steps, step_size)


@dataclass(frozen=True)
class PathReport:
    """Validation summary of a traced path against its framework."""

    ok: bool
    max_edge_drift: float
    max_edge_drift_sq: float
    max_symmetry_residual: float
    witness: tuple[int, int] | None
    witness_change: float
    failing_frame: int | None
    flags: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "max_edge_drift": self.max_edge_drift,
            "max_edge_drift_sq": self.max_edge_drift_sq,
            "max_symmetry_residual": self.max_symmetry_residual,
            "witness": list(self.witness) if self.witness else None,
            "witness_change": self.witness_change,
            "failing_frame": self.failing_frame,
            "flags": list(self.flags),
        }


def path_validate(
    path: FlexPath,
    fw: Framework,
    phi: TypeMap,
    witness_threshold: float | None = None,
    edge_tol: float | None = None,
    symmetry_tol: float = 1e-10,
) -> PathReport:
    """Check a path for constraint conservation, symmetry, and non-congruence.

    The non-congruence witness is the vertex pair whose distance changes the
    most across the path; a change above the threshold certifies the frames
    leave the congruence class of the start.  A drift-free path with no
    witness is flagged as a rigid motion rather than a flex.
    """
    if not path.frames:
        raise ValueError("path has no frames")
    ref = path.frames[0]
    n = ref.n
    scale = ref.scale
    if witness_threshold is None:
        witness_threshold = 1e-6 * scale
    lengths_sq0 = edge_function(fw.graph, ref)
    scale_sq = max(1.0, float(np.abs(lengths_sq0).max()) if lengths_sq0.size else 1.0)
    if edge_tol is None:
        edge_tol = 1e-8 * scale_sq

    ext = external_representation(phi)
    sym_mats = [m for m, e in zip(ext.matrices, phi.group.elements) if not e.is_identity]

    iu = np.triu_indices(n, k=1)

    def pairwise(config: Configuration) -> np.ndarray:
        diff = config.coords[:, None, :] - config.coords[None, :, :]
        return np.linalg.norm(diff, axis=2)[iu]

    base_pairs = pairwise(ref)
    lengths0 = np.sqrt(np.maximum(lengths_sq0, 0.0))
    max_drift = 0.0
    max_drift_sq = 0.0
    max_sym = 0.0
    failing = None
    pair_change = np.zeros_like(base_pairs)
    for idx, frame in enumerate(path.frames):
        lsq = edge_function(fw.graph, frame)
        if lsq.size:
            dsq = float(np.abs(lsq - lengths_sq0).max())
            dlen = float(np.abs(np.sqrt(np.maximum(lsq, 0.0)) - lengths0).max())
        else:
            dsq = dlen = 0.0
        if dsq > edge_tol and failing is None:
            failing = idx
        max_drift = max(max_drift, dlen)
        max_drift_sq = max(max_drift_sq, dsq)
        flat = frame.flatten()
        for mat in sym_mats:
            max_sym = max(max_sym, float(np.abs(mat @ flat - flat).max()))
        pair_change = np.maximum(pair_change, np.abs(pairwise(frame) - base_pairs))

    witness = None
    witness_change = float(pair_change.max()) if pair_change.size else 0.0
    flags = list(path.flags)
    if pair_change.size and witness_change > witness_threshold:
        best = int(np.argmax(pair_change))
        witness = (int(iu[0][best]) + 1, int(iu[1][best]) + 1)
    else:
        flags.append("rigid motion, not a flex")
    if failing is not None:
        flags.append("edge drift above tolerance")
    ok = failing is None and max_sym <= symmetry_tol
    return PathReport(
        ok=ok,
        max_edge_drift=max_drift,
        max_edge_drift_sq=max_drift_sq,
        max_symmetry_residual=max_sym,
        witness=witness,
        witness_change=witness_change,
        failing_frame=failing,
        flags=tuple(flags),
    )
