import numpy as np
import pytest

from symrig import (
    Configuration,
    DecisionPolicy,
    FlexTracer,
    Framework,
    Graph,
    NoSymmetricFlexError,
    TraceError,
    TypeMap,
    edge_function,
    make_group,
    path_validate,
    rigidity_matrix,
    sample_symmetric_configuration,
    symmetric_rigid_motions,
    tangent_flex,
    trace_flex,
)

from _support import bricard_c2, octahedron

GENERIC = DecisionPolicy(assume_generic=True)


def isostatic_octahedron(seed=12):
    g = octahedron()
    grp = make_group("Cs", 3, mirror_normal=(0, 1, 0))
    phi = TypeMap.from_generators(grp, 6, {"s": "(2 4)"})
    return Framework(g, sample_symmetric_configuration(g, phi, seed)), phi


class TestTangent:
    def test_bricard_tangent_is_unit_and_orthogonal_to_gauge(self):
        fw, phi = bricard_c2()
        tau = tangent_flex(fw, phi)
        assert np.linalg.norm(tau) == pytest.approx(1.0)
        w = symmetric_rigid_motions(fw, phi, 0).basis
        assert np.abs(w.T @ tau).max() <= 1e-10
        r = rigidity_matrix(fw.graph, fw.config)
        assert np.abs(r @ tau).max() <= 1e-9 * np.linalg.norm(r)

    def test_isostatic_raises(self):
        fw, phi = isostatic_octahedron()
        with pytest.raises(NoSymmetricFlexError):
            tangent_flex(fw, phi)

    def test_trivial_group_square_gives_classical_mechanism(self):
        g = Graph(4, [(1, 2), (2, 3), (3, 4), (1, 4)])
        fw = Framework(g, Configuration([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]]))
        phi = TypeMap.from_generators(make_group("C1", 2), 4, {})
        tau = tangent_flex(fw, phi)
        r = rigidity_matrix(g, fw.config)
        assert np.abs(r @ tau).max() <= 1e-9
        w = symmetric_rigid_motions(fw, phi, 0).basis
        assert w.shape[1] == 3
        assert np.abs(w.T @ tau).max() <= 1e-10

    def test_sign_convention_first_nonzero_positive(self):
        fw, phi = bricard_c2()
        tau = tangent_flex(fw, phi)
        first = next(x for x in tau if abs(x) > 1e-9)
        assert first > 0


class TestTraceFlex:
    def test_zero_steps_returns_start(self):
        fw, phi = bricard_c2()
        path = trace_flex(fw, phi, 0, 0.02, policy=GENERIC)
        assert len(path.frames) == 1
        assert np.array_equal(path.frames[0].coords, fw.config.coords)

    def test_gate_requires_certificate(self):
        fw, phi = isostatic_octahedron()
        with pytest.raises(TraceError):
            trace_flex(fw, phi, 5, 0.02, policy=GENERIC)

    def test_bricard_conservation_and_witness(self):
        fw, phi = bricard_c2()
        path = trace_flex(fw, phi, 50, 0.02, policy=GENERIC)
        report = path_validate(path, fw, phi)
        scale = fw.config.scale
        assert report.max_edge_drift <= 1e-8 * scale
        assert report.max_symmetry_residual <= 1e-10
        assert report.witness is not None
        assert report.witness_change > 1e-3
        d56 = [np.linalg.norm(f.coords[4] - f.coords[5]) for f in path.frames]
        assert max(d56) - min(d56) > 1e-3

    def test_consecutive_frames_bounded_by_step(self):
        fw, phi = bricard_c2()
        path = trace_flex(fw, phi, 20, 0.05, policy=GENERIC)
        for a, b in zip(path.frames, path.frames[1:]):
            assert np.linalg.norm(a.coords - b.coords) <= 2 * 0.05

    def test_frames_stay_in_symmetric_space(self):
        fw, phi = bricard_c2()
        path = trace_flex(fw, phi, 20, 0.05, policy=GENERIC)
        assert max(path.symmetry_residual) <= 1e-10

    def test_tangent_consistency_along_path(self):
        fw, phi = bricard_c2()
        path = trace_flex(fw, phi, 10, 0.05, policy=GENERIC)
        for frame, tau in zip(path.frames, path.tangents):
            r = rigidity_matrix(fw.graph, frame)
            assert np.abs(r @ tau).max() <= 1e-7

    def test_reversibility(self):
        fw, phi = bricard_c2()
        steps, h = 15, 0.03
        path = trace_flex(fw, phi, steps, h, policy=GENERIC)
        end = Framework(fw.graph, path.frames[-1])
        back = FlexTracer(
            end, phi, allow_unverified=True, initial_tangent=-path.tangents[-1]
        ).run(steps, h)
        assert np.linalg.norm(back.frames[-1].coords - fw.config.coords) <= 1e-6

    def test_isostatic_override_flags_no_flex(self):
        fw, phi = isostatic_octahedron()
        path = trace_flex(fw, phi, 5, 0.02, allow_unverified=True)
        assert "no flex realized" in path.flags
        report = path_validate(path, fw, phi)
        assert report.witness is None
        assert "rigid motion, not a flex" in report.flags

    def test_probe_does_not_commit(self):
        fw, phi = bricard_c2()
        tracer = FlexTracer(fw, phi, certificate=None, allow_unverified=True)
        before = tracer.coords.copy()
        tracer.probe(0.05)
        assert np.array_equal(tracer.coords, before)


class TestPathValidate:
    def test_translation_path_flagged_as_rigid_motion(self):
        fw, phi = bricard_c2()
        shift = np.array([0.0, 0.0, 0.1])
        frames = [
            Configuration(fw.config.coords + k * shift) for k in range(4)
        ]
        from symrig.tracing import FlexPath

        path = FlexPath(
            frames=tuple(frames),
            step_size=0.1,
            edge_drift=(0.0,) * 4,
            edge_drift_sq=(0.0,) * 4,
            symmetry_residual=(0.0,) * 4,
            gauge_drift=(0.0,) * 4,
            tangents=(),
            singular_frames=(),
            flags=(),
        )
        report = path_validate(path, fw, phi)
        assert report.witness is None
        assert "rigid motion, not a flex" in report.flags
        assert report.max_edge_drift <= 1e-10

    def test_corrupted_frame_is_reported(self):
        fw, phi = bricard_c2()
        path = trace_flex(fw, phi, 5, 0.02, policy=GENERIC)
        coords = path.frames[3].coords.copy()
        coords[2, 1] += 1e-3
        frames = list(path.frames)
        frames[3] = Configuration(coords)
        from symrig.tracing import FlexPath

        bad = FlexPath(
            frames=tuple(frames),
            step_size=path.step_size,
            edge_drift=path.edge_drift,
            edge_drift_sq=path.edge_drift_sq,
            symmetry_residual=path.symmetry_residual,
            gauge_drift=path.gauge_drift,
            tangents=path.tangents,
            singular_frames=path.singular_frames,
            flags=path.flags,
        )
        report = path_validate(bad, fw, phi)
        assert report.failing_frame == 3
        assert not report.ok
